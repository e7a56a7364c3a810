//! Plain-text stream format for driving the engine without the simulator.
//!
//! One record per cycle:
//!
//! ```text
//! t, pamp, danger, safe, antigen_id*count[;antigen_id*count...]
//! ```
//!
//! The antigen field may be empty or omitted. Blank lines and lines
//! starting with `#` are ignored. Presentations are written back as
//! `t,antigen_id,context` rows.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::cell::{AntigenType, Context, Presentation};
use super::engine::DcaEngine;
use super::signals::SignalVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StreamRecord {
    pub t: f64,
    pub signals: SignalVector,
    pub antigen: Vec<(AntigenType, usize)>,
}

impl StreamRecord {
    pub fn to_line(&self) -> String {
        let mut s = format!(
            "{}, {}, {}, {}, ",
            self.t, self.signals.pamp, self.signals.danger, self.signals.safe
        );
        for (i, (id, n)) in self.antigen.iter().enumerate() {
            if i > 0 {
                s.push(';');
            }
            let _ = write!(s, "{id}*{n}");
        }
        s
    }
}

/// A presentation stamped with the cycle time it happened in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPresentation {
    pub t: f64,
    pub antigen: AntigenType,
    pub context: Context,
}

impl TimedPresentation {
    pub fn new(t: f64, p: Presentation) -> Self {
        Self {
            t,
            antigen: p.antigen,
            context: p.context,
        }
    }

    pub fn presentation(&self) -> Presentation {
        Presentation {
            antigen: self.antigen,
            context: self.context,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_record(line: &str, line_no: usize) -> Result<StreamRecord> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if !(4..=5).contains(&fields.len()) {
        return Err(parse_err(
            line_no,
            format!(
                "expected 4 or 5 comma-separated fields, found {}",
                fields.len()
            ),
        ));
    }
    let num = |i: usize, name: &str| -> Result<f64> {
        let v: f64 = fields[i]
            .parse()
            .map_err(|_| parse_err(line_no, format!("{name}: cannot parse {:?}", fields[i])))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(parse_err(line_no, format!("{name} is not finite")))
        }
    };
    let t = num(0, "t")?;
    let signals = SignalVector::new(num(1, "pamp")?, num(2, "danger")?, num(3, "safe")?)
        .map_err(|e| parse_err(line_no, e.to_string()))?;

    let mut antigen = Vec::new();
    if let Some(field) = fields.get(4).filter(|f| !f.is_empty()) {
        for item in field.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (id, count) = match item.split_once('*') {
                Some((id, count)) => (id.trim(), count.trim()),
                None => (item, "1"),
            };
            let id: u32 = id
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad antigen id {id:?}")))?;
            let count: usize = count
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad antigen count {count:?}")))?;
            antigen.push((AntigenType(id), count));
        }
    }
    Ok(StreamRecord {
        t,
        signals,
        antigen,
    })
}

/// Parses a whole stream. Line numbers in errors are 1-based.
pub fn parse_stream<R: BufRead>(reader: R) -> Result<Vec<StreamRecord>> {
    let mut out = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let rec = parse_record(trimmed, line_no)?;
        if rec.t < last_t {
            return Err(parse_err(line_no, "records must be time-ordered"));
        }
        last_t = rec.t;
        out.push(rec);
    }
    Ok(out)
}

/// Feeds each record to `engine` as one cycle: antigen in, signals set,
/// population updated.
pub fn replay(engine: &mut DcaEngine, records: &[StreamRecord]) -> Result<Vec<TimedPresentation>> {
    let mut log = Vec::new();
    for rec in records {
        for &(id, n) in &rec.antigen {
            engine.add_antigen(id, n);
        }
        engine.set_signals(rec.signals)?;
        log.extend(
            engine
                .cycle()
                .into_iter()
                .map(|p| TimedPresentation::new(rec.t, p)),
        );
    }
    Ok(log)
}

pub fn write_presentations<W: Write>(w: W, log: &[TimedPresentation]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["t", "antigen_id", "context"])?;
    for p in log {
        wtr.write_record(&[
            p.t.to_string(),
            p.antigen.to_string(),
            p.context.as_u8().to_string(),
        ])?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<presentations>".into(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dca::DcaConfig;

    #[test]
    fn parses_full_record() {
        let r = parse_record("3, 100, 50, 0, 7*10;2*3", 1).unwrap();
        assert_eq!(r.t, 3.0);
        assert_eq!(r.signals, SignalVector::new(100.0, 50.0, 0.0).unwrap());
        assert_eq!(r.antigen, vec![(AntigenType(7), 10), (AntigenType(2), 3)]);
    }

    #[test]
    fn antigen_field_optional() {
        assert!(parse_record("0, 1, 2, 3", 1).unwrap().antigen.is_empty());
        assert!(parse_record("0, 1, 2, 3, ", 1).unwrap().antigen.is_empty());
        assert_eq!(
            parse_record("0,1,2,3,4", 1).unwrap().antigen,
            vec![(AntigenType(4), 1)]
        );
    }

    #[test]
    fn malformed_records_report_line_numbers() {
        let text = "# header\n0, 0, 0, 100, 1*2\n1, 0, abc, 0, 1*2\n";
        match parse_stream(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        for bad in [
            "0, 0, 0",
            "0, 0, 0, 101",
            "0, 0, 0, 0, x*1",
            "0, 0, 0, 0, 1*-2",
            "nan, 0, 0, 0",
        ] {
            assert!(parse_record(bad, 1).is_err(), "{bad}");
        }
        assert!(matches!(
            parse_stream("2,0,0,0\n1,0,0,0\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn line_round_trip() {
        let r = parse_record("1.5, 10, 20.25, 30, 1*2;3*4", 1).unwrap();
        assert_eq!(parse_record(&r.to_line(), 1).unwrap(), r);
    }

    #[test]
    fn empty_stream_replays_to_nothing() {
        let recs = parse_stream("".as_bytes()).unwrap();
        let mut e = DcaEngine::new(DcaConfig::default(), 30.0, 1).unwrap();
        assert!(replay(&mut e, &recs).unwrap().is_empty());
    }

    #[test]
    fn presentation_rows() {
        let log = vec![
            TimedPresentation {
                t: 1.0,
                antigen: AntigenType(4),
                context: Context::Mature,
            },
            TimedPresentation {
                t: 2.5,
                antigen: AntigenType(0),
                context: Context::SemiMature,
            },
        ];
        let mut buf = Vec::new();
        write_presentations(&mut buf, &log).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,antigen_id,context\n1,4,1\n2.5,0,0\n"
        );
    }
}
