use std::collections::BTreeMap;

use super::cell::{AntigenType, Context, Presentation};
use crate::error::{check_finite, Error, Result};

/// Default MCAV cut-off: values at or below it are normal.
pub const DEFAULT_MCAV_THRESHOLD: f64 = 0.6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McavEntry {
    pub mature_count: u64,
    pub total_count: u64,
}

impl McavEntry {
    pub fn mcav(&self) -> f64 {
        self.mature_count as f64 / self.total_count as f64
    }
}

/// Per-type presentation counts. Types never presented have no entry, so
/// every stored entry has `total_count >= 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct McavTable {
    entries: BTreeMap<AntigenType, McavEntry>,
}

impl McavTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, p: &Presentation) {
        let e = self.entries.entry(p.antigen).or_default();
        e.total_count += 1;
        if p.context == Context::Mature {
            e.mature_count += 1;
        }
    }

    pub fn get(&self, antigen: AntigenType) -> Option<&McavEntry> {
        self.entries.get(&antigen)
    }

    pub fn mcav(&self, antigen: AntigenType) -> Option<f64> {
        self.get(antigen).map(McavEntry::mcav)
    }

    pub fn iter(&self) -> impl Iterator<Item = (AntigenType, &McavEntry)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<'a> Extend<&'a Presentation> for McavTable {
    fn extend<I: IntoIterator<Item = &'a Presentation>>(&mut self, iter: I) {
        for p in iter {
            self.record(p);
        }
    }
}

pub fn compute_mcav<'a>(presentations: impl IntoIterator<Item = &'a Presentation>) -> McavTable {
    let mut t = McavTable::new();
    t.extend(presentations);
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Normal = 0,
    Anomalous = 1,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

/// `mcav > threshold` is anomalous, anything else normal.
pub fn classify_value(mcav: f64, threshold: f64) -> Label {
    if mcav > threshold {
        Label::Anomalous
    } else {
        Label::Normal
    }
}

pub fn classify(table: &McavTable, threshold: f64) -> Result<BTreeMap<AntigenType, Label>> {
    check_finite("mcav_threshold", threshold)?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::OutOfRange {
            name: "mcav_threshold",
            value: threshold,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(table
        .iter()
        .map(|(id, e)| (id, classify_value(e.mcav(), threshold)))
        .collect())
}
