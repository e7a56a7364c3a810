//! Drive the DCA engine by hand: feed antigen and signals, watch cells
//! migrate, and check the antigen ledger.
//!
//! cargo run --example engine_basics

use robodca::dca::{
    classify, compute_mcav, AntigenType, Context, DcaConfig, DcaEngine, SignalVector, WeightMatrix,
};

fn main() -> robodca::Result<()> {
    let config = DcaConfig {
        population_size: 20,
        weights: WeightMatrix::default(),
        ..DcaConfig::default()
    };
    let mut engine = DcaEngine::new(config, 30.0, 7)?;

    let calm = SignalVector::new(0.0, 10.0, 60.0)?;
    let alarm = SignalVector::new(80.0, 60.0, 5.0)?;
    let mut presented = Vec::new();
    for cycle in 0..40 {
        // antigen 1 shows up in calm cycles, antigen 2 in alarming ones
        let (id, signals) = if (cycle / 5) % 2 == 0 {
            (1, calm)
        } else {
            (2, alarm)
        };
        engine.add_antigen(AntigenType(id), 5);
        engine.set_signals(signals)?;
        let out = engine.cycle();
        let mature = out.iter().filter(|p| p.context == Context::Mature).count();
        if cycle % 5 == 4 {
            println!(
                "cycle {cycle:2}: antigen {id}, {} presented this cycle, {mature} mature",
                out.len()
            );
        }
        presented.extend(out);
        assert!(engine.ledger().is_conserved());
    }

    let table = compute_mcav(&presented);
    for (id, label) in classify(&table, 0.6)? {
        println!(
            "antigen {id}: mcav {:.2} -> {label:?}",
            table.mcav(id).unwrap()
        );
    }
    let l = engine.ledger();
    println!(
        "ledger: emitted {} = queued {} + held {} + presented {}",
        l.emitted, l.queued, l.held, l.presented
    );
    Ok(())
}
