use robodca::experiment::{output, run_single, ExperimentConfig};

fn short() -> ExperimentConfig {
    ExperimentConfig {
        duration_s: 60.0,
        medians: vec![30.0],
        runs_per_median: 1,
        ..ExperimentConfig::default()
    }
}

#[test]
fn written_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = short();
    cfg.pen.noise_sigma = 0.08;
    cfg.dca.population_size = 60;
    let path = dir.path().join("config.toml");
    output::write_config(&path, &cfg).unwrap();
    let back = ExperimentConfig::load(&path).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(
        run_single(&cfg, 30.0, 0).unwrap(),
        run_single(&back, 30.0, 0).unwrap()
    );
}

#[test]
fn shipped_config_matches_builtin_defaults() {
    let path =
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/experiment.toml");
    let mut shipped = ExperimentConfig::load(&path).unwrap();
    let defaults = ExperimentConfig::default();
    shipped.out_dir = defaults.out_dir.clone();
    assert_eq!(shipped, defaults);
}

#[test]
fn seed_changes_the_run() {
    let a = short();
    let b = ExperimentConfig {
        base_seed: a.base_seed + 1,
        ..a.clone()
    };
    let ra = run_single(&a, 30.0, 0).unwrap();
    let rb = run_single(&b, 30.0, 0).unwrap();
    assert_ne!(ra.trajectory, rb.trajectory);
    assert_eq!(run_single(&a, 30.0, 0).unwrap(), ra);
}
