use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cell::{maturation_context, AntigenType, DendriticCell, Presentation, ThresholdSampler};
use super::signals::{SignalVector, WeightMatrix};
use crate::error::{Error, Result};

/// When an immature cell folds the tissue signals into its totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccumulationPolicy {
    /// Every cell accumulates every cycle.
    #[default]
    EveryCycle,
    /// A cell accumulates only in cycles where it sampled at least one antigen.
    OnAntigenOnly,
}

/// The shared environment cells sample from: a FIFO antigen queue and the
/// signals for the current cycle.
#[derive(Debug, Clone, Default)]
pub struct TissueBuffer {
    antigen_queue: VecDeque<AntigenType>,
    current_signals: SignalVector,
}

impl TissueBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_antigen(&mut self, antigen: AntigenType, copies: usize) {
        self.antigen_queue
            .extend(std::iter::repeat_n(antigen, copies));
    }

    pub fn extend_antigen(&mut self, antigen: impl IntoIterator<Item = AntigenType>) {
        self.antigen_queue.extend(antigen);
    }

    pub fn set_signals(&mut self, s: SignalVector) -> Result<()> {
        s.validate()?;
        self.current_signals = s;
        Ok(())
    }

    pub fn signals(&self) -> SignalVector {
        self.current_signals
    }

    pub fn queued(&self) -> usize {
        self.antigen_queue.len()
    }

    /// Removes up to `n` antigen from the front of the queue.
    fn take(&mut self, n: usize, into: &mut Vec<AntigenType>) -> usize {
        let k = n.min(self.antigen_queue.len());
        into.extend(self.antigen_queue.drain(..k));
        k
    }
}

/// A fixed-size set of dendritic cells with their own seeded generator for
/// thresholds and per-cycle iteration order.
#[derive(Debug, Clone)]
pub struct Population {
    cells: Vec<DendriticCell>,
    sampler: ThresholdSampler,
    order: Vec<usize>,
    rng: ChaCha8Rng,
}

impl Population {
    /// `n` cells with thresholds drawn uniformly within `spread_fraction`
    /// of `median`.
    pub fn new(n: usize, median: f64, spread_fraction: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("population size must be >= 1".into()));
        }
        let sampler = ThresholdSampler::new(median, spread_fraction)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = (0..n)
            .map(|id| DendriticCell::new(id, sampler.sample(&mut rng)))
            .collect();
        Ok(Self {
            cells,
            sampler,
            order: (0..n).collect(),
            rng,
        })
    }

    /// Population with explicit initial thresholds; resets still redraw
    /// from `sampler`.
    pub fn with_thresholds(
        thresholds: &[f64],
        sampler: ThresholdSampler,
        seed: u64,
    ) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidConfig("population size must be >= 1".into()));
        }
        if let Some(&t) = thresholds.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::OutOfRange {
                name: "migration_threshold",
                value: t,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        Ok(Self {
            cells: thresholds
                .iter()
                .enumerate()
                .map(|(id, &t)| DendriticCell::new(id, t))
                .collect(),
            sampler,
            order: (0..thresholds.len()).collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn cells(&self) -> &[DendriticCell] {
        &self.cells
    }

    pub fn sampler(&self) -> &ThresholdSampler {
        &self.sampler
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Antigen currently held by cells that have not migrated yet.
    pub fn held(&self) -> usize {
        self.cells.iter().map(|c| c.antigen_store.len()).sum()
    }

    /// One update of the whole population against `tissue`.
    ///
    /// Cells are visited in a fresh seeded permutation. Each samples up to
    /// `max_antigen_per_cell` antigen, accumulates the fused tissue signals
    /// (subject to `policy`), and migrates if its CSM total exceeds its
    /// threshold. Migrated cells present everything they hold and are reset
    /// with a newly drawn threshold.
    pub fn cycle(
        &mut self,
        tissue: &mut TissueBuffer,
        weights: &WeightMatrix,
        max_antigen_per_cell: usize,
        policy: AccumulationPolicy,
    ) -> Vec<Presentation> {
        let outputs = weights.fuse(&tissue.current_signals);
        self.order.shuffle(&mut self.rng);

        let mut presented = Vec::new();
        for &idx in &self.order {
            let cell = &mut self.cells[idx];
            let sampled = tissue.take(max_antigen_per_cell, &mut cell.antigen_store);
            if policy == AccumulationPolicy::EveryCycle || sampled > 0 {
                cell.accumulate(&outputs);
            }
            if cell.should_migrate() {
                let context = maturation_context(cell);
                presented.extend(
                    cell.antigen_store
                        .iter()
                        .map(|&antigen| Presentation { antigen, context }),
                );
                let threshold = self.sampler.sample(&mut self.rng);
                cell.reset(threshold);
            }
        }
        presented
    }
}

/// Engine parameters apart from the migration median.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DcaConfig {
    pub population_size: usize,
    pub spread_fraction: f64,
    pub max_antigen_per_cell: usize,
    pub accumulation: AccumulationPolicy,
    pub weights: WeightMatrix,
}

impl Default for DcaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            spread_fraction: 0.5,
            max_antigen_per_cell: 1,
            accumulation: AccumulationPolicy::EveryCycle,
            weights: WeightMatrix::default(),
        }
    }
}

/// Tissue plus population plus running totals for the antigen ledger.
#[derive(Debug, Clone)]
pub struct DcaEngine {
    config: DcaConfig,
    tissue: TissueBuffer,
    population: Population,
    emitted: u64,
    presented: u64,
}

impl DcaEngine {
    pub fn new(config: DcaConfig, median: f64, seed: u64) -> Result<Self> {
        let population =
            Population::new(config.population_size, median, config.spread_fraction, seed)?;
        Ok(Self {
            config,
            tissue: TissueBuffer::new(),
            population,
            emitted: 0,
            presented: 0,
        })
    }

    pub fn config(&self) -> &DcaConfig {
        &self.config
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn tissue(&self) -> &TissueBuffer {
        &self.tissue
    }

    pub fn add_antigen(&mut self, antigen: AntigenType, copies: usize) {
        self.tissue.push_antigen(antigen, copies);
        self.emitted += copies as u64;
    }

    pub fn set_signals(&mut self, s: SignalVector) -> Result<()> {
        self.tissue.set_signals(s)
    }

    pub fn cycle(&mut self) -> Vec<Presentation> {
        let out = self.population.cycle(
            &mut self.tissue,
            &self.config.weights,
            self.config.max_antigen_per_cell,
            self.config.accumulation,
        );
        self.presented += out.len() as u64;
        out
    }

    pub fn ledger(&self) -> AntigenLedger {
        AntigenLedger {
            emitted: self.emitted,
            queued: self.tissue.queued() as u64,
            held: self.population.held() as u64,
            presented: self.presented,
        }
    }
}

/// Where every emitted antigen currently is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AntigenLedger {
    pub emitted: u64,
    pub queued: u64,
    pub held: u64,
    pub presented: u64,
}

impl AntigenLedger {
    pub fn is_conserved(&self) -> bool {
        self.emitted == self.queued + self.held + self.presented
    }
}

#[cfg(test)]
mod tests {
    use super::super::cell::Context;
    use super::*;
    use proptest::prelude::*;

    fn sampler(m: f64) -> ThresholdSampler {
        ThresholdSampler::new(m, 0.5).unwrap()
    }

    #[test]
    fn thresholds_within_half_spread() {
        let p = Population::new(100, 30.0, 0.5, 7).unwrap();
        assert_eq!(p.len(), 100);
        for c in p.cells() {
            assert!((15.0..=45.0).contains(&c.migration_threshold));
            assert_eq!((c.cum_csm, c.cum_semi, c.cum_mat), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn zero_spread_gives_exact_median() {
        let p = Population::new(50, 17.5, 0.0, 3).unwrap();
        assert!(p.cells().iter().all(|c| c.migration_threshold == 17.5));
    }

    #[test]
    fn threshold_mean_converges() {
        let p = Population::new(10_000, 60.0, 0.5, 2024).unwrap();
        let mean = p.cells().iter().map(|c| c.migration_threshold).sum::<f64>() / 10_000.0;
        assert!((mean - 60.0).abs() < 0.6, "mean {mean}");
    }

    #[test]
    fn population_rejects_bad_input() {
        assert!(Population::new(0, 30.0, 0.5, 1).is_err());
        assert!(Population::new(10, 0.0, 0.5, 1).is_err());
        assert!(Population::new(10, -5.0, 0.5, 1).is_err());
        assert!(Population::with_thresholds(&[], sampler(10.0), 1).is_err());
        assert!(Population::with_thresholds(&[0.0], sampler(10.0), 1).is_err());
    }

    #[test]
    fn empty_queue_zero_signal_is_inert() {
        let mut p = Population::new(10, 30.0, 0.5, 1).unwrap();
        let before = p.cells().to_vec();
        let mut tissue = TissueBuffer::new();
        for _ in 0..5 {
            let out = p.cycle(
                &mut tissue,
                &WeightMatrix::default(),
                1,
                AccumulationPolicy::EveryCycle,
            );
            assert!(out.is_empty());
        }
        let mut after = p.cells().to_vec();
        after.sort_by_key(|c| c.id);
        assert_eq!(before, after);
    }

    #[test]
    fn hand_stepped_migration_on_second_cycle() {
        // csm row (1,1,1) with safe = 6 gives 6 per cycle: 6 then 12 > 10
        let w = WeightMatrix::new([[1.0, 1.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, -1.0]]).unwrap();
        let mut p = Population::with_thresholds(&[10.0], sampler(10.0), 9).unwrap();
        let mut tissue = TissueBuffer::new();
        tissue
            .set_signals(SignalVector::new(0.0, 0.0, 6.0).unwrap())
            .unwrap();
        tissue.push_antigen(AntigenType(5), 2);

        let first = p.cycle(&mut tissue, &w, 1, AccumulationPolicy::EveryCycle);
        assert!(first.is_empty());
        assert_eq!(p.cells()[0].cum_csm, 6.0);

        let second = p.cycle(&mut tissue, &w, 1, AccumulationPolicy::EveryCycle);
        assert_eq!(
            second,
            vec![
                Presentation {
                    antigen: AntigenType(5),
                    context: Context::SemiMature
                };
                2
            ]
        );
        assert_eq!(p.cells()[0].cum_csm, 0.0);
        assert!(p.cells()[0].antigen_store.is_empty());
    }

    #[test]
    fn cell_gets_threshold_redrawn_on_reset() {
        let w = WeightMatrix::default();
        let mut p = Population::with_thresholds(&[1.0], sampler(100.0), 4).unwrap();
        let mut tissue = TissueBuffer::new();
        tissue
            .set_signals(SignalVector::new(0.0, 0.0, 50.0).unwrap())
            .unwrap();
        p.cycle(&mut tissue, &w, 1, AccumulationPolicy::EveryCycle);
        let t = p.cells()[0].migration_threshold;
        assert!((50.0..=150.0).contains(&t));
    }

    #[test]
    fn on_antigen_only_freezes_cells_without_antigen() {
        let w = WeightMatrix::default();
        let mut p = Population::new(3, 1000.0, 0.5, 4).unwrap();
        let mut tissue = TissueBuffer::new();
        tissue
            .set_signals(SignalVector::new(10.0, 10.0, 10.0).unwrap())
            .unwrap();
        tissue.push_antigen(AntigenType(1), 1);
        p.cycle(&mut tissue, &w, 1, AccumulationPolicy::OnAntigenOnly);
        let with_signal: Vec<_> = p.cells().iter().filter(|c| c.cum_csm > 0.0).collect();
        assert_eq!(with_signal.len(), 1);
        assert_eq!(with_signal[0].antigen_store, vec![AntigenType(1)]);
    }

    #[test]
    fn sampled_antigen_leaves_the_queue() {
        let mut p = Population::new(4, 1e6, 0.5, 1).unwrap();
        let mut tissue = TissueBuffer::new();
        tissue.push_antigen(AntigenType(9), 10);
        p.cycle(
            &mut tissue,
            &WeightMatrix::default(),
            2,
            AccumulationPolicy::EveryCycle,
        );
        assert_eq!(tissue.queued(), 2);
        assert_eq!(p.held(), 8);
    }

    /// Drives a single cell with a fixed signal until it migrates and
    /// returns the contexts of everything it presented.
    fn contexts_under(s: SignalVector, threshold: f64) -> Vec<Context> {
        let mut p = Population::with_thresholds(&[threshold], sampler(threshold), 11).unwrap();
        let mut tissue = TissueBuffer::new();
        tissue.set_signals(s).unwrap();
        for _ in 0..10_000 {
            tissue.push_antigen(AntigenType(0), 1);
            let out = p.cycle(
                &mut tissue,
                &WeightMatrix::default(),
                1,
                AccumulationPolicy::EveryCycle,
            );
            if !out.is_empty() {
                return out.into_iter().map(|pr| pr.context).collect();
            }
        }
        panic!("cell never migrated");
    }

    #[test]
    fn safe_only_cell_presents_semi_mature() {
        let ctx = contexts_under(SignalVector::new(0.0, 0.0, 30.0).unwrap(), 500.0);
        assert!(!ctx.is_empty());
        assert!(ctx.iter().all(|&c| c == Context::SemiMature));
    }

    proptest! {
        #[test]
        fn safe_only_always_semi(safe in 0.01..100.0f64, threshold in 1.0..400.0f64) {
            let ctx = contexts_under(SignalVector { pamp: 0.0, danger: 0.0, safe }, threshold);
            prop_assert!(ctx.iter().all(|&c| c == Context::SemiMature));
        }

        #[test]
        fn pamp_danger_only_always_mature(
            pamp in 0.0..100.0f64, danger in 0.0..100.0f64, threshold in 1.0..400.0f64,
        ) {
            prop_assume!(pamp + danger > 0.01);
            let ctx = contexts_under(SignalVector { pamp, danger, safe: 0.0 }, threshold);
            prop_assert!(ctx.iter().all(|&c| c == Context::Mature));
        }

        #[test]
        fn cum_csm_is_monotone_between_resets(
            signals in proptest::collection::vec((0.0..100.0f64, 0.0..100.0f64, 0.0..100.0f64), 1..40),
        ) {
            let mut p = Population::new(8, 1e9, 0.5, 5).unwrap();
            let mut tissue = TissueBuffer::new();
            let mut last: Vec<f64> = vec![0.0; 8];
            for (a, b, c) in signals {
                tissue.set_signals(SignalVector { pamp: a, danger: b, safe: c }).unwrap();
                p.cycle(&mut tissue, &WeightMatrix::default(), 1, AccumulationPolicy::EveryCycle);
                for cell in p.cells() {
                    prop_assert!(cell.cum_csm >= last[cell.id]);
                    last[cell.id] = cell.cum_csm;
                }
            }
        }

        #[test]
        fn lower_threshold_never_migrates_later(
            signals in proptest::collection::vec((0.0..100.0f64, 0.0..100.0f64, 0.0..100.0f64), 1..60),
            high in 1.0..2000.0f64, frac in 0.0..1.0f64,
        ) {
            let low = (high * frac).max(1e-3);
            let first_migration = |threshold: f64| -> Option<usize> {
                let mut p = Population::with_thresholds(&[threshold], sampler(threshold), 3).unwrap();
                let mut tissue = TissueBuffer::new();
                for (i, &(a, b, c)) in signals.iter().enumerate() {
                    tissue.set_signals(SignalVector { pamp: a, danger: b, safe: c }).unwrap();
                    tissue.push_antigen(AntigenType(0), 1);
                    if !p.cycle(&mut tissue, &WeightMatrix::default(), 1, AccumulationPolicy::EveryCycle).is_empty() {
                        return Some(i);
                    }
                }
                None
            };
            match (first_migration(low), first_migration(high)) {
                (Some(l), Some(h)) => prop_assert!(l <= h),
                (None, Some(_)) => prop_assert!(false, "lower threshold never migrated"),
                _ => {}
            }
        }

        #[test]
        fn antigen_is_conserved(
            steps in proptest::collection::vec((0usize..30, 0.0..100.0f64, 0.0..100.0f64, 0.0..100.0f64), 1..80),
            median in 1.0..300.0f64, per_cell in 1usize..4,
        ) {
            let config = DcaConfig { population_size: 20, max_antigen_per_cell: per_cell, ..DcaConfig::default() };
            let mut e = DcaEngine::new(config, median, 77).unwrap();
            for (i, (copies, a, b, c)) in steps.into_iter().enumerate() {
                e.add_antigen(AntigenType((i % 7) as u32), copies);
                e.set_signals(SignalVector { pamp: a, danger: b, safe: c }).unwrap();
                e.cycle();
                prop_assert!(e.ledger().is_conserved(), "{:?}", e.ledger());
            }
        }
    }

    #[test]
    fn engine_is_deterministic() {
        let run = || {
            let mut e = DcaEngine::new(DcaConfig::default(), 30.0, 123).unwrap();
            let mut log = Vec::new();
            for i in 0..200u32 {
                e.add_antigen(AntigenType(i % 11), (i % 5) as usize);
                let s = SignalVector::new(
                    (i * 7 % 101) as f64,
                    (i * 3 % 101) as f64,
                    (i * 13 % 101) as f64,
                )
                .unwrap();
                e.set_signals(s).unwrap();
                log.extend(e.cycle());
            }
            log
        };
        assert_eq!(run(), run());
    }
}
