//! The dendritic cell algorithm engine.
//!
//! Cells sample antigen from a shared tissue queue, fold the tissue signals
//! into three running totals through a fixed weight matrix, and migrate
//! once the costimulation total passes a per-cell threshold. A migrated
//! cell presents every antigen it holds, tagged mature if the mature total
//! beat the semi-mature one. The mature fraction per antigen type (MCAV)
//! is thresholded to classify.

mod cell;
mod engine;
mod mcav;
mod signals;
pub mod stream;

pub use cell::{
    maturation_context, AntigenType, Context, DendriticCell, Presentation, ThresholdSampler,
};
pub use engine::{
    AccumulationPolicy, AntigenLedger, DcaConfig, DcaEngine, Population, TissueBuffer,
};
pub use mcav::{
    classify, classify_value, compute_mcav, Label, McavEntry, McavTable, DEFAULT_MCAV_THRESHOLD,
};
pub use signals::{fuse_signals, CellOutputs, SignalVector, WeightMatrix, SIGNAL_MAX};
pub use stream::{StreamRecord, TimedPresentation};
