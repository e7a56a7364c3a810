//! Dendritic cell algorithm (DCA) anomaly detection, applied to a wandering
//! robot that labels locations in a test pen as normal or anomalous.
//!
//! The crate is layered bottom-up:
//!
//! - [`dca`]: the engine. Signal fusion, the dendritic cell population,
//!   migration and maturation, MCAV tables and threshold classification. It
//!   knows nothing about robots.
//! - [`transducer`]: turns laser, sonar and camera readings into bounded
//!   PAMP / danger / safe signals through a range lookup table.
//! - [`antigen`]: encodes robot poses as integer antigen types (300 mm grid
//!   square plus 30 degree heading segment) and decides how many copies to
//!   emit from the robot's speed.
//! - [`sim`]: a deterministic 2D pen with cylinders, a differential-drive
//!   robot, a subsumption wander controller, ranged sensors that differ in
//!   which obstacle heights they can see, measurement noise, and noisy dead
//!   reckoning.
//! - [`oracle`]: geometric ground-truth labels for every antigen type and
//!   cumulative false positive / false negative series.
//! - [`experiment`]: configuration, seeded single runs, migration-median
//!   sweeps, synthetic stream replay and CSV output.

pub mod antigen;
pub mod dca;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod pose;
pub mod sim;
pub mod transducer;

pub use error::{Error, Result};
