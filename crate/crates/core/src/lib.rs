//! Sepsis-3 labeling, clinical utility scoring, prediction diversity and
//! consensus voting over hourly ICU prediction streams.
//!
//! The pieces build on each other:
//!
//! * [`data`] reads pipe-separated patient records, event sidecars and
//!   per-algorithm prediction files.
//! * [`labeler`] derives onset times and hourly labels from clinical events.
//! * [`utility`] scores predictions against those labels.
//! * [`diversity`] and [`codesim`] measure how alike algorithms behave and
//!   how alike their source code is.
//! * [`ensemble`] builds and applies weighted voting ensembles.
//! * [`synth`] produces cohorts and correlated predictors for experiments.

pub mod cli;
pub mod codesim;
pub mod data;
pub mod diversity;
pub mod ensemble;
pub mod labeler;
pub mod synth;
pub mod utility;
