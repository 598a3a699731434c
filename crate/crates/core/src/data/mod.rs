//! Domain types and the pipe-separated file formats: hourly patient records,
//! event sidecars and per-hour prediction files.

mod cdf;
mod error;
mod events;
pub mod io;
mod patient;
mod prediction;
mod variables;

pub use cdf::empirical_cdf;
pub use error::{CoverageError, FormatError, LoadError};
pub use events::{parse_event_file, write_event_file, EventTimeline};
pub use patient::{
    parse_patient_file, write_patient_file, Hospital, HourRow, ParseOptions, PatientRecord, LABEL_COLUMN,
    MAX_HOURS,
};
pub use prediction::{parse_prediction_file, write_prediction_file, PredictionBundle, PredictionStream};
pub use variables::{Variable, VARIABLE_NAMES, VARIABLE_UNITS};

/// Hours on the ICULOS grid.
pub type Hour = i64;

/// Missing-value sentinel in every file format.
pub const MISSING_TOKEN: &str = "NaN";

/// Finite integer or decimal number; `None` for anything else.
pub(crate) fn parse_number(token: &str) -> Option<f64> {
    let looks_numeric = token
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    if !looks_numeric || token.is_empty() {
        return None;
    }
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}
