//! Writes a synthetic cohort and predictors to a directory.

use std::path::PathBuf;

use sepvote::data::io::{write_patient_dir, write_prediction_dir};
use sepvote::synth::{generate_cohort, generate_predictors, AlgorithmModel, SynthConfig};

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sepvote-synth"));
    let config = SynthConfig {
        patients: 40,
        prevalence: 0.3,
        seed: 7,
        ..SynthConfig::default()
    }
    .with_uniform_algorithms(
        3,
        AlgorithmModel {
            max_lag: 2,
            ..AlgorithmModel::new(0.1, 0.2, 0.3)
        },
    );
    let cohort = generate_cohort(&config).expect("valid config");
    let bundle = generate_predictors(&cohort, &config).expect("valid config");

    write_patient_dir(&out.join("patients"), &cohort.records).expect("writable directory");
    write_prediction_dir(&out.join("predictions"), &bundle).expect("writable directory");
    println!(
        "{} patients ({} septic), {} predictors -> {}",
        cohort.records.len(),
        cohort.septic_count(),
        bundle.algorithm_count(),
        out.display()
    );
}
