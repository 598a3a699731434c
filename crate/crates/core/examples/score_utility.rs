//! Normalized utility of a few noisy predictors, and one patient's trace.

use sepvote::synth::{generate_cohort, generate_predictors, AlgorithmModel, SynthConfig};
use sepvote::utility::{rank_algorithms, utility_trace, UtilityParams};

fn main() {
    let mut config = SynthConfig {
        patients: 80,
        seed: 2,
        ..SynthConfig::default()
    };
    config.algorithms = vec![
        AlgorithmModel::new(0.05, 0.05, 0.0),
        AlgorithmModel::new(0.2, 0.2, 0.0),
        AlgorithmModel::new(0.4, 0.1, 0.0),
    ];
    let cohort = generate_cohort(&config).expect("valid config");
    let bundle = generate_predictors(&cohort, &config).expect("valid config");
    let params = UtilityParams::challenge_2019_default();

    for (alg, score) in rank_algorithms(&bundle, &cohort.timelines, &params).expect("complete bundle") {
        println!("{alg}: {score:.4}");
    }

    let septic = cohort
        .timelines
        .iter()
        .find(|t| t.is_septic())
        .expect("some septic patient");
    let stream = bundle.get("alg_01", &septic.patient_id).expect("covered");
    let trace = utility_trace(septic, &stream.labels, &params).expect("same length");
    println!(
        "\n{} (onset {:?}), total {:.3}",
        septic.patient_id, septic.t_sepsis, trace.total
    );
    print!("{}", trace.to_psv());
}
