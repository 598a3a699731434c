//! Fleiss' kappa for a small table and per-patient agreement of predictors.

use sepvote::diversity::{fleiss_kappa, kappa_distribution};
use sepvote::synth::{algorithm_id, generate_cohort, generate_predictors, AlgorithmModel, SynthConfig};

fn main() {
    let raters = [
        [true, true, false, false],
        [true, false, false, false],
        [true, true, true, false],
    ];
    let k = fleiss_kappa(&raters).expect("two or more raters");
    println!("3 raters x 4 windows: kappa = {:.4}", k.value);

    for rho in [0.0, 0.5, 0.9] {
        let config = SynthConfig {
            patients: 50,
            seed: 4,
            ..SynthConfig::default()
        }
        .with_uniform_algorithms(5, AlgorithmModel::new(0.2, 0.2, rho));
        let cohort = generate_cohort(&config).expect("valid config");
        let bundle = generate_predictors(&cohort, &config).expect("valid config");
        let top: Vec<String> = (0..5).map(algorithm_id).collect();
        let dist = kappa_distribution(&bundle, &top, 10).expect("complete bundle");
        let mean = dist.per_patient.iter().map(|(_, k)| k.value).sum::<f64>() / dist.per_patient.len() as f64;
        println!(
            "rho {rho}: mean per-patient kappa {mean:.3}, histogram {:?}",
            dist.histogram.counts
        );
    }
}
