//! Unweighted and utility-weighted similarity matrices, ordered by score.

use sepvote::diversity::{unweighted_matrix, weighted_matrix, Ranking};
use sepvote::synth::{generate_cohort, generate_predictors, AlgorithmModel, SynthConfig};
use sepvote::utility::{rank_algorithms, UtilityParams};

fn main() {
    let config = SynthConfig {
        patients: 60,
        seed: 3,
        ..SynthConfig::default()
    }
    .with_uniform_algorithms(4, AlgorithmModel::new(0.2, 0.2, 0.5));
    let cohort = generate_cohort(&config).expect("valid config");
    let bundle = generate_predictors(&cohort, &config).expect("valid config");
    let params = UtilityParams::challenge_2019_default();

    let scores = rank_algorithms(&bundle, &cohort.timelines, &params).expect("complete bundle");
    let ranking = Ranking::by_scores("normalized utility, descending", scores);

    let plain = unweighted_matrix(&bundle, &ranking).expect("complete bundle");
    print!("{}\n{}", plain.to_csv(), plain.metadata());
    let weighted = weighted_matrix(&bundle, &cohort.timelines, &params, &ranking).expect("complete bundle");
    print!("\n{}\n{}", weighted.to_csv(), weighted.metadata());
    println!(
        "\nmean off-diagonal: {:.4} / {:.4}",
        plain.mean_off_diagonal().unwrap(),
        weighted.mean_off_diagonal().unwrap()
    );
}
