//! Greedy selection with replacement of a majority-vote ensemble.

use sepvote::ensemble::{greedy_select, GreedyOptions};
use sepvote::synth::{algorithm_id, generate_cohort, generate_predictors, AlgorithmModel, SynthConfig};
use sepvote::utility::UtilityParams;

fn main() {
    let mut config = SynthConfig {
        patients: 150,
        seed: 5,
        ..SynthConfig::default()
    };
    config.algorithms = [
        (0.1, 0.3),
        (0.3, 0.1),
        (0.2, 0.2),
        (0.15, 0.25),
        (0.25, 0.15),
        (0.35, 0.35),
    ]
    .iter()
    .map(|&(fp, fnr)| AlgorithmModel::new(fp, fnr, 0.0))
    .collect();
    let cohort = generate_cohort(&config).expect("valid config");
    let bundle = generate_predictors(&cohort, &config).expect("valid config");
    let ids: Vec<String> = (0..config.algorithms.len()).map(algorithm_id).collect();
    let params = UtilityParams::challenge_2019_default();

    let result = greedy_select(
        &ids,
        &bundle,
        &cohort.timelines,
        &params,
        &GreedyOptions::default(),
    )
    .expect("candidates cover the cohort");
    for (id, s) in &result.individual_scores {
        println!("{id} alone: {s:.4}");
    }
    for (i, step) in result.trajectory.iter().enumerate() {
        println!("step {}: + {} -> {:.4}", i + 1, step.added, step.score);
    }
    println!("members: {:?}", result.members);
}
