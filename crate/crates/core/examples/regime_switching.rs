//! Chooses the vote rule from predictor concordance on a target cohort.

use std::collections::BTreeMap;

use sepvote::ensemble::{
    apply_ensemble, select_regime, EnsembleSpec, Regime, RegimeSelector, DEFAULT_REGIME_TAU,
};
use sepvote::synth::{algorithm_id, generate_cohort, generate_predictors, AlgorithmModel, SynthConfig};
use sepvote::utility::{CohortScorer, UtilityParams};

fn main() {
    let params = UtilityParams::challenge_2019_default();
    let members: BTreeMap<String, u32> = (0..5).map(|i| (algorithm_id(i), 1)).collect();
    let spec = EnsembleSpec::new(members);
    let ids: Vec<String> = spec.all_member_ids();

    for rho in [0.0, 0.6, 0.95] {
        let config = SynthConfig {
            patients: 80,
            seed: 6,
            ..SynthConfig::default()
        }
        .with_uniform_algorithms(5, AlgorithmModel::new(0.2, 0.2, rho));
        let cohort = generate_cohort(&config).expect("valid config");
        let bundle = generate_predictors(&cohort, &config).expect("valid config");

        let decision = select_regime(
            &bundle,
            &ids,
            RegimeSelector::Auto {
                tau: DEFAULT_REGIME_TAU,
            },
        )
        .expect("two or more members");
        let scorer = CohortScorer::new(&cohort.timelines, &params).expect("septic patients present");
        let mut line = format!("rho {rho}: {decision:?}");
        for regime in [Regime::Familiar, Regime::Unfamiliar] {
            let voted = apply_ensemble(&spec, &bundle, regime).expect("complete bundle");
            let streams: Vec<&[bool]> = cohort
                .timelines
                .iter()
                .map(|t| voted[&t.patient_id].labels.as_slice())
                .collect();
            line += &format!(
                ", {regime:?} {:.4}",
                scorer.score(&streams).expect("same shape").normalized
            );
        }
        println!("{line}");
    }
}
