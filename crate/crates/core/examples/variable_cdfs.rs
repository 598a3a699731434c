//! Empirical CDFs of vital signs, compared across two synthetic sites.

use sepvote::data::{empirical_cdf, Hospital, Variable};
use sepvote::synth::{generate_cohort, SynthConfig};

fn quantile(cdf: &[(f64, f64)], q: f64) -> f64 {
    cdf.iter().find(|(_, f)| *f >= q).map_or(f64::NAN, |(v, _)| *v)
}

fn main() {
    let sites = [("A", 8, 0.2), ("B", 9, 0.5)];
    for variable in [Variable::HR, Variable::TEMP, Variable::MAP] {
        for (name, seed, prevalence) in sites {
            let config = SynthConfig {
                patients: 100,
                prevalence,
                seed,
                hospital: Hospital::Other(name.into()),
                ..SynthConfig::default()
            };
            let cohort = generate_cohort(&config).expect("valid config");
            let cdf = empirical_cdf(&cohort.records, variable);
            println!(
                "{variable} site {name}: {} distinct values, median {:.1}, 90th percentile {:.1}",
                cdf.len(),
                quantile(&cdf, 0.5),
                quantile(&cdf, 0.9)
            );
        }
    }
}
