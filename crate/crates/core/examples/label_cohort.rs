//! Derives onset times and hourly labels for a synthetic cohort.

use sepvote::labeler::{label_record, LabelSummary, DEFAULT_LEAD_HOURS};
use sepvote::synth::{generate_cohort, SynthConfig};

fn main() {
    let config = SynthConfig {
        patients: 25,
        seed: 1,
        ..SynthConfig::default()
    };
    let cohort = generate_cohort(&config).expect("valid config");

    let timelines: Vec<_> = cohort
        .records
        .iter()
        .map(|r| label_record(r, DEFAULT_LEAD_HOURS))
        .collect();
    for t in timelines.iter().filter(|t| t.is_septic()).take(5) {
        let first_positive = t.labels.iter().position(|&x| x).map(|i| t.first_hour + i as i64);
        println!(
            "{}: suspicion {:?}, sofa {:?}, onset {:?}, first positive hour {:?} of {}",
            t.patient_id,
            t.t_suspicion,
            t.t_sofa,
            t.t_sepsis,
            first_positive,
            t.len()
        );
    }
    println!("{:?}", LabelSummary::from_timelines(&timelines));
}
