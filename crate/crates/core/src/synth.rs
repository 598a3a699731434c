//! Synthetic cohorts and populations of noisy predictors.
//!
//! Every record is built so that it passes the inclusion rules, and its
//! labels come from running the labeler on the generated events. Predictors
//! see the true label vector through a detection lag and per-hour flips;
//! a per-hour coin shared by all predictors (chosen with probability ρ
//! instead of a private coin) makes their errors coincide.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::data::{
    EventTimeline, Hospital, Hour, HourRow, PatientRecord, PredictionBundle, PredictionStream, Variable,
    MAX_HOURS,
};
use crate::labeler::{self, LabelTimeline, DEFAULT_LEAD_HOURS, MIN_ONSET_HOUR, MIN_RECORD_HOURS};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid synthetic configuration: {0}")]
pub struct SynthError(pub String);

/// Error model of one synthetic predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmModel {
    /// Chance a truly negative hour is predicted positive.
    pub fp_rate: f64,
    /// Chance a truly positive hour is predicted negative.
    pub fn_rate: f64,
    /// Detection lag is uniform on `0..=max_lag` hours.
    pub max_lag: u32,
    /// Weight of the shared noise source, in `[0, 1]`.
    pub rho: f64,
}

impl AlgorithmModel {
    pub fn new(fp_rate: f64, fn_rate: f64, rho: f64) -> Self {
        AlgorithmModel {
            fp_rate,
            fn_rate,
            max_lag: 0,
            rho,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub patients: usize,
    /// Record lengths are uniform on `min_hours..=max_hours`.
    pub min_hours: usize,
    pub max_hours: usize,
    pub prevalence: f64,
    pub seed: u64,
    pub lead: Hour,
    pub hospital: Hospital,
    pub algorithms: Vec<AlgorithmModel>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            patients: 200,
            min_hours: 24,
            max_hours: 72,
            prevalence: 0.3,
            seed: 0,
            lead: DEFAULT_LEAD_HOURS,
            hospital: Hospital::Other("synthetic".to_string()),
            algorithms: Vec::new(),
        }
    }
}

impl SynthConfig {
    /// `k` predictors sharing one error model.
    pub fn with_uniform_algorithms(mut self, k: usize, model: AlgorithmModel) -> Self {
        self.algorithms = vec![model; k];
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |m: String| Err(SynthError(m));
        if self.min_hours < MIN_RECORD_HOURS {
            return fail(format!(
                "min_hours {} is below the {MIN_RECORD_HOURS}-hour inclusion minimum",
                self.min_hours
            ));
        }
        if self.max_hours < self.min_hours || self.max_hours > MAX_HOURS {
            return fail(format!(
                "need min_hours <= max_hours <= {MAX_HOURS}, got {}..{}",
                self.min_hours, self.max_hours
            ));
        }
        if !(0.0..=1.0).contains(&self.prevalence) {
            return fail(format!("prevalence {} outside [0, 1]", self.prevalence));
        }
        if self.lead < 0 {
            return fail("lead must be non-negative".to_string());
        }
        for (i, m) in self.algorithms.iter().enumerate() {
            for (name, v) in [("fp_rate", m.fp_rate), ("fn_rate", m.fn_rate), ("rho", m.rho)] {
                if !(0.0..=1.0).contains(&v) {
                    return fail(format!("algorithm {i}: {name} {v} outside [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

/// Generated records with their labels, in patient id order.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCohort {
    pub records: Vec<PatientRecord>,
    pub timelines: Vec<LabelTimeline>,
}

impl SynthCohort {
    pub fn septic_count(&self) -> usize {
        self.timelines.iter().filter(|t| t.is_septic()).count()
    }
}

pub fn patient_id(index: usize) -> String {
    format!("p{index:05}")
}

pub fn algorithm_id(index: usize) -> String {
    format!("alg_{index:02}")
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent RNG for `(seed, domain, a, b)`.
fn sub_rng(seed: u64, domain: u64, a: u64, b: u64) -> ChaCha8Rng {
    let s = splitmix(splitmix(splitmix(seed ^ splitmix(domain)) ^ a) ^ b.wrapping_mul(0x2545_F491_4F6C_DD1D));
    ChaCha8Rng::seed_from_u64(s)
}

const DOMAIN_COHORT: u64 = 1;
const DOMAIN_SHARED: u64 = 2;
const DOMAIN_PRIVATE: u64 = 3;

/// SOFA observations every 1–6 hours from admission past the record end.
/// Scores stay within one point of `base` until `rise_at` (if any), where
/// they jump by two or three and stay high.
fn sofa_series(rng: &mut ChaCha8Rng, end: Hour, base: i32, rise_at: Option<Hour>) -> Vec<(Hour, i32)> {
    let mut series: Vec<(Hour, i32)> = Vec::new();
    let mut hour: Hour = 0;
    let mut raised: Option<i32> = None;
    while hour <= end {
        if let (Some(at), None) = (rise_at, raised) {
            if hour >= at {
                // anchor a baseline reading just before the rise
                match series.last_mut() {
                    Some(last) if last.0 == at - 1 => last.1 = base,
                    _ => series.push((at - 1, base)),
                }
                let high = base + rng.random_range(2..=3);
                series.push((at, high));
                raised = Some(high);
                hour = at + rng.random_range(1..=6);
                continue;
            }
        }
        let score = match raised {
            Some(high) => high,
            None => base + rng.random_range(0..=1),
        };
        series.push((hour, score));
        hour += rng.random_range(1..=6);
    }
    if let (Some(at), None) = (rise_at, raised) {
        match series.last_mut() {
            Some(last) if last.0 == at - 1 => last.1 = base,
            _ => series.push((at - 1, base)),
        }
        series.push((at, base + 2));
    }
    series
}

/// Suspicion events whose earlier timestamp is `at`.
fn suspicion_events(rng: &mut ChaCha8Rng, at: Hour) -> (Vec<(Hour, Hour)>, Vec<Hour>) {
    let course = labeler::MIN_ANTIBIOTIC_HOURS + rng.random_range(0..=48);
    if rng.random_bool(0.5) {
        let culture = at + rng.random_range(0..=labeler::CULTURE_AFTER_ANTIBIOTIC_HOURS);
        (vec![(at, at + course)], vec![culture])
    } else {
        let start = at + rng.random_range(1..=labeler::ANTIBIOTIC_AFTER_CULTURE_HOURS);
        (vec![(start, start + course)], vec![at])
    }
}

fn septic_events(rng: &mut ChaCha8Rng, len: Hour) -> EventTimeline {
    let onset = rng.random_range(MIN_ONSET_HOUR..=len);
    let offset =
        rng.random_range(-labeler::SOFA_BEFORE_SUSPICION_HOURS..=labeler::SOFA_AFTER_SUSPICION_HOURS);
    let (t_susp, t_sofa) = if offset >= 0 {
        (onset, onset + offset)
    } else {
        (onset - offset, onset)
    };
    let (mut abx, cultures) = suspicion_events(rng, t_susp);
    if rng.random_bool(0.3) {
        // a short course that can never qualify
        let start = rng.random_range(0..=len);
        abx.push((start, start + rng.random_range(6..=48)));
    }
    let base = rng.random_range(0..=4);
    EventTimeline {
        iv_antibiotic_intervals: abx,
        culture_hours: cultures,
        sofa_series: sofa_series(rng, len + 24, base, Some(t_sofa)),
    }
}

fn non_septic_events(rng: &mut ChaCha8Rng, len: Hour) -> EventTimeline {
    let base = rng.random_range(0..=4);
    let mut ev = EventTimeline::default();
    match rng.random_range(0..5) {
        // no events of note
        0 => ev.sofa_series = sofa_series(rng, len + 24, base, None),
        // organ dysfunction without suspected infection
        1 => {
            let at = rng.random_range(1..=len);
            ev.sofa_series = sofa_series(rng, len + 24, base, Some(at));
        }
        // suspected infection without organ dysfunction
        2 => {
            let at = rng.random_range(0..=len);
            let (abx, cultures) = suspicion_events(rng, at);
            ev.iv_antibiotic_intervals = abx;
            ev.culture_hours = cultures;
            ev.sofa_series = sofa_series(rng, len + 24, base, None);
        }
        // culture with a course too short to count
        3 => {
            let at = rng.random_range(0..=len);
            ev.culture_hours = vec![at];
            ev.iv_antibiotic_intervals = vec![(at, at + rng.random_range(6..labeler::MIN_ANTIBIOTIC_HOURS))];
            ev.sofa_series = sofa_series(rng, len + 24, base, None);
        }
        // both, but organ dysfunction far too late
        _ => {
            let at = rng.random_range(0..=len);
            let (abx, cultures) = suspicion_events(rng, at);
            ev.iv_antibiotic_intervals = abx;
            ev.culture_hours = cultures;
            let late = at + labeler::SOFA_AFTER_SUSPICION_HOURS + rng.random_range(1..=36);
            ev.sofa_series = sofa_series(rng, late + 24, base, Some(late));
        }
    }
    ev
}

fn vitals(rng: &mut ChaCha8Rng, len: usize, onset: Option<Hour>, config: &SynthConfig) -> Vec<HourRow> {
    let age = rng.random_range(18.0..90.0f64).round();
    let gender = f64::from(u8::from(rng.random_bool(0.5)));
    let unit = rng.random_range(0..3);
    let adm = -(rng.random_range(0.0..48.0f64) * 100.0).round() / 100.0;
    let hr_base = rng.random_range(65.0..95.0);
    let mut rows = Vec::with_capacity(len);
    for i in 0..len {
        let hour = i as Hour + 1;
        let sick = onset.is_some_and(|t| hour >= t - config.lead);
        let mut row = HourRow::default();
        let mut maybe = |var: Variable, value: f64, rng: &mut ChaCha8Rng| {
            if rng.random_bool(0.9) {
                row.set(var, Some((value * 10.0).round() / 10.0));
            }
        };
        let bump = if sick { 1.0 } else { 0.0 };
        maybe(
            Variable::HR,
            hr_base + 20.0 * bump + rng.random_range(-8.0..8.0),
            rng,
        );
        maybe(
            Variable::O2_SAT,
            97.0 - 3.0 * bump + rng.random_range(-2.0..2.0),
            rng,
        );
        maybe(
            Variable::TEMP,
            36.9 + 1.2 * bump + rng.random_range(-0.4..0.4),
            rng,
        );
        maybe(
            Variable::RESP,
            17.0 + 5.0 * bump + rng.random_range(-3.0..3.0),
            rng,
        );
        maybe(
            Variable::MAP,
            82.0 - 10.0 * bump + rng.random_range(-8.0..8.0),
            rng,
        );
        row.set(Variable::AGE, Some(age));
        row.set(Variable::GENDER, Some(gender));
        if unit < 2 {
            row.set(Variable::UNIT1, Some(f64::from(u8::from(unit == 0))));
            row.set(Variable::UNIT2, Some(f64::from(u8::from(unit == 1))));
        }
        row.set(Variable::HOSP_ADM_TIME, Some(adm));
        row.set(Variable::ICULOS, Some(hour as f64));
        rows.push(row);
    }
    rows
}

fn generate_patient(config: &SynthConfig, index: usize) -> (PatientRecord, LabelTimeline) {
    let mut rng = sub_rng(config.seed, DOMAIN_COHORT, index as u64, 0);
    let len = rng.random_range(config.min_hours..=config.max_hours);
    let septic = rng.random_bool(config.prevalence);
    let events = if septic {
        septic_events(&mut rng, len as Hour)
    } else {
        non_septic_events(&mut rng, len as Hour)
    };
    let onset = labeler::sepsis_onset(labeler::suspicion_time(&events), labeler::sofa_time(&events));
    debug_assert_eq!(onset.is_some(), septic, "generated events disagree with intent");
    let record = PatientRecord {
        patient_id: patient_id(index),
        hospital: config.hospital.clone(),
        first_hour: 1,
        hours: vitals(&mut rng, len, onset, config),
        columns: Variable::all().collect(),
        reference_labels: None,
        events,
    };
    let timeline = labeler::label_record(&record, config.lead);
    (record, timeline)
}

/// Builds `config.patients` records with event sidecars and labels.
pub fn generate_cohort(config: &SynthConfig) -> Result<SynthCohort, SynthError> {
    config.validate()?;
    let (records, timelines): (Vec<_>, Vec<_>) = (0..config.patients)
        .into_par_iter()
        .map(|i| generate_patient(config, i))
        .collect::<Vec<_>>()
        .into_iter()
        .unzip();
    Ok(SynthCohort { records, timelines })
}

fn lag_from(u: f64, max_lag: u32) -> Hour {
    ((u * f64::from(max_lag + 1)).floor() as Hour).min(Hour::from(max_lag))
}

fn patient_streams(config: &SynthConfig, index: usize, timeline: &LabelTimeline) -> Vec<PredictionStream> {
    let n = timeline.len();
    let mut shared = sub_rng(config.seed, DOMAIN_SHARED, index as u64, 0);
    let shared_lag: f64 = shared.random();
    let shared_coins: Vec<f64> = (0..n).map(|_| shared.random()).collect();
    let onset = timeline.labels.iter().position(|x| *x);

    config
        .algorithms
        .iter()
        .enumerate()
        .map(|(a, model)| {
            let mut private = sub_rng(config.seed, DOMAIN_PRIVATE, index as u64, a as u64 + 1);
            let lag_u = if private.random::<f64>() < model.rho {
                shared_lag
            } else {
                private.random()
            };
            let lag = lag_from(lag_u, model.max_lag) as usize;
            let mut labels = Vec::with_capacity(n);
            let mut probabilities = Vec::with_capacity(n);
            for (k, &coin) in shared_coins.iter().enumerate() {
                let use_shared = private.random::<f64>() < model.rho;
                let own: f64 = private.random();
                let u = if use_shared { coin } else { own };
                let truth = onset.is_some_and(|o| k >= o + lag);
                let flipped = if truth {
                    u < model.fn_rate
                } else {
                    u < model.fp_rate
                };
                let x = truth != flipped;
                let p = if x { 0.5 + 0.5 * u } else { 0.5 * u };
                labels.push(x);
                probabilities.push(Some((p * 1000.0).round() / 1000.0));
            }
            PredictionStream {
                algorithm_id: algorithm_id(a),
                patient_id: timeline.patient_id.clone(),
                labels,
                probabilities,
            }
        })
        .collect()
}

/// One stream per (algorithm, patient) following each algorithm's error model.
pub fn generate_predictors(
    cohort: &SynthCohort,
    config: &SynthConfig,
) -> Result<PredictionBundle, SynthError> {
    config.validate()?;
    let per_patient: Vec<Vec<PredictionStream>> = cohort
        .timelines
        .par_iter()
        .enumerate()
        .map(|(i, t)| patient_streams(config, i, t))
        .collect();
    let mut bundle = PredictionBundle::new();
    for s in per_patient.into_iter().flatten() {
        bundle.insert(s);
    }
    Ok(bundle)
}
