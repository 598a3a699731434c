//! Time-dependent clinical utility of hourly predictions.
//!
//! Septic records reward positives that arrive in a window around onset and
//! penalize negatives increasingly as onset passes; positives outside that
//! window, and on non-septic records, are false alarms. Cohort scores are
//! normalized so that the all-negative predictor scores 0 and the label
//! vector itself scores 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{CoverageError, Hour, PredictionBundle};
use crate::labeler::LabelTimeline;

/// Name of the shipped parameter preset.
pub const DEFAULT_PRESET: &str = "challenge-2019-default";

/// Shape of the true-positive payoff after the optimal time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TpTail {
    /// Falls linearly from `u_tp_max` at `dt_optimal` to 0 at `dt_late`.
    #[default]
    ReturnToZero,
    /// Stays at `u_tp_max` until `dt_late`.
    Plateau,
}

/// Payoff schedule. Offsets are hours relative to sepsis onset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityParams {
    pub dt_early: f64,
    pub dt_optimal: f64,
    pub dt_late: f64,
    pub u_tp_max: f64,
    pub u_fn_min: f64,
    pub u_fp: f64,
    pub u_tn: f64,
    #[serde(default)]
    pub tp_tail: TpTail,
}

impl Default for UtilityParams {
    fn default() -> Self {
        Self::challenge_2019_default()
    }
}

impl UtilityParams {
    pub fn challenge_2019_default() -> Self {
        UtilityParams {
            dt_early: -12.0,
            dt_optimal: -6.0,
            dt_late: 3.0,
            u_tp_max: 1.0,
            u_fn_min: -2.0,
            u_fp: -0.05,
            u_tn: 0.0,
            tp_tail: TpTail::ReturnToZero,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            DEFAULT_PRESET | "default" => Some(Self::challenge_2019_default()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        let all = [
            self.dt_early,
            self.dt_optimal,
            self.dt_late,
            self.u_tp_max,
            self.u_fn_min,
            self.u_fp,
            self.u_tn,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ScoreError::InvalidParams("all parameters must be finite".into()));
        }
        if !(self.dt_early < self.dt_optimal && self.dt_optimal <= self.dt_late) {
            return Err(ScoreError::InvalidParams(
                "need dt_early < dt_optimal <= dt_late".into(),
            ));
        }
        if !(self.u_fn_min <= 0.0 && 0.0 <= self.u_tp_max) {
            return Err(ScoreError::InvalidParams("need u_fn_min <= 0 <= u_tp_max".into()));
        }
        Ok(())
    }

    /// Multiplies every payoff by `c`, leaving the time offsets alone.
    pub fn scaled(&self, c: f64) -> Self {
        UtilityParams {
            u_tp_max: self.u_tp_max * c,
            u_fn_min: self.u_fn_min * c,
            u_fp: self.u_fp * c,
            u_tn: self.u_tn * c,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("invalid utility parameters: {0}")]
    InvalidParams(String),
    #[error("patient {patient}: {found} predictions for {expected} hours")]
    LengthMismatch {
        patient: String,
        expected: usize,
        found: usize,
    },
    #[error("score is undefined: perfect and all-negative predictors have equal utility ({0})")]
    Degenerate(f64),
    #[error("expected predictions for {expected} patients, got {found}")]
    CohortSize { expected: usize, found: usize },
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

/// Payoff of one hourly prediction.
pub fn hourly_utility(t: Hour, prediction: bool, t_sepsis: Option<Hour>, params: &UtilityParams) -> f64 {
    let Some(onset) = t_sepsis else {
        return if prediction { params.u_fp } else { params.u_tn };
    };
    let rel = (t - onset) as f64;
    let (early, optimal, late) = (params.dt_early, params.dt_optimal, params.dt_late);
    if rel < early {
        return if prediction { params.u_fp } else { 0.0 };
    }
    if rel > late {
        return 0.0;
    }
    if prediction {
        if rel <= optimal {
            params.u_tp_max * (rel - early) / (optimal - early)
        } else {
            match params.tp_tail {
                TpTail::ReturnToZero => params.u_tp_max * (late - rel) / (late - optimal),
                TpTail::Plateau => params.u_tp_max,
            }
        }
    } else {
        params.u_fn_min * (rel - early) / (late - early)
    }
}

/// Per-hour utilities of one prediction stream.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityTrace {
    pub hours: Vec<Hour>,
    pub values: Vec<f64>,
    pub total: f64,
}

impl UtilityTrace {
    pub fn to_psv(&self) -> String {
        let mut out = String::from("hour|u_k\n");
        for (h, u) in self.hours.iter().zip(&self.values) {
            out.push_str(&format!("{h}|{u}\n"));
        }
        out
    }
}

fn check_len(timeline: &LabelTimeline, predictions: &[bool]) -> Result<(), ScoreError> {
    if predictions.len() != timeline.len() {
        return Err(ScoreError::LengthMismatch {
            patient: timeline.patient_id.clone(),
            expected: timeline.len(),
            found: predictions.len(),
        });
    }
    Ok(())
}

pub fn utility_trace(
    timeline: &LabelTimeline,
    predictions: &[bool],
    params: &UtilityParams,
) -> Result<UtilityTrace, ScoreError> {
    check_len(timeline, predictions)?;
    let hours: Vec<Hour> = timeline.hours().collect();
    let values: Vec<f64> = hours
        .iter()
        .zip(predictions)
        .map(|(&h, &x)| hourly_utility(h, x, timeline.t_sepsis, params))
        .collect();
    let total = values.iter().sum();
    Ok(UtilityTrace { hours, values, total })
}

fn patient_total(timeline: &LabelTimeline, predictions: &[bool], params: &UtilityParams) -> f64 {
    timeline
        .hours()
        .zip(predictions)
        .map(|(h, &x)| hourly_utility(h, x, timeline.t_sepsis, params))
        .sum()
}

/// Normalized cohort score with its three raw components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohortScore {
    pub observed: f64,
    pub inaction: f64,
    pub perfect: f64,
    pub normalized: f64,
}

/// Scores many predictors against one labeled cohort; the inaction and
/// perfect baselines are computed once.
#[derive(Debug, Clone)]
pub struct CohortScorer<'a> {
    timelines: &'a [LabelTimeline],
    params: UtilityParams,
    inaction: f64,
    perfect: f64,
}

impl<'a> CohortScorer<'a> {
    pub fn new(timelines: &'a [LabelTimeline], params: &UtilityParams) -> Result<Self, ScoreError> {
        params.validate()?;
        let mut inaction = 0.0;
        let mut perfect = 0.0;
        for t in timelines {
            inaction += patient_total(t, &vec![false; t.len()], params);
            perfect += patient_total(t, &t.labels, params);
        }
        if perfect == inaction {
            return Err(ScoreError::Degenerate(perfect));
        }
        Ok(CohortScorer {
            timelines,
            params: params.clone(),
            inaction,
            perfect,
        })
    }

    pub fn timelines(&self) -> &'a [LabelTimeline] {
        self.timelines
    }

    pub fn params(&self) -> &UtilityParams {
        &self.params
    }

    /// Raw utility of the all-negative predictor.
    pub fn inaction(&self) -> f64 {
        self.inaction
    }

    /// Raw utility of predicting the label vector exactly.
    pub fn perfect(&self) -> f64 {
        self.perfect
    }

    /// Unnormalized utility, summed per patient in cohort order.
    pub fn raw<P: AsRef<[bool]>>(&self, predictions: &[P]) -> Result<f64, ScoreError> {
        if predictions.len() != self.timelines.len() {
            return Err(ScoreError::CohortSize {
                expected: self.timelines.len(),
                found: predictions.len(),
            });
        }
        let mut total = 0.0;
        for (t, p) in self.timelines.iter().zip(predictions) {
            check_len(t, p.as_ref())?;
            total += patient_total(t, p.as_ref(), &self.params);
        }
        Ok(total)
    }

    pub fn score<P: AsRef<[bool]>>(&self, predictions: &[P]) -> Result<CohortScore, ScoreError> {
        let observed = self.raw(predictions)?;
        Ok(CohortScore {
            observed,
            inaction: self.inaction,
            perfect: self.perfect,
            normalized: (observed - self.inaction) / (self.perfect - self.inaction),
        })
    }

    /// Scores one algorithm of a bundle over this cohort.
    pub fn score_algorithm(
        &self,
        bundle: &PredictionBundle,
        algorithm: &str,
    ) -> Result<CohortScore, ScoreError> {
        let patients: Vec<&str> = self.timelines.iter().map(|t| t.patient_id.as_str()).collect();
        bundle.check_coverage(&[algorithm], &patients)?;
        let streams: Vec<&[bool]> = patients
            .iter()
            .map(|p| {
                bundle
                    .get(algorithm, p)
                    .expect("coverage checked")
                    .labels
                    .as_slice()
            })
            .collect();
        self.score(&streams)
    }
}

/// `(observed - inaction) / (perfect - inaction)` over a cohort.
pub fn normalized_score<P: AsRef<[bool]>>(
    predictions: &[P],
    timelines: &[LabelTimeline],
    params: &UtilityParams,
) -> Result<f64, ScoreError> {
    Ok(CohortScorer::new(timelines, params)?
        .score(predictions)?
        .normalized)
}

/// Normalized score of every algorithm in the bundle, best first; ties are
/// broken by algorithm id.
pub fn rank_algorithms(
    bundle: &PredictionBundle,
    timelines: &[LabelTimeline],
    params: &UtilityParams,
) -> Result<Vec<(String, f64)>, ScoreError> {
    let scorer = CohortScorer::new(timelines, params)?;
    let mut ranked = bundle
        .algorithms()
        .map(|alg| Ok((alg.to_string(), scorer.score_algorithm(bundle, alg)?.normalized)))
        .collect::<Result<Vec<_>, ScoreError>>()?;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked)
}
