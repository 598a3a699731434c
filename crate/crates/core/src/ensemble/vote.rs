use std::collections::{BTreeMap, HashMap};

use super::{EnsembleError, EnsembleSpec, Members, Regime, VoteRule};
use crate::data::{CoverageError, PredictionBundle, PredictionStream};

/// Algorithm id given to voted streams.
pub const ENSEMBLE_ID: &str = "consensus";

/// Applies `rule` to `(weight, prediction)` pairs, one per distinct member.
/// Returns the decision and the weighted positive share.
pub fn vote_weighted(rule: VoteRule, votes: impl IntoIterator<Item = (u32, bool)>) -> (bool, f64) {
    let mut positive = 0u64;
    let mut total = 0u64;
    let mut negative_members = 0usize;
    for (weight, x) in votes {
        total += u64::from(weight);
        if x {
            positive += u64::from(weight);
        } else {
            negative_members += 1;
        }
    }
    let share = if total == 0 {
        0.0
    } else {
        positive as f64 / total as f64
    };
    let decision = match rule {
        VoteRule::ThresholdFraction(theta) => positive as f64 >= theta * total as f64,
        VoteRule::AllButOne => negative_members <= 1,
    };
    (decision, share)
}

/// Hourly decision of the ensemble from one prediction per member.
pub fn vote(
    predictions: &HashMap<String, bool>,
    spec: &EnsembleSpec,
    regime: Regime,
) -> Result<bool, EnsembleError> {
    let members = spec.members_for(regime);
    let votes = members
        .iter()
        .map(|(id, &w)| {
            predictions
                .get(id)
                .map(|&x| (w, x))
                .ok_or_else(|| EnsembleError::MissingPrediction(id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(vote_weighted(spec.rule_for(regime), votes).0)
}

fn member_streams<'a>(
    members: &Members,
    bundle: &'a PredictionBundle,
    patient: &str,
) -> Result<Vec<(u32, &'a PredictionStream)>, EnsembleError> {
    let mut out = Vec::with_capacity(members.len());
    let mut len: Option<usize> = None;
    for (id, &w) in members {
        let stream = bundle
            .get(id, patient)
            .ok_or_else(|| CoverageError::Missing(vec![(id.clone(), patient.to_string())]))?;
        match len {
            None => len = Some(stream.len()),
            Some(l) if l != stream.len() => {
                return Err(CoverageError::LengthMismatch {
                    algorithm: id.clone(),
                    patient: patient.to_string(),
                    expected: l,
                    found: stream.len(),
                }
                .into())
            }
            _ => {}
        }
        out.push((w, stream));
    }
    Ok(out)
}

/// Votes every hour of every patient in the bundle. The probability channel
/// carries the weighted share of members predicting positive.
pub fn apply_ensemble(
    spec: &EnsembleSpec,
    bundle: &PredictionBundle,
    regime: Regime,
) -> Result<BTreeMap<String, PredictionStream>, EnsembleError> {
    spec.validate()?;
    let members = spec.members_for(regime);
    let rule = spec.rule_for(regime);
    let ids: Vec<&String> = members.keys().collect();
    let patients = bundle.patients();
    bundle.check_coverage(&ids, &patients)?;

    let mut out = BTreeMap::new();
    for pid in patients {
        let streams = member_streams(members, bundle, pid)?;
        let len = streams[0].1.len();
        let mut labels = Vec::with_capacity(len);
        let mut probabilities = Vec::with_capacity(len);
        for k in 0..len {
            let (decision, share) = vote_weighted(rule, streams.iter().map(|(w, s)| (*w, s.labels[k])));
            labels.push(decision);
            probabilities.push(Some(share));
        }
        out.insert(
            pid.to_string(),
            PredictionStream {
                algorithm_id: ENSEMBLE_ID.to_string(),
                patient_id: pid.to_string(),
                labels,
                probabilities,
            },
        );
    }
    Ok(out)
}
