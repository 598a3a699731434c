use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{default_rules, EnsembleError, EnsembleSpec, Members, Regime, RegimeSelector, VoteRule};
use crate::data::PredictionBundle;
use crate::labeler::LabelTimeline;
use crate::utility::{hourly_utility, CohortScorer, UtilityParams};

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOptions {
    pub rule: VoteRule,
    /// A step is taken only if it improves the score by more than this.
    pub tolerance: f64,
    pub max_steps: usize,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            rule: VoteRule::MAJORITY,
            tolerance: 1e-9,
            max_steps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyStep {
    pub added: String,
    /// Normalized training score after adding `added`.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyResult {
    pub members: Members,
    pub trajectory: Vec<GreedyStep>,
    /// Normalized training score of each candidate on its own.
    pub individual_scores: BTreeMap<String, f64>,
}

impl GreedyResult {
    pub fn final_score(&self) -> f64 {
        self.trajectory.last().map_or(f64::NEG_INFINITY, |s| s.score)
    }
}

/// Candidate predictions flattened over the cohort, with the payoff of a
/// positive and a negative vote at every hour.
struct Workspace<'a> {
    scorer: CohortScorer<'a>,
    spans: Vec<(usize, usize)>,
    u_pos: Vec<f64>,
    u_neg: Vec<f64>,
    predictions: Vec<Vec<bool>>,
}

impl<'a> Workspace<'a> {
    fn new(
        candidates: &[String],
        bundle: &PredictionBundle,
        timelines: &'a [LabelTimeline],
        params: &UtilityParams,
    ) -> Result<Self, EnsembleError> {
        let scorer = CohortScorer::new(timelines, params)?;
        let patients: Vec<&str> = timelines.iter().map(|t| t.patient_id.as_str()).collect();
        bundle.check_coverage(candidates, &patients)?;

        let mut spans = Vec::with_capacity(timelines.len());
        let mut u_pos = Vec::new();
        let mut u_neg = Vec::new();
        for t in timelines {
            let start = u_pos.len();
            for h in t.hours() {
                u_pos.push(hourly_utility(h, true, t.t_sepsis, params));
                u_neg.push(hourly_utility(h, false, t.t_sepsis, params));
            }
            spans.push((start, u_pos.len()));
        }
        let mut predictions = Vec::with_capacity(candidates.len());
        for c in candidates {
            let mut flat = Vec::with_capacity(u_pos.len());
            for t in timelines {
                let s = bundle.get(c, &t.patient_id).expect("coverage checked");
                if s.len() != t.len() {
                    return Err(crate::data::CoverageError::LengthMismatch {
                        algorithm: c.clone(),
                        patient: t.patient_id.clone(),
                        expected: t.len(),
                        found: s.len(),
                    }
                    .into());
                }
                flat.extend_from_slice(&s.labels);
            }
            predictions.push(flat);
        }
        Ok(Workspace {
            scorer,
            spans,
            u_pos,
            u_neg,
            predictions,
        })
    }

    fn normalized(&self, decide: impl Fn(usize) -> bool) -> f64 {
        let mut raw = 0.0;
        for &(start, end) in &self.spans {
            let patient: f64 = (start..end)
                .map(|k| if decide(k) { self.u_pos[k] } else { self.u_neg[k] })
                .sum();
            raw += patient;
        }
        (raw - self.scorer.inaction()) / (self.scorer.perfect() - self.scorer.inaction())
    }
}

/// Running vote tallies for the current multiset.
struct Tally {
    counts: Vec<u32>,
    total: u32,
    positive: Vec<u32>,
    negative_members: Vec<u32>,
}

impl Tally {
    fn new(candidates: usize, hours: usize) -> Self {
        Tally {
            counts: vec![0; candidates],
            total: 0,
            positive: vec![0; hours],
            negative_members: vec![0; hours],
        }
    }

    fn add(&mut self, c: usize, predictions: &[bool]) {
        let first = self.counts[c] == 0;
        self.counts[c] += 1;
        self.total += 1;
        for (k, &x) in predictions.iter().enumerate() {
            if x {
                self.positive[k] += 1;
            } else if first {
                self.negative_members[k] += 1;
            }
        }
    }

    /// Vote at hour `k` if candidate `c` (with prediction `x`) were added.
    fn decide_with(&self, rule: VoteRule, c: usize, k: usize, x: bool) -> bool {
        match rule {
            VoteRule::ThresholdFraction(theta) => {
                let pos = self.positive[k] + u32::from(x);
                pos as f64 >= theta * (self.total + 1) as f64
            }
            VoteRule::AllButOne => {
                let new_negative = self.counts[c] == 0 && !x;
                self.negative_members[k] + u32::from(new_negative) <= 1
            }
        }
    }
}

/// Greedy forward selection with replacement: each step adds the candidate
/// that most improves the voted ensemble's normalized training score, and
/// selection stops at the first step without a strict improvement. Ties go
/// to the lexicographically smallest id.
pub fn greedy_select<S: AsRef<str>>(
    candidates: &[S],
    bundle: &PredictionBundle,
    timelines: &[LabelTimeline],
    params: &UtilityParams,
    options: &GreedyOptions,
) -> Result<GreedyResult, EnsembleError> {
    options.rule.validate()?;
    let mut ids: Vec<String> = candidates.iter().map(|c| c.as_ref().to_string()).collect();
    ids.sort();
    ids.dedup();
    if ids.is_empty() {
        return Err(EnsembleError::NoCandidates);
    }
    let ws = Workspace::new(&ids, bundle, timelines, params)?;

    let individual_scores: BTreeMap<String, f64> = ids
        .iter()
        .zip(&ws.predictions)
        .map(|(id, p)| (id.clone(), ws.normalized(|k| p[k])))
        .collect();
    if !individual_scores.values().any(|s| *s > 0.0) {
        return Err(EnsembleError::NoPositiveCandidate);
    }

    let mut tally = Tally::new(ids.len(), ws.u_pos.len());
    let mut trajectory: Vec<GreedyStep> = Vec::new();
    let mut current = f64::NEG_INFINITY;
    while trajectory.len() < options.max_steps {
        let scores: Vec<f64> = (0..ids.len())
            .into_par_iter()
            .map(|c| {
                let p = &ws.predictions[c];
                ws.normalized(|k| tally.decide_with(options.rule, c, k, p[k]))
            })
            .collect();
        // first maximum in id order
        let (best, best_score) =
            scores.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (c, &s)| if s > acc.1 { (c, s) } else { acc },
            );
        let improved = best_score > current + options.tolerance;
        if !improved {
            break;
        }
        debug_assert!(best_score > current);
        tally.add(best, &ws.predictions[best]);
        current = best_score;
        trajectory.push(GreedyStep {
            added: ids[best].clone(),
            score: best_score,
        });
    }

    let members = ids
        .iter()
        .zip(&tally.counts)
        .filter(|(_, &n)| n > 0)
        .map(|(id, &n)| (id.clone(), n))
        .collect();
    Ok(GreedyResult {
        members,
        trajectory,
        individual_scores,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildConfig {
    pub rules: BTreeMap<Regime, VoteRule>,
    /// Run a separate greedy search for each regime's rule instead of one
    /// search under the familiar rule.
    pub separate_regimes: bool,
    pub selector: RegimeSelector,
    pub tolerance: f64,
    pub max_steps: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        let greedy = GreedyOptions::default();
        BuildConfig {
            rules: default_rules(),
            separate_regimes: false,
            selector: RegimeSelector::default(),
            tolerance: greedy.tolerance,
            max_steps: greedy.max_steps,
        }
    }
}

/// Trains an [`EnsembleSpec`] on a labeled cohort.
pub fn build_ensemble<S: AsRef<str>>(
    candidates: &[S],
    bundle: &PredictionBundle,
    timelines: &[LabelTimeline],
    params: &UtilityParams,
    config: &BuildConfig,
) -> Result<(EnsembleSpec, BTreeMap<Regime, GreedyResult>), EnsembleError> {
    let mut rules = default_rules();
    rules.extend(config.rules.iter().map(|(r, v)| (*r, *v)));
    let options = |regime: Regime| GreedyOptions {
        rule: rules[&regime],
        tolerance: config.tolerance,
        max_steps: config.max_steps,
    };
    let mut results = BTreeMap::new();
    let familiar = greedy_select(candidates, bundle, timelines, params, &options(Regime::Familiar))?;
    let mut spec = EnsembleSpec::new(familiar.members.clone());
    spec.rules = rules.clone();
    spec.selector = config.selector;
    results.insert(Regime::Familiar, familiar);
    if config.separate_regimes {
        let unfamiliar = greedy_select(
            candidates,
            bundle,
            timelines,
            params,
            &options(Regime::Unfamiliar),
        )?;
        spec.regime_members
            .insert(Regime::Unfamiliar, unfamiliar.members.clone());
        results.insert(Regime::Unfamiliar, unfamiliar);
    }
    spec.validate()?;
    Ok((spec, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::PredictionStream;
    use crate::labeler::hourly_labels;

    fn cohort() -> Vec<LabelTimeline> {
        [("p1", 30, Some(15)), ("p2", 20, None), ("p3", 25, Some(10))]
            .iter()
            .map(|&(id, len, ts)| LabelTimeline {
                patient_id: id.to_string(),
                first_hour: 1,
                t_suspicion: ts,
                t_sofa: ts,
                t_sepsis: ts,
                labels: hourly_labels(1, len, ts, 6),
                short_terminal_course: false,
            })
            .collect()
    }

    type Transform = fn(&[bool]) -> Vec<bool>;

    fn bundle_from(cohort: &[LabelTimeline], algs: &[(&str, Transform)]) -> PredictionBundle {
        let mut b = PredictionBundle::new();
        for (alg, f) in algs {
            for t in cohort {
                b.insert(PredictionStream::from_labels(alg, &t.patient_id, f(&t.labels)));
            }
        }
        b
    }

    #[test]
    fn single_candidate() {
        let c = cohort();
        let b = bundle_from(&c, &[("only", |l| l.to_vec())]);
        let r = greedy_select(
            &["only"],
            &b,
            &c,
            &UtilityParams::default(),
            &GreedyOptions::default(),
        )
        .unwrap();
        assert_eq!(r.members, Members::from([("only".to_string(), 1)]));
        assert_eq!(r.trajectory.len(), 1);
        assert_eq!(r.final_score(), 1.0);
    }

    #[test]
    fn perfect_beats_inverted() {
        let c = cohort();
        // positive from twelve hours before onset maximizes utility
        let mut b = PredictionBundle::new();
        for t in &c {
            let best = hourly_labels(1, t.len(), t.t_sepsis, 12);
            let inverted = best.iter().map(|x| !x).collect();
            b.insert(PredictionStream::from_labels("perfect", &t.patient_id, best));
            b.insert(PredictionStream::from_labels("inverted", &t.patient_id, inverted));
        }
        let r = greedy_select(
            &["inverted", "perfect"],
            &b,
            &c,
            &UtilityParams::default(),
            &GreedyOptions::default(),
        )
        .unwrap();
        assert_eq!(r.members, Members::from([("perfect".to_string(), 1)]));
    }

    #[test]
    fn errors() {
        let c = cohort();
        let b = bundle_from(&c, &[("none", |l| vec![false; l.len()])]);
        let empty: [&str; 0] = [];
        assert_eq!(
            greedy_select(
                &empty,
                &b,
                &c,
                &UtilityParams::default(),
                &GreedyOptions::default()
            ),
            Err(EnsembleError::NoCandidates)
        );
        assert_eq!(
            greedy_select(
                &["none"],
                &b,
                &c,
                &UtilityParams::default(),
                &GreedyOptions::default()
            ),
            Err(EnsembleError::NoPositiveCandidate)
        );
        assert!(matches!(
            greedy_select(
                &["ghost"],
                &b,
                &c,
                &UtilityParams::default(),
                &GreedyOptions::default()
            ),
            Err(EnsembleError::Coverage(_))
        ));
    }

    #[test]
    fn separate_regimes() {
        let c = cohort();
        let b = bundle_from(&c, &[("a", |l| l.to_vec()), ("b", |l| vec![true; l.len()])]);
        let config = BuildConfig {
            separate_regimes: true,
            ..BuildConfig::default()
        };
        let (spec, results) =
            build_ensemble(&["a", "b"], &b, &c, &UtilityParams::default(), &config).unwrap();
        assert_eq!(results.len(), 2);
        assert!(spec.regime_members.contains_key(&Regime::Unfamiliar));
        assert_eq!(spec.rule_for(Regime::Unfamiliar), VoteRule::AllButOne);
    }
}
