use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::similarity::{jaccard_counts, jaccard_from_counts, weighted_from_sums, weighted_sums, PairScore};
use super::DiversityError;
use crate::data::PredictionBundle;
use crate::labeler::LabelTimeline;
use crate::utility::{hourly_utility, UtilityParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Unweighted,
    Weighted,
    Code,
    KappaSummary,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Unweighted => "unweighted",
            MatrixKind::Weighted => "weighted",
            MatrixKind::Code => "code",
            MatrixKind::KappaSummary => "kappa-summary",
        })
    }
}

/// How rows and columns are ordered: by descending score, then by id.
/// Ids without a score go last.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ranking {
    pub key: String,
    scores: BTreeMap<String, f64>,
}

impl Ranking {
    pub fn by_id() -> Self {
        Ranking {
            key: "algorithm id".to_string(),
            scores: BTreeMap::new(),
        }
    }

    pub fn by_scores<I, S>(key: &str, scores: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        Ranking {
            key: key.to_string(),
            scores: scores.into_iter().map(|(id, s)| (id.into(), s)).collect(),
        }
    }

    pub fn score(&self, id: &str) -> Option<f64> {
        self.scores.get(id).copied()
    }

    pub fn order<S: AsRef<str>>(&self, ids: &[S]) -> Vec<String> {
        let mut ids: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        ids.sort_by(|a, b| match (self.score(a), self.score(b)) {
            (Some(x), Some(y)) => y.total_cmp(&x).then_with(|| a.cmp(b)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a.cmp(b),
        });
        ids
    }

    /// The first `n` ids in ranking order.
    pub fn top<S: AsRef<str>>(&self, ids: &[S], n: usize) -> Vec<String> {
        let mut ordered = self.order(ids);
        ordered.truncate(n);
        ordered
    }
}

/// Symmetric matrix of pairwise scores, rows in ranking order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub algorithm_ids: Vec<String>,
    values: Vec<f64>,
    pub kind: MatrixKind,
    pub ordering_key: String,
    /// Cells `(i, j)`, `i <= j`, filled by a fallback rule rather than the formula.
    pub flagged: Vec<(usize, usize)>,
    /// How per-patient sequences were combined.
    pub aggregation: &'static str,
}

pub const CONCATENATED: &str = "concatenate-patients";
pub const PAIRWISE: &str = "pairwise";

impl SimilarityMatrix {
    /// Fills the upper triangle in parallel from `pair(i, j)` and mirrors it.
    pub fn from_pairs<F>(algorithm_ids: Vec<String>, kind: MatrixKind, ordering_key: &str, pair: F) -> Self
    where
        F: Fn(usize, usize) -> PairScore + Sync,
    {
        let n = algorithm_ids.len();
        let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let scores: Vec<PairScore> = cells.par_iter().map(|&(i, j)| pair(i, j)).collect();
        let mut values = vec![0.0; n * n];
        let mut flagged = Vec::new();
        for (&(i, j), s) in cells.iter().zip(&scores) {
            values[i * n + j] = s.value;
            values[j * n + i] = s.value;
            if s.degenerate {
                flagged.push((i, j));
            }
        }
        SimilarityMatrix {
            algorithm_ids,
            values,
            kind,
            ordering_key: ordering_key.to_string(),
            flagged,
            aggregation: match kind {
                MatrixKind::Code => PAIRWISE,
                _ => CONCATENATED,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.algorithm_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algorithm_ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.algorithm_ids.iter().position(|a| a == id)
    }

    pub fn is_flagged(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.flagged.contains(&key)
    }

    /// Mean of the off-diagonal entries; `None` for fewer than two ids.
    pub fn mean_off_diagonal(&self) -> Option<f64> {
        let n = self.len();
        if n < 2 {
            return None;
        }
        let mut sum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                sum += self.get(i, j);
            }
        }
        Some(sum / (n * (n - 1) / 2) as f64)
    }

    /// Comma-separated table with an id header row and id first column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for id in &self.algorithm_ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for (i, id) in self.algorithm_ids.iter().enumerate() {
            out.push_str(id);
            for j in 0..self.len() {
                out.push_str(&format!(",{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    /// `key=value` metadata lines describing how the matrix was built.
    pub fn metadata(&self) -> String {
        let flagged: Vec<String> = self
            .flagged
            .iter()
            .map(|&(i, j)| format!("{}:{}", self.algorithm_ids[i], self.algorithm_ids[j]))
            .collect();
        format!(
            "kind={}\nordering={}\naggregation={}\nflagged_cells={}\n",
            self.kind,
            self.ordering_key,
            self.aggregation,
            flagged.join(";")
        )
    }
}

/// Jaccard matrix over each algorithm's predictions, concatenated
/// across patients in id order.
pub fn unweighted_matrix(
    bundle: &PredictionBundle,
    ranking: &Ranking,
) -> Result<SimilarityMatrix, DiversityError> {
    bundle.check_complete()?;
    let algorithms: Vec<&str> = bundle.algorithms().collect();
    let ids = ranking.order(&algorithms);
    let concatenated: Vec<Vec<bool>> = ids
        .iter()
        .map(|a| {
            bundle
                .streams_for(a)
                .flat_map(|s| s.labels.iter().copied())
                .collect()
        })
        .collect();
    Ok(SimilarityMatrix::from_pairs(
        ids,
        MatrixKind::Unweighted,
        &ranking.key,
        |i, j| {
            let (both, either) = jaccard_counts(&concatenated[i], &concatenated[j]);
            jaccard_from_counts(both, either)
        },
    ))
}

/// Concatenated utility traces of one algorithm over the cohort, in
/// timeline order.
pub fn concatenated_trace(
    bundle: &PredictionBundle,
    algorithm: &str,
    timelines: &[LabelTimeline],
    params: &UtilityParams,
) -> Result<Vec<f64>, DiversityError> {
    let mut trace = Vec::new();
    for t in timelines {
        let stream = bundle.get(algorithm, &t.patient_id).ok_or_else(|| {
            crate::data::CoverageError::Missing(vec![(algorithm.to_string(), t.patient_id.clone())])
        })?;
        if stream.len() != t.len() {
            return Err(crate::data::CoverageError::LengthMismatch {
                algorithm: algorithm.to_string(),
                patient: t.patient_id.clone(),
                expected: t.len(),
                found: stream.len(),
            }
            .into());
        }
        trace.extend(
            t.hours()
                .zip(&stream.labels)
                .map(|(h, &x)| hourly_utility(h, x, t.t_sepsis, params)),
        );
    }
    Ok(trace)
}

/// Weighted similarity matrix over utility traces, concatenated across the cohort.
pub fn weighted_matrix(
    bundle: &PredictionBundle,
    timelines: &[LabelTimeline],
    params: &UtilityParams,
    ranking: &Ranking,
) -> Result<SimilarityMatrix, DiversityError> {
    let algorithms: Vec<&str> = bundle.algorithms().collect();
    let patients: Vec<&str> = timelines.iter().map(|t| t.patient_id.as_str()).collect();
    bundle.check_coverage(&algorithms, &patients)?;
    let ids = ranking.order(&algorithms);
    let traces = ids
        .iter()
        .map(|a| concatenated_trace(bundle, a, timelines, params))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SimilarityMatrix::from_pairs(
        ids,
        MatrixKind::Weighted,
        &ranking.key,
        |i, j| {
            let (diff, mass) = weighted_sums(&traces[i], &traces[j]);
            weighted_from_sums(diff, mass)
        },
    ))
}
