use super::DiversityError;

/// A pairwise score and whether it came from the zero-denominator fallback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    pub value: f64,
    pub degenerate: bool,
}

fn same_len(a: usize, b: usize) -> Result<(), DiversityError> {
    if a == b {
        Ok(())
    } else {
        Err(DiversityError::LengthMismatch { left: a, right: b })
    }
}

/// Jaccard index of two binary sequences: joint positives over hours where
/// either is positive. Two all-negative sequences score 1.
pub fn unweighted_similarity(x: &[bool], y: &[bool]) -> Result<f64, DiversityError> {
    unweighted_pair(x, y).map(|s| s.value)
}

pub fn unweighted_pair(x: &[bool], y: &[bool]) -> Result<PairScore, DiversityError> {
    same_len(x.len(), y.len())?;
    let (both, either) = jaccard_counts(x, y);
    Ok(jaccard_from_counts(both, either))
}

pub(crate) fn jaccard_counts(x: &[bool], y: &[bool]) -> (u64, u64) {
    x.iter().zip(y).fold((0, 0), |(both, either), (&a, &b)| {
        (both + u64::from(a && b), either + u64::from(a || b))
    })
}

pub(crate) fn jaccard_from_counts(both: u64, either: u64) -> PairScore {
    if either == 0 {
        PairScore {
            value: 1.0,
            degenerate: true,
        }
    } else {
        PairScore {
            value: both as f64 / either as f64,
            degenerate: false,
        }
    }
}

/// One minus the L1 distance between two utility traces, normalized by the
/// sum of their absolute values. Two all-zero traces score 1.
pub fn weighted_similarity(u: &[f64], v: &[f64]) -> Result<f64, DiversityError> {
    weighted_pair(u, v).map(|s| s.value)
}

pub fn weighted_pair(u: &[f64], v: &[f64]) -> Result<PairScore, DiversityError> {
    same_len(u.len(), v.len())?;
    let (diff, mass) = weighted_sums(u, v);
    Ok(weighted_from_sums(diff, mass))
}

pub(crate) fn weighted_sums(u: &[f64], v: &[f64]) -> (f64, f64) {
    u.iter().zip(v).fold((0.0, 0.0), |(diff, mass), (&a, &b)| {
        (diff + (a - b).abs(), mass + (a.abs() + b.abs()))
    })
}

pub(crate) fn weighted_from_sums(diff: f64, mass: f64) -> PairScore {
    if mass == 0.0 {
        PairScore {
            value: 1.0,
            degenerate: true,
        }
    } else {
        PairScore {
            value: 1.0 - diff / mass,
            degenerate: false,
        }
    }
}
