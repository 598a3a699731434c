use std::collections::BTreeMap;

use super::DiversityError;
use crate::data::PredictionBundle;

/// Fleiss' κ and whether the degenerate fallback (chance agreement of 1) applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub value: f64,
    pub degenerate: bool,
}

/// Two-category Fleiss' κ. Each inner slice is one rater's decisions over
/// the same `m` subjects (hourly windows).
///
/// When every subject is unanimous in a single category the expected
/// agreement is 1 and the usual ratio is 0/0; that case returns κ = 1 with
/// `degenerate` set.
pub fn fleiss_kappa<R: AsRef<[bool]>>(raters: &[R]) -> Result<Kappa, DiversityError> {
    let n = raters.len();
    if n < 2 {
        return Err(DiversityError::TooFewRaters(n));
    }
    let m = raters[0].as_ref().len();
    if m == 0 {
        return Err(DiversityError::NoSubjects);
    }
    if let Some(r) = raters.iter().find(|r| r.as_ref().len() != m) {
        return Err(DiversityError::LengthMismatch {
            left: m,
            right: r.as_ref().len(),
        });
    }

    let nf = n as f64;
    let mut agreement_sum = 0.0;
    let mut positives_total = 0u64;
    for k in 0..m {
        let pos = raters.iter().filter(|r| r.as_ref()[k]).count() as u64;
        let neg = n as u64 - pos;
        positives_total += pos;
        let same_pairs = (pos * pos + neg * neg) as f64 - nf;
        agreement_sum += same_pairs / (nf * (nf - 1.0));
    }
    let observed = agreement_sum / m as f64;
    let p_pos = positives_total as f64 / (nf * m as f64);
    let p_neg = 1.0 - p_pos;
    let expected = p_pos * p_pos + p_neg * p_neg;
    if expected >= 1.0 {
        return Ok(Kappa {
            value: 1.0,
            degenerate: true,
        });
    }
    Ok(Kappa {
        value: (observed - expected) / (1.0 - expected),
        degenerate: false,
    })
}

/// Per-patient κ over a subset of algorithms, plus a histogram for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaDistribution {
    pub algorithms: Vec<String>,
    /// `(patient_id, κ)` in patient id order.
    pub per_patient: Vec<(String, Kappa)>,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Bin edges, `counts.len() + 1` of them.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Equal-width bins over `[lo, hi]`; values outside are clamped into the
    /// end bins.
    pub fn new(values: impl IntoIterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins > 0 && hi > lo);
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0; bins];
        for v in values {
            let idx = ((v - lo) / width).floor();
            let idx = idx.clamp(0.0, (bins - 1) as f64) as usize;
            counts[idx] += 1;
        }
        Histogram { edges, counts }
    }
}

pub const DEFAULT_KAPPA_BINS: usize = 20;

/// Fleiss' κ for each patient, with the chosen algorithms as raters and the
/// patient's hourly windows as subjects.
pub fn kappa_distribution<S: AsRef<str>>(
    bundle: &PredictionBundle,
    algorithms: &[S],
    bins: usize,
) -> Result<KappaDistribution, DiversityError> {
    if algorithms.len() < 2 {
        return Err(DiversityError::TooFewRaters(algorithms.len()));
    }
    let subset = bundle.restricted_to(algorithms);
    let patients = subset.patients();
    subset.check_coverage(algorithms, &patients)?;

    let mut per_patient: BTreeMap<String, Kappa> = BTreeMap::new();
    for pid in &patients {
        let raters: Vec<&[bool]> = algorithms
            .iter()
            .map(|a| {
                subset
                    .get(a.as_ref(), pid)
                    .expect("coverage checked")
                    .labels
                    .as_slice()
            })
            .collect();
        per_patient.insert(pid.to_string(), fleiss_kappa(&raters)?);
    }
    let per_patient: Vec<(String, Kappa)> = per_patient.into_iter().collect();
    let histogram = Histogram::new(per_patient.iter().map(|(_, k)| k.value), -1.0, 1.0, bins);
    Ok(KappaDistribution {
        algorithms: algorithms.iter().map(|a| a.as_ref().to_string()).collect(),
        per_patient,
        histogram,
    })
}

impl KappaDistribution {
    /// `patient_id,kappa,degenerate` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("patient_id,kappa,degenerate\n");
        for (pid, k) in &self.per_patient {
            out.push_str(&format!("{pid},{},{}\n", k.value, u8::from(k.degenerate)));
        }
        out
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (i, c) in self.histogram.counts.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{c}\n",
                self.histogram.edges[i],
                self.histogram.edges[i + 1]
            ));
        }
        out
    }
}
