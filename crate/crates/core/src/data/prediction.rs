use std::collections::BTreeMap;

use super::error::{CoverageError, FormatError};
use super::{parse_number, MISSING_TOKEN};

/// Header written by some tools; tolerated on input, never written.
const PREDICTION_HEADER: &str = "PredictedProbability|PredictedLabel";

/// One algorithm's hourly binary predictions for one patient.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionStream {
    pub algorithm_id: String,
    pub patient_id: String,
    pub labels: Vec<bool>,
    /// Same length as `labels`; `None` where no probability was reported.
    pub probabilities: Vec<Option<f64>>,
}

impl PredictionStream {
    pub fn from_labels(algorithm_id: &str, patient_id: &str, labels: Vec<bool>) -> Self {
        let probabilities = vec![None; labels.len()];
        PredictionStream {
            algorithm_id: algorithm_id.to_string(),
            patient_id: patient_id.to_string(),
            labels,
            probabilities,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Parses `probability|label` lines, one per hour.
pub fn parse_prediction_file(
    text: &str,
    algorithm_id: &str,
    patient_id: &str,
) -> Result<PredictionStream, FormatError> {
    let mut labels = Vec::new();
    let mut probabilities = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || (line_no == 1 && line == PREDICTION_HEADER) {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(FormatError::FieldCount {
                line: line_no,
                expected: 2,
                found: fields.len(),
            });
        }
        let probability = if fields[0] == MISSING_TOKEN {
            None
        } else {
            match parse_number(fields[0]) {
                Some(p) if (0.0..=1.0).contains(&p) => Some(p),
                _ => {
                    return Err(FormatError::BadProbability {
                        line: line_no,
                        token: fields[0].to_string(),
                    })
                }
            }
        };
        let label = match fields[1] {
            "0" => false,
            "1" => true,
            other => {
                return Err(FormatError::BadLabel {
                    line: line_no,
                    token: other.to_string(),
                })
            }
        };
        labels.push(label);
        probabilities.push(probability);
    }
    Ok(PredictionStream {
        algorithm_id: algorithm_id.to_string(),
        patient_id: patient_id.to_string(),
        labels,
        probabilities,
    })
}

pub fn write_prediction_file(stream: &PredictionStream) -> String {
    let mut out = String::with_capacity(stream.len() * 8);
    for (label, p) in stream.labels.iter().zip(&stream.probabilities) {
        match p {
            Some(p) => out.push_str(&format!("{p}")),
            None => out.push_str(MISSING_TOKEN),
        }
        out.push('|');
        out.push(if *label { '1' } else { '0' });
        out.push('\n');
    }
    out
}

/// Streams for a population of algorithms over a cohort:
/// algorithm id → patient id → stream. Iteration order is sorted by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionBundle {
    streams: BTreeMap<String, BTreeMap<String, PredictionStream>>,
}

impl PredictionBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, stream: PredictionStream) {
        self.streams
            .entry(stream.algorithm_id.clone())
            .or_default()
            .insert(stream.patient_id.clone(), stream);
    }

    pub fn algorithms(&self) -> impl Iterator<Item = &str> {
        self.streams.keys().map(String::as_str)
    }

    pub fn algorithm_count(&self) -> usize {
        self.streams.len()
    }

    pub fn contains_algorithm(&self, algorithm: &str) -> bool {
        self.streams.contains_key(algorithm)
    }

    pub fn get(&self, algorithm: &str, patient: &str) -> Option<&PredictionStream> {
        self.streams.get(algorithm)?.get(patient)
    }

    /// Streams of one algorithm, sorted by patient id.
    pub fn streams_for(&self, algorithm: &str) -> impl Iterator<Item = &PredictionStream> {
        self.streams.get(algorithm).into_iter().flat_map(|m| m.values())
    }

    /// Sorted union of patient ids over all algorithms.
    pub fn patients(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self
            .streams
            .values()
            .flat_map(|m| m.keys().map(String::as_str))
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Keeps only the listed algorithms.
    pub fn restricted_to<S: AsRef<str>>(&self, algorithms: &[S]) -> PredictionBundle {
        let streams = self
            .streams
            .iter()
            .filter(|(id, _)| algorithms.iter().any(|a| a.as_ref() == id.as_str()))
            .map(|(id, m)| (id.clone(), m.clone()))
            .collect();
        PredictionBundle { streams }
    }

    /// Verifies every listed algorithm has a stream for every listed patient.
    pub fn check_coverage<A, P>(&self, algorithms: &[A], patients: &[P]) -> Result<(), CoverageError>
    where
        A: AsRef<str>,
        P: AsRef<str>,
    {
        let mut missing = Vec::new();
        for alg in algorithms {
            for pid in patients {
                if self.get(alg.as_ref(), pid.as_ref()).is_none() {
                    missing.push((alg.as_ref().to_string(), pid.as_ref().to_string()));
                }
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CoverageError::Missing(missing))
        }
    }

    /// Coverage over the bundle's own patient union, plus equal stream
    /// lengths per patient across algorithms.
    pub fn check_complete(&self) -> Result<(), CoverageError> {
        let algorithms: Vec<&str> = self.algorithms().collect();
        let patients = self.patients();
        self.check_coverage(&algorithms, &patients)?;
        for pid in &patients {
            let mut expected: Option<usize> = None;
            for alg in &algorithms {
                let len = self.get(alg, pid).map_or(0, PredictionStream::len);
                match expected {
                    None => expected = Some(len),
                    Some(e) if e != len => {
                        return Err(CoverageError::LengthMismatch {
                            algorithm: alg.to_string(),
                            patient: pid.to_string(),
                            expected: e,
                            found: len,
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}
