use super::{EnsembleError, Regime, RegimeSelector};
use crate::data::PredictionBundle;
use crate::diversity::{unweighted_matrix, Ranking};

/// Mean pairwise similarity above which the target is treated as unfamiliar.
pub const DEFAULT_REGIME_TAU: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeDecision {
    pub regime: Regime,
    /// Mean off-diagonal Jaccard similarity; `None` under a manual override.
    pub mean_similarity: Option<f64>,
}

/// Picks the vote regime for a target cohort. High agreement between the
/// algorithms on the target suggests shared errors, so the conservative
/// regime applies.
pub fn select_regime<S: AsRef<str>>(
    bundle: &PredictionBundle,
    algorithms: &[S],
    selector: RegimeSelector,
) -> Result<RegimeDecision, EnsembleError> {
    let tau = match selector {
        RegimeSelector::Manual(regime) => {
            return Ok(RegimeDecision {
                regime,
                mean_similarity: None,
            })
        }
        RegimeSelector::Auto { tau } => tau,
    };
    if algorithms.len() < 2 {
        return Err(EnsembleError::TooFewAlgorithms(algorithms.len()));
    }
    let matrix = unweighted_matrix(&bundle.restricted_to(algorithms), &Ranking::by_id())?;
    if matrix.len() < algorithms.len() {
        let missing = algorithms
            .iter()
            .find(|a| matrix.index_of(a.as_ref()).is_none())
            .map(|a| a.as_ref().to_string())
            .unwrap_or_default();
        return Err(EnsembleError::MissingPrediction(missing));
    }
    let mean = matrix.mean_off_diagonal().expect("at least two algorithms");
    let regime = if mean > tau {
        Regime::Unfamiliar
    } else {
        Regime::Familiar
    };
    Ok(RegimeDecision {
        regime,
        mean_similarity: Some(mean),
    })
}
