//! Consensus voting ensembles: weighted hourly votes, greedy member
//! selection with replacement, and switching the vote rule by regime.

mod greedy;
mod regime;
mod spec_file;
mod vote;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::CoverageError;
use crate::diversity::DiversityError;
use crate::utility::ScoreError;

pub use greedy::{build_ensemble, greedy_select, BuildConfig, GreedyOptions, GreedyResult, GreedyStep};
pub use regime::{select_regime, RegimeDecision, DEFAULT_REGIME_TAU};
pub use spec_file::{parse_spec_file, write_spec_file};
pub use vote::{apply_ensemble, vote, vote_weighted, ENSEMBLE_ID};

/// Algorithm id → multiplicity.
pub type Members = BTreeMap<String, u32>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VoteRule {
    /// Positive iff the weighted positive share is at least θ (ties positive).
    ThresholdFraction(f64),
    /// Positive iff at most one distinct member predicts negative.
    AllButOne,
}

impl VoteRule {
    pub const MAJORITY: VoteRule = VoteRule::ThresholdFraction(0.5);

    pub fn validate(&self) -> Result<(), EnsembleError> {
        match *self {
            VoteRule::ThresholdFraction(t) if !(t > 0.0 && t <= 1.0) => {
                Err(EnsembleError::InvalidThreshold(t))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for VoteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VoteRule::ThresholdFraction(t) => write!(f, "threshold:{t}"),
            VoteRule::AllButOne => f.write_str("all-but-one"),
        }
    }
}

impl FromStr for VoteRule {
    type Err = EnsembleError;

    /// Accepts `majority`, `threshold:<θ>` and `all-but-one`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rule = match s {
            "majority" => VoteRule::MAJORITY,
            "all-but-one" | "all_but_one" => VoteRule::AllButOne,
            other => {
                let theta = other
                    .strip_prefix("threshold:")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| EnsembleError::UnknownRule(other.to_string()))?;
                VoteRule::ThresholdFraction(theta)
            }
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// Whether the target data resembles the training data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    Familiar,
    Unfamiliar,
}

impl Regime {
    pub const ALL: [Regime; 2] = [Regime::Familiar, Regime::Unfamiliar];
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Familiar => "familiar",
            Regime::Unfamiliar => "unfamiliar",
        })
    }
}

impl FromStr for Regime {
    type Err = EnsembleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "familiar" => Ok(Regime::Familiar),
            "unfamiliar" => Ok(Regime::Unfamiliar),
            other => Err(EnsembleError::UnknownRegime(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeSelector {
    /// Unfamiliar when mean pairwise Jaccard similarity exceeds `tau`.
    Auto {
        tau: f64,
    },
    Manual(Regime),
}

impl Default for RegimeSelector {
    fn default() -> Self {
        RegimeSelector::Auto {
            tau: DEFAULT_REGIME_TAU,
        }
    }
}

/// Weighted member multiset with a vote rule per regime.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub members: Members,
    /// Regime-specific multisets that replace `members` when present.
    pub regime_members: BTreeMap<Regime, Members>,
    pub rules: BTreeMap<Regime, VoteRule>,
    pub selector: RegimeSelector,
}

impl EnsembleSpec {
    /// Majority vote when familiar, all-but-one when unfamiliar.
    pub fn new(members: Members) -> Self {
        EnsembleSpec {
            members,
            regime_members: BTreeMap::new(),
            rules: default_rules(),
            selector: RegimeSelector::default(),
        }
    }

    pub fn with_rule(mut self, regime: Regime, rule: VoteRule) -> Self {
        self.rules.insert(regime, rule);
        self
    }

    pub fn members_for(&self, regime: Regime) -> &Members {
        self.regime_members.get(&regime).unwrap_or(&self.members)
    }

    pub fn rule_for(&self, regime: Regime) -> VoteRule {
        self.rules
            .get(&regime)
            .copied()
            .unwrap_or_else(|| default_rules()[&regime])
    }

    /// Every member id across all regimes.
    pub fn all_member_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .members
            .keys()
            .chain(self.regime_members.values().flat_map(|m| m.keys()))
            .cloned()
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        for members in std::iter::once(&self.members).chain(self.regime_members.values()) {
            if members.is_empty() {
                return Err(EnsembleError::EmptyMembers);
            }
            if let Some((id, _)) = members.iter().find(|(_, w)| **w == 0) {
                return Err(EnsembleError::ZeroWeight(id.clone()));
            }
        }
        for rule in self.rules.values() {
            rule.validate()?;
        }
        if let RegimeSelector::Auto { tau } = self.selector {
            if !tau.is_finite() {
                return Err(EnsembleError::InvalidThreshold(tau));
            }
        }
        Ok(())
    }
}

pub fn default_rules() -> BTreeMap<Regime, VoteRule> {
    BTreeMap::from([
        (Regime::Familiar, VoteRule::MAJORITY),
        (Regime::Unfamiliar, VoteRule::AllButOne),
    ])
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error("no prediction from member `{0}`")]
    MissingPrediction(String),
    #[error("ensemble has no members")]
    EmptyMembers,
    #[error("member `{0}` has weight 0")]
    ZeroWeight(String),
    #[error("vote threshold must be in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("unknown vote rule `{0}` (expected majority, threshold:<x> or all-but-one)")]
    UnknownRule(String),
    #[error("unknown regime `{0}` (expected familiar or unfamiliar)")]
    UnknownRegime(String),
    #[error("candidate set is empty")]
    NoCandidates,
    #[error("no candidate has positive training utility")]
    NoPositiveCandidate,
    #[error("regime selection needs at least two algorithms, got {0}")]
    TooFewAlgorithms(usize),
    #[error("ensemble file line {line}: {message}")]
    SpecFormat { line: usize, message: String },
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Diversity(#[from] DiversityError),
}
