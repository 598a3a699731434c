//! Code similarity from serialized syntax trees: ordered tree edit distance,
//! converted to a similarity by taking its reciprocal.

mod ted;
mod tree;

use rayon::prelude::*;

use crate::diversity::{MatrixKind, PairScore, Ranking, SimilarityMatrix};

pub use ted::{tree_edit_distance, EditCosts};
pub use tree::{parse_tree, AstTree, TreeParseError};

/// What a zero distance maps to, since `1/d` is undefined there.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SimilarityCap {
    /// Ten times the largest finite similarity among the compared pairs
    /// (10 when there is none).
    #[default]
    Auto,
    Fixed(f64),
}

pub const AUTO_CAP_FACTOR: f64 = 10.0;

/// `1/d` for positive distances; `cap` with `identical` set for `d = 0`.
pub fn code_similarity(distance: f64, cap: f64) -> PairScore {
    debug_assert!(distance >= 0.0);
    if distance > 0.0 {
        PairScore {
            value: 1.0 / distance,
            degenerate: false,
        }
    } else {
        PairScore {
            value: cap,
            degenerate: true,
        }
    }
}

/// Pairwise distances and the derived similarity matrix for a set of trees.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeComparison {
    pub ids: Vec<String>,
    distances: Vec<f64>,
    pub similarity: SimilarityMatrix,
    /// Value substituted for zero distances.
    pub cap: f64,
}

impl CodeComparison {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.ids.len() + j]
    }

    pub fn distance_csv(&self) -> String {
        let mut out = String::from("id");
        for id in &self.ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for (i, id) in self.ids.iter().enumerate() {
            out.push_str(id);
            for j in 0..self.ids.len() {
                out.push_str(&format!(",{}", self.distance(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Compares every pair of named trees. Rows follow `ranking`; the diagonal
/// and any identical pairs carry the cap value and are flagged.
pub fn code_similarity_matrix(
    trees: &[(String, AstTree)],
    ranking: &Ranking,
    costs: &EditCosts,
    cap: SimilarityCap,
) -> CodeComparison {
    let ids: Vec<String> = ranking.order(&trees.iter().map(|(id, _)| id.as_str()).collect::<Vec<_>>());
    let ordered: Vec<&AstTree> = ids
        .iter()
        .map(|id| &trees.iter().find(|(t, _)| t == id).expect("id from input").1)
        .collect();
    let n = ids.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let computed: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| tree_edit_distance(ordered[i], ordered[j], costs))
        .collect();
    let mut distances = vec![0.0; n * n];
    for (&(i, j), &d) in cells.iter().zip(&computed) {
        distances[i * n + j] = d;
        distances[j * n + i] = d;
    }

    let cap = match cap {
        SimilarityCap::Fixed(v) => v,
        SimilarityCap::Auto => {
            let max_finite = computed
                .iter()
                .filter(|d| **d > 0.0)
                .map(|d| 1.0 / d)
                .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))));
            max_finite.unwrap_or(1.0) * AUTO_CAP_FACTOR
        }
    };
    let similarity = SimilarityMatrix::from_pairs(ids.clone(), MatrixKind::Code, &ranking.key, |i, j| {
        code_similarity(distances[i * n + j], cap)
    });
    CodeComparison {
        ids,
        distances,
        similarity,
        cap,
    }
}
