//! Zhang–Shasha ordered tree edit distance.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::tree::AstTree;

/// Per-operation costs. Relabeling between equal labels is free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditCosts {
    pub insert: f64,
    pub delete: f64,
    pub relabel: f64,
}

impl Default for EditCosts {
    fn default() -> Self {
        EditCosts {
            insert: 1.0,
            delete: 1.0,
            relabel: 1.0,
        }
    }
}

impl EditCosts {
    pub fn is_valid(&self) -> bool {
        [self.insert, self.delete, self.relabel]
            .iter()
            .all(|c| c.is_finite() && *c >= 0.0)
    }
}

/// Postorder view used by the dynamic program.
struct Indexed {
    labels: Vec<u32>,
    lml: Vec<usize>,
    keyroots: Vec<usize>,
}

impl Indexed {
    fn new(tree: &AstTree, interner: &mut HashMap<String, u32>) -> Self {
        let labels = tree
            .labels()
            .iter()
            .map(|l| {
                let next = interner.len() as u32;
                *interner.entry(l.clone()).or_insert(next)
            })
            .collect();
        let lml = tree.leftmost_leaves();
        // a keyroot is the highest node for its leftmost leaf
        let mut highest: HashMap<usize, usize> = HashMap::new();
        for (i, &l) in lml.iter().enumerate() {
            highest.insert(l, i);
        }
        let mut keyroots: Vec<usize> = highest.into_values().collect();
        keyroots.sort_unstable();
        Indexed {
            labels,
            lml,
            keyroots,
        }
    }
}

/// Minimum total cost of inserts, deletes and relabels turning `a` into `b`.
pub fn tree_edit_distance(a: &AstTree, b: &AstTree, costs: &EditCosts) -> f64 {
    if a.is_empty() {
        return b.len() as f64 * costs.insert;
    }
    if b.is_empty() {
        return a.len() as f64 * costs.delete;
    }
    let mut interner = HashMap::new();
    let t1 = Indexed::new(a, &mut interner);
    let t2 = Indexed::new(b, &mut interner);
    let (n1, n2) = (a.len(), b.len());

    let mut treedist = vec![0.0f64; n1 * n2];
    let mut forest = vec![0.0f64; (n1 + 1) * (n2 + 1)];
    let width = n2 + 1;

    for &i in &t1.keyroots {
        for &j in &t2.keyroots {
            let (li, lj) = (t1.lml[i], t2.lml[j]);
            let rows = i - li + 1;
            let cols = j - lj + 1;
            forest[0] = 0.0;
            for di in 1..=rows {
                forest[di * width] = forest[(di - 1) * width] + costs.delete;
            }
            for dj in 1..=cols {
                forest[dj] = forest[dj - 1] + costs.insert;
            }
            for di in 1..=rows {
                let x = li + di - 1;
                for dj in 1..=cols {
                    let y = lj + dj - 1;
                    let delete = forest[(di - 1) * width + dj] + costs.delete;
                    let insert = forest[di * width + dj - 1] + costs.insert;
                    let value = if t1.lml[x] == li && t2.lml[y] == lj {
                        let relabel = if t1.labels[x] == t2.labels[y] {
                            0.0
                        } else {
                            costs.relabel
                        };
                        let v = delete
                            .min(insert)
                            .min(forest[(di - 1) * width + dj - 1] + relabel);
                        treedist[x * n2 + y] = v;
                        v
                    } else {
                        let pi = t1.lml[x] - li;
                        let pj = t2.lml[y] - lj;
                        delete
                            .min(insert)
                            .min(forest[pi * width + pj] + treedist[x * n2 + y])
                    };
                    forest[di * width + dj] = value;
                }
            }
        }
    }
    treedist[(n1 - 1) * n2 + (n2 - 1)]
}
