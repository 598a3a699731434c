//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use sepvote::codesim::{AstTree, EditCosts};
use sepvote::data::{EventTimeline, Hour};
use sepvote::labeler::LabelTimeline;
use sepvote::utility::{TpTail, UtilityParams};

// ---------------------------------------------------------------- labeler

/// Scans hours in order and returns the first hour at which a rule fires.
pub fn oracle_suspicion(ev: &EventTimeline) -> Option<Hour> {
    let hours: Vec<Hour> = ev
        .iv_antibiotic_intervals
        .iter()
        .map(|x| x.0)
        .chain(ev.culture_hours.iter().copied())
        .collect();
    let (lo, hi) = (*hours.iter().min()?, *hours.iter().max()?);
    for t in lo..=hi {
        for &(s, e) in &ev.iv_antibiotic_intervals {
            if e - s < 72 {
                continue;
            }
            for &c in &ev.culture_hours {
                // antibiotics at t, culture drawn within the next 24 h
                if s == t && c >= t && c <= t + 24 {
                    return Some(t);
                }
                // culture at t, antibiotics started within the next 72 h
                if c == t && s > t && s <= t + 72 {
                    return Some(t);
                }
            }
        }
    }
    None
}

/// First observation whose score exceeds some observation in the previous
/// 24 hours (inclusive) by two or more.
pub fn oracle_sofa(ev: &EventTimeline) -> Option<Hour> {
    let mut obs = ev.sofa_series.clone();
    obs.sort();
    let mut hits: Vec<Hour> = Vec::new();
    for &(h, score) in &obs {
        if obs
            .iter()
            .any(|&(g, other)| g >= h - 24 && g <= h && score - other >= 2)
        {
            hits.push(h);
        }
    }
    hits.into_iter().min()
}

pub fn oracle_onset(susp: Option<Hour>, sofa: Option<Hour>) -> Option<Hour> {
    let (a, b) = (susp?, sofa?);
    let mut t = a.min(b);
    while t <= a.max(b) {
        let sofa_ok = (a - 24..=a + 12).contains(&b);
        if sofa_ok && (t == a || t == b) {
            return Some(t);
        }
        t += 1;
    }
    None
}

pub fn random_events<R: Rng>(rng: &mut R) -> EventTimeline {
    let span = rng.random_range(20..200);
    let n_abx = rng.random_range(0..4);
    let n_cult = rng.random_range(0..4);
    let n_sofa = rng.random_range(0..16);
    let mut sofa: Vec<(Hour, i32)> = (0..n_sofa)
        .map(|_| (rng.random_range(0..span), rng.random_range(0..7)))
        .collect();
    sofa.sort();
    EventTimeline {
        iv_antibiotic_intervals: (0..n_abx)
            .map(|_| {
                let s = rng.random_range(0..span);
                (s, s + rng.random_range(0..150))
            })
            .collect(),
        culture_hours: (0..n_cult).map(|_| rng.random_range(0..span)).collect(),
        sofa_series: sofa,
    }
}

// ---------------------------------------------------------------- utility

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    for w in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x >= x0 && x <= x1 {
            return if x1 == x0 {
                y1
            } else {
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            };
        }
    }
    panic!("{x} outside interpolation range");
}

/// Payoff from the breakpoint table of the schedule.
pub fn oracle_hour_utility(h: Hour, x: bool, onset: Option<Hour>, p: &UtilityParams) -> f64 {
    let Some(onset) = onset else {
        return if x { p.u_fp } else { p.u_tn };
    };
    let rel = (h - onset) as f64;
    if rel > p.dt_late {
        return 0.0;
    }
    if rel < p.dt_early {
        return if x { p.u_fp } else { 0.0 };
    }
    if x {
        let tail = match p.tp_tail {
            TpTail::ReturnToZero => 0.0,
            TpTail::Plateau => p.u_tp_max,
        };
        interpolate(
            &[(p.dt_early, 0.0), (p.dt_optimal, p.u_tp_max), (p.dt_late, tail)],
            rel,
        )
    } else {
        interpolate(&[(p.dt_early, 0.0), (p.dt_late, p.u_fn_min)], rel)
    }
}

pub fn oracle_raw(timelines: &[LabelTimeline], preds: &[Vec<bool>], p: &UtilityParams) -> f64 {
    let mut total = 0.0;
    for (t, x) in timelines.iter().zip(preds) {
        for (i, &b) in x.iter().enumerate() {
            total += oracle_hour_utility(t.first_hour + i as Hour, b, t.t_sepsis, p);
        }
    }
    total
}

pub fn oracle_normalized(timelines: &[LabelTimeline], preds: &[Vec<bool>], p: &UtilityParams) -> f64 {
    let none: Vec<Vec<bool>> = timelines.iter().map(|t| vec![false; t.labels.len()]).collect();
    let best: Vec<Vec<bool>> = timelines.iter().map(|t| t.labels.clone()).collect();
    let (o, n, b) = (
        oracle_raw(timelines, preds, p),
        oracle_raw(timelines, &none, p),
        oracle_raw(timelines, &best, p),
    );
    (o - n) / (b - n)
}

// ---------------------------------------------------------------- diversity

pub fn oracle_jaccard(x: &[bool], y: &[bool]) -> f64 {
    let num: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| f64::from(u8::from(*a) * u8::from(*b)))
        .sum();
    let den: f64 = x.iter().zip(y).map(|(a, b)| f64::from(u8::from(*a || *b))).sum();
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

pub fn oracle_weighted_similarity(u: &[f64], v: &[f64]) -> f64 {
    let num: f64 = u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum();
    let den: f64 = u.iter().zip(v).map(|(a, b)| a.abs() + b.abs()).sum();
    if den == 0.0 {
        1.0
    } else {
        1.0 - num / den
    }
}

/// Fleiss' κ via explicit rater-pair agreement counts per subject.
pub fn oracle_fleiss(raters: &[Vec<bool>]) -> f64 {
    let n = raters.len();
    let m = raters[0].len();
    let mut p_bar = 0.0;
    let mut ones = 0usize;
    for k in 0..m {
        let mut agree = 0usize;
        for (a, ra) in raters.iter().enumerate() {
            if ra[k] {
                ones += 1;
            }
            for (b, rb) in raters.iter().enumerate() {
                if a != b && ra[k] == rb[k] {
                    agree += 1;
                }
            }
        }
        p_bar += agree as f64 / (n * (n - 1)) as f64;
    }
    p_bar /= m as f64;
    let p1 = ones as f64 / (n * m) as f64;
    let pe = p1 * p1 + (1.0 - p1) * (1.0 - p1);
    (p_bar - pe) / (1.0 - pe)
}

// ---------------------------------------------------------------- trees

/// Plain recursive tree used by the oracles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub label: String,
    pub children: Vec<Node>,
}

pub type Forest = Vec<Node>;

pub fn render(f: &Forest) -> String {
    fn go(n: &Node, out: &mut String) {
        out.push_str(&n.label);
        if !n.children.is_empty() {
            out.push('(');
            for (i, c) in n.children.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                go(c, out);
            }
            out.push(')');
        }
    }
    let mut s = String::new();
    if let Some(root) = f.first() {
        go(root, &mut s);
    }
    s
}

pub fn size(f: &[Node]) -> usize {
    f.iter().map(|n| 1 + size(&n.children)).sum()
}

/// Every ordered labeled tree with exactly `n` nodes.
pub fn trees_of_size(n: usize, alphabet: &[&str]) -> Vec<Node> {
    let mut out = Vec::new();
    for label in alphabet {
        for kids in forests_of_size(n - 1, alphabet) {
            out.push(Node {
                label: label.to_string(),
                children: kids,
            });
        }
    }
    out
}

pub fn forests_of_size(n: usize, alphabet: &[&str]) -> Vec<Forest> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for head in trees_of_size(first, alphabet) {
            for tail in forests_of_size(n - first, alphabet) {
                let mut f = vec![head.clone()];
                f.extend(tail);
                out.push(f);
            }
        }
    }
    out
}

fn edit_neighbors(f: &Forest, alphabet: &[&str], max_nodes: usize) -> Vec<Forest> {
    // neighbors of a forest; used on single-rooted forests and their subforests
    let mut out = Vec::new();
    let total = size(f);
    // delete / relabel at top level
    for i in 0..f.len() {
        let mut deleted = f[..i].to_vec();
        deleted.extend(f[i].children.iter().cloned());
        deleted.extend(f[i + 1..].iter().cloned());
        out.push(deleted);
        for l in alphabet {
            if *l != f[i].label {
                let mut r = f.clone();
                r[i].label = l.to_string();
                out.push(r);
            }
        }
    }
    // insert a new top-level node adopting f[i..j]
    if total < max_nodes {
        for i in 0..=f.len() {
            for j in i..=f.len() {
                for l in alphabet {
                    let mut g = f[..i].to_vec();
                    g.push(Node {
                        label: l.to_string(),
                        children: f[i..j].to_vec(),
                    });
                    g.extend(f[j..].iter().cloned());
                    out.push(g);
                }
            }
        }
    }
    // recurse into children
    for i in 0..f.len() {
        let budget = max_nodes - (total - size(&f[i].children));
        for kids in edit_neighbors(&f[i].children, alphabet, budget) {
            let mut g = f.clone();
            g[i].children = kids;
            out.push(g);
        }
    }
    out
}

/// All-pairs unit-cost edit distances among every tree (and the empty tree)
/// with at most `max_nodes` nodes, by breadth-first search over single edit
/// operations. Deletions-then-relabels-then-insertions is always an optimal
/// order, so intermediates never need more nodes than the larger endpoint.
pub struct EditGraph {
    pub trees: Vec<Forest>,
    pub index: HashMap<Forest, usize>,
    pub dist: Vec<Vec<u8>>,
}

impl EditGraph {
    pub fn build(max_nodes: usize, alphabet: &[&str]) -> Self {
        let mut trees: Vec<Forest> = vec![Vec::new()];
        for n in 1..=max_nodes {
            trees.extend(trees_of_size(n, alphabet).into_iter().map(|t| vec![t]));
        }
        let index: HashMap<Forest, usize> = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let adjacency: Vec<Vec<usize>> = trees
            .iter()
            .map(|t| {
                let mut adj: Vec<usize> = edit_neighbors(t, alphabet, max_nodes)
                    .into_iter()
                    .filter_map(|g| index.get(&g).copied())
                    .collect();
                adj.sort_unstable();
                adj.dedup();
                adj
            })
            .collect();
        let dist = (0..trees.len())
            .map(|s| {
                let mut d = vec![u8::MAX; trees.len()];
                d[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(u) = q.pop_front() {
                    for &v in &adjacency[u] {
                        if d[v] == u8::MAX {
                            d[v] = d[u] + 1;
                            q.push_back(v);
                        }
                    }
                }
                d
            })
            .collect();
        EditGraph { trees, index, dist }
    }
}

pub fn to_ast(f: &Forest) -> AstTree {
    fn go(n: &Node) -> AstTree {
        AstTree::node(&n.label, n.children.iter().map(go).collect())
    }
    f.first().map_or_else(AstTree::empty, go)
}

pub fn random_tree<R: Rng>(rng: &mut R, nodes: usize, alphabet: &[&str]) -> Forest {
    if nodes == 0 {
        return Vec::new();
    }
    // attach each new node under a random existing node at a random position
    let mut labels = vec![alphabet[rng.random_range(0..alphabet.len())].to_string()];
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    for i in 1..nodes {
        let parent = rng.random_range(0..i);
        let pos = rng.random_range(0..=children[parent].len());
        children[parent].insert(pos, i);
        children.push(Vec::new());
        labels.push(alphabet[rng.random_range(0..alphabet.len())].to_string());
    }
    fn build(i: usize, labels: &[String], children: &[Vec<usize>]) -> Node {
        Node {
            label: labels[i].clone(),
            children: children[i].iter().map(|&c| build(c, labels, children)).collect(),
        }
    }
    vec![build(0, &labels, &children)]
}

struct Flat {
    labels: Vec<String>,
    /// Postorder index range `[first, self]` of each node's subtree.
    first: Vec<usize>,
}

fn flatten(f: &Forest) -> Flat {
    fn go(n: &Node, flat: &mut Flat) {
        let first = flat.labels.len();
        for c in &n.children {
            go(c, flat);
        }
        flat.labels.push(n.label.clone());
        flat.first.push(first);
    }
    let mut flat = Flat {
        labels: Vec::new(),
        first: Vec::new(),
    };
    for n in f {
        go(n, &mut flat);
    }
    flat
}

/// Minimum cost over every valid ordered mapping (one-to-one, preserving
/// ancestry and left-to-right order). Valid mappings are increasing in
/// postorder on both sides, so it suffices to enumerate monotone matchings
/// and check ancestry pairwise.
pub fn oracle_mapping_distance(a: &Forest, b: &Forest, c: &EditCosts) -> f64 {
    let (fa, fb) = (flatten(a), flatten(b));
    let anc = |f: &Flat, x: usize, y: usize| f.first[y] <= x && x < y; // y is a proper ancestor of x
    let mut best = f64::INFINITY;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        j0: usize,
        fa: &Flat,
        fb: &Flat,
        pairs: &mut Vec<(usize, usize)>,
        c: &EditCosts,
        best: &mut f64,
        anc: &dyn Fn(&Flat, usize, usize) -> bool,
    ) {
        if i == fa.labels.len() {
            let relabels = pairs
                .iter()
                .filter(|(x, y)| fa.labels[*x] != fb.labels[*y])
                .count() as f64;
            let cost = relabels * c.relabel
                + (fa.labels.len() - pairs.len()) as f64 * c.delete
                + (fb.labels.len() - pairs.len()) as f64 * c.insert;
            if cost < *best {
                *best = cost;
            }
            return;
        }
        rec(i + 1, j0, fa, fb, pairs, c, best, anc);
        for j in j0..fb.labels.len() {
            let ok = pairs.iter().all(|&(x, y)| anc(fa, x, i) == anc(fb, y, j));
            if ok {
                pairs.push((i, j));
                rec(i + 1, j + 1, fa, fb, pairs, c, best, anc);
                pairs.pop();
            }
        }
    }
    rec(0, 0, &fa, &fb, &mut pairs, c, &mut best, &anc);
    best
}

// ---------------------------------------------------------------- voting

/// Decision from raw counts: positive weight against total weight, and the
/// number of distinct members voting 0.
pub fn oracle_vote(weights: &[u32], votes: &[bool], theta: Option<f64>) -> bool {
    let total: u32 = weights.iter().sum();
    let yes: u32 = weights
        .iter()
        .zip(votes)
        .filter(|(_, v)| **v)
        .map(|(w, _)| *w)
        .sum();
    match theta {
        Some(t) => f64::from(yes) >= t * f64::from(total),
        None => votes.iter().filter(|v| !**v).count() <= 1,
    }
}

// ---------------------------------------------------------------- stats

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}
