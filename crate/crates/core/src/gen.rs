//! Decomposable regular bipartite tournaments.
//!
//! A decomposable 1-regular bipartite tournament is a directed 4-cycle. A
//! decomposable `k`-regular one is a decomposable `(k-1)`-regular host `H`
//! plus a new 4-cycle `c1 -> c2 -> c3 -> c4 -> c1`, with every new cross
//! pair oriented so that the union is `k`-regular. The first part of `H`
//! faces `{c1, c3}` and the second faces `{c2, c4}`; each host vertex then
//! dominates exactly one vertex of the pair it faces, and exactly `k - 1`
//! vertices of each host part dominate `c1` (resp. `c2`).

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::digraph::{bit, mask_vertices, Digraph, GraphError, Part, Vertex, MAX_VERTICES};
use crate::iso::{canonical, canonical_form, CanonicalForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("regularity k={0} is out of range")]
    Range(usize),
    #[error("bad extension choice: {0}")]
    BadChoice(String),
    #[error("input is not a decomposable host: {0}")]
    NotDecomposableInput(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Quads witnessing the recursive structure, innermost first. Each quad is
/// stored in cycle order `q[0] -> q[1] -> q[2] -> q[3] -> q[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decomposition {
    quads: Vec<[Vertex; 4]>,
}

impl Decomposition {
    pub fn new(quads: Vec<[Vertex; 4]>) -> Self {
        Decomposition { quads }
    }

    pub fn quads(&self) -> &[[Vertex; 4]] {
        &self.quads
    }

    pub fn k(&self) -> usize {
        self.quads.len()
    }

    pub fn last(&self) -> Option<&[Vertex; 4]> {
        self.quads.last()
    }

    /// Decomposition with the outermost quad removed.
    pub fn inner(&self) -> Decomposition {
        Decomposition {
            quads: self.quads[..self.quads.len().saturating_sub(1)].to_vec(),
        }
    }

    pub fn with_outer(mut self, quad: [Vertex; 4]) -> Self {
        self.quads.push(quad);
        self
    }

    /// Relabel every vertex through `map[v - 1]`.
    pub fn mapped(&self, map: &[Vertex]) -> Decomposition {
        Decomposition {
            quads: self.quads.iter().map(|q| q.map(|v| map[v - 1])).collect(),
        }
    }

    /// Check every structural invariant against `d`: the quads partition
    /// the vertices, each induces a 4-cycle in the stored order, and every
    /// prefix union induces a `j`-regular bipartite tournament in which each
    /// earlier vertex has one out- and one in-neighbour inside quad `j`.
    pub fn validate(&self, d: &Digraph) -> Result<(), String> {
        let mut seen = 0u64;
        for q in &self.quads {
            for &v in q {
                if v == 0 || v > d.n() {
                    return Err(format!("vertex {v} out of range"));
                }
                if seen & bit(v) != 0 {
                    return Err(format!("vertex {v} appears in two quads"));
                }
                seen |= bit(v);
            }
        }
        if seen != d.full_mask() {
            return Err("quads do not cover every vertex".into());
        }
        let mut prefix = 0u64;
        for (j, q) in self.quads.iter().enumerate() {
            if !induces_cycle_in_order(d, q) {
                return Err(format!("quad {q:?} is not an induced 4-cycle in that order"));
            }
            let qmask = q.iter().fold(0u64, |m, &v| m | bit(v));
            for v in mask_vertices(prefix) {
                if (d.out_mask(v) & qmask).count_ones() != 1 || (d.in_mask(v) & qmask).count_ones() != 1 {
                    return Err(format!("vertex {v} is not balanced against quad {q:?}"));
                }
            }
            prefix |= qmask;
            let keep: Vec<Vertex> = mask_vertices(prefix).collect();
            let (sub, _) = d.induced_subdigraph(&keep).map_err(|e| e.to_string())?;
            if sub.is_bipartite_tournament() != Ok(true) || !sub.is_k_regular(j + 1) {
                return Err(format!(
                    "prefix {} is not a {}-regular bipartite tournament",
                    j + 1,
                    j + 1
                ));
            }
        }
        Ok(())
    }
}

fn induces_cycle_in_order(d: &Digraph, q: &[Vertex; 4]) -> bool {
    let qmask = q.iter().fold(0u64, |m, &v| m | bit(v));
    (0..4).all(|i| {
        let (u, v) = (q[i], q[(i + 1) % 4]);
        d.out_mask(u) & qmask == bit(v)
    })
}

/// Cycle order of a 4-vertex set inducing a directed 4-cycle, starting at
/// its least label.
pub(crate) fn quad_cycle_order(d: &Digraph, qmask: u64) -> Option<[Vertex; 4]> {
    let start = qmask.trailing_zeros() as usize + 1;
    let mut q = [start; 4];
    for i in 1..4 {
        let next = d.out_mask(q[i - 1]) & qmask;
        if next.count_ones() != 1 {
            return None;
        }
        q[i] = next.trailing_zeros() as usize + 1;
    }
    induces_cycle_in_order(d, &q).then_some(q)
}

/// Which host vertices dominate the new cycle's entry points.
///
/// `to_first` holds the members of the host's first part that dominate
/// `c1` (and are therefore dominated by `c3`); `to_second` holds the members
/// of the second part that dominate `c2` (and are dominated by `c4`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionChoice {
    pub to_first: BTreeSet<Vertex>,
    pub to_second: BTreeSet<Vertex>,
}

impl ExtensionChoice {
    pub fn new<I: IntoIterator<Item = Vertex>, J: IntoIterator<Item = Vertex>>(first: I, second: J) -> Self {
        ExtensionChoice {
            to_first: first.into_iter().collect(),
            to_second: second.into_iter().collect(),
        }
    }
}

/// The directed 4-cycle `1 -> 2 -> 3 -> 4 -> 1` with parts `{1,3}`, `{2,4}`.
pub fn c4() -> (Digraph, Decomposition) {
    let d = Digraph::new(4, &[(1, 2), (2, 3), (3, 4), (4, 1)], Some((vec![1, 3], vec![2, 4]))).expect("static arcs");
    (d, Decomposition::new(vec![[1, 2, 3, 4]]))
}

/// The exempted host on `4k` vertices: the Hamiltonian cycle
/// `(1, 2, ..., 4k, 1)` plus arcs `(4m + i - 1, i)` and `(i, 4m + i + 1)` for
/// every `i` and `1 <= m <= k - 1`, indices mod `4k`. Parts are the odd and
/// the even labels.
pub fn exceptional(k: usize) -> Result<Digraph, GenError> {
    if k == 0 || 4 * k > MAX_VERTICES {
        return Err(GenError::Range(k));
    }
    let n = 4 * k;
    let wrap = |x: usize| (x - 1) % n + 1;
    let mut arcs = BTreeSet::new();
    for i in 1..=n {
        arcs.insert((i, wrap(i + 1)));
        for m in 1..k {
            arcs.insert((wrap(4 * m + i - 1), i));
            arcs.insert((i, wrap(4 * m + i + 1)));
        }
    }
    let arcs: Vec<_> = arcs.into_iter().collect();
    let odd: Vec<_> = (1..=n).step_by(2).collect();
    let even: Vec<_> = (2..=n).step_by(2).collect();
    Ok(Digraph::new(n, &arcs, Some((odd, even)))?)
}

/// Attach a new 4-cycle to a decomposable host. The new vertices are
/// `n+1 .. n+4` in cycle order.
pub fn extend(
    host: &Digraph,
    dec: &Decomposition,
    choice: &ExtensionChoice,
) -> Result<(Digraph, Decomposition), GenError> {
    let (x, y) = host
        .parts()
        .ok_or_else(|| GenError::NotDecomposableInput("no declared bipartition".into()))?;
    dec.validate(host).map_err(GenError::NotDecomposableInput)?;
    let j = dec.k();
    if 4 * (j + 1) > MAX_VERTICES {
        return Err(GenError::Range(j + 1));
    }
    for (name, set, part) in [("first", &choice.to_first, x), ("second", &choice.to_second, y)] {
        if set.len() != j {
            return Err(GenError::BadChoice(format!(
                "{name} set has {} vertices, expected {j}",
                set.len()
            )));
        }
        if let Some(v) = set.iter().find(|&&v| !part.contains(v)) {
            return Err(GenError::BadChoice(format!("vertex {v} is not in the {name} part")));
        }
    }
    let first = Part::from_vertices(choice.to_first.iter().copied()).mask();
    let second = Part::from_vertices(choice.to_second.iter().copied()).mask();
    Ok(extend_unchecked(host, dec, first, second))
}

fn extend_unchecked(host: &Digraph, dec: &Decomposition, first: u64, second: u64) -> (Digraph, Decomposition) {
    let (x, y) = host.parts().expect("checked by caller");
    let n = host.n();
    let [c1, c2, c3, c4] = [n + 1, n + 2, n + 3, n + 4];
    let mut out: Vec<u64> = host.vertices().map(|v| host.out_mask(v)).collect();
    out.extend([bit(c2), bit(c3), bit(c4), bit(c1)]);
    for v in x.members() {
        if first & bit(v) != 0 {
            out[v - 1] |= bit(c1);
            out[c3 - 1] |= bit(v);
        } else {
            out[c1 - 1] |= bit(v);
            out[v - 1] |= bit(c3);
        }
    }
    for v in y.members() {
        if second & bit(v) != 0 {
            out[v - 1] |= bit(c2);
            out[c4 - 1] |= bit(v);
        } else {
            out[c2 - 1] |= bit(v);
            out[v - 1] |= bit(c4);
        }
    }
    let parts = (
        Part::from_mask(x.mask() | bit(c2) | bit(c4)),
        Part::from_mask(y.mask() | bit(c1) | bit(c3)),
    );
    (
        Digraph::from_masks(out, Some(parts)),
        dec.clone().with_outer([c1, c2, c3, c4]),
    )
}

/// All `r`-subsets of `items`, as bit masks, in lexicographic order.
fn subset_masks(items: &[Vertex], r: usize) -> Vec<u64> {
    fn go(items: &[Vertex], r: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
        if r == 0 {
            out.push(acc);
            return;
        }
        for i in start..=items.len() - r {
            go(items, r - 1, i + 1, acc | bit(items[i]), out);
        }
    }
    let mut out = Vec::new();
    if r <= items.len() {
        go(items, r, 0, 0, &mut out);
    }
    out
}

/// Every valid extension choice for a host with the given decomposition
/// depth, in lexicographic order.
pub fn extension_choices(host: &Digraph) -> Vec<ExtensionChoice> {
    let Some((x, y)) = host.parts() else {
        return Vec::new();
    };
    let j = x.len() / 2;
    let xs: Vec<_> = x.members().collect();
    let ys: Vec<_> = y.members().collect();
    let mut out = Vec::new();
    for a in subset_masks(&xs, j) {
        for b in subset_masks(&ys, j) {
            out.push(ExtensionChoice::new(mask_vertices(a), mask_vertices(b)));
        }
    }
    out
}

fn binomial(n: usize, r: usize) -> u128 {
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    /// Largest regularity accepted.
    pub max_k: usize,
    /// Largest number of hosts materialised at any level.
    pub max_hosts: u128,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            max_k: 5,
            max_hosts: 2_000_000,
        }
    }
}

pub fn enumerate_decomposable(k: usize, up_to_iso: bool) -> Result<Vec<(Digraph, Decomposition)>, GenError> {
    enumerate_decomposable_with(k, up_to_iso, EnumerateOptions::default())
}

/// Every decomposable `k`-regular bipartite tournament reachable by the
/// inductive construction. With `up_to_iso`, each level is reduced to one
/// representative per isomorphism class (first in generation order).
pub fn enumerate_decomposable_with(
    k: usize,
    up_to_iso: bool,
    opts: EnumerateOptions,
) -> Result<Vec<(Digraph, Decomposition)>, GenError> {
    if k == 0 || 4 * k > MAX_VERTICES {
        return Err(GenError::Range(k));
    }
    if k > opts.max_k {
        return Err(GenError::BudgetExceeded(format!(
            "k={k} exceeds the configured limit {}",
            opts.max_k
        )));
    }
    let mut level = vec![c4()];
    for j in 1..k {
        let per_parent = binomial(2 * j, j).pow(2);
        let total = per_parent * level.len() as u128;
        if total > opts.max_hosts {
            return Err(GenError::BudgetExceeded(format!(
                "level {} would materialise {total} hosts (limit {})",
                j + 1,
                opts.max_hosts
            )));
        }
        let tasks: Vec<(usize, u64, u64)> = level
            .iter()
            .enumerate()
            .flat_map(|(i, (h, _))| {
                let (x, y) = h.parts().expect("generated hosts carry parts");
                let xs: Vec<_> = x.members().collect();
                let ys: Vec<_> = y.members().collect();
                let ym = subset_masks(&ys, j);
                subset_masks(&xs, j)
                    .into_iter()
                    .flat_map(move |a| ym.clone().into_iter().map(move |b| (i, a, b)))
            })
            .collect();
        let next: Vec<(Digraph, Decomposition)> = tasks
            .par_iter()
            .map(|&(i, a, b)| extend_unchecked(&level[i].0, &level[i].1, a, b))
            .collect();
        level = if up_to_iso { dedupe(next) } else { next };
    }
    Ok(level)
}

/// Keep the first host of each isomorphism class, preserving order.
pub fn dedupe(hosts: Vec<(Digraph, Decomposition)>) -> Vec<(Digraph, Decomposition)> {
    let forms: Vec<CanonicalForm> = hosts.par_iter().map(|(h, _)| canonical_form(h)).collect();
    let mut seen = std::collections::HashSet::new();
    hosts
        .into_iter()
        .zip(forms)
        .filter_map(|(h, f)| seen.insert(f).then_some(h))
        .collect()
}

/// One host drawn by choosing a uniformly random extension at every level.
pub fn sample_decomposable(k: usize, seed: u64) -> Result<(Digraph, Decomposition), GenError> {
    if k == 0 || 4 * k > MAX_VERTICES {
        return Err(GenError::Range(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut host, mut dec) = c4();
    for j in 1..k {
        let (x, y) = host.parts().expect("generated hosts carry parts");
        let xs: Vec<_> = x.members().collect();
        let ys: Vec<_> = y.members().collect();
        let a = xs.choose_multiple(&mut rng, j).fold(0u64, |m, &v| m | bit(v));
        let b = ys.choose_multiple(&mut rng, j).fold(0u64, |m, &v| m | bit(v));
        (host, dec) = extend_unchecked(&host, &dec, a, b);
    }
    Ok((host, dec))
}

/// Memo for [`is_decomposable`], keyed by canonical form. Stored
/// decompositions are expressed in canonical labels.
#[derive(Default)]
pub struct DecompositionCache {
    memo: Mutex<HashMap<CanonicalForm, Option<Decomposition>>>,
}

impl DecompositionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Find a decomposition of `d`, if one exists. `d` must be a regular
    /// bipartite tournament (parts are inferred when undeclared).
    pub fn decompose(&self, d: &Digraph) -> Option<Decomposition> {
        let d = match d.parts() {
            Some(_) => d.clone(),
            None => d.with_inferred_parts()?,
        };
        if d.is_bipartite_tournament() != Ok(true) {
            return None;
        }
        let k = d.regularity()?;
        if k == 0 || d.n() != 4 * k {
            return None;
        }
        if k == 1 {
            return quad_cycle_order(&d, d.full_mask()).map(|q| Decomposition::new(vec![q]));
        }
        let canon = canonical(&d);
        if let Some(hit) = self.memo.lock().unwrap().get(&canon.form) {
            let mut back = vec![0; d.n()];
            for (v, &c) in canon.labeling.iter().enumerate() {
                back[c - 1] = v + 1;
            }
            return hit.as_ref().map(|dec| dec.mapped(&back));
        }
        let found = self.search(&d);
        let stored = found.as_ref().map(|dec| dec.mapped(&canon.labeling));
        self.memo.lock().unwrap().insert(canon.form, stored);
        found
    }

    fn search(&self, d: &Digraph) -> Option<Decomposition> {
        let (x, y) = d.parts()?;
        let xs: Vec<_> = x.members().collect();
        let ys: Vec<_> = y.members().collect();
        let xpairs = subset_masks(&xs, 2);
        let ypairs = subset_masks(&ys, 2);
        for &a in &xpairs {
            for &b in &ypairs {
                let qmask = a | b;
                let Some(quad) = quad_cycle_order(d, qmask) else {
                    continue;
                };
                if !balanced_against(d, qmask) {
                    continue;
                }
                let keep: Vec<Vertex> = mask_vertices(d.full_mask() & !qmask).collect();
                let (rest, labels) = d.induced_subdigraph(&keep).ok()?;
                if let Some(inner) = self.decompose(&rest) {
                    return Some(inner.mapped(&labels).with_outer(quad));
                }
            }
        }
        None
    }
}

/// Whether every vertex outside `qmask` has exactly one out- and one
/// in-neighbour inside it.
pub(crate) fn balanced_against(d: &Digraph, qmask: u64) -> bool {
    mask_vertices(d.full_mask() & !qmask)
        .all(|v| (d.out_mask(v) & qmask).count_ones() == 1 && (d.in_mask(v) & qmask).count_ones() == 1)
}

/// Search for a decomposition with a fresh memo.
pub fn is_decomposable(d: &Digraph) -> Option<Decomposition> {
    DecompositionCache::new().decompose(d)
}
