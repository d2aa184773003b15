//! Spanning two-block cycle search.
//!
//! [`find_two_block`] grows the short block `a_1 -> ... -> a_p` along
//! out-arcs, then grows the long block `a_1 -> b_1 -> ... -> b_m` out of the
//! same start, closing with `b_m -> a_p`. Both frontiers share one visited
//! mask. [`spanning_contains_oracle`] is an unrelated brute-force embedding
//! test kept for cross-validation.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::digraph::{bit, mask_vertices, Digraph, Vertex};
use crate::iso::canonical;
use crate::patterns::WitnessCycle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("block parameter p={p} is outside 2..={n}")]
    Range { n: usize, p: usize },
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("oracle refuses n={n} (limit {limit})")]
    Size { n: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchBudget {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn nodes(limit: u64) -> Self {
        SearchBudget {
            node_limit: Some(limit),
            time_limit: None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.node_limit.is_none() && self.time_limit.is_none()
    }

    /// Whether a result computed under `self` is also valid under `other`:
    /// true when `self` is at least as generous in every dimension.
    pub fn covers(&self, other: &SearchBudget) -> bool {
        let ge = |a: Option<u64>, b: Option<u64>| match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x >= y,
        };
        ge(self.node_limit, other.node_limit)
            && ge(
                self.time_limit.map(|t| t.as_millis() as u64),
                other.time_limit.map(|t| t.as_millis() as u64),
            )
    }
}

/// Reusable searcher for one host: caches the start vertices worth trying
/// (one per automorphism orbit found by the canonical labelling search).
pub struct TwoBlockSearcher<'a> {
    d: &'a Digraph,
    starts: Vec<Vertex>,
    bipartite_balanced: Option<bool>,
}

impl<'a> TwoBlockSearcher<'a> {
    pub fn new(d: &'a Digraph) -> Self {
        let reps = canonical(d).orbit_representatives();
        let starts = d.vertices().filter(|&v| reps[v - 1] == v).collect();
        let bipartite_balanced = match d.parts() {
            Some((x, y)) if d.is_bipartite_tournament() == Ok(true) => Some(x.len() == y.len()),
            _ => None,
        };
        TwoBlockSearcher {
            d,
            starts,
            bipartite_balanced,
        }
    }

    /// Start vertices tried as `a_1`, ascending.
    pub fn starts(&self) -> &[Vertex] {
        &self.starts
    }

    pub fn find(&self, p: usize, budget: &SearchBudget) -> Result<Option<WitnessCycle>, SearchError> {
        let n = self.d.n();
        if n < 3 || !(2..=n).contains(&p) {
            return Err(SearchError::Range { n, p });
        }
        // Arcs of a bipartite tournament alternate sides, so a spanning
        // cycle needs equal sides.
        if self.bipartite_balanced == Some(false) {
            return Ok(None);
        }
        let mut dfs = Dfs {
            d: self.d,
            n,
            p,
            seq: vec![0; n],
            visited: 0,
            nodes: 0,
            budget: *budget,
            started: Instant::now(),
        };
        for &a1 in &self.starts {
            dfs.seq[0] = a1;
            dfs.visited = bit(a1);
            if dfs.short_block(1)? {
                return Ok(Some(WitnessCycle::new(dfs.seq, p)));
            }
        }
        Ok(None)
    }
}

struct Dfs<'a> {
    d: &'a Digraph,
    n: usize,
    p: usize,
    seq: Vec<Vertex>,
    visited: u64,
    nodes: u64,
    budget: SearchBudget,
    started: Instant,
}

impl Dfs<'_> {
    fn tick(&mut self) -> Result<(), SearchError> {
        self.nodes += 1;
        if let Some(limit) = self.budget.node_limit {
            if self.nodes > limit {
                return Err(SearchError::BudgetExceeded { nodes: self.nodes });
            }
        }
        if let Some(limit) = self.budget.time_limit {
            if self.nodes.is_multiple_of(1024) && self.started.elapsed() > limit {
                return Err(SearchError::BudgetExceeded { nodes: self.nodes });
            }
        }
        Ok(())
    }

    /// Fill `seq[i]` with `a_{i+1}`.
    fn short_block(&mut self, i: usize) -> Result<bool, SearchError> {
        if i == self.p {
            return self.close_short_block();
        }
        let prev = self.seq[i - 1];
        let a1 = self.seq[0];
        let m = self.n - self.p;
        let mut cands = self.d.out_mask(prev) & !self.visited;
        while cands != 0 {
            let v = cands.trailing_zeros() as usize + 1;
            cands &= cands - 1;
            self.tick()?;
            if i == self.p - 1 {
                // a_p closes both blocks: it needs a second in-arc from b_m,
                // or directly from a_1 when the long block is empty.
                let rest = self.d.full_mask() & !self.visited & !bit(v);
                let ok = if m == 0 {
                    self.d.has_arc(a1, v)
                } else {
                    self.d.in_mask(v) & rest != 0 && self.d.out_mask(a1) & rest != 0
                };
                if !ok {
                    continue;
                }
            }
            self.seq[i] = v;
            self.visited |= bit(v);
            if self.short_block(i + 1)? {
                return Ok(true);
            }
            self.visited &= !bit(v);
        }
        Ok(false)
    }

    fn close_short_block(&mut self) -> Result<bool, SearchError> {
        if self.p == self.n {
            return Ok(self.d.has_arc(self.seq[0], self.seq[self.p - 1]));
        }
        let a1 = self.seq[0];
        self.long_block(a1, self.n - 1)
    }

    /// Extend the long block from `cur`, writing the next `b` into `seq[pos]`
    /// (positions run from `n - 1` down to `p`).
    fn long_block(&mut self, cur: Vertex, pos: usize) -> Result<bool, SearchError> {
        let ap = self.seq[self.p - 1];
        if pos < self.p {
            return Ok(self.d.has_arc(cur, ap));
        }
        let unvisited = self.d.full_mask() & !self.visited;
        if !self.feasible(cur, ap, unvisited) {
            return Ok(false);
        }
        let mut cands = self.d.out_mask(cur) & unvisited;
        while cands != 0 {
            let v = cands.trailing_zeros() as usize + 1;
            cands &= cands - 1;
            self.tick()?;
            self.seq[pos] = v;
            self.visited |= bit(v);
            if self.long_block(v, pos - 1)? {
                return Ok(true);
            }
            self.visited &= !bit(v);
        }
        Ok(false)
    }

    /// A path `cur -> (all of rest) -> ap` needs at most one entry point with
    /// no predecessor inside `rest` (and it must follow `cur`), and at most
    /// one exit with no successor inside `rest` (and it must precede `ap`).
    fn feasible(&self, cur: Vertex, ap: Vertex, rest: u64) -> bool {
        let mut entries = 0;
        let mut exits = 0;
        for v in mask_vertices(rest) {
            let ins = self.d.in_mask(v);
            let outs = self.d.out_mask(v);
            if ins & rest == 0 {
                if ins & bit(cur) == 0 {
                    return false;
                }
                entries += 1;
            }
            if outs & rest == 0 {
                if outs & bit(ap) == 0 {
                    return false;
                }
                exits += 1;
            }
            if entries > 1 || exits > 1 {
                return false;
            }
        }
        true
    }
}

/// Search `d` for a spanning `D(n, p)`. `Ok(None)` means the search tree
/// was exhausted; a budget stop is the distinct error `BudgetExceeded`.
pub fn find_two_block(d: &Digraph, p: usize, budget: &SearchBudget) -> Result<Option<WitnessCycle>, SearchError> {
    TwoBlockSearcher::new(d).find(p, budget)
}

/// Which block parameters a host admits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockProfile {
    pub n: usize,
    pub present: Vec<usize>,
    pub missing: Vec<usize>,
    /// Parameters whose search hit the budget.
    pub undecided: Vec<usize>,
    pub witnesses: BTreeMap<usize, WitnessCycle>,
}

impl BlockProfile {
    pub fn is_complete(&self) -> bool {
        self.undecided.is_empty()
    }
}

/// Run [`find_two_block`] for `p <= n/2 + 1` and mirror each answer to its
/// partner `n - p + 2`.
pub fn find_all_p(d: &Digraph, budget: &SearchBudget) -> Result<BlockProfile, SearchError> {
    let n = d.n();
    if n < 3 {
        return Err(SearchError::Range { n, p: 2 });
    }
    let searcher = TwoBlockSearcher::new(d);
    let mut profile = BlockProfile {
        n,
        ..Default::default()
    };
    let mut outcome = BTreeMap::new();
    for p in 2..=n / 2 + 1 {
        let partner = n - p + 2;
        match searcher.find(p, budget) {
            Ok(Some(w)) => {
                outcome.insert(partner, Some(Some(w.to_partner())));
                outcome.insert(p, Some(Some(w)));
            }
            Ok(None) => {
                outcome.insert(partner, Some(None));
                outcome.insert(p, Some(None));
            }
            Err(SearchError::BudgetExceeded { .. }) => {
                outcome.insert(partner, None);
                outcome.insert(p, None);
            }
            Err(e) => return Err(e),
        }
    }
    for (p, res) in outcome {
        match res {
            Some(Some(w)) => {
                profile.present.push(p);
                profile.witnesses.insert(p, w);
            }
            Some(None) => profile.missing.push(p),
            None => profile.undecided.push(p),
        }
    }
    Ok(profile)
}

/// Check a witness against a host. Structural defects (wrong length,
/// repeated or foreign vertices, `p` out of range) are errors, not `false`.
pub fn verify_witness(d: &Digraph, w: &WitnessCycle) -> Result<bool, SearchError> {
    let n = d.n();
    if w.seq.len() != n {
        return Err(SearchError::MalformedWitness(format!(
            "sequence has {} vertices, host has {n}",
            w.seq.len()
        )));
    }
    if n < 3 || !(2..=n).contains(&w.p) {
        return Err(SearchError::MalformedWitness(format!("p={} outside 2..={n}", w.p)));
    }
    let mut seen = 0u64;
    for &v in &w.seq {
        if v == 0 || v > n {
            return Err(SearchError::MalformedWitness(format!("vertex {v} is not in the host")));
        }
        if seen & bit(v) != 0 {
            return Err(SearchError::MalformedWitness(format!("vertex {v} repeats")));
        }
        seen |= bit(v);
    }
    Ok(w.required_arcs().into_iter().all(|(u, v)| d.has_arc(u, v)))
}

/// Default vertex limit for [`spanning_contains_oracle`].
pub const ORACLE_LIMIT: usize = 12;

/// Whether some bijection maps every arc of `pattern` onto an arc of `d`,
/// by exhaustive assignment with degree pruning.
pub fn spanning_contains_oracle(d: &Digraph, pattern: &Digraph) -> Result<bool, SearchError> {
    spanning_contains_oracle_with_limit(d, pattern, ORACLE_LIMIT)
}

pub fn spanning_contains_oracle_with_limit(d: &Digraph, pattern: &Digraph, limit: usize) -> Result<bool, SearchError> {
    let n = d.n();
    if n > limit {
        return Err(SearchError::Size { n, limit });
    }
    if pattern.n() != n {
        return Ok(false);
    }
    let mut image = vec![0usize; n + 1];
    Ok(embed(d, pattern, 1, &mut image, 0))
}

fn embed(d: &Digraph, pat: &Digraph, u: Vertex, image: &mut [usize], used: u64) -> bool {
    let n = d.n();
    if u > n {
        return true;
    }
    for h in 1..=n {
        if used & bit(h) != 0 || d.out_degree(h) < pat.out_degree(u) || d.in_degree(h) < pat.in_degree(u) {
            continue;
        }
        let consistent = (1..u).all(|prev| {
            (!pat.has_arc(prev, u) || d.has_arc(image[prev], h)) && (!pat.has_arc(u, prev) || d.has_arc(h, image[prev]))
        });
        if !consistent {
            continue;
        }
        image[u] = h;
        if embed(d, pat, u + 1, image, used | bit(h)) {
            return true;
        }
    }
    false
}
