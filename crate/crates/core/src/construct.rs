//! Constructive witnesses for decomposable hosts.
//!
//! [`insert_c4`] splices a balanced 4-cycle into the long block of a witness
//! on the remaining vertices. [`choose_swap`] re-decomposes a host whose
//! inner part is the exceptional digraph, so that the new inner part is not.
//! [`build_witness`] drives both recursively down to 12-vertex hosts, where
//! a direct search takes over.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::digraph::{bit, mask_vertices, Digraph, Vertex};
use crate::gen::{balanced_against, exceptional, quad_cycle_order, Decomposition, DecompositionCache, GenError};
use crate::iso::{canonical_form, find_isomorphism, CanonicalForm};
use crate::patterns::WitnessCycle;
use crate::search::{find_two_block, verify_witness, SearchBudget, SearchError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("bad quad: {0}")]
    BadQuad(String),
    #[error("bad inner witness: {0}")]
    BadWitness(String),
    #[error("long block too short: inner n={inner_n}, p={p} leaves fewer than 3 b-vertices")]
    ShortBlock { inner_n: usize, p: usize },
    #[error("inner host is not isomorphic to the exceptional digraph")]
    NotExceptionalInner,
    #[error("host is isomorphic to the exceptional digraph")]
    ExceptionalWhole,
    #[error("no swap quad yields a decomposable non-exceptional inner host: {0}")]
    NoSwapFound(String),
    #[error("host is isomorphic to the exceptional digraph (k={0})")]
    ExceptionalHost(usize),
    #[error("host is not a decomposable regular bipartite tournament: {0}")]
    NotDecomposable(String),
    #[error("block parameter p={p} is outside 2..={n}, or regularity is below 3")]
    Range { n: usize, p: usize },
    #[error("direct search found no D({n},{p}) in a non-exceptional host")]
    SearchFailed { n: usize, p: usize },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

impl ConstructError {
    /// Failures that refute a claimed existence statement rather than
    /// reflect a malformed input or a recoverable structural mismatch.
    pub fn is_counterexample(&self) -> bool {
        matches!(
            self,
            ConstructError::NoSwapFound(_) | ConstructError::SearchFailed { .. }
        )
    }
}

/// Which splice [`insert_c4`] used. With the cycle relabelled so that
/// `a_1 -> c1` and `b_1, b_2, b_3` the first long-block vertices:
///
/// * `B1Forward`: `c4 -> b_1`; run `a_1, c1, c2, c3, c4, b_1`.
/// * `B2Forward`: `b_1 -> c4`, `c3 -> b_2`; run `a_1, b_1, c4, c1, c2, c3, b_2`.
/// * `B3Forward`: `b_2 -> c3`, `c2 -> b_3`; run `a_1, b_1, b_2, c3, c4, c1, c2, b_3`.
/// * `B3Backward`: `b_3 -> c2`; run `a_1, c1, c2, b_1, b_2, c3, c4, b_3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InsertionCase {
    B1Forward,
    B2Forward,
    B3Forward,
    B3Backward,
}

impl InsertionCase {
    pub const ALL: [InsertionCase; 4] = [
        InsertionCase::B1Forward,
        InsertionCase::B2Forward,
        InsertionCase::B3Forward,
        InsertionCase::B3Backward,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            InsertionCase::B1Forward => "B1_FORWARD",
            InsertionCase::B2Forward => "B2_FORWARD",
            InsertionCase::B3Forward => "B3_FORWARD",
            InsertionCase::B3Backward => "B3_BACKWARD",
        }
    }
}

impl fmt::Display for InsertionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Rotate a quad's cycle order so it starts at `c1`, the out-neighbour of
/// `a1` inside it.
fn rotate_to_entry(host: &Digraph, quad: [Vertex; 4], a1: Vertex) -> Option<[Vertex; 4]> {
    let start = quad.iter().position(|&c| host.has_arc(a1, c))?;
    Some(std::array::from_fn(|i| quad[(start + i) % 4]))
}

/// Check `quad` against `host` and return its cycle order.
fn checked_quad(host: &Digraph, quad: &[Vertex; 4]) -> Result<([Vertex; 4], u64), ConstructError> {
    if host.is_bipartite_tournament() != Ok(true) {
        return Err(ConstructError::BadQuad("host is not a bipartite tournament".into()));
    }
    let mut qmask = 0u64;
    for &v in quad {
        if v == 0 || v > host.n() || qmask & bit(v) != 0 {
            return Err(ConstructError::BadQuad(format!(
                "{quad:?} is not four distinct host vertices"
            )));
        }
        qmask |= bit(v);
    }
    let order = quad_cycle_order(host, qmask)
        .ok_or_else(|| ConstructError::BadQuad(format!("{quad:?} does not induce a 4-cycle")))?;
    if !balanced_against(host, qmask) {
        return Err(ConstructError::BadQuad(format!(
            "some vertex outside {quad:?} lacks exactly one out- and one in-neighbour in it"
        )));
    }
    Ok((order, qmask))
}

/// Splice the 4-cycle on `quad` into `w`, a witness on the vertices of
/// `host` outside `quad` (given in `host` labels). The result keeps `p`,
/// `a_1` and `a_p`, and covers all of `host`.
pub fn insert_c4(
    host: &Digraph,
    quad: [Vertex; 4],
    w: &WitnessCycle,
) -> Result<(WitnessCycle, InsertionCase), ConstructError> {
    let (order, qmask) = checked_quad(host, &quad)?;
    let inner_n = host.n() - 4;
    if w.seq.len() != inner_n {
        return Err(ConstructError::BadWitness(format!(
            "witness has {} vertices, expected {inner_n}",
            w.seq.len()
        )));
    }
    let mut seen = 0u64;
    for &v in &w.seq {
        if v == 0 || v > host.n() || (qmask | seen) & bit(v) != 0 {
            return Err(ConstructError::BadWitness(format!(
                "vertex {v} is repeated, foreign, or in the quad"
            )));
        }
        seen |= bit(v);
    }
    if !(2..=inner_n).contains(&w.p) || !w.required_arcs().iter().all(|&(u, v)| host.has_arc(u, v)) {
        return Err(ConstructError::BadWitness("required arcs are missing".into()));
    }
    if inner_n - w.p < 3 {
        return Err(ConstructError::ShortBlock { inner_n, p: w.p });
    }

    let a = w.short_block().to_vec();
    let b = w.long_block();
    let a1 = a[0];
    let [c1, c2, c3, c4] = rotate_to_entry(host, order, a1)
        .ok_or_else(|| ConstructError::BadQuad("a_1 has no out-neighbour in the quad".into()))?;
    let (b1, b2, b3) = (b[0], b[1], b[2]);

    // Balance: b1 -> c4 forces c2 -> b1, and b3 -> c2 forces c4 -> b3.
    let case = match (host.has_arc(c4, b1), host.has_arc(c3, b2), host.has_arc(c2, b3)) {
        (true, _, _) => InsertionCase::B1Forward,
        (false, true, _) => InsertionCase::B2Forward,
        (false, false, true) => InsertionCase::B3Forward,
        (false, false, false) => InsertionCase::B3Backward,
    };
    let head: Vec<Vertex> = match case {
        InsertionCase::B1Forward => vec![c1, c2, c3, c4, b1],
        InsertionCase::B2Forward => vec![b1, c4, c1, c2, c3, b2],
        InsertionCase::B3Forward => vec![b1, b2, c3, c4, c1, c2, b3],
        InsertionCase::B3Backward => vec![c1, c2, b1, b2, c3, c4, b3],
    };
    let consumed = head.len() - 4;
    let mut long = head;
    long.extend_from_slice(&b[consumed..]);
    let out = WitnessCycle::from_blocks(&a, &long);
    debug_assert_eq!(verify_witness(host, &out), Ok(true), "splice {case} broke the witness");
    Ok((out, case))
}

/// How a swap quad was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapRoute {
    /// `{s, s+2, t, t+2}` from the first choice splits.
    Primary,
    /// `{t-1, s+1, t+1, s+3}`.
    Shifted,
    /// `{s, s+2, t, t+2}` for some later pair of choice splits.
    Exhaustive,
    /// Any balanced 4-cycle of the inner host.
    AnyQuad,
}

#[derive(Clone, Debug)]
pub struct Swap {
    pub quad: [Vertex; 4],
    pub route: SwapRoute,
    /// Decomposition of the host ending in `quad`.
    pub decomposition: Decomposition,
}

/// Shared state for construction: decomposition memo and exceptional forms.
pub struct Constructor {
    cache: DecompositionCache,
    exceptional_forms: Mutex<HashMap<usize, CanonicalForm>>,
    fallback_budget: SearchBudget,
    swaps: bool,
}

impl Default for Constructor {
    fn default() -> Self {
        Constructor {
            cache: DecompositionCache::new(),
            exceptional_forms: Mutex::new(HashMap::new()),
            fallback_budget: SearchBudget::unbounded(),
            swaps: true,
        }
    }
}

/// One line of a construction trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceCase {
    Insert(InsertionCase),
    Swap,
    Base,
    Fallback,
}

impl fmt::Display for TraceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceCase::Insert(c) => c.fmt(f),
            TraceCase::Swap => f.write_str("SWAP"),
            TraceCase::Base => f.write_str("BASE"),
            TraceCase::Fallback => f.write_str("FALLBACK"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceLevel {
    pub k: usize,
    pub case: TraceCase,
}

impl fmt::Display for TraceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level k={} case={}", self.k, self.case)
    }
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub witness: WitnessCycle,
    /// Innermost level first.
    pub trace: Vec<TraceLevel>,
}

impl Constructor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fallback_budget(budget: SearchBudget) -> Self {
        Constructor {
            fallback_budget: budget,
            ..Self::default()
        }
    }

    /// Make every swap request fail with [`ConstructError::NoSwapFound`].
    /// Used to exercise failure reporting.
    pub fn without_swaps(mut self) -> Self {
        self.swaps = false;
        self
    }

    pub fn decompositions(&self) -> &DecompositionCache {
        &self.cache
    }

    pub fn is_exceptional(&self, d: &Digraph) -> bool {
        if !d.n().is_multiple_of(4) || d.n() == 0 {
            return false;
        }
        let k = d.n() / 4;
        let reference = {
            let mut forms = self.exceptional_forms.lock().unwrap();
            forms
                .entry(k)
                .or_insert_with(|| canonical_form(&exceptional(k).expect("n <= 64")))
                .clone()
        };
        canonical_form(d) == reference
    }

    /// Replace the outermost quad of `dec` so that the new inner host is
    /// decomposable and not exceptional. `dec`'s inner host must be
    /// isomorphic to the exceptional digraph on `4(k-1)` vertices.
    pub fn choose_swap(&self, d: &Digraph, dec: &Decomposition) -> Result<Swap, ConstructError> {
        if !self.swaps {
            return Err(ConstructError::NoSwapFound("swaps disabled".into()));
        }
        let k = dec.k();
        if k < 3 || d.n() != 4 * k {
            return Err(ConstructError::Range { n: d.n(), p: 0 });
        }
        dec.validate(d).map_err(ConstructError::NotDecomposable)?;
        if self.is_exceptional(d) {
            return Err(ConstructError::ExceptionalWhole);
        }
        let outer = *dec.last().expect("k >= 3");
        let qmask = outer.iter().fold(0u64, |m, &v| m | bit(v));
        let keep: Vec<Vertex> = mask_vertices(d.full_mask() & !qmask).collect();
        let (inner, labels) = d.induced_subdigraph(&keep).expect("valid labels");
        let ex = exceptional(k - 1)?;
        let phi = find_isomorphism(&ex, &inner).ok_or(ConstructError::NotExceptionalInner)?;
        let m = 4 * (k - 1);
        // exceptional label (1-based, taken mod m) -> host label
        let host_of = |e: usize| labels[phi[(e + m - 1) % m] - 1];

        let [c1, c2, _, _] = outer;
        let faces = |v: Vertex, c: Vertex| d.has_arc(v, c) || d.has_arc(c, v);
        // odd exceptional labels face {c1, c3} or {c2, c4}
        let odd_faces_first = faces(host_of(1), c1);
        let (first_start, second_start) = if odd_faces_first { (1, 2) } else { (2, 1) };
        let choice_first = |e: usize| d.has_arc(host_of(e), c1);
        let choice_second = |e: usize| d.has_arc(host_of(e), c2);
        let splits = |start: usize, choice: &dyn Fn(usize) -> bool| -> Vec<usize> {
            (start..=m).step_by(2).filter(|&e| choice(e) != choice(e + 2)).collect()
        };
        let s_all = splits(first_start, &choice_first);
        let t_all = splits(second_start, &choice_second);

        let attempt = |es: [usize; 4]| -> Option<Swap> {
            let quad = es.map(host_of);
            self.try_swap(d, quad, SwapRoute::Primary)
        };
        if let (Some(&s), Some(&t)) = (s_all.first(), t_all.first()) {
            if let Some(swap) = attempt([s, s + 2, t, t + 2]) {
                return Ok(swap);
            }
            if let Some(mut swap) = attempt([t + m - 1, s + 1, t + 1, s + 3]) {
                swap.route = SwapRoute::Shifted;
                return Ok(swap);
            }
        }
        for &s in &s_all {
            for &t in &t_all {
                if let Some(mut swap) = attempt([s, s + 2, t, t + 2]) {
                    swap.route = SwapRoute::Exhaustive;
                    return Ok(swap);
                }
            }
        }
        // Any 2+2 quad of the inner host.
        let (x, y) = d.parts().expect("validated");
        let inner_mask = d.full_mask() & !qmask;
        let xs: Vec<_> = mask_vertices(x.mask() & inner_mask).collect();
        let ys: Vec<_> = mask_vertices(y.mask() & inner_mask).collect();
        for (i, &x1) in xs.iter().enumerate() {
            for &x2 in &xs[i + 1..] {
                for (j, &y1) in ys.iter().enumerate() {
                    for &y2 in &ys[j + 1..] {
                        if let Some(swap) = self.try_swap(d, [x1, x2, y1, y2], SwapRoute::AnyQuad) {
                            return Ok(swap);
                        }
                    }
                }
            }
        }
        Err(ConstructError::NoSwapFound(format!(
            "k={k}; choice splits s={s_all:?} t={t_all:?} (exceptional labels)"
        )))
    }

    fn try_swap(&self, d: &Digraph, quad: [Vertex; 4], route: SwapRoute) -> Option<Swap> {
        let qmask = quad.iter().fold(0u64, |m, &v| m | bit(v));
        if qmask.count_ones() != 4 {
            return None;
        }
        let order = quad_cycle_order(d, qmask)?;
        if !balanced_against(d, qmask) {
            return None;
        }
        let keep: Vec<Vertex> = mask_vertices(d.full_mask() & !qmask).collect();
        let (rest, labels) = d.induced_subdigraph(&keep).ok()?;
        if self.is_exceptional(&rest) {
            return None;
        }
        let inner = self.cache.decompose(&rest)?;
        Some(Swap {
            quad: order,
            route,
            decomposition: inner.mapped(&labels).with_outer(order),
        })
    }

    /// A witness for a spanning `D(4k, p)` in a decomposable, non-exceptional
    /// `k`-regular bipartite tournament, `k >= 3`.
    pub fn build_witness(&self, d: &Digraph, p: usize) -> Result<Construction, ConstructError> {
        self.build_with(d, None, p)
    }

    /// As [`Constructor::build_witness`], reusing a known decomposition.
    pub fn build_with(
        &self,
        d: &Digraph,
        dec: Option<&Decomposition>,
        p: usize,
    ) -> Result<Construction, ConstructError> {
        let n = d.n();
        let d = match d.parts() {
            Some(_) => d.clone(),
            None => d
                .with_inferred_parts()
                .ok_or_else(|| ConstructError::NotDecomposable("not bipartite".into()))?,
        };
        if d.is_bipartite_tournament() != Ok(true) || !n.is_multiple_of(4) || !d.is_k_regular(n / 4) {
            return Err(ConstructError::NotDecomposable(
                "not a k-regular bipartite tournament on 4k vertices".into(),
            ));
        }
        let k = n / 4;
        if k < 3 || !(2..=n).contains(&p) {
            return Err(ConstructError::Range { n, p });
        }
        if self.is_exceptional(&d) {
            return Err(ConstructError::ExceptionalHost(k));
        }
        let dec = match dec {
            Some(dec) => dec.clone(),
            None => self
                .cache
                .decompose(&d)
                .ok_or_else(|| ConstructError::NotDecomposable("no decomposition found".into()))?,
        };
        let mut trace = Vec::new();
        let witness = self.build_level(&d, dec, p, &mut trace)?;
        Ok(Construction { witness, trace })
    }

    fn build_level(
        &self,
        d: &Digraph,
        dec: Decomposition,
        p: usize,
        trace: &mut Vec<TraceLevel>,
    ) -> Result<WitnessCycle, ConstructError> {
        let n = d.n();
        let k = n / 4;
        if p > 2 * k + 1 {
            return Ok(self.build_level(d, dec, n - p + 2, trace)?.to_partner());
        }
        if k <= 3 {
            let w = find_two_block(d, p, &SearchBudget::unbounded())?.ok_or(ConstructError::SearchFailed { n, p })?;
            trace.push(TraceLevel {
                k,
                case: TraceCase::Base,
            });
            return Ok(w);
        }
        let mark = trace.len();
        match self.insert_level(d, dec, p, trace) {
            Ok(w) => Ok(w),
            Err(e) if e.is_counterexample() => Err(e),
            Err(_) => {
                trace.truncate(mark);
                let w = find_two_block(d, p, &self.fallback_budget)?.ok_or(ConstructError::SearchFailed { n, p })?;
                trace.push(TraceLevel {
                    k,
                    case: TraceCase::Fallback,
                });
                Ok(w)
            }
        }
    }

    fn insert_level(
        &self,
        d: &Digraph,
        mut dec: Decomposition,
        p: usize,
        trace: &mut Vec<TraceLevel>,
    ) -> Result<WitnessCycle, ConstructError> {
        let n = d.n();
        let k = n / 4;
        let mut swapped = false;
        loop {
            let outer = *dec.last().expect("k >= 4");
            let qmask = outer.iter().fold(0u64, |m, &v| m | bit(v));
            let keep: Vec<Vertex> = mask_vertices(d.full_mask() & !qmask).collect();
            let (inner, labels) = d.induced_subdigraph(&keep).expect("valid labels");
            if self.is_exceptional(&inner) {
                if swapped {
                    return Err(ConstructError::NoSwapFound(
                        "swap left an exceptional inner host".into(),
                    ));
                }
                dec = self.choose_swap(d, &dec)?.decomposition;
                swapped = true;
                continue;
            }
            let mut to_inner = vec![0; n];
            for (i, &v) in labels.iter().enumerate() {
                to_inner[v - 1] = i + 1;
            }
            let inner_dec = dec.inner().mapped(&to_inner);
            let w_inner = self.build_level(&inner, inner_dec, p, trace)?;
            let (w, case) = insert_c4(d, outer, &w_inner.mapped(&labels))?;
            if swapped {
                trace.push(TraceLevel {
                    k,
                    case: TraceCase::Swap,
                });
            }
            trace.push(TraceLevel {
                k,
                case: TraceCase::Insert(case),
            });
            return Ok(w);
        }
    }
}

/// [`Constructor::build_witness`] with a fresh constructor.
pub fn build_witness(d: &Digraph, p: usize) -> Result<Construction, ConstructError> {
    Constructor::new().build_witness(d, p)
}

/// [`Constructor::choose_swap`] with a fresh constructor.
pub fn choose_swap(d: &Digraph, dec: &Decomposition) -> Result<Swap, ConstructError> {
    Constructor::new().choose_swap(d, dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::c4;

    #[test]
    fn case_tags() {
        let tags: Vec<_> = InsertionCase::ALL.iter().map(|c| c.tag()).collect();
        assert_eq!(tags, ["B1_FORWARD", "B2_FORWARD", "B3_FORWARD", "B3_BACKWARD"]);
        assert_eq!(
            TraceLevel {
                k: 4,
                case: TraceCase::Swap
            }
            .to_string(),
            "level k=4 case=SWAP"
        );
    }

    #[test]
    fn small_hosts_are_out_of_range() {
        let (d, _) = c4();
        assert!(matches!(build_witness(&d, 2), Err(ConstructError::Range { .. })));
    }

    #[test]
    fn exceptional_hosts_are_refused() {
        for k in 3..=4 {
            let e = exceptional(k).unwrap();
            assert_eq!(build_witness(&e, 3).unwrap_err(), ConstructError::ExceptionalHost(k));
        }
    }
}
