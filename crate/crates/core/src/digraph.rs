//! Immutable loop-free digraphs on at most 64 vertices, with an optional
//! declared bipartition.
//!
//! Vertices are labelled `1..=n` at every public boundary. Internally each
//! vertex `v` owns bit `v - 1` of a `u64` adjacency mask, so membership and
//! set operations on neighbourhoods are single machine instructions.

use std::fmt;

use thiserror::Error;

/// A vertex label, 1-based.
pub type Vertex = usize;

/// Largest vertex count a [`Digraph`] can hold.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} is outside 1..={n}")]
    Range { vertex: Vertex, n: usize },
    #[error("arc ({0}, {1}) listed twice")]
    DuplicateArc(Vertex, Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("digraph has no declared bipartition")]
    MissingPartition,
    #[error("vertex count {0} is outside the supported range 1..=64")]
    Size(usize),
}

#[inline]
pub(crate) fn bit(v: Vertex) -> u64 {
    1u64 << (v - 1)
}

/// Iterate the 1-based vertices whose bits are set in `mask`.
pub fn mask_vertices(mut mask: u64) -> impl Iterator<Item = Vertex> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let tz = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(tz + 1)
        }
    })
}

/// One side of a bipartition.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Part(u64);

impl Part {
    pub fn from_mask(mask: u64) -> Self {
        Part(mask)
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(vs: I) -> Self {
        Part(vs.into_iter().fold(0, |m, v| m | bit(v)))
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (1..=MAX_VERTICES).contains(&v) && self.0 & bit(v) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// Members in ascending order.
    pub fn members(&self) -> impl Iterator<Item = Vertex> {
        mask_vertices(self.0)
    }
}

impl fmt::Debug for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

/// A loop-free digraph with optional bipartition metadata.
///
/// Digons and missing cross pairs are representable here; only
/// [`Digraph::is_bipartite_tournament`] enforces orientation completeness.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
    parts: Option<(Part, Part)>,
}

impl Digraph {
    /// Build a digraph on vertices `1..=n`.
    pub fn new(
        n: usize,
        arcs: &[(Vertex, Vertex)],
        parts: Option<(Vec<Vertex>, Vec<Vertex>)>,
    ) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(GraphError::Size(n));
        }
        let mut out = vec![0u64; n];
        let mut inn = vec![0u64; n];
        for &(u, v) in arcs {
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(GraphError::Range { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if out[u - 1] & bit(v) != 0 {
                return Err(GraphError::DuplicateArc(u, v));
            }
            out[u - 1] |= bit(v);
            inn[v - 1] |= bit(u);
        }
        let g = Digraph {
            n,
            out,
            inn,
            parts: None,
        };
        match parts {
            None => Ok(g),
            Some((x, y)) => g.with_parts(&x, &y),
        }
    }

    pub(crate) fn from_masks(out: Vec<u64>, parts: Option<(Part, Part)>) -> Self {
        let n = out.len();
        let mut inn = vec![0u64; n];
        for (u, &m) in out.iter().enumerate() {
            for v in mask_vertices(m) {
                inn[v - 1] |= bit(u + 1);
            }
        }
        Digraph { n, out, inn, parts }
    }

    /// Same arcs, new bipartition. The two sides must be disjoint and cover
    /// every vertex.
    pub fn with_parts(&self, x: &[Vertex], y: &[Vertex]) -> Result<Self, GraphError> {
        let mut seen = 0u64;
        for &v in x.iter().chain(y) {
            if v == 0 || v > self.n {
                return Err(GraphError::Range { vertex: v, n: self.n });
            }
            if seen & bit(v) != 0 {
                return Err(GraphError::BadPartition(format!("vertex {v} listed more than once")));
            }
            seen |= bit(v);
        }
        if seen != self.full_mask() {
            let missing: Vec<_> = mask_vertices(self.full_mask() & !seen).collect();
            return Err(GraphError::BadPartition(format!(
                "vertices {missing:?} are in neither part"
            )));
        }
        Ok(Digraph {
            parts: Some((
                Part::from_vertices(x.iter().copied()),
                Part::from_vertices(y.iter().copied()),
            )),
            ..self.clone()
        })
    }

    /// Drop any declared bipartition.
    pub fn without_parts(&self) -> Self {
        Digraph {
            parts: None,
            ..self.clone()
        }
    }

    /// Two-colour the underlying undirected graph and declare the colouring
    /// as the bipartition. Within every connected component the smallest
    /// label goes to the first part. Returns `None` if the underlying graph
    /// has an odd cycle.
    pub fn with_inferred_parts(&self) -> Option<Self> {
        let mut colour = vec![None::<bool>; self.n];
        for start in 1..=self.n {
            if colour[start - 1].is_some() {
                continue;
            }
            colour[start - 1] = Some(false);
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                let cu = colour[u - 1].unwrap();
                for w in mask_vertices(self.out[u - 1] | self.inn[u - 1]) {
                    match colour[w - 1] {
                        None => {
                            colour[w - 1] = Some(!cu);
                            stack.push(w);
                        }
                        Some(cw) if cw == cu => return None,
                        _ => {}
                    }
                }
            }
        }
        let x = Part::from_vertices((1..=self.n).filter(|&v| colour[v - 1] == Some(false)));
        let y = Part::from_vertices((1..=self.n).filter(|&v| colour[v - 1] == Some(true)));
        Some(Digraph {
            parts: Some((x, y)),
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<Vertex> {
        1..=self.n
    }

    pub fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn parts(&self) -> Option<(Part, Part)> {
        self.parts
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        u >= 1 && u <= self.n && v >= 1 && v <= self.n && self.out[u - 1] & bit(v) != 0
    }

    /// Bit mask of out-neighbours of `v` (bit `w - 1` set for each `v -> w`).
    #[inline]
    pub fn out_mask(&self, v: Vertex) -> u64 {
        self.out[v - 1]
    }

    #[inline]
    pub fn in_mask(&self, v: Vertex) -> u64 {
        self.inn[v - 1]
    }

    pub fn out_neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> {
        mask_vertices(self.out[v - 1])
    }

    pub fn in_neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> {
        mask_vertices(self.inn[v - 1])
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out[v - 1].count_ones() as usize
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.inn[v - 1].count_ones() as usize
    }

    /// All arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(Vertex, Vertex)> {
        (1..=self.n)
            .flat_map(|u| self.out_neighbors(u).map(move |v| (u, v)))
            .collect()
    }

    /// True iff every cross-part pair carries exactly one arc and no arc
    /// stays inside a part.
    pub fn is_bipartite_tournament(&self) -> Result<bool, GraphError> {
        let (x, y) = self.parts.ok_or(GraphError::MissingPartition)?;
        for u in 1..=self.n {
            let (own, other) = if x.contains(u) {
                (x.mask(), y.mask())
            } else {
                (y.mask(), x.mask())
            };
            let nbrs = self.out[u - 1] | self.inn[u - 1];
            if nbrs & own != 0 {
                return Ok(false);
            }
            // Exactly one arc per cross pair: no digons and full coverage.
            if self.out[u - 1] & self.inn[u - 1] != 0 || nbrs != other {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_k_regular(&self, k: usize) -> bool {
        (1..=self.n).all(|v| self.out_degree(v) == k && self.in_degree(v) == k)
    }

    /// Common out- and in-degree, if the digraph is regular.
    pub fn regularity(&self) -> Option<usize> {
        let k = self.out_degree(1);
        self.is_k_regular(k).then_some(k)
    }

    /// The subdigraph induced by `keep`, relabelled `1..=|keep|` in
    /// ascending order of original label. The second component maps each new
    /// label `i` to its original label at index `i - 1`.
    pub fn induced_subdigraph(&self, keep: &[Vertex]) -> Result<(Digraph, Vec<Vertex>), GraphError> {
        let mut mask = 0u64;
        for &v in keep {
            if v == 0 || v > self.n {
                return Err(GraphError::Range { vertex: v, n: self.n });
            }
            mask |= bit(v);
        }
        let labels: Vec<Vertex> = mask_vertices(mask).collect();
        if labels.is_empty() {
            return Err(GraphError::Size(0));
        }
        let mut new_of = [0usize; MAX_VERTICES + 1];
        for (i, &v) in labels.iter().enumerate() {
            new_of[v] = i + 1;
        }
        let remap = |m: u64| mask_vertices(m & mask).fold(0u64, |acc, w| acc | bit(new_of[w]));
        let out: Vec<u64> = labels.iter().map(|&v| remap(self.out[v - 1])).collect();
        let parts = self
            .parts
            .map(|(x, y)| (Part::from_mask(remap(x.mask())), Part::from_mask(remap(y.mask()))));
        Ok((Digraph::from_masks(out, parts), labels))
    }

    /// Relabel by `perm`, where `perm[v - 1]` is the new label of `v`.
    /// `perm` must be a permutation of `1..=n`.
    pub fn relabel(&self, perm: &[Vertex]) -> Digraph {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let map = |m: u64| mask_vertices(m).fold(0u64, |acc, w| acc | bit(perm[w - 1]));
        let mut out = vec![0u64; self.n];
        for v in 1..=self.n {
            out[perm[v - 1] - 1] = map(self.out[v - 1]);
        }
        let parts = self
            .parts
            .map(|(x, y)| (Part::from_mask(map(x.mask())), Part::from_mask(map(y.mask()))));
        Digraph::from_masks(out, parts)
    }

    /// The digraph with every arc reversed.
    pub fn converse(&self) -> Digraph {
        Digraph {
            n: self.n,
            out: self.inn.clone(),
            inn: self.out.clone(),
            parts: self.parts,
        }
    }

    /// Side of the bipartition containing `v` (0 for the first part, 1 for
    /// the second), when parts are declared.
    pub fn side_of(&self, v: Vertex) -> Option<u8> {
        self.parts.map(|(x, _)| if x.contains(v) { 0 } else { 1 })
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs())
            .field("parts", &self.parts)
            .finish()
    }
}
