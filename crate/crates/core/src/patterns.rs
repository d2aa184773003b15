//! Two-block oriented cycles `D(n, p)` and their path variants.
//!
//! `D(n, p)` is a directed `n`-cycle with `p - 1` consecutive arcs reversed.
//! Equivalently it is the union of a directed path `a_1 -> ... -> a_p` and a
//! directed path `a_1 -> b_1 -> ... -> b_{n-p} -> a_p`. Pattern digraphs label
//! `a_i` as `i` and `b_j` as `p + j`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::digraph::{Digraph, Vertex, MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("block parameter p={p} is outside 2..={n} (or n={n} is outside 3..=64)")]
    Range { n: usize, p: usize },
    #[error("Q({n},{p}) is undefined: there is no b-vertex when p = n")]
    DegenerateSpec { n: usize, p: usize },
}

/// The pair `(n, p)` naming a two-block cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoBlockSpec {
    n: usize,
    p: usize,
}

impl TwoBlockSpec {
    pub fn new(n: usize, p: usize) -> Result<Self, PatternError> {
        if !(3..=MAX_VERTICES).contains(&n) || !(2..=n).contains(&p) {
            return Err(PatternError::Range { n, p });
        }
        Ok(TwoBlockSpec { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of `b` vertices on the long side.
    pub fn b_count(&self) -> usize {
        self.n - self.p
    }

    /// `(n, n - p + 2)`, the spec whose pattern is isomorphic to this one.
    pub fn iso_partner(&self) -> TwoBlockSpec {
        TwoBlockSpec {
            n: self.n,
            p: self.n - self.p + 2,
        }
    }
}

impl fmt::Display for TwoBlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D({},{})", self.n, self.p)
    }
}

pub fn iso_partner(spec: TwoBlockSpec) -> TwoBlockSpec {
    spec.iso_partner()
}

fn pattern_arcs(spec: TwoBlockSpec) -> Vec<(Vertex, Vertex)> {
    let (n, p) = (spec.n, spec.p);
    let mut arcs: Vec<_> = (1..p).map(|i| (i, i + 1)).collect();
    if n == p {
        arcs.push((1, p));
    } else {
        arcs.push((1, p + 1));
        arcs.extend((p + 1..n).map(|b| (b, b + 1)));
        arcs.push((n, p));
    }
    arcs
}

pub fn build_pattern_d(spec: TwoBlockSpec) -> Digraph {
    Digraph::new(spec.n, &pattern_arcs(spec), None).expect("pattern arcs are valid")
}

/// A pattern with one arc removed and its two distinguished endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenPattern {
    pub digraph: Digraph,
    pub initial: Vertex,
    pub end: Vertex,
}

/// `D(n, p)` minus the arc `(a_1, b_1)`; initial `a_1`, end `b_1`. For
/// `p = n`, `b_1` does not exist and the removed arc is `(a_1, a_p)`, whose
/// head plays the role of the end vertex.
pub fn build_pattern_p(spec: TwoBlockSpec) -> OpenPattern {
    let end = if spec.p == spec.n { spec.p } else { spec.p + 1 };
    let arcs: Vec<_> = pattern_arcs(spec).into_iter().filter(|&a| a != (1, end)).collect();
    OpenPattern {
        digraph: Digraph::new(spec.n, &arcs, None).expect("pattern arcs are valid"),
        initial: 1,
        end,
    }
}

/// `D(n, p)` minus the arc `(b_{n-p}, a_p)`; initial `a_p`, end `b_{n-p}`.
pub fn build_pattern_q(spec: TwoBlockSpec) -> Result<OpenPattern, PatternError> {
    if spec.p == spec.n {
        return Err(PatternError::DegenerateSpec { n: spec.n, p: spec.p });
    }
    let arcs: Vec<_> = pattern_arcs(spec)
        .into_iter()
        .filter(|&a| a != (spec.n, spec.p))
        .collect();
    Ok(OpenPattern {
        digraph: Digraph::new(spec.n, &arcs, None).expect("pattern arcs are valid"),
        initial: spec.p,
        end: spec.n,
    })
}

/// Signs `ε_1 .. ε_n` of an oriented cycle: `+1` when the i-th arc points
/// forward along the cyclic order, `-1` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientationSignature {
    signs: Vec<i8>,
}

impl OrientationSignature {
    pub fn of_spec(spec: TwoBlockSpec) -> Self {
        let mut signs = vec![1i8; spec.p - 1];
        signs.resize(spec.n, -1);
        OrientationSignature { signs }
    }

    /// Signature of the closed walk `seq` in `d`; `None` if some consecutive
    /// pair is not joined by exactly one arc.
    pub fn of_cycle(d: &Digraph, seq: &[Vertex]) -> Option<Self> {
        let n = seq.len();
        let signs = (0..n)
            .map(|i| {
                let (u, v) = (seq[i], seq[(i + 1) % n]);
                match (d.has_arc(u, v), d.has_arc(v, u)) {
                    (true, false) => Some(1),
                    (false, true) => Some(-1),
                    _ => None,
                }
            })
            .collect::<Option<Vec<i8>>>()?;
        Some(OrientationSignature { signs })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Lengths of the maximal cyclic runs of equal sign, starting from the
    /// run that contains position 0 (merged with a trailing run of the same
    /// sign).
    pub fn blocks(&self) -> Vec<usize> {
        let s = &self.signs;
        if s.is_empty() {
            return Vec::new();
        }
        if s.iter().all(|&x| x == s[0]) {
            return vec![s.len()];
        }
        let mut runs = Vec::new();
        let mut len = 1;
        for i in 1..s.len() {
            if s[i] == s[i - 1] {
                len += 1;
            } else {
                runs.push(len);
                len = 1;
            }
        }
        if s[0] == s[s.len() - 1] {
            runs[0] += len;
        } else {
            runs.push(len);
        }
        runs
    }

    /// Reverse the order and flip every sign: the signature of the same
    /// cycle traversed the other way.
    pub fn reversal_complement(&self) -> Self {
        OrientationSignature {
            signs: self.signs.iter().rev().map(|&x| -x).collect(),
        }
    }
}

impl fmt::Display for OrientationSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.signs {
            f.write_str(if x > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

pub fn orientation_signature(spec: TwoBlockSpec) -> OrientationSignature {
    OrientationSignature::of_spec(spec)
}

/// A cyclic vertex sequence certifying a spanning `D(n, p)` in some host.
///
/// Required host arcs: `w_i -> w_{i+1}` for `1 <= i < p`, and
/// `w_{i+1} -> w_i` for `p <= i <= n` with `w_{n+1} = w_1`. In bracket terms
/// `a_j = w_j` and `b_j = w_{n+1-j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WitnessCycle {
    pub seq: Vec<Vertex>,
    pub p: usize,
}

impl WitnessCycle {
    pub fn new(seq: Vec<Vertex>, p: usize) -> Self {
        WitnessCycle { seq, p }
    }

    /// Assemble from the bracket form `[a_1..a_p; a_1, b_1..b_m, a_p]`.
    /// `b` holds only `b_1..b_m`.
    pub fn from_blocks(a: &[Vertex], b: &[Vertex]) -> Self {
        let mut seq = a.to_vec();
        seq.extend(b.iter().rev());
        WitnessCycle { seq, p: a.len() }
    }

    pub fn n(&self) -> usize {
        self.seq.len()
    }

    /// `a_1 ..= a_p`.
    pub fn short_block(&self) -> &[Vertex] {
        &self.seq[..self.p.min(self.seq.len())]
    }

    /// `b_1 ..= b_{n-p}` in path order out of `a_1`.
    pub fn long_block(&self) -> Vec<Vertex> {
        self.seq[self.p.min(self.seq.len())..].iter().rev().copied().collect()
    }

    /// Arcs the host must contain, as `(tail, head)` pairs.
    pub fn required_arcs(&self) -> Vec<(Vertex, Vertex)> {
        let n = self.seq.len();
        (0..n)
            .map(|i| {
                let (u, v) = (self.seq[i], self.seq[(i + 1) % n]);
                if i + 1 < self.p {
                    (u, v)
                } else {
                    (v, u)
                }
            })
            .collect()
    }

    /// The same cycle read as a witness for the partner parameter
    /// `n - p + 2`: keep `w_1`, reverse the rest.
    pub fn to_partner(&self) -> WitnessCycle {
        let mut seq = vec![self.seq[0]];
        seq.extend(self.seq[1..].iter().rev());
        WitnessCycle {
            p: self.seq.len() + 2 - self.p,
            seq,
        }
    }

    /// Apply a vertex map (`map[v - 1]` is the image of `v`).
    pub fn mapped(&self, map: &[Vertex]) -> WitnessCycle {
        WitnessCycle {
            seq: self.seq.iter().map(|&v| map[v - 1]).collect(),
            p: self.p,
        }
    }

    /// `witness n=<n> p=<p> seq=<v1> ... <vn>`.
    pub fn certificate(&self) -> String {
        let seq: Vec<String> = self.seq.iter().map(|v| v.to_string()).collect();
        format!("witness n={} p={} seq={}", self.seq.len(), self.p, seq.join(" "))
    }
}

impl fmt::Display for WitnessCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.certificate())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed witness certificate: {0}")]
pub struct CertificateError(pub String);

impl FromStr for WitnessCycle {
    type Err = CertificateError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| CertificateError(format!("{m} in {line:?}"));
        let rest = line
            .trim()
            .strip_prefix("witness ")
            .ok_or_else(|| bad("missing `witness` tag"))?;
        let rest = rest.strip_prefix("n=").ok_or_else(|| bad("missing n="))?;
        let (n, rest) = rest.split_once(' ').ok_or_else(|| bad("truncated"))?;
        let rest = rest.strip_prefix("p=").ok_or_else(|| bad("missing p="))?;
        let (p, rest) = rest.split_once(' ').ok_or_else(|| bad("truncated"))?;
        let rest = rest.strip_prefix("seq=").ok_or_else(|| bad("missing seq="))?;
        let n: usize = n.parse().map_err(|_| bad("bad n"))?;
        let p: usize = p.parse().map_err(|_| bad("bad p"))?;
        let seq = rest
            .split(' ')
            .map(|t| t.parse::<Vertex>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("bad vertex"))?;
        if seq.len() != n {
            return Err(bad("sequence length differs from n"));
        }
        Ok(WitnessCycle { seq, p })
    }
}

/// `absent n=<n> p=<p> exhaustive=true`.
pub fn absent_line(n: usize, p: usize) -> String {
    format!("absent n={n} p={p} exhaustive=true")
}
