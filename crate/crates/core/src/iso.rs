//! Isomorphism testing and canonical forms.
//!
//! Two independent routes are provided:
//!
//! * [`canonical_form`] runs an individualisation/refinement search over
//!   ordered partitions (equitable refinement on out/in counts, branching on
//!   the smallest non-singleton cell) and keeps the lexicographically least
//!   permuted adjacency matrix among the leaves. Automorphisms found when two
//!   leaves coincide prune sibling branches in the same orbit.
//! * [`find_isomorphism`] is a direct backtracking matcher whose candidate
//!   sets come from joint colour refinement seeded with degree pairs and
//!   distance profiles.
//!
//! Isomorphism here is of the underlying digraph; declared parts are ignored
//! and may swap.

use std::collections::BTreeMap;
use std::fmt;

use crate::digraph::{mask_vertices, Digraph, Vertex};

/// Relabelling-invariant key: equal exactly for isomorphic digraphs.
///
/// The first byte is the vertex count; the rest is the canonical adjacency
/// matrix packed row-major, most significant bit first, zero padded.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn vertex_count(&self) -> usize {
        self.bytes[0] as usize
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn from_hex(text: &str) -> Option<Self> {
        let bytes = hex::decode(text).ok()?;
        let n = *bytes.first()? as usize;
        (n >= 1 && bytes.len() == 1 + (n * n).div_ceil(8)).then_some(CanonicalForm { bytes })
    }

    /// Rebuild the canonical representative (vertices `1..=n`, no parts).
    pub fn to_digraph(&self) -> Digraph {
        let n = self.vertex_count();
        let mut out = vec![0u64; n];
        for (i, row) in out.iter_mut().enumerate() {
            for j in 0..n {
                let b = i * n + j;
                if self.bytes[1 + b / 8] & (0x80 >> (b % 8)) != 0 {
                    *row |= 1 << j;
                }
            }
        }
        Digraph::from_masks(out, None)
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Result of the canonical labelling search.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub form: CanonicalForm,
    /// `labeling[v - 1]` is the canonical label of `v`; relabelling the input
    /// by it yields `form.to_digraph()`.
    pub labeling: Vec<Vertex>,
    /// Automorphisms discovered during the search, as permutations in the
    /// same `perm[v - 1] = image` convention. They generate a subgroup of the
    /// automorphism group.
    pub generators: Vec<Vec<Vertex>>,
}

impl Canonical {
    /// Orbit representative (least label) of each vertex under the group
    /// generated by `generators`.
    pub fn orbit_representatives(&self) -> Vec<Vertex> {
        let n = self.labeling.len();
        let mut uf = UnionFind::new(n);
        for g in &self.generators {
            for (i, &img) in g.iter().enumerate() {
                uf.union(i, img - 1);
            }
        }
        let mut rep = vec![usize::MAX; n];
        for v in 0..n {
            let r = uf.find(v);
            rep[r] = rep[r].min(v);
        }
        (0..n).map(|v| rep[uf.find(v)] + 1).collect()
    }
}

pub fn canonical_form(d: &Digraph) -> CanonicalForm {
    canonical(d).form
}

pub fn canonical(d: &Digraph) -> Canonical {
    let n = d.n();
    let out: Vec<u64> = d.vertices().map(|v| d.out_mask(v)).collect();
    let inn: Vec<u64> = d.vertices().map(|v| d.in_mask(v)).collect();
    let mut search = CanonSearch {
        n,
        out: &out,
        inn: &inn,
        first: None,
        best: None,
        generators: Vec::new(),
    };
    let root = vec![(0..n as u8).collect::<Vec<u8>>()];
    let mut path = Vec::new();
    search.descend(root, &mut path);

    let best = search.best.expect("search visits at least one leaf");
    let mut labeling = vec![0; n];
    for (pos, &v) in best.lab.iter().enumerate() {
        labeling[v as usize] = pos + 1;
    }
    let mut bytes = Vec::with_capacity(1 + best.matrix.len());
    bytes.push(n as u8);
    bytes.extend_from_slice(&best.matrix);
    Canonical {
        form: CanonicalForm { bytes },
        labeling,
        generators: search
            .generators
            .into_iter()
            .map(|g| g.into_iter().map(|x| x as usize + 1).collect())
            .collect(),
    }
}

struct Leaf {
    matrix: Vec<u8>,
    lab: Vec<u8>,
    path: Vec<u8>,
}

struct CanonSearch<'a> {
    n: usize,
    out: &'a [u64],
    inn: &'a [u64],
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<u8>>,
}

impl CanonSearch<'_> {
    /// Equitable refinement of an ordered partition. Cells are split by the
    /// (out-count, in-count) profile towards each splitter cell; new cells
    /// are ordered by ascending profile, so the result is label-invariant.
    fn refine(&self, cells: &mut Vec<Vec<u8>>) {
        'restart: loop {
            for s in 0..cells.len() {
                let smask = cells[s].iter().fold(0u64, |m, &v| m | 1 << v);
                let mut split_any = false;
                let mut next = Vec::with_capacity(cells.len() + 1);
                for cell in cells.iter() {
                    if cell.len() == 1 {
                        next.push(cell.clone());
                        continue;
                    }
                    let key = |v: u8| {
                        (
                            (self.out[v as usize] & smask).count_ones(),
                            (self.inn[v as usize] & smask).count_ones(),
                        )
                    };
                    let k0 = key(cell[0]);
                    if cell.iter().all(|&v| key(v) == k0) {
                        next.push(cell.clone());
                        continue;
                    }
                    split_any = true;
                    let mut groups: BTreeMap<(u32, u32), Vec<u8>> = BTreeMap::new();
                    for &v in cell {
                        groups.entry(key(v)).or_default().push(v);
                    }
                    next.extend(groups.into_values());
                }
                if split_any {
                    *cells = next;
                    continue 'restart;
                }
            }
            return;
        }
    }

    fn matrix(&self, lab: &[u8]) -> Vec<u8> {
        let n = self.n;
        let mut bytes = vec![0u8; (n * n).div_ceil(8)];
        for (i, &u) in lab.iter().enumerate() {
            let row = self.out[u as usize];
            for (j, &v) in lab.iter().enumerate() {
                if row & (1 << v) != 0 {
                    let b = i * n + j;
                    bytes[b / 8] |= 0x80 >> (b % 8);
                }
            }
        }
        bytes
    }

    /// Returns `Some(level)` when the search should unwind to the node at
    /// depth `level` (an automorphism showed the current branch redundant).
    fn descend(&mut self, mut cells: Vec<Vec<u8>>, path: &mut Vec<u8>) -> Option<usize> {
        self.refine(&mut cells);
        let depth = path.len();
        let Some(target) = (0..cells.len())
            .filter(|&i| cells[i].len() > 1)
            .min_by_key(|&i| (cells[i].len(), i))
        else {
            return self.leaf(cells.iter().map(|c| c[0]).collect(), path);
        };

        let mut tried: Vec<u8> = Vec::new();
        let candidates = {
            let mut c = cells[target].clone();
            c.sort_unstable();
            c
        };
        for w in candidates {
            if !tried.is_empty() && self.same_orbit_as_tried(w, &tried, path) {
                continue;
            }
            tried.push(w);
            let mut child = Vec::with_capacity(cells.len() + 1);
            for (i, cell) in cells.iter().enumerate() {
                if i == target {
                    child.push(vec![w]);
                    child.push(cell.iter().copied().filter(|&x| x != w).collect());
                } else {
                    child.push(cell.clone());
                }
            }
            path.push(w);
            let jump = self.descend(child, path);
            path.pop();
            if let Some(level) = jump {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }

    fn leaf(&mut self, lab: Vec<u8>, path: &[u8]) -> Option<usize> {
        let matrix = self.matrix(&lab);
        let Some(first) = &self.first else {
            let leaf = Leaf {
                matrix,
                lab,
                path: path.to_vec(),
            };
            self.best = Some(Leaf {
                matrix: leaf.matrix.clone(),
                lab: leaf.lab.clone(),
                path: leaf.path.clone(),
            });
            self.first = Some(leaf);
            return None;
        };
        if matrix == first.matrix {
            let g = automorphism(&first.lab, &lab);
            let level = divergence(&first.path, path);
            self.generators.push(g);
            return Some(level);
        }
        let best = self.best.as_ref().unwrap();
        match matrix.cmp(&best.matrix) {
            std::cmp::Ordering::Equal => {
                let g = automorphism(&best.lab, &lab);
                let level = divergence(&best.path, path);
                self.generators.push(g);
                Some(level)
            }
            std::cmp::Ordering::Less => {
                self.best = Some(Leaf {
                    matrix,
                    lab,
                    path: path.to_vec(),
                });
                None
            }
            std::cmp::Ordering::Greater => None,
        }
    }

    /// Whether `w` lies in the orbit of an already tried vertex under the
    /// known automorphisms that fix the current path pointwise.
    fn same_orbit_as_tried(&self, w: u8, tried: &[u8], path: &[u8]) -> bool {
        let mut uf = UnionFind::new(self.n);
        let mut any = false;
        for g in &self.generators {
            if path.iter().all(|&v| g[v as usize] == v) {
                any = true;
                for (i, &img) in g.iter().enumerate() {
                    uf.union(i, img as usize);
                }
            }
        }
        if !any {
            return false;
        }
        let rw = uf.find(w as usize);
        tried.iter().any(|&t| uf.find(t as usize) == rw)
    }
}

fn automorphism(lab_a: &[u8], lab_b: &[u8]) -> Vec<u8> {
    let mut g = vec![0u8; lab_a.len()];
    for (&a, &b) in lab_a.iter().zip(lab_b) {
        g[a as usize] = b;
    }
    g
}

fn divergence(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn are_isomorphic(a: &Digraph, b: &Digraph) -> bool {
    find_isomorphism(a, b).is_some()
}

/// A bijection `m` with `m[v - 1]` the image in `b` of vertex `v` of `a`,
/// mapping the arc set of `a` exactly onto that of `b`.
pub fn find_isomorphism(a: &Digraph, b: &Digraph) -> Option<Vec<Vertex>> {
    let n = a.n();
    if n != b.n() || a.arc_count() != b.arc_count() {
        return None;
    }
    let (ca, cb) = joint_colours(a, b);
    let mut hist_a = ca.clone();
    let mut hist_b = cb.clone();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return None;
    }

    let class_size = |c: u32| ca.iter().filter(|&&x| x == c).count();
    // Visit order: grow from the rarest colour, always taking the vertex most
    // connected to those already placed.
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = 0u64;
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| placed & (1 << v) == 0)
            .max_by_key(|&v| {
                let nb = a.out_mask(v + 1) | a.in_mask(v + 1);
                (
                    (nb & placed).count_ones(),
                    std::cmp::Reverse(class_size(ca[v])),
                    std::cmp::Reverse(v),
                )
            })
            .unwrap();
        placed |= 1 << next;
        order.push(next);
    }

    let mut map = vec![usize::MAX; n];
    let mut used = 0u64;
    if match_from(a, b, &ca, &cb, &order, 0, &mut map, &mut used) {
        Some(map.into_iter().map(|x| x + 1).collect())
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn match_from(
    a: &Digraph,
    b: &Digraph,
    ca: &[u32],
    cb: &[u32],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut u64,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    'cand: for w in 0..b.n() {
        if *used & (1 << w) != 0 || cb[w] != ca[v] {
            continue;
        }
        for &u in &order[..depth] {
            let mu = map[u];
            if a.has_arc(u + 1, v + 1) != b.has_arc(mu + 1, w + 1)
                || a.has_arc(v + 1, u + 1) != b.has_arc(w + 1, mu + 1)
            {
                continue 'cand;
            }
        }
        map[v] = w;
        *used |= 1 << w;
        if match_from(a, b, ca, cb, order, depth + 1, map, used) {
            return true;
        }
        *used &= !(1 << w);
        map[v] = usize::MAX;
    }
    false
}

/// BFS distance profile (sorted multiset of finite distances, out then in).
fn distance_profile(d: &Digraph, v: Vertex) -> (Vec<u8>, Vec<u8>) {
    let bfs = |forward: bool| {
        let mut dist = Vec::new();
        let mut seen = 1u64 << (v - 1);
        let mut frontier = seen;
        let mut level = 0u8;
        while frontier != 0 {
            level += 1;
            let mut next = 0u64;
            for u in mask_vertices(frontier) {
                next |= if forward { d.out_mask(u) } else { d.in_mask(u) };
            }
            next &= !seen;
            seen |= next;
            dist.extend(std::iter::repeat_n(level, next.count_ones() as usize));
            frontier = next;
        }
        dist
    };
    (bfs(true), bfs(false))
}

/// Colour refinement run on both digraphs with one shared colour dictionary,
/// so equal colours are comparable across the pair.
fn joint_colours(a: &Digraph, b: &Digraph) -> (Vec<u32>, Vec<u32>) {
    type InitKey = (usize, usize, (Vec<u8>, Vec<u8>));
    let mut dict: BTreeMap<InitKey, u32> = BTreeMap::new();
    let mut initial = |d: &Digraph| -> Vec<u32> {
        d.vertices()
            .map(|v| {
                let key = (d.out_degree(v), d.in_degree(v), distance_profile(d, v));
                let len = dict.len() as u32;
                *dict.entry(key).or_insert(len)
            })
            .collect()
    };
    let mut ca = initial(a);
    let mut cb = initial(b);
    let distinct = |x: &[u32], y: &[u32]| {
        let mut all: Vec<u32> = x.iter().chain(y).copied().collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    };
    let mut classes = distinct(&ca, &cb);
    for _ in 0..a.n() {
        let mut dict: BTreeMap<(u32, Vec<u32>, Vec<u32>), u32> = BTreeMap::new();
        let mut step = |d: &Digraph, c: &[u32]| -> Vec<u32> {
            d.vertices()
                .map(|v| {
                    let mut o: Vec<u32> = d.out_neighbors(v).map(|w| c[w - 1]).collect();
                    let mut i: Vec<u32> = d.in_neighbors(v).map(|w| c[w - 1]).collect();
                    o.sort_unstable();
                    i.sort_unstable();
                    let len = dict.len() as u32;
                    *dict.entry((c[v - 1], o, i)).or_insert(len)
                })
                .collect()
        };
        let na = step(a, &ca);
        let nb = step(b, &cb);
        let next = distinct(&na, &nb);
        ca = na;
        cb = nb;
        if next == classes {
            break;
        }
        classes = next;
    }
    (ca, cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        let arcs: Vec<_> = (1..=n).map(|i| (i, i % n + 1)).collect();
        Digraph::new(n, &arcs, None).unwrap()
    }

    #[test]
    fn hex_round_trip() {
        let f = canonical_form(&cycle(5));
        let hex = f.to_hex();
        assert!(hex.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()));
        assert_eq!(CanonicalForm::from_hex(&hex), Some(f.clone()));
        assert!(are_isomorphic(&f.to_digraph(), &cycle(5)));
        assert_eq!(CanonicalForm::from_hex("0"), None);
        assert_eq!(CanonicalForm::from_hex("05ff"), None);
    }

    #[test]
    fn labeling_reproduces_form() {
        let g = Digraph::new(5, &[(1, 2), (1, 3), (3, 4), (5, 4), (2, 5)], None).unwrap();
        let c = canonical(&g);
        assert_eq!(g.relabel(&c.labeling), c.form.to_digraph());
    }

    #[test]
    fn rotation_is_found() {
        let c4 = cycle(4);
        let rotated = c4.relabel(&[3, 4, 1, 2]);
        let m = find_isomorphism(&c4, &rotated).unwrap();
        for (u, v) in c4.arcs() {
            assert!(rotated.has_arc(m[u - 1], m[v - 1]));
        }
    }

    #[test]
    fn cycles_of_different_orientation_differ() {
        let path_like = Digraph::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)], None).unwrap();
        assert!(!are_isomorphic(&cycle(4), &path_like));
        assert_ne!(canonical_form(&cycle(4)), canonical_form(&path_like));
        assert!(find_isomorphism(&cycle(4), &cycle(5)).is_none());
    }

    #[test]
    fn orbits_of_a_directed_cycle() {
        let c = canonical(&cycle(6));
        assert_eq!(c.orbit_representatives(), vec![1; 6]);
    }
}
