//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use bt_cycles::patterns::WitnessCycle;
use bt_cycles::{Digraph, Vertex};

/// Every orientation of K_{4,4} on parts {1,3,5,7} and {2,4,6,8}.
pub fn k44_orientations() -> Vec<Digraph> {
    let xs = [1, 3, 5, 7];
    let ys = [2, 4, 6, 8];
    let pairs: Vec<(Vertex, Vertex)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    (0u32..1 << 16)
        .map(|bits| {
            let arcs: Vec<_> = pairs
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| if bits >> i & 1 == 1 { (x, y) } else { (y, x) })
                .collect();
            Digraph::new(8, &arcs, Some((xs.to_vec(), ys.to_vec()))).unwrap()
        })
        .collect()
}

pub fn two_regular_k44() -> Vec<Digraph> {
    k44_orientations().into_iter().filter(|d| d.is_k_regular(2)).collect()
}

/// Adjacency rows of `d` under `perm` (old label `v` becomes `perm[v-1]`).
fn rows_under(d: &Digraph, perm: &[usize]) -> Vec<u64> {
    let n = d.n();
    let mut rows = vec![0u64; n];
    for (u, v) in d.arcs() {
        rows[perm[u - 1] - 1] |= 1 << (perm[v - 1] - 1);
    }
    rows
}

/// Lexicographically least adjacency over all `n!` labelings.
pub fn brute_canon(d: &Digraph) -> Vec<u64> {
    let n = d.n();
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut best = rows_under(d, &perm);
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let rows = rows_under(d, &perm);
            if rows < best {
                best = rows;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Check a witness directly: a permutation of the vertices with forward
/// arcs along the short block and backward arcs along the long block.
pub fn witness_holds(d: &Digraph, w: &WitnessCycle) -> bool {
    let n = d.n();
    let s = &w.seq;
    if s.len() != n || w.p < 2 || w.p > n {
        return false;
    }
    let mut seen = vec![false; n + 1];
    for &v in s {
        if v == 0 || v > n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    let at = |i: usize| s[(i - 1) % n];
    (1..w.p).all(|i| d.has_arc(at(i), at(i + 1))) && (w.p..=n).all(|i| d.has_arc(at(i + 1), at(i)))
}

/// Whether `d`, a k-regular bipartite tournament, splits into nested
/// 4-cycles each balanced against the rest.
pub fn decomposable_oracle(d: &Digraph) -> bool {
    let verts: Vec<Vertex> = d.vertices().collect();
    decomposable_on(d, &verts)
}

fn decomposable_on(d: &Digraph, verts: &[Vertex]) -> bool {
    if verts.len() == 4 {
        return is_c4(d, verts);
    }
    let m = verts.len();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                for e in c + 1..m {
                    let q = [verts[a], verts[b], verts[c], verts[e]];
                    if !is_c4(d, &q) {
                        continue;
                    }
                    let rest: Vec<Vertex> = verts.iter().copied().filter(|v| !q.contains(v)).collect();
                    let balanced = rest.iter().all(|&v| {
                        let outs = q.iter().filter(|&&c| d.has_arc(v, c)).count();
                        let ins = q.iter().filter(|&&c| d.has_arc(c, v)).count();
                        outs == 1 && ins == 1
                    });
                    if balanced && decomposable_on(d, &rest) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn is_c4(d: &Digraph, q: &[Vertex]) -> bool {
    q.iter().all(|&v| {
        let outs = q.iter().filter(|&&c| d.has_arc(v, c)).count();
        let ins = q.iter().filter(|&&c| d.has_arc(c, v)).count();
        outs == 1 && ins == 1
    }) && {
        // connected: following out-arcs from q[0] visits all four
        let mut v = q[0];
        let mut steps = 0;
        loop {
            v = *q.iter().find(|&&c| d.has_arc(v, c)).unwrap();
            steps += 1;
            if v == q[0] {
                break;
            }
        }
        steps == 4
    }
}

/// Arc set `{(i,j) : j - i = 1 mod 4}` on `4k` vertices.
pub fn residue_arcs(k: usize) -> Vec<(Vertex, Vertex)> {
    let n = 4 * k;
    let mut arcs: Vec<_> = (1..=n)
        .flat_map(|i| (1..=n).filter(move |&j| (j + n - i) % 4 == 1).map(move |j| (i, j)))
        .collect();
    arcs.sort_unstable();
    arcs
}
