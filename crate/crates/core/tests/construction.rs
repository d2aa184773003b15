mod common;

use std::collections::BTreeMap;

use bt_cycles::construct::{ConstructError, Constructor, SwapRoute, TraceCase};
use bt_cycles::gen::{self, extend, extension_choices};
use bt_cycles::{are_isomorphic, Digraph};
use common::witness_holds;

/// Every non-exceptional extension of exceptional(k-1), decomposed with the
/// exceptional host inside.
fn swap_hosts(k: usize) -> Vec<(Digraph, gen::Decomposition)> {
    let inner = gen::exceptional(k - 1).unwrap();
    let dec = gen::is_decomposable(&inner).unwrap();
    let whole = gen::exceptional(k).unwrap();
    extension_choices(&inner)
        .iter()
        .map(|ch| extend(&inner, &dec, ch).unwrap())
        .filter(|(d, _)| !are_isomorphic(d, &whole))
        .collect()
}

fn check_swaps(k: usize, build_every: usize) -> BTreeMap<String, usize> {
    let c = Constructor::new();
    let mut routes = BTreeMap::new();
    let hosts = swap_hosts(k);
    assert!(!hosts.is_empty());
    for (i, (d, dec)) in hosts.iter().enumerate() {
        let swap = c.choose_swap(d, dec).unwrap();
        *routes.entry(format!("{:?}", swap.route)).or_insert(0) += 1;
        swap.decomposition.validate(d).unwrap();
        assert_eq!(swap.decomposition.last(), Some(&swap.quad));
        if i % build_every != 0 {
            continue;
        }
        for p in 2..=4 * k {
            let built = c.build_with(d, Some(dec), p).unwrap();
            assert!(witness_holds(d, &built.witness), "p={p}");
            assert_eq!(built.witness.p, p);
            let top: Vec<_> = built.trace.iter().filter(|l| l.k == k).map(|l| l.case).collect();
            assert_eq!(top.len(), 2, "{top:?}");
            assert_eq!(top[0], TraceCase::Swap);
            assert!(matches!(top[1], TraceCase::Insert(_)));
        }
    }
    routes
}

#[test]
fn swaps_succeed_on_every_extension_of_the_exceptional_12_vertex_host() {
    let routes = check_swaps(4, 1);
    assert_eq!(routes.values().sum::<usize>(), 398);
    assert!(routes.contains_key(&format!("{:?}", SwapRoute::Primary)), "{routes:?}");
}

#[test]
fn swaps_succeed_on_every_extension_of_the_exceptional_16_vertex_host() {
    let routes = check_swaps(5, 20);
    assert_eq!(routes.values().sum::<usize>(), 4898);
}

#[test]
fn swap_preconditions() {
    let c = Constructor::new();
    let e4 = gen::exceptional(4).unwrap();
    let dec = gen::is_decomposable(&e4).unwrap();
    assert_eq!(c.choose_swap(&e4, &dec).unwrap_err(), ConstructError::ExceptionalWhole);

    let (d, dec) = gen::enumerate_decomposable(4, true)
        .unwrap()
        .into_iter()
        .find(|(d, dec)| {
            let inner = dec.inner();
            let keep: Vec<_> = inner.quads().iter().flatten().copied().collect();
            let (h, _) = d.induced_subdigraph(&keep).unwrap();
            !c.is_exceptional(&h)
        })
        .unwrap();
    assert_eq!(
        c.choose_swap(&d, &dec).unwrap_err(),
        ConstructError::NotExceptionalInner
    );
    assert!(matches!(
        c.without_swaps().choose_swap(&d, &dec),
        Err(ConstructError::NoSwapFound(_))
    ));
}

#[test]
fn partner_conversion_and_range() {
    let (d, dec) = swap_hosts(4).remove(0);
    let c = Constructor::new();
    for p in [10, 16] {
        let w = c.build_with(&d, Some(&dec), p).unwrap().witness;
        assert_eq!(w.p, p);
        assert!(witness_holds(&d, &w));
    }
    assert!(matches!(c.build_witness(&d, 1), Err(ConstructError::Range { .. })));
    assert!(matches!(c.build_witness(&d, 17), Err(ConstructError::Range { .. })));
}

#[test]
fn trace_lines_read_innermost_first() {
    let (d, dec) = swap_hosts(4).remove(0);
    let built = Constructor::new().build_with(&d, Some(&dec), 4).unwrap();
    let lines: Vec<String> = built.trace.iter().map(|l| l.to_string()).collect();
    assert_eq!(lines[0], "level k=3 case=BASE");
    assert_eq!(lines[1], "level k=4 case=SWAP");
    assert!(lines[2].starts_with("level k=4 case=B"), "{lines:?}");
}
