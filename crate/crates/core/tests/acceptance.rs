//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line each.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bt_cycles::construct::{insert_c4, Constructor, InsertionCase};
use bt_cycles::format::{parse_btg, parse_dec, write_btg, write_dec};
use bt_cycles::gen::{self, extend, extension_choices};
use bt_cycles::harness::{self, Coverage, HarnessConfig, Verdict};
use bt_cycles::patterns::{build_pattern_d, TwoBlockSpec, WitnessCycle};
use bt_cycles::search::spanning_contains_oracle;
use bt_cycles::{
    are_isomorphic, canonical_form, find_all_p, find_isomorphism, find_two_block, verify_witness, Digraph,
    SearchBudget, Vertex,
};
use common::{brute_canon, decomposable_oracle, residue_arcs, two_regular_k44, witness_holds};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, || {
        format!("took {:?}, limit {limit:?}", start.elapsed())
    })
}

fn full_range(n: usize) -> Vec<usize> {
    (2..=n).collect()
}

fn eight_vertex(cross: &[(Vertex, Vertex)]) -> Digraph {
    let mut arcs = vec![(1, 2), (2, 3), (3, 4), (4, 1), (5, 6), (6, 7), (7, 8), (8, 5)];
    arcs.extend_from_slice(cross);
    Digraph::new(8, &arcs, Some((vec![1, 3, 5, 7], vec![2, 4, 6, 8]))).unwrap()
}

fn only_p5_host() -> Digraph {
    eight_vertex(&[(4, 5), (8, 1), (5, 2), (2, 7), (7, 4), (1, 6), (6, 3), (3, 8)])
}

fn all_but_p5_host() -> Digraph {
    eight_vertex(&[(4, 5), (1, 8), (5, 2), (2, 7), (7, 4), (8, 3), (3, 6), (6, 1)])
}

fn classify_eight() -> Check {
    let start = Instant::now();
    let classes = gen::enumerate_decomposable(2, true).map_err(|e| e.to_string())?;
    ensure(classes.len() == 2, || format!("{} classes", classes.len()))?;
    let exc = gen::exceptional(2).unwrap();
    let mut seen = Vec::new();
    for (d, _) in &classes {
        let prof = find_all_p(d, &SearchBudget::unbounded()).map_err(|e| e.to_string())?;
        let want = if are_isomorphic(d, &exc) {
            vec![5]
        } else {
            vec![2, 3, 4, 6, 7, 8]
        };
        ensure(prof.present == want, || {
            format!("present {:?}, want {want:?}", prof.present)
        })?;
        seen.push(prof.present);
    }
    ensure(seen.iter().any(|p| p == &[5]), || "no exceptional class".into())?;
    within(start, Duration::from_secs(5))?;
    let elapsed = start.elapsed();

    // independent count: brute-force classes of decomposable 2-regular orientations
    let oracle: BTreeSet<Vec<u64>> = two_regular_k44()
        .iter()
        .filter(|d| decomposable_oracle(d))
        .map(brute_canon)
        .collect();
    let ours: BTreeSet<Vec<u64>> = classes.iter().map(|(d, _)| brute_canon(d)).collect();
    ensure(oracle == ours, || format!("oracle finds {} classes", oracle.len()))?;
    Ok(format!("2 classes, {{5}} and {{2,3,4,6,7,8}} in {elapsed:?}"))
}

fn reconstructed_hosts() -> Check {
    let (f2, f3) = (only_p5_host(), all_but_p5_host());
    for f in [&f2, &f3] {
        ensure(f.is_bipartite_tournament() == Ok(true) && f.is_k_regular(2), || {
            "host is not a 2-regular bipartite tournament".into()
        })?;
    }
    let ours: BTreeSet<String> = gen::enumerate_decomposable(2, true)
        .unwrap()
        .iter()
        .map(|(d, _)| canonical_form(d).to_hex())
        .collect();
    let figs: BTreeSet<String> = [&f2, &f3].iter().map(|d| canonical_form(d).to_hex()).collect();
    ensure(ours == figs, || format!("enumerated {ours:?}, reconstructed {figs:?}"))?;
    ensure(brute_canon(&f2) != brute_canon(&f3), || "the two hosts coincide".into())?;
    Ok("both reconstructed hosts match the enumerated classes".into())
}

fn exceptional_structure() -> Check {
    ensure(are_isomorphic(&gen::exceptional(2).unwrap(), &only_p5_host()), || {
        "exceptional(2) is not the only-D(8,5) host".into()
    })?;
    ensure(
        brute_canon(&gen::exceptional(2).unwrap()) == brute_canon(&only_p5_host()),
        || "brute-force forms differ".into(),
    )?;
    for k in 1..=6 {
        let d = gen::exceptional(k).map_err(|e| e.to_string())?;
        ensure(d.arcs() == residue_arcs(k), || format!("arc set differs at k={k}"))?;
    }
    Ok("exceptional(2) matches the only-D(8,5) host; residue arc sets agree for k <= 6".into())
}

fn classify_twelve() -> Check {
    let start = Instant::now();
    let classes = gen::enumerate_decomposable(3, true).map_err(|e| e.to_string())?;
    let exc = gen::exceptional(3).unwrap();
    let mut exc_missing = None;
    for (d, _) in &classes {
        let prof = find_all_p(d, &SearchBudget::unbounded()).map_err(|e| e.to_string())?;
        ensure(prof.is_complete(), || "search left p undecided".into())?;
        let is_exc = are_isomorphic(d, &exc);
        ensure((prof.present == full_range(12)) != is_exc, || {
            format!("XOR violated: present {:?}, exceptional={is_exc}", prof.present)
        })?;
        for (p, w) in &prof.witnesses {
            ensure(witness_holds(d, w), || format!("witness for p={p} fails"))?;
        }
        if is_exc {
            exc_missing = Some(prof.missing.clone());
        }
    }
    let missing = exc_missing.ok_or("exceptional(3) not enumerated")?;
    ensure(missing == [2, 3, 4, 6, 7, 8, 10, 11, 12], || {
        format!("exceptional(3) misses {missing:?}")
    })?;
    let campaign = harness::run_lemma2(&HarnessConfig::default()).map_err(|e| e.to_string())?;
    ensure(campaign.verdict == Verdict::Pass, || format!("{:?}", campaign.failures))?;
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "{} classes, exceptional(3) misses {missing:?}, {:?}",
        classes.len(),
        start.elapsed()
    ))
}

fn construction_k4() -> Check {
    let start = Instant::now();
    let classes = gen::enumerate_decomposable(4, true).map_err(|e| e.to_string())?;
    let enumerated = start.elapsed();
    ensure(enumerated < Duration::from_secs(1800), || {
        "enumeration over 30 min".into()
    })?;
    let c = Constructor::new();
    let mut built = 0;
    let mut saw_exc = false;
    for (d, dec) in &classes {
        if c.is_exceptional(d) {
            saw_exc = true;
            let prof = find_all_p(d, &SearchBudget::unbounded()).map_err(|e| e.to_string())?;
            ensure(prof.is_complete() && !prof.missing.is_empty(), || {
                "exceptional(4) has every p".into()
            })?;
            continue;
        }
        for p in 2..=16 {
            let w = c
                .build_with(d, Some(dec), p)
                .map_err(|e| format!("p={p}: {e}\n{}", write_btg(d)))?
                .witness;
            ensure(
                w.p == p && verify_witness(d, &w) == Ok(true) && witness_holds(d, &w),
                || format!("p={p}: bad witness {}", w.certificate()),
            )?;
            built += 1;
        }
    }
    ensure(saw_exc, || "exceptional(4) not enumerated".into())?;
    let campaign = harness::run_theorem(4, Coverage::Full, &HarnessConfig::default()).map_err(|e| e.to_string())?;
    ensure(campaign.verdict == Verdict::Pass, || format!("{:?}", campaign.failures))?;
    within(start, Duration::from_secs(3600))?;
    Ok(format!(
        "{} classes (full enumeration in {enumerated:?}), {built} witnesses built and verified, {:?}",
        classes.len(),
        start.elapsed()
    ))
}

fn oracle_equivalence() -> Check {
    let hosts = two_regular_k44();
    ensure(hosts.len() == 90, || {
        format!("{} two-regular orientations", hosts.len())
    })?;
    let mut agree = 0;
    let mut present = 0;
    for d in &hosts {
        for p in 2..=8 {
            let spec = TwoBlockSpec::new(8, p).unwrap();
            let search = find_two_block(d, p, &SearchBudget::unbounded()).map_err(|e| e.to_string())?;
            let oracle = spanning_contains_oracle(d, &build_pattern_d(spec)).map_err(|e| e.to_string())?;
            ensure(search.is_some() == oracle, || {
                format!("disagree at p={p}:\n{}", write_btg(d))
            })?;
            if let Some(w) = search {
                ensure(witness_holds(d, &w), || "unsound witness".into())?;
                present += 1;
            }
            agree += 1;
        }
    }
    Ok(format!(
        "{agree} (host, p) pairs agree over 90 hosts, {present} contain the pattern"
    ))
}

fn pattern_isomorphism() -> Check {
    let mut pairs = 0;
    for n in 3..=12 {
        for p in 2..=n {
            let a = build_pattern_d(TwoBlockSpec::new(n, p).unwrap());
            let b = build_pattern_d(TwoBlockSpec::new(n, n - p + 2).unwrap());
            ensure(are_isomorphic(&a, &b), || format!("D({n},{p}) vs partner"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// The case predicates, stated independently of `insert_c4`.
fn expected_case(d: &Digraph, quad: [Vertex; 4], w: &WitnessCycle) -> Vec<InsertionCase> {
    let a1 = w.seq[0];
    let start = quad.iter().position(|&c| d.has_arc(a1, c)).unwrap();
    let c = |i: usize| quad[(start + i - 1) % 4];
    let b = w.long_block();
    let arc = |u, v| d.has_arc(u, v);
    let mut out = Vec::new();
    if arc(c(4), b[0]) {
        out.push(InsertionCase::B1Forward);
    }
    if arc(b[0], c(4)) && arc(c(3), b[1]) {
        out.push(InsertionCase::B2Forward);
    }
    if arc(b[0], c(4)) && arc(b[1], c(3)) && arc(c(2), b[2]) {
        out.push(InsertionCase::B3Forward);
    }
    if arc(b[0], c(4)) && arc(b[1], c(3)) && arc(b[2], c(2)) {
        out.push(InsertionCase::B3Backward);
    }
    out
}

fn insertion_suite() -> Check {
    let mut crafted: BTreeMap<InsertionCase, (Digraph, WitnessCycle)> = BTreeMap::new();
    let mut calls = 0;
    let inner = gen::enumerate_decomposable(3, true).unwrap();
    for (h, hdec) in &inner {
        for p in 2..=9 {
            let Some(w) = find_two_block(h, p, &SearchBudget::unbounded()).unwrap() else {
                continue;
            };
            for choice in extension_choices(h) {
                let (d, dec) = extend(h, hdec, &choice).map_err(|e| e.to_string())?;
                let quad = *dec.last().unwrap();
                let (out, case) = insert_c4(&d, quad, &w).map_err(|e| e.to_string())?;
                calls += 1;
                let expected = expected_case(&d, quad, &w);
                ensure(expected == [case], || {
                    format!("case {case} but predicates give {expected:?}")
                })?;
                ensure(out.p == p && witness_holds(&d, &out) && out.seq[0] == w.seq[0], || {
                    format!("{case}: bad splice {}", out.certificate())
                })?;
                crafted.entry(case).or_insert((d, out));
            }
        }
    }
    ensure(crafted.len() == 4, || format!("only {:?} reached", crafted.keys()))?;
    for (case, (d, w)) in &crafted {
        ensure(verify_witness(d, w) == Ok(true), || {
            format!("{case} witness fails verify_witness")
        })?;
    }
    Ok(format!(
        "all four cases crafted; {calls} splices each matched exactly one case"
    ))
}

fn property_suite() -> Check {
    let budget = SearchBudget::unbounded();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut hosts: Vec<Digraph> = Vec::new();
    for k in 2..=3 {
        hosts.extend(
            gen::enumerate_decomposable(k, true)
                .unwrap()
                .into_iter()
                .map(|(d, _)| d),
        );
    }
    hosts.extend(two_regular_k44());

    // witness soundness and partner closure
    let mut witnesses = 0;
    for d in &hosts {
        let prof = find_all_p(d, &budget).map_err(|e| e.to_string())?;
        let n = d.n();
        for &p in &prof.present {
            ensure(prof.present.contains(&(n - p + 2)), || {
                format!("p={p} present without partner")
            })?;
        }
        for w in prof.witnesses.values() {
            ensure(witness_holds(d, w), || format!("unsound {}", w.certificate()))?;
            witnesses += 1;
        }
    }
    let c = Constructor::new();
    for (i, (d, _)) in gen::enumerate_decomposable(4, true).unwrap().iter().enumerate() {
        if c.is_exceptional(d) || i % 6 != 0 {
            continue;
        }
        for p in 2..=16 {
            let w = c.build_witness(d, p).map_err(|e| e.to_string())?.witness;
            ensure(witness_holds(d, &w), || {
                format!("unsound construction {}", w.certificate())
            })?;
            witnesses += 1;
        }
    }

    // canonical invariance
    let by_n = |n: usize| -> Vec<&Digraph> { hosts.iter().filter(|d| d.n() == n).collect() };
    for n in [8, 12] {
        let pool = by_n(n);
        for _ in 0..1000 {
            let d = pool.choose(&mut rng).unwrap();
            let mut perm: Vec<Vertex> = (1..=n).collect();
            perm.shuffle(&mut rng);
            let r = d.relabel(&perm);
            ensure(canonical_form(&r) == canonical_form(d), || {
                format!("form changed under {perm:?}")
            })?;
            let m = find_isomorphism(d, &r).ok_or("relabelled copy not isomorphic")?;
            ensure(d.relabel(&m).arcs() == r.arcs(), || "bad isomorphism".into())?;
        }
    }

    // file round trips
    for (d, dec) in gen::enumerate_decomposable(3, true).unwrap() {
        let text = write_btg(&d);
        let back = parse_btg(&text).map_err(|e| e.to_string())?;
        ensure(back == d && write_btg(&back) == text, || "btg round trip".into())?;
        let dtext = write_dec(&dec);
        ensure(
            write_dec(&parse_dec(&dtext).map_err(|e| e.to_string())?) == dtext,
            || "dec round trip".into(),
        )?;
    }
    for d in &hosts {
        let text = write_btg(d);
        ensure(write_btg(&parse_btg(&text).map_err(|e| e.to_string())?) == text, || {
            "btg round trip".into()
        })?;
    }
    Ok(format!(
        "{witnesses} witnesses sound, 2000 relabelings invariant, round trips exact"
    ))
}

fn falsification() -> Check {
    // a wrong exceptional claim at k=3 breaks the XOR
    let inner = gen::enumerate_decomposable(3, true).unwrap();
    let exc3 = gen::exceptional(3).unwrap();
    let decoy = inner.iter().find(|(d, _)| !are_isomorphic(d, &exc3)).unwrap().0.clone();
    let cfg = HarnessConfig {
        exceptional_override: Some(decoy.clone()),
        ..HarnessConfig::default()
    };
    let c = harness::run_lemma2(&cfg).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Fail && c.exit_code() == 1, || {
        "planted XOR violation passed".into()
    })?;
    ensure(
        c.failures
            .iter()
            .any(|f| parse_btg(&f.btg).map(|h| h.n() == 12).unwrap_or(false)),
        || "offending host not serialized".into(),
    )?;

    // a host that needs a swap, with swaps disabled
    let e3dec = gen::is_decomposable(&exc3).ok_or("exceptional(3) not decomposable")?;
    let exc4 = gen::exceptional(4).unwrap();
    let (needs_swap, dec) = extension_choices(&exc3)
        .iter()
        .map(|ch| extend(&exc3, &e3dec, ch).unwrap())
        .find(|(d, _)| !are_isomorphic(d, &exc4))
        .ok_or("every extension is exceptional")?;
    let hosts = vec![(needs_swap.clone(), dec)];
    let cfg = HarnessConfig {
        disable_swaps: true,
        ..HarnessConfig::default()
    };
    let c = harness::run_theorem_on(&hosts, 4, &cfg, "no swaps").map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Fail && c.exit_code() == 1, || {
        "missing swap went unnoticed".into()
    })?;
    let f = c
        .failures
        .iter()
        .find(|f| f.message.contains("no swap"))
        .ok_or("no NoSwapFound failure")?;
    let back = parse_btg(&f.btg).map_err(|e| e.to_string())?;
    ensure(are_isomorphic(&back, &needs_swap), || "serialized host differs".into())?;
    let clean = harness::run_theorem_on(&hosts, 4, &HarnessConfig::default(), "swaps").map_err(|e| e.to_string())?;
    ensure(clean.verdict == Verdict::Pass, || format!("{:?}", clean.failures))?;

    // a wrong exceptional claim at k=4
    let cfg = HarnessConfig {
        exceptional_override: Some(needs_swap),
        ..HarnessConfig::default()
    };
    let c = harness::run_theorem_on(&hosts, 4, &cfg, "decoy").map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Fail && c.exit_code() == 1, || {
        "planted k=4 violation passed".into()
    })?;
    ensure(c.failures.iter().all(|f| !f.btg.is_empty()), || {
        "failure without host".into()
    })?;
    Ok("planted violations and NoSwapFound give exit code 1 with hosts serialized".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("8-vertex classification", classify_eight),
        ("reconstructed 8-vertex hosts", reconstructed_hosts),
        ("exceptional structure", exceptional_structure),
        ("12-vertex classification", classify_twelve),
        ("construction at k=4", construction_k4),
        ("oracle equivalence", oracle_equivalence),
        ("pattern isomorphism", pattern_isomorphism),
        ("insert_c4 cases", insertion_suite),
        ("property suite", property_suite),
        ("falsification discipline", falsification),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let ms = start.elapsed().as_millis();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
