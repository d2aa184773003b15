//! Build witnesses recursively instead of searching.

use bt_cycles::construct::Constructor;
use bt_cycles::gen::{self, extend, extension_choices};
use bt_cycles::{are_isomorphic, verify_witness};

fn main() {
    let c = Constructor::new();
    let (d, _) = gen::sample_decomposable(6, 1).unwrap();
    for p in [2, 7, 13, 24] {
        let built = c.build_witness(&d, p).unwrap();
        let lines: Vec<String> = built.trace.iter().map(|l| l.to_string()).collect();
        println!("{}", built.witness.certificate());
        println!("  {}", lines.join(", "));
        assert!(verify_witness(&d, &built.witness).unwrap());
    }

    // a host decomposed around exceptional(3) needs a swap first
    let e3 = gen::exceptional(3).unwrap();
    let dec = gen::is_decomposable(&e3).unwrap();
    let e4 = gen::exceptional(4).unwrap();
    let (h, hdec) = extension_choices(&e3)
        .iter()
        .map(|ch| extend(&e3, &dec, ch).unwrap())
        .find(|(h, _)| !are_isomorphic(h, &e4))
        .unwrap();
    let swap = c.choose_swap(&h, &hdec).unwrap();
    println!("swap quad {:?} via {:?}", swap.quad, swap.route);
    let built = c.build_with(&h, Some(&hdec), 6).unwrap();
    for line in &built.trace {
        println!("  {line}");
    }
}
