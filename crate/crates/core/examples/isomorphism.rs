//! Canonical forms and explicit isomorphisms.

use bt_cycles::iso::canonical;
use bt_cycles::{are_isomorphic, canonical_form, find_isomorphism, gen};

fn main() {
    let d = gen::exceptional(3).unwrap();
    let rotated = d.relabel(&(1..=12).map(|v| (v + 4) % 12 + 1).collect::<Vec<_>>());
    let mirrored = d.converse();

    let c = canonical(&d);
    println!("canonical form {}", c.form);
    println!("automorphism generators: {}", c.generators.len());
    println!("orbit representative of each vertex: {:?}", c.orbit_representatives());

    println!("rotated copy has the same form: {}", canonical_form(&rotated) == c.form);
    if let Some(m) = find_isomorphism(&d, &mirrored) {
        println!("converse is isomorphic via {m:?}");
    }

    let other = &gen::enumerate_decomposable(3, true).unwrap()[0].0;
    println!(
        "first enumerated class isomorphic to exceptional(3): {}",
        are_isomorphic(other, &d)
    );
}
