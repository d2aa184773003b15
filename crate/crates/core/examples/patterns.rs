//! The two-block cycles D(n,p) and their certificates.

use bt_cycles::patterns::{build_pattern_d, OrientationSignature};
use bt_cycles::{are_isomorphic, TwoBlockSpec, WitnessCycle};

fn main() {
    let spec = TwoBlockSpec::new(8, 3).unwrap();
    let partner = spec.iso_partner();
    println!("{spec} pairs with {partner}");
    println!("signature of {spec}: {}", OrientationSignature::of_spec(spec));
    println!(
        "isomorphic: {}",
        are_isomorphic(&build_pattern_d(spec), &build_pattern_d(partner))
    );

    let w = WitnessCycle::from_blocks(&[1, 2, 3], &[4, 5, 6, 7, 8]);
    println!("{}", w.certificate());
    println!("partner form: {}", w.to_partner().certificate());
    let back: WitnessCycle = w.certificate().parse().unwrap();
    assert_eq!(back, w);
}
