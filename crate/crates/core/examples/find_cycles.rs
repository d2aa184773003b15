//! Search hosts for spanning two-block cycles.

use bt_cycles::patterns::build_pattern_d;
use bt_cycles::search::spanning_contains_oracle;
use bt_cycles::{find_all_p, find_two_block, gen, verify_witness, SearchBudget, TwoBlockSpec};

fn main() {
    let budget = SearchBudget::unbounded();
    for k in 2..=4 {
        let e = gen::exceptional(k).unwrap();
        let prof = find_all_p(&e, &budget).unwrap();
        println!("exceptional({k}): present {:?}", prof.present);
    }

    let (d, _) = gen::sample_decomposable(3, 9).unwrap();
    let w = find_two_block(&d, 4, &budget).unwrap().expect("D(12,4)");
    println!("{}", w.certificate());
    println!("verifies: {}", verify_witness(&d, &w).unwrap());
    let spec = TwoBlockSpec::new(12, 4).unwrap();
    println!(
        "brute-force agrees: {}",
        spanning_contains_oracle(&d, &build_pattern_d(spec)).unwrap()
    );

    match find_two_block(&gen::exceptional(8).unwrap(), 2, &SearchBudget::nodes(1_000)) {
        Err(e) => println!("tight budget: {e}"),
        Ok(r) => println!("tight budget still decided: {}", r.is_some()),
    }
}
