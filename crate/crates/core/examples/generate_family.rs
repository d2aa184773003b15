//! Enumerate the decomposable family and extend a host by hand.

use bt_cycles::gen::{self, ExtensionChoice};

fn main() {
    for k in 1..=4 {
        let classes = gen::enumerate_decomposable(k, true).unwrap();
        println!("k={k}: {} isomorphism classes", classes.len());
    }

    let (c4, dec) = gen::c4();
    let choices = gen::extension_choices(&c4);
    println!("a 4-cycle extends in {} ways", choices.len());
    let (d, dec) = gen::extend(&c4, &dec, &ExtensionChoice::new([1], [2])).unwrap();
    println!("extended host has quads {:?}", dec.quads());
    println!("decomposable again: {}", gen::is_decomposable(&d).is_some());

    let (sample, _) = gen::sample_decomposable(5, 42).unwrap();
    println!(
        "sampled a {}-vertex host, regularity {:?}",
        sample.n(),
        sample.regularity()
    );
}
