//! Build a bipartite tournament by hand and inspect it.

use bt_cycles::format::{parse_btg, write_btg};
use bt_cycles::Digraph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // two 4-cycles joined so that every vertex has out-degree 2
    #[rustfmt::skip]
    let arcs = [
        (1, 2), (2, 3), (3, 4), (4, 1), (5, 6), (6, 7), (7, 8), (8, 5),
        (4, 5), (8, 1), (5, 2), (2, 7), (7, 4), (1, 6), (6, 3), (3, 8),
    ];
    let d = Digraph::new(8, &arcs, Some((vec![1, 3, 5, 7], vec![2, 4, 6, 8])))?;
    println!("bipartite tournament: {}", d.is_bipartite_tournament()?);
    println!("regularity: {:?}", d.regularity());
    println!(
        "out(1) = {:?}, in(1) = {:?}",
        d.out_neighbors(1).collect::<Vec<_>>(),
        d.in_neighbors(1).collect::<Vec<_>>()
    );

    let (sub, labels) = d.induced_subdigraph(&[1, 2, 3, 4])?;
    println!("vertices 1..4 induce {} arcs (labels {labels:?})", sub.arc_count());

    let text = write_btg(&d);
    print!("{text}");
    assert_eq!(parse_btg(&text)?, d);
    Ok(())
}
