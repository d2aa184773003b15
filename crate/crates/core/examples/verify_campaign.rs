//! The 8- and 12-vertex classifications, then a sampled construction campaign at k=4.

use bt_cycles::harness::{run_lemma1, run_lemma2, run_theorem, Coverage, HarnessConfig};

fn main() {
    let cfg = HarnessConfig::default();
    for campaign in [
        run_lemma1(&cfg).unwrap(),
        run_lemma2(&cfg).unwrap(),
        run_theorem(4, Coverage::Sampled { count: 20, seed: 7 }, &cfg).unwrap(),
    ] {
        println!(
            "{}: {} over {} classes",
            campaign.campaign,
            campaign.verdict,
            campaign.reports.len()
        );
        for r in campaign.reports.iter().filter(|r| r.is_exceptional) {
            println!("  exceptional class present {:?}", r.p_present);
        }
    }
}
