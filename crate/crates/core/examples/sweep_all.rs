//! Run every verification suite on every connected multigraph with at most
//! four edges. Slower than the test suite; useful as a broad regression
//! battery:
//!
//! ```sh
//! cargo run --release -p revsys --example sweep_all
//! ```

use revsys::caps::Caps;
use revsys::oracle::connected_multigraphs;
use revsys::suites;

fn main() {
    let caps = Caps::default();
    let graphs = connected_multigraphs(4);
    println!("sweeping {} graphs", graphs.len());
    let mut counts = [0u64; 6];
    for (i, g) in graphs.iter().enumerate() {
        let checks = [
            suites::rr(g, 2, None),
            suites::gioan(g, &caps).unwrap(),
            suites::eulerpar(g, &caps).unwrap(),
            suites::rank_distance(g, &caps).unwrap(),
            suites::torsor(g, &caps).unwrap(),
            suites::dichotomy(g, &caps).unwrap(),
        ];
        for (j, r) in checks.iter().enumerate() {
            counts[j] += r.cases;
            assert!(
                r.pass,
                "graph {i}: {} failed: {:?}",
                r.suite, r.counterexample
            );
        }
    }
    println!(
        "rr={} gioan={} eulerpar={} rank-distance={} torsor={} dichotomy={}",
        counts[0], counts[1], counts[2], counts[3], counts[4], counts[5]
    );
    println!("all suites pass on all graphs");
}
