//! Degree-bounded 1-tree on a random β-instance, with the per-root LP values.
//!
//! cargo run --example bounded_one_tree -- [n] [seed]

use btsp::instance::gen_uniform_beta;
use btsp::onetree::min_bounded_one_tree_detailed;
use btsp::rational::{format_rational, rat};

fn main() -> btsp::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let inst = gen_uniform_beta(n, &rat(3, 2), seed)?;
    let b = vec![2; n];
    let start = std::time::Instant::now();
    let res = min_bounded_one_tree_detailed(&inst, &b)?;
    for r in res.roots.iter().flatten() {
        println!(
            "root {:>2}  lp {:>12}  tree {:>12}  rounds {}  cuts {}",
            r.root,
            format_rational(&r.lp_value),
            format_rational(&r.tree.weight),
            r.rounds,
            r.cuts
        );
    }
    let t = &res.tree;
    println!("best root {} weight {} max degree {}", t.root, format_rational(&t.weight), t.max_degree());
    println!("edges {:?}", t.edges);
    eprintln!("elapsed {:?}", start.elapsed());
    Ok(())
}
