//! Builds the Eulerian backbone (bounded 1-tree plus parity matching) and
//! walks it as a closed Euler tour.
//!
//! cargo run --example eulerian_backbone -- [n] [seed]

use btsp::backbone::{build_backbone_parts, euler_orient, EdgeSource};
use btsp::instance::gen_uniform_beta;
use btsp::oracles::exact_tsp;
use btsp::rational::{format_rational, rat};

fn main() -> btsp::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(9);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let inst = gen_uniform_beta(n, &rat(2, 1), seed)?;
    let (h, tree) = build_backbone_parts(&inst)?;
    h.validate()?;
    println!("1-tree root {} weight {}", tree.root, format_rational(&tree.weight));
    for e in h.edges() {
        println!("  {:>2}: {}-{} {:>8} {}", e.id, e.u, e.v, format_rational(&e.weight), e.source);
    }
    println!(
        "c(H) {}  tree part {}  matching part {}",
        format_rational(&h.weight()),
        format_rational(&h.source_weight(EdgeSource::Tree)),
        format_rational(&h.source_weight(EdgeSource::Matching))
    );
    println!("degrees {:?}", h.degrees());
    let walk = euler_orient(&h)?;
    walk.validate(&h)?;
    let steps: Vec<String> = walk.arcs.iter().map(|a| format!("{}>{}", a.tail, a.head)).collect();
    println!("euler tour {}", steps.join(" "));
    if n <= 12 {
        let opt = exact_tsp(&inst)?;
        println!("opt {}  c(H)/opt {}", format_rational(&opt.weight), format_rational(&(h.weight() / &opt.weight)));
    }
    Ok(())
}
