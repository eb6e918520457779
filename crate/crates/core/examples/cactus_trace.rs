//! Prints the Rule 1 / cactus / orientation trace of one run, with the
//! structural audit switched on.
//!
//! cargo run --example cactus_trace -- [n] [seed]

use btsp::backbone::random_backbone;
use btsp::cactus::{run_pipeline, run_pipeline_on, Audit};
use btsp::instance::gen_uniform_beta;
use btsp::rational::{format_rational, rat};

fn main() -> btsp::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(9);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(16);
    let inst = gen_uniform_beta(n, &rat(3, 1), seed)?;
    let audit = Audit { seed, ..Audit::default() };

    // the computed backbone often is a single cycle; a random one shows
    // more of the cactus machinery
    for (label, run) in [
        ("computed backbone", run_pipeline(&inst, Some(&audit))?),
        ("random backbone", run_pipeline_on(&inst, random_backbone(&inst, seed)?, Some(&audit))?),
    ] {
        println!("== {label}: {} edges, degrees {:?}", run.backbone.edges().len(), run.backbone.degrees());
        for ev in &run.trace {
            println!("  {ev}");
        }
        println!("  cactus blocks {}", run.cactus.blocks.len());
        let c = &run.certificate;
        println!(
            "  c(K'') {}  c(H) {}  c(M*) {}  decisions {}",
            format_rational(&c.tour_weight),
            format_rational(&c.backbone_weight),
            format_rational(&c.m_star_weight),
            c.families.decisions.len()
        );
        println!("  audited {}", run.audited.join(" "));
    }
    Ok(())
}
