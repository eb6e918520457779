//! End-to-end: solve, write the certificate, read it back and re-verify it
//! against the exact optimum.
//!
//! cargo run --example solve_and_verify -- [n] [beta] [seed]

use btsp::cactus::{parse_certificate, run_alg_beta, verify_certificate, write_certificate};
use btsp::instance::gen_uniform_beta;
use btsp::oracles::exact_tsp;
use btsp::rational::{format_rational, parse_rational, rat};

fn main() -> btsp::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let beta = args.next().and_then(|s| parse_rational(&s)).unwrap_or(rat(3, 2));
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let inst = gen_uniform_beta(n, &beta, seed)?;
    let opt = exact_tsp(&inst)?;
    let cert = run_alg_beta(&inst)?.with_opt(opt.weight.clone());
    println!("tour {:?}", cert.order);
    println!("c(K'') {}  c(H) {}  opt {}", format_rational(&cert.tour_weight), format_rational(&cert.backbone_weight), format_rational(&opt.weight));
    println!("factor {}  bound {}", format_rational(&cert.factor()), format_rational(&cert.bound().unwrap()));

    let text = write_certificate(&inst, &cert);
    println!("certificate: {} lines", text.lines().count());
    let (inst2, cert2) = parse_certificate(&text)?;
    match verify_certificate(&inst2, &cert2) {
        Ok(report) => println!("verified: {}", report.checks.join(" ")),
        Err(v) => println!("violation {v}"),
    }
    Ok(())
}
