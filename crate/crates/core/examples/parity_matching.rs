//! Parity-constrained b-matching through the matching gadget, compared with
//! exhaustive search.
//!
//! cargo run --example parity_matching -- [seed]

use btsp::oracles::exhaustive_parity_bmatching;
use btsp::parity::{certify, solve_parity_bmatching, ParityEdge, ParitySpec};
use btsp::rational::{format_rational, int};
use rand::{Rng, SeedableRng};

fn main() -> btsp::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = 7;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.5) {
                edges.push(ParityEdge { u, v, weight: int(rng.gen_range(-3..=9)) });
            }
        }
    }
    // degree odd at 0, 1, 2 and 3, even everywhere else
    let spec = ParitySpec::new(n, edges, &[0, 1, 2, 3], &[]).map(ParitySpec::fill_even)?;
    println!("{} candidate edges", spec.edges().len());
    match solve_parity_bmatching(&spec)? {
        None => println!("infeasible"),
        Some(x) => {
            certify(&spec, &x)?;
            for e in x.support() {
                let pe = &spec.edges()[e];
                println!("x[{}-{}] = {}  weight {}", pe.u, pe.v, x.x[e], format_rational(&pe.weight));
            }
            println!("weight {}", format_rational(&x.weight));
        }
    }
    let brute = exhaustive_parity_bmatching(&spec)?;
    println!("exhaustive {}", brute.as_ref().map_or("infeasible".to_string(), format_rational));
    Ok(())
}
