//! Generates instances, computes their β, and round-trips them through the
//! NATIVE and TSPLIB readers.
//!
//! cargo run --example instance_formats

use btsp::instance::{gen_euclidean_power, gen_uniform_beta, parse_instance, write_native, Format};
use btsp::rational::{format_rational, rat};
use btsp::{beta_of, effective_beta};

const TSPLIB: &str = "NAME: square
TYPE: TSP
DIMENSION: 4
EDGE_WEIGHT_TYPE: EXPLICIT
EDGE_WEIGHT_FORMAT: LOWER_DIAG_ROW
EDGE_WEIGHT_SECTION
0
1 0
2 1 0
1 2 1 0
EOF
";

fn main() -> btsp::Result<()> {
    let uniform = gen_uniform_beta(6, &rat(5, 2), 1)?;
    let euclid = gen_euclidean_power(6, &rat(2, 1), 1)?;
    let tsplib = parse_instance(TSPLIB.as_bytes(), Format::Tsplib)?;
    for inst in [&uniform, &euclid, &tsplib] {
        println!(
            "{:<24} n={} beta={} effective={}",
            inst.name(),
            inst.n(),
            beta_of(inst)?,
            format_rational(&effective_beta(inst)?)
        );
    }
    let text = write_native(&euclid);
    print!("{text}");
    let back = parse_instance(text.as_bytes(), Format::Native)?;
    println!("round trip equal: {}", back == euclid);
    Ok(())
}
