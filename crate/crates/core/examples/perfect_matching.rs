//! Minimum-weight perfect matching with its dual certificate.
//!
//! cargo run --example perfect_matching

use btsp::matching::{min_weight_perfect_matching, verify_perfect_matching, MatchingGraph};
use btsp::rational::{format_rational, int, rat};

fn main() -> btsp::Result<()> {
    // two triangles joined by a bridge; the odd cycles force a blossom
    let mut g = MatchingGraph::new(6);
    for (u, v, w) in [(0, 1, int(2)), (1, 2, int(2)), (0, 2, int(1)), (3, 4, int(1)), (4, 5, rat(5, 2)), (3, 5, int(2))] {
        g.add_edge(u, v, w)?;
    }
    g.add_edge(2, 3, int(4))?;
    let Some(m) = min_weight_perfect_matching(&g) else {
        println!("no perfect matching");
        return Ok(());
    };
    verify_perfect_matching(&g, &m)?;
    for &id in &m.edges {
        let e = g.edge(id);
        println!("edge {id}: {}-{} weight {}", e.u, e.v, format_rational(&e.weight));
    }
    println!("weight {}", format_rational(&m.weight));
    let y: Vec<String> = m.certificate.vertex_duals.iter().map(format_rational).collect();
    println!("vertex duals [{}]", y.join(", "));
    for (set, z) in &m.certificate.blossoms {
        println!("blossom {set:?} dual {}", format_rational(z));
    }
    println!("dual objective {}", format_rational(&m.certificate.objective()));
    Ok(())
}
