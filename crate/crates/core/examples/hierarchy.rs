//! Generate the first flows, print them and audit zero curvature.

use akns::hierarchy::zero_curvature_check;
use akns::{build_flows, Format};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = build_flows(6)?;
    for k in 1..=5 {
        let h = table.scalar_h(k)?;
        println!("H{k} = {}", h.render(Format::Text));
    }
    println!();
    println!("H3 (latex) = {}", table.scalar_h(3)?.render(Format::Latex));
    println!("conserved density 2 = {}", table.conserved_density(2)?.render(Format::Text));

    for k in 1..=6 {
        let report = zero_curvature_check(&table, k)?;
        println!("flow {k}: {} powers of lambda, zero curvature {}", report.powers.len(), report.passed());
    }
    Ok(())
}
