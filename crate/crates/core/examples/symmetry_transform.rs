//! Scaling-Galilean transform of a soliton and the Hirota solution it
//! produces, checked against the flow residuals.

use std::f64::consts::PI;
use std::sync::Arc;

use akns::solutions::{flow_residual, plane_wave, soliton, Sampler, SharedSampler};
use akns::symmetry::{hirota_closed_form, hirota_generic, transform_solution, SymmetryParams};
use akns::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(512, 40.0)?;
    // b on the lattice π/L keeps the boost phase periodic.
    let b = (0.3 * grid.length() / PI).round() * PI / grid.length();
    let p = SymmetryParams::new(1.4, b)?;

    let wave: SharedSampler = Arc::new(plane_wave(0.5, 5)?);
    let moved = transform_solution(wave, p);
    for k in 1..=5 {
        let r = flow_residual(&moved, k, grid, &[0.1, 0.0, 0.0], 1e-5)?;
        println!("plane wave, a = 1.4, b = {b:.4}: flow {k} residual {r:.2e}");
    }

    let s: SharedSampler = Arc::new(soliton(1.0, 5)?);
    let moved = transform_solution(s.clone(), p);
    for k in 1..=2 {
        println!("soliton: flow {k} residual {:.2e}", flow_residual(&moved, k, grid, &[], 1e-5)?);
    }

    let closed = hirota_closed_form(1.2, 0.1, 1.0, 0.3, s.clone())?;
    let generic = hirota_generic(1.2, 0.1, 1.0, 0.3, s)?;
    let mut worst = 0.0f64;
    for i in 0..50 {
        let x = -5.0 + 0.2 * i as f64;
        worst = worst.max((closed.eval(x, &[0.7]) - generic.eval(x, &[0.7])).norm());
    }
    println!("Hirota closed form vs transformed ray: {worst:.2e}");
    Ok(())
}
