//! Evolve the NLS soliton with IFRK4 and compare against the exact solution.

use akns::solutions::{sample_field, soliton};
use akns::{FlowSpec, Grid, Integrator, Method, Observers};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(256, 40.0)?;
    let s = soliton(1.0, 5)?;
    let f0 = sample_field(&s, grid, &[], 0.0)?;

    let integ = Integrator::new(grid, FlowSpec::single(1)?, Method::IfRk4)?;
    let traj = integ.run(&f0, 1.0, 1e-3, &Observers::at(&[0.5]))?;
    let end = traj.last().unwrap();

    let exact = sample_field(&s, grid, &[1.0], 1.0)?;
    println!("max error at t = 1: {:.3e}", end.max_abs_diff(&exact));
    let drift = traj.max_drift();
    println!("relative drift of I1, I2, I3: {:.2e} {:.2e} {:.2e}", drift[0], drift[1], drift[2]);

    // Third flow (Lakshmanan-Porsezian-Daniel) from the same data.
    let lpd = Integrator::new(grid, FlowSpec::single(3)?, Method::IfRk4)?;
    let traj = lpd.run(&f0, 0.2, 1e-4, &Observers::default())?;
    let exact = sample_field(&s, grid, &[0.0, 0.0, 0.2], 0.2)?;
    println!("flow 3 error at t = 0.2: {:.3e}", traj.last().unwrap().max_abs_diff(&exact));
    Ok(())
}
