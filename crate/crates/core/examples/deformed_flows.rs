//! Time-deformed evolution: a sinusoidal NLS coefficient against the
//! solution sampled along the scheduled times.

use std::sync::Arc;

use akns::solutions::{sample_field, soliton, Scheduled};
use akns::{FlowSpec, Grid, Integrator, Observers, Schedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(128, 40.0)?;
    let spec = FlowSpec::new(vec![
        (1, Schedule::sinusoid(1.0, 2.0, 0.0)),
        (2, Schedule::bump(0.2, 0.8, 0.5)),
    ])?;
    let base = Arc::new(soliton(1.0, 5)?);
    let exact = Scheduled::new(base, spec.clone())?;

    let f0 = sample_field(&exact, grid, &[0.0], 0.0)?;
    let integ = Integrator::with_default_method(grid, spec.clone())?;
    println!("method {:?}", integ.method());
    let traj = integ.run(&f0, 1.0, 1e-4, &Observers::default())?;

    let want = sample_field(&exact, grid, &[1.0], 1.0)?;
    println!("times at t = 1: {:?}", spec.times_at(1.0));
    println!("max error at t = 1: {:.3e}", traj.last().unwrap().max_abs_diff(&want));
    Ok(())
}
