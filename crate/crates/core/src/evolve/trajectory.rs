use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::{write_field_file, Field, FieldIoError};

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub field: Field,
}

/// Integrals of the first three conserved densities at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedRow {
    pub t: f64,
    pub values: [Complex64; 3],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub conserved: Vec<ConservedRow>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Field> {
        self.snapshots.last().map(|s| &s.field)
    }

    /// Largest drift of each conserved integral from its initial value.
    pub fn max_drift(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        if let Some(first) = self.conserved.first() {
            for row in &self.conserved {
                for i in 0..3 {
                    out[i] = f64::max(out[i], (row.values[i] - first.values[i]).norm());
                }
            }
        }
        out
    }

    pub fn conserved_csv(&self) -> String {
        let mut s = String::from("t,re1,im1,re2,im2,re3,im3\n");
        for row in &self.conserved {
            let _ = write!(s, "{:.16e}", row.t);
            for v in &row.values {
                let _ = write!(s, ",{:.16e},{:.16e}", v.re, v.im);
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Error)]
pub enum TrajectoryIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Field(#[from] FieldIoError),
}

/// Writes `snap_<step>.txt` per snapshot and `conserved.csv` into `dir`.
pub fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<(), TrajectoryIoError> {
    std::fs::create_dir_all(dir)?;
    for s in &traj.snapshots {
        write_field_file(&dir.join(format!("snap_{}.txt", s.step)), &s.field)?;
    }
    std::fs::write(dir.join("conserved.csv"), traj.conserved_csv())?;
    Ok(())
}
