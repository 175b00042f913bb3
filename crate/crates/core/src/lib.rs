//! Symbolic generation of the AKNS/RAKNS hierarchy, pseudo-spectral
//! integration of its mixed and time-deformed flows, and the
//! scaling–Galilean symmetry transforms together with their finite-gap
//! counterparts.

pub mod cli;
pub mod diffpoly;
pub mod evolve;
pub mod hierarchy;
pub mod rational;
pub mod solutions;
pub mod spectral;
pub mod symmetry;

pub use diffpoly::{DiffPoly, Format, Jet, LambdaMatrixPoly, MatrixDP, Symbol};
pub use evolve::{evolve_run, FlowSpec, Integrator, Method, Observers, Schedule};
pub use hierarchy::{build_flows, standard_table, FlowTable};
pub use rational::GaussianRational;
pub use spectral::{Field, Grid, Spectral};
