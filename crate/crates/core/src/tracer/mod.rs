//! Continuation in the (k̃, Ω) plane.

pub mod border;
pub mod boundary;
pub mod census;

use serde::{Deserialize, Serialize};

use crate::finder::FinderConfig;

pub use border::{
    stable_seed, trace_stability_border, trace_stability_border_with, BorderCurve, BorderSample,
    Crossing,
};
pub use boundary::{
    boundary_omega, edge_at, edges_at, extremum_of_residual, global_extremum, trace_edge,
    trace_tongue_boundary, trace_tongue_boundary_with, BoundaryCurve, Side,
};
pub use census::{census, CensusCell, CensusEntry, CensusGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracerConfig {
    pub finder: FinderConfig,
    /// Target `|f_ext|` on a boundary sample.
    pub boundary_tol: f64,
    pub boundary_max_bisections: usize,
    /// Accepted `||Tr| − 2|` on a border sample.
    pub border_tol: f64,
    /// Grid used to locate the global extremum of the residual.
    pub scan_grid: usize,
    /// Largest kick a followed orbit is continued to.
    pub k_limit: f64,
    pub trace_coalescence: bool,
}

impl Default for TracerConfig {
    fn default() -> Self {
        Self {
            finder: FinderConfig::default(),
            boundary_tol: 1e-10,
            boundary_max_bisections: 80,
            border_tol: 1e-6,
            scan_grid: 1024,
            k_limit: 20.0,
            trace_coalescence: true,
        }
    }
}
