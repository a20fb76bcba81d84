//! Per-cell inventory of involution-method orbits over a (k̃, Ω) grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finder::{find_involution_orbits, FinderConfig};
use crate::map::{MapParams, Stability, TWO_PI};
use crate::perturbative::TongueSpec;

pub const CENSUS_MAX_PERIOD: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub n_k: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_omega: usize,
}

impl CensusGrid {
    /// A single cell.
    pub fn point(k: f64, omega: f64) -> Self {
        Self {
            k_min: k,
            k_max: k,
            n_k: 1,
            omega_min: omega,
            omega_max: omega,
            n_omega: 1,
        }
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Cell coordinates, k̃-major.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let ks = Self::axis(self.k_min, self.k_max, self.n_k);
        let oms = Self::axis(self.omega_min, self.omega_max, self.n_omega);
        ks.iter()
            .flat_map(|&k| oms.iter().map(move |&o| (k, o)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub p: u32,
    pub j: i64,
    pub orbits: usize,
    pub stable: usize,
    pub unstable: usize,
    pub marginal: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusCell {
    pub k: f64,
    pub omega: f64,
    pub entries: Vec<CensusEntry>,
}

impl CensusCell {
    pub fn entry(&self, p: u32, j: i64) -> Option<&CensusEntry> {
        self.entries.iter().find(|e| e.p == p && e.j == j)
    }

    /// Stable orbits of period `p` summed over all windings.
    pub fn stable_of_period(&self, p: u32) -> usize {
        self.entries
            .iter()
            .filter(|e| e.p == p)
            .map(|e| e.stable)
            .sum()
    }
}

fn cell(k: f64, omega: f64, p_max: u32, cfg: &FinderConfig) -> Result<CensusCell> {
    let mut entries = Vec::new();
    for p in 1..=p_max {
        // F_J = k̃ Σ sin θ + 2π(pΩ − j) can only vanish for |pΩ − j| ≤ k̃p/2π
        let reach = k * p as f64 / TWO_PI;
        let centre = p as f64 * omega;
        let (lo, hi) = (
            (centre - reach).ceil() as i64,
            (centre + reach).floor() as i64,
        );
        for j in lo..=hi {
            let params = MapParams::new(k, omega)?;
            let orbits: Vec<_> = find_involution_orbits(TongueSpec { p, j }, &params, cfg)?
                .into_iter()
                .filter(|o| o.is_primitive(1e-6))
                .collect();
            if orbits.is_empty() {
                continue;
            }
            let count = |s: Stability| orbits.iter().filter(|o| o.stability == s).count();
            entries.push(CensusEntry {
                p,
                j,
                orbits: orbits.len(),
                stable: count(Stability::Stable),
                unstable: count(Stability::Unstable),
                marginal: count(Stability::Marginal),
            });
        }
    }
    Ok(CensusCell { k, omega, entries })
}

/// Orbit inventory for every cell of `grid` and every period up to `p_max`.
/// Cells come out k̃-major; entries sorted by `(p, j)`.
pub fn census(grid: &CensusGrid, p_max: u32, cfg: &FinderConfig) -> Result<Vec<CensusCell>> {
    if p_max == 0 || p_max > CENSUS_MAX_PERIOD {
        return Err(Error::InvalidInput(format!(
            "p_max must be in 1..={CENSUS_MAX_PERIOD}, got {p_max}"
        )));
    }
    if grid.n_k == 0 || grid.n_omega == 0 {
        return Err(Error::InvalidInput(
            "census grid must have at least one cell".into(),
        ));
    }
    cfg.validate()?;
    grid.cells()
        .par_iter()
        .map(|&(k, omega)| cell(k, omega, p_max, cfg))
        .collect()
}
