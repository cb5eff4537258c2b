use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::SpaceSpec;
use crate::model::build_dimensionless_hamiltonian;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions<T> {
    pub include_quadratic: bool,
    /// Fixed hopping; `None` ties `J = Δ/2` at every grid point.
    pub j_override: Option<T>,
}

impl<T> Default for ScanOptions<T> {
    fn default() -> Self {
        Self {
            include_quadratic: true,
            j_override: None,
        }
    }
}

/// Lowest eigenvalues per detuning, in grid order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenTable<T> {
    pub deltas: Vec<T>,
    /// `levels[i]` holds the ascending lowest eigenvalues at `deltas[i]`.
    pub levels: Vec<Vec<T>>,
}

impl<T: Real> EigenTable<T> {
    /// Number of levels per row.
    pub fn count(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    /// Level `n` across the grid.
    pub fn column(&self, n: usize) -> Vec<T> {
        self.levels.iter().map(|row| row[n]).collect()
    }
}

/// Lowest `count` eigenvalues of the dimensionless Hamiltonian for each `Δ`.
pub fn eigen_scan<T: Real>(k: T, delta_grid: &[T], count: usize, space: &SpaceSpec) -> Result<EigenTable<T>> {
    eigen_scan_with(k, delta_grid, count, space, &ScanOptions::default())
}

pub fn eigen_scan_with<T: Real>(
    k: T,
    delta_grid: &[T],
    count: usize,
    space: &SpaceSpec,
    opts: &ScanOptions<T>,
) -> Result<EigenTable<T>> {
    if delta_grid.iter().any(|d| !d.is_finite()) {
        return Err(Error::Argument("delta grid has non-finite entries".into()));
    }
    if count == 0 || count > space.total_dim() {
        return Err(Error::Argument(format!(
            "eigenvalue count {count} outside 1..={}",
            space.total_dim()
        )));
    }
    let levels = delta_grid
        .par_iter()
        .map(|&delta| {
            build_dimensionless_hamiltonian(space, k, delta, opts.include_quadratic, opts.j_override)?
                .eigen_lowest(count)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenTable {
        deltas: delta_grid.to_vec(),
        levels,
    })
}
