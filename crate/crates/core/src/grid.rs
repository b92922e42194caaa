//! Uniform 1-D grids on Ω₁, interior subdomains, and the discrete L² pairing.
//!
//! Unknown vectors only carry interior nodes: the Dirichlet boundary values
//! are implicit zeros.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, LabError, Result};

/// Uniform grid on `[a, b]` with `n_cells` cells; `nodes` holds the
/// `n_cells - 1` interior nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    pub n_cells: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
}

/// Smallest accepted number of cells (one interior unknown needs two cells).
pub const MIN_CELLS: usize = 2;

/// Builds the uniform grid `x_i = a + (i+1) h`, `i = 0..n_cells-1`.
pub fn build_grid(a: f64, b: f64, n_cells: usize) -> Result<Grid1D> {
    if !a.is_finite() || !b.is_finite() {
        return Err(LabError::InvalidInput(format!(
            "grid bounds must be finite, got ({a}, {b})"
        )));
    }
    if a >= b {
        return Err(LabError::InvalidInput(format!(
            "grid needs a < b, got ({a}, {b})"
        )));
    }
    if n_cells < MIN_CELLS {
        return Err(LabError::InvalidInput(format!(
            "grid needs at least {MIN_CELLS} cells, got {n_cells}"
        )));
    }
    let h = (b - a) / n_cells as f64;
    let nodes = (0..n_cells - 1).map(|i| a + (i + 1) as f64 * h).collect();
    Ok(Grid1D {
        a,
        b,
        n_cells,
        h,
        nodes,
    })
}

impl Grid1D {
    /// Number of interior unknowns.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Grid whose interior nodes are exactly `self.nodes[range]`; its
    /// boundary nodes are the parent nodes (or endpoints) adjacent to the range.
    pub fn subgrid(&self, range: Range<usize>) -> Result<Grid1D> {
        if range.is_empty() || range.end > self.len() {
            return Err(LabError::InvalidInput(format!(
                "subgrid range {range:?} invalid for {} nodes",
                self.len()
            )));
        }
        let a = if range.start == 0 {
            self.a
        } else {
            self.nodes[range.start - 1]
        };
        let b = if range.end == self.len() {
            self.b
        } else {
            self.nodes[range.end]
        };
        Ok(Grid1D {
            a,
            b,
            n_cells: range.len() + 1,
            h: self.h,
            nodes: self.nodes[range].to_vec(),
        })
    }

    /// Index of the node closest to `x`.
    pub fn nearest_node(&self, x: f64) -> usize {
        let raw = ((x - self.a) / self.h).round() as isize - 1;
        raw.clamp(0, self.len() as isize - 1) as usize
    }
}

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(LabError::InvalidInput(format!(
                "interval needs finite lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// The interior subdomain Ω₁' together with its distance bound δ from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubdomainSpec {
    pub lo: f64,
    pub hi: f64,
    pub delta: f64,
}

impl SubdomainSpec {
    pub fn new(lo: f64, hi: f64, delta: f64) -> Result<Self> {
        Interval::new(lo, hi)?;
        if !(delta > 0.0) {
            return Err(LabError::InvalidInput(format!(
                "delta must be positive, got {delta}"
            )));
        }
        let dist = if lo <= 0.0 && hi >= 0.0 {
            0.0
        } else {
            lo.abs().min(hi.abs())
        };
        if dist < delta {
            return Err(LabError::InvalidInput(format!(
                "subdomain ({lo}, {hi}) comes within {dist} of the origin, below delta = {delta}"
            )));
        }
        Ok(Self { lo, hi, delta })
    }

    /// Checks compact containment in the grid's domain.
    pub fn check_inside(&self, grid: &Grid1D) -> Result<()> {
        if self.lo > grid.a && self.hi < grid.b {
            Ok(())
        } else {
            Err(LabError::InvalidInput(format!(
                "subdomain ({}, {}) not compactly inside ({}, {})",
                self.lo, self.hi, grid.a, grid.b
            )))
        }
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Discrete L²(Ω₁) inner product `h Σ f_i g_i`.
pub fn l2_inner(f: &[f64], g: &[f64], grid: &Grid1D) -> Result<f64> {
    check_len(grid.len(), f.len())?;
    check_len(grid.len(), g.len())?;
    Ok(grid.h * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>())
}

pub fn l2_norm(f: &[f64], grid: &Grid1D) -> Result<f64> {
    l2_inner(f, f, grid).map(f64::sqrt)
}

/// Contiguous range of nodes strictly inside `(lo, hi)`; empty when the
/// interval misses every node.
pub fn restrict_to(grid: &Grid1D, interval: Interval) -> Range<usize> {
    let start = grid.nodes.partition_point(|&x| x <= interval.lo);
    let end = grid.nodes.partition_point(|&x| x < interval.hi);
    if start >= end {
        0..0
    } else {
        start..end
    }
}
