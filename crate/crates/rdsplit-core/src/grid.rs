//! Uniform collocated grid on the unit square, scalar fields, centered
//! second differences, the interior discrete L² norm, and two self-check
//! operators used by the test suite: a discrete summation-by-parts
//! identity and a truncation-order probe for the second-difference
//! stencil.
//!
//! Conventions used throughout the crate:
//!
//! * The square is divided into `m` intervals per axis, so nodes are
//!   `(x_i, y_j) = (i·h, j·h)` for `0 ≤ i, j ≤ m` with `h = 1/m`.
//! * Time levels are `t_n = n·k` for `0 ≤ n ≤ n_steps` with
//!   `k = t_final / n_steps`.
//! * A [`ScalarField`] stores one value per node in row-major order with
//!   the x-index `i` outermost: element `(i, j)` lives at `i·(m+1) + j`.
//! * "Interior" always means `1 ≤ i, j ≤ m − 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::fmath;

/// Relative tolerance for the grid's self-consistency invariants.
const SPACING_TOL: f64 = 1e-12;

/// Errors from grid construction and the grid-level check operators.
#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    /// Fewer than two intervals per axis: there would be no interior.
    TooCoarse { m: usize },
    /// A grid must have at least one time step.
    NoTimeSteps,
    /// The time horizon must be positive and finite.
    NonPositiveHorizon { t_final: f64 },
    /// `h·m` drifted away from 1 or `k·n` from `t_final`.
    SpacingDrift { relative_error: f64 },
    /// `sbp_identity_residual` requires the field to vanish on the
    /// boundary.
    NonzeroBoundary { i: usize, j: usize, value: f64 },
    /// `truncation_order_probe` needs at least two spacings to say
    /// anything about an order.
    TooFewProbeLevels { got: usize },
    /// A probe spacing must be positive and smaller than the interval.
    BadProbeSpacing { h: f64 },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::TooCoarse { m } => {
                write!(f, "grid needs at least 2 intervals per axis, got m={m}")
            }
            GridError::NoTimeSteps => write!(f, "grid needs at least 1 time step"),
            GridError::NonPositiveHorizon { t_final } => {
                write!(f, "time horizon must be positive and finite, got {t_final}")
            }
            GridError::SpacingDrift { relative_error } => write!(
                f,
                "grid spacing inconsistent with extent (relative error {relative_error:e})"
            ),
            GridError::NonzeroBoundary { i, j, value } => write!(
                f,
                "field must vanish on the boundary, found {value} at ({i}, {j})"
            ),
            GridError::TooFewProbeLevels { got } => {
                write!(f, "truncation probe needs at least 2 spacings, got {got}")
            }
            GridError::BadProbeSpacing { h } => {
                write!(f, "probe spacing must be positive and fit the interval, got {h}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridError {}

/// Uniform space-time grid on the unit square.
///
/// `h = 1/m` is the node spacing in both x and y; `k = t_final/n_steps`
/// is the time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Intervals per spatial axis; nodes run `0..=m`.
    pub m: usize,
    /// Number of time steps; levels run `0..=n_steps`.
    pub n_steps: usize,
    /// Final time.
    pub t_final: f64,
    /// Spatial node spacing, `1/m`.
    pub h: f64,
    /// Time step, `t_final/n_steps`.
    pub k: f64,
}

impl Grid {
    /// Builds the grid and checks its invariants: `m ≥ 2`, `n_steps ≥ 1`,
    /// `t_final > 0`, and the derived spacings reproduce the extents to
    /// relative precision 1e−12.
    pub fn new(m: usize, n_steps: usize, t_final: f64) -> Result<Grid, GridError> {
        if m < 2 {
            return Err(GridError::TooCoarse { m });
        }
        if n_steps == 0 {
            return Err(GridError::NoTimeSteps);
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(GridError::NonPositiveHorizon { t_final });
        }
        let h = 1.0 / m as f64;
        let k = t_final / n_steps as f64;
        let h_drift = fmath::abs(h * m as f64 - 1.0);
        let k_drift = fmath::abs(k * n_steps as f64 - t_final) / t_final;
        let relative_error = fmath::max(h_drift, k_drift);
        if relative_error > SPACING_TOL {
            return Err(GridError::SpacingDrift { relative_error });
        }
        Ok(Grid {
            m,
            n_steps,
            t_final,
            h,
            k,
        })
    }

    /// Nodes per axis, `m + 1`.
    #[inline]
    pub fn nodes(&self) -> usize {
        self.m + 1
    }

    /// x-coordinate of column `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// y-coordinate of row `j`.
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Time at level `n`.
    #[inline]
    pub fn time_at(&self, n: usize) -> f64 {
        n as f64 * self.k
    }

    /// True for nodes strictly inside the square.
    #[inline]
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.m - 1 && j >= 1 && j <= self.m - 1
    }
}

/// One `f64` value per grid node, stored row-major with the x-index
/// outermost: `(i, j)` lives at `i·(m+1) + j`, so a y-sweep at fixed `i`
/// walks contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    /// All-zero field.
    pub fn zeros(grid: Grid) -> ScalarField {
        ScalarField {
            grid,
            values: vec![0.0; grid.nodes() * grid.nodes()],
        }
    }

    /// Constant field.
    pub fn constant(grid: Grid, value: f64) -> ScalarField {
        ScalarField {
            grid,
            values: vec![value; grid.nodes() * grid.nodes()],
        }
    }

    /// Samples `v(x_i, y_j)` at every node.
    pub fn from_fn<V: Fn(f64, f64) -> f64>(grid: Grid, v: V) -> ScalarField {
        let nodes = grid.nodes();
        let mut values = Vec::with_capacity(nodes * nodes);
        for i in 0..nodes {
            let x = grid.x(i);
            for j in 0..nodes {
                values.push(v(x, grid.y(j)));
            }
        }
        ScalarField { grid, values }
    }

    /// The grid this field lives on.
    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Raw node values in storage order.
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(
            i < self.grid.nodes() && j < self.grid.nodes(),
            "node index ({i}, {j}) out of range for m={}",
            self.grid.m
        );
        i * self.grid.nodes() + j
    }

    /// True when every node holds a finite value. O(m²).
    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest absolute node value; NaN-free fields only give meaningful
    /// answers, but NaN inputs still land above any guard threshold
    /// because [`all_finite`](Self::all_finite) is checked first by
    /// callers.
    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0;
        for &v in &self.values {
            let a = fmath::abs(v);
            if a > worst {
                worst = a;
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for ScalarField {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.values[self.idx(i, j)]
    }
}

impl IndexMut<(usize, usize)> for ScalarField {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        let idx = self.idx(i, j);
        &mut self.values[idx]
    }
}

/// Centered second difference in x:
/// `(f[i+1,j] − 2·f[i,j] + f[i−1,j]) / h²`.
///
/// # Panics
///
/// The stencil needs both x-neighbors: requires `1 ≤ i ≤ m−1` and
/// `j ≤ m`. Violations are programming errors and panic with the
/// offending indices.
#[inline]
pub fn delta2_x(field: &ScalarField, i: usize, j: usize) -> f64 {
    let m = field.grid().m;
    assert!(
        i >= 1 && i <= m - 1 && j <= m,
        "delta2_x stencil out of range: i={i}, j={j}, m={m}"
    );
    let h = field.grid().h;
    (field[(i + 1, j)] - 2.0 * field[(i, j)] + field[(i - 1, j)]) / (h * h)
}

/// Centered second difference in y:
/// `(f[i,j+1] − 2·f[i,j] + f[i,j−1]) / h²`.
///
/// # Panics
///
/// The stencil needs both y-neighbors: requires `1 ≤ j ≤ m−1` and
/// `i ≤ m`. Violations are programming errors and panic with the
/// offending indices.
#[inline]
pub fn delta2_y(field: &ScalarField, i: usize, j: usize) -> f64 {
    let m = field.grid().m;
    assert!(
        j >= 1 && j <= m - 1 && i <= m,
        "delta2_y stencil out of range: i={i}, j={j}, m={m}"
    );
    let h = field.grid().h;
    (field[(i, j + 1)] - 2.0 * field[(i, j)] + field[(i, j - 1)]) / (h * h)
}

/// Discrete L² norm over interior nodes:
/// `h · sqrt( Σ_{i,j=1}^{m−1} f[i,j]² )`.
///
/// The summation order is fixed (j outer, i inner) so the result is
/// bit-reproducible. Non-finite entries propagate to a non-finite result
/// rather than raising an error; divergence is data here.
pub fn l2_norm_interior(field: &ScalarField) -> f64 {
    let m = field.grid().m;
    let mut acc = 0.0;
    for j in 1..m {
        for i in 1..m {
            let v = field[(i, j)];
            acc += v * v;
        }
    }
    field.grid().h * fmath::sqrt(acc)
}

/// Residual of the discrete summation-by-parts identity
///
/// `h² Σ (δ_x² e)·e  +  ‖δ_x e‖²  =  0`
///
/// for fields `e` that vanish on the boundary, where the first sum runs
/// over interior nodes and
/// `‖δ_x e‖² = h² Σ_{j=1}^{m−1} Σ_{i=0}^{m−1} ((e[i+1,j] − e[i,j])/h)²`.
/// Returns the absolute residual, which is pure floating-point noise
/// (≤ 1e−12·(1 + ‖e‖²) in practice).
///
/// # Errors
///
/// [`GridError::NonzeroBoundary`] when any boundary node is nonzero; the
/// identity does not hold otherwise.
pub fn sbp_identity_residual(e: &ScalarField) -> Result<f64, GridError> {
    let m = e.grid().m;
    for i in 0..=m {
        for &j in &[0, m] {
            if e[(i, j)] != 0.0 {
                return Err(GridError::NonzeroBoundary { i, j, value: e[(i, j)] });
            }
            if e[(j, i)] != 0.0 {
                return Err(GridError::NonzeroBoundary { i: j, j: i, value: e[(j, i)] });
            }
        }
    }

    let h = e.grid().h;
    let h2 = h * h;
    let mut bilinear = 0.0;
    for j in 1..m {
        for i in 1..m {
            bilinear += delta2_x(e, i, j) * e[(i, j)];
        }
    }
    bilinear *= h2;

    let mut grad_sq = 0.0;
    for j in 1..m {
        for i in 0..m {
            let d = (e[(i + 1, j)] - e[(i, j)]) / h;
            grad_sq += d * d;
        }
    }
    grad_sq *= h2;

    Ok(fmath::abs(bilinear + grad_sq))
}

/// Measures the truncation error of the 1D centered second difference
/// against a known second derivative.
///
/// For each spacing in `h_levels`, evaluates
/// `max_x |(v(x+h) − 2·v(x) + v(x−h))/h² − v_dd(x)|` over the interior
/// nodes `x = lo + i·h` of `interval`, and returns `(h, max_residual)`
/// pairs in the order given. Successive residual ratios near 4 under
/// spacing halving confirm the stencil's second-order truncation.
///
/// # Errors
///
/// [`GridError::TooFewProbeLevels`] with fewer than two spacings;
/// [`GridError::BadProbeSpacing`] when a spacing is not positive or does
/// not fit inside the interval.
pub fn truncation_order_probe<V, W>(
    v: V,
    v_dd: W,
    interval: (f64, f64),
    h_levels: &[f64],
) -> Result<Vec<(f64, f64)>, GridError>
where
    V: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    if h_levels.len() < 2 {
        return Err(GridError::TooFewProbeLevels { got: h_levels.len() });
    }
    let (lo, hi) = interval;
    let width = hi - lo;
    let mut out = Vec::with_capacity(h_levels.len());
    for &h in h_levels {
        if !(h > 0.0) || h >= width {
            return Err(GridError::BadProbeSpacing { h });
        }
        let nodes = (width / h + 0.5) as usize;
        let mut worst = 0.0;
        for i in 1..nodes {
            let x = lo + i as f64 * h;
            let d2 = (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h);
            let r = fmath::abs(d2 - v_dd(x));
            if r > worst {
                worst = r;
            }
        }
        out.push((h, worst));
    }
    Ok(out)
}
