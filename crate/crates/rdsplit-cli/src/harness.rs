//! Refinement-study driver and table rendering.
//!
//! A *study* runs one test problem over a ladder of grids (spacing halved
//! level to level) at a fixed time-step coupling, summarizes each run's
//! error trace into three time-aggregated norms, and derives
//! coarse-to-fine convergence ratios and observed orders. Results render
//! as CSV (machine-friendly, lossless floats) or markdown (rounded, in
//! the layout of the reference tables).
//!
//! The module also hosts [`ftcs_oracle_solve`], an unsplit forward-time
//! centered-space integrator. It is deliberately kept here rather than in
//! the core crate: it exists purely to cross-validate the split scheme
//! against an independent discretization of the same PDE, and must not be
//! mistaken for part of the production algorithm.

use std::fmt;
use std::fmt::Write as _;

use rdsplit_core::grid::{delta2_x, delta2_y, l2_norm_interior, Grid, GridError, ScalarField};
use rdsplit_core::metrics::{
    convergence_ratio, observed_order, summarize_errors, MetricsError,
};
use rdsplit_core::problem::{
    manufactured_exponential, manufactured_tanh, Problem, ProblemError,
};
use rdsplit_core::scheme::{
    blow_up_detected, cfl_margin, error_norm_at, fill_boundary, solve, RunResult,
};
use thiserror::Error;

/// Tolerance for `k·n_steps` reproducing the time horizon.
const ROUNDTRIP_TOL: f64 = 1e-12;

/// Errors from study configuration and execution.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown test id {id}; valid ids are 1, 2, 3")]
    UnknownTest { id: u32 },
    #[error("study levels must form a doubling ladder of grid sizes ≥ 2, got {got:?}")]
    BadLadder { got: Vec<usize> },
    #[error(
        "time step {k} does not divide the horizon {t_final} (k·N misses by {gap:e}); \
         choose a horizon commensurate with the coupling"
    )]
    TimeStepMismatch { k: f64, t_final: f64, gap: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Time-step coupling of a study: `k = h²/2` sits exactly on the split
/// scheme's stability bound, `k = h²` doubles it to probe the unstable
/// regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `k = h²/2` (stability margin 1).
    Half,
    /// `k = h²` (stability margin 2, intentionally unstable).
    Full,
}

impl Coupling {
    /// Time step for spacing `h`.
    pub fn time_step(self, h: f64) -> f64 {
        match self {
            Coupling::Half => 0.5 * h * h,
            Coupling::Full => h * h,
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coupling::Half => "half",
            Coupling::Full => "full",
        })
    }
}

impl std::str::FromStr for Coupling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half" => Ok(Coupling::Half),
            "full" => Ok(Coupling::Full),
            other => Err(format!("coupling must be 'half' or 'full', got '{other}'")),
        }
    }
}

/// Output format for rendered tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Lossless, machine-friendly; one header plus one line per row.
    Csv,
    /// Rounded display mirroring the reference-table layout.
    Markdown,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Markdown => "markdown",
        })
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" => Ok(Format::Markdown),
            other => Err(format!("format must be 'csv' or 'markdown', got '{other}'")),
        }
    }
}

/// One refinement level of a study. Error cells are `None` when the run
/// diverged; ratio/order cells are `None` on the first row, on diverged
/// rows, and on any row whose coarser neighbor diverged.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub h: f64,
    pub k: f64,
    /// Stability margin 2·a·k/h².
    pub cfl: f64,
    pub l2: Option<f64>,
    pub linf: Option<f64>,
    pub l1: Option<f64>,
    pub r2: Option<f64>,
    pub rinf: Option<f64>,
    pub r1: Option<f64>,
    pub order2: Option<f64>,
    pub orderinf: Option<f64>,
    pub order1: Option<f64>,
}

impl StudyRow {
    /// True when the run behind this row blew up.
    pub fn diverged(&self) -> bool {
        self.l2.is_none()
    }
}

/// A completed refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub test_id: u32,
    pub coupling: Coupling,
    pub rows: Vec<StudyRow>,
}

/// Builds one of the three shipped manufactured test problems.
///
/// * 1 — sigmoid exponential wave, `f(u) = (1 − u)·u²`
/// * 2 — shifted exponential wave, `f(u) = 1 − u`
/// * 3 — tanh front, `f(u) = (1 − u²)·u`
///
/// # Errors
///
/// [`HarnessError::UnknownTest`] for any other id, listing the valid ones.
pub fn make_problem(test_id: u32) -> Result<Problem, HarnessError> {
    let d = 3f64.sqrt() / 3.0;
    let b = 6f64.sqrt() / 6.0;
    let mut p = match test_id {
        1 => manufactured_exponential(1, d, b)?,
        2 => manufactured_exponential(-1, d, b)?,
        3 => manufactured_tanh(),
        id => return Err(HarnessError::UnknownTest { id }),
    };
    p.label = format!("test{test_id}");
    Ok(p)
}

/// Builds the grid for one study level: `h = 1/m`, `k` from the
/// coupling, and `N = round(t_final/k)` checked to reproduce the horizon
/// to 1e−12.
pub fn grid_for(m: usize, coupling: Coupling, t_final: f64) -> Result<Grid, HarnessError> {
    let h = 1.0 / m as f64;
    let k = coupling.time_step(h);
    let n_steps = (t_final / k).round() as usize;
    let gap = (k * n_steps as f64 - t_final).abs();
    if n_steps == 0 || gap > ROUNDTRIP_TOL * t_final.max(1.0) {
        return Err(HarnessError::TimeStepMismatch { k, t_final, gap });
    }
    Ok(Grid::new(m, n_steps, t_final)?)
}

fn validate_ladder(levels: &[usize]) -> Result<(), HarnessError> {
    let bad = || HarnessError::BadLadder {
        got: levels.to_vec(),
    };
    if levels.is_empty() {
        return Err(bad());
    }
    for &m in levels {
        if m < 2 || !m.is_power_of_two() {
            return Err(bad());
        }
    }
    for pair in levels.windows(2) {
        if pair[1] != 2 * pair[0] {
            return Err(bad());
        }
    }
    Ok(())
}

/// Runs one test problem over a doubling ladder of grid sizes and
/// assembles the error-norm table.
///
/// Each level solves with the split scheme at the chosen coupling and
/// summarizes its error trace. Diverged runs yield rows with empty error
/// cells; ratios are emitted only between two adjacent completed rows.
///
/// # Errors
///
/// [`HarnessError::UnknownTest`] for a bad id, [`HarnessError::BadLadder`]
/// unless `levels` is a doubling ladder of powers of two (≥ 2), and
/// [`HarnessError::TimeStepMismatch`] when the horizon is not an integer
/// multiple of a level's time step.
pub fn run_study(
    test_id: u32,
    coupling: Coupling,
    levels: &[usize],
    t_final: f64,
) -> Result<StudyTable, HarnessError> {
    let p = make_problem(test_id)?;
    validate_ladder(levels)?;

    let mut rows: Vec<StudyRow> = Vec::with_capacity(levels.len());
    for &m in levels {
        let g = grid_for(m, coupling, t_final)?;
        let result = solve(&p, &g, true);
        let summary = if result.blew_up {
            None
        } else {
            Some(summarize_errors(&result.error_trace, &g)?)
        };

        let prev = rows.last();
        let ratio_against = |get: fn(&StudyRow) -> Option<f64>, fine: Option<f64>| {
            let coarse = prev.and_then(get)?;
            convergence_ratio(coarse, fine?)
        };
        let l2 = summary.map(|s| s.l2_l2);
        let linf = summary.map(|s| s.linf_l2);
        let l1 = summary.map(|s| s.l1_l2);
        let r2 = ratio_against(|r| r.l2, l2);
        let rinf = ratio_against(|r| r.linf, linf);
        let r1 = ratio_against(|r| r.l1, l1);
        rows.push(StudyRow {
            h: g.h,
            k: g.k,
            cfl: cfl_margin(p.a, g.k, g.h),
            l2,
            linf,
            l1,
            r2,
            rinf,
            r1,
            order2: r2.and_then(observed_order),
            orderinf: rinf.and_then(observed_order),
            order1: r1.and_then(observed_order),
        });
    }
    Ok(StudyTable {
        test_id,
        coupling,
        rows,
    })
}

/// Unsplit forward-time centered-space (FTCS) integrator used only to
/// cross-validate the split scheme:
///
///   uⁿ⁺¹ = uⁿ + k·( a·(δ²_x + δ²_y)uⁿ + f(uⁿ) )
///
/// on interior nodes, boundaries from the Dirichlet data at t_{n+1}.
/// Stable for 4·a·k/h² ≤ 1 (half the split scheme's step); callers
/// normally pick `k = h²/4`. Same result contract as
/// [`rdsplit_core::scheme::solve`], including the blow-up guard —
/// divergence is data, not an error.
pub fn ftcs_oracle_solve(p: &Problem, g: &Grid) -> RunResult {
    let clock = std::time::Instant::now();

    let mut u = ScalarField::from_fn(*g, |x, y| (p.u0)(x, y));
    let mut norm_trace = Vec::with_capacity(g.n_steps + 1);
    let mut error_trace = Vec::with_capacity(g.n_steps + 1);

    let record = p.exact.is_some();
    norm_trace.push(l2_norm_interior(&u));
    if let Some(ref exact) = p.exact {
        error_trace.push(error_norm_at(&u, exact, g, 0.0));
    }

    let m = g.m;
    let k = g.k;
    let mut blew_up = false;
    let mut blowup_step = None;
    for n in 0..g.n_steps {
        let t_next = g.time_at(n + 1);
        let mut next = ScalarField::zeros(*g);
        for i in 1..m {
            for j in 1..m {
                let v = u[(i, j)];
                next[(i, j)] =
                    v + k * (p.a * delta2_x(&u, i, j) + p.a * delta2_y(&u, i, j) + (p.f)(v));
            }
        }
        fill_boundary(&mut next, &p.phi, t_next);
        u = next;
        norm_trace.push(l2_norm_interior(&u));
        if record {
            let exact = p.exact.as_ref().expect("checked above");
            error_trace.push(error_norm_at(&u, exact, g, t_next));
        }
        if blow_up_detected(&u) {
            blew_up = true;
            blowup_step = Some(n + 1);
            break;
        }
    }

    RunResult {
        final_field: u,
        error_trace,
        norm_trace,
        blew_up,
        blowup_step,
        wall_time: clock.elapsed().as_secs_f64(),
    }
}

/// CSV header emitted by [`render_table`].
pub const CSV_HEADER: &str =
    "test,coupling,h,k,cfl,l2,linf,l1,r2,rinf,r1,order2,orderinf,order1";

/// Marker for diverged error cells.
const DIVERGED: &str = "NAN";
/// Marker for undefined ratio/order cells in markdown output.
const UNDEFINED: &str = "----";

fn csv_cell(v: Option<f64>) -> String {
    // Plain `Display` prints the shortest round-trip decimal, so CSV
    // output is lossless and byte-stable.
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_error_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string())
        .unwrap_or_else(|| DIVERGED.to_string())
}

fn md_error_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4e}"))
        .unwrap_or_else(|| DIVERGED.to_string())
}

fn md_ratio_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}"))
        .unwrap_or_else(|| UNDEFINED.to_string())
}

/// Spacing label `2^-p` when `1/h` is a power of two, else plain.
fn spacing_label(h: f64) -> String {
    let inv = 1.0 / h;
    if inv.fract() == 0.0 && inv >= 1.0 && (inv as u64).is_power_of_two() {
        format!("2^-{}", (inv as u64).trailing_zeros())
    } else {
        h.to_string()
    }
}

/// Renders a study table.
///
/// CSV: fixed header `test,coupling,h,k,cfl,l2,linf,l1,r2,rinf,r1,order2,
/// orderinf,order1`, floats as shortest round-trip decimals, diverged
/// error cells as the literal `NAN`, undefined ratio/order cells empty.
///
/// Markdown: one table in the reference layout (`h | L2 | r | Linf | r |
/// L1 | r`), errors rounded to 4 significant places, `NAN` for diverged
/// cells and `----` for undefined ratios.
pub fn render_table(table: &StudyTable, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in &table.rows {
                let cells = [
                    table.test_id.to_string(),
                    table.coupling.to_string(),
                    row.h.to_string(),
                    row.k.to_string(),
                    row.cfl.to_string(),
                    csv_error_cell(row.l2),
                    csv_error_cell(row.linf),
                    csv_error_cell(row.l1),
                    csv_cell(row.r2),
                    csv_cell(row.rinf),
                    csv_cell(row.r1),
                    csv_cell(row.order2),
                    csv_cell(row.orderinf),
                    csv_cell(row.order1),
                ];
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Markdown => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "Test {} errors, coupling={} (k = {})",
                table.test_id,
                table.coupling,
                match table.coupling {
                    Coupling::Half => "h^2/2",
                    Coupling::Full => "h^2",
                }
            );
            out.push('\n');
            out.push_str("| h | L2 | r | Linf | r | L1 | r |\n");
            out.push_str("|---|----|---|------|---|----|---|\n");
            for row in &table.rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    spacing_label(row.h),
                    md_error_cell(row.l2),
                    md_ratio_cell(row.r2),
                    md_error_cell(row.linf),
                    md_ratio_cell(row.rinf),
                    md_error_cell(row.l1),
                    md_ratio_cell(row.r1),
                );
            }
            out
        }
    }
}
