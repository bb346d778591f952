//! The explicit time-split scheme: per step, a half-step y-sweep, a
//! full-step x-sweep, and a second half-step y-sweep,
//!
//!   u*  = uⁿ  + (k/2)·( a·δ²_y uⁿ  + f(uⁿ) )
//!   u** = u*  +  k   ·   a·δ²_x u*
//!   uⁿ⁺¹ = u** + (k/2)·( a·δ²_y u** + f(u**) )
//!
//! applied on interior nodes, with every stage's boundary nodes filled
//! from the Dirichlet data at the *end-of-step* time t_{n+1}. The
//! reaction term rides along the two y-half-sweeps at k/2 apiece (one
//! full k per step) and is absent from the x-sweep.
//!
//! The symmetric composition is stable for 2·a·k/h² ≤ 1 — twice the time
//! step the unsplit forward-time centered-space scheme allows. Runs
//! beyond that bound are still well-defined here: divergence is detected
//! by a finiteness-and-magnitude guard and reported as data, not as an
//! error.

use alloc::vec::Vec;

use crate::grid::{delta2_x, delta2_y, l2_norm_interior, Grid, ScalarField};
use crate::problem::{Problem, SpaceTimeFn};

/// Magnitude at which a run is declared blown up even while still
/// finite; unstable runs overshoot any finite threshold within a step or
/// two, so the exact value is immaterial as long as it is far above
/// physical solution scales.
pub const OVERFLOW_GUARD: f64 = 1e15;

/// The three fields produced by one composed step.
#[derive(Debug, Clone)]
pub struct StepStages {
    /// After the first y-half-sweep.
    pub u_star: ScalarField,
    /// After the x-sweep.
    pub u_dstar: ScalarField,
    /// After the final y-half-sweep: the end-of-step solution.
    pub u_next: ScalarField,
}

/// Outcome of a complete (or aborted) time integration.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Solution at the last computed time level.
    pub final_field: ScalarField,
    /// Interior L² error against the exact solution, one entry per
    /// computed level starting at t = 0. Empty when the problem has no
    /// exact solution or recording was disabled. Ends at `blowup_step`
    /// when the run blew up.
    pub error_trace: Vec<f64>,
    /// Interior L² norm of the solution itself, same indexing.
    pub norm_trace: Vec<f64>,
    /// True when the guard tripped before reaching `t_final`.
    pub blew_up: bool,
    /// Step index (1-based time level) at which the guard tripped.
    pub blowup_step: Option<usize>,
    /// Wall-clock seconds spent integrating (0 without the `std`
    /// feature).
    pub wall_time: f64,
}

/// Stability margin 2·a·k/h² of the split scheme; ≤ 1 is stable, and
/// k = h²/2 with a = 1 sits exactly on the bound.
#[inline]
pub fn cfl_margin(a: f64, k: f64, h: f64) -> f64 {
    2.0 * a * k / (h * h)
}

/// Overwrites the four boundary edges (corners included) with the
/// Dirichlet data at time `t`.
pub fn fill_boundary(field: &mut ScalarField, phi: &SpaceTimeFn, t: f64) {
    let g = field.grid();
    let m = g.m;
    for s in 0..=m {
        let c = g.x(s);
        field[(s, 0)] = phi(c, 0.0, t);
        field[(s, m)] = phi(c, 1.0, t);
        field[(0, s)] = phi(0.0, c, t);
        field[(m, s)] = phi(1.0, c, t);
    }
}

/// True when the field left the trusted region: any non-finite node, or
/// any magnitude above [`OVERFLOW_GUARD`].
pub fn blow_up_detected(u: &ScalarField) -> bool {
    !u.all_finite() || u.max_abs() > OVERFLOW_GUARD
}

/// Shared kernel of the two y-half-sweeps: diffusion in y plus the
/// reaction term, both at half the time step, then the boundary fill at
/// `t_next`.
fn y_half_sweep(u: &ScalarField, p: &Problem, g: &Grid, t_next: f64) -> ScalarField {
    debug_assert_eq!(u.grid().m, g.m, "field/grid mismatch");
    let m = g.m;
    let half_k = 0.5 * g.k;
    let mut out = ScalarField::zeros(*g);
    for i in 1..m {
        for j in 1..m {
            let v = u[(i, j)];
            out[(i, j)] = v + half_k * (p.a * delta2_y(u, i, j) + (p.f)(v));
        }
    }
    fill_boundary(&mut out, &p.phi, t_next);
    out
}

/// First stage: y-diffusion and reaction over k/2.
pub fn stage_y_half(u: &ScalarField, p: &Problem, g: &Grid, t_next: f64) -> ScalarField {
    y_half_sweep(u, p, g, t_next)
}

/// Second stage: x-diffusion over the full step, no reaction.
pub fn stage_x_full(u: &ScalarField, p: &Problem, g: &Grid, t_next: f64) -> ScalarField {
    debug_assert_eq!(u.grid().m, g.m, "field/grid mismatch");
    let m = g.m;
    let k = g.k;
    let mut out = ScalarField::zeros(*g);
    for i in 1..m {
        for j in 1..m {
            out[(i, j)] = u[(i, j)] + k * (p.a * delta2_x(u, i, j));
        }
    }
    fill_boundary(&mut out, &p.phi, t_next);
    out
}

/// Third stage: identical operator to [`stage_y_half`] (same code path,
/// bit for bit), applied to the x-sweep output.
pub fn stage_y_half_final(u: &ScalarField, p: &Problem, g: &Grid, t_next: f64) -> ScalarField {
    y_half_sweep(u, p, g, t_next)
}

/// One composed step from level `n` to `n + 1`. All three stages fill
/// their boundaries from the Dirichlet data at t_{n+1}.
pub fn step(u: &ScalarField, p: &Problem, g: &Grid, n: usize) -> StepStages {
    let t_next = g.time_at(n + 1);
    let u_star = stage_y_half(u, p, g, t_next);
    let u_dstar = stage_x_full(&u_star, p, g, t_next);
    let u_next = stage_y_half_final(&u_dstar, p, g, t_next);
    StepStages {
        u_star,
        u_dstar,
        u_next,
    }
}

/// Interior L² norm of `u − exact(·, t)`, accumulated in the same fixed
/// order as [`l2_norm_interior`].
pub fn error_norm_at(u: &ScalarField, exact: &SpaceTimeFn, g: &Grid, t: f64) -> f64 {
    let m = g.m;
    let mut acc = 0.0;
    for j in 1..m {
        let y = g.y(j);
        for i in 1..m {
            let e = u[(i, j)] - exact(g.x(i), y, t);
            acc += e * e;
        }
    }
    g.h * crate::fmath::sqrt(acc)
}

/// Integrates the problem from t = 0 to `g.t_final`.
///
/// The initial field samples `u0` at every node, boundary included; each
/// step then re-imposes the Dirichlet data at its end-of-step time. After
/// each step the guard is checked: a blown-up run stops immediately, with
/// `blew_up`, `blowup_step`, and traces ending at the offending level
/// (whose entries may be huge or non-finite — they are recorded as-is).
///
/// Error recording happens when `record_errors` is set *and* the problem
/// carries an exact solution; the trace then holds the interior L² error
/// at every computed level, starting with t = 0.
pub fn solve(p: &Problem, g: &Grid, record_errors: bool) -> RunResult {
    #[cfg(feature = "std")]
    let clock = std::time::Instant::now();

    let mut u = ScalarField::from_fn(*g, |x, y| (p.u0)(x, y));
    let record = record_errors && p.exact.is_some();
    let mut norm_trace = Vec::with_capacity(g.n_steps + 1);
    let mut error_trace = Vec::with_capacity(if record { g.n_steps + 1 } else { 0 });

    norm_trace.push(l2_norm_interior(&u));
    if record {
        let exact = p.exact.as_ref().expect("checked above");
        error_trace.push(error_norm_at(&u, exact, g, 0.0));
    }

    let mut blew_up = false;
    let mut blowup_step = None;
    for n in 0..g.n_steps {
        u = step(&u, p, g, n).u_next;
        norm_trace.push(l2_norm_interior(&u));
        if record {
            let exact = p.exact.as_ref().expect("checked above");
            error_trace.push(error_norm_at(&u, exact, g, g.time_at(n + 1)));
        }
        if blow_up_detected(&u) {
            blew_up = true;
            blowup_step = Some(n + 1);
            break;
        }
    }

    #[cfg(feature = "std")]
    let wall_time = clock.elapsed().as_secs_f64();
    #[cfg(not(feature = "std"))]
    let wall_time = 0.0;

    RunResult {
        final_field: u,
        error_trace,
        norm_trace,
        blew_up,
        blowup_step,
        wall_time,
    }
}
