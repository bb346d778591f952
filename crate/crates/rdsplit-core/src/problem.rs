//! Problem definitions for u_t − a·Δu = f(u) on the unit square with
//! Dirichlet boundary data, factories for three manufactured solutions
//! with closed forms, and an independent finite-difference residual check
//! that confirms a claimed exact solution actually satisfies the PDE.
//!
//! The manufactured families used here:
//!
//! * [`manufactured_exponential`] builds travelling-wave solutions
//!   `ū = (1 + exp(c·t + d·x + b·y))^(−n)` for `n ∈ {1, −1}` with
//!   `c = −(d² + b²)`. The wave speeds must satisfy `2(d² + b²) = 1`,
//!   which is exactly the normalization that makes the reaction term a
//!   polynomial in `u`: `f(u) = (1 − u)·u²` for `n = 1` and
//!   `f(u) = 1 − u` for `n = −1`.
//! * [`manufactured_tanh`] builds the travelling front
//!   `ū = 1/2 + tanh(3t/4 + x/4 + y/4)/2` with `f(u) = (1 − u²)·u`.
//!
//! All three have diffusivity `a = 1`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use core::fmt;

use crate::fmath;

/// Pointwise reaction term, `u ↦ f(u)`.
pub type ReactionFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
/// Initial data, `(x, y) ↦ u(x, y, 0)`.
pub type InitialFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Space-time data such as boundary values or an exact solution,
/// `(x, y, t) ↦ u`.
pub type SpaceTimeFn = Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Tolerance for the initial/boundary compatibility checks.
const COMPAT_TOL: f64 = 1e-12;
/// Grid intervals used to sample the compatibility checks.
const COMPAT_SAMPLES: usize = 16;

/// Errors from problem construction and the residual check.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    /// Diffusivity must be positive and finite.
    NonPositiveDiffusivity { a: f64 },
    /// Boundary data disagrees with initial data at t = 0.
    IncompatibleData { x: f64, y: f64, gap: f64 },
    /// A supplied exact solution disagrees with the boundary or initial
    /// data it is supposed to generate.
    ExactMismatch { x: f64, y: f64, t: f64, gap: f64 },
    /// The exponential family requires 2(d² + b²) = 1.
    BadExponentParams { normalization: f64 },
    /// Only n ∈ {1, −1} give polynomial reaction terms.
    UnsupportedExponent { n_exp: i32 },
    /// `residual_check` needs an exact solution to check.
    NoExactSolution,
    /// The finite-difference step must lie strictly inside (1e−6, 1e−2).
    BadFdStep { fd_step: f64 },
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::NonPositiveDiffusivity { a } => {
                write!(f, "diffusivity must be positive and finite, got {a}")
            }
            ProblemError::IncompatibleData { x, y, gap } => write!(
                f,
                "boundary data and initial data disagree at ({x}, {y}, 0) by {gap:e}"
            ),
            ProblemError::ExactMismatch { x, y, t, gap } => write!(
                f,
                "exact solution disagrees with problem data at ({x}, {y}, {t}) by {gap:e}"
            ),
            ProblemError::BadExponentParams { normalization } => write!(
                f,
                "exponential family requires 2(d² + b²) = 1, got {normalization}"
            ),
            ProblemError::UnsupportedExponent { n_exp } => write!(
                f,
                "exponential family supports n ∈ {{1, −1}}, got {n_exp}"
            ),
            ProblemError::NoExactSolution => write!(f, "no exact solution to check"),
            ProblemError::BadFdStep { fd_step } => write!(
                f,
                "finite-difference step must lie in (1e-6, 1e-2), got {fd_step}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ProblemError {}

/// A reaction-diffusion problem instance: coefficients, data, and an
/// optional exact solution for error measurement.
pub struct Problem {
    /// Diffusivity, strictly positive.
    pub a: f64,
    /// Pointwise reaction term.
    pub f: ReactionFn,
    /// Initial data at t = 0.
    pub u0: InitialFn,
    /// Dirichlet boundary data, defined for all t ≥ 0.
    pub phi: SpaceTimeFn,
    /// Exact solution when one is known; enables error traces.
    pub exact: Option<SpaceTimeFn>,
    /// Display name.
    pub label: String,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("a", &self.a)
            .field("label", &self.label)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl Problem {
    /// Builds a problem and validates its data: `a > 0`, boundary and
    /// initial data agree at t = 0 on the boundary of a 16×16 sample
    /// grid, and any exact solution reproduces both `phi` (sampled at
    /// unit-interval times) and `u0` to 1e−12.
    pub fn new(
        a: f64,
        f: ReactionFn,
        u0: InitialFn,
        phi: SpaceTimeFn,
        exact: Option<SpaceTimeFn>,
        label: String,
    ) -> Result<Problem, ProblemError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(ProblemError::NonPositiveDiffusivity { a });
        }
        let m = COMPAT_SAMPLES;
        let h = 1.0 / m as f64;
        // Boundary ring at t = 0: phi must extend u0 continuously.
        for s in 0..=m {
            let c = s as f64 * h;
            for &(x, y) in &[(c, 0.0), (c, 1.0), (0.0, c), (1.0, c)] {
                let gap = fmath::abs(phi(x, y, 0.0) - u0(x, y));
                if gap > COMPAT_TOL {
                    return Err(ProblemError::IncompatibleData { x, y, gap });
                }
            }
        }
        if let Some(ref ex) = exact {
            for s in 0..=m {
                let c = s as f64 * h;
                for &t in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                    for &(x, y) in &[(c, 0.0), (c, 1.0), (0.0, c), (1.0, c)] {
                        let gap = fmath::abs(phi(x, y, t) - ex(x, y, t));
                        if gap > COMPAT_TOL {
                            return Err(ProblemError::ExactMismatch { x, y, t, gap });
                        }
                    }
                }
            }
            for i in 0..=m {
                for j in 0..=m {
                    let (x, y) = (i as f64 * h, j as f64 * h);
                    let gap = fmath::abs(u0(x, y) - ex(x, y, 0.0));
                    if gap > COMPAT_TOL {
                        return Err(ProblemError::ExactMismatch { x, y, t: 0.0, gap });
                    }
                }
            }
        }
        Ok(Problem {
            a,
            f,
            u0,
            phi,
            exact,
            label,
        })
    }
}

/// Builds a travelling-wave problem from the exponential family
/// `ū = (1 + exp(c·t + d·x + b·y))^(−n)` with `c = −(d² + b²)`.
///
/// `n_exp = 1` gives a sigmoid profile decaying from 1 to 0 with the
/// bistable-style reaction `f(u) = (1 − u)·u²`; `n_exp = −1` gives the
/// shifted exponential `1 + exp(...)` with the linear reaction
/// `f(u) = 1 − u`. Both require the wave-speed normalization
/// `2(d² + b²) = 1`, without which the closed forms stop solving the PDE.
///
/// # Errors
///
/// [`ProblemError::UnsupportedExponent`] for other `n_exp`;
/// [`ProblemError::BadExponentParams`] when `2(d² + b²)` is not 1 to
/// 1e−12.
pub fn manufactured_exponential(n_exp: i32, d: f64, b: f64) -> Result<Problem, ProblemError> {
    if n_exp != 1 && n_exp != -1 {
        return Err(ProblemError::UnsupportedExponent { n_exp });
    }
    let normalization = 2.0 * (d * d + b * b);
    if fmath::abs(normalization - 1.0) > 1e-12 {
        return Err(ProblemError::BadExponentParams { normalization });
    }
    let c = -(d * d + b * b);

    let wave = move |x: f64, y: f64, t: f64| -> f64 {
        let e = fmath::exp(c * t + d * x + b * y);
        if n_exp == 1 {
            1.0 / (1.0 + e)
        } else {
            1.0 + e
        }
    };

    let f: ReactionFn = if n_exp == 1 {
        Box::new(|u: f64| (1.0 - u) * u * u)
    } else {
        Box::new(|u: f64| 1.0 - u)
    };
    let u0: InitialFn = Box::new(move |x, y| wave(x, y, 0.0));
    let phi: SpaceTimeFn = Box::new(wave);
    let exact: SpaceTimeFn = Box::new(wave);
    let label = format!("exponential-wave(n={n_exp}, d={d:.6}, b={b:.6})");
    Problem::new(1.0, f, u0, phi, Some(exact), label)
}

/// Builds the travelling-front problem
/// `ū = 1/2 + tanh(3t/4 + x/4 + y/4)/2` with reaction
/// `f(u) = (1 − u²)·u` and `a = 1`.
pub fn manufactured_tanh() -> Problem {
    let front = |x: f64, y: f64, t: f64| 0.5 + 0.5 * fmath::tanh(0.75 * t + 0.25 * x + 0.25 * y);
    let f: ReactionFn = Box::new(|u: f64| (1.0 - u * u) * u);
    let u0: InitialFn = Box::new(move |x, y| front(x, y, 0.0));
    let phi: SpaceTimeFn = Box::new(front);
    let exact: SpaceTimeFn = Box::new(front);
    Problem::new(1.0, f, u0, phi, Some(exact), String::from("tanh-front"))
        .expect("tanh front data is self-consistent")
}

/// Plastic constant; generates a 3D low-discrepancy (quasi-random)
/// sequence for residual sampling.
const PLASTIC: f64 = 1.2207440846057595;

/// Checks that a problem's claimed exact solution satisfies
/// `u_t − a·Δu = f(u)` by brute force: all derivatives are replaced by
/// centered finite differences with step `fd_step`, evaluated at
/// `sample_count` quasi-random space-time points well inside
/// `(0,1)² × (0,1)`, and the largest absolute residual is returned.
///
/// Small results (order `fd_step²`) confirm the solution; a wrong
/// reaction term or solution shows up at full magnitude.
///
/// # Errors
///
/// [`ProblemError::NoExactSolution`] when the problem has no exact
/// solution; [`ProblemError::BadFdStep`] when `fd_step` is outside
/// (1e−6, 1e−2), where the check would drown in roundoff or truncation.
pub fn residual_check(
    p: &Problem,
    sample_count: usize,
    fd_step: f64,
) -> Result<f64, ProblemError> {
    let ex = p.exact.as_ref().ok_or(ProblemError::NoExactSolution)?;
    if !(fd_step > 1e-6) || !(fd_step < 1e-2) {
        return Err(ProblemError::BadFdStep { fd_step });
    }
    let a1 = 1.0 / PLASTIC;
    let a2 = 1.0 / (PLASTIC * PLASTIC);
    let a3 = 1.0 / (PLASTIC * PLASTIC * PLASTIC);
    let frac = |v: f64| v - fmath::floor(v);
    let s = fd_step;
    let mut worst = 0.0;
    for m in 1..=sample_count {
        let x = 0.05 + 0.9 * frac(0.5 + a1 * m as f64);
        let y = 0.05 + 0.9 * frac(0.5 + a2 * m as f64);
        let t = 0.05 + 0.9 * frac(0.5 + a3 * m as f64);
        let u = ex(x, y, t);
        let u_t = (ex(x, y, t + s) - ex(x, y, t - s)) / (2.0 * s);
        let u_xx = (ex(x + s, y, t) - 2.0 * u + ex(x - s, y, t)) / (s * s);
        let u_yy = (ex(x, y + s, t) - 2.0 * u + ex(x, y - s, t)) / (s * s);
        let r = fmath::abs(u_t - p.a * (u_xx + u_yy) - (p.f)(u));
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigmoid_speeds() -> (f64, f64) {
        (3f64.sqrt() / 3.0, 6f64.sqrt() / 6.0)
    }

    fn sigmoid_wave() -> Problem {
        let (d, b) = sigmoid_speeds();
        manufactured_exponential(1, d, b).unwrap()
    }

    fn shifted_exponential() -> Problem {
        let (d, b) = sigmoid_speeds();
        manufactured_exponential(-1, d, b).unwrap()
    }

    #[test]
    fn sigmoid_wave_has_expected_closed_form_values() {
        let p = sigmoid_wave();
        let ex = p.exact.as_ref().unwrap();
        // exp(0) = 1 ⇒ ū(0,0,0) = 1/2 exactly.
        assert_eq!(ex(0.0, 0.0, 0.0), 0.5);
        // Constants 0 and 1 are equilibria of f(u) = (1−u)u².
        assert_eq!((p.f)(0.0), 0.0);
        assert_eq!((p.f)(1.0), 0.0);
        assert_eq!(p.a, 1.0);
    }

    #[test]
    fn shifted_exponential_has_expected_closed_form_values() {
        let p = shifted_exponential();
        let ex = p.exact.as_ref().unwrap();
        // 1 + exp(0) = 2 exactly.
        assert_eq!(ex(0.0, 0.0, 0.0), 2.0);
        // f(u) = 1 − u has its equilibrium at 1.
        assert_eq!((p.f)(1.0), 0.0);
        assert_eq!((p.f)(3.0), -2.0);
    }

    #[test]
    fn tanh_front_is_monotone_in_time() {
        let p = manufactured_tanh();
        let ex = p.exact.as_ref().unwrap();
        assert_eq!(ex(0.0, 0.0, 0.0), 0.5);
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.7), (1.0, 1.0), (0.5, 0.25)] {
            let mut prev = ex(x, y, 0.0);
            for n in 1..=10 {
                let next = ex(x, y, n as f64 * 0.1);
                assert!(next > prev, "front not increasing at ({x}, {y})");
                prev = next;
            }
        }
    }

    #[test]
    fn exponential_family_rejects_bad_parameters() {
        assert!(matches!(
            manufactured_exponential(2, 0.5, 0.5),
            Err(ProblemError::UnsupportedExponent { n_exp: 2 })
        ));
        assert!(matches!(
            manufactured_exponential(0, 0.5, 0.5),
            Err(ProblemError::UnsupportedExponent { n_exp: 0 })
        ));
        // 2(0.36 + 0.36) = 1.44 breaks the wave-speed normalization.
        assert!(matches!(
            manufactured_exponential(1, 0.6, 0.6),
            Err(ProblemError::BadExponentParams { .. })
        ));
        // d = b = 1/2 satisfies it exactly.
        assert!(manufactured_exponential(1, 0.5, 0.5).is_ok());
    }

    #[test]
    fn negated_speeds_reflect_the_wave() {
        let (d, b) = sigmoid_speeds();
        let p = manufactured_exponential(1, d, b).unwrap();
        let q = manufactured_exponential(1, -d, -b).unwrap();
        let c = -(d * d + b * b);
        let pe = p.exact.as_ref().unwrap();
        let qe = q.exact.as_ref().unwrap();
        for &(x, y, t) in &[(0.1, 0.9, 0.2), (0.5, 0.5, 0.0), (0.8, 0.3, 1.0)] {
            // Same formula with the sign of the spatial speeds flipped.
            let expected = 1.0 / (1.0 + fmath::exp(c * t - d * x - b * y));
            assert_eq!(qe(x, y, t), expected);
            // And it is a genuine reflection relative to the original.
            assert!(fmath::abs(pe(x, y, t) - qe(-x, -y, t)) <= 1e-15);
        }
    }

    #[test]
    fn construction_rejects_incompatible_data() {
        let err = Problem::new(
            1.0,
            Box::new(|_| 0.0),
            Box::new(|_, _| 0.0),
            Box::new(|_, _, _| 1.0),
            None,
            String::from("mismatched"),
        )
        .unwrap_err();
        assert!(matches!(err, ProblemError::IncompatibleData { .. }));
    }

    #[test]
    fn construction_rejects_bad_diffusivity() {
        for a in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let err = Problem::new(
                a,
                Box::new(|_| 0.0),
                Box::new(|_, _| 0.0),
                Box::new(|_, _, _| 0.0),
                None,
                String::from("bad-a"),
            )
            .unwrap_err();
            assert!(matches!(err, ProblemError::NonPositiveDiffusivity { .. }));
        }
    }

    #[test]
    fn construction_rejects_lying_exact_solution() {
        let err = Problem::new(
            1.0,
            Box::new(|_| 0.0),
            Box::new(|_, _| 0.0),
            Box::new(|_, _, _| 0.0),
            Some(Box::new(|x, _, t| x * t)),
            String::from("lying-exact"),
        )
        .unwrap_err();
        assert!(matches!(err, ProblemError::ExactMismatch { .. }));
    }

    #[test]
    fn residuals_confirm_all_three_manufactured_solutions() {
        for p in [sigmoid_wave(), shifted_exponential(), manufactured_tanh()] {
            let r = residual_check(&p, 100, 1e-4).unwrap();
            assert!(r <= 1e-6, "{}: residual {r:e} above 1e-6", p.label);
        }
    }

    #[test]
    fn residual_detects_a_perturbed_reaction_term() {
        let mut p = sigmoid_wave();
        p.f = Box::new(|u: f64| (1.0 - u) * u * u + 0.01);
        let r = residual_check(&p, 100, 1e-4).unwrap();
        assert!(r >= 0.009, "perturbation residual {r} unexpectedly small");
    }

    #[test]
    fn residual_check_requires_exact_solution_and_sane_step() {
        let mut p = sigmoid_wave();
        assert_eq!(
            residual_check(&p, 10, 0.5).unwrap_err(),
            ProblemError::BadFdStep { fd_step: 0.5 }
        );
        p.exact = None;
        assert_eq!(
            residual_check(&p, 10, 1e-4).unwrap_err(),
            ProblemError::NoExactSolution
        );
    }
}
