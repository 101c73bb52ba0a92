use num_complex::Complex64;
use thiserror::Error;

use super::{Field, FieldError};
use crate::jets::FOLD_THRESHOLD;

pub const DEFAULT_BRACKET: (f64, f64) = (-10.0, 10.0);
pub const DEFAULT_SUBDIVISIONS: usize = 64;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
/// Accepted roots satisfy `|T(u) - t| < ROOT_TOL`.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no sign change of T(u) - t on [{0}, {1}]")]
    NoSignChange(f64, f64),
    #[error("fold at the root: |T_u| = {0:e}")]
    Fold(f64),
    #[error("root solve did not converge in {0} iterations")]
    IterationCap(usize),
    #[error("implicit map not evaluable at u = {0}")]
    Singular(f64),
}

fn map(f: &Field, u: f64, t: f64, z: Complex64) -> Result<(f64, f64), FieldError> {
    match f.implicit_map(u, t, z) {
        Err(FieldError::Eval(_)) => Err(SolveError::Singular(u).into()),
        other => other,
    }
}

/// Root of `u -> T(u, z, zbar) - t` on `bracket` by Newton steps kept inside
/// a shrinking sign-change interval; bisection whenever a step escapes or
/// stalls.
pub fn solve_u(f: &Field, t: f64, z: Complex64, bracket: (f64, f64)) -> Result<f64, FieldError> {
    let tol = 1e-14 * (1.0 + t.abs());
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    let (flo, _) = map(f, lo, t, z)?;
    let (fhi, _) = map(f, hi, t, z)?;
    if flo.abs() < tol {
        return finish(f, lo, t, z);
    }
    if fhi.abs() < tol {
        return finish(f, hi, t, z);
    }
    if flo * fhi > 0.0 {
        return Err(SolveError::NoSignChange(lo, hi).into());
    }
    // orient so that phi(lo) < 0
    let rising = flo < 0.0;
    let mut u = 0.5 * (lo + hi);
    let (mut step, mut prev_step) = (hi - lo, hi - lo);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let (phi, dphi) = map(f, u, t, z)?;
        if phi.abs() < tol {
            return finish(f, u, t, z);
        }
        if (phi < 0.0) == rising {
            lo = u;
        } else {
            hi = u;
        }
        let newton = u - phi / dphi;
        let inside = newton.is_finite() && newton > lo && newton < hi;
        // bisect when Newton leaves the bracket or is not halving the step
        let use_newton = inside && (2.0 * phi).abs() <= (prev_step * dphi).abs();
        prev_step = step;
        if use_newton {
            step = phi / dphi;
            u = newton;
        } else {
            step = 0.5 * (hi - lo);
            u = lo + step;
        }
        if hi - lo <= f64::EPSILON * (1.0 + u.abs()) {
            return finish(f, u, t, z);
        }
    }
    Err(SolveError::IterationCap(MAX_NEWTON_ITERATIONS).into())
}

fn finish(f: &Field, u: f64, t: f64, z: Complex64) -> Result<f64, FieldError> {
    let (phi, dphi) = map(f, u, t, z)?;
    if dphi.abs() <= FOLD_THRESHOLD {
        return Err(SolveError::Fold(dphi.abs()).into());
    }
    if phi.abs() >= ROOT_TOL {
        return Err(SolveError::IterationCap(MAX_NEWTON_ITERATIONS).into());
    }
    Ok(u)
}

/// Leftmost subinterval of `range` split into `n` pieces on which
/// `T(u) - t` changes sign. Unevaluable endpoints are skipped.
pub fn scan_bracket(f: &Field, t: f64, z: Complex64, range: (f64, f64), n: usize) -> Result<(f64, f64), FieldError> {
    let n = n.max(1);
    let step = (range.1 - range.0) / n as f64;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n {
        let u = range.0 + step * k as f64;
        let Ok((phi, _)) = map(f, u, t, z) else {
            prev = None;
            continue;
        };
        if let Some((pu, pphi)) = prev {
            if pphi * phi <= 0.0 {
                return Ok((pu, u));
            }
        }
        prev = Some((u, phi));
    }
    Err(SolveError::NoSignChange(range.0, range.1).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffexpr::{AnalyticFn, Coord};
    use crate::families::make_hodograph;

    fn hod(alpha: &str, h: &str) -> Field {
        make_hodograph(&AnalyticFn::parse(alpha, Coord::U).unwrap(), &AnalyticFn::parse(h, Coord::U).unwrap()).unwrap()
    }

    #[test]
    fn trivial_roots() {
        let one = Complex64::new(1.0, 0.0);
        assert!(solve_u(&hod("0", "0"), 2.0, one, (-1.0, 1.0)).unwrap().abs() < 1e-12);
        assert!(solve_u(&hod("0", "u"), 2.0, one, (-1.0, 1.0)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rotating_phase_root() {
        // 2 e^{u/2} cos u = 1, bisection oracle on [-1, 0]
        let f = hod("u", "0");
        let one = Complex64::new(1.0, 0.0);
        let g = |u: f64| 2.0 * (u / 2.0).exp() * u.cos() - 1.0;
        let (mut a, mut b) = (-1.0f64, 0.0f64);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(a) * g(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let u = f.solve(1.0, one).unwrap();
        assert!((u - a).abs() < 1e-10, "{u} vs {a}");
        assert!((u + 0.754).abs() < 1e-3);
    }

    #[test]
    fn no_sign_change() {
        let f = hod("0", "0");
        let err = solve_u(&f, 2.0, Complex64::new(1.0, 0.0), (1.0, 3.0)).unwrap_err();
        assert!(matches!(err, FieldError::Solve(SolveError::NoSignChange(..))));
    }
}
