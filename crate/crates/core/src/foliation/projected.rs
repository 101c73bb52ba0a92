use num_complex::Complex64;
use serde::Serialize;

use super::FoliationError;
use crate::families::Kappa;

/// A function of `(t, u_t, rho)` with its three first partials.
#[derive(Debug, Clone, Copy)]
struct Local {
    v: Complex64,
    d_t: Complex64,
    d_ut: Complex64,
    d_rho: Complex64,
}

/// Projected residuals of the resolving system at the particular solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectedResiduals {
    /// `|Y(lambdabar) - Ybar(lambda)| + |(tau + u_t rho)(lambda - lambdabar)|`;
    /// both halves must vanish for (II) to hold for every `F`.
    pub ii: f64,
    pub iii: Complex64,
    pub iii_bar: Complex64,
    /// `Y(lambdabar) + Ybar(lambda) - 4 kappa`, the coefficient of `F` in (IV).
    pub iv: Complex64,
    /// `F`-free part of (IV); vanishes identically as well.
    pub iv_rest: Complex64,
    pub y_lambda_bar: Complex64,
    pub ybar_lambda: Complex64,
}

/// Substitutes `tau = -u_t rho`, `lambda = kappa u_t + i S` into (II),
/// (III), (III-bar) and (IV), with `delta = d_t + (kappa rho - u_t^2) d_{u_t} +
/// tau d_rho` and `Y = d_{u_t} + lambda d_rho` acting on the closed forms.
pub fn projected_particular_residuals(_t: f64, u_t: f64, rho: f64, kappa: Kappa) -> Result<ProjectedResiduals, FoliationError> {
    let k = kappa.value();
    let disc = 2.0 * k * rho - u_t * u_t;
    if disc <= 0.0 {
        return Err(FoliationError::NegativeDiscriminant(disc));
    }
    let s = disc.sqrt();
    let c = |x: f64| Complex64::new(x, 0.0);
    let i = Complex64::i();
    let zero = c(0.0);

    let tau = Local { v: c(-u_t * rho), d_t: zero, d_ut: c(-rho), d_rho: c(-u_t) };
    // S_{u_t} = -u_t / S, S_rho = kappa / S
    let lam = Local { v: c(k * u_t) + i * s, d_t: zero, d_ut: c(k) - i * (u_t / s), d_rho: i * (k / s) };
    let lamb = Local { v: lam.v.conj(), d_t: zero, d_ut: lam.d_ut.conj(), d_rho: lam.d_rho.conj() };

    let delta = |f: &Local| f.d_t + c(k * rho - u_t * u_t) * f.d_ut + tau.v * f.d_rho;
    let y = |l: Complex64, f: &Local| f.d_ut + l * f.d_rho;

    let y_lambda_bar = y(lam.v, &lamb);
    let ybar_lambda = y(lamb.v, &lam);
    let tpr = tau.v + u_t * rho;

    let ii = (y_lambda_bar - ybar_lambda).norm() + (tpr * (lam.v - lamb.v)).norm();
    let iii = |l: &Local, yl: Complex64| delta(l) - y(yl, &tau) - 2.0 * u_t * l.v + k * l.v * l.v;
    let iv_rest = tpr * (lam.v + lamb.v)
        - 2.0 * k * (delta(&tau) + 4.0 * u_t * tau.v + k * rho * rho + 2.0 * u_t * u_t * rho);
    Ok(ProjectedResiduals {
        ii,
        iii: iii(&lam, lam.v),
        iii_bar: iii(&lamb, lamb.v),
        iv: y_lambda_bar + ybar_lambda - 4.0 * k,
        iv_rest,
        y_lambda_bar,
        ybar_lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let r = projected_particular_residuals(1.0, 0.8, 0.4, Kappa::Plus).unwrap();
        assert!((r.y_lambda_bar - 2.0).norm() < 1e-14);
        assert!(r.iv.norm() < 1e-14);
        let r = projected_particular_residuals(1.0, 0.8, -0.4, Kappa::Minus).unwrap();
        assert!((r.y_lambda_bar + r.ybar_lambda + 4.0).norm() < 1e-14);
        assert!(r.iii.norm() < 1e-14 && r.iii_bar.norm() < 1e-14 && r.ii < 1e-14);
    }

    #[test]
    fn non_admissible() {
        assert!(projected_particular_residuals(1.0, 1.0, 0.5, Kappa::Plus).is_err());
        assert!(projected_particular_residuals(1.0, 0.1, 0.4, Kappa::Minus).is_err());
    }
}
