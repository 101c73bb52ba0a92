//! Direct-picture invariants, invariant differentiation, commutator and
//! resolving residuals, and the particular resolving solution.

mod projected;

use std::sync::LazyLock;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::diffexpr::{total_derivative, Binding, Coord, EvalError, Expr, ExprError, Picture, Tape, MAX_ORDER};
use crate::families::Kappa;
use crate::jets::Jet;

pub use projected::{projected_particular_residuals, ProjectedResiduals};

/// Threshold on `|eta|`, relative to `max(1, |rho|, u_t^2)`, below which
/// `lambda = sigma / eta` is not formed.
pub const EPS_DEG: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FoliationError {
    #[error("degenerate point: |eta| = {0:e}")]
    Degenerate(f64),
    #[error("negative discriminant 2 kappa rho - u_t^2 = {0:e}")]
    NegativeDiscriminant(f64),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Operators of invariant differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    /// `delta = D_t`
    SmallDelta,
    /// `Delta = e^{-u} u_{zbar t} D_z`
    Delta,
    /// `Deltabar = e^{-u} u_{z t} D_zbar`
    DeltaBar,
    /// `Y = Delta / eta`
    Y,
    /// `Ybar = Deltabar / eta`
    YBar,
}

fn u(k: u8, m: u8, n: u8) -> Expr {
    Expr::jet(Picture::Direct, k, m, n)
}

fn emu() -> Expr {
    (-u(0, 0, 0)).exp()
}

/// `rho = e^{-u} u_{z zbar}`
pub fn rho_expr() -> Expr {
    emu() * u(0, 1, 1)
}

/// `eta = e^{-u} u_{zt} u_{zbar t}`
pub fn eta_expr() -> Expr {
    emu() * u(1, 1, 0) * u(1, 0, 1)
}

/// `u_{z zbar} - kappa e^u (u_tt + u_t^2)`
pub fn bf_expr(kappa: Kappa) -> Expr {
    u(0, 1, 1) - u(0, 0, 0).exp().scale(kappa.value()) * (u(2, 0, 0) + u(1, 0, 0).powi(2))
}

/// `u_tt - kappa rho + u_t^2`
pub fn bf_invariant_expr(kappa: Kappa) -> Expr {
    u(2, 0, 0) - rho_expr().scale(kappa.value()) + u(1, 0, 0).powi(2)
}

pub fn apply_operator(op: Operator, e: &Expr) -> Result<Expr, ExprError> {
    let d = |c| total_derivative(e, c, MAX_ORDER);
    Ok(match op {
        Operator::SmallDelta => d(Coord::T)?,
        Operator::Delta => emu() * u(1, 0, 1) * d(Coord::Z)?,
        Operator::DeltaBar => emu() * u(1, 1, 0) * d(Coord::Zbar)?,
        Operator::Y => apply_operator(Operator::Delta, e)? / eta_expr(),
        Operator::YBar => apply_operator(Operator::DeltaBar, e)? / eta_expr(),
    })
}

fn op(o: Operator, e: &Expr) -> Expr {
    apply_operator(o, e).expect("within the order cap")
}

/// Compiled expressions for one sign of kappa.
struct System {
    frame: Tape,
    bf: Tape,
    commutator_ut: Tape,
    commutator_rho: Tape,
    resolving: Tape,
}

fn commutators(kappa: f64, f: &Expr) -> Vec<Expr> {
    use Operator::*;
    let (ut, rho, eta) = (u(1, 0, 0), rho_expr(), eta_expr());
    let (lam, lamb) = (op(Y, &rho), op(YBar, &rho));
    let d_eta_over_eta = op(SmallDelta, &eta) / &eta;
    let (yf, ybf) = (op(Y, f), op(YBar, f));
    let first = op(SmallDelta, &yf) - op(Y, &op(SmallDelta, f))
        - (lamb.scale(kappa) - ut.scale(3.0) - &d_eta_over_eta) * &yf;
    let second = op(SmallDelta, &ybf) - op(YBar, &op(SmallDelta, f))
        - (lam.scale(kappa) - ut.scale(3.0) - &d_eta_over_eta) * &ybf;
    let tau = op(SmallDelta, &rho);
    let third = op(Y, &ybf) - op(YBar, &yf) - ((tau + &ut * &rho) / &eta) * (&yf - &ybf);
    vec![first, second, third]
}

fn resolving(kappa: f64) -> Vec<Expr> {
    use Operator::*;
    let (ut, rho, f) = (u(1, 0, 0), rho_expr(), eta_expr());
    let (lam, lamb) = (op(Y, &rho), op(YBar, &rho));
    let tau = op(SmallDelta, &rho);
    let tpr = &tau + &ut * &rho;
    let i = op(SmallDelta, &f) - ((&lam + &lamb).scale(kappa) - ut.scale(5.0)) * &f;
    let ii = &f * (op(Y, &lamb) - op(YBar, &lam)) - &tpr * (&lam - &lamb);
    let iii = |l: &Expr, y: Operator| op(SmallDelta, l) - op(y, &tau) - (&ut * l).scale(2.0) + l.powi(2).scale(kappa);
    let iv = &f * (op(Y, &lamb) + op(YBar, &lam)) + &tpr * (&lam + &lamb)
        - Expr::sum([
            op(SmallDelta, &tau),
            (&ut * &tau).scale(4.0),
            f.scale(2.0),
            rho.powi(2).scale(kappa),
            (ut.powi(2) * &rho).scale(2.0),
        ])
        .scale(2.0 * kappa);
    vec![i, ii, iii(&lam, Y), iii(&lamb, YBar), iv]
}

impl System {
    fn build(kappa: Kappa) -> System {
        use Operator::*;
        let k = kappa.value();
        let rho = rho_expr();
        let frame = vec![
            u(1, 0, 0),
            u(2, 0, 0),
            rho.clone(),
            eta_expr(),
            op(Delta, &rho),
            op(DeltaBar, &rho),
            op(SmallDelta, &rho),
        ];
        System {
            frame: Tape::new(&frame),
            bf: Tape::new(&[bf_expr(kappa), bf_invariant_expr(kappa)]),
            commutator_ut: Tape::new(&commutators(k, &u(1, 0, 0))),
            commutator_rho: Tape::new(&commutators(k, &rho)),
            resolving: Tape::new(&resolving(k)),
        }
    }
}

static SYSTEMS: LazyLock<[System; 2]> = LazyLock::new(|| [System::build(Kappa::Plus), System::build(Kappa::Minus)]);

fn system(kappa: Kappa) -> &'static System {
    &SYSTEMS[match kappa {
        Kappa::Plus => 0,
        Kappa::Minus => 1,
    }]
}

/// Invariants at one point. `lambda` is absent at degenerate points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantFrame {
    pub kappa: Kappa,
    pub t: f64,
    pub u_t: Complex64,
    pub u_tt: Complex64,
    pub rho: Complex64,
    pub eta: Complex64,
    pub sigma: Complex64,
    pub sigma_bar: Complex64,
    pub tau: Complex64,
    pub lambda: Option<Complex64>,
    pub lambda_bar: Option<Complex64>,
}

impl InvariantFrame {
    pub fn is_degenerate(&self) -> bool {
        self.lambda.is_none()
    }

    /// The eight values compared under conformal maps.
    pub fn invariants(&self) -> [Complex64; 8] {
        let t = Complex64::new(self.t, 0.0);
        [t, self.u_t, self.u_tt, self.rho, self.eta, self.sigma, self.sigma_bar, self.tau]
    }

    pub const INVARIANT_NAMES: [&'static str; 8] = ["t", "u_t", "u_tt", "rho", "eta", "sigma", "sigma_bar", "tau"];
}

pub(crate) fn degenerate(eta: Complex64, scale: f64) -> bool {
    eta.norm() <= EPS_DEG * scale.max(1.0)
}

pub fn invariant_frame(j: &Jet, kappa: Kappa) -> Result<InvariantFrame, FoliationError> {
    let v = system(kappa).frame.eval(&Binding::jet(j))?;
    let [u_t, u_tt, rho, eta, sigma, sigma_bar, tau] = v[..] else { unreachable!() };
    let nondeg = !degenerate(eta, rho.norm().max(u_t.norm_sqr()));
    Ok(InvariantFrame {
        kappa,
        t: j.first(),
        u_t,
        u_tt,
        rho,
        eta,
        sigma,
        sigma_bar,
        tau,
        lambda: nondeg.then(|| sigma / eta),
        lambda_bar: nondeg.then(|| sigma_bar / eta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BfResidual {
    /// `u_{z zbar} - kappa e^u (u_tt + u_t^2)`
    pub full: Complex64,
    /// `u_tt - kappa rho + u_t^2`
    pub invariant: Complex64,
}

pub fn bf_residual(j: &Jet, kappa: Kappa) -> Result<BfResidual, FoliationError> {
    let v = system(kappa).bf.eval(&Binding::jet(j))?;
    Ok(BfResidual { full: v[0], invariant: v[1] })
}

fn require_nondegenerate(j: &Jet, kappa: Kappa) -> Result<(), FoliationError> {
    let f = invariant_frame(j, kappa)?;
    if f.is_degenerate() {
        return Err(FoliationError::Degenerate(f.eta.norm()));
    }
    Ok(())
}

/// Test scalar for the commutator residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestScalar {
    Ut,
    Rho,
}

/// Residuals of the three commutation relations of `delta, Y, Ybar` on a
/// test scalar: `[delta, Y]`, `[delta, Ybar]`, `[Y, Ybar]`.
pub fn commutator_residuals(j: &Jet, kappa: Kappa, test: TestScalar) -> Result<[Complex64; 3], FoliationError> {
    require_nondegenerate(j, kappa)?;
    let tape = match test {
        TestScalar::Ut => &system(kappa).commutator_ut,
        TestScalar::Rho => &system(kappa).commutator_rho,
    };
    let v = tape.eval(&Binding::jet(j))?;
    Ok([v[0], v[1], v[2]])
}

/// Residuals of the five resolving equations with `F = eta`, in order
/// (I), (II), (III), (III-bar), (IV).
pub fn resolving_residuals(j: &Jet, kappa: Kappa) -> Result<[Complex64; 5], FoliationError> {
    require_nondegenerate(j, kappa)?;
    let v = system(kappa).resolving.eval(&Binding::jet(j))?;
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

/// Which sign of `S` the point's `lambda` carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `lambda = kappa u_t + i S`
    Printed,
    /// `lambda = kappa u_t - i S`, i.e. `lambda` and `lambdabar` swapped
    Conjugate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticularCheck {
    /// `|tau + u_t rho|`
    pub tau: f64,
    /// Normalized residual of `lambda` in `X^2 - 2 kappa u_t X + 2 kappa rho = 0`;
    /// `None` at degenerate points.
    pub lambda: Option<f64>,
    pub lambda_bar: Option<f64>,
    pub branch: Option<Branch>,
    pub s: f64,
}

/// Compares a frame with the particular solution `tau = -u_t rho`,
/// `{lambda, lambdabar} = {kappa u_t + i S, kappa u_t - i S}`,
/// `S = sqrt(2 kappa rho - u_t^2)`.
pub fn particular_check(frame: &InvariantFrame) -> Result<ParticularCheck, FoliationError> {
    let k = frame.kappa.value();
    let (ut, rho) = (frame.u_t.re, frame.rho.re);
    let disc = 2.0 * k * rho - ut * ut;
    if disc < -1e-10 * (1.0 + ut * ut) {
        return Err(FoliationError::NegativeDiscriminant(disc));
    }
    let s = disc.max(0.0).sqrt();
    let tau = (frame.tau + frame.u_t * frame.rho).norm();
    let (Some(lam), Some(lamb)) = (frame.lambda, frame.lambda_bar) else {
        return Ok(ParticularCheck { tau, lambda: None, lambda_bar: None, branch: None, s });
    };
    let branch = if lam.im >= 0.0 { Branch::Printed } else { Branch::Conjugate };
    // lambda, lambdabar = k u_t +- i S are the roots of X^2 - 2 k u_t X + 2 k rho;
    // its normalized residual stays well conditioned where the roots merge
    let dist = |l: Complex64| {
        let p = l * l - 2.0 * k * ut * l + 2.0 * k * rho;
        p.norm() / (l.norm_sqr() + 2.0 * ut.abs() * l.norm() + 2.0 * rho.abs()).max(1.0)
    };
    Ok(ParticularCheck { tau, lambda: Some(dist(lam)), lambda_bar: Some(dist(lamb)), branch: Some(branch), s })
}
