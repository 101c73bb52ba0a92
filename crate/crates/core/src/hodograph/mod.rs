//! The hodograph picture: unknown `t(u, z, zbar)`, its invariants and
//! operators, the transformed equation and resolving system, and the three
//! extra invariant relations of the hodograph family.

use std::sync::LazyLock;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::diffexpr::{total_derivative, Binding, Coord, EvalError, Expr, ExprError, Picture, Tape, MAX_ORDER};
use crate::families::Kappa;
use crate::foliation::{self, FoliationError};
use crate::jets::{hodograph_invert, Jet, JetError, FOLD_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HodographError {
    #[error("degenerate point: |eta| = {0:e}")]
    Degenerate(f64),
    #[error("t_u = {0:e} is too close to zero")]
    Fold(f64),
    #[error("negative discriminant 4 Phi - t_u^2 = {0:e}")]
    NegativeDiscriminant(f64),
    #[error("degenerate point where lambda-dependent terms do not vanish")]
    DegenerateLambdaTerms,
    #[error("expected a {expected} jet")]
    WrongPicture { expected: Picture },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Operators of invariant differentiation in the hodograph picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HodOperator {
    /// `delta = (1/t_u) D_u`
    SmallDelta,
    /// `Delta = e^{-u} Abar (t_z D_u - t_u D_z)`
    Delta,
    /// `Deltabar = e^{-u} A (t_zbar D_u - t_u D_zbar)`
    DeltaBar,
    Y,
    YBar,
}

fn t(k: u8, m: u8, n: u8) -> Expr {
    Expr::jet(Picture::Hodograph, k, m, n)
}

fn emu() -> Expr {
    (-Expr::coord(Coord::U)).exp()
}

/// `A = t_z t_uu - t_u t_uz`
fn a_expr() -> Expr {
    t(0, 1, 0) * t(2, 0, 0) - t(1, 0, 0) * t(1, 1, 0)
}

fn abar_expr() -> Expr {
    t(0, 0, 1) * t(2, 0, 0) - t(1, 0, 0) * t(1, 0, 1)
}

/// `rho = e^{-u} [t_z t_zbar t_uu + t_u^2 t_{z zbar} - t_u (t_zbar t_uz + t_z t_{u zbar})]`
pub fn hod_rho_expr() -> Expr {
    let tu = t(1, 0, 0);
    emu() * (t(0, 1, 0) * t(0, 0, 1) * t(2, 0, 0) + tu.powi(2) * t(0, 1, 1)
        - &tu * (t(0, 0, 1) * t(1, 1, 0) + t(0, 1, 0) * t(1, 0, 1)))
}

/// `eta = e^{-u} A Abar`
pub fn hod_eta_expr() -> Expr {
    emu() * a_expr() * abar_expr()
}

/// `(t_z t_zbar - kappa e^u) t_uu - t_u (t_zbar t_uz + t_z t_{u zbar} - t_u t_{z zbar} - kappa e^u)`
pub fn hod_equation_expr(kappa: Kappa) -> Expr {
    let k = kappa.value();
    let eu = Expr::coord(Coord::U).exp().scale(k);
    let tu = t(1, 0, 0);
    (t(0, 1, 0) * t(0, 0, 1) - &eu) * t(2, 0, 0)
        - &tu * (t(0, 0, 1) * t(1, 1, 0) + t(0, 1, 0) * t(1, 0, 1) - &tu * t(0, 1, 1) - eu)
}

/// `t_uu - kappa rho - t_u`
pub fn hod_invariant_expr(kappa: Kappa) -> Expr {
    t(2, 0, 0) - hod_rho_expr().scale(kappa.value()) - t(1, 0, 0)
}

/// `t_z t_zbar - kappa e^u`
pub fn ansatz_expr(kappa: Kappa) -> Expr {
    t(0, 1, 0) * t(0, 0, 1) - Expr::coord(Coord::U).exp().scale(kappa.value())
}

pub fn apply_hod_operator(op: HodOperator, e: &Expr) -> Result<Expr, ExprError> {
    let d = |c| total_derivative(e, c, MAX_ORDER);
    let tu = t(1, 0, 0);
    Ok(match op {
        HodOperator::SmallDelta => d(Coord::U)? / tu,
        HodOperator::Delta => emu() * abar_expr() * (t(0, 1, 0) * d(Coord::U)? - tu * d(Coord::Z)?),
        HodOperator::DeltaBar => emu() * a_expr() * (t(0, 0, 1) * d(Coord::U)? - tu * d(Coord::Zbar)?),
        HodOperator::Y => apply_hod_operator(HodOperator::Delta, e)? / hod_eta_expr(),
        HodOperator::YBar => apply_hod_operator(HodOperator::DeltaBar, e)? / hod_eta_expr(),
    })
}

fn op(o: HodOperator, e: &Expr) -> Expr {
    apply_hod_operator(o, e).expect("within the order cap")
}

fn phi_expr() -> Expr {
    let rho = hod_rho_expr();
    hod_eta_expr() - rho.powi(2) - t(1, 0, 0) * rho
}

fn resolving(kappa: f64) -> Vec<Expr> {
    use HodOperator::*;
    let (tu, rho, f) = (t(1, 0, 0), hod_rho_expr(), hod_eta_expr());
    let (lam, lamb) = (op(Y, &rho), op(YBar, &rho));
    let tau = op(SmallDelta, &rho);
    let inv_tu = tu.recip();
    let rho2_tu = rho.powi(2) * &inv_tu;
    let f_tu = &f * &inv_tu;

    let r1 = op(SmallDelta, &f) - &inv_tu * ((&lam + &lamb).scale(kappa) + 1.0) * &f;
    let r2 = &f * (op(Y, &lamb) - op(YBar, &lam))
        - (&lam - &lamb) * (&tu * &tau - rho2_tu.scale(3.0 * kappa) + f_tu.scale(2.0) - rho.scale(2.0));
    let r3 = |l: &Expr, y: HodOperator| {
        op(SmallDelta, l) - op(y, &tau) - (l * &inv_tu).scale(kappa) * (&rho * &inv_tu - l)
    };
    let r4 = &f * (op(Y, &lamb) + op(YBar, &lam))
        - (&lam + &lamb) * (-(&tu * &tau) + f_tu.scale(4.0) + rho2_tu.scale(3.0 * kappa) + rho.scale(2.0))
        - (tu.powi(2) * op(SmallDelta, &tau)).scale(2.0 * kappa)
        + (rho.scale(12.0) + tu.scale(4.0 * kappa))
            * (&tau + &f * tu.powi(-2) - (rho.powi(2) * tu.powi(-2)).scale(kappa) - &rho * &inv_tu);
    vec![r1, r2, r3(&lam, Y), r3(&lamb, YBar), r4]
}

fn actions(kappa: f64) -> Vec<Expr> {
    use HodOperator::*;
    let (tt, tu) = (t(0, 0, 0), t(1, 0, 0));
    let eta = hod_eta_expr();
    vec![
        op(SmallDelta, &tt) - 1.0,
        op(Delta, &tt),
        op(DeltaBar, &tt),
        op(Delta, &tu) - &eta,
        op(DeltaBar, &tu) - &eta,
        op(SmallDelta, &tu) - (hod_rho_expr() / &tu).scale(kappa) - 1.0,
    ]
}

struct HodSystem {
    equations: Tape,
    resolving: Tape,
    actions: Tape,
}

impl HodSystem {
    fn build(kappa: Kappa) -> HodSystem {
        HodSystem {
            equations: Tape::new(&[hod_equation_expr(kappa), hod_invariant_expr(kappa), ansatz_expr(kappa)]),
            resolving: Tape::new(&resolving(kappa.value())),
            actions: Tape::new(&actions(kappa.value())),
        }
    }
}

static SYSTEMS: LazyLock<[HodSystem; 2]> = LazyLock::new(|| [HodSystem::build(Kappa::Plus), HodSystem::build(Kappa::Minus)]);

/// Kappa-free quantities: `t_u, t_uu, rho, eta, sigma, sigmabar, tau, Phi,
/// Delta(Phi), Deltabar(Phi)`.
static FRAME: LazyLock<Tape> = LazyLock::new(|| {
    use HodOperator::*;
    let (rho, phi) = (hod_rho_expr(), phi_expr());
    Tape::new(&[
        t(1, 0, 0),
        t(2, 0, 0),
        rho.clone(),
        hod_eta_expr(),
        op(Delta, &rho),
        op(DeltaBar, &rho),
        op(SmallDelta, &rho),
        phi.clone(),
        op(Delta, &phi),
        op(DeltaBar, &phi),
    ])
});

fn system(kappa: Kappa) -> &'static HodSystem {
    &SYSTEMS[match kappa {
        Kappa::Plus => 0,
        Kappa::Minus => 1,
    }]
}

fn require(tj: &Jet) -> Result<(), HodographError> {
    if tj.picture() != Picture::Hodograph {
        return Err(HodographError::WrongPicture { expected: Picture::Hodograph });
    }
    let tu = tj.get(crate::diffexpr::MultiIndex::new(1, 0, 0)).unwrap_or_default();
    if tu.norm() <= FOLD_THRESHOLD {
        return Err(HodographError::Fold(tu.norm()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HodFrame {
    pub kappa: Kappa,
    pub u: f64,
    pub t: Complex64,
    pub t_u: Complex64,
    pub t_uu: Complex64,
    pub rho: Complex64,
    pub eta: Complex64,
    pub sigma: Complex64,
    pub sigma_bar: Complex64,
    pub tau: Complex64,
    pub lambda: Option<Complex64>,
    pub lambda_bar: Option<Complex64>,
    /// `Phi = F - rho^2 - t_u rho` with `F = eta`
    pub phi: Complex64,
    pub delta_phi: Complex64,
    pub delta_bar_phi: Complex64,
}

impl HodFrame {
    pub fn is_degenerate(&self) -> bool {
        self.lambda.is_none()
    }
}

pub fn hod_frame(tj: &Jet, kappa: Kappa) -> Result<HodFrame, HodographError> {
    require(tj)?;
    let v = FRAME.eval(&Binding::jet(tj))?;
    let [t_u, t_uu, rho, eta, sigma, sigma_bar, tau, phi, delta_phi, delta_bar_phi] = v[..] else { unreachable!() };
    let nondeg = !foliation::degenerate(eta, rho.norm().max(t_u.norm_sqr()));
    Ok(HodFrame {
        kappa,
        u: tj.first(),
        t: tj.value(),
        t_u,
        t_uu,
        rho,
        eta,
        sigma,
        sigma_bar,
        tau,
        lambda: nondeg.then(|| sigma / eta),
        lambda_bar: nondeg.then(|| sigma_bar / eta),
        phi,
        delta_phi,
        delta_bar_phi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HodEquationResiduals {
    pub full: Complex64,
    pub invariant: Complex64,
    pub ansatz: Complex64,
}

pub fn hod_equation_residuals(tj: &Jet, kappa: Kappa) -> Result<HodEquationResiduals, HodographError> {
    if tj.picture() != Picture::Hodograph {
        return Err(HodographError::WrongPicture { expected: Picture::Hodograph });
    }
    let v = system(kappa).equations.eval(&Binding::jet(tj))?;
    Ok(HodEquationResiduals { full: v[0], invariant: v[1], ansatz: v[2] })
}

/// `(|rho~ + rho/t_u^3|, |eta~ - eta/t_u^6|)`, tilded values from the direct
/// jet and plain values from its inversion.
pub fn cross_check(uj: &Jet, kappa: Kappa) -> Result<(f64, f64), HodographError> {
    if uj.picture() != Picture::Direct {
        return Err(HodographError::WrongPicture { expected: Picture::Direct });
    }
    let direct = foliation::invariant_frame(uj, kappa)?;
    let tj = hodograph_invert(uj, uj.order())?;
    let h = hod_frame(&tj, kappa)?;
    Ok(((direct.rho + h.rho / h.t_u.powi(3)).norm(), (direct.eta - h.eta / h.t_u.powi(6)).norm()))
}

/// Residuals of the five transformed resolving equations with `F = eta`.
pub fn hod_resolving_residuals(tj: &Jet, kappa: Kappa) -> Result<[Complex64; 5], HodographError> {
    let f = hod_frame(tj, kappa)?;
    if f.is_degenerate() {
        return Err(HodographError::Degenerate(f.eta.norm()));
    }
    let v = system(kappa).resolving.eval(&Binding::jet(tj))?;
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

/// Residuals of `delta(t) = 1`, `Delta(t) = 0`, `Deltabar(t) = 0`,
/// `Delta(t_u) = eta`, `Deltabar(t_u) = eta`, `delta(t_u) = kappa rho/t_u + 1`
/// and, away from degenerate points, `Y(t_u) = 1`, `Ybar(t_u) = 1`.
pub fn operator_action_residuals(tj: &Jet, kappa: Kappa) -> Result<Vec<Complex64>, HodographError> {
    let f = hod_frame(tj, kappa)?;
    let mut v = system(kappa).actions.eval(&Binding::jet(tj))?;
    if !f.is_degenerate() {
        v.push(v[3] / f.eta);
        v.push(v[4] / f.eta);
    }
    Ok(v)
}

/// Below this the coefficients of the lambda terms count as vanishing.
const LAMBDA_FREE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtraResiduals {
    pub eq1: Complex64,
    pub eq2: Complex64,
    pub eq2_conj: Complex64,
    /// Only the lambda-free parts were evaluated.
    pub lambda_free: bool,
}

impl ExtraResiduals {
    pub fn max_abs(&self) -> f64 {
        self.eq1.norm().max(self.eq2.norm()).max(self.eq2_conj.norm())
    }
}

/// The three extra relations, evaluated on a frame.
pub fn extra_relations(f: &HodFrame) -> Result<ExtraResiduals, HodographError> {
    let i = Complex64::i();
    let (tu, rho, phi, ff) = (f.t_u, f.rho, f.phi, f.eta);
    let disc = (4.0 * phi - tu * tu).re;
    if disc < -1e-10 * (1.0 + tu.norm_sqr()) {
        return Err(HodographError::NegativeDiscriminant(disc));
    }
    let r = Complex64::new(disc.max(0.0).sqrt(), 0.0);
    let lhs1 = tu * f.tau + phi / tu;
    let free2 = f.delta_phi - 2.0 / tu * phi * ff;
    let free2c = f.delta_bar_phi - 2.0 / tu * phi * ff;
    let (Some(lam), Some(lamb)) = (f.lambda, f.lambda_bar) else {
        if (2.0 * rho + tu).norm() > LAMBDA_FREE_TOL || r.norm() > LAMBDA_FREE_TOL {
            return Err(HodographError::DegenerateLambdaTerms);
        }
        return Ok(ExtraResiduals { eq1: lhs1, eq2: free2, eq2_conj: free2c, lambda_free: true });
    };
    let eq1 = lhs1 - 0.25 * ((2.0 * rho + tu) * (lam + lamb) - i * r * (lam - lamb));
    let q = rho * rho + tu * rho;
    let eq2 = free2
        - i / 4.0 * r * (2.0 * (phi * (lam + lamb) + q * (lam - lamb)) - (tu * tu + i * (2.0 * rho + tu) * r) * lamb);
    let eq2_conj = free2c
        + i / 4.0 * r * (2.0 * (phi * (lam + lamb) + q * (lamb - lam)) - (tu * tu - i * (2.0 * rho + tu) * r) * lam);
    Ok(ExtraResiduals { eq1, eq2, eq2_conj, lambda_free: false })
}

/// The three extra relations at a hodograph jet. They carry no kappa.
pub fn extra_relation_residuals(tj: &Jet) -> Result<ExtraResiduals, HodographError> {
    extra_relations(&hod_frame(tj, Kappa::Plus)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffexpr::AnalyticFn;
    use crate::families::{make_hodograph, make_sol_minus, make_sol_plus};

    fn an(s: &str, v: Coord) -> AnalyticFn {
        AnalyticFn::parse(s, v).unwrap()
    }

    fn anchor() -> Jet {
        make_hodograph(&an("0", Coord::U), &an("0", Coord::U))
            .unwrap()
            .hodograph_jet_at_u(0.0, Complex64::new(1.0, 0.0), 4)
            .unwrap()
    }

    fn near(a: Complex64, b: f64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn anchor_frame() {
        let f = hod_frame(&anchor(), Kappa::Plus).unwrap();
        assert!(near(f.t, 2.0) && near(f.t_u, 1.0) && near(f.t_uu, 0.5));
        assert!(near(f.rho, -0.5) && near(f.tau, -0.25) && near(f.phi, 0.25));
        assert!(f.is_degenerate());
        let r = hod_equation_residuals(&anchor(), Kappa::Plus).unwrap();
        assert!(r.full.norm() < 1e-12 && r.invariant.norm() < 1e-12 && r.ansatz.norm() < 1e-12);
        let x = extra_relation_residuals(&anchor()).unwrap();
        assert!(x.lambda_free && x.max_abs() < 1e-12);
    }

    #[test]
    fn cross_relations() {
        let p1 = make_sol_plus(&an("0", Coord::Z), &an("z", Coord::Z)).unwrap();
        let j = p1.jet(2.0, Complex64::new(1.0, 0.0), 4).unwrap();
        let (a, b) = cross_check(&j, Kappa::Plus).unwrap();
        assert!(a < 1e-12 && b < 1e-12);
        let tj = hodograph_invert(&j, 4).unwrap();
        assert!(near(hod_frame(&tj, Kappa::Plus).unwrap().rho, -0.5));
    }

    #[test]
    fn inverted_p2_and_m2() {
        let z = Complex64::new(1.0, 1.0);
        let p2 = make_sol_plus(&an("z", Coord::Z), &an("z", Coord::Z)).unwrap();
        let m2 = make_sol_minus(&an("z", Coord::Z), &an("z", Coord::Z)).unwrap();
        for (f, k) in [(p2, Kappa::Plus), (m2, Kappa::Minus)] {
            let tj = f.hodograph_jet(1.0, z, 4).unwrap();
            let e = hod_equation_residuals(&tj, k).unwrap();
            assert!(e.full.norm() < 1e-10 && e.invariant.norm() < 1e-10);
            for r in operator_action_residuals(&tj, k).unwrap() {
                assert!(r.norm() < 1e-10, "{r}");
            }
            for r in hod_resolving_residuals(&tj, k).unwrap() {
                assert!(r.norm() < 1e-8, "{k:?}: {r}");
            }
        }
    }

    #[test]
    fn kappa_minus_ansatz_never_vanishes() {
        // t_z t_zbar + e^u = |t_z|^2 + e^u >= e^u
        let tj = anchor();
        let a = hod_equation_residuals(&tj, Kappa::Minus).unwrap().ansatz;
        assert!(a.re >= tj.first().exp() && a.im.abs() < 1e-15);
    }
}
