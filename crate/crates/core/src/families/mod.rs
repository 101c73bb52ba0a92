//! Exact solution families and test fields.
//!
//! Every field is stored as a coordinate-only expression: either `u(t, z, zbar)`
//! in closed form, or `t = T(u, z, zbar)` for the implicit hodograph family.
//! Jets come from exact symbolic partials; implicit fields go through a
//! scalar root solve and jet inversion.

mod random;
mod solve;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffexpr::{
    partial_coord, substitute, AnalyticFn, Binding, Coord, EvalError, Expr, ExprError, MultiIndex, Node, Picture,
    Tape, MAX_ORDER,
};
use crate::jets::{hodograph_invert, Jet, JetError};

pub use random::random_field;
pub use solve::{scan_bracket, solve_u, SolveError, DEFAULT_BRACKET, DEFAULT_SUBDIVISIONS, MAX_NEWTON_ITERATIONS, ROOT_TOL};

/// Distance kept from logarithm and branch singularities.
pub const DOMAIN_DELTA: f64 = 1e-6;

/// Sign in `u_{z zbar} = kappa (e^u)_{tt}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Kappa {
    Plus,
    Minus,
}

impl Kappa {
    pub fn value(self) -> f64 {
        match self {
            Kappa::Plus => 1.0,
            Kappa::Minus => -1.0,
        }
    }
}

impl TryFrom<i8> for Kappa {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Kappa::Plus),
            -1 => Ok(Kappa::Minus),
            _ => Err(format!("kappa must be 1 or -1, got {v}")),
        }
    }
}

impl From<Kappa> for i8 {
    fn from(k: Kappa) -> i8 {
        k.value() as i8
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", i8::from(*self))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("c(z) is constant, the family degenerates")]
    DegenerateC,
    #[error("conformal map has identically vanishing derivative")]
    DegenerateMap,
    #[error("point (t={t}, z={z}) lies outside the field's domain")]
    OutOfDomain { t: f64, z: Complex64 },
    #[error("jet order {0} exceeds the hard cap")]
    OrderCap(usize),
    #[error("operation needs an implicit hodograph field")]
    NotImplicit,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    ClosedForm,
    ImplicitHodograph,
    RandomTest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bracket {
    Fixed(f64, f64),
    /// Leftmost sign change among `n` equal subintervals.
    Scan { lo: f64, hi: f64, n: usize },
}

#[derive(Debug, Clone)]
enum Guard {
    /// real part must exceed `DOMAIN_DELTA`
    Positive(Expr),
    /// modulus must exceed `DOMAIN_DELTA`
    NonZero(Expr),
}

impl Guard {
    fn map(&self, f: impl Fn(&Expr) -> Expr) -> Guard {
        match self {
            Guard::Positive(e) => Guard::Positive(f(e)),
            Guard::NonZero(e) => Guard::NonZero(f(e)),
        }
    }
}

#[derive(Debug, Clone)]
enum Form {
    Direct(Expr),
    Hodograph { t: Expr, bracket: Bracket },
}

/// A scalar field able to produce jets. Cheap to clone; tapes are shared.
#[derive(Debug, Clone)]
pub struct Field {
    kind: FieldKind,
    kappa: Option<Kappa>,
    label: String,
    form: Form,
    guards: Vec<Guard>,
    tapes: Arc<Mutex<HashMap<usize, Arc<Tape>>>>,
}

fn z() -> Expr {
    Expr::coord(Coord::Z)
}

fn zbar() -> Expr {
    Expr::coord(Coord::Zbar)
}

fn t() -> Expr {
    Expr::coord(Coord::T)
}

/// `ln((t+b)(t+bbar)) + ln(c' cbar')`, the part shared by both families.
/// Each logarithm has a positive real argument on the domain.
fn shared_part(b: &AnalyticFn, c: &AnalyticFn) -> (Expr, Vec<Guard>) {
    let (bb, cc) = (b.conjugate_partner(), c.conjugate_partner());
    let tb = (t() + b.at_var()) * (t() + bb.at_var());
    let dc = c.derivative().at_var() * cc.derivative().at_var();
    let guards = vec![Guard::NonZero(tb.clone()), Guard::NonZero(dc.clone())];
    (tb.ln() + dc.ln(), guards)
}

fn check_data(b: &AnalyticFn, c: &AnalyticFn) -> Result<(), FieldError> {
    for f in [b, c] {
        if f.var() != Coord::Z {
            return Err(ExprError::BadAnalyticVariable { expected: "z", found: f.var().name().into() }.into());
        }
    }
    if c.is_constant() {
        return Err(FieldError::DegenerateC);
    }
    Ok(())
}

/// `u = ln |(t+b(z)) c'(z) / (c(z)+cbar(zbar))|^2`, a solution for kappa = +1.
pub fn make_sol_plus(b: &AnalyticFn, c: &AnalyticFn) -> Result<Field, FieldError> {
    check_data(b, c)?;
    let (head, mut guards) = shared_part(b, c);
    let s = c.at_var() + c.conjugate_partner().at_var();
    guards.push(Guard::Positive(s.clone()));
    let u = head - s.powi(2).ln();
    Ok(Field::new(FieldKind::ClosedForm, Some(Kappa::Plus), format!("plus(b={b}, c={c})"), Form::Direct(u), guards))
}

/// `u = ln |(t+b(z)) c'(z) / (1 + |c(z)|^2)|^2`, a solution for kappa = -1.
pub fn make_sol_minus(b: &AnalyticFn, c: &AnalyticFn) -> Result<Field, FieldError> {
    check_data(b, c)?;
    let (head, guards) = shared_part(b, c);
    let s = Expr::one() + c.at_var() * c.conjugate_partner().at_var();
    let u = head - s.powi(2).ln();
    Ok(Field::new(FieldKind::ClosedForm, Some(Kappa::Minus), format!("minus(b={b}, c={c})"), Form::Direct(u), guards))
}

/// `t = e^{u/2 + i alpha(u)} z + e^{u/2 - i alpha(u)} zbar + h(u)`, kappa = +1.
pub fn make_hodograph(alpha: &AnalyticFn, h: &AnalyticFn) -> Result<Field, FieldError> {
    for f in [alpha, h] {
        if f.var() != Coord::U {
            return Err(ExprError::BadAnalyticVariable { expected: "u", found: f.var().name().into() }.into());
        }
    }
    let u = Expr::coord(Coord::U);
    let half = u.scale(0.5);
    let phase = Expr::i() * alpha.at_var();
    let tt = (&half + &phase).exp() * z() + (&half - &phase).exp() * zbar() + h.at_var();
    Ok(Field::new(
        FieldKind::ImplicitHodograph,
        Some(Kappa::Plus),
        format!("hodograph(alpha={alpha}, h={h})"),
        Form::Hodograph { t: tt, bracket: Bracket::Scan { lo: DEFAULT_BRACKET.0, hi: DEFAULT_BRACKET.1, n: DEFAULT_SUBDIVISIONS } },
        vec![],
    ))
}

/// Pulls a field back along the conformal map `z = g(w)`:
/// `v(t, w, wbar) = u(t, g(w), gbar(wbar)) + ln(g'(w) gbar'(wbar))`.
pub fn conformal_transform(f: &Field, g: &AnalyticFn) -> Result<Field, FieldError> {
    if g.var() != Coord::Z {
        return Err(ExprError::BadAnalyticVariable { expected: "z", found: g.var().name().into() }.into());
    }
    if g.is_constant() {
        return Err(FieldError::DegenerateMap);
    }
    let gb = g.conjugate_partner();
    let (gz, gzb) = (g.at_var(), gb.at_var());
    let jac = g.derivative().at_var() * gb.derivative().at_var();
    let log_jac = jac.ln();
    let pull = |e: &Expr, shift_u: bool| {
        substitute(e, &|n| match n {
            Node::Coord(Coord::Z) => Some(gz.clone()),
            Node::Coord(Coord::Zbar) => Some(gzb.clone()),
            Node::Coord(Coord::U) if shift_u => Some(Expr::coord(Coord::U) - &log_jac),
            _ => None,
        })
    };
    let form = match &f.form {
        Form::Direct(u) => Form::Direct(pull(u, false) + &log_jac),
        Form::Hodograph { t, bracket } => Form::Hodograph { t: pull(t, true), bracket: *bracket },
    };
    let mut guards: Vec<Guard> = f.guards.iter().map(|gd| gd.map(|e| pull(e, false))).collect();
    guards.push(Guard::NonZero(jac));
    Ok(Field::new(f.kind, f.kappa, format!("{} o g(w)={g}", f.label), form, guards))
}

impl Field {
    fn new(kind: FieldKind, kappa: Option<Kappa>, label: String, form: Form, guards: Vec<Guard>) -> Field {
        Field { kind, kappa, label, form, guards, tapes: Arc::default() }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// The sign for which the field solves the equation; `None` for test fields.
    pub fn kappa(&self) -> Option<Kappa> {
        self.kappa
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The closed form `u(t, z, zbar)`, if there is one.
    pub fn closed_form(&self) -> Option<&Expr> {
        match &self.form {
            Form::Direct(u) => Some(u),
            Form::Hodograph { .. } => None,
        }
    }

    /// The implicit form `T(u, z, zbar)`, if there is one.
    pub fn implicit_form(&self) -> Option<&Expr> {
        match &self.form {
            Form::Hodograph { t, .. } => Some(t),
            Form::Direct(_) => None,
        }
    }

    pub fn with_bracket(mut self, bracket: Bracket) -> Field {
        if let Form::Hodograph { bracket: b, .. } = &mut self.form {
            *b = bracket;
        }
        self
    }

    /// Domain guards only; implicit fields may still fail to solve inside.
    pub fn in_domain(&self, t: f64, z: Complex64) -> bool {
        let bind = Binding::new()
            .with(Coord::T, Complex64::new(t, 0.0))
            .with(Coord::Z, z)
            .with(Coord::Zbar, z.conj());
        self.guards.iter().all(|g| match g {
            Guard::Positive(e) => crate::diffexpr::evaluate(e, &bind).is_ok_and(|v| v.re > DOMAIN_DELTA),
            Guard::NonZero(e) => crate::diffexpr::evaluate(e, &bind).is_ok_and(|v| v.norm() > DOMAIN_DELTA),
        })
    }

    fn expr(&self) -> (&Expr, Picture) {
        match &self.form {
            Form::Direct(u) => (u, Picture::Direct),
            Form::Hodograph { t, .. } => (t, Picture::Hodograph),
        }
    }

    fn tape(&self, order: usize) -> Arc<Tape> {
        let mut cache = self.tapes.lock().expect("tape cache poisoned");
        cache
            .entry(order)
            .or_insert_with(|| {
                let (e, picture) = self.expr();
                Arc::new(Tape::new(&partials_table(e, picture, order)))
            })
            .clone()
    }

    fn own_jet(&self, first: f64, z: Complex64, order: usize) -> Result<Jet, FieldError> {
        let (_, picture) = self.expr();
        let [c0, c1, c2] = picture.base();
        let bind = Binding::new()
            .with(c0, Complex64::new(first, 0.0))
            .with(c1, z)
            .with(c2, z.conj());
        let vals = self.tape(order).eval(&bind)?;
        Ok(Jet::new(picture, first, z, order, vals)?)
    }

    /// Solves `T(u, z, zbar) = t` for an implicit field.
    pub fn solve(&self, t: f64, z: Complex64) -> Result<f64, FieldError> {
        let Form::Hodograph { bracket, .. } = &self.form else {
            return Err(FieldError::NotImplicit);
        };
        let (lo, hi) = match *bracket {
            Bracket::Fixed(lo, hi) => (lo, hi),
            Bracket::Scan { lo, hi, n } => scan_bracket(self, t, z, (lo, hi), n)?,
        };
        solve_u(self, t, z, (lo, hi))
    }

    /// Direct-picture jet of `u` at `(t, z)`.
    pub fn jet(&self, t: f64, z: Complex64, order: usize) -> Result<Jet, FieldError> {
        if order > MAX_ORDER {
            return Err(FieldError::OrderCap(order));
        }
        if !self.in_domain(t, z) {
            return Err(FieldError::OutOfDomain { t, z });
        }
        match &self.form {
            Form::Direct(_) => self.own_jet(t, z, order),
            Form::Hodograph { .. } => {
                let u = self.solve(t, z)?;
                Ok(hodograph_invert(&self.own_jet(u, z, order)?, order)?)
            }
        }
    }

    /// Hodograph-picture jet of `t(u, z, zbar)` at the point over `(t, z)`.
    pub fn hodograph_jet(&self, t: f64, z: Complex64, order: usize) -> Result<Jet, FieldError> {
        if order > MAX_ORDER {
            return Err(FieldError::OrderCap(order));
        }
        if !self.in_domain(t, z) {
            return Err(FieldError::OutOfDomain { t, z });
        }
        match &self.form {
            Form::Direct(_) => Ok(hodograph_invert(&self.own_jet(t, z, order)?, order)?),
            Form::Hodograph { .. } => {
                let u = self.solve(t, z)?;
                self.own_jet(u, z, order)
            }
        }
    }

    /// Hodograph jet at the base point `(u, z)` of an implicit field, no solve.
    pub fn hodograph_jet_at_u(&self, u: f64, z: Complex64, order: usize) -> Result<Jet, FieldError> {
        if order > MAX_ORDER {
            return Err(FieldError::OrderCap(order));
        }
        match &self.form {
            Form::Hodograph { .. } => self.own_jet(u, z, order),
            Form::Direct(_) => Err(FieldError::NotImplicit),
        }
    }

    /// `(T(u), T_u(u)) - (t, 0)` for an implicit field, used by the root solver.
    pub(crate) fn implicit_map(&self, u: f64, t: f64, z: Complex64) -> Result<(f64, f64), FieldError> {
        let j = self.hodograph_jet_at_u(u, z, 1)?;
        Ok((j.value().re - t, j.at(1, 0, 0).re))
    }
}

/// Same as [`Field::jet`]; free-function form.
pub fn jet_from_field(f: &Field, t: f64, z: Complex64, order: usize) -> Result<Jet, FieldError> {
    f.jet(t, z, order)
}

/// All partials of a coordinate-only expression over the picture's base
/// coordinates, in jet coefficient order.
fn partials_table(e: &Expr, picture: Picture, order: usize) -> Vec<Expr> {
    let base = picture.base();
    let mut out: Vec<Expr> = Vec::with_capacity(MultiIndex::count_up_to(order));
    for mi in MultiIndex::all_up_to(order) {
        if mi.order() == 0 {
            out.push(e.clone());
            continue;
        }
        let slot = mi.0.iter().position(|&k| k > 0).expect("nonzero index");
        let mut parent = mi;
        parent.0[slot] -= 1;
        let d = partial_coord(&out[parent.position()], base[slot]);
        out.push(d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn an(s: &str) -> AnalyticFn {
        AnalyticFn::parse(s, Coord::Z).unwrap()
    }

    fn anu(s: &str) -> AnalyticFn {
        AnalyticFn::parse(s, Coord::U).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn p1_hand_values() {
        let p1 = make_sol_plus(&an("0"), &an("z")).unwrap();
        let j = p1.jet(1.0, c(1.0, 0.0), 2).unwrap();
        assert!(close(j.value(), -(4f64.ln()), 1e-14));
        assert!(close(j.at(1, 0, 0), 2.0, 1e-14));
        assert!(close(j.at(2, 0, 0), -2.0, 1e-14));
        assert!(close(j.at(0, 1, 1), 0.5, 1e-14));
    }

    #[test]
    fn p2_reality() {
        let p2 = make_sol_plus(&an("z"), &an("z")).unwrap();
        let j = p2.jet(1.0, c(1.0, 1.0), 4).unwrap();
        assert!(j.reality_check() < 1e-12);
        assert!(close(j.at(1, 0, 0), 0.8, 1e-14));
        assert!(close(j.at(2, 0, 0), -0.24, 1e-14));
    }

    #[test]
    fn m2_first_derivatives() {
        let m2 = make_sol_minus(&an("z"), &an("z")).unwrap();
        let j = m2.jet(1.0, c(1.0, 1.0), 2).unwrap();
        assert!(close(j.at(1, 0, 0), 0.8, 1e-14));
        let m1 = make_sol_minus(&an("0"), &an("z")).unwrap();
        let j = m1.jet(1.0, c(1.0, 0.0), 2).unwrap();
        assert!(close(j.at(1, 0, 0), 2.0, 1e-14));
        assert!(close(j.at(2, 0, 0), -2.0, 1e-14));
    }

    #[test]
    fn constant_c_rejected() {
        assert_eq!(make_sol_plus(&an("z"), &an("1")).unwrap_err(), FieldError::DegenerateC);
        assert_eq!(make_sol_minus(&an("0"), &an("2+i")).unwrap_err(), FieldError::DegenerateC);
    }

    #[test]
    fn domain_guards() {
        let p1 = make_sol_plus(&an("0"), &an("z")).unwrap();
        assert!(p1.in_domain(1.0, c(0.5, 0.3)));
        assert!(!p1.in_domain(1.0, c(-0.5, 0.3)));
        assert!(!p1.in_domain(0.0, c(0.5, 0.3)));
        assert!(matches!(p1.jet(1.0, c(-1.0, 0.0), 2), Err(FieldError::OutOfDomain { .. })));
    }

    #[test]
    fn hodograph_trivial_point() {
        let f = make_hodograph(&anu("0"), &anu("0")).unwrap();
        assert!(f.solve(2.0, c(1.0, 0.0)).unwrap().abs() < 1e-13);
        let h = f.hodograph_jet_at_u(0.0, c(1.0, 0.0), 3).unwrap();
        assert!(close(h.value(), 2.0, 1e-15));
        assert!(close(h.at(1, 0, 0), 1.0, 1e-15));
        assert!(close(h.at(2, 0, 0), 0.5, 1e-15));
    }

    #[test]
    fn hodograph_matches_p1() {
        let f = make_hodograph(&anu("0"), &anu("0")).unwrap();
        let p1 = make_sol_plus(&an("0"), &an("z")).unwrap();
        for (t, zz) in [(2.0, c(1.0, 0.0)), (1.3, c(0.7, 0.4)), (0.8, c(1.2, -0.3))] {
            let (a, b) = (f.jet(t, zz, 4).unwrap(), p1.jet(t, zz, 4).unwrap());
            for ((_, x), (_, y)) in a.coeffs().zip(b.coeffs()) {
                assert!((x - y).norm() <= 1e-10 * (1.0 + y.norm()), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn conformal_shift_and_square() {
        let p2 = make_sol_plus(&an("z"), &an("z")).unwrap();
        let shifted = conformal_transform(&p2, &an("z+1")).unwrap();
        let (a, b) = (shifted.jet(1.0, c(0.2, 0.5), 3).unwrap(), p2.jet(1.0, c(1.2, 0.5), 3).unwrap());
        for ((_, x), (_, y)) in a.coeffs().zip(b.coeffs()) {
            assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
        assert_eq!(conformal_transform(&p2, &an("3")).unwrap_err(), FieldError::DegenerateMap);
        let sq = conformal_transform(&p2, &an("z^2")).unwrap();
        assert!(!sq.in_domain(1.0, c(0.0, 0.0)));
    }

    #[test]
    fn side_condition_u_zzbar_t_vanishes() {
        for f in [make_sol_plus(&an("z"), &an("z")).unwrap(), make_sol_minus(&an("z^2"), &an("exp(z)")).unwrap()] {
            let j = f.jet(1.1, c(0.6, 0.2), 3).unwrap();
            assert!(j.at(1, 1, 1).norm() < 1e-9);
        }
    }
}
