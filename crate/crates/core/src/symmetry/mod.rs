//! Point-symmetry generators, characteristics, linearization and
//! determining-equation residuals along solution fields.

mod spec;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::diffexpr::{
    partial_coord, partial_wrt, substitute, total_derivative_index, AnalyticFn, Binding, Coord, EvalError, Expr,
    ExprError, Node, Picture, Tape, MAX_ORDER,
};
use crate::families::{Field, FieldError};
use crate::harness::{map_points, Accumulator, CheckResult, Execution};

pub use spec::{parse_generator, GeneratorSpecError};

const COORDS: [Coord; 4] = [Coord::T, Coord::U, Coord::Z, Coord::Zbar];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("generator X needs a function a(z)")]
    MissingFunction,
    #[error("expected a function of `{expected}`")]
    WrongVariable { expected: &'static str },
    #[error("pictures differ: {0} vs {1}")]
    PictureMismatch(Picture, Picture),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A vector field on `(t, u, z, zbar)` space. Coefficients are
/// coordinate-only expressions; `picture` decides which coordinate plays
/// the unknown.
#[derive(Debug, Clone)]
pub struct Generator {
    picture: Picture,
    coeffs: [Expr; 4],
}

/// The three direct-picture generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfGenerator {
    /// `d_t`
    T,
    /// `t d_t + 2 d_u`
    G,
    /// `a d_z + abar d_zbar - (a' + abar') d_u`
    X,
}

impl Generator {
    /// From coefficients of `d_t, d_u, d_z, d_zbar`.
    pub fn new(picture: Picture, t: Expr, u: Expr, z: Expr, zbar: Expr) -> Generator {
        Generator { picture, coeffs: [t, u, z, zbar] }
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    /// Coefficient of `d_c`.
    pub fn coeff(&self, c: Coord) -> &Expr {
        &self.coeffs[c.index()]
    }

    /// Same vector field, read with the other coordinate as the unknown.
    pub fn in_picture(&self, picture: Picture) -> Generator {
        Generator { picture, coeffs: self.coeffs.clone() }
    }

    fn apply(&self, f: &Expr) -> Expr {
        Expr::sum(COORDS.iter().map(|&c| self.coeff(c) * partial_coord(f, c)))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in COORDS {
            let e = self.coeff(c);
            if e.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{e} d_{}", c.name())?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `[A, B]^c = A(B^c) - B(A^c)`.
pub fn bracket(a: &Generator, b: &Generator) -> Result<Generator, SymmetryError> {
    if a.picture != b.picture {
        return Err(SymmetryError::PictureMismatch(a.picture, b.picture));
    }
    let coeffs = COORDS.map(|c| a.apply(b.coeff(c)) - b.apply(a.coeff(c)));
    Ok(Generator { picture: a.picture, coeffs })
}

pub fn make_bf_generator(which: BfGenerator, a: Option<&AnalyticFn>) -> Result<Generator, SymmetryError> {
    let zero = Expr::zero;
    Ok(match which {
        BfGenerator::T => Generator::new(Picture::Direct, Expr::one(), zero(), zero(), zero()),
        BfGenerator::G => Generator::new(Picture::Direct, Expr::coord(Coord::T), Expr::real(2.0), zero(), zero()),
        BfGenerator::X => {
            let a = a.ok_or(SymmetryError::MissingFunction)?;
            if a.var() != Coord::Z {
                return Err(SymmetryError::WrongVariable { expected: "z" });
            }
            let ab = a.conjugate_partner();
            let phi = -(a.derivative().at_var() + ab.derivative().at_var());
            Generator::new(Picture::Direct, zero(), phi, a.at_var(), ab.at_var())
        }
    })
}

/// Hodograph generator built from eight functions `a(u), ..., h(u)`:
/// `a d_u + [2 z g + 2 zbar e^u b + t e + h] d_t + [t b + z c + d] d_z
///  + {zbar [2e - a - c] + f + t g e^{-u}} d_zbar`.
pub fn make_hod_generator(fns: &[AnalyticFn; 8]) -> Result<Generator, SymmetryError> {
    if fns.iter().any(|f| f.var() != Coord::U) {
        return Err(SymmetryError::WrongVariable { expected: "u" });
    }
    let [a, b, c, d, e, f, g, h] = fns.clone().map(|x| x.at_var());
    let (t, u) = (Expr::coord(Coord::T), Expr::coord(Coord::U));
    let (z, zb) = (Expr::coord(Coord::Z), Expr::coord(Coord::Zbar));
    let xi_t = Expr::sum([(&z * &g).scale(2.0), (&zb * u.exp() * &b).scale(2.0), &t * &e, h]);
    let xi_z = Expr::sum([&t * &b, &z * &c, d]);
    let xi_zb = Expr::sum([&zb * (e.scale(2.0) - &a - &c), f, &t * &g * (-&u).exp()]);
    Ok(Generator::new(Picture::Hodograph, xi_t, a, xi_z, xi_zb))
}

/// Slot names of the hodograph generator, in argument order.
pub const HOD_SLOTS: [char; 8] = ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'];

/// Generator with one slot set to `func` and the others zero.
pub fn hod_slot_generator(slot: char, func: &AnalyticFn) -> Result<Generator, SymmetryError> {
    let k = HOD_SLOTS.iter().position(|&s| s == slot).ok_or(SymmetryError::WrongVariable { expected: "u" })?;
    let zero = AnalyticFn::new(Coord::U, Expr::zero())?;
    let mut fns: [AnalyticFn; 8] = std::array::from_fn(|_| zero.clone());
    fns[k] = func.clone();
    make_hod_generator(&fns)
}

/// Evolutionary form: `Q = coeff(unknown) - sum_i xi^i w_i`, with the unknown
/// coordinate inside the coefficients replaced by the jet variable.
pub fn characteristic(gen: &Generator) -> Expr {
    let p = gen.picture;
    let w = Expr::jet(p, 0, 0, 0);
    let unknown = p.unknown();
    let as_jet = |e: &Expr| {
        substitute(e, &|n| match n {
            Node::Coord(c) if *c == unknown => Some(w.clone()),
            _ => None,
        })
    };
    let mut terms = vec![as_jet(gen.coeff(unknown))];
    for (slot, c) in p.base().into_iter().enumerate() {
        let mut idx = [0u8; 3];
        idx[slot] = 1;
        terms.push(-(as_jet(gen.coeff(c)) * Expr::jet(p, idx[0], idx[1], idx[2])));
    }
    Expr::sum(terms)
}

/// `sum_J (dE/dw_J) D_J Q`.
pub fn linearize(e: &Expr, q: &Expr, picture: Picture) -> Result<Expr, SymmetryError> {
    let mut terms = Vec::new();
    for d in e.deriv_coords() {
        if d.unknown != picture.unknown() {
            return Err(ExprError::PictureMismatch { coord: d.unknown }.into());
        }
        let de = partial_wrt(e, d);
        if de.is_zero() {
            continue;
        }
        terms.push(de * total_derivative_index(q, picture, d.index, MAX_ORDER)?);
    }
    Ok(Expr::sum(terms))
}

/// Evaluates `linearize(E, Q)` for each equation at field jets of the
/// generator's picture; one check per equation, named by `names`.
pub fn symmetry_residual(
    gen: &Generator,
    equations: &[(String, Expr)],
    field: &Field,
    samples: &[(f64, Complex64)],
    tol: f64,
    exec: Execution,
) -> Result<Vec<CheckResult>, SymmetryError> {
    let q = characteristic(gen);
    let lin = equations
        .iter()
        .map(|(_, e)| linearize(e, &q, gen.picture))
        .collect::<Result<Vec<_>, _>>()?;
    let order = lin.iter().map(Expr::max_order).max().unwrap_or(0).max(1);
    let tape = Tape::new(&lin);
    let rows = map_points(exec, samples, |&(t, z)| {
        let jet = match gen.picture {
            Picture::Direct => field.jet(t, z, order),
            Picture::Hodograph => field.hodograph_jet(t, z, order),
        };
        jet.map_err(SymmetryError::from).and_then(|j| Ok(tape.eval(&Binding::jet(&j))?))
    });
    let mut acc: Vec<Accumulator> = vec![Accumulator::default(); lin.len()];
    for row in rows {
        match row {
            Ok(v) => acc.iter_mut().zip(v).for_each(|(a, x)| a.push(x.norm())),
            Err(_) => acc.iter_mut().for_each(Accumulator::skip),
        }
    }
    Ok(equations.iter().zip(acc).map(|((name, _), a)| a.finish(name.clone(), tol)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffexpr::{evaluate, parse_expr};
    use crate::foliation::bf_expr;
    use crate::families::{make_sol_plus, Kappa};
    use crate::hodograph::ansatz_expr;

    fn az(s: &str) -> AnalyticFn {
        AnalyticFn::parse(s, Coord::Z).unwrap()
    }

    fn au(s: &str) -> AnalyticFn {
        AnalyticFn::parse(s, Coord::U).unwrap()
    }

    #[test]
    fn printed_generators() {
        let t = make_bf_generator(BfGenerator::T, None).unwrap();
        assert!(t.coeff(Coord::T).is_one() && t.coeff(Coord::U).is_zero());
        let g = make_bf_generator(BfGenerator::G, None).unwrap();
        assert_eq!(g.coeff(Coord::T), &Expr::coord(Coord::T));
        assert_eq!(g.coeff(Coord::U).as_const(), Some(Complex64::new(2.0, 0.0)));
        let x = make_bf_generator(BfGenerator::X, Some(&az("z"))).unwrap();
        assert_eq!(x.coeff(Coord::U).as_const(), Some(Complex64::new(-2.0, 0.0)));
        assert_eq!(x.coeff(Coord::Zbar), &Expr::coord(Coord::Zbar));
        assert!(make_bf_generator(BfGenerator::X, None).is_err());
    }

    #[test]
    fn hod_slots() {
        let one = au("1");
        let e = hod_slot_generator('e', &one).unwrap();
        assert_eq!(e.coeff(Coord::T), &Expr::coord(Coord::T));
        assert_eq!(e.coeff(Coord::Zbar), &Expr::coord(Coord::Zbar).scale(2.0));
        let a = hod_slot_generator('a', &one).unwrap();
        assert!(a.coeff(Coord::U).is_one());
        assert_eq!(a.coeff(Coord::Zbar), &-Expr::coord(Coord::Zbar));
        let h = hod_slot_generator('h', &one).unwrap();
        assert!(h.coeff(Coord::T).is_one() && h.coeff(Coord::Z).is_zero());
    }

    #[test]
    fn characteristics() {
        let d = Picture::Direct;
        let t = make_bf_generator(BfGenerator::T, None).unwrap();
        assert_eq!(characteristic(&t), -Expr::jet(d, 1, 0, 0));
        let g = make_bf_generator(BfGenerator::G, None).unwrap();
        let want = parse_expr("2 - t*u_t", d).unwrap();
        let jet = crate::jets::Jet::from_fn(d, 0.7, Complex64::new(0.3, 0.2), 1, |mi| Complex64::new(mi.position() as f64 + 0.5, 0.0));
        let b = Binding::jet(&jet);
        assert!((evaluate(&characteristic(&g), &b).unwrap() - evaluate(&want, &b).unwrap()).norm() < 1e-15);
        let e = hod_slot_generator('e', &au("1")).unwrap();
        let h = Picture::Hodograph;
        let want = parse_expr("t - 2*zbar*t_zbar", h).unwrap();
        let jet = crate::jets::Jet::from_fn(h, 0.7, Complex64::new(0.3, 0.2), 1, |mi| Complex64::new(mi.position() as f64 + 0.5, 0.1));
        let b = Binding::jet(&jet);
        assert!((evaluate(&characteristic(&e), &b).unwrap() - evaluate(&want, &b).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn linearize_structure() {
        let d = Picture::Direct;
        let ut = Expr::jet(d, 1, 0, 0);
        assert_eq!(linearize(&ut, &-ut.clone(), d).unwrap(), -Expr::jet(d, 2, 0, 0));
        let h = Picture::Hodograph;
        let q = parse_expr("t - 2*zbar*t_zbar", h).unwrap();
        let lin = linearize(&ansatz_expr(Kappa::Plus), &q, h).unwrap();
        assert!(lin.deriv_coords().iter().all(|d| d.unknown == Coord::T));
    }

    #[test]
    fn time_translation_on_p2() {
        let p2 = make_sol_plus(&az("z"), &az("z")).unwrap();
        let t = make_bf_generator(BfGenerator::T, None).unwrap();
        let samples = [(1.0, Complex64::new(1.0, 1.0)), (1.4, Complex64::new(0.6, -0.2))];
        let r = symmetry_residual(&t, &[("bf".into(), bf_expr(Kappa::Plus))], &p2, &samples, 1e-9, Execution::Sequential).unwrap();
        assert!(r[0].pass && r[0].n == 2, "{r:?}");
    }

    #[test]
    fn brackets() {
        let t = make_bf_generator(BfGenerator::T, None).unwrap();
        let g = make_bf_generator(BfGenerator::G, None).unwrap();
        let tg = bracket(&t, &g).unwrap();
        assert!(tg.coeff(Coord::T).is_one());
        assert!(COORDS[1..].iter().all(|&c| tg.coeff(c).is_zero()));
    }
}
