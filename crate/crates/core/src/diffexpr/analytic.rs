use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::diff::{partial_coord, substitute};
use super::expr::{Expr, Node};
use super::{parse_expr, Binding, Coord, EvalError, ExprError, Picture, Tape};

/// A function of one variable (`z` for holomorphic data, `u` for functions
/// of the hodograph coordinate), stored as a formula in that variable.
#[derive(Clone)]
pub struct AnalyticFn {
    var: Coord,
    formula: Expr,
    // successive derivatives, index k holds the k-th
    derivs: Arc<Mutex<Vec<Expr>>>,
}

impl fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticFn({} ↦ {})", self.var.name(), self.formula)
    }
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)
    }
}

impl AnalyticFn {
    pub fn new(var: Coord, formula: Expr) -> Result<Self, ExprError> {
        let bad = |found: String| ExprError::BadAnalyticVariable { expected: var.name(), found };
        if let Some(d) = formula.deriv_coords().into_iter().next() {
            return Err(bad(Expr::deriv(d).to_string()));
        }
        if let Some(c) = formula.coords().into_iter().find(|&c| c != var) {
            return Err(bad(c.name().to_string()));
        }
        Ok(AnalyticFn { var, derivs: Arc::new(Mutex::new(vec![formula.clone()])), formula })
    }

    /// Parses a formula in `var` (`z`, `zbar` or `u`).
    pub fn parse(text: &str, var: Coord) -> Result<Self, ExprError> {
        let picture = match var {
            Coord::U => Picture::Hodograph,
            _ => Picture::Direct,
        };
        AnalyticFn::new(var, parse_expr(text, picture)?)
    }

    pub fn var(&self) -> Coord {
        self.var
    }

    pub fn formula(&self) -> &Expr {
        &self.formula
    }

    /// `f(arg)` as an expression.
    pub fn apply(&self, arg: &Expr) -> Expr {
        let var = self.var;
        substitute(&self.formula, &|n| match n {
            Node::Coord(c) if *c == var => Some(arg.clone()),
            _ => None,
        })
    }

    /// `f(var)` itself.
    pub fn at_var(&self) -> Expr {
        self.formula.clone()
    }

    pub fn derivative(&self) -> AnalyticFn {
        self.nth_derivative(1)
    }

    pub fn nth_derivative(&self, k: usize) -> AnalyticFn {
        let mut cache = self.derivs.lock().expect("derivative cache poisoned");
        while cache.len() <= k {
            let next = partial_coord(cache.last().unwrap(), self.var);
            cache.push(next);
        }
        AnalyticFn::new(self.var, cache[k].clone()).expect("derivative keeps the variable")
    }

    /// Syntactic conjugate: constants conjugated, `z` and `zbar` swapped.
    pub fn conjugate_partner(&self) -> AnalyticFn {
        let formula = substitute(&self.formula, &|n| match n {
            Node::Const(c) => Some(Expr::constant(c.conj())),
            Node::Coord(c) => Some(Expr::coord(c.conj())),
            _ => None,
        });
        AnalyticFn::new(self.var.conj(), formula).expect("conjugation keeps a single variable")
    }

    /// True when the derivative folds to the zero constant.
    pub fn is_constant(&self) -> bool {
        self.derivative().formula.is_zero()
    }

    pub fn eval(&self, at: Complex64) -> Result<Complex64, EvalError> {
        Ok(self.taylor(at, 0)?[0])
    }

    /// Taylor coefficients `f^(k)(at)/k!` for `k = 0..=order`.
    pub fn taylor(&self, at: Complex64, order: usize) -> Result<Vec<Complex64>, EvalError> {
        let exprs: Vec<Expr> = (0..=order).map(|k| self.nth_derivative(k).formula).collect();
        let vals = Tape::new(&exprs).eval(&Binding::new().with(self.var, at))?;
        let mut fact = 1.0;
        Ok(vals
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                if k > 0 {
                    fact *= k as f64;
                }
                v / fact
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_of_exp() {
        let f = AnalyticFn::parse("exp(z)", Coord::Z).unwrap();
        let c = f.taylor(Complex64::new(0.0, 0.0), 4).unwrap();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (a, b) in c.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(c.len(), 5);
    }

    #[test]
    fn conjugate_partner_conjugates_constants() {
        let f = AnalyticFn::parse("(1 + 2*i)*z^2", Coord::Z).unwrap();
        let g = f.conjugate_partner();
        assert_eq!(g.var(), Coord::Zbar);
        let z = Complex64::new(0.3, -0.7);
        let lhs = g.taylor(z.conj(), 0).unwrap()[0];
        let rhs = f.taylor(z, 0).unwrap()[0].conj();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn rejects_other_variables() {
        assert!(AnalyticFn::parse("z*t", Coord::Z).is_err());
        assert!(AnalyticFn::parse("u^2", Coord::U).is_ok());
        assert!(AnalyticFn::parse("z", Coord::U).is_err());
    }

    #[test]
    fn constants_detected() {
        assert!(AnalyticFn::parse("1", Coord::Z).unwrap().is_constant());
        assert!(AnalyticFn::parse("z - z", Coord::Z).unwrap().is_constant());
        assert!(!AnalyticFn::parse("exp(z)", Coord::Z).unwrap().is_constant());
    }
}
