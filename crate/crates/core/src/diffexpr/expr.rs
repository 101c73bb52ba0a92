use std::collections::BTreeSet;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::{Coord, DerivCoord, MultiIndex, Picture};

/// Elementary functions understood by the parser and the differentiator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [Func::Exp, Func::Log, Func::Sin, Func::Cos, Func::Sinh, Func::Cosh, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Principal-branch evaluation; `None` at a singularity.
    pub fn apply(self, x: Complex64) -> Option<Complex64> {
        match self {
            Func::Exp => Some(x.exp()),
            Func::Log if x == Complex64::new(0.0, 0.0) => None,
            Func::Log => Some(x.ln()),
            Func::Sin => Some(x.sin()),
            Func::Cos => Some(x.cos()),
            Func::Sinh => Some(x.sinh()),
            Func::Cosh => Some(x.cosh()),
            Func::Sqrt => Some(x.sqrt()),
        }
    }
}

/// Integer or half-integer exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Int(i32),
    /// `Half(n)` is `n/2` with `n` odd.
    Half(i32),
}

impl Exponent {
    pub fn from_f64(x: f64) -> Option<Exponent> {
        let twice = 2.0 * x;
        if twice.fract() != 0.0 || twice.abs() > 1e6 {
            return None;
        }
        let n = twice as i32;
        Some(if n % 2 == 0 { Exponent::Int(n / 2) } else { Exponent::Half(n) })
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Int(n) => n as f64,
            Exponent::Half(n) => n as f64 / 2.0,
        }
    }

    /// `self - 1`.
    pub fn decrement(self) -> Exponent {
        match self {
            Exponent::Int(n) => Exponent::Int(n - 1),
            Exponent::Half(n) => Exponent::Half(n - 2),
        }
    }

    pub fn is_negative(self) -> bool {
        self.value() < 0.0
    }

    pub(crate) fn eval(self, base: Complex64) -> Option<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Exponent::Int(0) => Some(Complex64::new(1.0, 0.0)),
            Exponent::Int(n) if n < 0 && base == zero => None,
            Exponent::Int(n) => Some(base.powi(n)),
            Exponent::Half(n) if n < 0 && base == zero => None,
            Exponent::Half(n) => Some(base.sqrt().powi(n)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Coord(Coord),
    Deriv(DerivCoord),
    Func(Func, Expr),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, Exponent),
    Neg(Expr),
}

/// Immutable, cheaply clonable expression handle. Subtrees are shared.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    /// Identity of the shared node, for memo tables.
    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(c: Complex64) -> Expr {
        Expr::from_node(Node::Const(c))
    }

    pub fn real(x: f64) -> Expr {
        Expr::constant(Complex64::new(x, 0.0))
    }

    pub fn zero() -> Expr {
        Expr::real(0.0)
    }

    pub fn one() -> Expr {
        Expr::real(1.0)
    }

    pub fn i() -> Expr {
        Expr::constant(Complex64::new(0.0, 1.0))
    }

    pub fn coord(c: Coord) -> Expr {
        Expr::from_node(Node::Coord(c))
    }

    pub fn deriv(d: DerivCoord) -> Expr {
        Expr::from_node(Node::Deriv(d))
    }

    /// Jet coordinate of `picture`'s unknown with the given derivative counts.
    pub fn jet(picture: Picture, first: u8, z: u8, zbar: u8) -> Expr {
        Expr::deriv(DerivCoord::new(picture, MultiIndex::new(first, z, zbar)))
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(Complex64::new(1.0, 0.0))
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut saw_const = false;
        for t in terms {
            match t.node() {
                Node::Const(c) => {
                    acc += c;
                    saw_const = true;
                }
                Node::Sum(inner) => {
                    for s in inner {
                        match s.as_const() {
                            Some(c) => {
                                acc += c;
                                saw_const = true;
                            }
                            None => flat.push(s.clone()),
                        }
                    }
                }
                _ => flat.push(t),
            }
        }
        if saw_const && acc != Complex64::new(0.0, 0.0) {
            flat.push(Expr::constant(acc));
        }
        match flat.len() {
            0 => Expr::zero(),
            1 => flat.pop().unwrap(),
            _ => Expr::from_node(Node::Sum(flat)),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut acc = Complex64::new(1.0, 0.0);
        for f in factors {
            match f.node() {
                Node::Const(c) => acc *= c,
                Node::Product(inner) => {
                    for g in inner {
                        match g.as_const() {
                            Some(c) => acc *= c,
                            None => flat.push(g.clone()),
                        }
                    }
                }
                Node::Neg(inner) => {
                    acc = -acc;
                    match inner.node() {
                        Node::Product(ps) => {
                            for g in ps {
                                match g.as_const() {
                                    Some(c) => acc *= c,
                                    None => flat.push(g.clone()),
                                }
                            }
                        }
                        _ => flat.push(inner.clone()),
                    }
                }
                _ => flat.push(f),
            }
        }
        if acc == Complex64::new(0.0, 0.0) {
            return Expr::zero();
        }
        if flat.is_empty() {
            return Expr::constant(acc);
        }
        if acc == Complex64::new(-1.0, 0.0) {
            let inner = if flat.len() == 1 { flat.pop().unwrap() } else { Expr::from_node(Node::Product(flat)) };
            return Expr::from_node(Node::Neg(inner));
        }
        if acc != Complex64::new(1.0, 0.0) {
            flat.insert(0, Expr::constant(acc));
        }
        match flat.len() {
            1 => flat.pop().unwrap(),
            _ => Expr::from_node(Node::Product(flat)),
        }
    }

    pub fn pow(&self, e: Exponent) -> Expr {
        match e {
            Exponent::Int(0) => return Expr::one(),
            Exponent::Int(1) => return self.clone(),
            _ => {}
        }
        if let Some(c) = self.as_const() {
            if let Some(v) = e.eval(c) {
                return Expr::constant(v);
            }
        }
        if let (Node::Pow(base, Exponent::Int(a)), Exponent::Int(b)) = (self.node(), e) {
            return base.pow(Exponent::Int(a * b));
        }
        Expr::from_node(Node::Pow(self.clone(), e))
    }

    pub fn powi(&self, n: i32) -> Expr {
        self.pow(Exponent::Int(n))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            if let Some(v) = f.apply(c) {
                return Expr::constant(v);
            }
        }
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn exp(&self) -> Expr {
        Expr::apply(Func::Exp, self.clone())
    }

    pub fn ln(&self) -> Expr {
        Expr::apply(Func::Log, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        Expr::apply(Func::Sqrt, self.clone())
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::apply(Func::Cos, self.clone())
    }

    pub fn scale(&self, c: f64) -> Expr {
        Expr::product([Expr::real(c), self.clone()])
    }

    /// Children in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Coord(_) | Node::Deriv(_) => vec![],
            Node::Func(_, a) | Node::Pow(a, _) | Node::Neg(a) => vec![a],
            Node::Sum(xs) | Node::Product(xs) => xs.iter().collect(),
        }
    }

    /// All jet coordinates appearing anywhere in the tree.
    pub fn deriv_coords(&self) -> BTreeSet<DerivCoord> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            if let Node::Deriv(d) = e.node() {
                out.insert(*d);
            }
            stack.extend(e.children());
        }
        out
    }

    /// All plain coordinates appearing anywhere in the tree.
    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            if let Node::Coord(c) = e.node() {
                out.insert(*c);
            }
            stack.extend(e.children());
        }
        out
    }

    /// Highest jet order among the derivative coordinates present.
    pub fn max_order(&self) -> usize {
        self.deriv_coords().iter().map(|d| d.order()).max().unwrap_or(0)
    }

    /// Number of distinct shared nodes.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if seen.insert(e.id()) {
                stack.extend(e.children());
            }
        }
        seen.len()
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Expr {
        Expr::real(x)
    }
}

impl From<Complex64> for Expr {
    fn from(c: Complex64) -> Expr {
        Expr::constant(c)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::from_node(Node::Neg(self.clone())),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let ($a, $b) = (&self, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (&self, rhs);
                $body
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let ($a, $b) = (self, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                let rhs = Expr::real(rhs);
                let ($a, $b) = (&self, &rhs);
                $body
            }
        }
        impl $tr<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                let rhs = Expr::real(rhs);
                let ($a, $b) = (self, &rhs);
                $body
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::product([a.clone(), b.recip()]));

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_is_idempotent() {
        let z = Expr::coord(Coord::Z);
        let e = (&z + 1.0 + 2.0) * 1.0 * 3.0;
        let again = Expr::product([Expr::sum([e.clone()])]);
        assert_eq!(e, again);
        assert!((&z * 0.0).is_zero());
        assert_eq!(Expr::sum([Expr::real(2.0), Expr::real(-2.0)]), Expr::zero());
    }

    #[test]
    fn negation_cancels() {
        let z = Expr::coord(Coord::Z);
        assert_eq!(-(-&z), z);
        assert_eq!((&z * -1.0).node(), &Node::Neg(z.clone()));
    }

    #[test]
    fn exponent_from_literals() {
        assert_eq!(Exponent::from_f64(2.0), Some(Exponent::Int(2)));
        assert_eq!(Exponent::from_f64(-0.5), Some(Exponent::Half(-1)));
        assert_eq!(Exponent::from_f64(0.3), None);
    }
}
