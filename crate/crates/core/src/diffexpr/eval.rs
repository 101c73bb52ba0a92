use std::collections::HashMap;

use num_complex::Complex64;

use super::expr::{Exponent, Expr, Func, Node};
use super::{Coord, DerivCoord, EvalError};
use crate::jets::Jet;

/// Values for coordinates and, optionally, a jet supplying derivative coordinates.
#[derive(Debug, Clone, Copy, Default)]
pub struct Binding<'a> {
    coords: [Option<Complex64>; 4],
    jet: Option<&'a Jet>,
}

impl<'a> Binding<'a> {
    pub fn new() -> Self {
        Binding::default()
    }

    /// Base coordinates taken from the jet's base point (`zbar = conj(z)`).
    pub fn jet(jet: &'a Jet) -> Self {
        let mut b = Binding { coords: [None; 4], jet: Some(jet) };
        let [first, z, zbar] = jet.picture().base();
        b.coords[first.index()] = Some(Complex64::new(jet.first(), 0.0));
        b.coords[z.index()] = Some(jet.z());
        b.coords[zbar.index()] = Some(jet.z().conj());
        b
    }

    pub fn with(mut self, c: Coord, v: Complex64) -> Self {
        self.coords[c.index()] = Some(v);
        self
    }

    pub fn coord(&self, c: Coord) -> Result<Complex64, EvalError> {
        self.coords[c.index()].ok_or(EvalError::MissingCoord(c.name()))
    }

    fn deriv(&self, d: DerivCoord) -> Result<Complex64, EvalError> {
        let jet = self.jet.ok_or(EvalError::MissingDerivative(d))?;
        if jet.picture().unknown() != d.unknown {
            return Err(EvalError::MissingDerivative(d));
        }
        jet.get(d.index).ok_or(EvalError::MissingDerivative(d))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Const(u64, u64),
    Coord(Coord),
    Deriv(DerivCoord),
    Func(Func, usize),
    Sum(Vec<usize>),
    Product(Vec<usize>),
    Pow(usize, Exponent),
    Neg(usize),
}

#[derive(Debug, Clone)]
enum Op {
    Const(Complex64),
    Coord(Coord),
    Deriv(DerivCoord),
    Func(Func, usize),
    Sum(Vec<usize>),
    Product(Vec<usize>),
    Pow(usize, Exponent),
    Neg(usize),
}

/// A flattened, common-subexpression-eliminated evaluation program for a set
/// of expressions. Built once, evaluated at many bindings.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
}

impl Tape {
    pub fn new(exprs: &[Expr]) -> Tape {
        let mut b = Builder { ops: Vec::new(), by_id: HashMap::new(), by_key: HashMap::new() };
        let outputs = exprs.iter().map(|e| b.slot(e)).collect();
        Tape { ops: b.ops, outputs }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn eval(&self, binding: &Binding) -> Result<Vec<Complex64>, EvalError> {
        let mut vals: Vec<Complex64> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => *c,
                Op::Coord(c) => binding.coord(*c)?,
                Op::Deriv(d) => binding.deriv(*d)?,
                Op::Neg(a) => -vals[*a],
                Op::Sum(xs) => xs.iter().map(|&i| vals[i]).sum(),
                Op::Product(xs) => xs.iter().fold(Complex64::new(1.0, 0.0), |acc, &i| acc * vals[i]),
                Op::Pow(a, n) => n.eval(vals[*a]).ok_or(EvalError::Singular("division by zero"))?,
                Op::Func(f, a) => f.apply(vals[*a]).ok_or(EvalError::Singular("logarithm of zero"))?,
            };
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(EvalError::Singular("non-finite intermediate value"));
            }
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|&i| vals[i]).collect())
    }
}

struct Builder {
    ops: Vec<Op>,
    by_id: HashMap<usize, usize>,
    by_key: HashMap<Key, usize>,
}

impl Builder {
    fn slot(&mut self, e: &Expr) -> usize {
        if let Some(&s) = self.by_id.get(&e.id()) {
            return s;
        }
        let (key, op) = match e.node() {
            Node::Const(c) => (Key::Const(c.re.to_bits(), c.im.to_bits()), Op::Const(*c)),
            Node::Coord(c) => (Key::Coord(*c), Op::Coord(*c)),
            Node::Deriv(d) => (Key::Deriv(*d), Op::Deriv(*d)),
            Node::Func(f, a) => {
                let a = self.slot(a);
                (Key::Func(*f, a), Op::Func(*f, a))
            }
            Node::Neg(a) => {
                let a = self.slot(a);
                (Key::Neg(a), Op::Neg(a))
            }
            Node::Pow(a, n) => {
                let a = self.slot(a);
                (Key::Pow(a, *n), Op::Pow(a, *n))
            }
            Node::Sum(xs) => {
                let mut s: Vec<usize> = xs.iter().map(|x| self.slot(x)).collect();
                s.sort_unstable();
                (Key::Sum(s.clone()), Op::Sum(s))
            }
            Node::Product(xs) => {
                let mut s: Vec<usize> = xs.iter().map(|x| self.slot(x)).collect();
                s.sort_unstable();
                (Key::Product(s.clone()), Op::Product(s))
            }
        };
        let slot = match self.by_key.get(&key) {
            Some(&s) => s,
            None => {
                self.ops.push(op);
                let s = self.ops.len() - 1;
                self.by_key.insert(key, s);
                s
            }
        };
        self.by_id.insert(e.id(), slot);
        slot
    }
}

/// Numeric value of `e` under `binding`.
pub fn evaluate(e: &Expr, binding: &Binding) -> Result<Complex64, EvalError> {
    Ok(Tape::new(std::slice::from_ref(e)).eval(binding)?[0])
}
