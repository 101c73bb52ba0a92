use std::collections::HashMap;

use super::expr::{Expr, Func, Node};
use super::{Coord, DerivCoord, ExprError, MultiIndex, Picture};

/// Memoized structural recursion for first-order derivations. `leaf`
/// handles constants, coordinates and jet coordinates.
struct Deriver<'a> {
    leaf: &'a dyn Fn(&Node) -> Result<Expr, ExprError>,
    memo: HashMap<usize, Expr>,
}

impl Deriver<'_> {
    fn d(&mut self, e: &Expr) -> Result<Expr, ExprError> {
        if let Some(hit) = self.memo.get(&e.id()) {
            return Ok(hit.clone());
        }
        let out = match e.node() {
            Node::Const(_) | Node::Coord(_) | Node::Deriv(_) => (self.leaf)(e.node())?,
            Node::Neg(a) => -self.d(a)?,
            Node::Sum(xs) => {
                let mut terms = Vec::with_capacity(xs.len());
                for x in xs {
                    terms.push(self.d(x)?);
                }
                Expr::sum(terms)
            }
            Node::Product(xs) => {
                let mut terms = Vec::with_capacity(xs.len());
                for (i, x) in xs.iter().enumerate() {
                    let dx = self.d(x)?;
                    if dx.is_zero() {
                        continue;
                    }
                    let rest = xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, y)| y.clone());
                    terms.push(Expr::product(rest.chain(std::iter::once(dx))));
                }
                Expr::sum(terms)
            }
            Node::Pow(base, n) => {
                let db = self.d(base)?;
                if db.is_zero() {
                    Expr::zero()
                } else {
                    Expr::product([Expr::real(n.value()), base.pow(n.decrement()), db])
                }
            }
            Node::Func(f, a) => {
                let da = self.d(a)?;
                if da.is_zero() {
                    Expr::zero()
                } else {
                    let outer = match f {
                        Func::Exp => e.clone(),
                        Func::Log => a.recip(),
                        Func::Sin => a.cos(),
                        Func::Cos => -a.sin(),
                        Func::Sinh => Expr::apply(Func::Cosh, a.clone()),
                        Func::Cosh => Expr::apply(Func::Sinh, a.clone()),
                        Func::Sqrt => e.recip().scale(0.5),
                    };
                    outer * da
                }
            }
        };
        self.memo.insert(e.id(), out.clone());
        Ok(out)
    }
}

/// Total derivative `D_v e`: the chain rule through every jet coordinate,
/// with `D_v u_J = u_{J+v}`. Fails if a produced jet coordinate exceeds
/// `max_order`.
pub fn total_derivative(e: &Expr, v: Coord, max_order: usize) -> Result<Expr, ExprError> {
    let leaf = |n: &Node| -> Result<Expr, ExprError> {
        Ok(match n {
            Node::Coord(c) if *c == v => Expr::one(),
            Node::Deriv(d) => {
                if d.unknown == v {
                    return Err(ExprError::PictureMismatch { coord: v });
                }
                let slot = d.picture().slot(v).ok_or(ExprError::PictureMismatch { coord: v })?;
                let bumped = d.index.bump(slot);
                if bumped.order() > max_order {
                    return Err(ExprError::OrderCap { order: bumped.order(), cap: max_order });
                }
                Expr::deriv(DerivCoord { unknown: d.unknown, index: bumped })
            }
            _ => Expr::zero(),
        })
    };
    Deriver { leaf: &leaf, memo: HashMap::new() }.d(e)
}

/// `D_J e` for a whole multi-index over `picture`'s base coordinates.
pub fn total_derivative_index(e: &Expr, picture: Picture, index: MultiIndex, max_order: usize) -> Result<Expr, ExprError> {
    let mut out = e.clone();
    for (slot, &count) in index.0.iter().enumerate() {
        for _ in 0..count {
            out = total_derivative(&out, picture.base()[slot], max_order)?;
        }
    }
    Ok(out)
}

/// Formal partial derivative with respect to one jet coordinate, all other
/// jet coordinates and all base coordinates held fixed.
pub fn partial_wrt(e: &Expr, d: DerivCoord) -> Expr {
    let leaf = |n: &Node| -> Result<Expr, ExprError> {
        Ok(match n {
            Node::Deriv(x) if *x == d => Expr::one(),
            _ => Expr::zero(),
        })
    };
    Deriver { leaf: &leaf, memo: HashMap::new() }.d(e).expect("partial derivative is infallible")
}

/// Explicit partial derivative with respect to a base coordinate, jet
/// coordinates held fixed.
pub fn partial_coord(e: &Expr, c: Coord) -> Expr {
    let leaf = |n: &Node| -> Result<Expr, ExprError> {
        Ok(match n {
            Node::Coord(x) if *x == c => Expr::one(),
            _ => Expr::zero(),
        })
    };
    Deriver { leaf: &leaf, memo: HashMap::new() }.d(e).expect("partial derivative is infallible")
}

/// Rebuilds `e` bottom-up, replacing every leaf for which `f` returns a value.
/// Constant folding is reapplied on the way up.
pub fn substitute(e: &Expr, f: &dyn Fn(&Node) -> Option<Expr>) -> Expr {
    fn go(e: &Expr, f: &dyn Fn(&Node) -> Option<Expr>, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(hit) = memo.get(&e.id()) {
            return hit.clone();
        }
        let out = match e.node() {
            Node::Const(_) | Node::Coord(_) | Node::Deriv(_) => f(e.node()).unwrap_or_else(|| e.clone()),
            Node::Neg(a) => -go(a, f, memo),
            Node::Sum(xs) => Expr::sum(xs.iter().map(|x| go(x, f, memo)).collect::<Vec<_>>()),
            Node::Product(xs) => Expr::product(xs.iter().map(|x| go(x, f, memo)).collect::<Vec<_>>()),
            Node::Pow(b, n) => go(b, f, memo).pow(*n),
            Node::Func(func, a) => Expr::apply(*func, go(a, f, memo)),
        };
        memo.insert(e.id(), out.clone());
        out
    }
    go(e, f, &mut HashMap::new())
}
