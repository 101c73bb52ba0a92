//! Expression trees over coordinates and jet coordinates of the unknown.
//!
//! Two pictures share one representation. In the direct picture the base
//! coordinates are `(t, z, zbar)` and the unknown is `u`; in the hodograph
//! picture the base coordinates are `(u, z, zbar)` and the unknown is `t`.
//! `z` and `zbar` are formally independent (Wirtinger calculus); reality of
//! the unknown is a property of the numeric jets, not of expressions.

mod analytic;
mod diff;
mod eval;
mod expr;
mod parse;
mod print;

use std::fmt;

use thiserror::Error;

pub use analytic::AnalyticFn;
pub use diff::{partial_coord, partial_wrt, substitute, total_derivative, total_derivative_index};
pub use eval::{evaluate, Binding, Tape};
pub use expr::{Exponent, Expr, Func, Node};
pub use parse::parse_expr;

/// Default cap on derivative order for jets and total derivatives.
pub const DEFAULT_MAX_ORDER: usize = 4;
/// Hard cap; nothing in the crate builds jets beyond this order.
pub const MAX_ORDER: usize = 6;

/// A named coordinate. Which ones are base coordinates depends on the picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Coord {
    T,
    U,
    Z,
    Zbar,
}

impl Coord {
    pub fn name(self) -> &'static str {
        match self {
            Coord::T => "t",
            Coord::U => "u",
            Coord::Z => "z",
            Coord::Zbar => "zbar",
        }
    }

    /// Swaps `z` and `zbar`, leaves `t` and `u` alone.
    pub fn conj(self) -> Coord {
        match self {
            Coord::Z => Coord::Zbar,
            Coord::Zbar => Coord::Z,
            c => c,
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Direct,
    Hodograph,
}

impl Picture {
    /// The dependent variable of this picture.
    pub fn unknown(self) -> Coord {
        match self {
            Picture::Direct => Coord::U,
            Picture::Hodograph => Coord::T,
        }
    }

    /// Base coordinates in multi-index slot order.
    pub fn base(self) -> [Coord; 3] {
        match self {
            Picture::Direct => [Coord::T, Coord::Z, Coord::Zbar],
            Picture::Hodograph => [Coord::U, Coord::Z, Coord::Zbar],
        }
    }

    /// Multi-index slot of a base coordinate, `None` for the unknown.
    pub fn slot(self, c: Coord) -> Option<usize> {
        self.base().iter().position(|&b| b == c)
    }

    pub fn of_unknown(unknown: Coord) -> Option<Picture> {
        match unknown {
            Coord::U => Some(Picture::Direct),
            Coord::T => Some(Picture::Hodograph),
            _ => None,
        }
    }

    pub fn other(self) -> Picture {
        match self {
            Picture::Direct => Picture::Hodograph,
            Picture::Hodograph => Picture::Direct,
        }
    }
}

impl fmt::Display for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Picture::Direct => "direct",
            Picture::Hodograph => "hodograph",
        })
    }
}

/// Derivative counts over the three base coordinates `(first, z, zbar)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(pub [u8; 3]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0, 0, 0]);

    pub fn new(first: u8, z: u8, zbar: u8) -> Self {
        MultiIndex([first, z, zbar])
    }

    pub fn order(self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn bump(self, slot: usize) -> Self {
        let mut m = self;
        m.0[slot] += 1;
        m
    }

    /// Swap of the z and zbar counts.
    pub fn conj(self) -> Self {
        MultiIndex([self.0[0], self.0[2], self.0[1]])
    }

    /// All multi-indices of total order at most `order`, graded then lexicographic.
    pub fn all_up_to(order: usize) -> impl Iterator<Item = MultiIndex> {
        (0..=order).flat_map(move |d| {
            (0..=d).rev().flat_map(move |k| {
                (0..=d - k).rev().map(move |m| MultiIndex([k as u8, m as u8, (d - k - m) as u8]))
            })
        })
    }

    /// Dense position of this index in `all_up_to(n)` for any `n >= self.order()`.
    pub fn position(self) -> usize {
        let d = self.order();
        let [k, m, _] = self.0.map(|x| x as usize);
        // monomials of degree < d in three variables
        let below = d * (d + 1) * (d + 2) / 6;
        let within: usize = (k + 1..=d).map(|kk| d - kk + 1).sum::<usize>() + (d - k - m);
        below + within
    }

    pub fn count_up_to(order: usize) -> usize {
        (order + 1) * (order + 2) * (order + 3) / 6
    }
}

/// A jet coordinate: some partial derivative of the picture's unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivCoord {
    pub unknown: Coord,
    pub index: MultiIndex,
}

impl DerivCoord {
    pub fn new(picture: Picture, index: MultiIndex) -> Self {
        DerivCoord { unknown: picture.unknown(), index }
    }

    pub fn picture(self) -> Picture {
        Picture::of_unknown(self.unknown).expect("deriv coordinate over a non-unknown")
    }

    pub fn order(self) -> usize {
        self.index.order()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("exponent at offset {offset} must be an integer or half-integer literal")]
    NonNumericExponent { offset: usize },
    #[error("division by zero literal at offset {offset}")]
    DivisionByZero { offset: usize },
    #[error("derivative order {order} exceeds cap {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("cannot differentiate along {coord:?}: it is the unknown of the expression's picture")]
    PictureMismatch { coord: Coord },
    #[error("analytic function must depend on `{expected}` only, found `{found}`")]
    BadAnalyticVariable { expected: &'static str, found: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("missing value for coordinate `{0}`")]
    MissingCoord(&'static str),
    #[error("derivative {0:?} not present in the bound jet")]
    MissingDerivative(DerivCoord),
    #[error("singular evaluation: {0}")]
    Singular(&'static str),
}
