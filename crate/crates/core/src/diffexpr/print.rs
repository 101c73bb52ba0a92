use std::fmt;

use num_complex::Complex64;

use super::expr::{Exponent, Expr, Node};

// Output is fully parenthesized so that it re-parses to the same tree shape
// in the picture it was built in. Floats use the shortest round-trip form.
fn write_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    match (c.re, c.im) {
        (re, im) if im == 0.0 && re >= 0.0 => write!(f, "{re:?}"),
        (re, 0.0) => write!(f, "({re:?})"),
        (0.0, im) => write!(f, "({im:?}*i)"),
        (re, im) => write!(f, "({re:?} + {im:?}*i)"),
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: Exponent) -> fmt::Result {
    match e {
        Exponent::Int(n) => write!(f, "({n})"),
        Exponent::Half(n) => write!(f, "({n}/2)"),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write_const(f, *c),
            Node::Coord(c) => f.write_str(c.name()),
            Node::Deriv(d) => {
                f.write_str(d.unknown.name())?;
                if d.index.order() > 0 {
                    f.write_str("_")?;
                    for (slot, &count) in d.index.0.iter().enumerate() {
                        for _ in 0..count {
                            f.write_str(d.picture().base()[slot].name())?;
                        }
                    }
                }
                Ok(())
            }
            Node::Func(func, a) => write!(f, "{}({a})", func.name()),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Pow(b, e) => {
                write!(f, "({b})^")?;
                write_exponent(f, *e)
            }
            Node::Sum(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Node::Product(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::diffexpr::{parse_expr, Picture};

    #[test]
    fn printed_form_reparses_identically() {
        for src in ["z^2 + i", "exp(u/2)*sin(z) - 3.5e-3", "u_zzbar*exp(-u) / (1 + z*zbar)^(1/2)", "-(z - 2*i)^(-2)"] {
            let e = parse_expr(src, Picture::Direct).unwrap();
            let again = parse_expr(&e.to_string(), Picture::Direct).unwrap();
            assert_eq!(e, again, "{src} -> {e}");
        }
    }
}
