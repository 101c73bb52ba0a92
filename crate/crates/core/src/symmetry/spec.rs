use thiserror::Error;

use super::{make_bf_generator, make_hod_generator, BfGenerator, Generator, SymmetryError, HOD_SLOTS};
use crate::diffexpr::{parse_expr, substitute, AnalyticFn, Coord, Expr, ExprError, Node, Picture};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorSpecError {
    #[error("bad generator spec `{0}`: expected T, G, X:<a(z)>, hod:<slot>=<f(u)>,... or direct:/hodograph:<coord>=<expr>,...")]
    Shape(String),
    #[error("unknown slot or coordinate `{0}`")]
    UnknownKey(String),
    #[error("coefficient `{0}` must not contain derivatives")]
    NotPoint(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

fn pairs(body: &str) -> Result<Vec<(&str, &str)>, GeneratorSpecError> {
    body.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| GeneratorSpecError::Shape(kv.to_string()))
        })
        .collect()
}

/// Parses a generator description:
///
/// * `T`, `G`, `X:<a(z)>` for the direct-picture generators;
/// * `hod:e=1,b=u` for the hodograph generator, unnamed slots zero;
/// * `direct:t=z` or `hodograph:u=1,zbar=-zbar` for raw coefficients of
///   `d_t, d_u, d_z, d_zbar`, which may use the picture's unknown as a coordinate.
pub fn parse_generator(spec: &str) -> Result<Generator, GeneratorSpecError> {
    let spec = spec.trim();
    match spec {
        "T" => return Ok(make_bf_generator(BfGenerator::T, None)?),
        "G" => return Ok(make_bf_generator(BfGenerator::G, None)?),
        _ => {}
    }
    let (head, body) = spec.split_once(':').ok_or_else(|| GeneratorSpecError::Shape(spec.to_string()))?;
    match head.trim() {
        "X" => Ok(make_bf_generator(BfGenerator::X, Some(&AnalyticFn::parse(body, Coord::Z)?))?),
        "hod" => {
            let zero = AnalyticFn::new(Coord::U, Expr::zero())?;
            let mut fns: [AnalyticFn; 8] = std::array::from_fn(|_| zero.clone());
            for (k, v) in pairs(body)? {
                let mut chars = k.chars();
                let (Some(c), None) = (chars.next(), chars.next()) else {
                    return Err(GeneratorSpecError::UnknownKey(k.to_string()));
                };
                let slot = HOD_SLOTS.iter().position(|&s| s == c).ok_or_else(|| GeneratorSpecError::UnknownKey(k.to_string()))?;
                fns[slot] = AnalyticFn::parse(v, Coord::U)?;
            }
            Ok(make_hod_generator(&fns)?)
        }
        "direct" | "hodograph" => {
            let picture = if head.trim() == "direct" { Picture::Direct } else { Picture::Hodograph };
            let mut coeffs: [Expr; 4] = std::array::from_fn(|_| Expr::zero());
            for (k, v) in pairs(body)? {
                let c = [Coord::T, Coord::U, Coord::Z, Coord::Zbar]
                    .into_iter()
                    .find(|c| c.name() == k)
                    .ok_or_else(|| GeneratorSpecError::UnknownKey(k.to_string()))?;
                let e = parse_expr(v, picture)?;
                if e.max_order() > 0 {
                    return Err(GeneratorSpecError::NotPoint(v.to_string()));
                }
                let unknown = picture.unknown();
                coeffs[c.index()] = substitute(&e, &|n| match n {
                    Node::Deriv(_) => Some(Expr::coord(unknown)),
                    _ => None,
                });
            }
            let [t, u, z, zb] = coeffs;
            Ok(Generator::new(picture, t, u, z, zb))
        }
        _ => Err(GeneratorSpecError::Shape(spec.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert!(parse_generator("T").unwrap().coeff(Coord::T).is_one());
        let x = parse_generator("X:z^2").unwrap();
        assert_eq!(x.picture(), Picture::Direct);
        let e = parse_generator("hod:e=1").unwrap();
        assert_eq!(e.picture(), Picture::Hodograph);
        assert_eq!(e.coeff(Coord::T), &Expr::coord(Coord::T));
        let raw = parse_generator("direct:t=z").unwrap();
        assert_eq!(raw.coeff(Coord::T), &Expr::coord(Coord::Z));
        let raw = parse_generator("direct:u=u*t").unwrap();
        assert_eq!(raw.coeff(Coord::U).coords().len(), 2);
        assert!(matches!(parse_generator("hod:q=1"), Err(GeneratorSpecError::UnknownKey(_))));
        assert!(matches!(parse_generator("direct:t=u_t"), Err(GeneratorSpecError::NotPoint(_))));
        assert!(matches!(parse_generator("Q"), Err(GeneratorSpecError::Shape(_))));
    }
}
