use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Field, FieldKind, Form};
use crate::diffexpr::{Coord, Expr};

/// Real polynomial-plus-trig test field in `(t, x, y)` with `z = x + iy`.
/// Not a solution of anything; deterministic in `seed`. Degree is capped at 4.
pub fn random_field(seed: u64, degree: usize) -> Field {
    let degree = degree.min(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = Expr::coord(Coord::T);
    let (z, zb) = (Expr::coord(Coord::Z), Expr::coord(Coord::Zbar));
    let x = (&z + &zb).scale(0.5);
    let y = (&z - &zb) * Expr::constant(num_complex::Complex64::new(0.0, -0.5));

    let mut terms = Vec::new();
    for d in 0..=degree {
        for a in 0..=d {
            for b in 0..=d - a {
                let c = d - a - b;
                let coef: f64 = rng.gen_range(-1.0..1.0) / (1 + d) as f64;
                terms.push(Expr::product([Expr::real(coef), t.powi(a as i32), x.powi(b as i32), y.powi(c as i32)]));
            }
        }
    }
    for _ in 0..2 {
        let k: [f64; 3] = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
        let arg = Expr::sum([t.scale(k[0]), x.scale(k[1]), y.scale(k[2])]);
        let (a, b): (f64, f64) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        terms.push(arg.sin().scale(a));
        terms.push(arg.cos().scale(b));
    }
    // keep u_t away from zero so hodograph inversion is available
    terms.push(t.scale(1.5));
    Field::new(FieldKind::RandomTest, None, format!("random(seed={seed}, degree={degree})"), Form::Direct(Expr::sum(terms)), vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn reality_and_determinism() {
        let p = Complex64::new(0.7, -0.4);
        let a = random_field(1, 2).jet(1.2, p, 4).unwrap();
        let b = random_field(1, 2).jet(1.2, p, 4).unwrap();
        assert!(a.reality_check() < 1e-12);
        assert_eq!(a, b);
        assert_ne!(a, random_field(2, 2).jet(1.2, p, 4).unwrap());
    }
}
