//! Truncated power series in three formal variables with complex Taylor
//! coefficients. Internal machinery for jet inversion and composition.

use num_complex::Complex64;

use crate::diffexpr::MultiIndex;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Series {
    order: usize,
    c: Vec<Complex64>,
}

impl Series {
    pub fn zero(order: usize) -> Series {
        Series { order, c: vec![Complex64::new(0.0, 0.0); MultiIndex::count_up_to(order)] }
    }

    pub fn constant(order: usize, v: Complex64) -> Series {
        let mut s = Series::zero(order);
        s.c[0] = v;
        s
    }

    /// The monomial `x_slot`.
    pub fn var(order: usize, slot: usize) -> Series {
        let mut s = Series::zero(order);
        if order >= 1 {
            s.set(MultiIndex::ZERO.bump(slot), Complex64::new(1.0, 0.0));
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, mi: MultiIndex) -> Complex64 {
        self.c[mi.position()]
    }

    pub fn set(&mut self, mi: MultiIndex, v: Complex64) {
        self.c[mi.position()] = v;
    }

    pub fn constant_term(&self) -> Complex64 {
        self.c[0]
    }

    pub fn add(&self, o: &Series) -> Series {
        Series { order: self.order, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Series) -> Series {
        Series { order: self.order, c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: Complex64) -> Series {
        Series { order: self.order, c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.order;
        let mut out = Series::zero(n);
        let idx: Vec<MultiIndex> = MultiIndex::all_up_to(n).collect();
        for (i, a) in idx.iter().enumerate() {
            let ai = self.c[i];
            if ai == Complex64::new(0.0, 0.0) {
                continue;
            }
            let room = n - a.order();
            for (j, b) in idx.iter().enumerate().take(MultiIndex::count_up_to(room)) {
                let bj = o.c[j];
                let mi = MultiIndex([a.0[0] + b.0[0], a.0[1] + b.0[1], a.0[2] + b.0[2]]);
                out.c[mi.position()] += ai * bj;
            }
        }
        out
    }

    /// `self(s0, s1, s2)`; every substituted series must have zero constant term.
    pub fn compose(&self, subs: [&Series; 3]) -> Series {
        let n = self.order;
        debug_assert!(subs.iter().all(|s| s.constant_term() == Complex64::new(0.0, 0.0)));
        let powers: Vec<Vec<Series>> = subs
            .iter()
            .map(|s| {
                let mut p = vec![Series::constant(n, Complex64::new(1.0, 0.0))];
                for k in 1..=n {
                    p.push(p[k - 1].mul(s));
                }
                p
            })
            .collect();
        let mut out = Series::zero(n);
        for (mi, c) in MultiIndex::all_up_to(n).zip(self.c.iter()) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let [k, m, l] = mi.0.map(|x| x as usize);
            let term = powers[0][k].mul(&powers[1][m]).mul(&powers[2][l]);
            out = out.add(&term.scale(*c));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn product_of_geometric_series() {
        // (1 + x)(1 - x) = 1 - x^2
        let x = Series::var(3, 0);
        let one = Series::constant(3, c(1.0));
        let p = one.add(&x).mul(&one.sub(&x));
        assert_eq!(p.get(MultiIndex::new(2, 0, 0)), c(-1.0));
        assert_eq!(p.get(MultiIndex::new(1, 0, 0)), c(0.0));
    }

    #[test]
    fn composition_substitutes() {
        // f = x0 * x1, substitute x0 -> x0 + x2^2, x1 -> 2 x1
        let n = 4;
        let f = Series::var(n, 0).mul(&Series::var(n, 1));
        let s0 = Series::var(n, 0).add(&Series::var(n, 2).mul(&Series::var(n, 2)));
        let s1 = Series::var(n, 1).scale(c(2.0));
        let s2 = Series::var(n, 2);
        let g = f.compose([&s0, &s1, &s2]);
        assert_eq!(g.get(MultiIndex::new(1, 1, 0)), c(2.0));
        assert_eq!(g.get(MultiIndex::new(0, 1, 2)), c(2.0));
        assert_eq!(g.get(MultiIndex::new(0, 0, 2)), c(0.0));
    }
}
