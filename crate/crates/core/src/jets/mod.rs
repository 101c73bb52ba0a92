//! Numeric jets: partial derivatives of the unknown at one base point.

mod invert;
pub(crate) mod series;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffexpr::{MultiIndex, Picture, MAX_ORDER};

pub use invert::{hodograph_invert, FOLD_THRESHOLD};
pub(crate) use series::Series;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("fold: |d(unknown)/d(first coordinate)| = {0:e} is below the inversion threshold")]
    Fold(f64),
    #[error("requested order {requested} exceeds available order {available}")]
    InsufficientOrder { requested: usize, available: usize },
    #[error("jet order {0} exceeds the hard cap")]
    OrderCap(usize),
    #[error("malformed jet record: {0}")]
    Malformed(String),
}

/// Partial derivatives of the picture's unknown, up to `order`, at the base
/// point `(first, z, conj(z))`. `first` is `t` in the direct picture and `u`
/// in the hodograph picture. Coefficients are derivative values, not Taylor
/// coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "JetRecord", try_from = "JetRecord")]
pub struct Jet {
    picture: Picture,
    first: f64,
    z: Complex64,
    order: usize,
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn new(picture: Picture, first: f64, z: Complex64, order: usize, coeffs: Vec<Complex64>) -> Result<Self, JetError> {
        if order > MAX_ORDER {
            return Err(JetError::OrderCap(order));
        }
        if coeffs.len() != MultiIndex::count_up_to(order) {
            return Err(JetError::Malformed(format!(
                "order {order} needs {} coefficients, got {}",
                MultiIndex::count_up_to(order),
                coeffs.len()
            )));
        }
        Ok(Jet { picture, first, z, order, coeffs })
    }

    pub fn from_fn(picture: Picture, first: f64, z: Complex64, order: usize, f: impl Fn(MultiIndex) -> Complex64) -> Self {
        let coeffs = MultiIndex::all_up_to(order).map(f).collect();
        Jet::new(picture, first, z, order, coeffs).expect("order within cap")
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn first(&self) -> f64 {
        self.first
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, mi: MultiIndex) -> Option<Complex64> {
        (mi.order() <= self.order).then(|| self.coeffs[mi.position()])
    }

    /// Coefficient at `(first, z, zbar)` counts; panics beyond the jet order.
    pub fn at(&self, first: u8, z: u8, zbar: u8) -> Complex64 {
        self.get(MultiIndex::new(first, z, zbar)).expect("index within jet order")
    }

    /// Value of the unknown at the base point.
    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (MultiIndex, Complex64)> + '_ {
        MultiIndex::all_up_to(self.order).zip(self.coeffs.iter().copied())
    }

    pub fn truncate(&self, order: usize) -> Result<Jet, JetError> {
        if order > self.order {
            return Err(JetError::InsufficientOrder { requested: order, available: self.order });
        }
        Ok(Jet { coeffs: self.coeffs[..MultiIndex::count_up_to(order)].to_vec(), order, ..self.clone() })
    }

    /// Largest violation of `c(k,m,n) = conj(c(k,n,m))`, the reality symmetry
    /// of a real-valued unknown under the swap of `z` and `zbar`.
    pub fn reality_check(&self) -> f64 {
        self.coeffs()
            .map(|(mi, c)| (c - self.coeffs[mi.conj().position()].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn to_series(&self) -> Series {
        let mut s = Series::zero(self.order);
        for (mi, c) in self.coeffs() {
            s.set(mi, c / factorial_weight(mi));
        }
        s
    }

    pub(crate) fn from_series(picture: Picture, first: f64, z: Complex64, s: &Series) -> Jet {
        Jet::from_fn(picture, first, z, s.order(), |mi| s.get(mi) * factorial_weight(mi))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("jet serializes")
    }

    pub fn from_json(text: &str) -> Result<Jet, JetError> {
        serde_json::from_str(text).map_err(|e| JetError::Malformed(e.to_string()))
    }
}

pub(crate) fn factorial_weight(mi: MultiIndex) -> f64 {
    mi.0.iter().map(|&k| (1..=k as u64).product::<u64>() as f64).product()
}

#[derive(Serialize, Deserialize)]
struct JetRecord {
    picture: Picture,
    /// `[first, re z, im z]`
    point: [f64; 3],
    order: usize,
    /// rows of `[k, m, n, re, im]`
    coeffs: Vec<[f64; 5]>,
}

impl From<Jet> for JetRecord {
    fn from(j: Jet) -> Self {
        JetRecord {
            picture: j.picture,
            point: [j.first, j.z.re, j.z.im],
            order: j.order,
            coeffs: j
                .coeffs()
                .map(|(mi, c)| [mi.0[0] as f64, mi.0[1] as f64, mi.0[2] as f64, c.re, c.im])
                .collect(),
        }
    }
}

impl TryFrom<JetRecord> for Jet {
    type Error = JetError;

    fn try_from(r: JetRecord) -> Result<Self, Self::Error> {
        if r.order > MAX_ORDER {
            return Err(JetError::OrderCap(r.order));
        }
        let mut coeffs = vec![None; MultiIndex::count_up_to(r.order)];
        for row in &r.coeffs {
            let idx = [row[0], row[1], row[2]];
            if idx.iter().any(|&k| k < 0.0 || k.fract() != 0.0 || k > MAX_ORDER as f64) {
                return Err(JetError::Malformed(format!("bad multi-index {idx:?}")));
            }
            let mi = MultiIndex::new(idx[0] as u8, idx[1] as u8, idx[2] as u8);
            if mi.order() > r.order {
                return Err(JetError::Malformed(format!("index {:?} above order {}", mi.0, r.order)));
            }
            coeffs[mi.position()] = Some(Complex64::new(row[3], row[4]));
        }
        let coeffs = coeffs
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| JetError::Malformed("missing coefficients".into()))?;
        Jet::new(r.picture, r.point[0], Complex64::new(r.point[1], r.point[2]), r.order, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_jet() -> Jet {
        // jet of the real polynomial u = t^2 + z zbar + 3 t (z + zbar) at t=0.5, z=0.2+0.1i
        let (t, z) = (0.5, Complex64::new(0.2, 0.1));
        Jet::from_fn(Picture::Direct, t, z, 2, |mi| match mi.0 {
            [0, 0, 0] => Complex64::new(t * t, 0.0) + z * z.conj() + 3.0 * t * (z + z.conj()),
            [1, 0, 0] => Complex64::new(2.0 * t, 0.0) + 3.0 * (z + z.conj()),
            [0, 1, 0] => z.conj() + 3.0 * t,
            [0, 0, 1] => z + 3.0 * t,
            [2, 0, 0] => Complex64::new(2.0, 0.0),
            [1, 1, 0] | [1, 0, 1] => Complex64::new(3.0, 0.0),
            [0, 1, 1] => Complex64::new(1.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        })
    }

    #[test]
    fn positions_are_dense_and_graded() {
        for (i, mi) in MultiIndex::all_up_to(6).enumerate() {
            assert_eq!(mi.position(), i);
        }
        assert_eq!(MultiIndex::count_up_to(4), 35);
    }

    #[test]
    fn reality_of_a_real_polynomial() {
        assert!(real_jet().reality_check() < 1e-15);
        let order0 = Jet::new(Picture::Direct, 1.0, Complex64::new(1.0, 0.0), 0, vec![Complex64::new(2.5, 0.0)]).unwrap();
        assert_eq!(order0.reality_check(), 0.0);
    }

    #[test]
    fn perturbation_shows_in_reality_check() {
        let j = real_jet();
        let mut coeffs: Vec<_> = j.coeffs().map(|(_, c)| c).collect();
        coeffs[MultiIndex::new(1, 1, 0).position()] += Complex64::new(1e-3, 0.0);
        let bumped = Jet::new(Picture::Direct, j.first(), j.z(), j.order(), coeffs).unwrap();
        assert!((bumped.reality_check() - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let j = real_jet();
        let text = j.to_json();
        assert!(text.contains("\"picture\":\"direct\""));
        assert_eq!(Jet::from_json(&text).unwrap(), j);
        assert!(Jet::from_json(r#"{"picture":"direct","point":[0,0,0],"order":1,"coeffs":[[0,0,0,1,0]]}"#).is_err());
    }

    #[test]
    fn series_round_trip_keeps_derivatives() {
        let j = real_jet();
        let back = Jet::from_series(j.picture(), j.first(), j.z(), &j.to_series());
        assert_eq!(back, j);
    }
}
