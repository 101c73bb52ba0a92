use num_complex::Complex64;

use super::{Jet, JetError, Series};

/// Smallest `|d(unknown)/d(first)|` accepted before a point counts as a fold.
pub const FOLD_THRESHOLD: f64 = 1e-8;

/// Exchanges the unknown with the first base coordinate.
///
/// A direct jet of `u(t, z, zbar)` at `(t0, z0)` becomes the hodograph jet of
/// `t(u, z, zbar)` at `(u0, z0)`, and vice versa. Writing the shifted unknown
/// as `a*tau + R(tau, zeta, zetabar)` with `a` the first-coordinate slope, the
/// inverse series solves `tau = (mu - R(tau, zeta, zetabar)) / a`; each
/// fixed-point sweep fixes one more total order, so `order` sweeps are exact
/// to truncation.
pub fn hodograph_invert(j: &Jet, order: usize) -> Result<Jet, JetError> {
    if order > j.order() {
        return Err(JetError::InsufficientOrder { requested: order, available: j.order() });
    }
    if order == 0 {
        return Err(JetError::InsufficientOrder { requested: 1, available: 0 });
    }
    let j = j.truncate(order)?;
    let slope = j.at(1, 0, 0);
    if slope.norm() <= FOLD_THRESHOLD {
        return Err(JetError::Fold(slope.norm()));
    }
    let s = j.to_series();
    let shifted = s.sub(&Series::constant(order, s.constant_term()));
    let mu = Series::var(order, 0);
    let rest = shifted.sub(&mu.scale(slope));
    let inv_slope = Complex64::new(1.0, 0.0) / slope;
    let zeta = Series::var(order, 1);
    let zetabar = Series::var(order, 2);

    let mut tau = mu.scale(inv_slope);
    for _ in 0..order {
        tau = mu.sub(&rest.compose([&tau, &zeta, &zetabar])).scale(inv_slope);
    }

    let new_first = j.value().re;
    let mut out = tau;
    out.set(crate::diffexpr::MultiIndex::ZERO, Complex64::new(j.first(), 0.0));
    Ok(Jet::from_series(j.picture().other(), new_first, j.z(), &out))
}
