//! `G*(z, D1, D2) = (D1^z - D2^z) / z`, the integral of `t^(z - 1)` over
//! `[D2, D1]`.

use num_complex::Complex64;

/// Below this modulus the Taylor series in `z` is used.
pub const SERIES_THRESHOLD: f64 = 1e-8;

/// `exp(w) - 1` without cancellation for small `w`.
fn expm1_c(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    Complex64::new(
        w.re.exp_m1() * w.im.cos() - 2.0 * half * half,
        w.re.exp() * w.im.sin(),
    )
}

/// Evaluates `(D1^z - D2^z) / z` as `D2^z expm1(z log(D1 / D2)) / z`.
///
/// At `z = 0` the limit `log(D1 / D2)` is returned.
pub fn gstar(z: Complex64, d1: f64, d2: f64) -> Complex64 {
    let (l1, l2) = (d1.ln(), d2.ln());
    if z.norm() < SERIES_THRESHOLD {
        return gstar_series(z, l1, l2);
    }
    gstar_direct(z, l1, l2)
}

pub(crate) fn gstar_direct(z: Complex64, l1: f64, l2: f64) -> Complex64 {
    (z * l2).exp() * expm1_c(z * (l1 - l2)) / z
}

/// `sum_k z^k (L1^(k+1) - L2^(k+1)) / (k+1)!` to third order.
pub(crate) fn gstar_series(z: Complex64, l1: f64, l2: f64) -> Complex64 {
    let mut out = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    let (mut p1, mut p2, mut fact) = (l1, l2, 1.0);
    for k in 0..4 {
        out += zk * ((p1 - p2) / fact);
        zk *= z;
        p1 *= l1;
        p2 *= l2;
        fact *= (k + 2) as f64;
    }
    out
}
