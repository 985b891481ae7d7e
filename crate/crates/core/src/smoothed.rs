//! The smoothed pair statistic
//!
//! ```text
//! G(M, T) = 1/4 * sum W(T (q(p1) - q(p2)) / D) V(q(p1) / (M^2 D))
//! ```
//!
//! over pairs of lattice points `p1 != +-p2` of the full lattice.

use thiserror::Error;

use crate::form::{discriminant_scale, ReducedForm};
use crate::par;
use crate::spectrum::DEFAULT_BUDGET;
use crate::window::Profile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothedError {
    #[error("need M >= 2 and T >= 1, got M={m}, T={t}")]
    BadParameters { m: f64, t: f64 },
    #[error("ellipse holds about {needed} lattice points, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
}

/// A full-lattice point with its normalized value `q / D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub lambda: f64,
    pub m: i64,
    pub n: i64,
}

/// All `(m, n)` in Z^2 with `q(m, n) / D <= bound`, sorted by value.
pub fn lattice_points(
    form: &ReducedForm,
    bound: f64,
    budget: u64,
) -> Result<Vec<LatticePoint>, SmoothedError> {
    let d = discriminant_scale(form);
    // The region q/D <= X has area 2X.
    let needed = (2.0 * bound.max(0.0) + 8.0 * bound.max(0.0).sqrt() + 1.0) as u64;
    if needed > budget {
        return Err(SmoothedError::BudgetExceeded { needed, budget });
    }
    if bound < 0.0 {
        return Ok(Vec::new());
    }
    let (_, a2, a3) = form.coefficients();
    let disc = form.discriminant();
    let x = bound * d;
    let m_max = (4.0 * a3 * x / disc).sqrt().floor() as i64 + 1;
    let stripes = par::map_range(-m_max..m_max + 1, |m| {
        let mf = m as f64;
        let s = (4.0 * a3 * x - disc * mf * mf).max(0.0).sqrt();
        let n_lo = ((-a2 * mf - s) / (2.0 * a3)).floor() as i64 - 1;
        let n_hi = ((-a2 * mf + s) / (2.0 * a3)).ceil() as i64 + 1;
        (n_lo..=n_hi)
            .filter_map(|n| {
                let lambda = form.q(m, n) / d;
                (lambda <= bound).then_some(LatticePoint { lambda, m, n })
            })
            .collect::<Vec<_>>()
    });
    let mut pts: Vec<LatticePoint> = stripes.into_iter().flatten().collect();
    pts.sort_by(|p, q| {
        p.lambda
            .total_cmp(&q.lambda)
            .then(p.m.cmp(&q.m))
            .then(p.n.cmp(&q.n))
    });
    Ok(pts)
}

pub fn smoothed_pair_statistic(
    form: &ReducedForm,
    m: f64,
    t: f64,
    v: &dyn Profile,
    w: &dyn Profile,
) -> Result<f64, SmoothedError> {
    smoothed_pair_statistic_with_budget(form, m, t, v, w, DEFAULT_BUDGET)
}

const CHUNK: usize = 4096;

pub fn smoothed_pair_statistic_with_budget(
    form: &ReducedForm,
    m: f64,
    t: f64,
    v: &dyn Profile,
    w: &dyn Profile,
    budget: u64,
) -> Result<f64, SmoothedError> {
    if !(m >= 2.0 && t >= 1.0 && m.is_finite() && t.is_finite()) {
        return Err(SmoothedError::BadParameters { m, t });
    }
    let (vlo, vhi) = v.support();
    let (wlo, whi) = w.support();
    let m2 = m * m;
    // V only sees nonnegative arguments.
    let l1_lo = (vlo * m2).max(0.0);
    let l1_hi = vhi * m2;
    if l1_hi < 0.0 || wlo > whi {
        return Ok(0.0);
    }
    // Partner values lie in [L1 - whi/T, L1 - wlo/T].
    let bound = l1_hi - wlo / t;
    let pts = lattice_points(form, bound, budget)?;
    let first = pts.partition_point(|p| p.lambda < l1_lo);
    let last = pts.partition_point(|p| p.lambda <= l1_hi);

    let partial = par::map_chunks(&pts[first..last], CHUNK, |chunk, _| {
        let mut lo = pts.partition_point(|p| p.lambda < chunk[0].lambda - whi / t);
        let mut hi = lo;
        let mut acc = 0.0;
        for p1 in chunk {
            let vw = v.eval(p1.lambda / m2);
            let band_lo = p1.lambda - whi / t;
            let band_hi = p1.lambda - wlo / t;
            while lo < pts.len() && pts[lo].lambda < band_lo {
                lo += 1;
            }
            hi = hi.max(lo);
            while hi < pts.len() && pts[hi].lambda <= band_hi {
                hi += 1;
            }
            if vw == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for p2 in &pts[lo..hi] {
                let same = p2.m == p1.m && p2.n == p1.n;
                let opposite = p2.m == -p1.m && p2.n == -p1.n;
                if same || opposite {
                    continue;
                }
                inner += w.eval(t * (p1.lambda - p2.lambda));
            }
            acc += vw * inner;
        }
        acc
    });
    Ok(0.25 * partial.iter().sum::<f64>())
}

/// Direct double loop over every pair of lattice points in the region.
pub fn smoothed_pair_statistic_brute(
    form: &ReducedForm,
    m: f64,
    t: f64,
    v: &dyn Profile,
    w: &dyn Profile,
) -> f64 {
    let (_, vhi) = v.support();
    let (wlo, _) = w.support();
    let bound = vhi * m * m - wlo.min(0.0) / t;
    let pts = lattice_points(form, bound.max(0.0), u64::MAX).unwrap();
    let mut total = 0.0;
    for p1 in &pts {
        let vw = v.eval(p1.lambda / (m * m));
        if vw == 0.0 {
            continue;
        }
        for p2 in &pts {
            if (p1.m, p1.n) == (p2.m, p2.n) || (p1.m, p1.n) == (-p2.m, -p2.n) {
                continue;
            }
            total += vw * w.eval(t * (p1.lambda - p2.lambda));
        }
    }
    0.25 * total
}

/// `ft0(V restricted to [0, inf)) * ft0(W) * M^2 / T`.
pub fn main_term(v_star_ft0: f64, w_ft0: f64, m: f64, t: f64) -> f64 {
    v_star_ft0 * w_ft0 * m * m / t
}
