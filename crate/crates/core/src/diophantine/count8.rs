//! Exhaustive count of 8-tuples `(a, b)` in coordinate boxes subject to
//!
//! * `(a_i, b_i) != (0, 0)` for every `i`,
//! * `P != 0` and `D <= |det| <= 2D`,
//! * `|det1|, |det2| <= f * (|det| + P / T)` with `f = M^eps`.
//!
//! Each half `(a1, a2, b1, b2)` and `(a3, a4, b3, b4)` enters the invariants
//! only through `A = a1 a2`, `B = b1 b2`, `C = a1 b2 + b1 a2` (see
//! [`det_invariants`](super::det_invariants)). Halves are therefore collapsed
//! to distinct feature triples with multiplicities before pairing.

use std::collections::BTreeMap;

use serde::Serialize;

use super::DiophantineError;
use crate::par;

/// Largest admissible product of box sizes.
pub const VOLUME_BUDGET: f64 = 1e10;

/// Integers `x` with `lo <= |x| <= hi`, both signs. Empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoordBox {
    pub lo: u64,
    pub hi: u64,
}

impl CoordBox {
    pub fn new(lo: u64, hi: u64) -> Self {
        CoordBox { lo, hi }
    }

    /// The single value 0.
    pub fn zero() -> Self {
        CoordBox { lo: 0, hi: 0 }
    }

    /// Dyadic box `A <= |x| <= 2A`.
    pub fn dyadic(a: u64) -> Self {
        CoordBox { lo: a, hi: 2 * a }
    }

    pub fn values(&self) -> Vec<i128> {
        let mut v = Vec::new();
        if self.lo > self.hi {
            return v;
        }
        if self.lo == 0 {
            v.push(0);
        }
        for k in self.lo.max(1)..=self.hi {
            v.push(k as i128);
            v.push(-(k as i128));
        }
        v
    }

    pub fn size(&self) -> u64 {
        if self.lo > self.hi {
            0
        } else if self.lo == 0 {
            2 * self.hi + 1
        } else {
            2 * (self.hi - self.lo + 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Count8Params {
    /// Boxes for `a1..a4`.
    pub a: [CoordBox; 4],
    /// Boxes for `b1..b4`.
    pub b: [CoordBox; 4],
    /// Lower end of the band `D <= |det| <= 2D`.
    pub d: u64,
    pub t: f64,
    pub m: f64,
    /// Slack factor applied to `|det| + P / T`.
    pub eps_factor: f64,
}

impl Count8Params {
    /// Uses `eps_factor = m^eps_exponent`.
    pub fn new(a: [CoordBox; 4], b: [CoordBox; 4], d: u64, t: f64, m: f64, eps_exponent: f64) -> Self {
        Count8Params {
            a,
            b,
            d,
            t,
            m,
            eps_factor: m.powf(eps_exponent),
        }
    }

    pub fn volume(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter())
            .map(|b| b.size() as f64)
            .product()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StratumCounts {
    /// Some coordinate vanishes.
    pub zero_coordinate: u64,
    /// All coordinates nonzero and `det = 0`.
    pub det_zero: u64,
    /// All coordinates nonzero and `det != 0`.
    pub generic: u64,
}

impl StratumCounts {
    pub fn total(&self) -> u64 {
        self.zero_coordinate + self.det_zero + self.generic
    }

    fn add(&mut self, o: &StratumCounts) {
        self.zero_coordinate += o.zero_coordinate;
        self.det_zero += o.det_zero;
        self.generic += o.generic;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct HalfKey {
    a: i128,
    b: i128,
    c: i128,
    has_zero: bool,
}

/// Feature triples of one half with their multiplicities, in sorted order.
fn half_features(x1: &CoordBox, x2: &CoordBox, y1: &CoordBox, y2: &CoordBox) -> Vec<(HalfKey, u64)> {
    let (v1, v2, w1, w2) = (x1.values(), x2.values(), y1.values(), y2.values());
    let mut map: BTreeMap<HalfKey, u64> = BTreeMap::new();
    for &a1 in &v1 {
        for &b1 in &w1 {
            if a1 == 0 && b1 == 0 {
                continue;
            }
            for &a2 in &v2 {
                for &b2 in &w2 {
                    if a2 == 0 && b2 == 0 {
                        continue;
                    }
                    let key = HalfKey {
                        a: a1 * a2,
                        b: b1 * b2,
                        c: a1 * b2 + b1 * a2,
                        has_zero: a1 == 0 || a2 == 0 || b1 == 0 || b2 == 0,
                    };
                    *map.entry(key).or_insert(0) += 1;
                }
            }
        }
    }
    map.into_iter().collect()
}

pub fn count_8tuples(params: &Count8Params) -> Result<StratumCounts, DiophantineError> {
    let volume = params.volume();
    if volume > VOLUME_BUDGET {
        return Err(DiophantineError::BudgetExceeded {
            needed: volume,
            budget: VOLUME_BUDGET,
        });
    }
    if !(params.t > 0.0 && params.eps_factor >= 0.0) {
        return Err(DiophantineError::InvalidParameter(format!(
            "need T > 0 and a nonnegative slack factor, got T={}, factor={}",
            params.t, params.eps_factor
        )));
    }
    if volume == 0.0 {
        return Ok(StratumCounts::default());
    }
    let [a1, a2, a3, a4] = &params.a;
    let [b1, b2, b3, b4] = &params.b;
    let first = half_features(a1, a2, b1, b2);
    let second = half_features(a3, a4, b3, b4);
    let d_lo = params.d as i128;
    let d_hi = 2 * d_lo;
    let (t, f) = (params.t, params.eps_factor);

    let partial = par::map_slice(&first, |&(h, mult)| {
        let mut acc = StratumCounts::default();
        for &(g, mult2) in &second {
            let det = h.a * g.a - h.b * g.b;
            let abs_det = det.abs();
            if abs_det < d_lo || abs_det > d_hi {
                continue;
            }
            let p = h.a.abs().max(h.b.abs()).max(g.a.abs()).max(g.b.abs());
            if p == 0 {
                continue;
            }
            let det1 = h.a * g.c - h.c * g.b;
            let det2 = h.c * g.a - h.b * g.c;
            let rhs = f * (abs_det as f64 + p as f64 / t);
            if det1.abs() as f64 > rhs || det2.abs() as f64 > rhs {
                continue;
            }
            let n = mult * mult2;
            if h.has_zero || g.has_zero {
                acc.zero_coordinate += n;
            } else if det == 0 {
                acc.det_zero += n;
            } else {
                acc.generic += n;
            }
        }
        acc
    });
    let mut total = StratumCounts::default();
    for p in &partial {
        total.add(p);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_values() {
        assert_eq!(CoordBox::zero().values(), vec![0]);
        assert_eq!(CoordBox::new(2, 3).values(), vec![2, -2, 3, -3]);
        assert_eq!(CoordBox::new(0, 1).size(), 3);
        assert!(CoordBox::new(3, 2).values().is_empty());
        assert_eq!(CoordBox::dyadic(4), CoordBox::new(4, 8));
    }

    #[test]
    fn empty_boxes_count_nothing() {
        let e = CoordBox::new(1, 0);
        let p = Count8Params::new([e; 4], [e; 4], 1, 16.0, 8.0, 0.0);
        assert_eq!(count_8tuples(&p).unwrap().total(), 0);
    }

    #[test]
    fn budget() {
        let big = CoordBox::new(0, 100);
        let p = Count8Params::new([big; 4], [big; 4], 1, 16.0, 8.0, 0.0);
        assert!(matches!(
            count_8tuples(&p),
            Err(DiophantineError::BudgetExceeded { .. })
        ));
    }

    /// Direct loop over all 8 coordinates for tiny boxes.
    #[test]
    fn grouping_matches_direct_loop() {
        let bx = CoordBox::new(0, 2);
        let p = Count8Params::new([bx; 4], [bx; 4], 1, 2.0, 2.0, 0.5);
        let fast = count_8tuples(&p).unwrap();
        let vals = bx.values();
        let mut slow = StratumCounts::default();
        let f = p.eps_factor;
        for &a1 in &vals { for &a2 in &vals { for &a3 in &vals { for &a4 in &vals {
        for &b1 in &vals { for &b2 in &vals { for &b3 in &vals { for &b4 in &vals {
            if [(a1, b1), (a2, b2), (a3, b3), (a4, b4)].contains(&(0, 0)) {
                continue;
            }
            let det = a1 * a2 * a3 * a4 - b1 * b2 * b3 * b4;
            let det1 = a1 * a2 * b3 * a4 + a1 * a2 * a3 * b4 - a1 * b2 * b3 * b4 - b1 * a2 * b3 * b4;
            let det2 = a1 * b2 * a3 * a4 + b1 * a2 * a3 * a4 - b1 * b2 * a3 * b4 - b1 * b2 * b3 * a4;
            let pm = [a1 * a2, a3 * a4, b1 * b2, b3 * b4].iter().map(|x: &i128| x.abs()).max().unwrap();
            if pm == 0 || det.abs() < 1 || det.abs() > 2 {
                continue;
            }
            let rhs = f * (det.abs() as f64 + pm as f64 / 2.0);
            if det1.abs() as f64 > rhs || det2.abs() as f64 > rhs {
                continue;
            }
            if [a1, a2, a3, a4, b1, b2, b3, b4].contains(&0) {
                slow.zero_coordinate += 1;
            } else if det == 0 {
                slow.det_zero += 1;
            } else {
                slow.generic += 1;
            }
        }}}}}}}}
        assert_eq!(fast, slow);
        assert!(fast.total() > 0);
    }
}
