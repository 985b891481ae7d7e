//! Smooth compactly supported windows.
//!
//! Every window is an interval indicator convolved with a rescaled bump
//! `exp(-1/(1 - t^2))`. Convolving `1_[a, b]` with the bump of radius `r`
//! gives `Phi((x - a) / r) - Phi((x - b) / r)`, where `Phi` is the bump's
//! normalized cumulative integral, so each window is one evaluation of a
//! tabulated `Phi` at two points.

use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindowError {
    #[error("window parameter must lie in (0, 1/8), got {0}")]
    BadDelta(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowKind {
    /// Weight on the energy variable; at least 1 on `[0, 1]`.
    VStyle,
    /// Weight on the scaled gap; same shape as `VStyle`.
    WStyle,
    /// At most `1_[0,1]`: equal to 1 on `[d, 1 - 4d]`, zero off `[0, 1 - 3d]`.
    WMinus,
    /// At least `1_[0,1]`: equal to 1 on `[0, 1]`, zero off `[-d, 1 + d]`.
    WPlus,
}

/// Anything the smoothed statistic can use as a weight.
pub trait Profile: Sync {
    fn eval(&self, x: f64) -> f64;
    /// Closed interval outside of which `eval` vanishes.
    fn support(&self) -> (f64, f64);
}

const TABLE_BITS: u32 = 14;

/// `Phi` sampled at `2^14 + 1` equally spaced points of `[-1, 1]`.
fn bump_cdf_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 1usize << TABLE_BITS;
        let h = 2.0 / n as f64;
        let bump = |t: f64| {
            if t.abs() >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - t * t)).exp()
            }
        };
        // Simpson on each cell with the midpoint, cumulated.
        let mut cdf = Vec::with_capacity(n + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let a = -1.0 + i as f64 * h;
            let b = a + h;
            acc += h / 6.0 * (bump(a) + 4.0 * bump(0.5 * (a + b)) + bump(b));
            cdf.push(acc);
        }
        let total = acc;
        for v in &mut cdf {
            *v /= total;
        }
        cdf[n] = 1.0;
        cdf
    })
}

/// Normalized integral of the bump from `-1` to `s`.
pub fn bump_cdf(s: f64) -> f64 {
    if s <= -1.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let table = bump_cdf_table();
    let n = (table.len() - 1) as f64;
    let pos = (s + 1.0) * 0.5 * n;
    let i = (pos.floor() as usize).min(table.len() - 2);
    let frac = pos - i as f64;
    table[i] + frac * (table[i + 1] - table[i])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    kind: WindowKind,
    delta: f64,
    base: (f64, f64),
    radius: f64,
    step: f64,
    samples: Vec<(f64, f64)>,
    ft_at_zero: f64,
}

impl Window {
    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Grid values on the support, spacing at most `delta / 256`.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Integral over the real line (Fourier transform at 0).
    pub fn ft_at_zero(&self) -> f64 {
        self.ft_at_zero
    }

    /// Integral over `[0, inf)`, i.e. the Fourier transform at 0 of the
    /// window restricted to nonnegative arguments.
    pub fn ft_at_zero_positive(&self) -> f64 {
        self.integrate(0.0, f64::INFINITY)
    }

    /// Trapezoid rule over `[lo, hi]` intersected with the support.
    pub fn integrate(&self, lo: f64, hi: f64) -> f64 {
        let (s0, s1) = self.support();
        let (a, b) = (lo.max(s0), hi.min(s1));
        if !(a < b) {
            return 0.0;
        }
        let n = ((b - a) / self.step).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        let mut sum = 0.5 * (self.eval(a) + self.eval(b));
        for i in 1..n {
            sum += self.eval(a + i as f64 * h);
        }
        sum * h
    }
}

impl Profile for Window {
    #[inline]
    fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.base;
        bump_cdf((x - a) / self.radius) - bump_cdf((x - b) / self.radius)
    }

    fn support(&self) -> (f64, f64) {
        (self.base.0 - self.radius, self.base.1 + self.radius)
    }
}

pub fn make_window(kind: WindowKind, delta: f64) -> Result<Window, WindowError> {
    if !(delta > 0.0 && delta < 0.125) {
        return Err(WindowError::BadDelta(delta));
    }
    let (base, radius) = match kind {
        WindowKind::VStyle | WindowKind::WStyle => {
            ((-delta / 8.0, 1.0 + delta / 8.0), delta / 16.0)
        }
        WindowKind::WMinus => ((delta / 2.0, 1.0 - 3.5 * delta), delta / 2.0),
        WindowKind::WPlus => ((-delta / 2.0, 1.0 + delta / 2.0), delta / 2.0),
    };
    let step = delta / 256.0;
    let mut w = Window {
        kind,
        delta,
        base,
        radius,
        step,
        samples: Vec::new(),
        ft_at_zero: 0.0,
    };
    let (s0, s1) = w.support();
    let n = ((s1 - s0) / step).ceil() as usize;
    let h = (s1 - s0) / n as f64;
    w.samples = (0..=n)
        .map(|i| {
            let x = s0 + i as f64 * h;
            (x, w.eval(x))
        })
        .collect();
    w.ft_at_zero = w
        .samples
        .windows(2)
        .map(|p| 0.5 * (p[0].1 + p[1].1) * (p[1].0 - p[0].0))
        .sum();
    Ok(w)
}

/// The identically zero profile.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroWindow;

impl Profile for ZeroWindow {
    fn eval(&self, _: f64) -> f64 {
        0.0
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
}
