//! Random tori drawn from the natural measures on the space of forms.
//!
//! Randomness is always an explicit [`SeedPath`]: a list of integers that is
//! hashed into a ChaCha8 seed. Child streams are obtained by appending an
//! index, so sample `i` of a run seeded with `s` uses the path `[s, i]` no
//! matter which worker draws it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::form::{hyperbolic_density, FormError, ReducedForm, SymmetryClass};

/// Trials after which a rejection sampler gives up (acceptance below 1e-6).
pub const MAX_REJECTION_TRIALS: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("sampling box has zero volume or contains no admissible form")]
    EmptyBox,
    #[error("invalid box bounds: {0}")]
    InvalidBox(String),
    #[error("rejection sampler accepted nothing in {0} trials")]
    RejectionOverflow(u64),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Counter-based seed derivation.
///
/// The 256-bit ChaCha seed is produced by running SplitMix64 over the path
/// elements: the state absorbs each element by xor-and-mix, and four more
/// SplitMix64 outputs fill the seed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SeedPath(Vec<u64>);

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedPath {
    pub fn root(seed: u64) -> Self {
        SeedPath(vec![seed])
    }

    pub fn from_path(path: Vec<u64>) -> Self {
        SeedPath(path)
    }

    pub fn child(&self, index: u64) -> Self {
        let mut path = self.0.clone();
        path.push(index);
        SeedPath(path)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = 0x243F_6A88_85A3_08D3 ^ (self.0.len() as u64);
        for &x in &self.0 {
            state ^= x;
            state = splitmix64(&mut state);
        }
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// Closed interval bound for one coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range1 {
    pub lo: f64,
    pub hi: f64,
}

impl Range1 {
    pub fn new(lo: f64, hi: f64) -> Self {
        Range1 { lo, hi }
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn check(&self, name: &str) -> Result<(), SampleError> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(SampleError::InvalidBox(format!(
                "{name} range [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn lerp(&self, u: f64) -> f64 {
        self.lo + u * self.width()
    }
}

/// Axis-aligned box of generic forms `(a1, a2, a3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericBox {
    pub a1: Range1,
    pub a2: Range1,
    pub a3: Range1,
}

impl GenericBox {
    pub fn new(a1: (f64, f64), a2: (f64, f64), a3: (f64, f64)) -> Self {
        GenericBox {
            a1: Range1::new(a1.0, a1.1),
            a2: Range1::new(a2.0, a2.1),
            a3: Range1::new(a3.0, a3.1),
        }
    }

    pub fn volume(&self) -> f64 {
        self.a1.width() * self.a2.width() * self.a3.width()
    }

    /// Largest `4 a1 a3 - a2^2` over the box.
    fn max_discriminant(&self) -> f64 {
        let a2 = if self.a2.lo <= 0.0 && self.a2.hi >= 0.0 {
            0.0
        } else {
            self.a2.lo.abs().min(self.a2.hi.abs())
        };
        4.0 * self.a1.hi * self.a3.hi - a2 * a2
    }

    /// Smallest `4 a1 a3 - a2^2`, attained at the corner where the density
    /// peaks on the positive cone.
    fn min_discriminant(&self) -> f64 {
        let a2 = self.a2.lo.abs().max(self.a2.hi.abs());
        4.0 * self.a1.lo * self.a3.lo - a2 * a2
    }
}

/// Axis-aligned box of rectangular forms `(a1, a3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangularBox {
    pub a1: Range1,
    pub a3: Range1,
}

impl RectangularBox {
    pub fn new(a1: (f64, f64), a3: (f64, f64)) -> Self {
        RectangularBox {
            a1: Range1::new(a1.0, a1.1),
            a3: Range1::new(a3.0, a3.1),
        }
    }
}

/// Either kind of sampling region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleBox {
    Generic(GenericBox),
    Rectangular(RectangularBox),
}

impl SampleBox {
    pub fn class(&self) -> SymmetryClass {
        match self {
            SampleBox::Generic(_) => SymmetryClass::Generic,
            SampleBox::Rectangular(_) => SymmetryClass::Rectangular,
        }
    }
}

/// A form drawn from a moduli measure, with the density at that point and
/// the seed path that reproduces it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliSample {
    pub form: ReducedForm,
    pub weight: f64,
    pub seed_path: SeedPath,
}

/// Draws a generic form from the hyperbolic measure restricted to `bx`.
///
/// Rejection sampling against a uniform envelope whose height is the density
/// at the corner minimizing `4 a1 a3 - a2^2`.
pub fn sample_generic(seed: &SeedPath, bx: &GenericBox) -> Result<ModuliSample, SampleError> {
    bx.a1.check("a1")?;
    bx.a2.check("a2")?;
    bx.a3.check("a3")?;
    if bx.a1.lo <= 0.0 || bx.a3.lo <= 0.0 {
        return Err(SampleError::InvalidBox(
            "a1 and a3 ranges must be positive".into(),
        ));
    }
    if bx.volume() <= 0.0 || bx.max_discriminant() <= 0.0 {
        return Err(SampleError::EmptyBox);
    }
    let min_disc = bx.min_discriminant();
    if min_disc <= 0.0 {
        // Unbounded density near the degenerate boundary: no finite envelope.
        return Err(SampleError::RejectionOverflow(0));
    }
    let envelope = min_disc.powf(-1.5);
    let mut rng = seed.rng();
    for _ in 0..MAX_REJECTION_TRIALS {
        let a1 = bx.a1.lerp(rng.random::<f64>());
        let a2 = bx.a2.lerp(rng.random::<f64>());
        let a3 = bx.a3.lerp(rng.random::<f64>());
        let u: f64 = rng.random();
        let disc = 4.0 * a1 * a3 - a2 * a2;
        if disc <= 0.0 {
            continue;
        }
        let density = disc.powf(-1.5);
        if u * envelope <= density {
            let form = ReducedForm::new(a1, a2, a3, SymmetryClass::Generic)?;
            let weight = hyperbolic_density(&form)?;
            return Ok(ModuliSample {
                form,
                weight,
                seed_path: seed.clone(),
            });
        }
    }
    Err(SampleError::RejectionOverflow(MAX_REJECTION_TRIALS))
}

/// Draws a rectangular form from `da1 da3 / (a1 a3)` on `bx`.
///
/// The measure factorizes into two log-uniform laws, so sampling is exact.
pub fn sample_rectangular(
    seed: &SeedPath,
    bx: &RectangularBox,
) -> Result<ModuliSample, SampleError> {
    bx.a1.check("a1")?;
    bx.a3.check("a3")?;
    if bx.a1.lo <= 0.0 || bx.a3.lo <= 0.0 {
        return Err(SampleError::InvalidBox(
            "rectangular box must lie in the open positive quadrant".into(),
        ));
    }
    if bx.a1.width() <= 0.0 || bx.a3.width() <= 0.0 {
        return Err(SampleError::EmptyBox);
    }
    let mut rng = seed.rng();
    let log_uniform = |r: &Range1, u: f64| {
        let (l, h) = (r.lo.ln(), r.hi.ln());
        (l + u * (h - l)).exp().clamp(r.lo, r.hi)
    };
    let a1 = log_uniform(&bx.a1, rng.random::<f64>());
    let a3 = log_uniform(&bx.a3, rng.random::<f64>());
    let form = ReducedForm::rectangular(a1, a3)?;
    Ok(ModuliSample {
        form,
        weight: 1.0 / (a1 * a3),
        seed_path: seed.clone(),
    })
}

pub fn sample(seed: &SeedPath, bx: &SampleBox) -> Result<ModuliSample, SampleError> {
    match bx {
        SampleBox::Generic(b) => sample_generic(seed, b),
        SampleBox::Rectangular(b) => sample_rectangular(seed, b),
    }
}

/// Draws `count` samples using child streams `root.child(i)`.
pub fn sample_many(
    root: &SeedPath,
    bx: &SampleBox,
    count: usize,
) -> Vec<Result<ModuliSample, SampleError>> {
    let idx: Vec<u64> = (0..count as u64).collect();
    crate::par::map_slice(&idx, |&i| sample(&root.child(i), bx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> GenericBox {
        GenericBox::new((1.0, 2.0), (0.0, 1.0), (2.0, 3.0))
    }

    #[test]
    fn generic_sampler_is_deterministic() {
        let s = SeedPath::root(42);
        let a = sample_generic(&s, &unit_box()).unwrap();
        let b = sample_generic(&s, &unit_box()).unwrap();
        assert_eq!(a.form.a1().to_bits(), b.form.a1().to_bits());
        assert_eq!(a.form.a2().to_bits(), b.form.a2().to_bits());
        assert_eq!(a.form.a3().to_bits(), b.form.a3().to_bits());
        assert!(a.weight > 0.0);
        assert!(a.form.is_reduced());
    }

    #[test]
    fn distinct_children_differ() {
        let root = SeedPath::root(42);
        let a = sample_generic(&root.child(0), &unit_box()).unwrap();
        let b = sample_generic(&root.child(1), &unit_box()).unwrap();
        assert_ne!(a.form.a1(), b.form.a1());
    }

    #[test]
    fn paths_do_not_collide_across_roots() {
        use rand::RngCore;
        let mut seen = std::collections::HashSet::new();
        for s in 0..64u64 {
            for i in 0..64u64 {
                assert!(seen.insert(SeedPath::root(s).child(i).rng().next_u64()));
            }
        }
    }

    #[test]
    fn degenerate_generic_box_fails() {
        // 4*a1*a3 <= 1*1*4 = 4 < 9 <= a2^2 everywhere.
        let bx = GenericBox::new((0.5, 1.0), (3.0, 4.0), (0.5, 1.0));
        let err = sample_generic(&SeedPath::root(1), &bx).unwrap_err();
        assert!(matches!(
            err,
            SampleError::EmptyBox | SampleError::RejectionOverflow(_)
        ));
        // Box touching the discriminant-zero boundary.
        let bx = GenericBox::new((1.0, 2.0), (0.0, 2.0), (1.0, 2.0));
        assert!(matches!(
            sample_generic(&SeedPath::root(1), &bx),
            Err(SampleError::RejectionOverflow(_))
        ));
    }

    #[test]
    fn rectangular_sampler() {
        let bx = RectangularBox::new((1.0, 2.0), (1.0, 2.0));
        let a = sample_rectangular(&SeedPath::root(7), &bx).unwrap();
        let b = sample_rectangular(&SeedPath::root(7), &bx).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.form.a2(), 0.0);
        assert!((a.weight - 1.0 / (a.form.a1() * a.form.a3())).abs() < 1e-15);
        let empty = RectangularBox::new((1.0, 1.0), (1.0, 2.0));
        assert_eq!(
            sample_rectangular(&SeedPath::root(7), &empty),
            Err(SampleError::EmptyBox)
        );
    }
}
