use std::f64::consts::E;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torusgaps::moduli::{sample_many, GenericBox, RectangularBox, SampleBox, SeedPath};
use torusgaps::spectrum::weyl_tolerance;
use torusgaps::{discriminant_scale, eigenvalue, enumerate, validate_form, ReducedForm};

/// Every index pair with `|m|, |n| <= r`, filtered and sorted.
fn brute(form: &ReducedForm, cutoff: f64, r: i64) -> Vec<f64> {
    let mut v = Vec::new();
    for m in -r..=r {
        for n in -r..=r {
            if let Ok(l) = eigenvalue(form, m, n) {
                if l <= cutoff {
                    v.push(l);
                }
            }
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

/// Radius that certainly contains the ellipse `Lambda <= cutoff`.
fn search_radius(form: &ReducedForm, cutoff: f64) -> i64 {
    let (a1, a2, a3) = form.coefficients();
    let raw = cutoff / form.eigenvalue_factor();
    let lambda_min = 0.5 * (a1 + a3 - ((a1 - a3).powi(2) + a2 * a2).sqrt());
    let nominal = 2.0 + (cutoff * discriminant_scale(form) / a1.min(1.0)).sqrt();
    let safe = 2.0 + (raw / lambda_min).sqrt();
    nominal.max(safe).ceil() as i64
}

fn generic_forms(seed: u64, count: usize) -> Vec<ReducedForm> {
    let bx = SampleBox::Generic(GenericBox::new((1.0, 2.0), (0.0, 1.0), (2.0, 3.0)));
    sample_many(&SeedPath::root(seed), &bx, count)
        .into_iter()
        .map(|s| s.unwrap().form)
        .collect()
}

fn rectangular_forms(seed: u64, count: usize) -> Vec<ReducedForm> {
    let bx = SampleBox::Rectangular(RectangularBox::new((1.0, 2.0), (1.0, 2.0)));
    sample_many(&SeedPath::root(seed), &bx, count)
        .into_iter()
        .map(|s| s.unwrap().form)
        .collect()
}

#[test]
fn enumeration_matches_brute_force() {
    let mut forms = generic_forms(11, 6);
    forms.extend(rectangular_forms(12, 6));
    forms.push(validate_form(1.0, 0.0, 1.0).unwrap());
    forms.push(validate_form(1.0, 1.0, 1.0).unwrap());
    for form in &forms {
        for cutoff in [3.7, 100.0, 1000.0] {
            let fast = enumerate(form, cutoff).unwrap();
            let slow = brute(form, cutoff, search_radius(form, cutoff));
            assert_eq!(fast.values(), slow.as_slice(), "{form:?} N={cutoff}");
        }
    }
}

#[test]
fn spectrum_is_scaling_invariant() {
    for form in generic_forms(21, 4) {
        let base = enumerate(&form, 2000.0).unwrap();
        for lambda in [2.0, 10.0, 0.5] {
            let scaled = enumerate(&form.scaled(lambda).unwrap(), 2000.0).unwrap();
            assert_eq!(base.count(), scaled.count());
            for (x, y) in base.values().iter().zip(scaled.values()) {
                assert!((x - y).abs() <= 1e-9, "lambda={lambda}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn weyl_count_moderate_cutoffs() {
    let mut forms = generic_forms(31, 4);
    forms.extend(rectangular_forms(32, 4));
    for form in &forms {
        for n in [1e3, 1e4, 1e5] {
            let count = enumerate(form, n).unwrap().count() as f64;
            assert!(
                (count - n).abs() <= weyl_tolerance(form, n),
                "{form:?} N={n} count={count}"
            );
        }
    }
}

#[test]
fn rectangular_weyl_example() {
    let form = rectangular_forms(5, 1)[0];
    let n = 1e5;
    let count = enumerate(&form, n).unwrap().count() as f64;
    assert!((count - n).abs() <= 20.0 * n.sqrt());
}

/// 3-sigma per bin against a binomial with the given cell probabilities.
fn assert_histogram(counts: &[u64], probs: &[f64], total: u64, label: &str) {
    for (i, (&c, &p)) in counts.iter().zip(probs).enumerate() {
        let expected = total as f64 * p;
        let sigma = (expected * (1.0 - p)).sqrt();
        assert!(
            (c as f64 - expected).abs() <= 3.0 * sigma,
            "{label} bin {i}: {c} vs {expected:.1} (sigma {sigma:.1})"
        );
    }
}

#[test]
fn generic_sampler_matches_density() {
    let bx = GenericBox::new((1.0, 2.0), (0.0, 1.0), (2.0, 3.0));
    let samples: Vec<_> = sample_many(&SeedPath::root(2024), &SampleBox::Generic(bx), 100_000)
        .into_iter()
        .map(|s| s.unwrap().form)
        .collect();
    const BINS: usize = 10;
    const SUB: usize = 40;
    let ranges = [(1.0, 2.0), (0.0, 1.0), (2.0, 3.0)];

    // Marginal cell masses of (4 a1 a3 - a2^2)^(-3/2) by the midpoint rule.
    let mut mass = [[0.0f64; BINS]; 3];
    let cells = BINS * SUB;
    let mid = |r: (f64, f64), i: usize| r.0 + (i as f64 + 0.5) * (r.1 - r.0) / cells as f64;
    for i in 0..cells {
        let a1 = mid(ranges[0], i);
        for j in 0..cells {
            let a2 = mid(ranges[1], j);
            for k in 0..cells {
                let a3 = mid(ranges[2], k);
                let d = (4.0 * a1 * a3 - a2 * a2).powf(-1.5);
                mass[0][i / SUB] += d;
                mass[1][j / SUB] += d;
                mass[2][k / SUB] += d;
            }
        }
    }

    let mut hist = [[0u64; BINS]; 3];
    for f in &samples {
        let (a1, a2, a3) = f.coefficients();
        for (axis, x) in [a1, a2, a3].into_iter().enumerate() {
            let (lo, hi) = ranges[axis];
            let b = (((x - lo) / (hi - lo)) * BINS as f64).floor() as usize;
            hist[axis][b.min(BINS - 1)] += 1;
        }
    }
    for axis in 0..3 {
        let total: f64 = mass[axis].iter().sum();
        let probs: Vec<f64> = mass[axis].iter().map(|m| m / total).collect();
        assert_histogram(&hist[axis], &probs, samples.len() as u64, &format!("a{}", [1, 2, 3][axis]));
    }
}

#[test]
fn rectangular_sampler_is_log_uniform() {
    let bx = SampleBox::Rectangular(RectangularBox::new((1.0, E), (1.0, E)));
    let n = 100_000;
    let mut hist = [0u64; 10];
    for s in sample_many(&SeedPath::root(77), &bx, n) {
        let u = s.unwrap().form.a1().ln();
        hist[((u * 10.0).floor() as usize).min(9)] += 1;
    }
    assert_histogram(&hist, &[0.1; 10], n as u64, "log a1");
}

proptest! {
    #[test]
    fn validate_form_tracks_the_discriminant(
        a1 in -3.0f64..3.0, a2 in -3.0f64..3.0, a3 in -3.0f64..3.0,
    ) {
        let pd = a1 > 0.0 && 4.0 * a1 * a3 - a2 * a2 > 0.0;
        prop_assert_eq!(validate_form(a1, a2, a3).is_ok(), pd);
    }

    #[test]
    fn discriminant_scale_is_homogeneous(
        a1 in 1.0f64..2.0, a2 in 0.0f64..1.0, a3 in 2.0f64..3.0, lambda in 0.01f64..100.0,
    ) {
        let f = validate_form(a1, a2, a3).unwrap();
        let g = f.scaled(lambda).unwrap();
        let want = lambda * discriminant_scale(&f);
        prop_assert!((discriminant_scale(&g) - want).abs() <= 1e-13 * want);
    }

    #[test]
    fn spectra_are_sorted_and_in_range(
        a1 in 1.0f64..2.0, a2 in 0.0f64..1.0, a3 in 2.0f64..3.0, n in 1.0f64..400.0,
    ) {
        let s = enumerate(&validate_form(a1, a2, a3).unwrap(), n).unwrap();
        prop_assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.values().iter().all(|&v| v > 0.0 && v <= n));
    }
}

#[test]
fn sampler_is_a_pure_function_of_the_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let seed: u64 = rng.random();
        assert_eq!(generic_forms(seed, 3), generic_forms(seed, 3));
        assert_eq!(rectangular_forms(seed, 3), rectangular_forms(seed, 3));
    }
}
