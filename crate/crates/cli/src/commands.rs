use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use torusgaps::deviation::{classify_gap, deviation_experiment_with};
use torusgaps::diophantine::{
    count_8tuples, det_invariants, mertens_product, quadruple_inverse, quadruple_transform,
    rough_density, substitution_residual, t_quadruples_rect, CoordBox, Count8Params, OctTuple,
    SieveWindow,
};
use torusgaps::dirichlet::ramare::ramare_exact;
use torusgaps::dirichlet::{evaluate, gstar, mean_value_check, ramare_split, DirichletSpec, RamareParams};
use torusgaps::form::SymmetryClass;
use torusgaps::moduli::{sample_many, GenericBox, RectangularBox, SampleBox, SeedPath};
use torusgaps::par;
use torusgaps::smoothed::{main_term, smoothed_pair_statistic};
use torusgaps::spectrum::{weyl_tolerance, DEFAULT_BUDGET};
use torusgaps::window::{make_window, WindowKind};
use torusgaps::{enumerate, pair_statistic, validate_form, Interval, ReducedForm};

use crate::args::*;
use crate::cache::SpectrumCache;
use crate::report::{check_outcome, config, to_csv, CheckRow, Failure, Outcome};

type Run = Result<Outcome, Failure>;

fn parse_form(args: &FormArgs) -> Result<ReducedForm, Failure> {
    match (args.alpha.as_slice(), args.class) {
        (&[a1, a3], None | Some(ClassArg::Rectangular)) => Ok(ReducedForm::rectangular(a1, a3)?),
        (&[a1, a2, a3], None | Some(ClassArg::Generic)) => Ok(validate_form(a1, a2, a3)?),
        (&[a1, a2, a3], Some(ClassArg::Rectangular)) => {
            Ok(ReducedForm::new(a1, a2, a3, SymmetryClass::Rectangular)?)
        }
        (a, c) => Err(config(format!(
            "--alpha with {} values does not describe a {:?} form",
            a.len(),
            c.unwrap_or(ClassArg::Generic)
        ))),
    }
}

fn check_cutoff(n: f64) -> Result<(), Failure> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(config(format!("N must be at least 1, got {n}")));
    }
    if n > DEFAULT_BUDGET as f64 {
        return Err(Failure::Budget(format!(
            "N = {n} exceeds the enumeration budget {DEFAULT_BUDGET}"
        )));
    }
    Ok(())
}

fn check_tolerance(name: &str, tol: f64) -> Result<(), Failure> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(config(format!("{name} must be positive, got {tol}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ValueRow {
    index: usize,
    lambda: f64,
}

pub fn spectrum(a: &SpectrumArgs, cache: &SpectrumCache) -> Run {
    let form = parse_form(&a.form)?;
    check_cutoff(a.n)?;
    let s = cache.spectrum(&form, a.n)?;
    let rows: Vec<ValueRow> = s
        .values()
        .iter()
        .enumerate()
        .map(|(i, &lambda)| ValueRow { index: i + 1, lambda })
        .collect();
    let tol = weyl_tolerance(&form, a.n);
    let weyl_ok = (s.count() as f64 - a.n).abs() <= tol;
    Ok(Outcome {
        csv: to_csv(&rows)?,
        rows: rows.len(),
        failed_rows: usize::from(!weyl_ok),
        errors: Vec::new(),
        summary: json!({
            "form": serde_json::from_str::<serde_json::Value>(&form.to_json()).unwrap(),
            "count": s.count(),
            "weyl_tolerance": tol,
            "weyl_pass": weyl_ok,
        }),
    })
}

#[derive(Serialize)]
struct PairsRow {
    class: String,
    a1: f64,
    a2: f64,
    a3: f64,
    #[serde(rename = "N")]
    n: f64,
    lo: f64,
    hi: f64,
    raw_pairs: u64,
    statistic: f64,
    reference: f64,
    rel_dev: f64,
    tolerance: f64,
    regime: &'static str,
    pass: bool,
}

pub fn pairs(a: &PairsArgs, cache: &SpectrumCache) -> Run {
    let form = parse_form(&a.form)?;
    check_cutoff(a.n)?;
    check_tolerance("--tolerance", a.tolerance)?;
    let regime = classify_gap(a.n, a.delta, a.eta).map_err(|e| config(e.to_string()))?;
    let s = cache.spectrum(&form, a.n)?;
    let r = pair_statistic(&s, a.n, Interval::closed(0.0, a.delta))?;
    let (a1, a2, a3) = form.coefficients();
    let rel = (r.statistic - a.delta) / a.delta;
    let row = PairsRow {
        class: form.class().to_string(),
        a1,
        a2,
        a3,
        n: a.n,
        lo: 0.0,
        hi: a.delta,
        raw_pairs: r.raw_pairs,
        statistic: r.statistic,
        reference: a.delta,
        rel_dev: rel,
        tolerance: a.tolerance,
        regime: regime.as_str(),
        pass: rel.abs() <= a.tolerance,
    };
    let pass = row.pass;
    Ok(Outcome {
        csv: to_csv(&[row])?,
        rows: 1,
        failed_rows: usize::from(!pass),
        errors: Vec::new(),
        summary: json!({ "raw_pairs": r.raw_pairs, "statistic": r.statistic }),
    })
}

fn generic_box(v: &[f64]) -> Result<GenericBox, Failure> {
    match v {
        &[l1, h1, l2, h2, l3, h3] => Ok(GenericBox::new((l1, h1), (l2, h2), (l3, h3))),
        _ => Err(config("generic box needs 6 values a1lo,a1hi,a2lo,a2hi,a3lo,a3hi")),
    }
}

fn sample_forms(root: u64, bx: &SampleBox, count: usize) -> Result<Vec<torusgaps::moduli::ModuliSample>, Failure> {
    sample_many(&SeedPath::root(root), bx, count)
        .into_iter()
        .map(|s| s.map_err(Failure::from))
        .collect()
}

#[derive(Serialize)]
struct SmoothedRow {
    sample_id: usize,
    a1: f64,
    a2: f64,
    a3: f64,
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "N")]
    n: f64,
    delta: f64,
    statistic: f64,
    main_term: f64,
    ratio: f64,
    tolerance: f64,
    pass: bool,
}

pub fn smoothed(a: &SmoothedArgs) -> Run {
    check_tolerance("--tolerance", a.tolerance)?;
    if !(a.m >= 2.0 && a.t >= 1.0) {
        return Err(config(format!("need M >= 2 and T >= 1, got M={}, T={}", a.m, a.t)));
    }
    if !(a.t >= a.m.powf(a.eta) && a.t <= a.m.powf(2.0 - a.eta)) {
        return Err(config(format!(
            "T = {} outside [M^eta, M^(2-eta)] = [{}, {}]",
            a.t,
            a.m.powf(a.eta),
            a.m.powf(2.0 - a.eta)
        )));
    }
    let forms: Vec<ReducedForm> = match (&a.alpha, &a.sample_box, a.seed) {
        (Some(v), None, _) => match v.as_slice() {
            &[a1, a2, a3] => vec![validate_form(a1, a2, a3)?],
            _ => return Err(config("--alpha needs 3 values a1,a2,a3")),
        },
        (None, Some(b), Some(seed)) => {
            let bx = SampleBox::Generic(generic_box(b)?);
            sample_forms(seed, &bx, a.samples)?.into_iter().map(|s| s.form).collect()
        }
        _ => return Err(config("give either --alpha, or --box with --seed")),
    };
    let v = make_window(WindowKind::VStyle, a.window_delta)?;
    let w = make_window(WindowKind::WStyle, a.window_delta)?;
    let main = main_term(v.ft_at_zero_positive(), w.ft_at_zero(), a.m, a.t);
    let mut rows = Vec::new();
    for (i, form) in forms.iter().enumerate() {
        let g = smoothed_pair_statistic(form, a.m, a.t, &v, &w)?;
        let (a1, a2, a3) = form.coefficients();
        let ratio = g / main;
        rows.push(SmoothedRow {
            sample_id: i,
            a1,
            a2,
            a3,
            m: a.m,
            t: a.t,
            n: a.m * a.m,
            delta: 1.0 / a.t,
            statistic: g,
            main_term: main,
            ratio,
            tolerance: a.tolerance,
            pass: (ratio - 1.0).abs() <= a.tolerance,
        });
    }
    let within = rows.iter().filter(|r| r.pass).count();
    Ok(Outcome {
        csv: to_csv(&rows)?,
        rows: rows.len(),
        failed_rows: rows.len() - within,
        errors: Vec::new(),
        summary: json!({
            "main_term": main,
            "ft0_v_star": v.ft_at_zero_positive(),
            "ft0_w": w.ft_at_zero(),
            "within_tolerance": within,
        }),
    })
}

pub fn tquad(a: &TquadArgs) -> Run {
    check_cutoff(a.n)?;
    let quads = t_quadruples_rect(a.alpha, a.n, a.delta)?;
    let form = ReducedForm::rectangular(a.alpha, 1.0)?;
    let s = enumerate(&form, a.n)?;
    let raw = if a.delta < 0.0 {
        0
    } else {
        pair_statistic(&s, a.n, Interval::closed(0.0, a.delta))?.raw_pairs
    };
    let params = format!("alpha={:?};N={:?};delta={:?}", a.alpha, a.n, a.delta);
    Ok(check_outcome(&[CheckRow::exact("tquad_vs_pairs", params, quads.len() as f64, raw as f64)])?)
}

fn parse_boxes(text: Option<&str>, m: u64) -> Result<[CoordBox; 4], Failure> {
    let Some(text) = text else {
        return Ok([CoordBox::new(1, m); 4]);
    };
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(config(format!("expected 4 boxes lo:hi, got {text:?}")));
    }
    let mut out = [CoordBox::zero(); 4];
    for (slot, p) in out.iter_mut().zip(parts) {
        let (lo, hi) = p
            .split_once(':')
            .ok_or_else(|| config(format!("box {p:?} is not lo:hi")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| config(format!("box bound {s:?}: {e}")))
        };
        *slot = CoordBox::new(parse(lo)?, parse(hi)?);
    }
    Ok(out)
}

fn boxes_label(b: &[CoordBox; 4]) -> String {
    b.iter()
        .map(|c| format!("{}:{}", c.lo, c.hi))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct Count8Row {
    stratum: &'static str,
    a_boxes: String,
    b_boxes: String,
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "M")]
    m: u64,
    eps_factor: f64,
    count: u64,
}

pub fn count8(a: &Count8Args) -> Run {
    let ab = parse_boxes(a.a.as_deref(), a.m)?;
    let bb = parse_boxes(a.b.as_deref(), a.m)?;
    let params = Count8Params::new(ab, bb, a.d, a.t, a.m as f64, a.eps_exponent);
    let c = count_8tuples(&params)?;
    let rows: Vec<Count8Row> = [
        ("zero_coordinate", c.zero_coordinate),
        ("det_zero", c.det_zero),
        ("generic", c.generic),
        ("total", c.total()),
    ]
    .into_iter()
    .map(|(stratum, count)| Count8Row {
        stratum,
        a_boxes: boxes_label(&ab),
        b_boxes: boxes_label(&bb),
        d: a.d,
        t: a.t,
        m: a.m,
        eps_factor: params.eps_factor,
        count,
    })
    .collect();
    Ok(Outcome {
        csv: to_csv(&rows)?,
        rows: rows.len(),
        summary: json!({ "counts": c, "volume": params.volume() }),
        ..Outcome::default()
    })
}

pub fn rough(a: &RoughArgs) -> Run {
    check_tolerance("--tolerance", a.tolerance)?;
    if !(a.rho > 0.0 && a.rho < 0.5) {
        return Err(config(format!("rho must lie in (0, 1/2), got {}", a.rho)));
    }
    let w = SieveWindow::from_log(a.log_n, a.rho);
    let (count, predicted) = rough_density(a.d, &w)?;
    let pn = mertens_product(&w)?;
    let diff = count as f64 - predicted;
    let row = CheckRow {
        experiment: "rough_density".into(),
        parameters: format!("D={};logN={:?};rho={:?}", a.d, a.log_n, a.rho),
        measured: count as f64,
        reference: predicted,
        rel_dev: diff / predicted,
        tolerance: a.tolerance,
        pass: diff.abs() <= a.tolerance * a.d as f64,
    };
    let mut out = check_outcome(&[row])?;
    out.summary = json!({ "window": w, "mertens_product": pn });
    Ok(out)
}

#[derive(Serialize)]
struct SweepRow {
    y: f64,
    abs_g: f64,
    abs_gstar: f64,
    residual: f64,
    bound: f64,
    pass: bool,
}

pub fn sweep(a: &SweepArgs) -> Run {
    if a.steps == 0 || !(a.y_min <= a.y_max) {
        return Err(config("need --steps >= 1 and y-min <= y-max"));
    }
    if !(a.lo > 0.0 && a.hi > a.lo) {
        return Err(config(format!("need 0 < lo < hi, got ({}, {}]", a.lo, a.hi)));
    }
    let spec = DirichletSpec::unit(a.lo, a.hi);
    let mut rows = Vec::with_capacity(a.steps);
    for i in 0..a.steps {
        let y = if a.steps == 1 {
            a.y_min
        } else {
            a.y_min + (a.y_max - a.y_min) * i as f64 / (a.steps - 1) as f64
        };
        let g = evaluate(&spec, y)?;
        let gs = gstar(Complex64::new(1.0, -2.0 * PI * y), a.hi, a.lo);
        // Partial summation error: 2 + |2 pi y| log(hi / lo).
        let bound = 2.0 + 2.0 * PI * y.abs() * (a.hi / a.lo).ln();
        let residual = (g - gs).norm();
        rows.push(SweepRow {
            y,
            abs_g: g.norm(),
            abs_gstar: gs.norm(),
            residual,
            bound,
            pass: residual <= bound,
        });
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    Ok(Outcome {
        csv: to_csv(&rows)?,
        rows: rows.len(),
        failed_rows: failed,
        ..Outcome::default()
    })
}

#[derive(Serialize)]
struct MeanValueRow {
    trial: usize,
    #[serde(rename = "X")]
    x: usize,
    #[serde(rename = "T")]
    t: f64,
    lhs: f64,
    rhs: f64,
    evaluations: u64,
    pass: bool,
}

/// Random +-1 coefficients for one trial.
pub fn sign_vector(seed: u64, trial: usize, x: usize) -> Vec<f64> {
    let mut rng = SeedPath::root(seed).child(trial as u64).rng();
    (0..x)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

pub fn mean_value(a: &MeanValueArgs) -> Run {
    if a.x == 0 || a.x > 100_000 || !(a.t > 0.0 && a.t <= 1e4) {
        return Err(config("need 1 <= X <= 1e5 and 0 < T <= 1e4"));
    }
    let trials: Vec<usize> = (0..a.trials).collect();
    let results = par::map_slice(&trials, |&i| mean_value_check(&sign_vector(a.seed, i, a.x), a.t));
    let mut rows = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        let mv = r?;
        rows.push(MeanValueRow {
            trial: i,
            x: a.x,
            t: a.t,
            lhs: mv.lhs,
            rhs: mv.rhs,
            evaluations: mv.evaluations,
            pass: mv.holds(),
        });
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    Ok(Outcome {
        csv: to_csv(&rows)?,
        rows: rows.len(),
        failed_rows: failed,
        ..Outcome::default()
    })
}

#[derive(Serialize)]
struct RamareRow {
    y: f64,
    #[serde(rename = "D")]
    d: f64,
    direct_re: f64,
    direct_im: f64,
    residual: f64,
    terms: u64,
    pass: bool,
}

pub fn ramare(a: &RamareArgs) -> Run {
    let w = SieveWindow::from_log(a.log_n, a.rho);
    let p = RamareParams::new(a.d, a.delta_prime, a.kappa);
    let exact = ramare_exact(&w, &p)?;
    let exact_ok = exact.direct == exact.main + exact.boundary + exact.squares;
    let mut rows = Vec::new();
    for &y in &a.y {
        let s = ramare_split(y, &w, &p)?;
        rows.push(RamareRow {
            y,
            d: a.d,
            direct_re: s.direct.re,
            direct_im: s.direct.im,
            residual: s.residual,
            terms: s.terms,
            pass: s.residual <= 1e-6 && s.residual <= 1e-9 * s.terms.max(1) as f64,
        });
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    let mut errors = Vec::new();
    if !exact_ok {
        errors.push("exact identity at y = 0 does not balance".to_string());
    }
    Ok(Outcome {
        csv: to_csv(&rows)?,
        rows: rows.len(),
        failed_rows: failed,
        errors,
        summary: json!({ "exact_identity": exact_ok, "direct_count": exact.direct.to_string() }),
    })
}

pub fn ensemble(a: &EnsembleArgs, cache: &SpectrumCache) -> Run {
    check_cutoff(a.n)?;
    if !(a.dev > 0.0 && a.dev < 1.0) {
        return Err(config(format!("--dev must lie in (0, 1), got {}", a.dev)));
    }
    let regime = classify_gap(a.n, a.delta, a.eta).map_err(|e| config(e.to_string()))?;
    let bx = match (a.class, a.sample_box.as_slice()) {
        (ClassArg::Rectangular, &[l1, h1, l3, h3]) => {
            SampleBox::Rectangular(RectangularBox::new((l1, h1), (l3, h3)))
        }
        (ClassArg::Generic, b) => SampleBox::Generic(generic_box(b)?),
        _ => return Err(config("rectangular box needs 4 values a1lo,a1hi,a3lo,a3hi")),
    };
    let samples = sample_forms(a.seed, &bx, a.samples)?;
    let report = deviation_experiment_with(&samples, a.n, a.delta, a.dev, |f, n| cache.spectrum(f, n))
        .map_err(|e| config(e.to_string()))?;
    let errors: Vec<String> = report
        .rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("sample {}: {e}", r.sample_id)))
        .collect();
    let failed = report
        .rows
        .iter()
        .filter(|r| r.error.is_none() && !r.pass)
        .count();
    let mut ratios = report.ratios();
    ratios.sort_by(f64::total_cmp);
    let median = match ratios.len() {
        0 => None,
        k if k % 2 == 1 => Some(ratios[k / 2]),
        k => Some(0.5 * (ratios[k / 2 - 1] + ratios[k / 2])),
    };
    Ok(Outcome {
        csv: to_csv(&report.rows)?,
        rows: report.rows.len(),
        failed_rows: failed,
        errors,
        summary: json!({
            "regime": regime.as_str(),
            "deviating_fraction": report.fraction,
            "failed_samples": report.failures,
            "median_ratio": median,
        }),
    })
}

/// Invariants written out monomial by monomial, independent of the
/// factored evaluation in the library.
fn det_by_monomials(a: [i128; 4], b: [i128; 4]) -> (i128, i128, i128) {
    let [a1, a2, a3, a4] = a;
    let [b1, b2, b3, b4] = b;
    (
        a1 * a2 * a3 * a4 - b1 * b2 * b3 * b4,
        a1 * a2 * b3 * a4 + a1 * a2 * a3 * b4 - a1 * b2 * b3 * b4 - b1 * a2 * b3 * b4,
        a1 * b2 * a3 * a4 + b1 * a2 * a3 * a4 - b1 * b2 * a3 * b4 - b1 * b2 * b3 * a4,
    )
}

pub fn selftest(a: &SelftestArgs) -> Run {
    let root = SeedPath::root(a.seed);
    let params = format!("trials={};seed={}", a.trials, a.seed);
    let mut rows = Vec::new();

    let mut rng = root.child(0).rng();
    let mut bad = 0u64;
    for _ in 0..a.trials {
        let mut d = || rng.random_range(-1_000_000i64..=1_000_000);
        let (x1, y1, x2, y2) = (d(), d(), d(), d());
        let (a1, a2, b1, b2) = quadruple_transform(x1, y1, x2, y2);
        if quadruple_inverse(a1, a2, b1, b2) != Ok((x1, y1, x2, y2)) {
            bad += 1;
        }
    }
    if quadruple_inverse(1, 2, 2, 4).is_ok() {
        bad += 1;
    }
    rows.push(CheckRow::exact("transform_roundtrip", params.clone(), bad as f64, 0.0));

    let mut rng = root.child(1).rng();
    let mut bad = 0u64;
    let mut nonzero = || loop {
        let x: i128 = rng.random_range(-100..=100);
        if x != 0 {
            break x;
        }
    };
    for _ in 0..a.trials {
        let av = [nonzero(), nonzero(), nonzero(), nonzero()];
        let (b1, b2, b3, b4) = (nonzero(), nonzero(), nonzero(), nonzero());
        let det = av.iter().product::<i128>() - b1 * b2 * b3 * b4;
        match substitution_residual(av, b2, b3, b4, det) {
            Ok(r) if r == 0.into() => {}
            _ => bad += 1,
        }
    }
    rows.push(CheckRow::exact("substitution_residual", params.clone(), bad as f64, 0.0));

    let mut rng = root.child(2).rng();
    let mut bad = 0u64;
    for _ in 0..a.trials {
        let mut d = || rng.random_range(-2_000_000_000i128..=2_000_000_000);
        let (av, bv) = ([d(), d(), d(), d()], [d(), d(), d(), d()]);
        let inv = det_invariants(&OctTuple::new(av, bv))?;
        if (inv.det, inv.det1, inv.det2) != det_by_monomials(av, bv) {
            bad += 1;
        }
    }
    rows.push(CheckRow::exact("det_invariants_dual", params.clone(), bad as f64, 0.0));

    let w = SieveWindow::from_log(16.0, 0.25);
    let mut rng = root.child(3).rng();
    let mut bad = 0u64;
    let ramare_trials = (a.trials / 1000).max(3);
    let exact = ramare_exact(&w, &RamareParams::new(1000.0, 0.1, 0.1))?;
    if exact.direct != exact.main + exact.boundary + exact.squares {
        bad += 1;
    }
    for _ in 0..ramare_trials {
        let y = rng.random_range(-1000.0..1000.0);
        let d = rng.random_range(1000.0..10_000.0);
        let s = ramare_split(y, &w, &RamareParams::new(d, 0.1, 0.1))?;
        if s.residual > 1e-6 {
            bad += 1;
        }
    }
    rows.push(CheckRow::exact(
        "ramare_reconstruction",
        format!("trials={ramare_trials};seed={}", a.seed),
        bad as f64,
        0.0,
    ));
    Ok(check_outcome(&rows)?)
}
