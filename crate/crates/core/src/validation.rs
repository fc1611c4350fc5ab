//! Full reproduction suite: every registered target value in one report.
//!
//! Each criterion bundles related sub-checks (normalizations, closed-form
//! residuals, limiting moments, cross-route agreements) into a pass/fail
//! record with per-line residual details. The same report backs the CLI
//! `validate` command and the acceptance test target, so there is exactly
//! one place where a target value or tolerance is pinned.
//!
//! Checks that compare two independent computation routes state which
//! routes they compare; documented discrepancies between a registered
//! source form and the metric pipeline are reported as notes, not silently
//! patched over.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bayes;
use crate::matrixcore::{eigensystem, HermitianMatrix, C64};
use crate::measure::{integrate, marginal, normalize_prior, Density, MapCtx, Prior, Region};
use crate::metric::{self, MetricKind};
use crate::scenarios::{ball_power_density, eigen_ratio_spread, get_scenario, Scenario};
use crate::specfun::{bessel_i, langevin, Order};
use crate::thermo::{self, closed_form, energy_mean, energy_variance, partition, thermo_curve};
use crate::{Error, Result};

/// Quadrature tolerance for plain normalization/moment integrals.
const QUAD_TOL: f64 = 1e-9;
/// Tighter tolerance for finite-difference cross-checks, where quadrature
/// noise is divided by the step width.
const FD_TOL: f64 = 1e-10;

// ── Report types ─────────────────────────────────────────────────────────────

/// One sub-check: a labelled comparison with its residual details.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// One criterion: a titled bundle of sub-checks plus analysis notes.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub title: String,
    /// Scenario ids this criterion exercises (used by the CLI filter).
    pub scenarios: Vec<String>,
    pub passed: bool,
    pub lines: Vec<CheckLine>,
    pub notes: Vec<String>,
}

/// The aggregate validation report.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {} — {}\n",
                c.id,
                if c.passed { "PASS" } else { "FAIL" },
                c.title
            ));
            for l in &c.lines {
                out.push_str(&format!(
                    "  [{}] {}: {}\n",
                    if l.passed { "ok" } else { "FAIL" },
                    l.label,
                    l.detail
                ));
            }
            for n in &c.notes {
                out.push_str(&format!("  note: {n}\n"));
            }
        }
        out.push_str(&format!(
            "{} of {} criteria passed\n",
            self.passed,
            self.checks.len()
        ));
        out
    }
}

// ── Check builder ────────────────────────────────────────────────────────────

struct Check {
    id: &'static str,
    title: &'static str,
    scenarios: &'static [&'static str],
    lines: Vec<CheckLine>,
    notes: Vec<String>,
}

impl Check {
    fn approx(&mut self, label: impl Into<String>, got: f64, want: f64, tol: f64) {
        let diff = (got - want).abs();
        self.lines.push(CheckLine {
            label: label.into(),
            passed: diff.is_finite() && diff <= tol,
            detail: format!("got {got:.10}, want {want:.10}, |Δ| = {diff:.3e} (tol {tol:.1e})"),
        });
    }

    fn bound(&mut self, label: impl Into<String>, got: f64, max: f64) {
        self.lines.push(CheckLine {
            label: label.into(),
            passed: got.is_finite() && got <= max,
            detail: format!("value {got:.3e} (bound {max:.1e})"),
        });
    }

    fn claim(&mut self, label: impl Into<String>, passed: bool, detail: String) {
        self.lines.push(CheckLine {
            label: label.into(),
            passed,
            detail,
        });
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn finish(self) -> CheckResult {
        let passed = !self.lines.is_empty() && self.lines.iter().all(|l| l.passed);
        CheckResult {
            id: self.id.to_string(),
            title: self.title.to_string(),
            scenarios: self.scenarios.iter().map(|s| s.to_string()).collect(),
            passed,
            lines: self.lines,
            notes: self.notes,
        }
    }
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    scenarios: &'static [&'static str],
    run: fn(&mut Check) -> Result<()>,
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: "C1",
            title: "aligned pair: metric-route normalization constant",
            scenarios: &["s21"],
            run: c1,
        },
        Criterion {
            id: "C2",
            title: "aligned pair: partition function and zero-β moments",
            scenarios: &["s21"],
            run: c2,
        },
        Criterion {
            id: "C3",
            title: "elliptical pair: normalization, uniform marginal, sinhc thermodynamics",
            scenarios: &["s22"],
            run: c3,
        },
        Criterion {
            id: "C4",
            title: "independent-axes pair: two-temperature Bessel product",
            scenarios: &["s23", "s23a", "s23b"],
            run: c4,
        },
        Criterion {
            id: "C5",
            title: "isotropic pair: arcsine prior and shifted-Bessel thermodynamics",
            scenarios: &["s24"],
            run: c5,
        },
        Criterion {
            id: "C6",
            title: "multiparticle chains: normalizations and curve equivalences",
            scenarios: &["s25-3", "s25-4", "s25-5", "s25-6"],
            run: c6,
        },
        Criterion {
            id: "C7",
            title: "second-order/fourth-order chains: corrected arcsine and five-site weight",
            scenarios: &["s26-3", "s26-5"],
            run: c7,
        },
        Criterion {
            id: "C8",
            title: "three-level family: marginal, partition function, shrink-limit marginal",
            scenarios: &["s3"],
            run: c8,
        },
        Criterion {
            id: "C9",
            title: "two-level ball: semicircle marginal, Bessel ratios, uniform shrink limit",
            scenarios: &["bloch-min", "bloch-max", "single-min"],
            run: c9,
        },
        Criterion {
            id: "C10",
            title: "five-ball: Bessel-ratio thermodynamics and shrink-limit energy",
            scenarios: &["quat-min", "quat-max"],
            run: c10,
        },
        Criterion {
            id: "C11",
            title: "metric coincidences: proportional tensors; equal normalized priors",
            scenarios: &["s21", "s23", "s24", "s25-3", "s25-4", "s26-3"],
            run: c11,
        },
        Criterion {
            id: "C12",
            title: "measurement gains: seventeen reference values and the averaging analysis",
            scenarios: &["s21", "s21-anti", "s22", "s24", "s24-measurement"],
            run: c12,
        },
        Criterion {
            id: "C13",
            title: "property suites: cross-routes, matrix order, reconstruction, derivatives",
            scenarios: &[
                "s21", "s21-anti", "s22", "s23", "s24", "s25-3", "s26-3", "s3", "single-min",
            ],
            run: c13,
        },
    ]
}

/// Criterion ids in report order.
pub fn criterion_ids() -> Vec<&'static str> {
    criteria().iter().map(|c| c.id).collect()
}

/// Runs one criterion by id (`"C1"`..`"C13"`, case-insensitive).
pub fn run_criterion(id: &str) -> Result<CheckResult> {
    let want = id.to_ascii_uppercase();
    let spec = criteria()
        .into_iter()
        .find(|c| c.id == want)
        .ok_or_else(|| Error::InvalidInput(format!("unknown criterion {id}")))?;
    Ok(execute(&spec))
}

fn execute(spec: &Criterion) -> CheckResult {
    let mut check = Check {
        id: spec.id,
        title: spec.title,
        scenarios: spec.scenarios,
        lines: Vec::new(),
        notes: Vec::new(),
    };
    if let Err(e) = (spec.run)(&mut check) {
        check.claim("execution", false, format!("aborted: {e}"));
    }
    check.finish()
}

/// Runs the full suite, or the criteria touching one scenario id when a
/// filter is given. Criteria evaluate in parallel; report order is fixed.
pub fn run_acceptance(scenario_filter: Option<&str>) -> ValidationReport {
    let selected: Vec<Criterion> = criteria()
        .into_iter()
        .filter(|c| match scenario_filter {
            None => true,
            Some(f) => {
                c.id.eq_ignore_ascii_case(f) || c.scenarios.iter().any(|s| *s == f)
            }
        })
        .collect();
    let mut checks: Vec<CheckResult> = selected.par_iter().map(execute).collect();
    checks.sort_by_key(|c| {
        c.id.trim_start_matches('C')
            .parse::<u32>()
            .unwrap_or(u32::MAX)
    });
    let passed = checks.iter().filter(|c| c.passed).count();
    let failed = checks.len() - passed;
    ValidationReport {
        checks,
        passed,
        failed,
    }
}

// ── Shared helpers ───────────────────────────────────────────────────────────

fn prior_of(id: &str, kind: MetricKind) -> Result<Prior> {
    get_scenario(id)?.prior(kind, QUAD_TOL)
}

fn obs_of(id: &str) -> Result<thermo::EnergyObservable> {
    get_scenario(id)?.observable(1.0)
}

fn i_int(n: u32, x: f64) -> f64 {
    bessel_i(Order::Integer(n), x).unwrap_or(f64::NAN)
}

fn i_half(k: i32, x: f64) -> f64 {
    bessel_i(Order::HalfInteger(k), x).unwrap_or(f64::NAN)
}

/// Measured proportionality constant between the metric-route volume
/// element and a reference density over interior sample points, with the
/// largest relative deviation from constancy.
fn route_ratio(
    sc: &Scenario,
    kind: MetricKind,
    reference: &Density,
    n: usize,
) -> Result<(f64, f64)> {
    let rep = eigen_ratio_spread(sc, kind, |p| reference.eval(p, &MapCtx::Plain), n)?;
    Ok((rep.median_ratio, rep.rel_spread))
}

/// `∫ reference` over the scenario region (map-aware quadrature).
fn registered_mass(sc: &Scenario, kind: MetricKind, tol: f64) -> Result<f64> {
    integrate(&sc.volume_density(kind)?, &sc.region(), tol)
}

/// Richardson extrapolation of a shrink-limit quantity: evaluates `f` at
/// rim complements `ε` and `ε/2` (radius `R = √(1−ε²)`) and removes the
/// leading O(ε) term, leaving an O(ε²) residual.
fn shrink_extrapolate<F>(eps: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let radius = |e: f64| (1.0 - e * e).sqrt();
    let coarse = f(radius(eps))?;
    let fine = f(radius(eps / 2.0))?;
    Ok(2.0 * fine - coarse)
}

// ── C1 ───────────────────────────────────────────────────────────────────────

/// The aligned pair's minimal-metric volume element integrates to π/2 over
/// its triangular feasibility region. Two measured factors: the
/// proportionality constant between the metric route and the registered
/// normalized form (interior samples), and the registered form's own mass.
fn c1(c: &mut Check) -> Result<()> {
    let sc = get_scenario("s21")?;
    let reference = sc.volume_density(MetricKind::Minimal)?;
    let (ratio, spread) = route_ratio(sc, MetricKind::Minimal, &reference, 25)?;
    c.bound("metric route ∝ registered form (25 interior points)", spread, 1e-8);
    let mass = registered_mass(sc, MetricKind::Minimal, QUAD_TOL)?;
    c.approx(
        "raw volume-element mass over the triangle",
        ratio * mass,
        PI / 2.0,
        1e-7,
    );
    Ok(())
}

// ── C2 ───────────────────────────────────────────────────────────────────────

/// Aligned-pair thermodynamics: the numeric partition function matches the
/// erfi closed form, and the β → 0 moments equal the prior's mean h/3 and
/// variance 16h²/45.
fn c2(c: &mut Check) -> Result<()> {
    let prior = prior_of("s21", MetricKind::Minimal)?;
    let obs = obs_of("s21")?;
    let cf = closed_form("s21", MetricKind::Minimal)
        .ok_or_else(|| Error::InvalidInput("no reference form for s21".into()))?;
    for u in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let q = partition(&prior, &obs, u, QUAD_TOL)?;
        c.approx(format!("Q(βh = {u})"), q, cf.q_normalized(u)?, 1e-7);
    }
    c.approx(
        "β → 0 energy",
        energy_mean(&prior, &obs, 0.0, QUAD_TOL)?,
        1.0 / 3.0,
        1e-6,
    );
    c.approx(
        "β → 0 variance",
        energy_variance(&prior, &obs, 0.0, QUAD_TOL)?,
        16.0 / 45.0,
        1e-6,
    );
    Ok(())
}

// ── C3 ───────────────────────────────────────────────────────────────────────

/// Elliptical pair: raw normalization π/(2√2); the correlation coordinate's
/// marginal is uniform 1/2; Q = sinh(βh)/(βh); E = −h·L(βh); zero-β
/// variance h²/3.
fn c3(c: &mut Check) -> Result<()> {
    let sc = get_scenario("s22")?;
    let reference = sc.volume_density(MetricKind::Minimal)?;
    let (ratio, spread) = route_ratio(sc, MetricKind::Minimal, &reference, 25)?;
    c.bound("metric route ∝ registered form (25 interior points)", spread, 1e-8);
    let mass = registered_mass(sc, MetricKind::Minimal, QUAD_TOL)?;
    c.approx(
        "raw volume-element mass over the ellipse",
        ratio * mass,
        PI / (2.0 * std::f64::consts::SQRT_2),
        1e-7,
    );

    let prior = prior_of("s22", MetricKind::Minimal)?;
    let marg = marginal(&prior, 1, 33)?;
    let dev = marg
        .xs()
        .iter()
        .zip(marg.ys())
        .map(|(_, y)| (y - 0.5).abs())
        .fold(0.0f64, f64::max);
    c.bound("correlation marginal uniform at 1/2 (33 points)", dev, 1e-6);

    let obs = obs_of("s22")?;
    for u in [0.5, 1.0, 2.0, 5.0] {
        let q = partition(&prior, &obs, u, FD_TOL)?;
        c.approx(format!("Q(βh = {u}) = sinh/βh"), q, u.sinh() / u, 1e-8);
    }
    for u in [0.5, 1.0, 2.0] {
        let e = energy_mean(&prior, &obs, u, FD_TOL)?;
        c.approx(format!("E(βh = {u}) = −h·L(βh)"), e, -langevin(u), 1e-7);
    }
    c.approx(
        "β → 0 variance",
        energy_variance(&prior, &obs, 0.0, QUAD_TOL)?,
        1.0 / 3.0,
        1e-6,
    );
    Ok(())
}

// ── C4 ───────────────────────────────────────────────────────────────────────

/// Independent-axes pair: the two-temperature partition function factors
/// into I₀(β₁h/2)·I₀(β₂h/2) on a 5×5 grid, and each one-parameter variant
/// has Q = I₀(βh/2).
fn c4(c: &mut Check) -> Result<()> {
    let prior = prior_of("s23", MetricKind::Minimal)?;
    let grid = [0.0, 0.5, 1.0, 2.0, 4.0];
    let mut worst = 0.0f64;
    for b1 in grid {
        for b2 in grid {
            let q = prior.expectation(move |th| (-b1 * th[0] - b2 * th[1]).exp(), QUAD_TOL)?;
            let want = thermo::product_arcsine_q(b1, b2)?;
            worst = worst.max((q - want).abs());
        }
    }
    c.bound(
        "two-temperature Q matches I₀·I₀ on the 5×5 grid",
        worst,
        1e-7,
    );
    for id in ["s23a", "s23b"] {
        let prior = prior_of(id, MetricKind::Minimal)?;
        let obs = obs_of(id)?;
        let mut dev = 0.0f64;
        for u in [0.5, 1.0, 2.0] {
            let q = partition(&prior, &obs, u, QUAD_TOL)?;
            dev = dev.max((q - i_int(0, u / 2.0)).abs());
        }
        c.bound(format!("{id}: Q = I₀(βh/2)"), dev, 1e-6);
    }
    Ok(())
}

// ── C5 ───────────────────────────────────────────────────────────────────────

/// Isotropic pair: the metric-route prior equals the registered arcsine
/// form pointwise; Q = e^{βh/3}·I₀(2βh/3); β → 0 energy −h/3 and variance
/// 2h²/9.
fn c5(c: &mut Check) -> Result<()> {
    let sc = get_scenario("s24")?;
    let reference = sc.volume_density(MetricKind::Minimal)?;
    let pts = sc.sample_interior(25)?;
    let fam = sc.family()?.expect("registered family");
    let mut ratios = Vec::with_capacity(pts.len());
    for p in &pts {
        let g = metric::tensor(&fam, &sc.embed_family_point(p), MetricKind::Minimal)?;
        ratios.push(metric::volume_element(&g)? / reference.eval(p, &MapCtx::Plain));
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let z = sorted[sorted.len() / 2];
    let dev = pts
        .iter()
        .zip(&ratios)
        .map(|(p, r)| ((r / z - 1.0) * reference.eval(p, &MapCtx::Plain)).abs())
        .fold(0.0f64, f64::max);
    c.bound(
        "metric-route prior vs registered arcsine form (25 points)",
        dev,
        1e-9,
    );

    let prior = prior_of("s24", MetricKind::Minimal)?;
    let obs = obs_of("s24")?;
    for u in [0.5, 1.0, 2.0, 5.0] {
        let q = partition(&prior, &obs, u, QUAD_TOL)?;
        c.approx(
            format!("Q(βh = {u}) = e^{{βh/3}}·I₀(2βh/3)"),
            q,
            (u / 3.0).exp() * i_int(0, 2.0 * u / 3.0),
            1e-7,
        );
    }
    c.approx(
        "β → 0 energy",
        energy_mean(&prior, &obs, 0.0, QUAD_TOL)?,
        -1.0 / 3.0,
        1e-6,
    );
    c.approx(
        "β → 0 variance",
        energy_variance(&prior, &obs, 0.0, QUAD_TOL)?,
        2.0 / 9.0,
        1e-6,
    );
    c.note(
        "The zero-β variance is 2h²/9 by direct moment quadrature. Note that the squared \
         mean is (h/3)² = h²/9, so the variance is not the square of the mean energy; \
         2h²/9 is the arcsine-law value (half-width² / 2 with half-width 2/3).",
    );
    Ok(())
}

// ── C6 ───────────────────────────────────────────────────────────────────────

/// Multiparticle chains: the three-site weight (with its complete-elliptic
/// normalization constant) integrates to 1; the four-site partition
/// function is e^{−βh/3}·I₀(2βh/3) with zero-β energy +h/3; the five-site
/// thermodynamic curve coincides with the three-site curve and the
/// six-site curve with the isotropic-pair closed forms.
fn c6(c: &mut Check) -> Result<()> {
    let z3 = registered_mass(get_scenario("s25-3")?, MetricKind::Minimal, QUAD_TOL)?;
    c.approx("three-site registered weight mass", z3, 1.0, 1e-7);

    let prior4 = prior_of("s25-4", MetricKind::Minimal)?;
    let obs4 = obs_of("s25-4")?;
    for u in [0.5, 1.0, 2.0, 5.0] {
        let q = partition(&prior4, &obs4, u, QUAD_TOL)?;
        c.approx(
            format!("four-site Q(βh = {u}) = e^{{−βh/3}}·I₀(2βh/3)"),
            q,
            (-u / 3.0).exp() * i_int(0, 2.0 * u / 3.0),
            1e-7,
        );
    }
    c.approx(
        "four-site β → 0 energy",
        energy_mean(&prior4, &obs4, 0.0, QUAD_TOL)?,
        1.0 / 3.0,
        1e-6,
    );

    let betas = [0.0, 0.5, 1.0, 2.0, 4.0];
    let curve = |id: &str| -> Result<thermo::ThermoCurve> {
        thermo_curve(
            &prior_of(id, MetricKind::Minimal)?,
            &obs_of(id)?,
            None,
            &betas,
            QUAD_TOL,
        )
    };
    let c3curve = curve("s25-3")?;
    let c5curve = curve("s25-5")?;
    let dev35 = c3curve
        .points
        .iter()
        .zip(&c5curve.points)
        .map(|(a, b)| {
            (a.q_num - b.q_num)
                .abs()
                .max((a.e_num - b.e_num).abs())
                .max((a.var_num - b.var_num).abs())
        })
        .fold(0.0f64, f64::max);
    c.bound("five-site curve ≡ three-site curve (Q, E, Var)", dev35, 1e-6);

    let c6curve = curve("s25-6")?;
    let cf24 = closed_form("s24", MetricKind::Minimal)
        .ok_or_else(|| Error::InvalidInput("no reference form for s24".into()))?;
    let mut dev6 = 0.0f64;
    for p in &c6curve.points {
        dev6 = dev6.max((p.q_num - cf24.q_normalized(p.beta)?).abs());
        dev6 = dev6.max((p.e_num - cf24.energy(p.beta, 1.0)?).abs());
    }
    c.bound("six-site curve ≡ isotropic-pair closed forms", dev6, 1e-6);
    Ok(())
}

// ── C7 ───────────────────────────────────────────────────────────────────────

/// Second-order three-site chain: the corrected arcsine prior yields
/// Q = I₀(βh/3) and zero-β variance h²/18. Five-site fourth-order chain:
/// the registered weight matches the metric route pointwise; its
/// normalization integral is checked against the registered expectation of
/// divergence — the honest quadrature outcome is reported either way.
fn c7(c: &mut Check) -> Result<()> {
    let prior = prior_of("s26-3", MetricKind::Minimal)?;
    let obs = obs_of("s26-3")?;
    for u in [0.5, 1.0, 2.0, 5.0] {
        let q = partition(&prior, &obs, u, QUAD_TOL)?;
        c.approx(format!("Q(βh = {u}) = I₀(βh/3)"), q, i_int(0, u / 3.0), 1e-7);
    }
    c.approx(
        "β → 0 variance",
        energy_variance(&prior, &obs, 0.0, QUAD_TOL)?,
        1.0 / 18.0,
        1e-6,
    );
    c.note(
        "The registered three-site second-order density is the arcsine form 6/(π√(4 − 36ζ²)). \
         The same expression without the square root is not normalizable (its integral \
         diverges logarithmically at ζ = ±1/3) and is dimensionally inconsistent as a \
         volume element; the arcsine form integrates to 1 and reproduces Q = I₀(βh/3).",
    );

    let sc5 = get_scenario("s26-5")?;
    let reference = sc5.volume_density(MetricKind::Minimal)?;
    let (ratio, spread) = route_ratio(sc5, MetricKind::Minimal, &reference, 25)?;
    c.bound(
        "five-site weight matches metric route pointwise (25 points)",
        spread,
        1e-9,
    );
    let _ = ratio;

    // Refinement ladder for the five-site normalization integral. The
    // registered expectation is divergence (estimates growing without
    // bound); the check records what the quadrature actually does.
    let mut estimates = Vec::new();
    let mut diverged = false;
    for tol in [1e-6, 1e-8, 1e-10, 1e-11] {
        match registered_mass(sc5, MetricKind::Minimal, tol) {
            Ok(z) => estimates.push((tol, z)),
            Err(Error::Divergent(_)) => {
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let grew = estimates
        .windows(2)
        .all(|w| w[1].1 > w[0].1 * 10.0);
    let detail = if diverged {
        "quadrature flagged the integral as divergent".to_string()
    } else {
        format!(
            "estimates stable under refinement: {}",
            estimates
                .iter()
                .map(|(t, z)| format!("tol {t:.0e} → {z:.10}"))
                .collect::<Vec<_>>()
                .join(", ")
        )
    };
    c.claim(
        "five-site normalization integral diverges under refinement",
        diverged || (grew && estimates.len() > 1),
        detail,
    );
    if !diverged {
        c.note(format!(
            "The five-site fourth-order weight's normalization integral does not grow without \
             bound: tanh-sinh estimates stabilize at {:.10} (stable to < 1e-6 between \
             tolerances 1e-8 and 1e-11). Both endpoint singularities of the registered \
             expression are integrable powers (−1/2 at ζ = −1/7 and ζ = 1/5), so the weight \
             is normalizable on [−1/7, 1/5] and the registered expectation of divergence is \
             not reproduced. The criterion is left failing rather than adjusted.",
            estimates.last().map(|(_, z)| *z).unwrap_or(f64::NAN),
        ));
    }
    Ok(())
}

// ── C8 ───────────────────────────────────────────────────────────────────────

/// Three-level family: the top-eigenvalue marginal is 3v/(4√(1−v)); the
/// partition function matches the erfi closed form; zero-β moments are
/// 4h/5 and 8h²/175; and the maximal-metric shrink-limit marginal
/// reproduces the same 3v/(4√(1−v)).
fn c8(c: &mut Check) -> Result<()> {
    let target = |v: f64| 0.75 * v / (1.0 - v).sqrt();

    let prior = prior_of("s3", MetricKind::Minimal)?;
    let marg = marginal(&prior, 0, 33)?;
    let dev = marg
        .xs()
        .iter()
        .zip(marg.ys())
        .map(|(x, y)| (y - target(*x)).abs())
        .fold(0.0f64, f64::max);
    c.bound("top-eigenvalue marginal = 3v/(4√(1−v)) (33 points)", dev, 1e-7);

    let obs = obs_of("s3")?;
    let cf = closed_form("s3", MetricKind::Minimal)
        .ok_or_else(|| Error::InvalidInput("no reference form for s3".into()))?;
    for u in [0.5, 1.0, 2.0, 5.0] {
        let q = partition(&prior, &obs, u, QUAD_TOL)?;
        c.approx(format!("Q(βh = {u})"), q, cf.q_normalized(u)?, 1e-7);
    }
    c.approx(
        "β → 0 energy",
        energy_mean(&prior, &obs, 0.0, QUAD_TOL)?,
        4.0 / 5.0,
        1e-6,
    );
    c.approx(
        "β → 0 variance",
        energy_variance(&prior, &obs, 0.0, QUAD_TOL)?,
        8.0 / 175.0,
        1e-6,
    );

    let sc = get_scenario("s3")?;
    let shrunk = sc.shrink_prior(MetricKind::Maximal, 0.99, QUAD_TOL)?;
    let marg_max = marginal(&shrunk, 0, 33)?;
    let dev_max = marg_max
        .xs()
        .iter()
        .zip(marg_max.ys())
        .map(|(x, y)| (y - target(*x)).abs())
        .fold(0.0f64, f64::max);
    c.bound(
        "maximal-route shrink marginal = 3v/(4√(1−v)) (R = 0.99)",
        dev_max,
        1e-4,
    );
    Ok(())
}

// ── C9 ───────────────────────────────────────────────────────────────────────

/// Two-level ball: the minimal-metric axis marginal is the semicircle
/// 2√(1−ξ²)/π with Bessel-ratio thermodynamics; the maximal-metric shrink
/// limit has a uniform marginal and the Langevin energy; and conditioning
/// the minimal prior on a zero coordinate reproduces the same uniform
/// marginal through an independent route.
fn c9(c: &mut Check) -> Result<()> {
    let prior = prior_of("bloch-min", MetricKind::Minimal)?;
    let marg = marginal(&prior, 0, 33)?;
    let dev = marg
        .xs()
        .iter()
        .zip(marg.ys())
        .map(|(x, y)| (y - 2.0 * (1.0 - x * x).sqrt() / PI).abs())
        .fold(0.0f64, f64::max);
    c.bound("axis marginal = 2√(1−ξ²)/π (33 points)", dev, 1e-6);

    let obs = obs_of("bloch-min")?;
    for u in [0.5, 1.0, 2.0] {
        let q = partition(&prior, &obs, u, QUAD_TOL)?;
        c.approx(format!("Q(βh = {u}) = 2I₁/βh"), q, 2.0 * i_int(1, u) / u, 1e-7);
        let e = energy_mean(&prior, &obs, u, QUAD_TOL)?;
        c.approx(
            format!("E(βh = {u}) = −h·I₂/I₁"),
            e,
            -i_int(2, u) / i_int(1, u),
            1e-7,
        );
    }

    let sc_max = get_scenario("bloch-max")?;
    let obs_max = obs_of("bloch-max")?;
    let probes = [0.0, 0.35, -0.35, 0.7, -0.7];
    let mut dev_u = 0.0f64;
    for &xi in &probes {
        let m = shrink_extrapolate(0.004, |r| {
            let p = sc_max.shrink_prior(MetricKind::Maximal, r, QUAD_TOL)?;
            Ok(marginal(&p, 0, 65)?.eval(xi))
        })?;
        dev_u = dev_u.max((m - 0.5).abs());
    }
    c.bound("maximal shrink-limit marginal uniform at 1/2", dev_u, 1e-4);

    let e_limit = shrink_extrapolate(0.002, |r| {
        let p = sc_max.shrink_prior(MetricKind::Maximal, r, QUAD_TOL)?;
        energy_mean(&p, &obs_max, 1.0, QUAD_TOL)
    })?;
    c.approx(
        "maximal shrink-limit energy at βh = 1 = −h·L(βh)",
        e_limit,
        -langevin(1.0),
        1e-5,
    );

    // Independent route: the minimal prior conditioned on a vanishing third
    // coordinate is ∝ (1 − ξ₁² − ξ₂²)^{−1/2} on the unit disk, whose axis
    // marginal is exactly uniform.
    let disk = normalize_prior(
        &ball_power_density(2, -0.5, 1.0),
        &Region::Ball {
            dim: 2,
            radius: 1.0,
        },
        QUAD_TOL,
    )?;
    let m_disk = marginal(&disk, 0, 65)?;
    let mut dev_cross = 0.0f64;
    for &xi in &probes {
        let via_max = shrink_extrapolate(0.004, |r| {
            let p = sc_max.shrink_prior(MetricKind::Maximal, r, QUAD_TOL)?;
            Ok(marginal(&p, 0, 65)?.eval(xi))
        })?;
        dev_cross = dev_cross.max((m_disk.eval(xi) - via_max).abs());
    }
    c.bound(
        "conditional-slice route matches maximal shrink route",
        dev_cross,
        1e-4,
    );
    Ok(())
}

// ── C10 ──────────────────────────────────────────────────────────────────────

/// Five-ball: minimal-metric Q = 8I₂(βh)/(βh)² with energy ratio −I₃/I₂;
/// the maximal-metric shrink limit has energy −h·I_{5/2}/I_{3/2}.
fn c10(c: &mut Check) -> Result<()> {
    let prior = prior_of("quat-min", MetricKind::Minimal)?;
    let obs = obs_of("quat-min")?;
    for u in [0.5, 1.0, 2.0] {
        let q = partition(&prior, &obs, u, QUAD_TOL)?;
        c.approx(
            format!("Q(βh = {u}) = 8I₂/(βh)²"),
            q,
            8.0 * i_int(2, u) / (u * u),
            1e-6,
        );
        let e = energy_mean(&prior, &obs, u, QUAD_TOL)?;
        c.approx(
            format!("E(βh = {u}) = −h·I₃/I₂"),
            e,
            -i_int(3, u) / i_int(2, u),
            1e-6,
        );
    }

    let sc_max = get_scenario("quat-max")?;
    let obs_max = obs_of("quat-max")?;
    let e_limit = shrink_extrapolate(0.004, |r| {
        let p = sc_max.shrink_prior(MetricKind::Maximal, r, QUAD_TOL)?;
        energy_mean(&p, &obs_max, 1.0, QUAD_TOL)
    })?;
    c.approx(
        "maximal shrink-limit energy at βh = 1 = −h·I_{5/2}/I_{3/2}",
        e_limit,
        -i_half(5, 1.0) / i_half(3, 1.0),
        1e-4,
    );
    Ok(())
}

// ── C11 ──────────────────────────────────────────────────────────────────────

/// Metric coincidences. For the aligned pair the maximal tensor is
/// entrywise proportional to the minimal tensor. For the commuting
/// one-coordinate families the maximal-route normalized priors equal the
/// minimal-route priors. The three-site maximal prior is the arcsine
/// √3/(π√(1−3ζ²)) with Q = I₀(βh/√3).
fn c11(c: &mut Check) -> Result<()> {
    let sc21 = get_scenario("s21")?;
    let fam21 = sc21.family()?.expect("registered family");
    let mut ratios = Vec::new();
    for p in sc21.sample_interior(25)? {
        let th = sc21.embed_family_point(&p);
        let gmin = metric::tensor(&fam21, &th, MetricKind::Minimal)?;
        let gmax = metric::tensor(&fam21, &th, MetricKind::Maximal)?;
        let scale = gmin.max_abs();
        for (a, b) in gmax.entries().iter().zip(gmin.entries()) {
            if b.abs() > 1e-9 * scale {
                ratios.push(a / b);
            }
        }
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = ratios[ratios.len() / 2];
    let spread = ratios
        .iter()
        .map(|r| (r / median - 1.0).abs())
        .fold(0.0f64, f64::max);
    c.claim(
        "aligned pair: maximal tensor ∝ minimal tensor (25 points)",
        spread < 1e-8,
        format!("entrywise ratio {median:.10} with relative spread {spread:.3e}"),
    );

    for id in ["s23", "s24", "s25-4", "s26-3"] {
        let sc = get_scenario(id)?;
        let pmin = sc.prior(MetricKind::Minimal, QUAD_TOL)?;
        let pmax = sc.prior(MetricKind::Maximal, QUAD_TOL)?;
        let mut dev = 0.0f64;
        for p in sc.sample_interior(25)? {
            dev = dev.max((pmin.eval(&p) - pmax.eval(&p)).abs());
        }
        c.bound(format!("{id}: normalized priors coincide (25 points)"), dev, 1e-7);

        let fam = sc.family()?.expect("registered family");
        let mut t_ratios = Vec::new();
        for p in sc.sample_interior(9)? {
            let th = sc.embed_family_point(&p);
            let gmin = metric::tensor(&fam, &th, MetricKind::Minimal)?;
            let gmax = metric::tensor(&fam, &th, MetricKind::Maximal)?;
            let scale = gmin.max_abs();
            for (a, b) in gmax.entries().iter().zip(gmin.entries()) {
                if b.abs() > 1e-9 * scale {
                    t_ratios.push(a / b);
                }
            }
        }
        t_ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = t_ratios[t_ratios.len() / 2];
        let sp = t_ratios
            .iter()
            .map(|r| (r / med - 1.0).abs())
            .fold(0.0f64, f64::max);
        c.claim(
            format!("{id}: tensors proportional (9 points)"),
            sp < 1e-8,
            format!("entrywise ratio {med:.10} with relative spread {sp:.3e}"),
        );
    }

    let sc253 = get_scenario("s25-3")?;
    let pmax = sc253.prior(MetricKind::Maximal, QUAD_TOL)?;
    let mut dev = 0.0f64;
    for p in sc253.sample_interior(25)? {
        let want = 3.0f64.sqrt() / (PI * (1.0 - 3.0 * p[0] * p[0]).sqrt());
        dev = dev.max((pmax.eval(&p) - want).abs());
    }
    c.bound("s25-3 maximal prior = √3/(π√(1−3ζ²)) (25 points)", dev, 1e-7);
    let obs = obs_of("s25-3")?;
    for u in [0.5, 1.0, 2.0, 5.0] {
        let q = partition(&pmax, &obs, u, QUAD_TOL)?;
        c.approx(
            format!("s25-3 maximal Q(βh = {u}) = I₀(βh/√3)"),
            q,
            i_int(0, u / 3.0f64.sqrt()),
            1e-7,
        );
    }
    Ok(())
}

// ── C12 ──────────────────────────────────────────────────────────────────────

/// Measurement information gains: seventeen reference values across the
/// three measurement scenarios, plus the expected-gain averaging analysis
/// for the aligned pair (the reference expected value matches the grouped
/// per-outcome gains only under interchanged evidence weights; both ways
/// are computed and reported).
fn c12(c: &mut Check) -> Result<()> {
    let tol = bayes::KL_TOL;

    let second_step = |id: &str, seq: &str| -> Result<f64> {
        let setup = bayes::joint_measurement(id)?;
        let prior = bayes::measurement_prior(id, QUAD_TOL)?;
        let idx: Vec<usize> = seq
            .chars()
            .map(|ch| setup.grouped.outcome_index(ch))
            .collect::<Result<_>>()?;
        let steps = bayes::sequential_gains(&prior, &setup.family, &setup.grouped, &idx, tol)?;
        Ok(steps.last().expect("nonempty sequence").gain_nats)
    };
    let first_gains = |id: &str| -> Result<(f64, f64, f64)> {
        let setup = bayes::joint_measurement(id)?;
        let prior = bayes::measurement_prior(id, QUAD_TOL)?;
        let rep = bayes::expected_gain(&prior, &setup.family, &setup.grouped, tol)?;
        let a = rep.outcomes[0].gain_nats;
        let d = rep.outcomes[1].gain_nats;
        Ok((a, d, rep.expected_gain_nats))
    };

    // Aligned pair: six printed values.
    let (a21, d21, _) = first_gains("s21")?;
    c.approx("aligned pair: gain(agree)", a21, 0.125093, 1e-4);
    c.approx("aligned pair: gain(disagree)", d21, 0.431946, 1e-4);
    c.approx("aligned pair: second gain after AA", second_step("s21", "AA")?, 0.0427712, 1e-4);
    c.approx("aligned pair: second gain after AD", second_step("s21", "AD")?, 0.542771, 1e-4);
    c.approx("aligned pair: second gain after DA", second_step("s21", "DA")?, 0.235918, 1e-4);
    c.approx("aligned pair: second gain after DD", second_step("s21", "DD")?, 0.110826, 1e-4);

    // Elliptical pair: four printed values (its outcomes are symmetric).
    let (a22, d22, exp22) = first_gains("s22")?;
    c.approx("elliptical pair: first-outcome gain", a22, 0.193147, 1e-4);
    c.approx("elliptical pair: expected gain", exp22, 0.193147, 1e-4);
    c.approx(
        "elliptical pair: second gain, same outcome",
        second_step("s22", "AA")?,
        0.0721318,
        1e-4,
    );
    c.approx(
        "elliptical pair: second gain, opposite outcome",
        second_step("s22", "AD")?,
        0.265279,
        1e-4,
    );
    let _ = d22;

    // Arbitrary-axis isotropic pair: seven printed values.
    let (a24, d24, exp24) = first_gains("s24")?;
    c.approx("isotropic pair: gain(agree)", a24, 0.306853, 1e-4);
    c.approx("isotropic pair: gain(disagree)", d24, 0.0646381, 1e-4);
    c.approx("isotropic pair: expected gain", exp24, 0.145376, 1e-4);
    c.approx("isotropic pair: second gain after AA", second_step("s24", "AA")?, 0.0680544, 1e-4);
    c.approx("isotropic pair: second gain after AD", second_step("s24", "AD")?, 0.0516789, 1e-4);
    c.approx("isotropic pair: second gain after DA", second_step("s24", "DA")?, 0.427868, 1e-4);
    c.approx("isotropic pair: second gain after DD", second_step("s24", "DD")?, 0.0470689, 1e-4);

    // The aligned pair's reference expected gain: compute both averaging
    // conventions side by side; the criterion passes when the analysis is
    // emitted with finite values.
    let analysis = bayes::aligned_pair_gain_analysis(tol)?;
    c.claim(
        "aligned pair: expected-gain averaging analysis emitted",
        analysis.straight_average_nats.is_finite()
            && analysis.swapped_weight_average_nats.is_finite()
            && !analysis.note.is_empty(),
        format!(
            "straight {:.6}, swapped-weight {:.6}, four-outcome {:.6}, reference {:.6}",
            analysis.straight_average_nats,
            analysis.swapped_weight_average_nats,
            analysis.ungrouped.expected_gain_nats,
            analysis.reference_value,
        ),
    );
    c.approx(
        "aligned pair: swapped-weight average reproduces the reference figure",
        analysis.swapped_weight_average_nats,
        0.329662,
        1e-4,
    );
    c.note(analysis.note.clone());
    Ok(())
}

// ── C13 ──────────────────────────────────────────────────────────────────────

/// Property suites: the eigenbasis kernel route agrees with the
/// linear-system route for the minimal tensor; the maximal tensor dominates
/// the minimal in the matrix order; eigendecompositions reconstruct their
/// input up to n = 64; −∂ log Q/∂β matches the moment-ratio energy and
/// dE/dβ matches −Var by finite differences; measurement evidences sum
/// to 1.
fn c13(c: &mut Check) -> Result<()> {
    // Tensor cross-route and matrix-order checks over 104 interior points.
    let fam_ids = ["s21", "s21-anti", "s22", "s23", "s24", "s25-3", "s26-3", "s3"];
    let mut cross_dev = 0.0f64;
    let mut worst_order = f64::INFINITY;
    let mut points = 0usize;
    for id in fam_ids {
        let sc = get_scenario(id)?;
        let fam = sc.family()?.expect("registered family");
        for p in sc.sample_interior(13)? {
            let th = sc.embed_family_point(&p);
            let gmin = metric::bures_tensor(&fam, &th)?;
            let gsld = metric::sld_cross_check(&fam, &th)?;
            let scale = gmin.max_abs().max(1.0);
            cross_dev = cross_dev.max(gmin.max_abs_diff(&gsld) / scale);
            let gmax = metric::maximal_tensor(&fam, &th)?;
            let gap = gmax.minus(&gmin)?;
            worst_order = worst_order.min(gap.min_eigenvalue()? / gmax.max_abs());
            points += 1;
        }
    }
    c.claim(
        "eigenbasis route vs linear-system route for the minimal tensor",
        points >= 100 && cross_dev < 1e-9,
        format!("max relative deviation {cross_dev:.3e} over {points} points"),
    );
    c.claim(
        "maximal ⪰ minimal in the matrix order",
        worst_order > -1e-8,
        format!("smallest scaled eigenvalue of (max − min): {worst_order:.3e}"),
    );

    // Eigendecomposition reconstruction on deterministic dense Hermitian
    // matrices up to n = 64.
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut rec_dev = 0.0f64;
    for n in [2usize, 4, 8, 16, 32, 64] {
        let mut m = HermitianMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                if i == j {
                    m.set_pair(i, i, C64::new(next(), 0.0));
                } else {
                    m.set_pair(i, j, C64::new(next(), next()));
                }
            }
        }
        let es = eigensystem(&m)?;
        let scale = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).norm())
            .fold(0.0f64, f64::max);
        rec_dev = rec_dev.max(es.reconstruct().max_abs_diff(&m) / scale);
    }
    c.bound("eigendecomposition reconstruction up to n = 64", rec_dev, 1e-12);

    // Finite-difference identities on representative scenarios.
    let fd_ids = ["s21", "s22", "s24", "s26-3", "single-min"];
    for id in fd_ids {
        let prior = prior_of(id, MetricKind::Minimal)?;
        let obs = obs_of(id)?;
        let mut dlogq_dev = 0.0f64;
        let step = 1e-4;
        for u in [0.5, 1.0, 2.0] {
            let qp = partition(&prior, &obs, u + step, FD_TOL)?;
            let qm = partition(&prior, &obs, u - step, FD_TOL)?;
            let fd = -(qp.ln() - qm.ln()) / (2.0 * step);
            let e = energy_mean(&prior, &obs, u, FD_TOL)?;
            dlogq_dev = dlogq_dev.max((fd - e).abs());
        }
        c.bound(format!("{id}: −∂logQ/∂β matches the moment-ratio energy"), dlogq_dev, 1e-5);

        let step_e = 1e-3;
        let ep = energy_mean(&prior, &obs, 1.0 + step_e, FD_TOL)?;
        let em = energy_mean(&prior, &obs, 1.0 - step_e, FD_TOL)?;
        let slope = (ep - em) / (2.0 * step_e);
        let var = energy_variance(&prior, &obs, 1.0, FD_TOL)?;
        c.approx(format!("{id}: dE/dβ = −Var at βh = 1"), slope, -var, 1e-4);
    }

    // Evidence completeness across the measurement scenarios.
    for (id, grouped) in [("s21", false), ("s21-anti", true), ("s22", true), ("s24", true)] {
        let setup = bayes::joint_measurement(id)?;
        let prior = bayes::measurement_prior(id, QUAD_TOL)?;
        let model = if grouped { &setup.grouped } else { &setup.ungrouped };
        let mut total = 0.0;
        for i in 0..model.outcomes().len() {
            let like = bayes::outcome_likelihood(&setup.family, model, i)?;
            let (_, evidence) = bayes::posterior(&prior, like, QUAD_TOL)?;
            total += evidence;
        }
        c.approx(
            format!(
                "{id}: {} evidences sum to 1",
                if grouped { "grouped" } else { "four-outcome" }
            ),
            total,
            1.0,
            1e-8,
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_counts_and_order_are_consistent() {
        let ids = criterion_ids();
        assert_eq!(ids.len(), 13);
        assert_eq!(ids[0], "C1");
        assert_eq!(ids[12], "C13");
    }

    #[test]
    fn filter_selects_touching_criteria() {
        // Cheap structural test: the filter must pick exactly the criteria
        // whose scenario lists contain the id. Use a scenario that pins a
        // small subset so the run stays fast.
        let selected: Vec<&str> = criteria()
            .iter()
            .filter(|c| c.scenarios.contains(&"quat-min"))
            .map(|c| c.id)
            .collect();
        assert_eq!(selected, vec!["C10"]);
        let report = run_acceptance(Some("quat-min"));
        assert_eq!(report.checks.len(), 1);
        assert_eq!(report.checks[0].id, "C10");
    }

    #[test]
    fn unknown_criterion_is_rejected() {
        assert!(run_criterion("C99").is_err());
        assert!(run_criterion("C7").is_ok());
    }

    #[test]
    fn render_text_lists_every_line() {
        let report = run_acceptance(Some("quat-max"));
        let text = report.render_text();
        assert!(text.contains("C10"));
        assert!(text.contains("criteria passed"));
        let json = report.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v["checks"][0]["lines"].is_array());
    }
}
