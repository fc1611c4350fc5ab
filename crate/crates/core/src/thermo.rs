//! Thermodynamics of normalized priors under Boltzmann weighting.
//!
//! A prior density `p(θ)` together with an energy observable `ε(θ) = h·(c·θ)`
//! defines a partition function `Q(β) = ∫ p(θ) e^{−βε(θ)} dθ`, a mean energy
//! `E(β) = ⟨ε⟩`, and an energy variance — all computed as ratios of
//! Boltzmann-weighted moments (never by differentiating interpolated
//! `log Q`, which would amplify quadrature noise).
//!
//! A registry of closed-form reference curves, keyed by scenario id and
//! metric kind, backs residual columns in [`ThermoCurve`] output. Every
//! reference is written in a cancellation-free form: confluent integrals go
//! through the Dawson function instead of raw `erfi`, and each formula with
//! a removable `0/0` at `u = 0` carries a series branch.

use crate::measure::Prior;
use crate::metric::MetricKind;
use crate::specfun::{bessel_i, dawson, langevin, Order};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Default quadrature tolerance for partition-function integrals.
pub const DEFAULT_THERMO_TOL: f64 = 1e-8;

/// Largest exponent handed to `exp`; beyond this the Boltzmann factor (or a
/// closed form carrying an exponential prefactor) would overflow `f64`.
const EXP_ARG_LIMIT: f64 = 690.0;

// ── Energy observable ───────────────────────────────────────────────────────

/// Linear energy functional `ε(θ) = h · (c · θ)`.
///
/// The coefficient vector `c` selects which parameters are weighted (for a
/// single weighted coordinate it is a unit vector); `h` carries the energy
/// units, so `β·h` is the single dimensionless knob.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyObservable {
    coeffs: Vec<f64>,
    h: f64,
}

impl EnergyObservable {
    pub fn new(coeffs: Vec<f64>, h: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "energy observable needs at least one coefficient".into(),
            ));
        }
        if !h.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "energy observable coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs, h })
    }

    /// Observable that weights a single coordinate: `ε(θ) = h·θ[axis]`.
    pub fn axis(dim: usize, axis: usize, h: f64) -> Result<Self> {
        if axis >= dim {
            return Err(Error::InvalidInput(format!(
                "axis {axis} out of range for {dim} parameter(s)"
            )));
        }
        let mut coeffs = vec![0.0; dim];
        coeffs[axis] = 1.0;
        Self::new(coeffs, h)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `ε(θ) = h · Σ cᵢ θᵢ`.
    pub fn energy(&self, th: &[f64]) -> f64 {
        debug_assert_eq!(th.len(), self.coeffs.len());
        self.h * self.coeffs.iter().zip(th).map(|(c, t)| c * t).sum::<f64>()
    }

    /// Upper bound of `|ε|` over an axis-aligned bounding box.
    fn energy_bound(&self, bbox: &[(f64, f64)]) -> f64 {
        self.coeffs
            .iter()
            .zip(bbox)
            .map(|(c, (lo, hi))| (c * self.h).abs() * lo.abs().max(hi.abs()))
            .sum()
    }
}

// ── Boltzmann-weighted moments ──────────────────────────────────────────────

/// `⟨ εᵏ e^{−βε} ⟩` under the normalized prior.
pub fn boltzmann_moment(
    prior: &Prior,
    obs: &EnergyObservable,
    beta: f64,
    pow: u32,
    tol: f64,
) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::InvalidInput("β must be finite".into()));
    }
    let region = prior.region();
    if obs.dim() != region.dim() {
        return Err(Error::InvalidInput(format!(
            "observable has {} coefficient(s) but the prior has {} parameter(s)",
            obs.dim(),
            region.dim()
        )));
    }
    let bound = beta.abs() * obs.energy_bound(&region.bbox());
    if bound > EXP_ARG_LIMIT {
        return Err(Error::InvalidInput(format!(
            "Boltzmann exponent |β·ε| reaches {bound:.1}, beyond the overflow guard ({EXP_ARG_LIMIT})"
        )));
    }
    let o = obs.clone();
    let k = pow as i32;
    prior.expectation(
        move |th| {
            let e = o.energy(th);
            (-beta * e).exp() * e.powi(k)
        },
        tol,
    )
}

/// Partition function `Q(β) = ⟨e^{−βε}⟩`; equals 1 at `β = 0`.
pub fn partition(prior: &Prior, obs: &EnergyObservable, beta: f64, tol: f64) -> Result<f64> {
    boltzmann_moment(prior, obs, beta, 0, tol)
}

/// Mean energy `E(β) = ⟨ε e^{−βε}⟩ / ⟨e^{−βε}⟩` (the moment-ratio form of
/// `−∂ log Q/∂β`).
pub fn energy_mean(prior: &Prior, obs: &EnergyObservable, beta: f64, tol: f64) -> Result<f64> {
    let m0 = boltzmann_moment(prior, obs, beta, 0, tol)?;
    if m0 <= 0.0 {
        return Err(Error::Numerical(
            "partition function is not positive".into(),
        ));
    }
    Ok(boltzmann_moment(prior, obs, beta, 1, tol)? / m0)
}

/// Energy variance under the Boltzmann-tilted density: second moment minus
/// squared mean. Tiny negative round-off is clamped to zero; a genuinely
/// negative value is reported as a numerical failure.
pub fn energy_variance(prior: &Prior, obs: &EnergyObservable, beta: f64, tol: f64) -> Result<f64> {
    let m0 = boltzmann_moment(prior, obs, beta, 0, tol)?;
    if m0 <= 0.0 {
        return Err(Error::Numerical(
            "partition function is not positive".into(),
        ));
    }
    let mean = boltzmann_moment(prior, obs, beta, 1, tol)? / m0;
    let second = boltzmann_moment(prior, obs, beta, 2, tol)? / m0;
    let var = second - mean * mean;
    if var < -1e-10 * second.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "variance came out negative ({var:.3e})"
        )));
    }
    Ok(var.max(0.0))
}

// ── Closed-form reference curves ────────────────────────────────────────────

type RefFn = fn(f64) -> Result<f64>;

/// Closed-form reference for one scenario/metric pair, parameterized by the
/// dimensionless `u = β·h` of the scenario's standard observable.
///
/// `q` evaluates the literal published formula, whose value at `u = 0` is
/// `q_at_zero()` (not always 1, because some formulas absorb an overall
/// normalization); `q_normalized` divides that out so the result is directly
/// comparable to the numeric `partition` of a normalized prior.
/// `energy_per_h` is `−∂ log q/∂u`, i.e. the mean energy in units of `h`.
#[derive(Clone, Copy)]
pub struct ClosedForm {
    q_ref: RefFn,
    e_ref: RefFn,
    q0: f64,
}

impl ClosedForm {
    /// Literal reference value of the partition function at `u = β·h`.
    pub fn q(&self, u: f64) -> Result<f64> {
        (self.q_ref)(u)
    }

    /// Reference value scaled so that it equals 1 at `u = 0`.
    pub fn q_normalized(&self, u: f64) -> Result<f64> {
        Ok((self.q_ref)(u)? / self.q0)
    }

    /// Value of the literal formula at `u = 0`.
    pub fn q_at_zero(&self) -> f64 {
        self.q0
    }

    /// Mean energy divided by `h`, as a function of `u = β·h`.
    pub fn energy_per_h(&self, u: f64) -> Result<f64> {
        (self.e_ref)(u)
    }

    /// Mean energy at inverse temperature `β` for field scale `h`.
    pub fn energy(&self, beta: f64, h: f64) -> Result<f64> {
        Ok(h * (self.e_ref)(beta * h)?)
    }
}

/// Closed-form reference curve for a scenario/metric pair, when one exists.
///
/// Pairs without a published formula return `None`: the maximal-metric
/// ellipse prior is improper, the three- and five-particle odd scenarios
/// have no minimal-metric partition function in closed form, and the
/// five-particle even scenario's weight does not normalize.
pub fn closed_form(id: &str, kind: MetricKind) -> Option<ClosedForm> {
    use MetricKind::{Maximal, Minimal};
    fn cf(q_ref: RefFn, e_ref: RefFn, q0: f64) -> Option<ClosedForm> {
        Some(ClosedForm { q_ref, e_ref, q0 })
    }
    match (id, kind) {
        ("s21", _) => cf(q_edge_half, e_edge_half, 1.0),
        ("s21-anti", _) => cf(q_edge_half_mirror, e_edge_half_mirror, 1.0),
        ("s22", Minimal) => cf(q_sinhc, e_langevin_neg, 1.0),
        ("s23", _) => cf(q_arcsine_half_sq, e_arcsine_half_sq, 1.0),
        ("s23a", _) | ("s23b", _) => cf(q_arcsine_half, e_arcsine_half, 1.0),
        ("s24", _) | ("s25-6", _) => cf(q_arcsine_low_third, e_arcsine_low_third, 1.0),
        ("s25-4", _) => cf(q_arcsine_high_third, e_arcsine_high_third, 1.0),
        ("s25-3", Maximal) | ("s25-5", Maximal) => {
            cf(q_arcsine_inv_sqrt3, e_arcsine_inv_sqrt3, 1.0)
        }
        ("s26-3", _) => cf(q_arcsine_third, e_arcsine_third, 1.0),
        ("s3", _) => cf(q_linear_edge_half, e_linear_edge_half, 1.0),
        ("bloch-min", Minimal) | ("single-min", Minimal) => {
            cf(q_semicircle, e_semicircle, PI / 2.0)
        }
        ("bloch-max", Maximal) => cf(q_sinhc, e_langevin_neg, 1.0),
        ("quat-min", Minimal) => cf(q_edge_pow32, e_edge_pow32, 3.0 * PI / 32.0),
        ("quat-max", Maximal) => cf(q_parabolic, e_parabolic, 1.0),
        _ => None,
    }
}

/// Two-temperature partition function of the product of two arcsine weights
/// on `[−1/2, 1/2]`: `I₀(u₁/2)·I₀(u₂/2)` with `uᵢ = βᵢ·h`.
pub fn product_arcsine_q(u1: f64, u2: f64) -> Result<f64> {
    Ok(i0_even(u1 / 2.0)? * i0_even(u2 / 2.0)?)
}

// ── Reference-formula building blocks ───────────────────────────────────────

fn check_u(u: f64) -> Result<()> {
    if u.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput("β·h must be finite".into()))
    }
}

fn exp_guard(arg: f64) -> Result<()> {
    if arg > EXP_ARG_LIMIT {
        Err(Error::InvalidInput(format!(
            "closed form overflows: exponent {arg:.1} exceeds {EXP_ARG_LIMIT}"
        )))
    } else {
        Ok(())
    }
}

/// `I₀(x)`, valid for either sign (even function).
fn i0_even(x: f64) -> Result<f64> {
    bessel_i(Order::Integer(0), x.abs())
}

/// `I_{ν+1}(x) / I_ν(x)`. Odd in `x`; the small-`x` branch uses the leading
/// series ratio `x / (2(ν+1))` to avoid 0/0.
fn bessel_ratio_step(order: Order, x: f64) -> Result<f64> {
    let nu = order.as_f64();
    if x.abs() < 1e-6 {
        return Ok(x / (2.0 * (nu + 1.0)));
    }
    let next = match order {
        Order::Integer(n) => Order::Integer(n + 1),
        Order::HalfInteger(k) => Order::HalfInteger(k + 2),
    };
    let ax = x.abs();
    let r = bessel_i(next, ax)? / bessel_i(order, ax)?;
    Ok(if x < 0.0 { -r } else { r })
}

/// `S(x) = ∫₀¹ e^{x t²} dt`.
///
/// Every branch is cancellation-free: the Dawson rewrite `e^x·D(√x)/√x` for
/// `x > 1`, the defining series `Σ xᵏ/(k!(2k+1))` on `[0, 1]`, the Kummer
/// transform `S(−y) = e^{−y}·Σ (2y)ᵏ/(2k+1)!!` (all positive terms) for
/// negative arguments, and the Gaussian-tail asymptote `√π/(2√−x)` below
/// `x = −100`, where its relative error is of order `erfc(10) ≈ 2e-45`.
fn confluent_s(x: f64) -> Result<f64> {
    check_u(x)?;
    if x > 1.0 {
        exp_guard(x)?;
        let z = x.sqrt();
        Ok(x.exp() * dawson(z) / z)
    } else if x >= 0.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=60u32 {
            term *= x / k as f64;
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        Ok(sum)
    } else if x >= -100.0 {
        let y = -x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=500u32 {
            term *= 2.0 * y / (2 * k + 1) as f64;
            sum += term;
            if term < 1e-17 * sum && k as f64 > y {
                break;
            }
        }
        Ok((-y).exp() * sum)
    } else {
        Ok(PI.sqrt() / (2.0 * (-x).sqrt()))
    }
}

/// Moments `mₖ = ⟨xᵏ⟩` of the edge weight `(1−x)^{−1/2}/(2√2)` on `[−1,1]`,
/// from the stable recurrence `(2k+1)mₖ = (−1)ᵏ + 2k·mₖ₋₁`
/// (integration by parts in `w = 1−x`). First values: 1, 1/3, 7/15.
fn edge_half_moments() -> &'static [f64] {
    static M: OnceLock<Vec<f64>> = OnceLock::new();
    M.get_or_init(|| {
        let mut m = vec![1.0];
        for k in 1..=40usize {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let prev = m[k - 1];
            m.push((sign + 2.0 * k as f64 * prev) / (2 * k + 1) as f64);
        }
        m
    })
}

/// Moments of the weight `3v/(4√(1−v))` on `[0,1]`: `m₀ = 1` and
/// `m_{k+1} = m_k·(k+2)/(k+5/2)` (ratio of Beta-function values).
/// First values: 1, 4/5, 24/35.
fn linear_edge_moments() -> &'static [f64] {
    static M: OnceLock<Vec<f64>> = OnceLock::new();
    M.get_or_init(|| {
        let mut m = vec![1.0];
        for k in 0..=40usize {
            let prev = m[k];
            m.push(prev * (k as f64 + 2.0) / (k as f64 + 2.5));
        }
        m
    })
}

/// Tilted moment series `Σ_j (−u)^j m_{s+j} / j!` — the `s`-th moment of the
/// weight multiplied by `e^{−ux}`, termwise. Safe for `|u| ≲ 1` since the
/// moments are bounded by 1 in absolute value.
fn tilted_moment(moments: &[f64], u: f64, s: usize) -> f64 {
    let mut pw = 1.0;
    let mut sum = moments[s];
    for (j, m) in moments[s + 1..].iter().enumerate() {
        pw *= -u / (j + 1) as f64;
        sum += pw * m;
    }
    sum
}

// ── Reference formulas, named by the weight they transform ─────────────────
// Each `q_*` is the Laplace transform ⟨e^{−ux}⟩ of a normalized weight
// (unless noted), and `e_*` the matching −∂ log q/∂u.

/// Edge weight `(1−x)^{−1/2}/(2√2)` on `[−1,1]`: `q = e^{−u}·S(2u)`,
/// equivalently `e^{u}·D(√(2u))/√(2u)` for positive `u` (erfi form rewritten
/// through the Dawson function).
fn q_edge_half(u: f64) -> Result<f64> {
    check_u(u)?;
    if u > 0.5 {
        exp_guard(u)?;
        let z = (2.0 * u).sqrt();
        Ok(u.exp() * dawson(z) / z)
    } else {
        exp_guard(-u)?;
        Ok((-u).exp() * confluent_s(2.0 * u)?)
    }
}

/// Mean of `x` under the tilted edge weight: `1 + 1/(2u) − 1/(√(2u)·D(√(2u)))`
/// away from zero, with the moment-series ratio bridging the removable
/// singularity (limits: `1/3` at `u = 0`, `∓1` at `u → ±∞`).
fn e_edge_half(u: f64) -> Result<f64> {
    check_u(u)?;
    if u.abs() <= 0.5 {
        let m = edge_half_moments();
        Ok(tilted_moment(m, u, 1) / tilted_moment(m, u, 0))
    } else if u > 0.5 {
        let z = (2.0 * u).sqrt();
        Ok(1.0 + 0.5 / u - 1.0 / (z * dawson(z)))
    } else {
        let s = confluent_s(2.0 * u)?;
        Ok(1.0 + 0.5 / u - (2.0 * u).exp() / (2.0 * u * s))
    }
}

/// Mirror image of the edge weight (`x → −x`).
fn q_edge_half_mirror(u: f64) -> Result<f64> {
    q_edge_half(-u)
}

fn e_edge_half_mirror(u: f64) -> Result<f64> {
    Ok(-e_edge_half(-u)?)
}

/// Uniform weight `1/2` on `[−1,1]`: `q = sinh(u)/u`.
fn q_sinhc(u: f64) -> Result<f64> {
    check_u(u)?;
    exp_guard(u.abs())?;
    if u.abs() < 1e-4 {
        let u2 = u * u;
        Ok(1.0 + u2 / 6.0 + u2 * u2 / 120.0)
    } else {
        Ok(u.sinh() / u)
    }
}

fn e_langevin_neg(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(-langevin(u))
}

/// Arcsine weight on `[−1/2, 1/2]`: `q = I₀(u/2)`.
fn q_arcsine_half(u: f64) -> Result<f64> {
    check_u(u)?;
    i0_even(u / 2.0)
}

fn e_arcsine_half(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(-0.5 * bessel_ratio_step(Order::Integer(0), u / 2.0)?)
}

/// Product of two independent arcsine weights on `[−1/2, 1/2]`, both axes
/// sharing one temperature: `q = I₀(u/2)²`.
fn q_arcsine_half_sq(u: f64) -> Result<f64> {
    let q = q_arcsine_half(u)?;
    Ok(q * q)
}

fn e_arcsine_half_sq(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(-bessel_ratio_step(Order::Integer(0), u / 2.0)?)
}

/// Arcsine weight on `[−1, 1/3]` (center `−1/3`, half-width `2/3`):
/// `q = e^{u/3}·I₀(2u/3)`.
fn q_arcsine_low_third(u: f64) -> Result<f64> {
    check_u(u)?;
    exp_guard(u.abs())?;
    Ok((u / 3.0).exp() * i0_even(2.0 * u / 3.0)?)
}

fn e_arcsine_low_third(u: f64) -> Result<f64> {
    check_u(u)?;
    let r = bessel_ratio_step(Order::Integer(0), 2.0 * u / 3.0)?;
    Ok((-1.0 - 2.0 * r) / 3.0)
}

/// Arcsine weight on `[−1/3, 1]` (center `+1/3`): `q = e^{−u/3}·I₀(2u/3)`.
fn q_arcsine_high_third(u: f64) -> Result<f64> {
    check_u(u)?;
    exp_guard(u.abs())?;
    Ok((-u / 3.0).exp() * i0_even(2.0 * u / 3.0)?)
}

fn e_arcsine_high_third(u: f64) -> Result<f64> {
    check_u(u)?;
    let r = bessel_ratio_step(Order::Integer(0), 2.0 * u / 3.0)?;
    Ok((1.0 - 2.0 * r) / 3.0)
}

/// Arcsine weight on `[−1/√3, 1/√3]`: `q = I₀(u/√3)`.
fn q_arcsine_inv_sqrt3(u: f64) -> Result<f64> {
    check_u(u)?;
    i0_even(u / 3.0f64.sqrt())
}

fn e_arcsine_inv_sqrt3(u: f64) -> Result<f64> {
    check_u(u)?;
    let s = 3.0f64.sqrt();
    Ok(-bessel_ratio_step(Order::Integer(0), u / s)? / s)
}

/// Arcsine weight on `[−1/3, 1/3]`: `q = I₀(u/3)`.
fn q_arcsine_third(u: f64) -> Result<f64> {
    check_u(u)?;
    i0_even(u / 3.0)
}

fn e_arcsine_third(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(-bessel_ratio_step(Order::Integer(0), u / 3.0)? / 3.0)
}

/// Linear-times-edge weight `3v/(4√(1−v))` on `[0,1]`:
/// `q = 3((1+2u)·D(√u) − √u) / (4u^{3/2})` for `u > 1` (the erfi form of the
/// published curve, rewritten through the Dawson function), and the
/// moment series for `|u| ≤ 1`. Strongly negative `u` is out of scope.
fn q_linear_edge_half(u: f64) -> Result<f64> {
    check_u(u)?;
    if u.abs() <= 1.0 {
        Ok(tilted_moment(linear_edge_moments(), u, 0))
    } else if u > 1.0 {
        let z = u.sqrt();
        Ok(3.0 * ((1.0 + 2.0 * u) * dawson(z) - z) / (4.0 * u * z))
    } else {
        Err(Error::InvalidInput(
            "this reference curve is implemented for β·h ≥ −1 only".into(),
        ))
    }
}

fn e_linear_edge_half(u: f64) -> Result<f64> {
    check_u(u)?;
    if u.abs() <= 1.0 {
        let m = linear_edge_moments();
        Ok(tilted_moment(m, u, 1) / tilted_moment(m, u, 0))
    } else if u > 1.0 {
        let z = u.sqrt();
        let d = dawson(z);
        let num = (4.0 * u * u + 4.0 * u + 3.0) * d - z * (2.0 * u + 3.0);
        let den = 2.0 * u * ((2.0 * u + 1.0) * d - z);
        Ok(num / den)
    } else {
        Err(Error::InvalidInput(
            "this reference curve is implemented for β·h ≥ −1 only".into(),
        ))
    }
}

/// Semicircle weight `(2/π)√(1−x²)` on `[−1,1]`, in its literal published
/// scaling `q = π·I₁(u)/u` (value `π/2` at `u = 0`).
fn q_semicircle(u: f64) -> Result<f64> {
    check_u(u)?;
    if u.abs() < 1e-4 {
        let u2 = u * u;
        Ok((PI / 2.0) * (1.0 + u2 / 8.0 + u2 * u2 / 192.0))
    } else {
        let ax = u.abs();
        Ok(PI * bessel_i(Order::Integer(1), ax)? / ax)
    }
}

fn e_semicircle(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(-bessel_ratio_step(Order::Integer(1), u)?)
}

/// Power-3/2 edge weight `∝ (1−x²)^{3/2}` on `[−1,1]`, literal scaling
/// `q = 3π·I₂(u)/(4u²)` (value `3π/32` at `u = 0`).
fn q_edge_pow32(u: f64) -> Result<f64> {
    check_u(u)?;
    if u.abs() < 1e-4 {
        let u2 = u * u;
        Ok((3.0 * PI / 32.0) * (1.0 + u2 / 12.0))
    } else {
        Ok(3.0 * PI * bessel_i(Order::Integer(2), u.abs())? / (4.0 * u * u))
    }
}

fn e_edge_pow32(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(-bessel_ratio_step(Order::Integer(2), u)?)
}

/// Parabolic weight `(3/4)(1−x²)` on `[−1,1]`:
/// `q = 3(u·cosh u − sinh u)/u³`, with a series branch below `|u| = 1/2`.
fn q_parabolic(u: f64) -> Result<f64> {
    check_u(u)?;
    exp_guard(u.abs())?;
    let ax = u.abs();
    if ax < 0.5 {
        // 3·Σ_{k≥1} 2k·u^{2k−2}/(2k+1)!  (first term 1).
        let u2 = u * u;
        let mut term = 1.0 / 6.0; // u^{2k−2}/(2k+1)! at k = 1, before the 2k·3 scaling
        let mut sum = 1.0;
        for k in 2..=20u32 {
            term *= u2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            let add = 3.0 * 2.0 * k as f64 * term;
            sum += add;
            if add.abs() < 1e-17 {
                break;
            }
        }
        Ok(sum)
    } else {
        Ok(3.0 * (u * u.cosh() - u.sinh()) / (u * u * u))
    }
}

fn e_parabolic(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(-bessel_ratio_step(Order::HalfInteger(3), u)?)
}

// ── Thermodynamic curves over a β grid ──────────────────────────────────────

/// One row of a thermodynamic curve. Closed-form columns are present only
/// when the scenario has a reference formula; `q_closed` is normalized to 1
/// at `β = 0` so residuals compare like with like.
#[derive(Debug, Clone, Serialize)]
pub struct ThermoPoint {
    pub beta: f64,
    #[serde(rename = "Q_num")]
    pub q_num: f64,
    #[serde(rename = "Q_closed")]
    pub q_closed: Option<f64>,
    #[serde(rename = "E_num")]
    pub e_num: f64,
    #[serde(rename = "E_closed")]
    pub e_closed: Option<f64>,
    #[serde(rename = "Var_num")]
    pub var_num: f64,
    #[serde(rename = "residual_Q")]
    pub residual_q: Option<f64>,
    #[serde(rename = "residual_E")]
    pub residual_e: Option<f64>,
}

/// Partition function, mean energy, and variance tabulated over a β grid,
/// with reference-formula residuals where available.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct ThermoCurve {
    pub points: Vec<ThermoPoint>,
}

pub const THERMO_CSV_HEADER: &str =
    "beta,Q_num,Q_closed,E_num,E_closed,Var_num,residual_Q,residual_E";

impl ThermoCurve {
    pub fn to_csv(&self) -> String {
        fn cell(v: Option<f64>) -> String {
            v.map(|x| format!("{x:.16e}")).unwrap_or_default()
        }
        let mut out = String::from(THERMO_CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!(
                "{:.16e},{:.16e},{},{:.16e},{},{:.16e},{},{}\n",
                p.beta,
                p.q_num,
                cell(p.q_closed),
                p.e_num,
                cell(p.e_closed),
                p.var_num,
                cell(p.residual_q),
                cell(p.residual_e),
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Evaluate Q, E, Var on a β grid (data-parallel over grid points). When a
/// closed form is supplied, each row also carries the reference values at
/// `u = β·h` and the absolute residuals against the numeric columns.
pub fn thermo_curve(
    prior: &Prior,
    obs: &EnergyObservable,
    closed: Option<&ClosedForm>,
    betas: &[f64],
    tol: f64,
) -> Result<ThermoCurve> {
    let points = betas
        .par_iter()
        .map(|&beta| -> Result<ThermoPoint> {
            let m0 = boltzmann_moment(prior, obs, beta, 0, tol)?;
            if m0 <= 0.0 {
                return Err(Error::Numerical(
                    "partition function is not positive".into(),
                ));
            }
            let mean = boltzmann_moment(prior, obs, beta, 1, tol)? / m0;
            let second = boltzmann_moment(prior, obs, beta, 2, tol)? / m0;
            let var = (second - mean * mean).max(0.0);
            let (q_closed, e_closed, residual_q, residual_e) = match closed {
                Some(cf) => {
                    let u = beta * obs.h();
                    let qc = cf.q_normalized(u)?;
                    let ec = cf.energy(beta, obs.h())?;
                    (
                        Some(qc),
                        Some(ec),
                        Some((m0 - qc).abs()),
                        Some((mean - ec).abs()),
                    )
                }
                None => (None, None, None, None),
            };
            Ok(ThermoPoint {
                beta,
                q_num: m0,
                q_closed,
                e_num: mean,
                e_closed,
                var_num: var,
                residual_q,
                residual_e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThermoCurve { points })
}

// ── Tests ───────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{normalize_prior, Density, MapCtx, Region};

    /// Uniform density on [−1, 1] (normalizes to 1/2).
    fn uniform_prior() -> Prior {
        let d = Density::plain(|_| 1.0);
        normalize_prior(&d, &Region::Interval { a: -1.0, b: 1.0 }, 1e-10).unwrap()
    }

    /// Arcsine density 1/(π√((x−a)(b−x))) on [a, b], already normalized.
    fn arcsine_prior(a: f64, b: f64) -> Prior {
        let d = Density::map_aware(|_, ctx| {
            let prod = match ctx {
                MapCtx::Interval { d_lo, d_hi, .. } => d_lo * d_hi,
                _ => unreachable!("1D quadrature always reports interval distances"),
            };
            1.0 / (PI * prod.sqrt())
        });
        normalize_prior(&d, &Region::Interval { a, b }, 1e-10).unwrap()
    }

    /// Semicircle density (2/π)√(1−x²) on [−1, 1], already normalized.
    fn semicircle_prior() -> Prior {
        let d = Density::map_aware(|_, ctx| {
            let prod = match ctx {
                MapCtx::Interval { d_lo, d_hi, .. } => d_lo * d_hi,
                _ => unreachable!(),
            };
            (2.0 / PI) * prod.sqrt()
        });
        normalize_prior(&d, &Region::Interval { a: -1.0, b: 1.0 }, 1e-10).unwrap()
    }

    /// Density 3v/(4√(1−v)) on [0, 1], already normalized.
    fn linear_edge_prior() -> Prior {
        let d = Density::map_aware(|th, ctx| {
            let d_hi = match ctx {
                MapCtx::Interval { d_hi, .. } => *d_hi,
                _ => unreachable!(),
            };
            0.75 * th[0] / d_hi.sqrt()
        });
        normalize_prior(&d, &Region::Interval { a: 0.0, b: 1.0 }, 1e-10).unwrap()
    }

    /// Correlated-pair density `(1/(2√2))[(1−ζ)(1+ζ+2ξ)(1+ζ−2ξ)]^{−1/2}`
    /// over the triangle (0,−1),(1,1),(−1,1), with map-aware branches for
    /// every quadrature chart (normalization constant π/2).
    fn correlated_prior() -> Prior {
        use crate::measure::pos_clamp;
        let d = Density::map_aware(|th, ctx| {
            let c = 0.5 / 2.0f64.sqrt();
            let prod = match ctx {
                MapCtx::TriangleDuffy { u, cu, w, cw } => 32.0 * u * u * cu * w * cw,
                MapCtx::Slice {
                    axis: 0,
                    d_lo,
                    d_hi,
                    pin_d_hi,
                    ..
                } => pin_d_hi * (2.0 * d_lo) * (2.0 * d_hi),
                MapCtx::Slice {
                    axis: 1,
                    d_lo,
                    d_hi,
                    ..
                } => d_hi * d_lo * (d_lo + 4.0 * th[0].abs()),
                _ => {
                    let (xi, ze) = (th[0], th[1]);
                    pos_clamp(1.0 - ze)
                        * pos_clamp(1.0 + ze + 2.0 * xi)
                        * pos_clamp(1.0 + ze - 2.0 * xi)
                }
            };
            c / pos_clamp(prod).sqrt()
        });
        let region = Region::Triangle {
            v: [[0.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
        };
        normalize_prior(&d, &region, 1e-10).unwrap()
    }

    #[test]
    fn uniform_prior_matches_sinhc_forms() {
        let prior = uniform_prior();
        let h = 1.3;
        let obs = EnergyObservable::axis(1, 0, h).unwrap();
        for &beta in &[0.3, 1.0, 2.7] {
            let u = beta * h;
            let q = partition(&prior, &obs, beta, 1e-10).unwrap();
            assert!((q - u.sinh() / u).abs() < 1e-9, "β={beta}: q={q}");
            let e = energy_mean(&prior, &obs, beta, 1e-10).unwrap();
            assert!((e + h * langevin(u)).abs() < 1e-9, "β={beta}: e={e}");
        }
        // β = 0 moments: Q = 1, E = 0, Var = h²/3.
        assert!((partition(&prior, &obs, 0.0, 1e-10).unwrap() - 1.0).abs() < 1e-9);
        assert!(energy_mean(&prior, &obs, 0.0, 1e-10).unwrap().abs() < 1e-9);
        let v = energy_variance(&prior, &obs, 0.0, 1e-10).unwrap();
        assert!((v - h * h / 3.0).abs() < 1e-8, "var={v}");
    }

    #[test]
    fn arcsine_prior_matches_bessel_forms() {
        let prior = arcsine_prior(-0.5, 0.5);
        let obs = EnergyObservable::axis(1, 0, 1.0).unwrap();
        for &u in &[0.1, 1.0, 5.0] {
            let q = partition(&prior, &obs, u, 1e-10).unwrap();
            let q_ref = q_arcsine_half(u).unwrap();
            assert!((q - q_ref).abs() < 1e-9, "u={u}: {q} vs {q_ref}");
            let e = energy_mean(&prior, &obs, u, 1e-10).unwrap();
            let e_ref = e_arcsine_half(u).unwrap();
            assert!((e - e_ref).abs() < 1e-9, "u={u}: {e} vs {e_ref}");
        }
    }

    #[test]
    fn shifted_arcsine_matches_offset_bessel_forms() {
        // Arcsine on [−1, 1/3]: Laplace transform e^{u/3}·I₀(2u/3); at β = 0
        // the mean is the center −1/3 and the variance (half-width)²/2 = 2/9.
        let prior = arcsine_prior(-1.0, 1.0 / 3.0);
        let h = 2.0;
        let obs = EnergyObservable::axis(1, 0, h).unwrap();
        let cf = closed_form("s24", MetricKind::Minimal).unwrap();
        for &beta in &[0.1, 0.5, 2.0] {
            let u = beta * h;
            let q = partition(&prior, &obs, beta, 1e-10).unwrap();
            assert!(
                (q - cf.q_normalized(u).unwrap()).abs() < 1e-9,
                "β={beta}: q={q}"
            );
            let e = energy_mean(&prior, &obs, beta, 1e-10).unwrap();
            assert!((e - cf.energy(beta, h).unwrap()).abs() < 1e-9, "e={e}");
        }
        let e0 = energy_mean(&prior, &obs, 0.0, 1e-10).unwrap();
        assert!((e0 + h / 3.0).abs() < 1e-9, "e0={e0}");
        let v0 = energy_variance(&prior, &obs, 0.0, 1e-10).unwrap();
        assert!((v0 - 2.0 * h * h / 9.0).abs() < 1e-8, "v0={v0}");
    }

    #[test]
    fn linear_edge_prior_matches_confluent_forms() {
        // Spans both reference branches: series at u ≤ 1, Dawson above.
        let prior = linear_edge_prior();
        let obs = EnergyObservable::axis(1, 0, 1.0).unwrap();
        let cf = closed_form("s3", MetricKind::Minimal).unwrap();
        for &u in &[0.5, 2.0, 10.0] {
            let q = partition(&prior, &obs, u, 1e-10).unwrap();
            let q_ref = cf.q_normalized(u).unwrap();
            assert!((q - q_ref).abs() < 1e-9, "u={u}: {q} vs {q_ref}");
            let e = energy_mean(&prior, &obs, u, 1e-10).unwrap();
            let e_ref = cf.energy_per_h(u).unwrap();
            assert!((e - e_ref).abs() < 1e-9, "u={u}: {e} vs {e_ref}");
        }
        let e0 = energy_mean(&prior, &obs, 0.0, 1e-10).unwrap();
        assert!((e0 - 0.8).abs() < 1e-9, "e0={e0}");
        let v0 = energy_variance(&prior, &obs, 0.0, 1e-10).unwrap();
        assert!((v0 - 8.0 / 175.0).abs() < 1e-9, "v0={v0}");
    }

    #[test]
    fn semicircle_prior_matches_bessel_ratio_forms() {
        let prior = semicircle_prior();
        let obs = EnergyObservable::axis(1, 0, 1.0).unwrap();
        let cf = closed_form("bloch-min", MetricKind::Minimal).unwrap();
        assert!((cf.q_at_zero() - PI / 2.0).abs() < 1e-15);
        for &u in &[0.5, 3.0] {
            let q = partition(&prior, &obs, u, 1e-10).unwrap();
            assert!((q - cf.q_normalized(u).unwrap()).abs() < 1e-9, "u={u}");
            let e = energy_mean(&prior, &obs, u, 1e-10).unwrap();
            assert!((e - cf.energy_per_h(u).unwrap()).abs() < 1e-8, "u={u}");
        }
    }

    #[test]
    fn correlated_pair_prior_matches_edge_weight_forms() {
        // 2D prior whose ζ-marginal is the edge weight; tilting the second
        // coordinate must reproduce the 1D reference curve.
        let prior = correlated_prior();
        let h = 2.0;
        let obs = EnergyObservable::axis(2, 1, h).unwrap();
        let cf = closed_form("s21", MetricKind::Minimal).unwrap();
        for &beta in &[0.05, 0.5, 2.5] {
            let u = beta * h;
            let q = partition(&prior, &obs, beta, 1e-9).unwrap();
            let q_ref = cf.q_normalized(u).unwrap();
            assert!((q - q_ref).abs() < 1e-7, "β={beta}: {q} vs {q_ref}");
            let e = energy_mean(&prior, &obs, beta, 1e-9).unwrap();
            let e_ref = cf.energy(beta, h).unwrap();
            assert!((e - e_ref).abs() < 1e-7, "β={beta}: {e} vs {e_ref}");
        }
        // β = 0: mean 2·(1/3), variance 4·(16/45) for h = 2.
        let e0 = energy_mean(&prior, &obs, 0.0, 1e-9).unwrap();
        assert!((e0 - 2.0 / 3.0).abs() < 1e-8, "e0={e0}");
        let v0 = energy_variance(&prior, &obs, 0.0, 1e-9).unwrap();
        assert!((v0 - 4.0 * 16.0 / 45.0).abs() < 1e-7, "v0={v0}");
    }

    #[test]
    fn mirrored_edge_weight_flips_sign() {
        for &u in &[0.2, 1.7, 40.0] {
            let q = q_edge_half(u).unwrap();
            let qm = q_edge_half_mirror(-u).unwrap();
            assert_eq!(q, qm);
            let e = e_edge_half(u).unwrap();
            let em = e_edge_half_mirror(-u).unwrap();
            assert_eq!(e, -em);
        }
        // The mirrored weight leans toward −1: mean −1/3 at u = 0.
        assert!((e_edge_half_mirror(0.0).unwrap() + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn reference_branches_agree_at_their_switch_points() {
        // Edge weight at u = 1/2: the series route (taken at u ≤ 1/2) and
        // the Dawson route (taken above) must give the same value there.
        let series_q = q_edge_half(0.5).unwrap();
        let dawson_q = 0.5f64.exp() * dawson(1.0);
        assert!(
            (series_q - dawson_q).abs() < 1e-13,
            "{series_q} vs {dawson_q}"
        );
        let series_e = e_edge_half(0.5).unwrap();
        let dawson_e = 1.0 + 1.0 - 1.0 / dawson(1.0);
        assert!(
            (series_e - dawson_e).abs() < 1e-12,
            "{series_e} vs {dawson_e}"
        );
        // Mirror side at u = −1/2: series ratio vs the direct S-quotient.
        let series_m = e_edge_half(-0.5).unwrap();
        let s = confluent_s(-1.0).unwrap();
        let direct_m = 1.0 - 1.0 + (-1.0f64).exp() / s;
        assert!(
            (series_m - direct_m).abs() < 1e-12,
            "{series_m} vs {direct_m}"
        );
        // S(x) Kummer series vs Gaussian-tail asymptote at the x = −100
        // switch, and vs the defining series at x = 0.
        let kummer_s = confluent_s(-100.0).unwrap();
        let tail_s = PI.sqrt() / (2.0 * 100.0f64.sqrt());
        assert!(
            ((kummer_s - tail_s) / tail_s).abs() < 1e-12,
            "{kummer_s} vs {tail_s}"
        );
        let zero_minus = confluent_s(-1e-14).unwrap();
        let zero_plus = confluent_s(0.0).unwrap();
        assert!((zero_minus - zero_plus).abs() < 1e-14);
        // Linear-edge weight at u = 1: moment series vs Dawson formula.
        let series_l = q_linear_edge_half(1.0).unwrap();
        let dawson_l = 3.0 * (3.0 * dawson(1.0) - 1.0) / 4.0;
        assert!(
            (series_l - dawson_l).abs() < 1e-14,
            "{series_l} vs {dawson_l}"
        );
        let series_le = e_linear_edge_half(1.0).unwrap();
        let d = dawson(1.0);
        let dawson_le = (11.0 * d - 5.0) / (2.0 * (3.0 * d - 1.0));
        assert!(
            (series_le - dawson_le).abs() < 1e-13,
            "{series_le} vs {dawson_le}"
        );
        // Parabolic weight at u = 1/2: series vs hyperbolic form.
        let series_p = q_parabolic(0.5 - f64::EPSILON).unwrap();
        let direct_p = 3.0 * (0.5 * 0.5f64.cosh() - 0.5f64.sinh()) / 0.125;
        assert!(
            (series_p - direct_p).abs() < 1e-13,
            "{series_p} vs {direct_p}"
        );
    }

    #[test]
    fn reference_curves_normalize_and_limit_correctly() {
        use MetricKind::{Maximal, Minimal};
        // (id, kind, E/h at u = 0)
        let table: &[(&str, MetricKind, f64)] = &[
            ("s21", Minimal, 1.0 / 3.0),
            ("s21", Maximal, 1.0 / 3.0),
            ("s21-anti", Minimal, -1.0 / 3.0),
            ("s22", Minimal, 0.0),
            ("s23", Minimal, 0.0),
            ("s23a", Minimal, 0.0),
            ("s23b", Maximal, 0.0),
            ("s24", Minimal, -1.0 / 3.0),
            ("s25-6", Maximal, -1.0 / 3.0),
            ("s25-4", Minimal, 1.0 / 3.0),
            ("s25-3", Maximal, 0.0),
            ("s25-5", Maximal, 0.0),
            ("s26-3", Minimal, 0.0),
            ("s3", Minimal, 0.8),
            ("s3", Maximal, 0.8),
            ("bloch-min", Minimal, 0.0),
            ("single-min", Minimal, 0.0),
            ("bloch-max", Maximal, 0.0),
            ("quat-min", Minimal, 0.0),
            ("quat-max", Maximal, 0.0),
        ];
        for &(id, kind, e0) in table {
            let cf = closed_form(id, kind)
                .unwrap_or_else(|| panic!("missing reference for {id}/{kind}"));
            let q = cf.q_normalized(1e-9).unwrap();
            assert!((q - 1.0).abs() < 1e-6, "{id}: q(0⁺)={q}");
            let e = cf.energy_per_h(0.0).unwrap();
            assert!((e - e0).abs() < 1e-12, "{id}: e(0)={e} want {e0}");
        }
    }

    #[test]
    fn reference_registry_rejects_unavailable_pairs() {
        use MetricKind::{Maximal, Minimal};
        for (id, kind) in [
            ("s22", Maximal),    // improper prior, no curve
            ("s25-3", Minimal),  // no published partition function
            ("s25-5", Minimal),  // ditto (five ≡ three particles)
            ("s26-5", Minimal),  // weight does not normalize
            ("s26-4-open", Minimal),
            ("bloch-min", Maximal),
            ("quat-max", Minimal),
            ("no-such-id", Minimal),
        ] {
            assert!(closed_form(id, kind).is_none(), "{id}/{kind}");
        }
    }

    #[test]
    fn overflow_guards_reject_extreme_arguments() {
        let prior = uniform_prior();
        let obs = EnergyObservable::axis(1, 0, 1.0).unwrap();
        assert!(matches!(
            partition(&prior, &obs, 800.0, 1e-8),
            Err(Error::InvalidInput(_))
        ));
        assert!(q_edge_half(1.0e5).is_err());
        assert!(q_sinhc(1.0e4).is_err());
        assert!(q_edge_half(f64::NAN).is_err());
        // Strongly negative β has no implemented reference for this weight.
        assert!(q_linear_edge_half(-2.0).is_err());
    }

    #[test]
    fn finite_differences_agree_with_moment_ratios() {
        let prior = uniform_prior();
        let obs = EnergyObservable::axis(1, 0, 1.0).unwrap();
        let beta = 0.7;
        let step = 1e-4;
        let lq = |b: f64| partition(&prior, &obs, b, 1e-11).unwrap().ln();
        let fd_e = -(lq(beta + step) - lq(beta - step)) / (2.0 * step);
        let e = energy_mean(&prior, &obs, beta, 1e-11).unwrap();
        assert!((fd_e - e).abs() < 1e-6, "fd={fd_e} vs {e}");
        let em = |b: f64| energy_mean(&prior, &obs, b, 1e-11).unwrap();
        let fd_var = -(em(beta + step) - em(beta - step)) / (2.0 * step);
        let var = energy_variance(&prior, &obs, beta, 1e-11).unwrap();
        assert!((fd_var - var).abs() < 1e-5, "fd={fd_var} vs {var}");
    }

    #[test]
    fn curve_emits_schema_with_and_without_references() {
        let prior = uniform_prior();
        let obs = EnergyObservable::axis(1, 0, 1.0).unwrap();
        let cf = closed_form("s22", MetricKind::Minimal).unwrap();
        let betas = [0.0, 0.5, 1.0];
        let curve = thermo_curve(&prior, &obs, Some(&cf), &betas, 1e-10).unwrap();
        assert_eq!(curve.points.len(), 3);
        let p0 = &curve.points[0];
        assert!((p0.q_num - 1.0).abs() < 1e-9);
        assert!(p0.e_num.abs() < 1e-9);
        assert!((p0.var_num - 1.0 / 3.0).abs() < 1e-8);
        for p in &curve.points {
            assert!(p.residual_q.unwrap() < 1e-8);
            assert!(p.residual_e.unwrap() < 1e-8);
            assert!(p.var_num >= 0.0);
        }
        // E is nonincreasing in β (positive heat capacity).
        assert!(curve.points[1].e_num <= curve.points[0].e_num + 1e-12);
        assert!(curve.points[2].e_num <= curve.points[1].e_num + 1e-12);

        let csv = curve.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), THERMO_CSV_HEADER);
        assert_eq!(lines.count(), 3);

        // Without a reference the optional columns are null/empty.
        let bare = thermo_curve(&prior, &obs, None, &betas, 1e-10).unwrap();
        let json: serde_json::Value = serde_json::from_str(&bare.to_json().unwrap()).unwrap();
        let row = &json.as_array().unwrap()[0];
        assert!(row.get("Q_num").unwrap().is_number());
        assert!(row.get("Q_closed").unwrap().is_null());
        let csv_bare = bare.to_csv();
        let second = csv_bare.lines().nth(1).unwrap();
        assert_eq!(second.split(',').count(), 8);
        assert!(second.split(',').nth(2).unwrap().is_empty());
    }

    #[test]
    fn two_temperature_product_splits_into_single_axis_factors() {
        let q = product_arcsine_q(0.8, 1.6).unwrap();
        let direct = q_arcsine_half(0.8).unwrap() * q_arcsine_half(1.6).unwrap();
        assert!((q - direct).abs() < 1e-15);
        // One axis at infinite temperature reduces to the 1D transform.
        let q1 = product_arcsine_q(0.8, 0.0).unwrap();
        assert!((q1 - q_arcsine_half(0.8).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn observable_construction_is_validated() {
        assert!(EnergyObservable::new(vec![], 1.0).is_err());
        assert!(EnergyObservable::new(vec![f64::NAN], 1.0).is_err());
        assert!(EnergyObservable::axis(2, 2, 1.0).is_err());
        let obs = EnergyObservable::axis(2, 1, 0.7).unwrap();
        assert!((obs.energy(&[0.3, 0.5]) - 0.35).abs() < 1e-15);
        // Dimension mismatch against a 1D prior is rejected.
        let prior = uniform_prior();
        assert!(matches!(
            partition(&prior, &obs, 0.5, 1e-8),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn moment_recurrences_match_directly_integrated_values() {
        // Edge weight: m₀ = 1, m₁ = 1/3, m₂ = 7/15 (by parts in w = 1−x);
        // quadrature cross-check for the first six.
        let m = edge_half_moments();
        assert!((m[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((m[2] - 7.0 / 15.0).abs() < 1e-15);
        let prior = correlated_prior();
        for k in 0..6u32 {
            let mk = prior
                .expectation(move |th| th[1].powi(k as i32), 1e-10)
                .unwrap();
            assert!((mk - m[k as usize]).abs() < 1e-8, "k={k}: {mk}");
        }
        // Linear-edge weight: m₁ = 4/5, m₂ = 24/35.
        let lm = linear_edge_moments();
        assert!((lm[1] - 0.8).abs() < 1e-15);
        assert!((lm[2] - 24.0 / 35.0).abs() < 1e-15);
    }
}
