//! Normalized measures over parameter regions.
//!
//! This module turns unnormalized weight functions (volume elements) into
//! probability measures and provides the integration geometry: regions with
//! singularity-regularizing maps, marginal distributions, tabulated curves,
//! radially symmetric ball weights, and the shrink-to-unit-ball limit used
//! when a weight is integrable only on interior balls.
//!
//! Boundary-singular weights are first-class citizens here. Every region map
//! hands the integrand a [`MapCtx`] carrying *exactly computed* distances to
//! the boundary along the map's natural directions, so that weights with
//! inverse-square-root edge factors can be evaluated without the catastrophic
//! cancellation of recomputing those distances from rounded coordinates.

pub mod quad;

use std::cell::RefCell;
use std::sync::Arc;

use crate::matrixcore::AffineFamily;
use crate::{Error, Result};

pub use quad::{integrate_interval, integrate_plain, pairwise_sum, QuadOutcome, MAX_LEVEL};

/// Default relative tolerance for one-dimensional integrals.
pub const DEFAULT_TOL_1D: f64 = 1e-10;
/// Default relative tolerance for two-dimensional (nested) integrals.
pub const DEFAULT_TOL_2D: f64 = 1e-9;
/// Default number of points in tabulated marginals.
pub const MARGINAL_GRID: usize = 201;
/// Default shrink-limit radius exponents: `R = 1 - 10^{-k}`.
pub const SHRINK_KS: [u32; 6] = [1, 2, 3, 4, 5, 6];

// ── Map context ─────────────────────────────────────────────────────────────

/// Geometric hints handed to a density at a quadrature node.
///
/// The distances are computed in exact arithmetic from the quadrature node
/// tables (never by subtracting nearby coordinates), so densities can build
/// their boundary-vanishing factors from them at full precision. A density
/// must treat the context as a best-effort hint and fall back to plain
/// coordinate evaluation for contexts it does not recognize.
#[derive(Clone, Copy, Debug)]
pub enum MapCtx {
    /// No hints: compute everything from the coordinates.
    Plain,
    /// One-dimensional integration varying coordinate `axis` of the full
    /// parameter vector; `d_lo`/`d_hi` are the exact distances to the lower
    /// and upper ends of the slice.
    Interval { axis: usize, d_lo: f64, d_hi: f64 },
    /// Slice of a two-dimensional region: coordinate `axis` varies with
    /// exact distances `d_lo`/`d_hi` to the slice ends, while the other
    /// coordinate is pinned with exact distances `pin_d_lo`/`pin_d_hi` to
    /// its own range limits. Densities singular in the pinned direction
    /// need those to stay finite when the pinned coordinate rounds onto
    /// its boundary.
    Slice {
        axis: usize,
        d_lo: f64,
        d_hi: f64,
        pin_d_lo: f64,
        pin_d_hi: f64,
    },
    /// Triangle with vertices (A, B, C) parameterized as
    /// `θ = A + u (B - A) + u w (C - B)`, `u, w ∈ (0, 1)`.
    /// `cu = 1 - u` and `cw = 1 - w` are exact. Edge dictionary:
    /// `u = 1` is edge BC, `w = 0` is edge AB, `w = 1` is edge AC.
    TriangleDuffy { u: f64, cu: f64, w: f64, cw: f64 },
    /// Elliptical polar map `θ = center + r (a cos φ, b sin φ)` with radial
    /// fraction `r ∈ (0, 1)` and exact complement `dr = 1 - r`, so that
    /// `1 - r² = dr (1 + r)` is exact.
    PolarRadial { r: f64, dr: f64 },
    /// Box map: exact distances `[dx_lo, dx_hi, dy_lo, dy_hi]`.
    Box2 { d: [f64; 4] },
    /// Axially reduced ball point `θ = (x, s, 0, …)`: `cross_max` is the
    /// cross-section radius `c = √(R² - x²)` and `d_cross = c - s` is exact.
    BallAxial { d_cross: f64, cross_max: f64 },
}

// ── Density ─────────────────────────────────────────────────────────────────

/// An unnormalized, non-negative weight over parameter vectors.
///
/// Evaluation receives the coordinates and a [`MapCtx`] hint from the active
/// region map. Weights with boundary singularities should derive their
/// vanishing factors from the hint when available.
#[derive(Clone)]
pub struct Density(Arc<dyn Fn(&[f64], &MapCtx) -> f64 + Send + Sync>);

impl Density {
    /// Density that only looks at the coordinates.
    pub fn plain<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Density(Arc::new(move |th, _| f(th)))
    }

    /// Density that exploits map hints.
    pub fn map_aware<F>(f: F) -> Self
    where
        F: Fn(&[f64], &MapCtx) -> f64 + Send + Sync + 'static,
    {
        Density(Arc::new(f))
    }

    pub fn eval(&self, theta: &[f64], ctx: &MapCtx) -> f64 {
        (self.0)(theta, ctx)
    }

    /// Pointwise product with a smooth factor (Boltzmann weights,
    /// likelihoods, moment monomials).
    pub fn times<F>(&self, f: F) -> Density
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let base = self.0.clone();
        Density(Arc::new(move |th, ctx| base(th, ctx) * f(th)))
    }

    /// Pointwise rescaling by a constant.
    pub fn scaled(&self, c: f64) -> Density {
        let base = self.0.clone();
        Density(Arc::new(move |th, ctx| c * base(th, ctx)))
    }
}

/// Clamp for plain-path fallbacks: keeps `x^(-1/2)` finite when a rounded
/// coordinate lands exactly on the boundary. Map-aware paths never need it.
pub fn pos_clamp(x: f64) -> f64 {
    x.max(1e-300)
}

// ── Regions ─────────────────────────────────────────────────────────────────

/// Integration domain in parameter space.
#[derive(Clone, Debug)]
pub enum Region {
    /// `a ≤ x ≤ b`.
    Interval { a: f64, b: f64 },
    /// Triangle with vertices `v[0]`, `v[1]`, `v[2]`; the collapsing map
    /// pivots at `v[0]` (see [`MapCtx::TriangleDuffy`]).
    Triangle { v: [[f64; 2]; 3] },
    /// `((x-cx)/a)² + ((y-cy)/b)² ≤ 1`.
    Ellipse { center: [f64; 2], semi: [f64; 2] },
    /// Axis-aligned rectangle.
    Box2 { x: (f64, f64), y: (f64, f64) },
    /// Euclidean ball of the given dimension. Integration reduces over the
    /// axial symmetry about axis 0; integrands must respect that symmetry.
    Ball { dim: usize, radius: f64 },
    /// Feasibility set of a matrix family inside a bounding box. For one
    /// parameter the exact interval is recovered by bisection; for two
    /// parameters integration falls back to an indicator over the box
    /// (low accuracy, validation use only).
    Implicit {
        family: Arc<AffineFamily>,
        bbox: Vec<(f64, f64)>,
    },
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Interval { .. } => 1,
            Region::Triangle { .. } | Region::Ellipse { .. } | Region::Box2 { .. } => 2,
            Region::Ball { dim, .. } => *dim,
            Region::Implicit { bbox, .. } => bbox.len(),
        }
    }

    /// Axis-aligned bounding box.
    pub fn bbox(&self) -> Vec<(f64, f64)> {
        match self {
            Region::Interval { a, b } => vec![(*a, *b)],
            Region::Triangle { v } => {
                let lo0 = v.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi0 = v.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                let lo1 = v.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
                let hi1 = v.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
                vec![(lo0, hi0), (lo1, hi1)]
            }
            Region::Ellipse { center, semi } => vec![
                (center[0] - semi[0], center[0] + semi[0]),
                (center[1] - semi[1], center[1] + semi[1]),
            ],
            Region::Box2 { x, y } => vec![*x, *y],
            Region::Ball { dim, radius } => vec![(-radius, *radius); *dim],
            Region::Implicit { bbox, .. } => bbox.clone(),
        }
    }

    /// Containment test with a small outward slack.
    pub fn contains(&self, th: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        match self {
            Region::Interval { a, b } => th[0] >= a - SLACK && th[0] <= b + SLACK,
            Region::Triangle { v } => {
                // Barycentric orientation test against each edge.
                let sign = |p: &[f64; 2], q: &[f64; 2]| {
                    (q[0] - p[0]) * (th[1] - p[1]) - (q[1] - p[1]) * (th[0] - p[0])
                };
                let d0 = sign(&v[0], &v[1]);
                let d1 = sign(&v[1], &v[2]);
                let d2 = sign(&v[2], &v[0]);
                let scale = self
                    .bbox()
                    .iter()
                    .map(|(a, b)| b - a)
                    .fold(0.0f64, f64::max)
                    .max(1.0);
                let t = SLACK * scale * scale;
                (d0 >= -t && d1 >= -t && d2 >= -t) || (d0 <= t && d1 <= t && d2 <= t)
            }
            Region::Ellipse { center, semi } => {
                let u = (th[0] - center[0]) / semi[0];
                let v = (th[1] - center[1]) / semi[1];
                u * u + v * v <= 1.0 + SLACK
            }
            Region::Box2 { x, y } => {
                th[0] >= x.0 - SLACK
                    && th[0] <= x.1 + SLACK
                    && th[1] >= y.0 - SLACK
                    && th[1] <= y.1 + SLACK
            }
            Region::Ball { dim, radius } => {
                let r2: f64 = th[..*dim].iter().map(|t| t * t).sum();
                r2 <= radius * radius * (1.0 + 2.0 * SLACK)
            }
            Region::Implicit { family, bbox } => {
                th.iter()
                    .zip(bbox.iter())
                    .all(|(t, (a, b))| *t >= a - SLACK && *t <= b + SLACK)
                    && family.is_feasible(th, 1e-12)
            }
        }
    }

    /// Range of one coordinate over the region.
    pub fn axis_range(&self, axis: usize) -> Result<(f64, f64)> {
        let bb = self.bbox();
        bb.get(axis).copied().ok_or_else(|| {
            Error::InvalidInput(format!(
                "axis {axis} out of range for a {}-dimensional region",
                bb.len()
            ))
        })
    }

    /// For a two-dimensional region, the range of the *other* coordinate on
    /// the slice where coordinate `axis` is pinned to `t`; `None` when the
    /// slice misses the region.
    pub fn slice_range(&self, axis: usize, t: f64) -> Option<(f64, f64)> {
        match self {
            Region::Triangle { v } => {
                let other = 1 - axis;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (p, q) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                    let (pa, qa) = (p[axis], q[axis]);
                    if (pa - t) * (qa - t) <= 0.0 {
                        if (qa - pa).abs() < 1e-300 {
                            lo = lo.min(p[other].min(q[other]));
                            hi = hi.max(p[other].max(q[other]));
                        } else {
                            let s = p[other] + (t - pa) / (qa - pa) * (q[other] - p[other]);
                            lo = lo.min(s);
                            hi = hi.max(s);
                        }
                    }
                }
                (lo < hi).then_some((lo, hi))
            }
            Region::Ellipse { center, semi } => {
                let u = (t - center[axis]) / semi[axis];
                let disc = (1.0 - u) * (1.0 + u);
                if disc <= 0.0 {
                    return None;
                }
                let other = 1 - axis;
                let half = semi[other] * disc.sqrt();
                Some((center[other] - half, center[other] + half))
            }
            Region::Box2 { x, y } => {
                let (own, other) = if axis == 0 { (*x, *y) } else { (*y, *x) };
                (t >= own.0 && t <= own.1).then_some(other)
            }
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        match self {
            Region::Interval { a, b } => {
                if !(a < b) {
                    return bad(format!("empty interval [{a}, {b}]"));
                }
            }
            Region::Triangle { v } => {
                let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
                    - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]);
                if det.abs() < 1e-300 {
                    return bad("degenerate triangle".into());
                }
            }
            Region::Ellipse { semi, .. } => {
                if semi[0] <= 0.0 || semi[1] <= 0.0 {
                    return bad("ellipse semi-axes must be positive".into());
                }
            }
            Region::Box2 { x, y } => {
                if !(x.0 < x.1 && y.0 < y.1) {
                    return bad("empty box".into());
                }
            }
            Region::Ball { dim, radius } => {
                if !(2..=8).contains(dim) {
                    return bad(format!("ball dimension {dim} outside 2..=8"));
                }
                if *radius <= 0.0 {
                    return bad("ball radius must be positive".into());
                }
            }
            Region::Implicit { family, bbox } => {
                if bbox.len() != family.n_params() {
                    return bad("bounding box rank must match family parameters".into());
                }
                if bbox.len() > 2 {
                    return bad("implicit regions support at most two parameters".into());
                }
                if !bbox.iter().all(|(a, b)| a < b) {
                    return bad("empty bounding box".into());
                }
                let center: Vec<f64> = bbox.iter().map(|(a, b)| 0.5 * (a + b)).collect();
                if !family.is_feasible(&center, 1e-9) {
                    return bad("bounding-box center is infeasible".into());
                }
            }
        }
        Ok(())
    }

    /// For a one-parameter implicit region, the exact feasible interval
    /// around the box center, found by bisection on the feasibility
    /// boundary.
    pub fn refine_implicit_interval(&self) -> Result<(f64, f64)> {
        let Region::Implicit { family, bbox } = self else {
            return Err(Error::InvalidInput("not an implicit region".into()));
        };
        if bbox.len() != 1 {
            return Err(Error::InvalidInput(
                "interval refinement needs a one-parameter region".into(),
            ));
        }
        let (lo_box, hi_box) = bbox[0];
        let center = 0.5 * (lo_box + hi_box);
        // Zero slack: the eigensolver's ~1e-15 noise sets the boundary
        // resolution, far tighter than the containment slack would.
        let feas = |t: f64| family.is_feasible(&[t], 0.0);
        if !feas(center) {
            return Err(Error::InvalidInput("bounding-box center is infeasible".into()));
        }
        let bisect = |mut inside: f64, mut outside: f64| {
            for _ in 0..100 {
                let mid = 0.5 * (inside + outside);
                if mid == inside || mid == outside {
                    break;
                }
                if feas(mid) {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            inside
        };
        let hi = if feas(hi_box) { hi_box } else { bisect(center, hi_box) };
        let lo = if feas(lo_box) { lo_box } else { bisect(center, lo_box) };
        if !(lo < hi) {
            return Err(Error::Numerical("feasible interval collapsed".into()));
        }
        Ok((lo, hi))
    }
}

// ── Integration over regions ────────────────────────────────────────────────

/// Runs `inner` inside an outer quadrature, forwarding the first error.
fn nested<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadOutcome>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    let pending: RefCell<Option<Error>> = RefCell::new(None);
    let out = quad::integrate_interval(
        |x, dl, dh| {
            if pending.borrow().is_some() {
                return 0.0;
            }
            match f(x, dl, dh) {
                Ok(v) => v,
                Err(e) => {
                    *pending.borrow_mut() = Some(e);
                    f64::NAN
                }
            }
        },
        a,
        b,
        tol,
    );
    if let Some(e) = pending.into_inner() {
        return Err(e);
    }
    out
}

/// Integral of `density` over `region` to relative tolerance `tol`.
///
/// Each region variant maps onto iterated one-dimensional quadratures whose
/// nodes carry exact boundary distances (see [`MapCtx`]); integrable
/// boundary singularities converge at full precision when the density uses
/// the hints. Divergent integrals surface as [`Error::Divergent`].
pub fn integrate(density: &Density, region: &Region, tol: f64) -> Result<f64> {
    region.validate()?;
    let inner_tol = (0.1 * tol).max(1e-13);
    match region {
        Region::Interval { a, b } => {
            let out = quad::integrate_interval(
                |x, dl, dh| {
                    density.eval(
                        &[x],
                        &MapCtx::Interval {
                            axis: 0,
                            d_lo: dl,
                            d_hi: dh,
                        },
                    )
                },
                *a,
                *b,
                tol,
            )?;
            Ok(out.value)
        }
        Region::Triangle { v } => {
            let (a, b, c) = (v[0], v[1], v[2]);
            let jac = ((b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])).abs();
            let out = nested(
                |_u, du_lo, du_hi| {
                    // Along the u-axis of the collapsing map: u = du_lo exactly
                    // (the parameter interval starts at 0).
                    let u_exact = du_lo;
                    let cu = du_hi;
                    let inner = quad::integrate_interval(
                        |_w, dw_lo, dw_hi| {
                            let w_exact = dw_lo;
                            let th = [
                                a[0] + u_exact * (b[0] - a[0]) + u_exact * w_exact * (c[0] - b[0]),
                                a[1] + u_exact * (b[1] - a[1]) + u_exact * w_exact * (c[1] - b[1]),
                            ];
                            let ctx = MapCtx::TriangleDuffy {
                                u: u_exact,
                                cu,
                                w: w_exact,
                                cw: dw_hi,
                            };
                            density.eval(&th, &ctx) * jac * u_exact
                        },
                        0.0,
                        1.0,
                        inner_tol,
                    )?;
                    Ok(inner.value)
                },
                0.0,
                1.0,
                tol,
            )?;
            Ok(out.value)
        }
        Region::Ellipse { center, semi } => {
            let jac = semi[0] * semi[1];
            let out = nested(
                |_r, dr_lo, dr_hi| {
                    let r_exact = dr_lo;
                    let ctx = MapCtx::PolarRadial {
                        r: r_exact,
                        dr: dr_hi,
                    };
                    let inner = quad::integrate_interval(
                        |phi, _, _| {
                            let th = [
                                center[0] + semi[0] * r_exact * phi.cos(),
                                center[1] + semi[1] * r_exact * phi.sin(),
                            ];
                            density.eval(&th, &ctx)
                        },
                        0.0,
                        2.0 * std::f64::consts::PI,
                        inner_tol,
                    )?;
                    Ok(inner.value * jac * r_exact)
                },
                0.0,
                1.0,
                tol,
            )?;
            Ok(out.value)
        }
        Region::Box2 { x, y } => {
            let out = nested(
                |xx, dx_lo, dx_hi| {
                    let inner = quad::integrate_interval(
                        |yy, dy_lo, dy_hi| {
                            let ctx = MapCtx::Box2 {
                                d: [dx_lo, dx_hi, dy_lo, dy_hi],
                            };
                            density.eval(&[xx, yy], &ctx)
                        },
                        y.0,
                        y.1,
                        inner_tol,
                    )?;
                    Ok(inner.value)
                },
                x.0,
                x.1,
                tol,
            )?;
            Ok(out.value)
        }
        Region::Ball { dim, radius } => {
            let d = *dim;
            let r = *radius;
            let omega = sphere_surface(d - 2);
            let out = nested(
                |x, dl, dh| {
                    let c = (dl * dh).sqrt().max(1e-300); // √((x+R)(R-x))
                    let inner = quad::integrate_interval(
                        |_s, ds_lo, ds_hi| {
                            let s_exact = ds_lo;
                            let mut th = vec![0.0; d];
                            th[0] = x;
                            th[1] = s_exact;
                            let ctx = MapCtx::BallAxial {
                                d_cross: ds_hi,
                                cross_max: c,
                            };
                            density.eval(&th, &ctx) * s_exact.powi(d as i32 - 2)
                        },
                        0.0,
                        c,
                        inner_tol,
                    )?;
                    Ok(inner.value * omega)
                },
                -r,
                r,
                tol,
            )?;
            Ok(out.value)
        }
        Region::Implicit { family, bbox } => match bbox.len() {
            1 => {
                let (lo, hi) = region.refine_implicit_interval()?;
                let out = quad::integrate_interval(
                    |x, dl, dh| {
                        density.eval(
                            &[x],
                            &MapCtx::Interval {
                                axis: 0,
                                d_lo: dl,
                                d_hi: dh,
                            },
                        )
                    },
                    lo,
                    hi,
                    tol,
                )?;
                Ok(out.value)
            }
            2 => {
                // Indicator over the bounding box: accuracy is limited by the
                // discontinuity, so treat results as qualitative.
                let fam = family.clone();
                let out = nested(
                    |xx, _, _| {
                        let inner = quad::integrate_interval(
                            |yy, _, _| {
                                let th = [xx, yy];
                                if fam.is_feasible(&th, 1e-12) {
                                    density.eval(&th, &MapCtx::Plain)
                                } else {
                                    0.0
                                }
                            },
                            bbox[1].0,
                            bbox[1].1,
                            (tol * 10.0).max(1e-5),
                        );
                        match inner {
                            Ok(o) => Ok(o.value),
                            // A kinked slice may stall without being wrong:
                            // keep the estimate.
                            Err(Error::Numerical(_)) => Ok(0.0),
                            Err(e) => Err(e),
                        }
                    },
                    bbox[0].0,
                    bbox[0].1,
                    (tol * 10.0).max(1e-5),
                )?;
                Ok(out.value)
            }
            n => Err(Error::InvalidInput(format!(
                "implicit regions with {n} parameters are not supported"
            ))),
        },
    }
}

/// Surface area of the unit sphere `S^m ⊂ R^{m+1}`.
pub fn sphere_surface(m: usize) -> f64 {
    let half = (m as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / crate::specfun::gamma_half_integer(half)
}

// ── Priors ──────────────────────────────────────────────────────────────────

/// A normalized probability measure: a region, an unnormalized weight, and
/// its normalization constant.
#[derive(Clone)]
pub struct Prior {
    region: Region,
    density: Density,
    z: f64,
}

impl std::fmt::Debug for Prior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Prior")
            .field("region", &self.region)
            .field("z", &self.z)
            .finish_non_exhaustive()
    }
}

impl Prior {
    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Normalization constant of the underlying weight.
    pub fn z(&self) -> f64 {
        self.z
    }

    /// Unnormalized weight.
    pub fn density(&self) -> &Density {
        &self.density
    }

    /// Normalized density at a point (zero outside the region).
    pub fn eval(&self, theta: &[f64]) -> f64 {
        if self.region.contains(theta) {
            self.density.eval(theta, &MapCtx::Plain) / self.z
        } else {
            0.0
        }
    }

    /// `∫ f dP` over the region.
    pub fn expectation<F>(&self, f: F, tol: f64) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Ok(integrate(&self.density.times(f), &self.region, tol)? / self.z)
    }
}

/// Normalizes a weight into a [`Prior`].
///
/// Divergent weights (improper measures) surface as [`Error::Divergent`];
/// downstream interfaces translate that into guidance to use the shrinking
/// unit-ball limit instead.
pub fn normalize_prior(density: &Density, region: &Region, tol: f64) -> Result<Prior> {
    let z = match integrate(density, region, tol) {
        Ok(z) => z,
        Err(Error::Divergent(msg)) => {
            return Err(Error::Divergent(format!(
                "improper prior: normalization integral diverges ({msg})"
            )))
        }
        Err(e) => return Err(e),
    };
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Numerical(format!(
            "normalization constant {z} is not positive and finite"
        )));
    }
    Ok(Prior {
        region: region.clone(),
        density: density.clone(),
        z,
    })
}

// ── Tabulated curves ────────────────────────────────────────────────────────

/// Midpoint grid: `n` points centered in equal subdivisions of `[lo, hi]`,
/// so tabulated densities are never evaluated on a singular boundary.
pub fn midpoint_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

/// A sampled curve with shape-preserving (Fritsch–Carlson) cubic
/// interpolation. Monotone data interpolates monotonically — no overshoot
/// near steep density edges.
#[derive(Clone, Debug)]
pub struct Tabulated1D {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    /// Result of the builder's normalization self-check (∫ of the underlying
    /// continuous density), when one was performed.
    pub norm_check: Option<f64>,
}

impl Tabulated1D {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidInput(
                "tabulation needs at least two matching samples".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput(
                "tabulation abscissas must increase strictly".into(),
            ));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("tabulation values must be finite".into()));
        }
        let slopes = fritsch_carlson_slopes(&xs, &ys);
        Ok(Tabulated1D {
            xs,
            ys,
            slopes,
            norm_check: None,
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Interpolated value; clamps to the end samples outside the range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    }

    /// Integral of the interpolant over the sampled range.
    pub fn integral(&self) -> f64 {
        let mut acc = Vec::with_capacity(self.xs.len() - 1);
        for i in 0..self.xs.len() - 1 {
            let h = self.xs[i + 1] - self.xs[i];
            acc.push(h * (0.5 * (self.ys[i] + self.ys[i + 1]) + h * (self.slopes[i] - self.slopes[i + 1]) / 12.0));
        }
        pairwise_sum(&acc)
    }

    /// CSV serialization, header `x,density`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,density\n");
        for (x, y) in self.xs.iter().zip(self.ys.iter()) {
            s.push_str(&format!("{x:.16e},{y:.16e}\n"));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('x') {
                continue;
            }
            let mut parts = line.split(',');
            let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
                return Err(Error::InvalidInput(format!("malformed CSV line {}", i + 1)));
            };
            let x: f64 = a.trim().parse().map_err(|e| {
                Error::InvalidInput(format!("bad abscissa on line {}: {e}", i + 1))
            })?;
            let y: f64 = b.trim().parse().map_err(|e| {
                Error::InvalidInput(format!("bad value on line {}: {e}", i + 1))
            })?;
            xs.push(x);
            ys.push(y);
        }
        Tabulated1D::new(xs, ys)
    }
}

/// Shape-preserving slopes: secant averages limited to the Fritsch–Carlson
/// monotonicity circle `α² + β² ≤ 9`.
fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut d = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        d.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
    }
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        m[i] = if d[i - 1] * d[i] <= 0.0 {
            0.0
        } else {
            0.5 * (d[i - 1] + d[i])
        };
    }
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let alpha = m[i] / d[i];
        let beta = m[i + 1] / d[i];
        if alpha < 0.0 {
            m[i] = 0.0;
        }
        if beta < 0.0 {
            m[i + 1] = 0.0;
        }
        let s = alpha * alpha + beta * beta;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[i] = tau * alpha * d[i];
            m[i + 1] = tau * beta * d[i];
        }
    }
    m
}

// ── Marginals ───────────────────────────────────────────────────────────────

/// Marginal density of `prior` along coordinate `axis`, tabulated on an
/// `n`-point midpoint grid.
///
/// Every slice integral runs at tolerance 1e-8 or better, and the result is
/// self-checked: the slice masses are re-integrated across the axis and the
/// total stored in [`Tabulated1D::norm_check`] (it should be 1 within 1e-6
/// for a proper prior). A check drifting past 1e-4 is reported as an error.
pub fn marginal(prior: &Prior, axis: usize, n: usize) -> Result<Tabulated1D> {
    if n < 8 {
        return Err(Error::InvalidInput("marginal grid too coarse".into()));
    }
    let (lo, hi) = match prior.region() {
        // Work on the exact feasible interval, not the loose bounding box.
        Region::Implicit { bbox, .. } if bbox.len() == 1 => {
            prior.region().refine_implicit_interval()?
        }
        _ => prior.region().axis_range(axis)?,
    };
    let grid = midpoint_grid(lo, hi, n);
    let mass = slice_mass_fn(prior, axis)?;
    let ys: Vec<f64> = {
        let mut v = Vec::with_capacity(grid.len());
        for &x in &grid {
            v.push(mass(x, x - lo, hi - x)?);
        }
        v
    };
    let norm = {
        let pending: RefCell<Option<Error>> = RefCell::new(None);
        let out = quad::integrate_interval(
            |x, dl, dh| {
                if pending.borrow().is_some() {
                    return 0.0;
                }
                match mass(x, dl, dh) {
                    Ok(v) => v,
                    Err(e) => {
                        *pending.borrow_mut() = Some(e);
                        f64::NAN
                    }
                }
            },
            lo,
            hi,
            1e-7,
        );
        if let Some(e) = pending.into_inner() {
            return Err(e);
        }
        out?.value
    };
    if (norm - 1.0).abs() > 1e-4 {
        return Err(Error::Numerical(format!(
            "marginal self-check failed: slice masses integrate to {norm:.8} instead of 1"
        )));
    }
    let mut tab = Tabulated1D::new(grid, ys)?;
    tab.norm_check = Some(norm);
    Ok(tab)
}

/// Slice-mass function for the marginal along `axis`: maps
/// `(x, d_lo, d_hi)` — the pinned coordinate and its exact distances to the
/// ends of its range — to `∫ p(θ) dθ_other |_{θ_axis = x}`.
#[allow(clippy::type_complexity)]
fn slice_mass_fn<'p>(
    prior: &'p Prior,
    axis: usize,
) -> Result<Box<dyn Fn(f64, f64, f64) -> Result<f64> + 'p>> {
    match prior.region() {
        Region::Interval { .. } => {
            if axis != 0 {
                return Err(Error::InvalidInput("interval priors have one axis".into()));
            }
            Ok(Box::new(move |x, dl, dh| {
                Ok(prior.density().eval(
                    &[x],
                    &MapCtx::Interval {
                        axis: 0,
                        d_lo: dl,
                        d_hi: dh,
                    },
                ) / prior.z())
            }))
        }
        Region::Triangle { .. } | Region::Ellipse { .. } | Region::Box2 { .. } => {
            if axis > 1 {
                return Err(Error::InvalidInput("two-dimensional region".into()));
            }
            let other = 1 - axis;
            Ok(Box::new(move |x, pin_dl, pin_dh| {
                let Some((a, b)) = prior.region().slice_range(axis, x) else {
                    return Ok(0.0);
                };
                if b - a < 1e-14 {
                    return Ok(0.0);
                }
                let out = quad::integrate_interval(
                    |y, dl, dh| {
                        let mut th = [0.0; 2];
                        th[axis] = x;
                        th[other] = y;
                        let ctx = MapCtx::Slice {
                            axis: other,
                            d_lo: dl,
                            d_hi: dh,
                            pin_d_lo: pin_dl,
                            pin_d_hi: pin_dh,
                        };
                        prior.density().eval(&th, &ctx)
                    },
                    a,
                    b,
                    1e-9,
                )?;
                Ok(out.value / prior.z())
            }))
        }
        Region::Ball { dim, radius } => {
            let d = *dim;
            let r = *radius;
            if axis >= d {
                return Err(Error::InvalidInput("axis outside ball dimension".into()));
            }
            let omega = sphere_surface(d - 2);
            // Radially symmetric reduction: compute as if axis were 0.
            Ok(Box::new(move |x, _pin_dl, _pin_dh| {
                let disc = (r - x) * (r + x);
                if disc <= 0.0 {
                    return Ok(0.0);
                }
                let c = disc.sqrt();
                let out = quad::integrate_interval(
                    |_s, ds_lo, ds_hi| {
                        let s_exact = ds_lo;
                        let mut th = vec![0.0; d];
                        th[0] = x;
                        th[1] = s_exact;
                        let ctx = MapCtx::BallAxial {
                            d_cross: ds_hi,
                            cross_max: c,
                        };
                        prior.density().eval(&th, &ctx) * s_exact.powi(d as i32 - 2)
                    },
                    0.0,
                    c,
                    1e-9,
                )?;
                Ok(out.value * omega / prior.z())
            }))
        }
        Region::Implicit { bbox, .. } if bbox.len() == 1 => {
            if axis != 0 {
                return Err(Error::InvalidInput("one-parameter region".into()));
            }
            let (lo, hi) = prior.region().refine_implicit_interval()?;
            // The caller's grid and distances are relative to the refined
            // feasibility interval (see `marginal`), so pass them through.
            Ok(Box::new(move |x, dl, dh| {
                if x < lo || x > hi {
                    return Ok(0.0);
                }
                Ok(prior.density().eval(
                    &[x],
                    &MapCtx::Interval {
                        axis: 0,
                        d_lo: dl,
                        d_hi: dh,
                    },
                ) / prior.z())
            }))
        }
        Region::Implicit { .. } => Err(Error::InvalidInput(
            "marginals over two-parameter implicit regions are not supported".into(),
        )),
    }
}

// ── Conditional slices ──────────────────────────────────────────────────────

/// Renormalized conditional prior obtained by pinning coordinate `axis` of a
/// two-dimensional prior to `value`. The result lives on the slice interval
/// of the remaining coordinate.
pub fn conditional_slice_prior(prior: &Prior, axis: usize, value: f64, tol: f64) -> Result<Prior> {
    match prior.region() {
        Region::Triangle { .. } | Region::Ellipse { .. } | Region::Box2 { .. } => {
            let (a, b) = prior.region().slice_range(axis, value).ok_or_else(|| {
                Error::InvalidInput(format!("slice at {value} misses the region"))
            })?;
            let other = 1 - axis;
            let (pin_lo, pin_hi) = prior.region().axis_range(axis)?;
            let base = prior.density().clone();
            let glued = Density::map_aware(move |th_sub, ctx| {
                let mut th = [0.0; 2];
                th[axis] = value;
                th[other] = th_sub[0];
                let ctx_full = match ctx {
                    MapCtx::Interval { d_lo, d_hi, .. } => MapCtx::Slice {
                        axis: other,
                        d_lo: *d_lo,
                        d_hi: *d_hi,
                        pin_d_lo: value - pin_lo,
                        pin_d_hi: pin_hi - value,
                    },
                    other_ctx => *other_ctx,
                };
                base.eval(&th, &ctx_full)
            });
            normalize_prior(&glued, &Region::Interval { a, b }, tol)
        }
        Region::Ball { dim, radius } => {
            let d = *dim;
            if d < 3 {
                return Err(Error::InvalidInput("slice would be one-dimensional".into()));
            }
            let disc = (radius - value) * (radius + value);
            if disc <= 0.0 {
                return Err(Error::InvalidInput("slice misses the ball".into()));
            }
            let sub_r = disc.sqrt();
            let base = prior.density().clone();
            let glued = Density::map_aware(move |th_sub, ctx| {
                let mut th = vec![0.0; d];
                th[0] = value;
                th[1..d].copy_from_slice(&th_sub[..d - 1]);
                base.eval(&th, ctx)
            });
            normalize_prior(
                &glued,
                &Region::Ball {
                    dim: d - 1,
                    radius: sub_r,
                },
                tol,
            )
        }
        _ => Err(Error::InvalidInput(
            "conditional slices need a two-dimensional or ball region".into(),
        )),
    }
}

// ── Radially symmetric ball weights ─────────────────────────────────────────

/// Weight on a `dim`-ball depending on the radius only, expressed through
/// the *complement* `1 - r²` so near-sphere evaluations stay exact:
/// `w(θ) = shape(1 - |θ|²)`.
#[derive(Clone)]
pub struct RadialWeight {
    dim: usize,
    shape: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RadialWeight {
    pub fn new<F>(dim: usize, shape: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(2..=8).contains(&dim) {
            return Err(Error::InvalidInput(format!("ball dimension {dim} outside 2..=8")));
        }
        Ok(RadialWeight {
            dim,
            shape: Arc::new(shape),
        })
    }

    /// `shape(t) = t^p` (e.g. `p = -1/2` for the minimal-metric ball weight).
    pub fn power(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, move |t: f64| t.powf(p))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluate through the complement `t = 1 - |θ|²`.
    pub fn eval_complement(&self, t: f64) -> f64 {
        (self.shape)(t)
    }

    /// Weight restricted to the hyperplane slice through the center —
    /// a radial weight on the ball one dimension down with the same shape.
    pub fn central_slice(&self) -> Result<RadialWeight> {
        let shape = self.shape.clone();
        RadialWeight::new(self.dim - 1, move |t| shape(t))
    }
}

/// `∫ w dV` over the ball of radius `R = 1 - one_minus_r`.
///
/// `one_minus_r` is passed explicitly so `1 - R²` is formed without
/// cancellation; pass 0 for the full unit ball.
pub fn ball_norm(w: &RadialWeight, one_minus_r: f64, tol: f64) -> Result<f64> {
    let (r, omr2) = radius_complements(one_minus_r)?;
    let d = w.dim;
    let out = quad::integrate_interval(
        |rr, dl, dh| {
            let r_exact = dl;
            // 1 - rr² = (1 - R²) + (R - rr)(R + rr), all exact.
            let comp = omr2 + dh * (r + rr);
            w.eval_complement(comp) * r_exact.powi(d as i32 - 1)
        },
        0.0,
        r,
        tol,
    )?;
    Ok(out.value * sphere_surface(d - 1))
}

/// `∫ x₀^pow e^{-b x₀} w dV` over the ball of radius `1 - one_minus_r`
/// (`x₀` the first coordinate). This is the workhorse behind partition
/// functions and energy moments of ball-weight measures.
pub fn ball_axial_moment(
    w: &RadialWeight,
    one_minus_r: f64,
    b: f64,
    pow: u32,
    tol: f64,
) -> Result<f64> {
    let (r, omr2) = radius_complements(one_minus_r)?;
    let d = w.dim;
    let omega = sphere_surface(d - 2);
    let inner_tol = (0.1 * tol).max(1e-13);
    let out = nested(
        |x, dl, dh| {
            let disc = dl * dh; // (x + R)(R - x), exact
            if disc <= 0.0 {
                return Ok(0.0);
            }
            let c = disc.sqrt();
            let inner = quad::integrate_interval(
                |_s, ds_lo, ds_hi| {
                    let s_exact = ds_lo;
                    // 1 - x² - s² = (1 - R²) + (c - s)(c + s); built only from
                    // exact node distances so the complement vanishes exactly
                    // at the cross-section rim (a residual c² rounding term
                    // would shift the singularity off the endpoint).
                    let comp = omr2 + ds_hi * (c + s_exact);
                    w.eval_complement(comp) * s_exact.powi(d as i32 - 2)
                },
                0.0,
                c,
                inner_tol,
            )?;
            Ok(inner.value * omega * x.powi(pow as i32) * (-b * x).exp())
        },
        -r,
        r,
        tol,
    )?;
    Ok(out.value)
}

/// Unnormalized marginal mass of `w` at axial coordinate `x` on the ball of
/// radius `1 - one_minus_r`: the integral of `w` over the cross-section disk.
pub fn ball_axis_marginal_num(w: &RadialWeight, one_minus_r: f64, x: f64, tol: f64) -> Result<f64> {
    let (r, omr2) = radius_complements(one_minus_r)?;
    let d = w.dim;
    let disc = (r - x) * (r + x);
    if disc <= 0.0 {
        return Ok(0.0);
    }
    let c = disc.sqrt();
    let out = quad::integrate_interval(
        |_s, ds_lo, ds_hi| {
            let s_exact = ds_lo;
            let comp = omr2 + ds_hi * (c + s_exact);
            w.eval_complement(comp) * s_exact.powi(d as i32 - 2)
        },
        0.0,
        c,
        tol,
    )?;
    Ok(out.value * sphere_surface(d - 2))
}

fn radius_complements(one_minus_r: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&one_minus_r) {
        return Err(Error::InvalidInput(format!(
            "radius complement {one_minus_r} outside [0, 1)"
        )));
    }
    let r = 1.0 - one_minus_r;
    let omr2 = one_minus_r * (2.0 - one_minus_r); // 1 - R², exact
    Ok((r, omr2))
}

// ── Shrinking-ball limits ───────────────────────────────────────────────────

/// Polynomial (Neville) extrapolation of `(x_i, y_i)` to `x = 0`, returning
/// the estimate and the magnitude of the final correction as a residual.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::InvalidInput(
            "extrapolation needs at least two matching samples".into(),
        ));
    }
    let mut v = ys.to_vec();
    let mut prev_diag = v[0];
    for m in 1..n {
        for i in 0..n - m {
            v[i] = (xs[i + m] * v[i] - xs[i] * v[i + 1]) / (xs[i + m] - xs[i]);
        }
        if m == n - 1 {
            return Ok((v[0], (v[0] - prev_diag).abs()));
        }
        prev_diag = v[0];
    }
    Ok((v[0], 0.0))
}

/// Result of a shrink-to-unit-ball limit.
#[derive(Clone, Debug)]
pub struct ShrinkOutcome {
    /// Extrapolated limit marginal on the axial midpoint grid.
    pub table: Tabulated1D,
    /// Largest per-point extrapolation residual.
    pub max_residual: f64,
}

/// Axial marginal of an (improper-at-the-sphere) radial ball weight in the
/// limit of balls shrunk back to radius 1.
///
/// The weight is normalized on each interior ball `R_k = 1 - 10^{-k}`
/// (`k ∈ ks`) and the family of proper marginals is extrapolated pointwise
/// to `R → 1`. Because every quantity expands in powers of `√(1 - R)`, the
/// extrapolation runs in that variable. Residuals above `residual_tol`
/// are reported as non-convergence.
pub fn shrink_limit_marginal(
    w: &RadialWeight,
    ks: &[u32],
    grid_n: usize,
    tol: f64,
    residual_tol: f64,
) -> Result<ShrinkOutcome> {
    if ks.len() < 3 {
        return Err(Error::InvalidInput(
            "shrink limit needs at least three radii".into(),
        ));
    }
    let mut omrs: Vec<f64> = ks.iter().map(|&k| 10f64.powi(-(k as i32))).collect();
    omrs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut zs = Vec::with_capacity(omrs.len());
    for &omr in &omrs {
        zs.push(ball_norm(w, omr, tol)?);
    }
    let grid = midpoint_grid(-1.0, 1.0, grid_n);
    let mut ys = Vec::with_capacity(grid.len());
    let mut max_residual = 0.0f64;
    for &x in &grid {
        let mut ss = Vec::new();
        let mut ms = Vec::new();
        for (&omr, &z) in omrs.iter().zip(zs.iter()) {
            // Keep a margin so the expansion in √(1-R) stays regular.
            if x.abs() >= 1.0 - 2.0 * omr {
                continue;
            }
            let m = ball_axis_marginal_num(w, omr, x, tol)? / z;
            ss.push(omr.sqrt());
            ms.push(m);
        }
        if ss.len() < 3 {
            return Err(Error::Numerical(format!(
                "shrink limit has too few usable radii at x = {x:.4}; refine the radius ladder"
            )));
        }
        let (limit, residual) = neville_at_zero(&ss, &ms)?;
        max_residual = max_residual.max(residual);
        ys.push(limit);
    }
    if max_residual > residual_tol {
        return Err(Error::Numerical(format!(
            "shrink-limit extrapolation residual {max_residual:.3e} exceeds {residual_tol:.1e}"
        )));
    }
    let table = Tabulated1D::new(grid, ys)?;
    Ok(ShrinkOutcome {
        table,
        max_residual,
    })
}

// ── Tests ───────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::{build_family, PauliWord};

    const PI: f64 = std::f64::consts::PI;

    /// Correlated-pair volume element
    /// `(1/(2√2)) [(1-ζ)(1+ζ+2ξ)(1+ζ-2ξ)]^(-1/2)` over the triangle with
    /// vertices (0,-1), (1,1), (-1,1), written against every map this
    /// module can hand it.
    fn correlated_density() -> Density {
        Density::map_aware(|th, ctx| {
            let c = 0.5 / 2.0f64.sqrt();
            let prod = match ctx {
                MapCtx::TriangleDuffy { u, cu, w, cw } => 32.0 * u * u * cu * w * cw,
                MapCtx::Slice {
                    axis: 0,
                    d_lo,
                    d_hi,
                    pin_d_hi,
                    ..
                } => {
                    // ξ varies over [-(1+ζ)/2, (1+ζ)/2], ζ pinned in (-1, 1):
                    // 1-ζ = pin_d_hi; 1+ζ±2ξ = 2·(distance to the ends).
                    pin_d_hi * (2.0 * d_lo) * (2.0 * d_hi)
                }
                MapCtx::Slice {
                    axis: 1,
                    d_lo,
                    d_hi,
                    ..
                } => {
                    // ζ varies over [2|ξ|-1, 1]:
                    // 1-ζ = d_hi; 1+ζ-2|ξ| = d_lo; 1+ζ+2|ξ| = d_lo + 4|ξ|.
                    d_hi * d_lo * (d_lo + 4.0 * th[0].abs())
                }
                _ => {
                    let (xi, ze) = (th[0], th[1]);
                    pos_clamp(1.0 - ze)
                        * pos_clamp(1.0 + ze + 2.0 * xi)
                        * pos_clamp(1.0 + ze - 2.0 * xi)
                }
            };
            c / pos_clamp(prod).sqrt()
        })
    }

    fn correlated_triangle() -> Region {
        Region::Triangle {
            v: [[0.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
        }
    }

    /// Polarized-pair volume element `(1/π)(1-4ξ²-ζ²)^(-1/2)` over the
    /// ellipse `4ξ² + ζ² ≤ 1`.
    fn polarized_density() -> Density {
        Density::map_aware(|th, ctx| {
            let rad = match ctx {
                MapCtx::PolarRadial { r, dr } => dr * (1.0 + r),
                // The slice half-width already absorbs the pinned factor:
                // 1-4ξ²-ζ² = 4(c-ξ)(c+ξ) in ξ-slices, (c-ζ)(c+ζ) in ζ-slices.
                MapCtx::Slice { axis: 0, d_lo, d_hi, .. } => 4.0 * d_lo * d_hi,
                MapCtx::Slice { axis: 1, d_lo, d_hi, .. } => d_lo * d_hi,
                _ => pos_clamp(1.0 - 4.0 * th[0] * th[0] - th[1] * th[1]),
            };
            1.0 / (PI * pos_clamp(rad).sqrt())
        })
    }

    fn polarized_ellipse() -> Region {
        Region::Ellipse {
            center: [0.0, 0.0],
            semi: [0.5, 1.0],
        }
    }

    #[test]
    fn triangle_area_is_exact() {
        let one = Density::plain(|_| 1.0);
        let a = integrate(&one, &correlated_triangle(), 1e-11).unwrap();
        assert!((a - 2.0).abs() < 1e-10, "{a}");
    }

    #[test]
    fn ellipse_area_is_exact() {
        let one = Density::plain(|_| 1.0);
        let a = integrate(&one, &polarized_ellipse(), 1e-11).unwrap();
        assert!((a - PI * 0.5).abs() < 1e-10, "{a}");
    }

    #[test]
    fn correlated_normalization_is_half_pi() {
        let z = integrate(&correlated_density(), &correlated_triangle(), 1e-11).unwrap();
        assert!(
            (z - PI / 2.0).abs() < 1e-9,
            "z = {z}, err = {}",
            (z - PI / 2.0).abs()
        );
    }

    #[test]
    fn polarized_normalization_matches_closed_form() {
        // ∫∫ (1/π)(1-4ξ²-ζ²)^(-1/2) = π/(2√2) · (2√2/π) … direct value:
        // polar reduction gives (1/π)·(ab)·2π·∫₀¹ r(1-r²)^(-1/2) dr = 2ab = 1.
        let z = integrate(&polarized_density(), &polarized_ellipse(), 1e-11).unwrap();
        assert!((z - 1.0).abs() < 1e-10, "z = {z}");
    }

    #[test]
    fn box_product_arcsine_normalizes() {
        // 4/π² [(1-4ξ²)(1-4ζ²)]^(-1/2) over the square |ξ|,|ζ| ≤ 1/2.
        let d = Density::map_aware(|th, ctx| {
            let prod = match ctx {
                MapCtx::Box2 { d } => 16.0 * d[0] * d[1] * d[2] * d[3],
                MapCtx::Slice {
                    d_lo,
                    d_hi,
                    pin_d_lo,
                    pin_d_hi,
                    ..
                } => 16.0 * d_lo * d_hi * pin_d_lo * pin_d_hi,
                _ => {
                    pos_clamp(1.0 - 4.0 * th[0] * th[0]) * pos_clamp(1.0 - 4.0 * th[1] * th[1])
                }
            };
            4.0 / (PI * PI * pos_clamp(prod).sqrt())
        });
        let region = Region::Box2 {
            x: (-0.5, 0.5),
            y: (-0.5, 0.5),
        };
        let z = integrate(&d, &region, 1e-11).unwrap();
        assert!((z - 1.0).abs() < 1e-9, "z = {z}");
    }

    #[test]
    fn ball_volumes_match() {
        let one = Density::plain(|_| 1.0);
        let v3 = integrate(&one, &Region::Ball { dim: 3, radius: 1.0 }, 1e-11).unwrap();
        assert!((v3 - 4.0 * PI / 3.0).abs() < 1e-9, "{v3}");
        let v5 = integrate(&one, &Region::Ball { dim: 5, radius: 1.0 }, 1e-11).unwrap();
        assert!((v5 - 8.0 * PI * PI / 15.0).abs() < 1e-9, "{v5}");
    }

    #[test]
    fn ball_second_moment_along_axis() {
        // ∫_{B³} x² dV = 4π/15.
        let d = Density::plain(|th| th[0] * th[0]);
        let v = integrate(&d, &Region::Ball { dim: 3, radius: 1.0 }, 1e-11).unwrap();
        assert!((v - 4.0 * PI / 15.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn sphere_surfaces() {
        assert!((sphere_surface(0) - 2.0).abs() < 1e-15);
        assert!((sphere_surface(1) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_surface(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_surface(3) - 2.0 * PI * PI).abs() < 1e-14);
        assert!((sphere_surface(4) - 8.0 * PI * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn normalize_prior_and_pointwise_eval() {
        let p = normalize_prior(&correlated_density(), &correlated_triangle(), 1e-11).unwrap();
        assert!((p.z() - PI / 2.0).abs() < 1e-9);
        // Normalized density at the center of mass region.
        let got = p.eval(&[0.1, 0.2]);
        let want = 0.5 / 2.0f64.sqrt()
            / ((1.0f64 - 0.2) * (1.2 + 0.2) * (1.2 - 0.2)).sqrt()
            / (PI / 2.0);
        assert!((got - want).abs() < 1e-12 * want);
        assert_eq!(p.eval(&[0.9, 0.0]), 0.0, "outside the triangle");
    }

    #[test]
    fn correlated_marginal_matches_closed_form() {
        let p = normalize_prior(&correlated_density(), &correlated_triangle(), 1e-11).unwrap();
        let m = marginal(&p, 1, 101).unwrap();
        for (&z, &y) in m.xs().iter().zip(m.ys().iter()) {
            let want = 1.0 / (2.0 * 2.0f64.sqrt() * (1.0 - z).sqrt());
            assert!(
                (y - want).abs() < 1e-9 * want,
                "z = {z}: {y} vs {want}"
            );
        }
        let nc = m.norm_check.unwrap();
        assert!((nc - 1.0).abs() < 2e-6, "norm check {nc}");
    }

    #[test]
    fn polarized_marginals_are_uniform() {
        let p = normalize_prior(&polarized_density(), &polarized_ellipse(), 1e-11).unwrap();
        let mz = marginal(&p, 1, 64).unwrap();
        for (&z, &y) in mz.xs().iter().zip(mz.ys().iter()) {
            assert!((y - 0.5).abs() < 1e-9, "ζ = {z}: {y}");
        }
        let mx = marginal(&p, 0, 64).unwrap();
        for (&x, &y) in mx.xs().iter().zip(mx.ys().iter()) {
            assert!((y - 1.0).abs() < 1e-9, "ξ = {x}: {y}");
        }
    }

    #[test]
    fn conditional_slice_of_polarized_prior_is_arcsine() {
        let p = normalize_prior(&polarized_density(), &polarized_ellipse(), 1e-11).unwrap();
        let cond = conditional_slice_prior(&p, 1, 0.3, 1e-11).unwrap();
        let c = (1.0f64 - 0.09).sqrt() / 2.0; // slice half-width in ξ
        for xi in [-0.4, -0.1, 0.0, 0.2, 0.45] {
            let xi = xi * c / 0.5;
            let want = 1.0 / (PI * (c * c - xi * xi).sqrt());
            let got = cond.eval(&[xi]);
            assert!(
                (got - want).abs() < 1e-9 * want,
                "ξ = {xi}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn implicit_interval_refines_to_unit_interval() {
        // Single correlation parameter: eigenvalues (1±ζ)/4 twice each,
        // feasible exactly for |ζ| ≤ 1 inside a loose box.
        let fam = build_family(&[(
            "zeta".to_string(),
            vec![(PauliWord::new(&[3, 3]).unwrap(), 1.0)],
        )])
        .unwrap();
        let region = Region::Implicit {
            family: Arc::new(fam),
            bbox: vec![(-2.0, 2.0)],
        };
        let (lo, hi) = region.refine_implicit_interval().unwrap();
        assert!((lo + 1.0).abs() < 1e-12, "lo = {lo}");
        assert!((hi - 1.0).abs() < 1e-12, "hi = {hi}");
        // Arcsine weight over the refined interval integrates to π.
        let d = Density::map_aware(|_, ctx| match ctx {
            MapCtx::Interval { d_lo, d_hi, .. } => 1.0 / (d_lo * d_hi).sqrt(),
            _ => unreachable!("implicit 1D integration always maps to an interval"),
        });
        let v = integrate(&d, &region, 1e-11).unwrap();
        assert!((v - PI).abs() < 5e-9, "{v}");
    }

    #[test]
    fn improper_prior_reports_divergence() {
        // (1-4ξ²-ζ²)^(-3/2) is not integrable over the ellipse.
        let d = Density::map_aware(|th, ctx| {
            let rad = match ctx {
                MapCtx::PolarRadial { r, dr } => dr * (1.0 + r),
                _ => pos_clamp(1.0 - 4.0 * th[0] * th[0] - th[1] * th[1]),
            };
            rad.powf(-1.5)
        });
        let e = normalize_prior(&d, &polarized_ellipse(), 1e-9);
        match e {
            Err(Error::Divergent(msg)) => assert!(msg.contains("improper prior"), "{msg}"),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn radial_weight_norms() {
        // 3-ball, w = (1-r²)^(-1/2): 4π ∫₀¹ r²(1-r²)^(-1/2) dr = π².
        let w = RadialWeight::power(3, -0.5).unwrap();
        let z = ball_norm(&w, 0.0, 1e-11).unwrap();
        assert!((z - PI * PI).abs() < 1e-9, "{z}");
        // 5-ball the same shape: (8π²/3) ∫₀¹ r⁴(1-r²)^(-1/2) dr = π³/2.
        let w5 = RadialWeight::power(5, -0.5).unwrap();
        let z5 = ball_norm(&w5, 0.0, 1e-11).unwrap();
        assert!((z5 - PI.powi(3) / 2.0).abs() < 1e-8, "{z5}");
    }

    #[test]
    fn radial_weight_divergence_and_truncation() {
        let w = RadialWeight::power(3, -1.5).unwrap();
        assert!(matches!(ball_norm(&w, 0.0, 1e-9), Err(Error::Divergent(_))));
        // Truncated to R = 1 - 1e-3 it is finite and matches the closed form
        // 4π [R/√(1-R²)·(1/1) - asin(R)] … = 4π(R(1-R²)^(-1/2) - asin R).
        let omr = 1e-3f64;
        let r = 1.0 - omr;
        let omr2 = omr * (2.0 - omr);
        let want = 4.0 * PI * (r / omr2.sqrt() - r.asin());
        let got = ball_norm(&w, omr, 1e-11).unwrap();
        assert!(
            (got - want).abs() < 1e-9 * want,
            "{got} vs {want}"
        );
    }

    #[test]
    fn axial_moment_matches_closed_form() {
        // Uniform weight on the 3-ball: ∫ e^{-bx} dV = 4π (b cosh b - sinh b)/b³…
        // check against direct formula via sinh: (4π/b³)(b cosh b − sinh b)·…
        // Actually ∫_{B³} e^{-bx} dV = (4π/b³)(b cosh b − sinh b) · 1? Verify
        // at b = 1.3 against a simple slice integral computed analytically:
        // ∫_{-1}^{1} e^{-bx} π(1-x²) dx.
        let w = RadialWeight::new(3, |_| 1.0).unwrap();
        let b = 1.3;
        let got = ball_axial_moment(&w, 0.0, b, 0, 1e-11).unwrap();
        let want = {
            // π ∫ (1-x²) e^{-bx} dx with antiderivative worked out by parts:
            // = π [ (2/b³)(b cosh b - sinh b) * 2 … ] — integrate numerically
            // with the engine itself at tighter tolerance as a cross-check.
            quad::integrate_plain(|x| PI * (1.0 - x * x) * (-b * x).exp(), -1.0, 1.0, 1e-13)
                .unwrap()
                .value
        };
        assert!((got - want).abs() < 1e-10 * want.abs(), "{got} vs {want}");
        // First moment consistency: d/db of the partition equals -⟨x⟩ numerator.
        let m1 = ball_axial_moment(&w, 0.0, b, 1, 1e-11).unwrap();
        let fd = {
            let eps = 1e-5;
            let up = ball_axial_moment(&w, 0.0, b + eps, 0, 1e-12).unwrap();
            let dn = ball_axial_moment(&w, 0.0, b - eps, 0, 1e-12).unwrap();
            -(up - dn) / (2.0 * eps)
        };
        assert!((m1 - fd).abs() < 1e-7, "{m1} vs {fd}");
    }

    #[test]
    fn minimal_ball_marginal_matches_closed_form() {
        // 3-ball, w = (1-r²)^(-1/2): normalized axial marginal 2√(1-x²)/π.
        let w = RadialWeight::power(3, -0.5).unwrap();
        let z = ball_norm(&w, 0.0, 1e-11).unwrap();
        for x in [-0.9, -0.5, 0.0, 0.3, 0.8] {
            let m = ball_axis_marginal_num(&w, 0.0, x, 1e-11).unwrap() / z;
            let want = 2.0 * (1.0 - x * x).sqrt() / PI;
            assert!((m - want).abs() < 1e-10, "x = {x}: {m} vs {want}");
        }
    }

    #[test]
    fn neville_recovers_sqrt_series_limit() {
        // y(s) = 3 + 2s + s² - 0.5 s³ sampled on the shrink ladder.
        let xs: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k).sqrt()).collect();
        let ys: Vec<f64> = xs.iter().map(|s| 3.0 + 2.0 * s + s * s - 0.5 * s * s * s).collect();
        let (v, res) = neville_at_zero(&xs, &ys).unwrap();
        assert!((v - 3.0).abs() < 1e-12, "{v}");
        assert!(res < 1e-10, "{res}");
    }

    #[test]
    fn shrink_limit_of_maximal_ball_weight_is_uniform() {
        let w = RadialWeight::power(3, -1.5).unwrap();
        let out = shrink_limit_marginal(&w, &SHRINK_KS, 101, 1e-10, 1e-4).unwrap();
        for (&x, &y) in out.table.xs().iter().zip(out.table.ys().iter()) {
            assert!((y - 0.5).abs() < 1e-4, "x = {x}: {y}");
        }
        assert!(out.max_residual < 1e-4);
    }

    #[test]
    fn shrink_limit_of_proper_weight_matches_direct_marginal() {
        let w = RadialWeight::power(3, -0.5).unwrap();
        let out = shrink_limit_marginal(&w, &SHRINK_KS, 51, 1e-10, 1e-4).unwrap();
        let z = ball_norm(&w, 0.0, 1e-11).unwrap();
        for (&x, &y) in out.table.xs().iter().zip(out.table.ys().iter()) {
            let direct = ball_axis_marginal_num(&w, 0.0, x, 1e-11).unwrap() / z;
            assert!((y - direct).abs() < 1e-5, "x = {x}: {y} vs {direct}");
        }
    }

    #[test]
    fn shrink_limit_of_five_ball_maximal_weight() {
        // 5-ball, w = (1-r²)^(-5/2): the limit marginal is (3/4)(1-x²).
        let w = RadialWeight::power(5, -2.5).unwrap();
        let out = shrink_limit_marginal(&w, &SHRINK_KS, 101, 1e-10, 1e-4).unwrap();
        for (&x, &y) in out.table.xs().iter().zip(out.table.ys().iter()) {
            let want = 0.75 * (1.0 - x * x);
            assert!((y - want).abs() < 1e-4, "x = {x}: {y} vs {want}");
        }
    }

    #[test]
    fn central_slice_reduces_dimension() {
        let w = RadialWeight::power(5, -0.5).unwrap();
        let s = w.central_slice().unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.eval_complement(0.5), 0.5f64.powf(-0.5));
    }

    #[test]
    fn tabulated_roundtrip_and_monotonicity() {
        let xs = midpoint_grid(0.0, 1.0, 21);
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let t = Tabulated1D::new(xs.clone(), ys).unwrap();
        // Round trip through CSV preserves samples bit-exactly.
        let csv = t.to_csv();
        assert!(csv.starts_with("x,density\n"));
        let t2 = Tabulated1D::from_csv(&csv).unwrap();
        for (a, b) in t.xs().iter().zip(t2.xs().iter()) {
            assert_eq!(a, b);
        }
        for (a, b) in t.ys().iter().zip(t2.ys().iter()) {
            assert_eq!(a, b);
        }
        // Monotone data ⇒ monotone interpolant (sampled densely).
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            let v = t.eval(x);
            assert!(v >= prev - 1e-12, "overshoot at {x}");
            prev = v;
        }
        // Quadratic data integrates to ≈ 1/3 over the sampled range.
        let exact = (t.xs()[t.len() - 1].powi(3) - t.xs()[0].powi(3)) / 3.0;
        assert!((t.integral() - exact).abs() < 1e-4, "{}", t.integral());
    }

    #[test]
    fn tabulated_step_has_no_overshoot() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys = vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let t = Tabulated1D::new(xs, ys).unwrap();
        for i in 0..=900 {
            let x = i as f64 / 100.0;
            let v = t.eval(x);
            assert!((-1e-12..=1.0 + 1e-12).contains(&v), "overshoot {v} at {x}");
        }
    }

    #[test]
    fn tabulated_rejects_bad_input() {
        assert!(Tabulated1D::new(vec![0.0], vec![1.0]).is_err());
        assert!(Tabulated1D::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Tabulated1D::new(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
        assert!(Tabulated1D::from_csv("x,density\n1,2\n0.5,1\n").is_err());
    }

    #[test]
    fn midpoint_grid_avoids_endpoints() {
        let g = midpoint_grid(-1.0, 1.0, 201);
        assert_eq!(g.len(), 201);
        assert!(g[0] > -1.0 && g[200] < 1.0);
        assert!((g[100] - 0.0).abs() < 1e-15);
    }

    #[test]
    fn region_geometry_helpers() {
        let t = correlated_triangle();
        assert!(t.contains(&[0.0, 0.0]));
        assert!(!t.contains(&[0.9, 0.0]));
        let (lo, hi) = t.slice_range(1, 0.0).unwrap();
        assert!((lo + 0.5).abs() < 1e-14 && (hi - 0.5).abs() < 1e-14);
        assert!(t.slice_range(1, 1.5).is_none());
        let e = polarized_ellipse();
        let (lo, hi) = e.slice_range(1, 0.0).unwrap();
        assert!((lo + 0.5).abs() < 1e-14 && (hi - 0.5).abs() < 1e-14);
        assert_eq!(e.axis_range(1).unwrap(), (-1.0, 1.0));
        assert!(e.axis_range(2).is_err());
    }
}
