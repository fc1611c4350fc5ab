//! Metric tensors and volume elements of the two extreme monotone metrics
//! on affine families of density matrices.
//!
//! For a family `ρ(θ) = ρ₀ + Σ θₖ Bₖ` with eigendecomposition
//! `ρ = Σ λᵢ |i⟩⟨i|`, a monotone metric has squared line element
//! `ds² = Σ_{k,l} G_kl dθₖ dθₗ` with
//!
//! ```text
//! G_kl = Σ_{i,j} (1/2) · Re[⟨i|Bₖ|j⟩ ⟨j|Bₗ|i⟩] · c(λᵢ, λⱼ)
//! ```
//!
//! where the kernel `c` distinguishes the two extremes of the monotone
//! family:
//!
//! * minimal (fidelity-based): `c(x, y) = 1/(x + y)`,
//! * maximal (left-inverse based): `c(x, y) = (x + y)/(2xy)`.
//!
//! With these normalizations the two kernels coincide up to a constant
//! factor of exactly 2 on commuting families (`c_max(λ,λ) = 2·c_min(λ,λ)`),
//! so their *normalized* volume elements are identical there; all
//! downstream consumers use normalized densities, where any global
//! constant cancels.
//!
//! Independent cross-checks implemented here:
//!
//! * the maximal tensor is evaluated both through the eigenbasis kernel
//!   and as `(1/2)·Re tr(Bₖ ρ⁻¹ Bₗ)` via an LU solve, and the two routes
//!   must agree;
//! * [`sld_cross_check`] recomputes the minimal tensor from scratch by
//!   solving the Lyapunov equations `Bₖ = (Lₖρ + ρLₖ)/2` for the
//!   symmetrized logarithmic derivatives in the original (non-eigen)
//!   basis and contracting `G_kl = (1/4)·Re tr(Bₖ Lₗ)`.

use std::sync::Arc;

use crate::matrixcore::{eigensystem, lu_solve_real, AffineFamily, HermitianMatrix, C64};
use crate::measure::Density;
use crate::{Error, Result};

/// Eigenvalue-sum cutoff below which a kernel term is treated as a
/// 0/0 limit and dropped (after validating that its numerator vanishes).
pub const KERNEL_CUTOFF: f64 = 1e-12;

/// Largest matrix element allowed in a dropped kernel term. A dropped
/// term with a numerator above this signals a genuinely divergent metric
/// (evaluation on a boundary stratum), which is an error.
pub const DROPPED_NUMERATOR_TOL: f64 = 1e-10;

/// Feasibility slack: eigenvalues of ρ(θ) may undershoot zero by at most
/// this much before the point is rejected as infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Eigenvalue floor used by quadrature-facing clamped evaluation
/// ([`volume_density`]): boundary-touching eigenvalues are raised to this
/// value instead of erroring, so open-interval quadrature nodes arbitrarily
/// close to the feasibility boundary stay evaluable.
pub const CLAMP_FLOOR: f64 = 1e-15;

// ── MetricKind ──────────────────────────────────────────────────────────────

/// Which extreme of the monotone-metric family to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    /// The minimal (fidelity-based) monotone metric, kernel `1/(λᵢ+λⱼ)`.
    Minimal,
    /// The maximal (left-inverse) monotone metric, kernel `(λᵢ+λⱼ)/(2λᵢλⱼ)`.
    Maximal,
}

impl MetricKind {
    /// Stable lowercase name (CLI flag value and report key).
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Minimal => "minimal",
            MetricKind::Maximal => "maximal",
        }
    }

    /// Parses the lowercase name produced by [`MetricKind::name`].
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "minimal" => Ok(MetricKind::Minimal),
            "maximal" => Ok(MetricKind::Maximal),
            other => Err(Error::InvalidInput(format!(
                "unknown metric kind {other:?}: expected \"minimal\" or \"maximal\""
            ))),
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

// ── MetricTensor ────────────────────────────────────────────────────────────

/// A p×p real symmetric metric tensor in family parameters, convention
/// `ds² = Σ_{k,l} G_kl dθₖ dθₗ`.
///
/// Construction symmetrizes round-off and rejects asymmetry above 1e-12;
/// positive semidefiniteness is checked on demand (it holds at interior
/// feasible points but not, e.g., for difference tensors).
#[derive(Clone, Debug)]
pub struct MetricTensor {
    p: usize,
    g: Vec<f64>,
}

impl MetricTensor {
    /// Builds a tensor from row-major entries, enforcing symmetry within
    /// 1e-12 (relative to the largest entry) and finiteness.
    pub fn from_entries(p: usize, g: Vec<f64>) -> Result<Self> {
        if p == 0 || g.len() != p * p {
            return Err(Error::InvalidInput(format!(
                "metric tensor needs p²={} entries, got {}",
                p * p,
                g.len()
            )));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("metric tensor entry not finite".into()));
        }
        let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        let mut sym = g;
        for k in 0..p {
            for l in k + 1..p {
                let a = sym[k * p + l];
                let b = sym[l * p + k];
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::Numerical(format!(
                        "metric tensor asymmetric: G[{k}][{l}]={a} vs G[{l}][{k}]={b}"
                    )));
                }
                let avg = 0.5 * (a + b);
                sym[k * p + l] = avg;
                sym[l * p + k] = avg;
            }
        }
        Ok(MetricTensor { p, g: sym })
    }

    /// Number of parameters p.
    pub fn dim(&self) -> usize {
        self.p
    }

    /// Entry `G_kl`.
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.g[k * self.p + l]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.g
    }

    /// `Σ G_kk`.
    pub fn trace(&self) -> f64 {
        (0..self.p).map(|k| self.g[k * self.p + k]).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting
    /// (p is small — at most a handful of parameters).
    pub fn det(&self) -> f64 {
        let p = self.p;
        let mut a = self.g.clone();
        let mut det = 1.0f64;
        for col in 0..p {
            let mut best = col;
            for r in col + 1..p {
                if a[r * p + col].abs() > a[best * p + col].abs() {
                    best = r;
                }
            }
            let piv = a[best * p + col];
            if piv == 0.0 {
                return 0.0;
            }
            if best != col {
                for j in 0..p {
                    a.swap(col * p + j, best * p + j);
                }
                det = -det;
            }
            det *= piv;
            for r in col + 1..p {
                let f = a[r * p + col] / piv;
                for j in col..p {
                    a[r * p + j] -= f * a[col * p + j];
                }
            }
        }
        det
    }

    /// Smallest eigenvalue (the tensor is real symmetric, so it embeds as
    /// a Hermitian matrix and reuses the deterministic eigensolver).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let p = self.p;
        let mut h = HermitianMatrix::zeros(p);
        for k in 0..p {
            for l in k..p {
                h.set_pair(k, l, C64::new(self.get(k, l), 0.0));
            }
        }
        let es = eigensystem(&h)?;
        Ok(*es
            .eigenvalues
            .last()
            .expect("eigensystem of nonempty tensor"))
    }

    /// Positive semidefiniteness within the interior-point tolerance:
    /// smallest eigenvalue ≥ −1e-10·trace.
    pub fn is_psd(&self) -> Result<bool> {
        let tr = self.trace();
        Ok(self.min_eigenvalue()? >= -1e-10 * tr.abs().max(1.0))
    }

    /// Entrywise difference `self − other` (in general indefinite; used
    /// for matrix-ordering checks).
    pub fn minus(&self, other: &MetricTensor) -> Result<MetricTensor> {
        if self.p != other.p {
            return Err(Error::InvalidInput(format!(
                "tensor dimension mismatch: {} vs {}",
                self.p, other.p
            )));
        }
        let g = self
            .g
            .iter()
            .zip(&other.g)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>();
        MetricTensor::from_entries(self.p, g)
    }

    /// Entrywise scaling `c·G`.
    pub fn scaled(&self, c: f64) -> MetricTensor {
        MetricTensor {
            p: self.p,
            g: self.g.iter().map(|x| c * x).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.g.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Largest absolute entrywise difference to another tensor.
    pub fn max_abs_diff(&self, other: &MetricTensor) -> f64 {
        self.g
            .iter()
            .zip(&other.g)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

// ── Volume element ──────────────────────────────────────────────────────────

/// `√det G`, the Riemannian volume density in family parameters.
///
/// Errors when the determinant is negative beyond −1e-12 (relative to the
/// entry scale), which signals evaluation at an infeasible point; small
/// negative round-off is clamped to zero.
pub fn volume_element(g: &MetricTensor) -> Result<f64> {
    let det = g.det();
    let scale = g.max_abs().powi(g.dim() as i32).max(1.0);
    if det < -1e-12 * scale {
        return Err(Error::Numerical(format!(
            "negative metric determinant {det}: point is outside the feasible region"
        )));
    }
    Ok(det.max(0.0).sqrt())
}

// ── Eigenbasis kernel evaluation ────────────────────────────────────────────

/// `ρ(θ)` eigendecomposed, with each direction matrix expressed in the
/// eigenbasis: `overlaps[k][i*n+j] = ⟨i|Bₖ|j⟩`.
struct EigenFrame {
    eigenvalues: Vec<f64>,
    overlaps: Vec<Vec<C64>>,
}

fn eigen_frame(family: &AffineFamily, theta: &[f64]) -> Result<EigenFrame> {
    let rho = family.eval_density(theta)?;
    let es = eigensystem(&rho)?;
    let n = family.dim();
    let p = family.n_params();
    let mut overlaps = Vec::with_capacity(p);
    for k in 0..p {
        let b = family.direction(k);
        // w_j = B_k |j⟩, then M_ij = ⟨i| w_j.
        let mut w = vec![C64::new(0.0, 0.0); n * n];
        for (j, vj) in es.eigenvectors.iter().enumerate() {
            for r in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..n {
                    acc += b.get(r, c) * vj[c];
                }
                w[r * n + j] = acc;
            }
        }
        let mut m = vec![C64::new(0.0, 0.0); n * n];
        for (i, vi) in es.eigenvectors.iter().enumerate() {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..n {
                    acc += vi[r].conj() * w[r * n + j];
                }
                m[i * n + j] = acc;
            }
        }
        overlaps.push(m);
    }
    Ok(EigenFrame {
        eigenvalues: es.eigenvalues,
        overlaps,
    })
}

/// Sums the kernel over eigenpairs: `G_kl = Σ_{ij} ½·Re(Mᵏᵢⱼ Mˡⱼᵢ)·c(λᵢ,λⱼ)`
/// for every pair with `kernel(λᵢ,λⱼ) = Some(c)`; `None` marks a dropped
/// term, which is validated to have a vanishing numerator.
fn kernel_tensor(
    frame: &EigenFrame,
    kernel: impl Fn(f64, f64) -> Option<f64>,
) -> Result<MetricTensor> {
    let n = frame.eigenvalues.len();
    let p = frame.overlaps.len();
    let mut g = vec![0.0f64; p * p];
    for i in 0..n {
        for j in 0..n {
            let li = frame.eigenvalues[i];
            let lj = frame.eigenvalues[j];
            match kernel(li, lj) {
                Some(c) => {
                    for k in 0..p {
                        let mk = frame.overlaps[k][i * n + j];
                        for l in k..p {
                            let ml = frame.overlaps[l][j * n + i];
                            g[k * p + l] += 0.5 * (mk * ml).re * c;
                        }
                    }
                }
                None => {
                    // 0/0 limit: legitimate only when the directions have
                    // no matrix element across this eigenpair.
                    for (k, m) in frame.overlaps.iter().enumerate() {
                        let mag = m[i * n + j].norm();
                        if mag * mag > DROPPED_NUMERATOR_TOL {
                            return Err(Error::Numerical(format!(
                                "metric kernel diverges: eigenvalue pair \
                                 ({li:.3e}, {lj:.3e}) is degenerate at zero but \
                                 direction {k} has matrix element {mag:.3e} \
                                 across it"
                            )));
                        }
                    }
                }
            }
        }
    }
    for k in 0..p {
        for l in 0..k {
            g[k * p + l] = g[l * p + k];
        }
    }
    MetricTensor::from_entries(p, g)
}

fn check_feasible(frame: &EigenFrame, theta: &[f64]) -> Result<()> {
    let min = frame
        .eigenvalues
        .last()
        .copied()
        .unwrap_or(f64::NEG_INFINITY);
    if min < -FEASIBILITY_TOL {
        return Err(Error::InvalidInput(format!(
            "infeasible point {theta:?}: smallest eigenvalue {min:.3e} < 0"
        )));
    }
    Ok(())
}

// ── Minimal (fidelity) metric ───────────────────────────────────────────────

/// Minimal-monotone metric tensor at θ, via the eigenbasis kernel
/// `1/(λᵢ+λⱼ)`.
///
/// Terms with `λᵢ+λⱼ ≤ 1e-12` are dropped as 0/0 limits after checking
/// that their numerators vanish (< 1e-10); a nonvanishing numerator means
/// the metric genuinely diverges there and is an error. Points with an
/// eigenvalue below −1e-12 are rejected as infeasible.
pub fn bures_tensor(family: &AffineFamily, theta: &[f64]) -> Result<MetricTensor> {
    let frame = eigen_frame(family, theta)?;
    check_feasible(&frame, theta)?;
    kernel_tensor(&frame, |li, lj| {
        let s = li + lj;
        (s > KERNEL_CUTOFF).then(|| 1.0 / s)
    })
}

// ── Maximal (left-inverse) metric ───────────────────────────────────────────

/// Maximal-monotone metric tensor at θ, via the eigenbasis kernel
/// `(λᵢ+λⱼ)/(2λᵢλⱼ)`.
///
/// The kernel diverges whenever any eigenvalue vanishes, so every
/// eigenvalue must exceed 1e-12. The result is additionally recomputed as
/// `(1/2)·Re tr(Bₖ ρ⁻¹ Bₗ)` through an LU solve in the original basis;
/// disagreement between the two routes beyond 1e-8 (relative) is an error.
pub fn maximal_tensor(family: &AffineFamily, theta: &[f64]) -> Result<MetricTensor> {
    let frame = eigen_frame(family, theta)?;
    if let Some(&min) = frame.eigenvalues.last() {
        if min <= KERNEL_CUTOFF {
            return Err(Error::InvalidInput(format!(
                "maximal-metric kernel diverges at {theta:?}: smallest eigenvalue \
                 {min:.3e} ≤ {KERNEL_CUTOFF:.0e} (point is on or outside the \
                 feasibility boundary)"
            )));
        }
    }
    let g = kernel_tensor(&frame, |li, lj| Some((li + lj) / (2.0 * li * lj)))?;

    // Independent route: (1/2)·Re tr(Bₖ ρ⁻¹ Bₗ) in the original basis.
    let rho = family.eval_density(theta)?;
    let p = family.n_params();
    let mut inv_b = Vec::with_capacity(p);
    for l in 0..p {
        inv_b.push(rho.solve_matrix(family.direction(l))?);
    }
    let mut g2 = vec![0.0f64; p * p];
    for k in 0..p {
        for l in 0..p {
            g2[k * p + l] = 0.5 * family.direction(k).trace_product_re(&inv_b[l]);
        }
    }
    let g2 = MetricTensor::from_entries(p, g2)?;
    let scale = g.max_abs().max(1.0);
    let diff = g.max_abs_diff(&g2);
    if diff > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "maximal-metric route disagreement at {theta:?}: eigenbasis kernel vs \
             inverse-trace differ by {diff:.3e} (scale {scale:.3e})"
        )));
    }
    Ok(g)
}

/// Dispatches on the metric kind.
pub fn tensor(family: &AffineFamily, theta: &[f64], kind: MetricKind) -> Result<MetricTensor> {
    match kind {
        MetricKind::Minimal => bures_tensor(family, theta),
        MetricKind::Maximal => maximal_tensor(family, theta),
    }
}

// ── Symmetrized-logarithmic-derivative cross-check ──────────────────────────

/// Recomputes the minimal tensor from first principles: for each direction
/// solve the n²-real-unknown Lyapunov system `Bₖ = (Lₖρ + ρLₖ)/2` for the
/// Hermitian `Lₖ` (in the original basis, no eigendecomposition), then
/// contract `G_kl = (1/4)·Re tr(Bₖ Lₗ)`.
///
/// The result must agree with [`bures_tensor`] within 1e-9 (relative to
/// the entry scale) or an error is raised. Restricted to dim ≤ 8 since the
/// dense solve is O(n⁶).
pub fn sld_cross_check(family: &AffineFamily, theta: &[f64]) -> Result<MetricTensor> {
    let n = family.dim();
    if n > 8 {
        return Err(Error::InvalidInput(format!(
            "symmetrized-derivative cross-check limited to dim ≤ 8, got {n}"
        )));
    }
    let rho = family.eval_density(theta)?;

    // Hermitian basis elements E_u. Unknown vector layout:
    //   u = 0..n                →  E = e_ii
    //   then for each i<j, two unknowns: Re part (e_ij + e_ji)
    //   and Im part i·(e_ij − e_ji).
    let mut basis: Vec<HermitianMatrix> = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = HermitianMatrix::zeros(n);
        e.set_pair(i, i, C64::new(1.0, 0.0));
        basis.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut re = HermitianMatrix::zeros(n);
            re.set_pair(i, j, C64::new(1.0, 0.0));
            basis.push(re);
            let mut im = HermitianMatrix::zeros(n);
            im.set_pair(i, j, C64::new(0.0, 1.0));
            basis.push(im);
        }
    }
    debug_assert_eq!(basis.len(), n * n);

    // Equation layout mirrors the unknown layout: for each basis index,
    // project (E_u ρ + ρ E_u)/2 onto the same real coordinates.
    let sym_coords = |m: &[C64]| -> Vec<f64> {
        let mut row = Vec::with_capacity(n * n);
        for i in 0..n {
            row.push(m[i * n + i].re);
        }
        for i in 0..n {
            for j in i + 1..n {
                row.push(m[i * n + j].re);
                row.push(m[i * n + j].im);
            }
        }
        row
    };
    let half_anticommutator = |e: &HermitianMatrix| -> Vec<C64> {
        let mut m = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..n {
                    acc += e.get(i, r) * rho.get(r, j) + rho.get(i, r) * e.get(r, j);
                }
                m[i * n + j] = 0.5 * acc;
            }
        }
        m
    };

    let nn = n * n;
    let mut a_cols: Vec<Vec<f64>> = Vec::with_capacity(nn);
    for e in &basis {
        a_cols.push(sym_coords(&half_anticommutator(e)));
    }

    let p = family.n_params();
    let mut l_ops: Vec<HermitianMatrix> = Vec::with_capacity(p);
    for k in 0..p {
        let bk = family.direction(k);
        let mut b_flat = vec![C64::new(0.0, 0.0); nn];
        for i in 0..n {
            for j in 0..n {
                b_flat[i * n + j] = bk.get(i, j);
            }
        }
        let mut rhs = sym_coords(&b_flat);
        let mut a = vec![0.0f64; nn * nn];
        for (u, col) in a_cols.iter().enumerate() {
            for (eq, &v) in col.iter().enumerate() {
                a[eq * nn + u] = v;
            }
        }
        lu_solve_real(&mut a, &mut rhs, nn).map_err(|_| {
            Error::Numerical(format!(
                "singular state at {theta:?}: symmetrized-derivative system \
                 has no unique solution"
            ))
        })?;
        let mut l = HermitianMatrix::zeros(n);
        let mut u = 0usize;
        for i in 0..n {
            l.set_pair(i, i, C64::new(rhs[u], 0.0));
            u += 1;
        }
        for i in 0..n {
            for j in i + 1..n {
                l.set_pair(i, j, C64::new(rhs[u], rhs[u + 1]));
                u += 2;
            }
        }
        l_ops.push(l);
    }

    let mut g = vec![0.0f64; p * p];
    for k in 0..p {
        let bk = family.direction(k);
        for l in 0..p {
            let ll = &l_ops[l];
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += (bk.get(i, j) * ll.get(j, i)).re;
                }
            }
            g[k * p + l] = 0.25 * acc;
        }
    }
    let g = MetricTensor::from_entries(p, g)?;

    let reference = bures_tensor(family, theta)?;
    let scale = reference.max_abs().max(1.0);
    let diff = g.max_abs_diff(&reference);
    if diff > 1e-9 * scale {
        return Err(Error::Numerical(format!(
            "symmetrized-derivative route disagrees with eigenbasis kernel by \
             {diff:.3e} at {theta:?} (scale {scale:.3e})"
        )));
    }
    Ok(g)
}

// ── Quadrature-facing clamped volume density ────────────────────────────────

/// Unnormalized volume-element density `θ ↦ √det G(θ)` for quadrature.
///
/// Eigenvalues are clamped to [`CLAMP_FLOOR`] instead of erroring, so the
/// closure stays total on open-interval quadrature nodes that approach the
/// feasibility boundary; genuine evaluation failures poison the result
/// with NaN (which the quadrature engine reports as a numerical error).
/// No route cross-validation is performed here — this is the hot path.
pub fn volume_density(family: Arc<AffineFamily>, kind: MetricKind) -> Density {
    Density::plain(move |theta| match clamped_volume(&family, theta, kind) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    })
}

/// One clamped evaluation of `√det G(θ)` (shared by [`volume_density`]).
pub fn clamped_volume(family: &AffineFamily, theta: &[f64], kind: MetricKind) -> Result<f64> {
    let frame = eigen_frame(family, theta)?;
    let clamp = |x: f64| x.max(CLAMP_FLOOR);
    let g = match kind {
        MetricKind::Minimal => kernel_tensor(&frame, |li, lj| {
            Some(1.0 / (clamp(li) + clamp(lj)))
        })?,
        MetricKind::Maximal => kernel_tensor(&frame, |li, lj| {
            let (a, b) = (clamp(li), clamp(lj));
            Some((a + b) / (2.0 * a * b))
        })?,
    };
    Ok(g.det().max(0.0).sqrt())
}

// ── Tests ───────────────────────────────────────────────────────────────────
