//! Complex Hermitian matrix arithmetic, Pauli tensor-product construction
//! of affine density-matrix families, eigendecomposition, and feasibility
//! testing.
//!
//! Everything here has pure value semantics: operations are referentially
//! transparent and safe to call from concurrent workers.

use num_complex::Complex64;
use serde::Deserialize;

use crate::{Error, Result};

/// Shorthand for the complex scalar type used throughout.
pub type C64 = Complex64;

const HERMITICITY_TOL: f64 = 1e-14;

// ── HermitianMatrix ─────────────────────────────────────────────────────────

/// A dense n×n complex Hermitian matrix (row-major storage).
///
/// Construction enforces `entries[i][j] = conj(entries[j][i])` within 1e-14;
/// mutating helpers preserve it by writing symmetric pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    a: Vec<C64>,
}

impl HermitianMatrix {
    /// The zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            n,
            a: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    /// `s·I` of dimension `n`.
    pub fn identity_scaled(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = C64::new(s, 0.0);
        }
        m
    }

    /// Builds from a row-major entry list, validating hermiticity.
    pub fn from_entries(n: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {}x{} = {} entries, got {}",
                n,
                n,
                n * n,
                entries.len()
            )));
        }
        let m = HermitianMatrix { n, a: entries };
        for i in 0..n {
            for j in i..n {
                let d = (m.a[i * n + j] - m.a[j * n + i].conj()).norm();
                if d > HERMITICITY_TOL {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) breaks hermiticity by {d:.3e}"
                    )));
                }
            }
        }
        Ok(m)
    }

    /// Builds from explicit rows (convenience for small literals).
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::InvalidInput("ragged rows".into()));
            }
            entries.extend_from_slice(r);
        }
        Self::from_entries(n, entries)
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry accessor.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.n + j]
    }

    /// Sets entry (i,j) and its conjugate mirror (j,i).
    pub fn set_pair(&mut self, i: usize, j: usize, z: C64) {
        self.a[i * self.n + j] = z;
        self.a[j * self.n + i] = z.conj();
        if i == j {
            self.a[i * self.n + i] = C64::new(z.re, 0.0);
        }
    }

    /// Real trace (the imaginary part is zero for Hermitian matrices).
    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i * self.n + i].re).sum()
    }

    /// `self + s·other` (dimension-checked by caller logic; panics on mismatch).
    pub fn add_scaled(&self, other: &HermitianMatrix, s: f64) -> HermitianMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x + y * s)
            .collect();
        HermitianMatrix { n: self.n, a }
    }

    /// `s·self`.
    pub fn scaled(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    /// Largest absolute entry difference against `other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// `x† · self · y` for complex vectors `x`, `y`.
    pub fn sandwich(&self, x: &[C64], y: &[C64]) -> C64 {
        let n = self.n;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = C64::new(0.0, 0.0);
            for j in 0..n {
                row += self.a[i * n + j] * y[j];
            }
            acc += x[i].conj() * row;
        }
        acc
    }

    /// `Re tr(self · x)` where `x` is a general (row-major) complex matrix.
    pub fn trace_product_re(&self, x: &[C64]) -> f64 {
        let n = self.n;
        debug_assert_eq!(x.len(), n * n);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.a[i * n + j] * x[j * n + i]).re;
            }
        }
        acc
    }

    /// Kronecker (tensor) product.
    pub fn kron(&self, other: &HermitianMatrix) -> HermitianMatrix {
        let (n, m) = (self.n, other.n);
        let nm = n * m;
        let mut out = vec![C64::new(0.0, 0.0); nm * nm];
        for i in 0..n {
            for j in 0..n {
                let s = self.a[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k) * nm + (j * m + l)] = s * other.a[k * m + l];
                    }
                }
            }
        }
        HermitianMatrix { n: nm, a: out }
    }

    /// Solves `self · X = rhs` for the general complex matrix `X`
    /// (row-major), by LU decomposition with partial pivoting.
    /// Errors when `self` is numerically singular.
    pub fn solve_matrix(&self, rhs: &HermitianMatrix) -> Result<Vec<C64>> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut lu = self.a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            // Pivot: largest modulus on/below the diagonal.
            let mut best = col;
            let mut best_mag = lu[col * n + col].norm();
            for r in col + 1..n {
                let mag = lu[r * n + col].norm();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            if best_mag < 1e-300 {
                return Err(Error::Numerical(
                    "singular matrix in linear solve".into(),
                ));
            }
            if best != col {
                for j in 0..n {
                    lu.swap(col * n + j, best * n + j);
                }
                perm.swap(col, best);
            }
            let piv = lu[col * n + col];
            for r in col + 1..n {
                let f = lu[r * n + col] / piv;
                lu[r * n + col] = f;
                for j in col + 1..n {
                    let t = lu[col * n + j] * f;
                    lu[r * n + j] -= t;
                }
            }
        }
        // Back-substitute each column of rhs.
        let mut x = vec![C64::new(0.0, 0.0); n * n];
        let mut col_buf = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col_buf[r] = rhs.a[perm[r] * n + c];
            }
            for r in 1..n {
                for k in 0..r {
                    let t = lu[r * n + k] * col_buf[k];
                    col_buf[r] -= t;
                }
            }
            for r in (0..n).rev() {
                for k in r + 1..n {
                    let t = lu[r * n + k] * col_buf[k];
                    col_buf[r] -= t;
                }
                col_buf[r] /= lu[r * n + r];
            }
            for r in 0..n {
                x[r * n + c] = col_buf[r];
            }
        }
        Ok(x)
    }
}

// ── Real dense linear solve (shared helper) ─────────────────────────────────

/// Solves the dense real system `A x = b` in place (`a` is row-major n×n,
/// consumed as scratch; `b` becomes the solution). Partial pivoting.
pub(crate) fn lu_solve_real(a: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut best = col;
        let mut best_mag = a[col * n + col].abs();
        for r in col + 1..n {
            let mag = a[r * n + col].abs();
            if mag > best_mag {
                best = r;
                best_mag = mag;
            }
        }
        if best_mag < 1e-300 {
            return Err(Error::Numerical("singular real system".into()));
        }
        if best != col {
            for j in 0..n {
                a.swap(col * n + j, best * n + j);
            }
            b.swap(col, best);
        }
        let piv = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / piv;
            a[r * n + col] = f;
            for j in col + 1..n {
                a[r * n + j] -= a[col * n + j] * f;
            }
            b[r] -= b[col] * f;
        }
    }
    for r in (0..n).rev() {
        for k in r + 1..n {
            b[r] -= a[r * n + k] * b[k];
        }
        b[r] /= a[r * n + r];
    }
    Ok(())
}

// ── PauliWord ───────────────────────────────────────────────────────────────

/// A tensor product of single-site operators, one letter per site:
/// 0 = identity, 1..3 = the three Pauli matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliWord {
    letters: Vec<u8>,
}

impl PauliWord {
    /// Word from letters; each letter in {0,1,2,3}, length 1..=6
    /// (matrix dimension 2^len ≤ 64).
    pub fn new(letters: &[u8]) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("empty Pauli word".into()));
        }
        if letters.len() > 6 {
            return Err(Error::InvalidInput(format!(
                "Pauli word length {} exceeds 6 (dim > 64 unsupported)",
                letters.len()
            )));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l > 3) {
            return Err(Error::InvalidInput(format!(
                "Pauli letter {bad} outside 0..=3"
            )));
        }
        Ok(PauliWord {
            letters: letters.to_vec(),
        })
    }

    /// Number of tensor factors.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// True when the word has no letters (cannot occur for validated words).
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letters.
    pub fn letters(&self) -> &[u8] {
        &self.letters
    }
}

fn pauli_2x2(letter: u8) -> HermitianMatrix {
    let (a, b, c, d) = match letter {
        0 => ((1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)),
        1 => ((0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)),
        2 => ((0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)),
        3 => ((1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)),
        _ => unreachable!("validated letter"),
    };
    HermitianMatrix {
        n: 2,
        a: vec![
            C64::new(a.0, a.1),
            C64::new(b.0, b.1),
            C64::new(c.0, c.1),
            C64::new(d.0, d.1),
        ],
    }
}

/// Kronecker product of the word's single-site matrices, in order.
pub fn pauli_word_matrix(word: &PauliWord) -> HermitianMatrix {
    let mut m = pauli_2x2(word.letters[0]);
    for &l in &word.letters[1..] {
        m = m.kron(&pauli_2x2(l));
    }
    m
}

// ── AffineFamily ────────────────────────────────────────────────────────────

/// An affine family of trace-one Hermitian matrices
/// `ρ(θ) = base + Σ θₖ·Bₖ` with traceless direction matrices `Bₖ`.
///
/// Families built from Pauli words have `base = I/n`; the general
/// constructor admits any trace-one Hermitian base (needed for families
/// whose natural parameter origin is not the maximally mixed state).
#[derive(Clone, Debug)]
pub struct AffineFamily {
    n: usize,
    base: HermitianMatrix,
    params: Vec<(String, HermitianMatrix)>,
}

/// One named parameter direction given as Pauli words with coefficients.
pub type PauliParamSpec = (String, Vec<(PauliWord, f64)>);

/// Builds a family from Pauli-word parameter directions:
/// `base = I/2^m`, `Bₖ = Σ coeff·word_matrix / 2^m`.
pub fn build_family(spec: &[PauliParamSpec]) -> Result<AffineFamily> {
    if spec.is_empty() {
        return Err(Error::InvalidInput("family needs >= 1 parameter".into()));
    }
    let mut names = std::collections::HashSet::new();
    let mut word_len = None;
    for (name, terms) in spec {
        if !names.insert(name.clone()) {
            return Err(Error::InvalidInput(format!(
                "duplicate parameter name {name}"
            )));
        }
        if terms.is_empty() {
            return Err(Error::InvalidInput(format!(
                "parameter {name} has no terms"
            )));
        }
        for (w, _) in terms {
            match word_len {
                None => word_len = Some(w.len()),
                Some(m) if m != w.len() => {
                    return Err(Error::InvalidInput(format!(
                        "mixed Pauli word lengths {m} vs {}",
                        w.len()
                    )))
                }
                _ => {}
            }
        }
    }
    let m = word_len.unwrap();
    let n = 1usize << m;
    let inv_n = 1.0 / n as f64;
    let base = HermitianMatrix::identity_scaled(n, inv_n);
    let mut params = Vec::with_capacity(spec.len());
    for (name, terms) in spec {
        let mut b = HermitianMatrix::zeros(n);
        for (w, coeff) in terms {
            b = b.add_scaled(&pauli_word_matrix(w), coeff * inv_n);
        }
        params.push((name.clone(), b));
    }
    Ok(AffineFamily { n, base, params })
}

impl AffineFamily {
    /// General constructor: any trace-one Hermitian base with traceless
    /// Hermitian direction matrices.
    pub fn from_parts(
        base: HermitianMatrix,
        params: Vec<(String, HermitianMatrix)>,
    ) -> Result<Self> {
        let n = base.dim();
        if (base.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "family base has trace {} != 1",
                base.trace()
            )));
        }
        let mut names = std::collections::HashSet::new();
        for (name, b) in &params {
            if b.dim() != n {
                return Err(Error::InvalidInput(format!(
                    "direction {name} has dim {} != {n}",
                    b.dim()
                )));
            }
            if b.trace().abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "direction {name} has nonzero trace {}",
                    b.trace()
                )));
            }
            if !names.insert(name.clone()) {
                return Err(Error::InvalidInput(format!(
                    "duplicate parameter name {name}"
                )));
            }
        }
        Ok(AffineFamily { n, base, params })
    }

    /// Matrix dimension n.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of parameters p.
    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// Parameter names in order.
    pub fn param_names(&self) -> Vec<&str> {
        self.params.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// The constant direction matrix `Bₖ = ∂ρ/∂θₖ`.
    pub fn direction(&self, k: usize) -> &HermitianMatrix {
        &self.params[k].1
    }

    /// The base matrix `ρ(0)`.
    pub fn base(&self) -> &HermitianMatrix {
        &self.base
    }

    /// Evaluates `ρ(θ) = base + Σ θₖ Bₖ`.
    pub fn eval_density(&self, theta: &[f64]) -> Result<HermitianMatrix> {
        if theta.len() != self.params.len() {
            return Err(Error::InvalidInput(format!(
                "theta length {} != parameter count {}",
                theta.len(),
                self.params.len()
            )));
        }
        let mut rho = self.base.clone();
        for (t, (_, b)) in theta.iter().zip(&self.params) {
            if *t != 0.0 {
                rho = rho.add_scaled(b, *t);
            }
        }
        Ok(rho)
    }

    /// Smallest eigenvalue of `ρ(θ)` (−∞ sentinel never occurs; errors
    /// from malformed θ map to −1).
    pub fn min_eigenvalue(&self, theta: &[f64]) -> f64 {
        match self.eval_density(theta).and_then(|rho| eigensystem(&rho)) {
            Ok(es) => *es
                .eigenvalues
                .last()
                .expect("eigensystem of nonempty matrix"),
            Err(_) => -1.0,
        }
    }

    /// True iff every eigenvalue of `ρ(θ)` is ≥ −tol.
    pub fn is_feasible(&self, theta: &[f64], tol: f64) -> bool {
        self.min_eigenvalue(theta) >= -tol
    }
}

// ── JSON family specification ───────────────────────────────────────────────

#[derive(Deserialize)]
struct TermSpecJson {
    word: Vec<u8>,
    coeff: f64,
}

#[derive(Deserialize)]
struct ParamSpecJson {
    name: String,
    terms: Vec<TermSpecJson>,
}

#[derive(Deserialize)]
struct FamilySpecJson {
    dim: usize,
    params: Vec<ParamSpecJson>,
}

/// Loads a Pauli-word family from its JSON description, e.g.
/// `{"dim":4,"params":[{"name":"xi1","terms":[{"word":[1,0],"coeff":1.0}]}]}`.
pub fn family_from_json(doc: &str) -> Result<AffineFamily> {
    let spec: FamilySpecJson = serde_json::from_str(doc)?;
    let mut params: Vec<PauliParamSpec> = Vec::with_capacity(spec.params.len());
    for p in spec.params {
        let mut terms = Vec::with_capacity(p.terms.len());
        for t in p.terms {
            terms.push((PauliWord::new(&t.word)?, t.coeff));
        }
        params.push((p.name, terms));
    }
    let fam = build_family(&params)?;
    if fam.dim() != spec.dim {
        return Err(Error::InvalidInput(format!(
            "declared dim {} but words give dim {}",
            spec.dim,
            fam.dim()
        )));
    }
    Ok(fam)
}

// ── Eigendecomposition ──────────────────────────────────────────────────────

/// Eigenvalues (descending) and matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Eigenvalues sorted descending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl EigenSystem {
    /// Rebuilds `Σ λᵢ |i⟩⟨i|` (test/diagnostic helper).
    pub fn reconstruct(&self) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let mut a = vec![C64::new(0.0, 0.0); n * n];
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] += v[i] * v[j].conj() * *lam;
                }
            }
        }
        HermitianMatrix { n, a }
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Deterministic output: eigenvalues descending; each eigenvector's first
/// component of modulus > 1e-10 is made real positive; exact eigenvalue
/// ties are broken by lexicographic comparison of the phase-fixed vectors.
pub fn eigensystem(h: &HermitianMatrix) -> Result<EigenSystem> {
    let n = h.n;
    for i in 0..n {
        for j in i..n {
            if (h.a[i * n + j] - h.a[j * n + i].conj()).norm() > HERMITICITY_TOL {
                return Err(Error::InvalidInput("matrix is not Hermitian".into()));
            }
        }
    }
    let mut a = h.a.clone();
    // Symmetrize round-off so the rotations see an exactly Hermitian matrix.
    for i in 0..n {
        a[i * n + i] = C64::new(a[i * n + i].re, 0.0);
        for j in i + 1..n {
            let avg = 0.5 * (a[i * n + j] + a[j * n + i].conj());
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);

    let mut converged = false;
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let alpha = a[p * n + p].re;
                let gamma = a[q * n + q].re;
                let tau = (alpha - gamma) / (2.0 * r);
                let t = if tau.abs() > 1e150 {
                    0.5 / tau
                } else {
                    tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let sp = phase * s; // s·e^{iφ}
                let spc = sp.conj(); // s·e^{−iφ}
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_p = akp * c + akq * spc;
                    let new_q = akq * c - akp * sp;
                    a[k * n + p] = new_p;
                    a[p * n + k] = new_p.conj();
                    a[k * n + q] = new_q;
                    a[q * n + k] = new_q.conj();
                }
                let cross = 2.0 * s * c * r;
                a[p * n + p] = C64::new(c * c * alpha + cross + s * s * gamma, 0.0);
                a[q * n + q] = C64::new(s * s * alpha - cross + c * c * gamma, 0.0);
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c + vkq * spc;
                    v[k * n + q] = vkq * c - vkp * sp;
                }
            }
        }
    }
    if !converged {
        // One final check (the loop tests before the last sweep's effect).
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > 1e-13 * scale {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver stalled: off-diagonal norm {off:.3e}"
            )));
        }
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let lam = a[k * n + k].re;
            let mut vec: Vec<C64> = (0..n).map(|i| v[i * n + k]).collect();
            // Phase convention: first significant component real positive.
            if let Some(c0) = vec.iter().find(|z| z.norm() > 1e-10) {
                let ph = c0.conj() / c0.norm();
                for z in &mut vec {
                    *z *= ph;
                }
            }
            (lam, vec)
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        lb.partial_cmp(la)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| lex_cmp(va, vb))
    });
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x
            .re
            .partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
        {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

// ── Tests ───────────────────────────────────────────────────────────────────

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = HermitianMatrix::zeros(n);
        for i in 0..n {
            let d: f64 = rng.gen_range(-1.0..1.0);
            m.set_pair(i, i, C64::new(d, 0.0));
            for j in i + 1..n {
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                m.set_pair(i, j, C64::new(re, im));
            }
        }
        m
    }

    /// The two-axis correlated-pair family used across the test suite:
    /// parameters (xi, zeta) with directions (σz⊗I + I⊗σz)/4 and (σz⊗σz)/4.
    pub(crate) fn correlated_pair_family() -> AffineFamily {
        build_family(&[
            (
                "xi".into(),
                vec![
                    (PauliWord::new(&[3, 0]).unwrap(), 1.0),
                    (PauliWord::new(&[0, 3]).unwrap(), 1.0),
                ],
            ),
            ("zeta".into(), vec![(PauliWord::new(&[3, 3]).unwrap(), 1.0)]),
        ])
        .unwrap()
    }

    /// Polarized-uncorrelated-axis family: polarization along z, correlation
    /// along x. Feasible region is the ellipse 4ξ² + ζ² ≤ 1.
    pub(crate) fn polarized_ellipse_family() -> AffineFamily {
        build_family(&[
            (
                "xi".into(),
                vec![
                    (PauliWord::new(&[3, 0]).unwrap(), 1.0),
                    (PauliWord::new(&[0, 3]).unwrap(), 1.0),
                ],
            ),
            ("zeta".into(), vec![(PauliWord::new(&[1, 1]).unwrap(), 1.0)]),
        ])
        .unwrap()
    }

    #[test]
    fn pauli_letters_match_canonical_forms() {
        let x = pauli_2x2(1);
        assert_eq!(x.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(x.get(1, 0), C64::new(1.0, 0.0));
        let y = pauli_2x2(2);
        assert_eq!(y.get(0, 1), C64::new(0.0, -1.0));
        assert_eq!(y.get(1, 0), C64::new(0.0, 1.0));
        let z = pauli_2x2(3);
        assert_eq!(z.get(0, 0), C64::new(1.0, 0.0));
        assert_eq!(z.get(1, 1), C64::new(-1.0, 0.0));
    }

    #[test]
    fn pauli_word_identity() {
        let w = PauliWord::new(&[0]).unwrap();
        let m = pauli_word_matrix(&w);
        assert_eq!(m.dim(), 2);
        assert_eq!(m.max_abs_diff(&HermitianMatrix::identity_scaled(2, 1.0)), 0.0);
    }

    #[test]
    fn pauli_word_zz_is_diagonal_signs() {
        let m = pauli_word_matrix(&PauliWord::new(&[3, 3]).unwrap());
        let want = [1.0, -1.0, -1.0, 1.0];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(m.get(i, i), C64::new(*w, 0.0));
        }
    }

    #[test]
    fn pauli_word_xx_is_antidiagonal_ones() {
        let m = pauli_word_matrix(&PauliWord::new(&[1, 1]).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(m.get(i, j), C64::new(want, 0.0), "({i},{j})");
            }
        }
    }

    #[test]
    fn pauli_word_squares_to_identity_and_traceless() {
        for letters in [&[1u8, 2][..], &[3, 1], &[2, 2, 3]] {
            let m = pauli_word_matrix(&PauliWord::new(letters).unwrap());
            assert!(m.trace().abs() < 1e-14);
            // M² = I: check via solve (M X = I → X = M).
            let n = m.dim();
            let x = m
                .solve_matrix(&HermitianMatrix::identity_scaled(n, 1.0))
                .unwrap();
            for i in 0..n {
                for j in 0..n {
                    let want = m.get(i, j);
                    assert!((x[i * n + j] - want).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pauli_word_rejects_bad_input() {
        assert!(PauliWord::new(&[]).is_err());
        assert!(PauliWord::new(&[4]).is_err());
        assert!(PauliWord::new(&[0; 7]).is_err());
    }

    #[test]
    fn family_at_origin_is_maximally_mixed() {
        let fam = correlated_pair_family();
        let rho = fam.eval_density(&[0.0, 0.0]).unwrap();
        assert!(rho.max_abs_diff(&HermitianMatrix::identity_scaled(4, 0.25)) < 1e-15);
    }

    #[test]
    fn correlated_pair_eigenvalues() {
        let fam = correlated_pair_family();
        let rho = fam.eval_density(&[0.2, 0.1]).unwrap();
        let es = eigensystem(&rho).unwrap();
        let want = [0.375, 0.225, 0.225, 0.175];
        for (got, want) in es.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn correlated_pair_eigenvectors_are_standard_basis() {
        let fam = correlated_pair_family();
        let rho = fam.eval_density(&[0.2, 0.1]).unwrap();
        let es = eigensystem(&rho).unwrap();
        for v in &es.eigenvectors {
            let ones = v.iter().filter(|z| (z.norm() - 1.0).abs() < 1e-12).count();
            let zeros = v.iter().filter(|z| z.norm() < 1e-12).count();
            assert_eq!(ones, 1);
            assert_eq!(zeros, 3);
        }
    }

    #[test]
    fn density_is_affine_in_parameters() {
        let fam = correlated_pair_family();
        let theta = [0.1, -0.2];
        let rho0 = fam.eval_density(&theta).unwrap();
        for k in 0..2 {
            let mut tp = theta;
            tp[k] += 0.37;
            let rho1 = fam.eval_density(&tp).unwrap();
            let diff = rho1.add_scaled(&rho0, -1.0).scaled(1.0 / 0.37);
            assert!(diff.max_abs_diff(fam.direction(k)) < 1e-14);
        }
    }

    #[test]
    fn trace_is_one_for_feasible_points() {
        let fam = correlated_pair_family();
        for &(x, z) in &[(0.0, 0.0), (0.2, 0.1), (-0.3, 0.2), (0.0, -0.9)] {
            let rho = fam.eval_density(&[x, z]).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn feasibility_examples() {
        let fam = correlated_pair_family();
        assert!(fam.is_feasible(&[0.0, 0.0], 1e-10));
        assert!(!fam.is_feasible(&[0.9, 0.0], 1e-10));
        let ell = polarized_ellipse_family();
        // Boundary of 4ξ² + ζ² = 1 is feasible at loose tolerance.
        let (xi, zeta) = (0.3, (1.0f64 - 4.0 * 0.09).sqrt());
        assert!(ell.is_feasible(&[xi, zeta], 1e-9));
        assert!(!ell.is_feasible(&[xi, zeta + 1e-6], 1e-9));
        // Degenerate boundary of the isotropic single-parameter family: the
        // least eigenvalue hits zero at the end of the feasible range.
        let iso = build_family(&[(
            "zeta".into(),
            vec![
                (PauliWord::new(&[1, 1]).unwrap(), 1.0),
                (PauliWord::new(&[2, 2]).unwrap(), 1.0),
                (PauliWord::new(&[3, 3]).unwrap(), 1.0),
            ],
        )])
        .unwrap();
        let min = iso.min_eigenvalue(&[1.0 / 3.0]);
        assert!(min.abs() < 1e-14);
    }

    #[test]
    fn ellipse_boundary_eigenvalues_degenerate() {
        let ell = polarized_ellipse_family();
        let es = eigensystem(&ell.eval_density(&[0.0, 1.0]).unwrap()).unwrap();
        let want = [0.5, 0.5, 0.0, 0.0];
        for (got, want) in es.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn eigensystem_of_scaled_identity() {
        let es = eigensystem(&HermitianMatrix::identity_scaled(4, 0.25)).unwrap();
        for lam in &es.eigenvalues {
            assert_eq!(*lam, 0.25);
        }
    }

    #[test]
    fn eigensystem_reconstructs_random_matrices() {
        for (n, seed) in [(2usize, 1u64), (4, 2), (8, 3), (8, 4), (16, 5)] {
            let h = random_hermitian(n, seed);
            let es = eigensystem(&h).unwrap();
            assert!(
                es.reconstruct().max_abs_diff(&h) < 1e-12,
                "reconstruction failed at n={n}"
            );
            // Orthonormality.
            for i in 0..n {
                for j in 0..n {
                    let dot: C64 = es.eigenvectors[i]
                        .iter()
                        .zip(&es.eigenvectors[j])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).norm() < 1e-12, "orthonormality ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn eigensystem_reconstructs_dim_64() {
        let h = random_hermitian(64, 99);
        let es = eigensystem(&h).unwrap();
        assert!(es.reconstruct().max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn eigensystem_handles_degenerate_clusters() {
        // Build P·1 + Q·2 with P a rank-2 projector: doubly degenerate pair.
        let fam = correlated_pair_family();
        let rho = fam.eval_density(&[0.2, 0.1]).unwrap(); // eigs .375 .225 .225 .175
        let es = eigensystem(&rho).unwrap();
        assert!((es.eigenvalues[1] - es.eigenvalues[2]).abs() < 1e-14);
        assert!(es.reconstruct().max_abs_diff(&rho) < 1e-13);
    }

    #[test]
    fn eigensystem_rejects_non_hermitian() {
        let mut bad = HermitianMatrix::zeros(2);
        bad.a[1] = C64::new(1.0, 0.0);
        bad.a[2] = C64::new(0.5, 0.0);
        assert!(eigensystem(&bad).is_err());
    }

    #[test]
    fn eigenvector_phase_convention_is_deterministic() {
        let h = random_hermitian(6, 7);
        let es = eigensystem(&h).unwrap();
        for v in &es.eigenvectors {
            let first = v.iter().find(|z| z.norm() > 1e-10).unwrap();
            assert!(first.im.abs() < 1e-12);
            assert!(first.re > 0.0);
        }
    }

    #[test]
    fn solve_matrix_inverts() {
        let h = random_hermitian(5, 11).add_scaled(&HermitianMatrix::identity_scaled(5, 4.0), 1.0);
        let x = h
            .solve_matrix(&HermitianMatrix::identity_scaled(5, 1.0))
            .unwrap();
        // h · x should be I: residual check via trace and entries.
        let n = 5;
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += h.get(i, k) * x[k * n + j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((acc - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lu_solve_real_small_system() {
        let mut a = vec![2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let mut b = vec![8.0, -11.0, -3.0];
        lu_solve_real(&mut a, &mut b, 3).unwrap();
        let want = [2.0, 3.0, -1.0];
        for (got, want) in b.iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn family_builder_rejects_bad_specs() {
        let w2 = PauliWord::new(&[3, 0]).unwrap();
        let w1 = PauliWord::new(&[3]).unwrap();
        assert!(build_family(&[
            ("a".into(), vec![(w2.clone(), 1.0)]),
            ("b".into(), vec![(w1, 1.0)]),
        ])
        .is_err());
        assert!(build_family(&[
            ("a".into(), vec![(w2.clone(), 1.0)]),
            ("a".into(), vec![(w2.clone(), 2.0)]),
        ])
        .is_err());
        assert!(build_family(&[]).is_err());
        let fam = build_family(&[("a".into(), vec![(w2, 1.0)])]).unwrap();
        assert!(fam.eval_density(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn json_family_roundtrip() {
        let doc = r#"{"dim":4,"params":[
            {"name":"xi","terms":[{"word":[3,0],"coeff":1.0},{"word":[0,3],"coeff":1.0}]},
            {"name":"zeta","terms":[{"word":[3,3],"coeff":1.0}]}]}"#;
        let fam = family_from_json(doc).unwrap();
        let reference = correlated_pair_family();
        let a = fam.eval_density(&[0.2, 0.1]).unwrap();
        let b = reference.eval_density(&[0.2, 0.1]).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
        assert!(family_from_json(r#"{"dim":8,"params":[{"name":"x","terms":[{"word":[3,0],"coeff":1.0}]}]}"#).is_err());
    }

    #[test]
    fn general_base_family_with_nonmixed_origin() {
        // Three-level family whose origin is a pure middle level, not I/3.
        let base = HermitianMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let bv = HermitianMatrix::from_rows(&[
            vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
        ])
        .unwrap();
        let fam = AffineFamily::from_parts(base, vec![("v".into(), bv)]).unwrap();
        let rho = fam.eval_density(&[1.0]).unwrap();
        let want = HermitianMatrix::from_rows(&[
            vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
        ])
        .unwrap();
        assert!(rho.max_abs_diff(&want) < 1e-15);
    }
}
