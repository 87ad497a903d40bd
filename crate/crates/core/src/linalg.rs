//! Dense complex linear algebra kernels shared by every module.
//!
//! Everything here works on plain `nalgebra` dynamic matrices over
//! `Complex64`.  Eigendecompositions are only ever taken of Hermitian
//! matrices; inputs are symmetrized first so the spectral routines see an
//! exactly Hermitian argument.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Inner product linear in the first argument: `⟨u, v⟩ = Σ u_a conj(v_a)`.
pub fn inner(u: &CVec, v: &CVec) -> Complex64 {
    v.dotc(u)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * cr(0.5)
}

/// Distance of `m` from its Hermitian part in operator norm.
pub fn hermitian_defect(m: &CMat) -> f64 {
    op_norm(&((m - m.adjoint()) * cr(0.5)))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors, in the order of `values`.
    pub vectors: CMat,
}

impl HermitianEig {
    /// `U f(D) U*` for a scalar function applied to the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        self.apply_complex(|t| cr(f(t)))
    }

    /// `U f(D) U*` for a complex-valued function of the eigenvalues.
    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let flam = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= flam;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition; the input is symmetrized before the solve.
pub fn hermitian_eig(m: &CMat) -> HermitianEig {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eig requires a square matrix");
    if n == 0 {
        return HermitianEig { values: Vec::new(), vectors: CMat::zeros(0, 0) };
    }
    let se = nalgebra::SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    HermitianEig { values, vectors }
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().max()
}

/// Frobenius-type norm `sqrt(Σ |m_ij|²)`.
pub fn frob_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Orthonormal basis for the span of `columns`, via SVD with a relative
/// rank cutoff.
pub fn orthonormal_span(columns: &[CVec], rel_tol: f64) -> CMat {
    if columns.is_empty() {
        return CMat::zeros(0, 0);
    }
    let dim = columns[0].len();
    let mut m = CMat::zeros(dim, columns.len());
    for (j, col) in columns.iter().enumerate() {
        m.set_column(j, col);
    }
    let svd = nalgebra::SVD::new(m, true, false);
    let u = svd.u.expect("svd computed with u");
    let smax = svd.singular_values.max();
    if smax == 0.0 || !smax.is_finite() {
        return CMat::zeros(dim, 0);
    }
    let rank = svd.singular_values.iter().filter(|&&s| s > rel_tol * smax).count();
    u.columns(0, rank).into_owned()
}

/// Orthonormal basis of the null space of a Hermitian PSD form; eigenvalues
/// below `cut` count as zero.
pub fn hermitian_null_space(g: &CMat, cut: f64) -> CMat {
    let eig = hermitian_eig(g);
    let idx: Vec<usize> =
        (0..eig.values.len()).filter(|&i| eig.values[i].abs() < cut).collect();
    let mut basis = CMat::zeros(g.nrows(), idx.len());
    for (dst, &src) in idx.iter().enumerate() {
        basis.set_column(dst, &eig.vectors.column(src));
    }
    basis
}

/// Columns of the identity not captured by the isometry `v` (orthocomplement
/// of the column span of `v`, as an orthonormal basis).
pub fn orthocomplement(v: &CMat, dim: usize) -> CMat {
    // Complement = null space of v v^H restricted away from the column span.
    let p = v * v.adjoint();
    let eig = hermitian_eig(&(identity(dim) - p));
    let idx: Vec<usize> = (0..dim).filter(|&i| eig.values[i] > 0.5).collect();
    let mut basis = CMat::zeros(dim, idx.len());
    for (dst, &src) in idx.iter().enumerate() {
        basis.set_column(dst, &eig.vectors.column(src));
    }
    basis
}

/// Largest generalized eigenvalue of the Hermitian pencil `(a, g)` with
/// `g` positive definite: max over x of `x*ax / x*gx`.
pub fn max_generalized_eigenvalue(a: &CMat, g: &CMat) -> f64 {
    let ge = hermitian_eig(g);
    // g^{-1/2} a g^{-1/2}, Hermitian.
    let g_inv_half = ge.apply(|t| 1.0 / t.max(f64::MIN_POSITIVE).sqrt());
    let m = &g_inv_half * a * &g_inv_half;
    hermitian_eig(&m).max_value()
}

/// Isometric polar factor of `t` (tall or square): `t = w p` with
/// `w^H w = I`.
pub fn polar_isometry(t: &CMat) -> CMat {
    let svd = nalgebra::SVD::new(t.clone(), true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    let k = svd.singular_values.len().min(t.ncols());
    u.columns(0, k).into_owned() * vt.rows(0, k).into_owned()
}
