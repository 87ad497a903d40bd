//! Finite-dimensional tracial von Neumann algebras: finite direct sums of
//! full matrix blocks `M_{n_1} ⊕ … ⊕ M_{n_r}` carrying the faithful trace
//! `τ(x) = Σ_k λ_k tr(x_k)` with strictly positive weights normalized so
//! that `τ(1) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{CorrError, Result};
use crate::linalg::{self, cr, CMat, CVec, HermitianEig};
use num_complex::Complex64;

/// Tolerance below which an element counts as self-adjoint.
pub const SELF_ADJOINT_TOL: f64 = 1e-10;

/// Default cap on the linear dimension `Σ n_k²` of an algebra; every
/// construction here is exact and dense at this scale.
pub const DEFAULT_DIM_CAP: usize = 64;

/// A finite direct sum of matrix blocks with a weighted faithful trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracialAlgebra {
    blocks: Vec<usize>,
    weights: Vec<f64>,
}

impl TracialAlgebra {
    /// Build an algebra from block sizes and trace weights.  Requires
    /// `n_k ≥ 1`, `λ_k > 0`, `Σ λ_k n_k = 1` up to `1e-12`, and total
    /// linear dimension within [`DEFAULT_DIM_CAP`].
    pub fn new(blocks: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        Self::with_dim_cap(blocks, weights, DEFAULT_DIM_CAP)
    }

    /// [`Self::new`] with an explicit dimension cap.
    pub fn with_dim_cap(blocks: Vec<usize>, weights: Vec<f64>, cap: usize) -> Result<Self> {
        if blocks.is_empty() || blocks.len() != weights.len() {
            return Err(CorrError::Structural(format!(
                "need matching nonempty blocks/weights, got {}/{}",
                blocks.len(),
                weights.len()
            )));
        }
        if blocks.contains(&0) {
            return Err(CorrError::Domain("block sizes must be ≥ 1".into()));
        }
        let dim: usize = blocks.iter().map(|&n| n * n).sum();
        if dim > cap {
            return Err(CorrError::Domain(format!(
                "algebra dimension {dim} exceeds the cap {cap}"
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(CorrError::Domain("trace weights must be > 0".into()));
        }
        let total: f64 = blocks.iter().zip(&weights).map(|(&n, &w)| w * n as f64).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(CorrError::Domain(format!(
                "trace not normalized: Σ λ_k n_k = {total}, expected 1"
            )));
        }
        Ok(Self { blocks, weights })
    }

    /// The Markov weights `λ_k = n_k / Σ n_j²`.
    pub fn markov(blocks: Vec<usize>) -> Result<Self> {
        let denom: f64 = blocks.iter().map(|&n| (n * n) as f64).sum();
        if denom == 0.0 {
            return Err(CorrError::Domain("empty algebra".into()));
        }
        let weights = blocks.iter().map(|&n| n as f64 / denom).collect();
        Self::new(blocks, weights)
    }

    /// The full matrix factor `M_n` with its normalized trace.
    pub fn factor(n: usize) -> Self {
        Self::markov(vec![n]).expect("n ≥ 1")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Linear dimension `Σ n_k²` of the algebra.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|&n| n * n).sum()
    }

    /// Offset of block `k` in the canonical coordinate layout.
    fn block_offset(&self, k: usize) -> usize {
        self.blocks[..k].iter().map(|&n| n * n).sum()
    }

    /// Canonical linear index of the matrix unit `e^{(k)}_{ij}`.
    pub fn unit_index(&self, k: usize, i: usize, j: usize) -> usize {
        self.block_offset(k) + i * self.blocks[k] + j
    }

    /// Block and entry coordinates for a canonical linear index.
    pub fn unit_position(&self, idx: usize) -> (usize, usize, usize) {
        let mut rest = idx;
        for (k, &n) in self.blocks.iter().enumerate() {
            if rest < n * n {
                return (k, rest / n, rest % n);
            }
            rest -= n * n;
        }
        panic!("unit index {idx} out of range for algebra of dim {}", self.dim());
    }

    /// The matrix unit `e^{(k)}_{ij}` as an element.
    pub fn unit(&self, k: usize, i: usize, j: usize) -> AlgebraElement {
        let mut x = AlgebraElement::zero(self);
        x.blocks[k][(i, j)] = cr(1.0);
        x
    }

    /// All matrix units in canonical order.
    pub fn units(&self) -> Vec<AlgebraElement> {
        let mut out = Vec::with_capacity(self.dim());
        for (k, &n) in self.blocks.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.push(self.unit(k, i, j));
                }
            }
        }
        out
    }

    /// A spanning family of positive elements: the diagonal units together
    /// with the rank-one combinations `(e_ii + e_jj ± (e_ij + e_ji))/2` and
    /// `(e_ii + e_jj ± i(e_ij − e_ji))/2`.
    pub fn positive_spanning_set(&self) -> Vec<AlgebraElement> {
        let mut out = Vec::new();
        for (k, &n) in self.blocks.iter().enumerate() {
            for i in 0..n {
                out.push(self.unit(k, i, i));
                for j in (i + 1)..n {
                    for &(s_re, s_im) in &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                        let mut x = AlgebraElement::zero(self);
                        x.blocks[k][(i, i)] = cr(0.5);
                        x.blocks[k][(j, j)] = cr(0.5);
                        let s = Complex64::new(s_re, s_im) * cr(0.5);
                        x.blocks[k][(i, j)] = s;
                        x.blocks[k][(j, i)] = s.conj();
                        out.push(x);
                    }
                }
            }
        }
        out
    }

    /// Trace weight attached to the unit with canonical index `idx`.
    pub fn unit_weight(&self, idx: usize) -> f64 {
        let (k, _, _) = self.unit_position(idx);
        self.weights[k]
    }

    /// Reconstruct the element `h` from the values `vals[a] = τ(e_a · h)` of
    /// the trace pairing against every matrix unit.
    pub fn from_trace_pairing(&self, vals: &CVec) -> Result<AlgebraElement> {
        if vals.len() != self.dim() {
            return Err(CorrError::Structural(format!(
                "pairing data has length {}, algebra dim {}",
                vals.len(),
                self.dim()
            )));
        }
        let mut h = AlgebraElement::zero(self);
        for a in 0..self.dim() {
            let (k, i, j) = self.unit_position(a);
            // τ(e_ij h) = λ_k h_ji
            h.blocks[k][(j, i)] = vals[a] / cr(self.weights[k]);
        }
        Ok(h)
    }
}

/// An element of a [`TracialAlgebra`], stored as one dense complex matrix
/// per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    algebra: TracialAlgebra,
    blocks: Vec<CMat>,
}

impl AlgebraElement {
    pub fn zero(algebra: &TracialAlgebra) -> Self {
        let blocks = algebra.blocks.iter().map(|&n| CMat::zeros(n, n)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn identity(algebra: &TracialAlgebra) -> Self {
        let blocks = algebra.blocks.iter().map(|&n| CMat::identity(n, n)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn scalar(algebra: &TracialAlgebra, z: Complex64) -> Self {
        let blocks = algebra.blocks.iter().map(|&n| CMat::identity(n, n) * z).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn from_blocks(algebra: &TracialAlgebra, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(CorrError::Structural(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (k, (&n, b)) in algebra.blocks.iter().zip(&blocks).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(CorrError::Structural(format!(
                    "block {k} has shape {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    /// Diagonal element of a single-block algebra; handy in tests.
    pub fn diagonal(algebra: &TracialAlgebra, entries: &[f64]) -> Result<Self> {
        if algebra.num_blocks() != 1 || algebra.blocks[0] != entries.len() {
            return Err(CorrError::Structural("diagonal: need one block of matching size".into()));
        }
        let m = CMat::from_diagonal(&CVec::from_iterator(entries.len(), entries.iter().map(|&t| cr(t))));
        Self::from_blocks(algebra, vec![m])
    }

    pub fn algebra(&self) -> &TracialAlgebra {
        &self.algebra
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    /// Entry coordinates in the canonical matrix-unit basis.
    pub fn coords(&self) -> CVec {
        let mut out = CVec::zeros(self.algebra.dim());
        let mut pos = 0;
        for (k, &n) in self.algebra.blocks.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out[pos] = self.blocks[k][(i, j)];
                    pos += 1;
                }
            }
        }
        out
    }

    pub fn from_coords(algebra: &TracialAlgebra, coords: &CVec) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return Err(CorrError::Structural(format!(
                "coordinate vector of length {}, algebra dim {}",
                coords.len(),
                algebra.dim()
            )));
        }
        let mut x = Self::zero(algebra);
        let mut pos = 0;
        for (k, &n) in algebra.blocks.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    x.blocks[k][(i, j)] = coords[pos];
                    pos += 1;
                }
            }
        }
        Ok(x)
    }

    pub fn adjoint(&self) -> Self {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        Self { algebra: self.algebra.clone(), blocks }
    }

    /// The weighted trace `τ(x) = Σ λ_k tr(x_k)`.
    pub fn trace(&self) -> Complex64 {
        self.blocks
            .iter()
            .zip(&self.algebra.weights)
            .map(|(b, &w)| b.trace() * cr(w))
            .sum()
    }

    /// `⟨x, y⟩ = τ(y* x)`, the L²(τ) inner product.
    pub fn l2_inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .zip(&self.algebra.weights)
            .map(|((a, b), &w)| (b.adjoint() * a).trace() * cr(w))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_inner(self).re.max(0.0).sqrt()
    }

    /// Operator norm: the largest singular value over the blocks.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn self_adjoint_defect(&self) -> f64 {
        self.blocks.iter().map(linalg::hermitian_defect).fold(0.0, f64::max)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.self_adjoint_defect() <= tol
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let blocks = self.blocks.iter().map(|b| b * z).collect();
        Self { algebra: self.algebra.clone(), blocks }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        Self { algebra: self.algebra.clone(), blocks }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Self { algebra: self.algebra.clone(), blocks }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect();
        Self { algebra: self.algebra.clone(), blocks }
    }

    /// Blockwise eigendata; fails if the element is not self-adjoint within
    /// [`SELF_ADJOINT_TOL`].  The element is symmetrized before the solve.
    pub fn eigen(&self) -> Result<SelfAdjointWitness> {
        let defect = self.self_adjoint_defect();
        if defect > SELF_ADJOINT_TOL {
            return Err(CorrError::Domain(format!(
                "element is not self-adjoint: defect {defect:.3e}"
            )));
        }
        let eigs: Vec<HermitianEig> = self.blocks.iter().map(linalg::hermitian_eig).collect();
        let sym = Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(linalg::hermitian_part).collect(),
        };
        let witness = SelfAdjointWitness { element: sym, eigs };
        witness.check_reconstruction()?;
        Ok(witness)
    }

    /// Spectral functional calculus `f(x)` for self-adjoint `x`.
    pub fn functional_calculus(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Ok(self.eigen()?.apply(f))
    }

    /// Self-adjointness plus spectrum check: positive iff self-adjoint
    /// within `tol` and min eigenvalue ≥ −`tol`.
    pub fn positivity_check(&self, tol: f64) -> Positivity {
        let defect = self.self_adjoint_defect();
        let min_eigenvalue = self
            .blocks
            .iter()
            .map(|b| linalg::hermitian_eig(b).min_value())
            .fold(f64::INFINITY, f64::min);
        let min_eigenvalue = if min_eigenvalue.is_finite() { min_eigenvalue } else { 0.0 };
        Positivity { is_positive: defect <= tol && min_eigenvalue >= -tol, min_eigenvalue }
    }

    /// Spectral projection onto eigenvalues strictly above `threshold`
    /// (with a tolerance band: eigenvalues within `band` of the threshold
    /// are not cut).
    pub fn spectral_projection_above(&self, threshold: f64, band: f64) -> Result<Self> {
        self.functional_calculus(|t| if t > threshold + band { 1.0 } else { 0.0 })
    }

    /// The element as one block-diagonal matrix of size `Σ n_k`.
    pub fn block_diagonal(&self) -> CMat {
        let total: usize = self.algebra.blocks.iter().sum();
        let mut out = CMat::zeros(total, total);
        let mut off = 0;
        for (b, &n) in self.blocks.iter().zip(&self.algebra.blocks) {
            out.view_mut((off, off), (n, n)).copy_from(b);
            off += n;
        }
        out
    }
}

/// Outcome of a positivity check.
#[derive(Clone, Copy, Debug)]
pub struct Positivity {
    pub is_positive: bool,
    pub min_eigenvalue: f64,
}

/// Blockwise eigendata `x = U diag(λ) U*` for a self-adjoint element.
#[derive(Clone, Debug)]
pub struct SelfAdjointWitness {
    element: AlgebraElement,
    eigs: Vec<HermitianEig>,
}

impl SelfAdjointWitness {
    pub fn element(&self) -> &AlgebraElement {
        &self.element
    }

    pub fn eigenvalues(&self, block: usize) -> &[f64] {
        &self.eigs[block].values
    }

    pub fn all_eigenvalues(&self) -> Vec<f64> {
        self.eigs.iter().flat_map(|e| e.values.iter().copied()).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigs.iter().map(HermitianEig::min_value).fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigs.iter().map(HermitianEig::max_value).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> AlgebraElement {
        let blocks = self.eigs.iter().map(|e| e.apply(&f)).collect();
        AlgebraElement { algebra: self.element.algebra.clone(), blocks }
    }

    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> AlgebraElement {
        let blocks = self.eigs.iter().map(|e| e.apply_complex(&f)).collect();
        AlgebraElement { algebra: self.element.algebra.clone(), blocks }
    }

    /// Reconstruction residual must stay below `1e-12` relative to the
    /// block norm.
    fn check_reconstruction(&self) -> Result<()> {
        for (k, eig) in self.eigs.iter().enumerate() {
            let rec = eig.apply(|t| t);
            let resid = linalg::op_norm(&(rec - &self.element.blocks[k]));
            let scale = linalg::op_norm(&self.element.blocks[k]).max(1.0);
            if resid > 1e-12 * scale {
                return Err(CorrError::Domain(format!(
                    "eigendecomposition residual {resid:.3e} in block {k}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn m2() -> TracialAlgebra {
        TracialAlgebra::factor(2)
    }

    #[test]
    fn markov_weights_normalize() {
        let alg = TracialAlgebra::markov(vec![2, 3]).unwrap();
        let total: f64 =
            alg.blocks().iter().zip(alg.weights()).map(|(&n, &w)| w * n as f64).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_weights() {
        assert!(TracialAlgebra::new(vec![2], vec![1.0]).is_err());
        assert!(TracialAlgebra::new(vec![2], vec![-0.5]).is_err());
        assert!(TracialAlgebra::new(vec![0], vec![1.0]).is_err());
    }

    #[test]
    fn trace_of_identity_is_one() {
        let alg = TracialAlgebra::markov(vec![2, 3]).unwrap();
        let one = AlgebraElement::identity(&alg);
        assert!((one.trace() - cr(1.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_of_unit_is_weight() {
        let alg = m2();
        let e11 = alg.unit(0, 0, 0);
        assert!((e11.trace() - cr(0.5)).norm() < 1e-15);
    }

    #[test]
    fn trace_is_unitarily_invariant() {
        let alg = TracialAlgebra::markov(vec![2, 2]).unwrap();
        let mut rng = random::rng(7);
        for _ in 0..100 {
            let x = random::element(&alg, &mut rng);
            let u = random::unitary(&alg, &mut rng);
            let conj = u.mul(&x).mul(&u.adjoint());
            assert!((conj.trace() - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_is_cyclic() {
        let alg = TracialAlgebra::markov(vec![3]).unwrap();
        let mut rng = random::rng(11);
        for _ in 0..50 {
            let x = random::element(&alg, &mut rng);
            let y = random::element(&alg, &mut rng);
            let d = (x.mul(&y).trace() - y.mul(&x).trace()).norm();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn functional_calculus_identity_function() {
        let alg = m2();
        let x = AlgebraElement::diagonal(&alg, &[2.0, 1.0]).unwrap();
        let y = x.functional_calculus(|t| t).unwrap();
        assert!(y.sub(&x).op_norm() < 1e-12);
    }

    #[test]
    fn functional_calculus_min_cutoff() {
        let alg = m2();
        let x = AlgebraElement::diagonal(&alg, &[4.0, 1.0]).unwrap();
        let y = x.functional_calculus(|t| t.min(1.0)).unwrap();
        let expect = AlgebraElement::identity(&alg);
        assert!(y.sub(&expect).op_norm() < 1e-12);
    }

    #[test]
    fn functional_calculus_inverse_sqrt_cap() {
        // f(t) = min{1, t^{-1/2}} on diag(4, 1) is diag(1/2, 1).
        let alg = m2();
        let x = AlgebraElement::diagonal(&alg, &[4.0, 1.0]).unwrap();
        let y = x.functional_calculus(|t| if t > 1.0 { t.powf(-0.5) } else { 1.0 }).unwrap();
        let expect = AlgebraElement::diagonal(&alg, &[0.5, 1.0]).unwrap();
        assert!(y.sub(&expect).op_norm() < 1e-12);
    }

    #[test]
    fn functional_calculus_rejects_non_self_adjoint() {
        let alg = m2();
        let x = alg.unit(0, 0, 1);
        assert!(x.functional_calculus(|t| t).is_err());
    }

    #[test]
    fn positivity_examples() {
        let alg = m2();
        let one = AlgebraElement::identity(&alg);
        let p = one.positivity_check(1e-10);
        assert!(p.is_positive);
        assert!((p.min_eigenvalue - 1.0).abs() < 1e-12);

        let mixed = AlgebraElement::diagonal(&alg, &[1.0, -1.0]).unwrap();
        let p = mixed.positivity_check(1e-10);
        assert!(!p.is_positive);
        assert!((p.min_eigenvalue + 1.0).abs() < 1e-12);
    }

    #[test]
    fn squares_are_positive() {
        let alg = TracialAlgebra::markov(vec![2, 3]).unwrap();
        let mut rng = random::rng(3);
        for _ in 0..50 {
            let x = random::element(&alg, &mut rng);
            let sq = x.adjoint().mul(&x);
            assert!(sq.positivity_check(1e-10).is_positive);
        }
    }

    #[test]
    fn trace_pairing_round_trip() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let mut rng = random::rng(5);
        for _ in 0..50 {
            let x = random::element(&alg, &mut rng);
            let vals = CVec::from_iterator(
                alg.dim(),
                alg.units().iter().map(|e| e.mul(&x).trace()),
            );
            let back = alg.from_trace_pairing(&vals).unwrap();
            assert!(back.sub(&x).op_norm() < 1e-10);
        }
    }

    #[test]
    fn op_norm_submultiplicative_and_star_invariant() {
        let alg = TracialAlgebra::markov(vec![2, 2]).unwrap();
        let mut rng = random::rng(13);
        for _ in 0..1000 {
            let x = random::element(&alg, &mut rng);
            let y = random::element(&alg, &mut rng);
            assert!(x.mul(&y).op_norm() <= x.op_norm() * y.op_norm() + 1e-10);
            assert!((x.adjoint().op_norm() - x.op_norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_mapping_for_polynomials() {
        let alg = TracialAlgebra::markov(vec![3]).unwrap();
        let mut rng = random::rng(17);
        let poly = |t: f64| 2.0 * t * t - t + 0.25;
        for _ in 0..20 {
            let x = random::self_adjoint(&alg, &mut rng);
            let spec_x = x.eigen().unwrap().all_eigenvalues();
            let y = x.functional_calculus(poly).unwrap();
            let mut spec_y = y.eigen().unwrap().all_eigenvalues();
            let mut mapped: Vec<f64> = spec_x.iter().map(|&t| poly(t)).collect();
            mapped.sort_by(f64::total_cmp);
            spec_y.sort_by(f64::total_cmp);
            for (a, b) in mapped.iter().zip(&spec_y) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn positive_spanning_set_is_positive_and_spans() {
        let alg = TracialAlgebra::markov(vec![2, 2]).unwrap();
        let set = alg.positive_spanning_set();
        for p in &set {
            assert!(p.positivity_check(1e-12).is_positive);
        }
        let cols: Vec<CVec> = set.iter().map(AlgebraElement::coords).collect();
        let basis = linalg::orthonormal_span(&cols, 1e-10);
        assert_eq!(basis.ncols(), alg.dim());
    }
}
