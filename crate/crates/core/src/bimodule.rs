//! Correspondences (M-N bimodules) at finite dimension: a Hilbert space
//! carrying a unital *-representation of the left algebra and a commuting
//! unital *-anti-representation of the right algebra.
//!
//! Representations are stored as one matrix per matrix unit of the acting
//! algebra; the algebra laws are validated numerically rather than enforced
//! structurally, so deliberately broken inputs can be built for negative
//! tests.

use crate::error::{CorrError, Result};
use crate::linalg::{self, cr, CMat, CVec};
use crate::matalg::{AlgebraElement, TracialAlgebra};
use num_complex::Complex64;

/// A vector of a correspondence, in the coordinates fixed by its owner.
pub type CorrVector = CVec;

/// An M-N correspondence with dense representation matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Correspondence {
    left: TracialAlgebra,
    right: TracialAlgebra,
    dim: usize,
    /// One matrix per matrix unit of the left algebra, canonical order.
    left_rep: Vec<CMat>,
    /// One matrix per matrix unit of the right algebra, canonical order.
    right_rep: Vec<CMat>,
}

impl Correspondence {
    pub fn new(
        left: TracialAlgebra,
        right: TracialAlgebra,
        dim: usize,
        left_rep: Vec<CMat>,
        right_rep: Vec<CMat>,
    ) -> Result<Self> {
        if left_rep.len() != left.dim() || right_rep.len() != right.dim() {
            return Err(CorrError::Structural(format!(
                "need {} left and {} right representation matrices, got {} and {}",
                left.dim(),
                right.dim(),
                left_rep.len(),
                right_rep.len()
            )));
        }
        for m in left_rep.iter().chain(right_rep.iter()) {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(CorrError::Structural(format!(
                    "representation matrix has shape {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { left, right, dim, left_rep, right_rep })
    }

    pub fn left_algebra(&self) -> &TracialAlgebra {
        &self.left
    }

    pub fn right_algebra(&self) -> &TracialAlgebra {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether this is an M-M correspondence over a single algebra.
    pub fn is_two_sided(&self) -> bool {
        self.left == self.right
    }

    pub fn left_unit_matrix(&self, idx: usize) -> &CMat {
        &self.left_rep[idx]
    }

    pub fn right_unit_matrix(&self, idx: usize) -> &CMat {
        &self.right_rep[idx]
    }

    /// Matrix of the left action of an arbitrary element.
    pub fn left_matrix(&self, x: &AlgebraElement) -> CMat {
        assert_eq!(
            x.algebra(),
            &self.left,
            "element does not belong to the left algebra"
        );
        let coords = x.coords();
        let mut out = CMat::zeros(self.dim, self.dim);
        for (a, m) in self.left_rep.iter().enumerate() {
            let z = coords[a];
            if z != Complex64::ZERO {
                out += m * z;
            }
        }
        out
    }

    /// Matrix of the right action of an arbitrary element.
    pub fn right_matrix(&self, x: &AlgebraElement) -> CMat {
        assert_eq!(
            x.algebra(),
            &self.right,
            "element does not belong to the right algebra"
        );
        let coords = x.coords();
        let mut out = CMat::zeros(self.dim, self.dim);
        for (a, m) in self.right_rep.iter().enumerate() {
            let z = coords[a];
            if z != Complex64::ZERO {
                out += m * z;
            }
        }
        out
    }

    /// `x ξ`.
    pub fn act_left(&self, x: &AlgebraElement, v: &CVec) -> CVec {
        self.left_matrix(x) * v
    }

    /// `ξ x`.
    pub fn act_right(&self, x: &AlgebraElement, v: &CVec) -> CVec {
        self.right_matrix(x) * v
    }

    /// `⟨u, v⟩`, linear in the first argument.
    pub fn inner(&self, u: &CVec, v: &CVec) -> Complex64 {
        linalg::inner(u, v)
    }

    /// Conjugate both representations by a unitary.
    pub fn conjugate(&self, u: &CMat) -> Self {
        let uh = u.adjoint();
        Self {
            left: self.left.clone(),
            right: self.right.clone(),
            dim: self.dim,
            left_rep: self.left_rep.iter().map(|m| u * m * &uh).collect(),
            right_rep: self.right_rep.iter().map(|m| u * m * &uh).collect(),
        }
    }

    /// Compress onto the column span of the isometry `basis` (dim × r with
    /// orthonormal columns).  Returns the compressed correspondence and the
    /// invariance defect of the subspace.
    pub fn compress(&self, basis: &CMat) -> Result<(Self, f64)> {
        if basis.nrows() != self.dim {
            return Err(CorrError::Structural(format!(
                "basis has {} rows, correspondence dim {}",
                basis.nrows(),
                self.dim
            )));
        }
        let bh = basis.adjoint();
        let proj_out = linalg::identity(self.dim) - basis * &bh;
        let mut defect: f64 = 0.0;
        let mut comp = |reps: &[CMat]| -> Vec<CMat> {
            reps.iter()
                .map(|m| {
                    let mb = m * basis;
                    defect = defect.max(linalg::op_norm(&(&proj_out * &mb)));
                    &bh * mb
                })
                .collect()
        };
        let left_rep = comp(&self.left_rep);
        let right_rep = comp(&self.right_rep);
        let compressed = Self {
            left: self.left.clone(),
            right: self.right.clone(),
            dim: basis.ncols(),
            left_rep,
            right_rep,
        };
        Ok((compressed, defect))
    }

    /// The trivial M-M correspondence: the algebra as a Hilbert space under
    /// `⟨a, b⟩ = τ(b* a)`, acted on by multiplication from both sides.
    ///
    /// Coordinates scale the matrix-unit entries by `√λ_k` so that the
    /// standard inner product of coordinates equals the L²(τ) inner product.
    pub fn trivial(alg: &TracialAlgebra) -> Self {
        let dim = alg.dim();
        let mut left_rep = Vec::with_capacity(dim);
        let mut right_rep = Vec::with_capacity(dim);
        for a in 0..dim {
            let (k, i, j) = alg.unit_position(a);
            let n = alg.blocks()[k];
            let mut l = CMat::zeros(dim, dim);
            let mut r = CMat::zeros(dim, dim);
            for b in 0..n {
                // e_ij x: row i of the product holds row j of x.
                l[(alg.unit_index(k, i, b), alg.unit_index(k, j, b))] = cr(1.0);
                // x e_ij: column j of the product holds column i of x.
                r[(alg.unit_index(k, b, j), alg.unit_index(k, b, i))] = cr(1.0);
            }
            left_rep.push(l);
            right_rep.push(r);
        }
        Self { left: alg.clone(), right: alg.clone(), dim, left_rep, right_rep }
    }

    /// Coordinates of an algebra element viewed as a vector of the trivial
    /// correspondence (entries scaled by `√λ_k`).
    pub fn trivial_coords(x: &AlgebraElement) -> CVec {
        let alg = x.algebra();
        let mut out = CVec::zeros(alg.dim());
        for a in 0..alg.dim() {
            let (k, i, j) = alg.unit_position(a);
            out[a] = x.block(k)[(i, j)] * cr(alg.weights()[k].sqrt());
        }
        out
    }

    /// Inverse of [`Self::trivial_coords`].
    pub fn element_from_trivial_coords(alg: &TracialAlgebra, v: &CVec) -> Result<AlgebraElement> {
        if v.len() != alg.dim() {
            return Err(CorrError::Structural(format!(
                "coordinate vector of length {}, algebra dim {}",
                v.len(),
                alg.dim()
            )));
        }
        let mut x = AlgebraElement::zero(alg);
        let mut blocks: Vec<CMat> = x.blocks().to_vec();
        for a in 0..alg.dim() {
            let (k, i, j) = alg.unit_position(a);
            blocks[k][(i, j)] = v[a] / cr(alg.weights()[k].sqrt());
        }
        x = AlgebraElement::from_blocks(alg, blocks)?;
        Ok(x)
    }

    /// The coarse M-N correspondence `L²(M) ⊗ L²(N)` with the left action on
    /// the first tensor leg and the right action on the second.
    pub fn coarse(left: &TracialAlgebra, right: &TracialAlgebra) -> Self {
        let tl = Self::trivial(left);
        let tr = Self::trivial(right);
        let (dl, dr) = (tl.dim, tr.dim);
        let il = linalg::identity(dl);
        let ir = linalg::identity(dr);
        let left_rep = tl.left_rep.iter().map(|m| linalg::kron(m, &ir)).collect();
        let right_rep = tr.right_rep.iter().map(|m| linalg::kron(&il, m)).collect();
        Self { left: left.clone(), right: right.clone(), dim: dl * dr, left_rep, right_rep }
    }

    /// Direct sum with multiplicities; all parts must share both algebras.
    pub fn direct_sum(parts: &[Correspondence], multiplicities: &[usize]) -> Result<DirectSum> {
        if parts.is_empty() || parts.len() != multiplicities.len() {
            return Err(CorrError::Structural(
                "direct_sum needs matching nonempty parts and multiplicities".into(),
            ));
        }
        if multiplicities.contains(&0) {
            return Err(CorrError::Domain("multiplicities must be ≥ 1".into()));
        }
        let left = parts[0].left.clone();
        let right = parts[0].right.clone();
        for p in parts {
            if p.left != left || p.right != right {
                return Err(CorrError::Structural(
                    "direct_sum parts live over different algebras".into(),
                ));
            }
        }
        let dim: usize =
            parts.iter().zip(multiplicities).map(|(p, &m)| p.dim * m).sum();
        let mut segments = Vec::new();
        let mut offset = 0usize;
        for (pi, (p, &m)) in parts.iter().zip(multiplicities).enumerate() {
            for copy in 0..m {
                segments.push(Segment { part: pi, copy, offset, dim: p.dim });
                offset += p.dim;
            }
        }
        let embed = |pick: &dyn Fn(&Correspondence) -> &Vec<CMat>, count: usize| -> Vec<CMat> {
            (0..count)
                .map(|a| {
                    let mut big = CMat::zeros(dim, dim);
                    for seg in &segments {
                        let m = &pick(&parts[seg.part])[a];
                        big.view_mut((seg.offset, seg.offset), (seg.dim, seg.dim))
                            .copy_from(m);
                    }
                    big
                })
                .collect()
        };
        let left_rep = embed(&|p| &p.left_rep, left.dim());
        let right_rep = embed(&|p| &p.right_rep, right.dim());
        let corr = Self { left, right, dim, left_rep, right_rep };
        Ok(DirectSum { corr, segments })
    }

    /// Residuals of the correspondence axiom families; see
    /// [`ValidationReport`].
    pub fn validate(&self, tol: f64) -> ValidationReport {
        self.validate_with_sorts(tol, &[])
    }

    /// Validation with optional declared sort members `(vector, K)` whose
    /// certified bounds must not exceed `K`.
    pub fn validate_with_sorts(&self, tol: f64, sorts: &[(CorrVector, f64)]) -> ValidationReport {
        let mut homomorphism: f64 = 0.0;
        let mut star: f64 = 0.0;
        let mut boundedness: f64 = 0.0;

        // Unit axiom folds into the homomorphism family.
        let sum_diag = |alg: &TracialAlgebra, reps: &[CMat]| -> CMat {
            let mut s = CMat::zeros(self.dim, self.dim);
            for (k, &n) in alg.blocks().iter().enumerate() {
                for i in 0..n {
                    s += &reps[alg.unit_index(k, i, i)];
                }
            }
            s
        };
        let eye = linalg::identity(self.dim);
        homomorphism = homomorphism
            .max(linalg::op_norm(&(sum_diag(&self.left, &self.left_rep) - &eye)))
            .max(linalg::op_norm(&(sum_diag(&self.right, &self.right_rep) - &eye)));

        // Products of matrix units: e_ij e_pq = δ_jp e_iq within a block.
        let hom_family = |alg: &TracialAlgebra, reps: &[CMat], anti: bool| -> f64 {
            let mut worst: f64 = 0.0;
            let d = alg.dim();
            for a in 0..d {
                let (ka, i, j) = alg.unit_position(a);
                for b in 0..d {
                    let (kb, p, q) = alg.unit_position(b);
                    let prod = if anti { &reps[b] * &reps[a] } else { &reps[a] * &reps[b] };
                    let expect = if ka == kb && j == p {
                        reps[alg.unit_index(ka, i, q)].clone()
                    } else {
                        CMat::zeros(self.dim, self.dim)
                    };
                    worst = worst.max(linalg::op_norm(&(prod - expect)));
                }
            }
            worst
        };
        homomorphism = homomorphism
            .max(hom_family(&self.left, &self.left_rep, false))
            .max(hom_family(&self.right, &self.right_rep, true));

        let star_family = |alg: &TracialAlgebra, reps: &[CMat]| -> f64 {
            let mut worst: f64 = 0.0;
            for a in 0..alg.dim() {
                let (k, i, j) = alg.unit_position(a);
                let adj_idx = alg.unit_index(k, j, i);
                worst = worst.max(linalg::op_norm(&(reps[a].adjoint() - &reps[adj_idx])));
            }
            worst
        };
        star = star.max(star_family(&self.left, &self.left_rep));
        star = star.max(star_family(&self.right, &self.right_rep));

        let mut commutation: f64 = 0.0;
        for l in &self.left_rep {
            for r in &self.right_rep {
                commutation = commutation.max(linalg::op_norm(&(l * r - r * l)));
            }
        }

        // ‖π(x)‖ ≤ ‖x‖ on every unit and on a fixed seeded sample.
        for m in &self.left_rep {
            boundedness = boundedness.max((linalg::op_norm(m) - 1.0).max(0.0));
        }
        for m in &self.right_rep {
            boundedness = boundedness.max((linalg::op_norm(m) - 1.0).max(0.0));
        }
        let mut rng = crate::random::rng(0x0bed);
        for _ in 0..8 {
            let x = crate::random::element(&self.left, &mut rng);
            boundedness = boundedness
                .max(linalg::op_norm(&self.left_matrix(&x)) - x.op_norm())
                .max(0.0);
            let y = crate::random::element(&self.right, &mut rng);
            boundedness = boundedness
                .max(linalg::op_norm(&self.right_matrix(&y)) - y.op_norm())
                .max(0.0);
        }

        let sort_bounds = if sorts.is_empty() {
            None
        } else {
            let mut worst: f64 = 0.0;
            for (v, k) in sorts {
                match crate::boundcalc::radon_nikodym(self, v) {
                    Ok(cert) => worst = worst.max((cert.max_bound() - k).max(0.0)),
                    Err(_) => worst = f64::INFINITY,
                }
            }
            Some(worst)
        };

        ValidationReport { homomorphism, star, commutation, boundedness, sort_bounds, tol }
    }
}

/// A direct sum together with the positions of the summands.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub corr: Correspondence,
    pub segments: Vec<Segment>,
}

/// Location of one copy of one part inside a direct sum.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    pub part: usize,
    pub copy: usize,
    pub offset: usize,
    pub dim: usize,
}

impl DirectSum {
    /// Isometric embedding of a vector of part `part`, copy `copy`.
    pub fn embed(&self, part: usize, copy: usize, v: &CVec) -> CVec {
        let seg = self
            .segments
            .iter()
            .find(|s| s.part == part && s.copy == copy)
            .expect("segment exists");
        let mut out = CVec::zeros(self.corr.dim());
        out.rows_mut(seg.offset, seg.dim).copy_from(v);
        out
    }
}

/// Per-family maximum residuals of the correspondence axioms.
#[derive(Clone, Copy, Debug)]
pub struct ValidationReport {
    /// Unital (anti-)multiplicativity of both representations.
    pub homomorphism: f64,
    /// `π(x*) = π(x)*` on both sides.
    pub star: f64,
    /// `[π_l(a), π_r(b)] = 0` over all basis pairs.
    pub commutation: f64,
    /// Excess of `‖π(x)‖` over `‖x‖` (bounded action).
    pub boundedness: f64,
    /// Excess of certified bounds of declared sort members over their K.
    pub sort_bounds: Option<f64>,
    pub tol: f64,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        let mut worst = self
            .homomorphism
            .max(self.star)
            .max(self.commutation)
            .max(self.boundedness);
        if let Some(s) = self.sort_bounds {
            worst = worst.max(s);
        }
        worst
    }

    pub fn passes(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

/// Convenience: `v ↦ a v b` inside a correspondence.
pub fn two_sided_action(
    corr: &Correspondence,
    a: &AlgebraElement,
    v: &CVec,
    b: &AlgebraElement,
) -> CVec {
    corr.act_right(b, &corr.act_left(a, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundcalc;
    use crate::random;

    fn m2() -> TracialAlgebra {
        TracialAlgebra::factor(2)
    }

    #[test]
    fn trivial_m2_has_dim_four_and_validates() {
        let c = Correspondence::trivial(&m2());
        assert_eq!(c.dim(), 4);
        let rep = c.validate(1e-12);
        assert!(rep.passes(), "residuals: {rep:?}");
    }

    #[test]
    fn trivial_of_two_point_algebra_is_diagonal() {
        let alg = TracialAlgebra::markov(vec![1, 1]).unwrap();
        let c = Correspondence::trivial(&alg);
        assert_eq!(c.dim(), 2);
        for a in 0..2 {
            for m in [c.left_unit_matrix(a), c.right_unit_matrix(a)] {
                for i in 0..2 {
                    for j in 0..2 {
                        if i != j {
                            assert!(m[(i, j)].norm() < 1e-15);
                        }
                    }
                }
            }
        }
        assert!(c.validate(1e-12).passes());
    }

    #[test]
    fn trivial_inner_product_matches_trace_form() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let c = Correspondence::trivial(&alg);
        let mut rng = random::rng(23);
        for _ in 0..20 {
            let x = random::element(&alg, &mut rng);
            let y = random::element(&alg, &mut rng);
            let via_coords = c.inner(
                &Correspondence::trivial_coords(&x),
                &Correspondence::trivial_coords(&y),
            );
            assert!((via_coords - x.l2_inner(&y)).norm() < 1e-12);
        }
    }

    #[test]
    fn trivial_actions_are_multiplications() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let c = Correspondence::trivial(&alg);
        let mut rng = random::rng(29);
        for _ in 0..20 {
            let a = random::element(&alg, &mut rng);
            let x = random::element(&alg, &mut rng);
            let b = random::element(&alg, &mut rng);
            let lhs = two_sided_action(&c, &a, &Correspondence::trivial_coords(&x), &b);
            let rhs = Correspondence::trivial_coords(&a.mul(&x).mul(&b));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn coarse_m2_m2_dim_sixteen_validates_exactly() {
        let c = Correspondence::coarse(&m2(), &m2());
        assert_eq!(c.dim(), 16);
        let rep = c.validate(1e-12);
        assert!(rep.passes(), "residuals: {rep:?}");
        // disjoint tensor legs commute exactly
        assert_eq!(rep.commutation, 0.0);
    }

    #[test]
    fn flipped_sign_on_unit_breaks_validation() {
        let alg = m2();
        let mut c = Correspondence::trivial(&alg);
        let idx = alg.unit_index(0, 0, 1);
        c.left_rep[idx] = &c.left_rep[idx] * cr(-1.0);
        let rep = c.validate(1e-10);
        assert!(!rep.passes());
        // The broken unit shows up in the multiplicativity and star families
        // (e_12 e_21 = e_11 picks up the sign), each off by a full unit.
        assert!(rep.homomorphism >= 0.5, "homomorphism residual {}", rep.homomorphism);
        assert!(rep.star >= 0.5);
    }

    #[test]
    fn adjointness_of_actions_on_random_triples() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let mut rng = random::rng(31);
        for corr in [Correspondence::trivial(&alg), Correspondence::coarse(&alg, &alg)] {
            for _ in 0..20 {
                let a = random::element(&alg, &mut rng);
                let u = random::vector(corr.dim(), &mut rng);
                let v = random::vector(corr.dim(), &mut rng);
                let lhs = corr.inner(&corr.act_left(&a, &u), &v);
                let rhs = corr.inner(&u, &corr.act_left(&a.adjoint(), &v));
                assert!((lhs - rhs).norm() < 1e-10);
                let lhs = corr.inner(&corr.act_right(&a, &u), &v);
                let rhs = corr.inner(&u, &corr.act_right(&a.adjoint(), &v));
                assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn direct_sum_single_part_is_isomorphic_copy() {
        let c = Correspondence::trivial(&m2());
        let s = Correspondence::direct_sum(std::slice::from_ref(&c), &[1]).unwrap();
        assert_eq!(s.corr, c);
    }

    #[test]
    fn direct_sum_multiplicity_four_dim() {
        let c = Correspondence::trivial(&m2());
        let s = Correspondence::direct_sum(&[c], &[4]).unwrap();
        assert_eq!(s.corr.dim(), 16);
        assert!(s.corr.validate(1e-12).passes());
    }

    #[test]
    fn direct_sum_embeddings_are_isometric_equivariant_orthogonal() {
        let alg = m2();
        let t = Correspondence::trivial(&alg);
        let c = Correspondence::coarse(&alg, &alg);
        let s = Correspondence::direct_sum(&[t.clone(), c.clone()], &[2, 1]).unwrap();
        let mut rng = random::rng(37);
        let v = random::vector(t.dim(), &mut rng);
        let w = random::vector(c.dim(), &mut rng);
        let ev = s.embed(0, 1, &v);
        let ew = s.embed(1, 0, &w);
        assert!((s.corr.inner(&ev, &ev) - t.inner(&v, &v)).norm() < 1e-12);
        // Gram matrix of vectors from different summands is block diagonal.
        assert!(s.corr.inner(&ev, &ew).norm() < 1e-15);
        let a = random::element(&alg, &mut rng);
        let lhs = s.corr.act_left(&a, &ev);
        let rhs = s.embed(0, 1, &t.act_left(&a, &v));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn direct_sum_rejects_mismatched_algebras() {
        let a = Correspondence::trivial(&m2());
        let b = Correspondence::trivial(&TracialAlgebra::factor(3));
        assert!(Correspondence::direct_sum(&[a, b], &[1, 1]).is_err());
    }

    #[test]
    fn sort_membership_examples() {
        let alg = m2();
        let c = Correspondence::trivial(&alg);
        let one = Correspondence::trivial_coords(&AlgebraElement::identity(&alg));
        let (ok, cert) = boundcalc::sort_membership(&c, &one, 1.0).unwrap();
        assert!(ok);
        assert!((cert.k_left - 1.0).abs() < 1e-10);
        assert!((cert.k_right - 1.0).abs() < 1e-10);

        let b = AlgebraElement::diagonal(&alg, &[2.0, 1.0]).unwrap();
        let v = Correspondence::trivial_coords(&b);
        let (ok, cert) = boundcalc::sort_membership(&c, &v, 1.0).unwrap();
        assert!(!ok);
        assert!((cert.k_left - 4.0).abs() < 1e-10);

        let zero = CVec::zeros(4);
        let (ok, _) = boundcalc::sort_membership(&c, &zero, 0.0).unwrap();
        assert!(ok);
    }

    #[test]
    fn sorts_nest_in_k() {
        let alg = m2();
        let c = Correspondence::trivial(&alg);
        let mut rng = random::rng(41);
        for _ in 0..20 {
            let v = random::vector(4, &mut rng);
            let (in_k, cert) = boundcalc::sort_membership(&c, &v, 2.0).unwrap();
            let (in_l, _) = boundcalc::sort_membership(&c, &v, 5.0).unwrap();
            if in_k {
                assert!(in_l, "membership must nest, cert {cert:?}");
            }
        }
    }

    #[test]
    fn validate_with_sorts_flags_overclaimed_bound() {
        let alg = m2();
        let c = Correspondence::trivial(&alg);
        let b = AlgebraElement::diagonal(&alg, &[2.0, 1.0]).unwrap();
        let v = Correspondence::trivial_coords(&b);
        let rep = c.validate_with_sorts(1e-9, &[(v, 1.0)]);
        assert!(!rep.passes());
        assert!((rep.sort_bounds.unwrap() - 3.0).abs() < 1e-9); // bound 4 vs claim 1
    }
}
