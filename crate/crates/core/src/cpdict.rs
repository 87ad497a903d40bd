//! The dictionary between completely positive maps and cyclic
//! correspondences: `φ ↦ H_φ` by the GNS construction on `M ⊗ N` with the
//! sesquilinear form `⟨m₁⊗n₁, m₂⊗n₂⟩_φ = τ_N(n₂* φ(m₂*m₁) n₁)`, and
//! `ξ ↦ φ_ξ` by compressing the left action with the right-module map
//! `y ↦ ξy` out of L²(N).
//!
//! Cyclic decomposition splits a correspondence into minimal invariant
//! pieces through the eigenspaces of a generic Hermitian element of the
//! commutant of both actions.

use crate::bimodule::{Correspondence, CorrVector};
use crate::boundcalc;
use crate::error::{CorrError, Result};
use crate::linalg::{self, cr, CMat, CVec};
use crate::matalg::{AlgebraElement, TracialAlgebra};

/// Null-space cutoff of the GNS quotient.
pub const GNS_NULL_CUT: f64 = 1e-11;

/// A linear map between tracial algebras, stored on matrix-unit coordinates.
#[derive(Clone, Debug)]
pub struct CPMap {
    source: TracialAlgebra,
    target: TracialAlgebra,
    /// `target.dim() × source.dim()` matrix on entry coordinates.
    action: CMat,
}

impl CPMap {
    pub fn new(source: TracialAlgebra, target: TracialAlgebra, action: CMat) -> Result<Self> {
        if action.nrows() != target.dim() || action.ncols() != source.dim() {
            return Err(CorrError::Structural(format!(
                "action matrix is {}x{}, expected {}x{}",
                action.nrows(),
                action.ncols(),
                target.dim(),
                source.dim()
            )));
        }
        Ok(Self { source, target, action })
    }

    /// Build from the images of the matrix units of the source.
    pub fn from_unit_images(
        source: TracialAlgebra,
        target: TracialAlgebra,
        images: &[AlgebraElement],
    ) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(CorrError::Structural(format!(
                "need {} unit images, got {}",
                source.dim(),
                images.len()
            )));
        }
        let mut action = CMat::zeros(target.dim(), source.dim());
        for (a, img) in images.iter().enumerate() {
            action.set_column(a, &img.coords());
        }
        Self::new(source, target, action)
    }

    /// The trace map `m ↦ τ_M(m)·1_N`.
    pub fn tracial(source: &TracialAlgebra, target: &TracialAlgebra) -> Self {
        let one = AlgebraElement::identity(target).coords();
        let mut action = CMat::zeros(target.dim(), source.dim());
        for a in 0..source.dim() {
            let w = source.units()[a].trace();
            action.set_column(a, &(&one * w));
        }
        Self { source: source.clone(), target: target.clone(), action }
    }

    pub fn source(&self) -> &TracialAlgebra {
        &self.source
    }

    pub fn target(&self) -> &TracialAlgebra {
        &self.target
    }

    pub fn action(&self) -> &CMat {
        &self.action
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if x.algebra() != &self.source {
            return Err(CorrError::Structural("element not in the source algebra".into()));
        }
        AlgebraElement::from_coords(&self.target, &(&self.action * x.coords()))
    }

    /// The τ-adjoint map `φ*` with `τ_N(φ(x) y) = τ_M(x φ*(y))`.
    pub fn tau_adjoint(&self) -> Self {
        let dm = self.source.dim();
        let dn = self.target.dim();
        let mut adj = CMat::zeros(dm, dn);
        // pairing metric is diagonal in unit coordinates: ⟨x,y⟩_τ = Σ λ_a conj(y_a) x_a
        for p in 0..dm {
            let wm = self.source.unit_weight(p);
            for q in 0..dn {
                let wn = self.target.unit_weight(q);
                adj[(p, q)] = self.action[(q, p)].conj() * cr(wn / wm);
            }
        }
        Self { source: self.target.clone(), target: self.source.clone(), action: adj }
    }

    /// The Choi-type matrix `[φ(e_a* e_b)]` over all matrix units, assembled
    /// blockwise, together with its minimum eigenvalue.
    pub fn choi(&self) -> Result<(CMat, f64)> {
        let units = self.source.units();
        let d = units.len();
        let n_size: usize = self.target.blocks().iter().sum();
        let mut big = CMat::zeros(d * n_size, d * n_size);
        for a in 0..d {
            for b in 0..d {
                let img = self.apply(&units[a].adjoint().mul(&units[b]))?;
                big.view_mut((a * n_size, b * n_size), (n_size, n_size))
                    .copy_from(&img.block_diagonal());
            }
        }
        let min_eig = linalg::hermitian_eig(&big).min_value();
        Ok((big, min_eig))
    }

    pub fn is_completely_positive(&self, tol: f64) -> Result<bool> {
        Ok(self.choi()?.1 >= -tol)
    }

    /// `max_a ‖φ(e_a*) − φ(e_a)*‖`.
    pub fn star_defect(&self) -> f64 {
        let units = self.source.units();
        let mut worst: f64 = 0.0;
        for u in &units {
            let lhs = self.apply(&u.adjoint()).expect("unit in source");
            let rhs = self.apply(u).expect("unit in source").adjoint();
            worst = worst.max(lhs.sub(&rhs).op_norm());
        }
        worst
    }

    /// Subtraciality diagnostics: `φ(1) ⪯ 1` and `τ_N ∘ φ ≤ τ_M`; the trace
    /// condition is equivalent to `φ*(1) ⪯ 1` through the τ-adjoint.
    pub fn subtracial_report(&self, tol: f64) -> Result<SubtracialReport> {
        let one_t = AlgebraElement::identity(&self.target);
        let unital_gap = one_t.sub(&self.apply(&AlgebraElement::identity(&self.source))?);
        let unital_defect = (-unital_gap.positivity_check(tol).min_eigenvalue).max(0.0);
        let one_s = AlgebraElement::identity(&self.source);
        let trace_gap = one_s.sub(&self.tau_adjoint().apply(&one_t)?);
        let trace_defect = (-trace_gap.positivity_check(tol).min_eigenvalue).max(0.0);
        Ok(SubtracialReport {
            unital_defect,
            trace_defect,
            is_subtracial: unital_defect <= tol && trace_defect <= tol,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SubtracialReport {
    /// How far `φ(1) ⪯ 1` fails (0 when it holds).
    pub unital_defect: f64,
    /// How far `τ_N ∘ φ ≤ τ_M` fails (0 when it holds).
    pub trace_defect: f64,
    pub is_subtracial: bool,
}

/// Index of the pair `(a, b)` in the product basis of `M ⊗ N`.
fn pair_index(dim_n: usize, a: usize, b: usize) -> usize {
    a * dim_n + b
}

/// GNS data of a completely positive map: the correspondence `H_φ` and the
/// class of `1 ⊗ 1` as its cyclic vector.
pub fn cp_to_correspondence(phi: &CPMap) -> Result<(Correspondence, CorrVector)> {
    let m_alg = phi.source().clone();
    let n_alg = phi.target().clone();
    let (dm, dn) = (m_alg.dim(), n_alg.dim());
    let m_units = m_alg.units();
    let n_units = n_alg.units();

    // Gram form of the product basis under ⟨m₁⊗n₁, m₂⊗n₂⟩ = τ_N(n₂* φ(m₂*m₁) n₁),
    // oriented so that the standard pairing of quotient coordinates returns
    // exactly these values: G[row, col] = τ_N(n_row* φ(m_row* m_col) n_col).
    let mut phi_images = Vec::with_capacity(dm * dm);
    for a1 in 0..dm {
        for a2 in 0..dm {
            phi_images.push(phi.apply(&m_units[a1].adjoint().mul(&m_units[a2]))?);
        }
    }
    let mut gram = CMat::zeros(dm * dn, dm * dn);
    for a1 in 0..dm {
        for a2 in 0..dm {
            let img = &phi_images[a1 * dm + a2];
            for b2 in 0..dn {
                let right = img.mul(&n_units[b2]);
                for b1 in 0..dn {
                    gram[(pair_index(dn, a1, b1), pair_index(dn, a2, b2))] =
                        n_units[b1].adjoint().mul(&right).trace();
                }
            }
        }
    }
    let gram = linalg::hermitian_part(&gram);
    let eig = linalg::hermitian_eig(&gram);
    if eig.min_value() < -1e-9 {
        return Err(CorrError::NotPositive { min_eig: eig.min_value() });
    }
    let keep: Vec<usize> =
        (0..eig.values.len()).filter(|&i| eig.values[i] > GNS_NULL_CUT).collect();
    let rank = keep.len();
    // Quotient map Q = Λ^{1/2} V^H and its right inverse Q⁺ = V Λ^{-1/2}.
    let mut q = CMat::zeros(rank, dm * dn);
    let mut q_plus = CMat::zeros(dm * dn, rank);
    for (row, &i) in keep.iter().enumerate() {
        let s = eig.values[i].sqrt();
        let col = eig.vectors.column(i);
        for p in 0..dm * dn {
            q[(row, p)] = col[p].conj() * cr(s);
            q_plus[(p, row)] = col[p] / cr(s);
        }
    }

    // Left action m·(m'⊗n') = (mm')⊗n' on the product basis, then pushed to
    // the quotient; similarly the right action on the second leg.
    let unit_product =
        |alg: &TracialAlgebra, x: usize, y: usize| -> Option<usize> {
            let (kx, i, j) = alg.unit_position(x);
            let (ky, p, qq) = alg.unit_position(y);
            (kx == ky && j == p).then(|| alg.unit_index(kx, i, qq))
        };
    let mut left_rep = Vec::with_capacity(dm);
    for mu in 0..dm {
        let mut a_m = CMat::zeros(dm * dn, dm * dn);
        for a in 0..dm {
            if let Some(t) = unit_product(&m_alg, mu, a) {
                for b in 0..dn {
                    a_m[(pair_index(dn, t, b), pair_index(dn, a, b))] = cr(1.0);
                }
            }
        }
        left_rep.push(&q * a_m * &q_plus);
    }
    let mut right_rep = Vec::with_capacity(dn);
    for nu in 0..dn {
        let mut b_n = CMat::zeros(dm * dn, dm * dn);
        for b in 0..dn {
            if let Some(t) = unit_product(&n_alg, b, nu) {
                for a in 0..dm {
                    b_n[(pair_index(dn, a, t), pair_index(dn, a, b))] = cr(1.0);
                }
            }
        }
        right_rep.push(&q * b_n * &q_plus);
    }

    let corr = Correspondence::new(m_alg.clone(), n_alg.clone(), rank, left_rep, right_rep)?;
    let mut one_one = CVec::zeros(dm * dn);
    for (k, &nk) in m_alg.blocks().iter().enumerate() {
        for i in 0..nk {
            let a = m_alg.unit_index(k, i, i);
            for (l, &nl) in n_alg.blocks().iter().enumerate() {
                for j in 0..nl {
                    one_one[pair_index(dn, a, n_alg.unit_index(l, j, j))] = cr(1.0);
                }
            }
        }
    }
    let cyclic = &q * one_one;
    Ok((corr, cyclic))
}

/// The completely positive map `φ_ξ` of a vector: compress the left action
/// by the right-module map `V: ŷ ↦ ξy` and read the result inside N through
/// the commutant of the right multiplications.
pub fn vector_to_cp(corr: &Correspondence, v: &CorrVector) -> Result<CPMap> {
    if v.len() != corr.dim() {
        return Err(CorrError::Structural(format!(
            "vector of length {}, correspondence dim {}",
            v.len(),
            corr.dim()
        )));
    }
    let m_alg = corr.left_algebra().clone();
    let n_alg = corr.right_algebra().clone();
    let dn = n_alg.dim();
    // V on the orthonormal coordinates û_b = e_b / √λ_b of L²(N).
    let mut v_mat = CMat::zeros(corr.dim(), dn);
    for b in 0..dn {
        let col = corr.right_unit_matrix(b) * v;
        let s = cr(1.0 / n_alg.unit_weight(b).sqrt());
        v_mat.set_column(b, &(col * s));
    }
    let triv_n = Correspondence::trivial(&n_alg);
    let one_n = Correspondence::trivial_coords(&AlgebraElement::identity(&n_alg));

    let mut images = Vec::with_capacity(m_alg.dim());
    let mut commutant_residual: f64 = 0.0;
    for a in 0..m_alg.dim() {
        let t = v_mat.adjoint() * corr.left_unit_matrix(a) * &v_mat;
        // φ(e_a) is the element whose left multiplication matches T on L²(N).
        let img_coords = &t * &one_n;
        let img = Correspondence::element_from_trivial_coords(&n_alg, &img_coords)?;
        let lm = triv_n.left_matrix(&img);
        commutant_residual = commutant_residual.max(linalg::op_norm(&(&t - lm)));
        images.push(img);
    }
    if commutant_residual > 1e-8 {
        return Err(CorrError::Structural(format!(
            "compression does not land in the right-action commutant copy of N \
             (residual {commutant_residual:.3e})"
        )));
    }
    CPMap::from_unit_images(m_alg, n_alg, &images)
}

/// One cyclic piece of a decomposition.
#[derive(Clone, Debug)]
pub struct CyclicSummand {
    pub corr: Correspondence,
    /// Isometry from the summand coordinates into the parent.
    pub embedding: CMat,
    /// Subtracial cyclic vector, in summand coordinates.
    pub cyclic_vector: CorrVector,
    /// `φ_ξ` of the cyclic vector.
    pub cp_map: CPMap,
    /// Invariance defect of the subspace inside the parent.
    pub invariance_defect: f64,
}

/// Orthonormal basis of the span of the two-sided orbit `{a ξ b}`.
pub fn orbit_span(corr: &Correspondence, v: &CorrVector) -> CMat {
    let mut orbit = Vec::new();
    for a in 0..corr.left_algebra().dim() {
        let av = corr.left_unit_matrix(a) * v;
        for b in 0..corr.right_algebra().dim() {
            orbit.push(corr.right_unit_matrix(b) * &av);
        }
    }
    linalg::orthonormal_span(&orbit, 1e-10)
}

/// Orthonormal basis of the commutant of both actions, as vectorized
/// operators on the Hilbert space.
fn commutant_basis(corr: &Correspondence) -> CMat {
    let d = corr.dim();
    let mut h = CMat::zeros(d * d, d * d);
    let mut add_rep = |reps: &dyn Fn(usize) -> CMat, count: usize| {
        for x in 0..count {
            let p = reps(x);
            let ph = p.adjoint();
            let php = &ph * &p;
            let eye = linalg::identity(d);
            // ‖pT − Tp‖² accumulated over the basis: (I⊗p − pᵀ⊗I) on vec(T).
            h += linalg::kron(&eye, &php);
            h -= linalg::kron(&p.transpose(), &ph);
            h -= linalg::kron(&p.conjugate(), &p);
            h += linalg::kron(&(p.conjugate() * p.transpose()), &eye);
        }
    };
    add_rep(&|x| corr.left_unit_matrix(x).clone(), corr.left_algebra().dim());
    add_rep(&|x| corr.right_unit_matrix(x).clone(), corr.right_algebra().dim());
    let scale = linalg::op_norm(&h).max(1.0);
    linalg::hermitian_null_space(&h, 1e-10 * scale)
}

/// Minimal invariant subspaces via the eigenspaces of a generic Hermitian
/// commutant element; returns one isometry per subspace.
fn minimal_invariant_subspaces(corr: &Correspondence, seed: u64) -> Vec<CMat> {
    let d = corr.dim();
    let basis = commutant_basis(corr);
    if basis.ncols() <= 1 {
        // Trivial commutant: the correspondence is already irreducible.
        return vec![linalg::identity(d)];
    }
    let mut rng = crate::random::rng(seed);
    let mut t = CMat::zeros(d, d);
    for j in 0..basis.ncols() {
        let z = crate::random::complex_gaussian(&mut rng);
        let col = basis.column(j);
        for i in 0..d * d {
            t[(i % d, i / d)] += col[i] * z;
        }
    }
    let t = linalg::hermitian_part(&t);
    let eig = linalg::hermitian_eig(&t);
    // Cluster eigenvalues; each cluster's eigenspace is invariant and
    // generically minimal.
    let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let gap = 1e-7 * scale;
    let mut pieces = Vec::new();
    let mut start = 0usize;
    for i in 1..=d {
        if i == d || (eig.values[i] - eig.values[i - 1]).abs() > gap {
            pieces.push(eig.vectors.columns(start, i - start).into_owned());
            start = i;
        }
    }
    pieces
}

/// Decompose a correspondence into pairwise orthogonal invariant cyclic
/// summands that sum to the whole space, each with a subtracial cyclic
/// vector and its c.p. map.
pub fn cyclic_decomposition(corr: &Correspondence, seed: u64) -> Result<Vec<CyclicSummand>> {
    if corr.dim() == 0 {
        return Ok(Vec::new());
    }
    let mut rng = crate::random::rng(seed ^ 0xdec0);
    let mut out = Vec::new();
    for basis in minimal_invariant_subspaces(corr, seed) {
        let (sub, invariance_defect) = corr.compress(&basis)?;
        // Any nonzero vector of a minimal piece is cyclic; sample a few and
        // keep the one with the fullest orbit in case a cluster merged.
        let mut best: Option<(usize, CVec)> = None;
        for _ in 0..4 {
            let cand = crate::random::unit_vector(sub.dim(), &mut rng);
            let rank = orbit_span(&sub, &cand).ncols();
            if best.as_ref().is_none_or(|(r, _)| rank > *r) {
                best = Some((rank, cand));
            }
        }
        let (_, cand) = best.expect("nonzero dimension");
        let xi0 = boundcalc::renormalize_subtracial(&sub, &cand)?.vector;
        let cp_map = vector_to_cp(&sub, &xi0)?;
        out.push(CyclicSummand {
            corr: sub,
            embedding: basis,
            cyclic_vector: xi0,
            cp_map,
            invariance_defect,
        });
    }
    // Deterministic order: by dimension, then by embedding footprint.
    out.sort_by(|a, b| {
        a.corr.dim().cmp(&b.corr.dim()).then_with(|| {
            let fa = a.embedding.column(0).iter().map(|z| z.norm_sqr() * 1e6).sum::<f64>();
            let fb = b.embedding.column(0).iter().map(|z| z.norm_sqr() * 1e6).sum::<f64>();
            fa.total_cmp(&fb)
        })
    });
    Ok(out)
}

/// An equivariant isometry between correspondences with its residual.
#[derive(Clone, Debug)]
pub struct EquivariantIso {
    pub isometry: CMat,
    /// `max ‖π_b(x) W − W π_a(x)‖` over the unit bases of both algebras.
    pub residual: f64,
}

/// Solve for an isometry `W: a → b` intertwining both actions, via the null
/// space of the stacked commutation constraints followed by a polar
/// correction.
pub fn equivariant_isometry(a: &Correspondence, b: &Correspondence) -> Result<EquivariantIso> {
    if a.left_algebra() != b.left_algebra() || a.right_algebra() != b.right_algebra() {
        return Err(CorrError::Structural("correspondences over different algebras".into()));
    }
    if a.dim() > b.dim() {
        return Err(CorrError::Precondition(format!(
            "no isometry from dim {} into dim {}",
            a.dim(),
            b.dim()
        )));
    }
    let (da, db) = (a.dim(), b.dim());
    let mut h = CMat::zeros(da * db, da * db);
    let mut add = |p: &CMat, q: &CMat| {
        // constraint (I_da ⊗ P − Qᵀ ⊗ I_db) vec(W) = 0, accumulated as A^H A
        let eye_a = linalg::identity(da);
        let eye_b = linalg::identity(db);
        h += linalg::kron(&eye_a, &(p.adjoint() * p));
        h -= linalg::kron(&q.transpose(), &p.adjoint());
        h -= linalg::kron(&q.conjugate(), p);
        h += linalg::kron(&(q.conjugate() * q.transpose()), &eye_b);
    };
    for x in 0..a.left_algebra().dim() {
        add(b.left_unit_matrix(x), a.left_unit_matrix(x));
    }
    for x in 0..a.right_algebra().dim() {
        add(b.right_unit_matrix(x), a.right_unit_matrix(x));
    }
    let scale = linalg::op_norm(&h).max(1.0);
    let null = linalg::hermitian_null_space(&h, 1e-9 * scale);
    if null.ncols() == 0 {
        return Err(CorrError::Precondition("no nonzero intertwiner exists".into()));
    }
    // A generic combination of the null basis is injective when an embedding
    // exists; its polar factor is the isometry.
    let mut rng = crate::random::rng(0x15e7);
    let mut best: Option<EquivariantIso> = None;
    for _ in 0..4 {
        let mut t = CMat::zeros(db, da);
        for j in 0..null.ncols() {
            let z = crate::random::complex_gaussian(&mut rng);
            let col = null.column(j);
            for i in 0..da * db {
                t[(i % db, i / db)] += col[i] * z;
            }
        }
        let w = linalg::polar_isometry(&t);
        let mut residual: f64 = 0.0;
        for x in 0..a.left_algebra().dim() {
            residual = residual.max(linalg::op_norm(
                &(b.left_unit_matrix(x) * &w - &w * a.left_unit_matrix(x)),
            ));
        }
        for x in 0..a.right_algebra().dim() {
            residual = residual.max(linalg::op_norm(
                &(b.right_unit_matrix(x) * &w - &w * a.right_unit_matrix(x)),
            ));
        }
        residual = residual.max(linalg::op_norm(&(w.adjoint() * &w - linalg::identity(da))));
        if best.as_ref().is_none_or(|g| residual < g.residual) {
            best = Some(EquivariantIso { isometry: w, residual });
        }
    }
    Ok(best.expect("at least one attempt"))
}
