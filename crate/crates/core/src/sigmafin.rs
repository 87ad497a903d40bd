//! Faithful states on a multi-matrix algebra and the machinery attached to
//! them at finite dimension: the GNS inner product `⟨a, b⟩_φ = φ(b* a)`,
//! right-multiplication bounds, the sharp norm `√(φ(a*a + aa*))`, the sorts
//! of right-bounded elements, the modular flow `ρ^{it} x ρ^{-it}`, and tail
//! diagnostics for sequences of pairs `(x_i, φ_i)`.
//!
//! States are represented by density elements against the plain matrix
//! trace: `φ(x) = Σ_k tr(ρ_k x_k)` with `ρ ⪰ 0` of full support and total
//! trace 1.

use num_complex::Complex64;

use crate::boundcalc::TailProfile;
use crate::error::{CorrError, Result};
use crate::linalg::{self, cr, CMat};
use crate::matalg::{AlgebraElement, TracialAlgebra};

/// A faithful state, stored as a full-support density element.
#[derive(Clone, Debug)]
pub struct FaithfulState {
    rho: AlgebraElement,
}

impl FaithfulState {
    /// Requires `ρ ⪰ 0` with min eigenvalue above `1e-12` and total trace 1
    /// within `1e-12`.
    pub fn new(rho: AlgebraElement) -> Result<Self> {
        let pos = rho.positivity_check(1e-10);
        if !pos.is_positive || pos.min_eigenvalue <= 1e-12 {
            return Err(CorrError::NotFaithful(format!(
                "density must have full support; min eigenvalue {:.3e}",
                pos.min_eigenvalue
            )));
        }
        let total: f64 = rho.blocks().iter().map(|b| b.trace().re).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(CorrError::Domain(format!(
                "density has total trace {total}, expected 1"
            )));
        }
        Ok(Self { rho })
    }

    /// The state equal to the algebra's trace: density `λ_k·1` per block.
    pub fn tracial(alg: &TracialAlgebra) -> Self {
        let blocks = alg
            .blocks()
            .iter()
            .zip(alg.weights())
            .map(|(&n, &w)| CMat::identity(n, n) * cr(w))
            .collect();
        let rho = AlgebraElement::from_blocks(alg, blocks).expect("matching shapes");
        Self::new(rho).expect("tracial density is faithful and normalized")
    }

    /// Diagonal density on a single-block algebra.
    pub fn diagonal(alg: &TracialAlgebra, entries: &[f64]) -> Result<Self> {
        Self::new(AlgebraElement::diagonal(alg, entries)?)
    }

    pub fn density(&self) -> &AlgebraElement {
        &self.rho
    }

    pub fn algebra(&self) -> &TracialAlgebra {
        self.rho.algebra()
    }

    /// `φ(x) = Σ_k tr(ρ_k x_k)`.
    pub fn evaluate(&self, x: &AlgebraElement) -> Complex64 {
        self.rho
            .blocks()
            .iter()
            .zip(x.blocks())
            .map(|(r, b)| (r * b).trace())
            .sum()
    }

    /// `⟨a, b⟩_φ = φ(b* a)`.
    pub fn inner(&self, a: &AlgebraElement, b: &AlgebraElement) -> Complex64 {
        self.evaluate(&b.adjoint().mul(a))
    }

    /// `‖a‖_φ = √φ(a* a)`.
    pub fn gns_norm(&self, a: &AlgebraElement) -> f64 {
        self.evaluate(&a.adjoint().mul(a)).re.max(0.0).sqrt()
    }

    /// `‖a‖^♯_φ = √φ(a*a + aa*)`.
    pub fn sharp_norm(&self, a: &AlgebraElement) -> f64 {
        let sym = a.adjoint().mul(a).add(&a.mul(&a.adjoint()));
        self.evaluate(&sym).re.max(0.0).sqrt()
    }
}

/// The algebra as a Hilbert space under `⟨a, b⟩_φ`.
#[derive(Clone, Debug)]
pub struct GnsSpace {
    state: FaithfulState,
    gram: CMat,
    min_gram_eigenvalue: f64,
}

impl GnsSpace {
    pub fn state(&self) -> &FaithfulState {
        &self.state
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn min_gram_eigenvalue(&self) -> f64 {
        self.min_gram_eigenvalue
    }
}

/// GNS construction: Gram matrix of the matrix units under `⟨·,·⟩_φ`,
/// positive definite exactly because the state is faithful.
pub fn gns(state: &FaithfulState) -> Result<GnsSpace> {
    let alg = state.algebra();
    let units = alg.units();
    let d = alg.dim();
    let mut gram = CMat::zeros(d, d);
    for p in 0..d {
        for q in 0..d {
            // Oriented so that x^H G y = φ(x* y) on coordinates.
            gram[(p, q)] = state.evaluate(&units[p].adjoint().mul(&units[q]));
        }
    }
    let gram = linalg::hermitian_part(&gram);
    let min = linalg::hermitian_eig(&gram).min_value();
    if min <= 1e-14 {
        return Err(CorrError::NotFaithful(format!(
            "GNS Gram matrix is singular: min eigenvalue {min:.3e}"
        )));
    }
    Ok(GnsSpace { state: state.clone(), gram, min_gram_eigenvalue: min })
}

/// The exact squared norm of right multiplication by `a` on the GNS space:
/// `K = ‖ρ^{-1/2} a ρ^{1/2}‖²`, through the isometry `x ↦ x ρ^{1/2}` onto
/// Hilbert–Schmidt space.
pub fn phi_right_bound(a: &AlgebraElement, state: &FaithfulState) -> Result<f64> {
    if a.algebra() != state.algebra() {
        return Err(CorrError::Structural("element and state over different algebras".into()));
    }
    let eig = state.density().eigen()?;
    let half = eig.apply(|t| t.max(f64::MIN_POSITIVE).sqrt());
    let inv_half = eig.apply(|t| 1.0 / t.max(f64::MIN_POSITIVE).sqrt());
    let conj = inv_half.mul(a).mul(&half);
    let n = conj.op_norm();
    Ok(n * n)
}

/// Independent check of [`phi_right_bound`]: maximize `‖ba‖²_φ / ‖b‖²_φ`
/// directly as a generalized eigenvalue problem on algebra coordinates.
pub fn phi_right_bound_oracle(a: &AlgebraElement, state: &FaithfulState) -> Result<f64> {
    if a.algebra() != state.algebra() {
        return Err(CorrError::Structural("element and state over different algebras".into()));
    }
    let alg = state.algebra();
    let gns_space = gns(state)?;
    let d = alg.dim();
    // matrix of right multiplication by a on entry coordinates
    let mut rmul = CMat::zeros(d, d);
    let units = alg.units();
    for (b, u) in units.iter().enumerate() {
        rmul.set_column(b, &u.mul(a).coords());
    }
    let num = rmul.adjoint() * gns_space.gram() * &rmul;
    Ok(linalg::max_generalized_eigenvalue(&num, gns_space.gram()))
}

/// Certified membership data for the sort `S_{K,N}`.
#[derive(Clone, Copy, Debug)]
pub struct SigmaMembership {
    pub op_norm: f64,
    pub right_bound: f64,
    pub is_member: bool,
}

/// `a ∈ S_{K,N}` iff `‖a‖ ≤ N` and `a` is φ-right K-bounded.
pub fn sort_membership_sigma(
    a: &AlgebraElement,
    state: &FaithfulState,
    k: f64,
    n: f64,
) -> Result<SigmaMembership> {
    let op_norm = a.op_norm();
    let right_bound = phi_right_bound(a, state)?;
    Ok(SigmaMembership {
        op_norm,
        right_bound,
        is_member: op_norm <= n + 1e-10 && right_bound <= k + 1e-10,
    })
}

/// The modular flow `σ_t(x) = ρ^{it} x ρ^{-it}`, a *-automorphism for each
/// real `t`.
pub fn modular_flow(x: &AlgebraElement, state: &FaithfulState, t: f64) -> Result<AlgebraElement> {
    if x.algebra() != state.algebra() {
        return Err(CorrError::Structural("element and state over different algebras".into()));
    }
    let eig = state.density().eigen()?;
    let phase = |lam: f64| Complex64::from_polar(1.0, t * lam.max(f64::MIN_POSITIVE).ln());
    let u = eig.apply_complex(phase);
    let u_inv = u.adjoint();
    Ok(u.mul(x).mul(&u_inv))
}

/// A finite sequence of pairs `(x_i, φ_i)` with an optional declared limit.
#[derive(Clone, Debug)]
pub struct SigmaSequence {
    pub terms: Vec<(AlgebraElement, FaithfulState)>,
    pub limit: Option<(AlgebraElement, FaithfulState)>,
}

/// Diagnostics for the ideal and multiplier predicates of a sequence.
#[derive(Clone, Debug)]
pub struct OcneanuReport {
    /// Per-index `‖x_i‖^♯_{φ_i}` with its tail supremum (ideal membership
    /// surrogate: the tail must vanish for ideal elements).
    pub sharp_profile: TailProfile,
    pub sup_op_norm: f64,
    /// One pair of profiles per supplied test sequence: `‖x_i j_i‖^♯` and
    /// `‖j_i x_i‖^♯`.
    pub multiplier_profiles: Vec<(TailProfile, TailProfile)>,
}

/// Tail diagnostics for the Ocneanu ideal and multiplier conditions.
pub fn ocneanu_predicates(
    seq: &SigmaSequence,
    ideal_tests: &[Vec<AlgebraElement>],
    norm_cap: Option<f64>,
) -> Result<OcneanuReport> {
    if seq.terms.is_empty() {
        return Err(CorrError::Precondition("empty sequence".into()));
    }
    let sup_op_norm =
        seq.terms.iter().map(|(x, _)| x.op_norm()).fold(0.0, f64::max);
    if !sup_op_norm.is_finite() {
        return Err(CorrError::Precondition("sequence has non-finite operator norms".into()));
    }
    if let Some(cap) = norm_cap {
        if sup_op_norm > cap {
            return Err(CorrError::Precondition(format!(
                "operator norms reach {sup_op_norm}, above the declared cap {cap}"
            )));
        }
    }
    let sharp = seq.terms.iter().map(|(x, phi)| phi.sharp_norm(x)).collect::<Vec<_>>();
    let mut multiplier_profiles = Vec::new();
    for test in ideal_tests {
        if test.len() != seq.terms.len() {
            return Err(CorrError::Structural(format!(
                "test sequence of length {}, expected {}",
                test.len(),
                seq.terms.len()
            )));
        }
        let right: Vec<f64> = seq
            .terms
            .iter()
            .zip(test)
            .map(|((x, phi), j)| phi.sharp_norm(&x.mul(j)))
            .collect();
        let left: Vec<f64> = seq
            .terms
            .iter()
            .zip(test)
            .map(|((x, phi), j)| phi.sharp_norm(&j.mul(x)))
            .collect();
        multiplier_profiles.push((TailProfile::from_values(right), TailProfile::from_values(left)));
    }
    Ok(OcneanuReport {
        sharp_profile: TailProfile::from_values(sharp),
        sup_op_norm,
        multiplier_profiles,
    })
}

/// Residual profile of `‖σ_t^{φ_i}(x_i) − σ_t^φ(x)‖^♯_{φ_i}` against the
/// declared limit; the tail vanishes for norm-convergent data.
pub fn modular_limit_check(seq: &SigmaSequence, t: f64) -> Result<TailProfile> {
    let (x_lim, phi_lim) = seq
        .limit
        .as_ref()
        .ok_or_else(|| CorrError::Precondition("declared limit missing".into()))?;
    let flow_lim = modular_flow(x_lim, phi_lim, t)?;
    let mut values = Vec::with_capacity(seq.terms.len());
    for (x, phi) in &seq.terms {
        let flow = modular_flow(x, phi, t)?;
        values.push(phi.sharp_norm(&flow.sub(&flow_lim)));
    }
    Ok(TailProfile::from_values(values))
}

/// The projection `p_K` attached to a target `u`, with its approximant and
/// diagnostics.
#[derive(Clone, Debug)]
pub struct PhiDenseStep {
    pub projection: AlgebraElement,
    pub approximant: AlgebraElement,
    /// `‖p_K u − u‖_φ`.
    pub gns_distance: f64,
    /// Certified φ-right bound of the approximant.
    pub right_bound: f64,
    /// Worst violation of `φ(u* p x p u) ≤ K φ(p x p)` over the positive
    /// spanning set (0 when the domination holds).
    pub domination_defect: f64,
}

/// One step of the strong-density construction for φ-right bounded
/// elements: the hermitian functional `Kφ − φ(u*·u)` is implemented through
/// the trace pairing by `h = Kρ − uρu*`, and `p_K` is its nonnegative
/// spectral part.
pub fn phi_dense_projection(
    u: &AlgebraElement,
    state: &FaithfulState,
    k: f64,
) -> Result<PhiDenseStep> {
    if k.is_nan() || k <= 0.0 {
        return Err(CorrError::Domain(format!("level must be > 0, got {k}")));
    }
    if u.algebra() != state.algebra() {
        return Err(CorrError::Structural("element and state over different algebras".into()));
    }
    let rho = state.density();
    let conj = u.mul(rho).mul(&u.adjoint());
    let h = rho.scale(cr(k)).sub(&conj);
    let p = h.eigen()?.apply(|t| if t >= 0.0 { 1.0 } else { 0.0 });
    let approximant = p.mul(u);
    let gns_distance = state.gns_norm(&approximant.sub(u));
    let right_bound = phi_right_bound(&approximant, state)?;
    let mut domination_defect: f64 = 0.0;
    for x in state.algebra().positive_spanning_set() {
        let pxp = p.mul(&x).mul(&p);
        let lhs = state.evaluate(&u.adjoint().mul(&pxp).mul(u)).re;
        let rhs = k * state.evaluate(&pxp).re;
        domination_defect = domination_defect.max(lhs - rhs);
    }
    Ok(PhiDenseStep {
        projection: p,
        approximant,
        gns_distance,
        right_bound,
        domination_defect: domination_defect.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::Correspondence;
    use crate::random;
    use rand::Rng;

    fn m2() -> TracialAlgebra {
        TracialAlgebra::factor(2)
    }

    fn state_p(p: f64) -> FaithfulState {
        FaithfulState::diagonal(&m2(), &[p, 1.0 - p]).unwrap()
    }

    #[test]
    fn tracial_density_recovers_trace() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let phi = FaithfulState::tracial(&alg);
        let mut rng = random::rng(91);
        for _ in 0..20 {
            let x = random::element(&alg, &mut rng);
            assert!((phi.evaluate(&x) - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_singular_density() {
        let alg = m2();
        let rho = AlgebraElement::diagonal(&alg, &[1.0, 0.0]).unwrap();
        assert!(matches!(FaithfulState::new(rho), Err(CorrError::NotFaithful(_))));
    }

    #[test]
    fn gns_of_tracial_state_matches_trivial_correspondence() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let phi = FaithfulState::tracial(&alg);
        let space = gns(&phi).unwrap();
        let mut rng = random::rng(93);
        for _ in 0..20 {
            let a = random::element(&alg, &mut rng);
            let b = random::element(&alg, &mut rng);
            let via_gram = (b.coords().adjoint() * space.gram() * a.coords())[(0, 0)];
            let via_trivial = Correspondence::trivial(&alg).inner(
                &Correspondence::trivial_coords(&a),
                &Correspondence::trivial_coords(&b),
            );
            assert!((via_gram - via_trivial).norm() < 1e-12);
        }
    }

    #[test]
    fn gns_of_skewed_state_is_positive_definite() {
        let space = gns(&state_p(0.7)).unwrap();
        assert_eq!(space.gram().nrows(), 4);
        assert!(space.min_gram_eigenvalue() > 0.0);
    }

    #[test]
    fn right_bound_closed_form_examples() {
        // tracial: K = ‖a‖²
        let alg = m2();
        let phi = FaithfulState::tracial(&alg);
        let mut rng = random::rng(97);
        let a = random::element(&alg, &mut rng);
        let k = phi_right_bound(&a, &phi).unwrap();
        assert!((k - a.op_norm().powi(2)).abs() < 1e-10);

        // ρ = diag(p, 1−p), a = e_12: K = (1−p)/p
        let p = 0.3;
        let phi = state_p(p);
        let e12 = alg.unit(0, 0, 1);
        let k = phi_right_bound(&e12, &phi).unwrap();
        assert!((k - (1.0 - p) / p).abs() < 1e-10);

        // a unitary commuting with ρ: K = 1
        let u = AlgebraElement::diagonal(&alg, &[1.0, -1.0]).unwrap();
        let k = phi_right_bound(&u, &phi).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn right_bound_matches_maximization_oracle() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let mut rng = random::rng(101);
        for _ in 0..50 {
            let phi = random::faithful_state(&alg, 0.05, &mut rng);
            let a = random::element(&alg, &mut rng);
            let closed = phi_right_bound(&a, &phi).unwrap();
            let oracle = phi_right_bound_oracle(&a, &phi).unwrap();
            assert!(
                (closed - oracle).abs() <= 1e-9 * closed.max(1.0),
                "closed {closed} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn sharp_norm_examples() {
        let alg = m2();
        let phi = FaithfulState::tracial(&alg);
        assert_eq!(phi.sharp_norm(&AlgebraElement::zero(&alg)), 0.0);
        // e_12: √(τ(e_22 + e_11)) = √τ(1) = 1
        assert!((phi.sharp_norm(&alg.unit(0, 0, 1)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sharp_norm_is_star_isometric_and_splits() {
        let alg = TracialAlgebra::markov(vec![2, 2]).unwrap();
        let mut rng = random::rng(103);
        for _ in 0..1000 {
            let phi = random::faithful_state(&alg, 0.02, &mut rng);
            let a = random::element(&alg, &mut rng);
            assert!((phi.sharp_norm(&a) - phi.sharp_norm(&a.adjoint())).abs() < 1e-12);
            let split = phi.gns_norm(&a).powi(2) + phi.gns_norm(&a.adjoint()).powi(2);
            assert!((phi.sharp_norm(&a).powi(2) - split).abs() < 1e-10);
        }
    }

    #[test]
    fn sigma_sort_membership_examples() {
        let alg = m2();
        let phi = FaithfulState::tracial(&alg);
        let one = AlgebraElement::identity(&alg);
        assert!(sort_membership_sigma(&one, &phi, 1.0, 1.0).unwrap().is_member);

        let phi = state_p(0.1);
        let e12 = alg.unit(0, 0, 1);
        let m = sort_membership_sigma(&e12, &phi, 4.0, 1.0).unwrap();
        assert!(!m.is_member);
        assert!((m.right_bound - 9.0).abs() < 1e-9);
        // memberships nest in both K and N
        assert!(sort_membership_sigma(&e12, &phi, 9.5, 1.0).unwrap().is_member);
    }

    #[test]
    fn modular_flow_is_trivial_for_tracial_states() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let phi = FaithfulState::tracial(&alg);
        let mut rng = random::rng(107);
        for _ in 0..10 {
            let x = random::element(&alg, &mut rng);
            let t: f64 = rng.random_range(-5.0..5.0);
            let y = modular_flow(&x, &phi, t).unwrap();
            assert!(y.sub(&x).op_norm() < 1e-12);
        }
    }

    #[test]
    fn modular_flow_phase_formula() {
        // σ_t(e_12) = (p/(1−p))^{it} e_12
        let p = 0.7;
        let phi = state_p(p);
        let alg = m2();
        let e12 = alg.unit(0, 0, 1);
        for t in [0.3, -1.2, 2.0] {
            let flow = modular_flow(&e12, &phi, t).unwrap();
            let phase = Complex64::from_polar(1.0, t * (p / (1.0 - p)).ln());
            let expect = e12.scale(phase);
            assert!(flow.sub(&expect).op_norm() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn modular_flow_laws() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let mut rng = random::rng(109);
        for _ in 0..30 {
            let phi = random::faithful_state(&alg, 0.05, &mut rng);
            let x = random::element(&alg, &mut rng);
            let y = random::element(&alg, &mut rng);
            let s: f64 = rng.random_range(-3.0..3.0);
            let t: f64 = rng.random_range(-3.0..3.0);
            // group law
            let a = modular_flow(&x, &phi, s + t).unwrap();
            let b = modular_flow(&modular_flow(&x, &phi, t).unwrap(), &phi, s).unwrap();
            assert!(a.sub(&b).op_norm() < 1e-10);
            // multiplicative, unital, star-preserving
            let fxy = modular_flow(&x.mul(&y), &phi, t).unwrap();
            let fx_fy =
                modular_flow(&x, &phi, t).unwrap().mul(&modular_flow(&y, &phi, t).unwrap());
            assert!(fxy.sub(&fx_fy).op_norm() < 1e-10);
            let one = AlgebraElement::identity(&alg);
            assert!(modular_flow(&one, &phi, t).unwrap().sub(&one).op_norm() < 1e-12);
            let fstar = modular_flow(&x.adjoint(), &phi, t).unwrap();
            assert!(fstar.sub(&modular_flow(&x, &phi, t).unwrap().adjoint()).op_norm() < 1e-10);
            // state invariance φ∘σ_t = φ
            let drift =
                (phi.evaluate(&modular_flow(&x, &phi, t).unwrap()) - phi.evaluate(&x)).norm();
            assert!(drift < 1e-10);
        }
    }

    #[test]
    fn ocneanu_ideal_and_multiplier_profiles() {
        let alg = m2();
        let n = 12;
        // m_i = (1/i)·1 → ideal profile → 0
        let mut terms = Vec::new();
        for i in 1..=n {
            let phi = FaithfulState::tracial(&alg);
            terms.push((AlgebraElement::identity(&alg).scale(cr(1.0 / i as f64)), phi));
        }
        let seq = SigmaSequence { terms, limit: None };
        let rep = ocneanu_predicates(&seq, &[], None).unwrap();
        assert!(rep.sharp_profile.tail_sup < 0.25);
        assert!(rep.sharp_profile.values[n - 1] < rep.sharp_profile.values[0]);

        // m_i = e_12 with ρ_i = diag(1−1/i, 1/i): sharp norm is exactly 1
        let mut terms = Vec::new();
        for i in 2..=n {
            let phi = state_p(1.0 - 1.0 / i as f64);
            terms.push((alg.unit(0, 0, 1), phi));
        }
        let seq = SigmaSequence { terms, limit: None };
        let rep = ocneanu_predicates(&seq, &[], None).unwrap();
        for v in &rep.sharp_profile.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!((rep.sharp_profile.tail_sup - 1.0).abs() < 1e-12);

        // constant unitary sequence: multiplier profiles bounded by the
        // test-sequence profiles
        let mut rng = random::rng(113);
        let u = random::unitary(&alg, &mut rng);
        let terms: Vec<_> = (0..n).map(|_| (u.clone(), FaithfulState::tracial(&alg))).collect();
        let tests: Vec<AlgebraElement> = (0..n)
            .map(|i| random::element(&alg, &mut rng).scale(cr(1.0 / (i + 1) as f64)))
            .collect();
        let test_profile: Vec<f64> =
            terms.iter().zip(&tests).map(|((_, phi), j)| phi.sharp_norm(j)).collect();
        let seq = SigmaSequence { terms, limit: None };
        let rep = ocneanu_predicates(&seq, &[tests], Some(2.0)).unwrap();
        let (right, left) = &rep.multiplier_profiles[0];
        for i in 0..n {
            assert!(right.values[i] <= test_profile[i] + 1e-12);
            assert!(left.values[i] <= test_profile[i] + 1e-12);
        }
    }

    #[test]
    fn ocneanu_rejects_norms_above_cap() {
        let alg = m2();
        let terms = vec![(
            AlgebraElement::identity(&alg).scale(cr(10.0)),
            FaithfulState::tracial(&alg),
        )];
        let seq = SigmaSequence { terms, limit: None };
        assert!(matches!(
            ocneanu_predicates(&seq, &[], Some(1.0)),
            Err(CorrError::Precondition(_))
        ));
    }

    #[test]
    fn modular_limit_residuals() {
        let alg = m2();
        let mut rng = random::rng(127);
        let x = random::element(&alg, &mut rng);
        let phi = state_p(0.6);
        // constant sequence → identically zero
        let seq = SigmaSequence {
            terms: (0..6).map(|_| (x.clone(), phi.clone())).collect(),
            limit: Some((x.clone(), phi.clone())),
        };
        let prof = modular_limit_check(&seq, 0.8).unwrap();
        assert!(prof.tail_sup < 1e-12);

        // convergence at rate 1/i → decaying residual; t = 0 reduces to the
        // plain gap ‖x_i − x‖^♯.
        let n = 40;
        let mut terms = Vec::new();
        for i in 1..=n {
            let eps = 1.0 / i as f64;
            let xi = x.add(&alg.unit(0, 0, 1).scale(cr(eps)));
            let rho_i =
                FaithfulState::diagonal(&alg, &[0.6 - 0.1 * eps, 0.4 + 0.1 * eps]).unwrap();
            terms.push((xi, rho_i));
        }
        let seq = SigmaSequence { terms, limit: Some((x.clone(), phi.clone())) };
        let prof_t = modular_limit_check(&seq, 0.8).unwrap();
        assert!(prof_t.values[n - 1] < prof_t.values[0]);
        assert!(prof_t.tail_sup < 0.2);
        let prof_0 = modular_limit_check(&seq, 0.0).unwrap();
        for (i, (xi, phi_i)) in seq.terms.iter().enumerate() {
            let gap = phi_i.sharp_norm(&xi.sub(&x));
            assert!((prof_0.values[i] - gap).abs() < 1e-12);
        }
    }

    #[test]
    fn modular_limit_requires_declared_limit() {
        let alg = m2();
        let seq = SigmaSequence {
            terms: vec![(AlgebraElement::identity(&alg), FaithfulState::tracial(&alg))],
            limit: None,
        };
        assert!(matches!(modular_limit_check(&seq, 1.0), Err(CorrError::Precondition(_))));
    }

    #[test]
    fn dense_projection_reaches_target_as_level_grows() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let mut rng = random::rng(131);
        for _ in 0..10 {
            let phi = random::faithful_state(&alg, 0.05, &mut rng);
            let u = random::unitary(&alg, &mut rng);
            let first = phi_dense_projection(&u, &phi, 1.0).unwrap();
            for k in [1.0, 4.0, 16.0, 1e3] {
                let step = phi_dense_projection(&u, &phi, k).unwrap();
                assert!(step.domination_defect < 1e-10);
                assert!(step.right_bound.is_finite());
            }
            // the density's condition number is modest, so the projection
            // saturates at 1 well before K = 10³
            let last = phi_dense_projection(&u, &phi, 1e3).unwrap();
            assert!(last.gns_distance < 1e-3, "distance {}", last.gns_distance);
            assert!(last.gns_distance <= first.gns_distance + 1e-12);
        }
    }
}
