//! Fell-neighborhood residuals and weak containment of correspondences,
//! plus the central-vector machinery: commutator defects, the orthogonal
//! projection onto the central subspace, the averaged (min-norm) central
//! vector with its bound guarantees, and a feasibility search for almost
//! central, almost tracial unit vectors.
//!
//! The Fell solver is multi-start nonlinear least squares on the stacked
//! matrix-coefficient gaps.  Structured starts (an identity copy, an
//! equivariant-intertwiner embedding, and caller-supplied warm starts) are
//! tried first; containment is certified only up to the reported residual.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bimodule::{Correspondence, CorrVector};
use crate::boundcalc;
use crate::cpdict;
use crate::error::{CorrError, Result};
use crate::linalg::{self, cr, CMat, CVec};
use crate::matalg::{AlgebraElement, TracialAlgebra};
use crate::solvers;

/// A basic Fell neighborhood query `V(H; ε, E, F, S)`.
#[derive(Clone, Debug)]
pub struct FellQuery {
    /// Finite subset of the left algebra.
    pub e: Vec<AlgebraElement>,
    /// Finite subset of the right algebra.
    pub f: Vec<AlgebraElement>,
    /// Finite set of vectors of the source correspondence.
    pub s: Vec<CorrVector>,
    pub eps: f64,
    /// Multiplicity cap for the target.
    pub multiplicity: usize,
}

impl FellQuery {
    /// The default grid entry: all matrix units on both sides.
    pub fn full_units(
        left: &TracialAlgebra,
        right: &TracialAlgebra,
        s: Vec<CorrVector>,
        eps: f64,
        multiplicity: usize,
    ) -> Self {
        Self { e: left.units(), f: right.units(), s, eps, multiplicity }
    }
}

/// Options for the multi-start solver.
#[derive(Clone, Debug)]
pub struct FellOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Skip the dense Gauss–Newton polish above this many real parameters;
    /// structured starts still apply.
    pub dense_param_cap: usize,
    /// Witness sets supplied by the caller, tried before anything else.
    pub warm_starts: Vec<Vec<CorrVector>>,
    /// Attempt the equivariant-intertwiner start (skipped when the
    /// vectorized intertwiner space is too large).
    pub use_intertwiner_start: bool,
}

impl Default for FellOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            seed: 0,
            max_iterations: 120,
            dense_param_cap: 600,
            warm_starts: Vec::new(),
            use_intertwiner_start: true,
        }
    }
}

/// Best witnesses found for a query and their residual.
#[derive(Clone, Debug)]
pub struct FellOutcome {
    /// `max |⟨ξ_i, xξ_j y⟩ − ⟨η_i, xη_j y⟩|` at the returned witnesses.
    pub residual: f64,
    /// Witnesses in the coordinates of `target^{⊕m}`.
    pub witnesses: Vec<CorrVector>,
    /// Whether the residual is at or below the query's ε.
    pub converged: bool,
}

struct GapProblem {
    /// One matrix per (x, y) pair, acting on `target^{⊕m}`.
    b_mats: Vec<CMat>,
    /// Source coefficients, indexed `[xy][i][j]`.
    coeffs: Vec<Vec<Vec<Complex64>>>,
    n: usize,
    d: usize,
}

impl GapProblem {
    /// `(max |gap|, Σ |gap|²)` at the given witnesses.
    #[allow(clippy::needless_range_loop)]
    fn eval(&self, etas: &[CVec]) -> (f64, f64) {
        let mut max_gap: f64 = 0.0;
        let mut cost = 0.0;
        for (xy, b) in self.b_mats.iter().enumerate() {
            let images: Vec<CVec> = etas.iter().map(|e| b * e).collect();
            for i in 0..self.n {
                for j in 0..self.n {
                    // ⟨η_i, B η_j⟩, linear in η_i
                    let r = linalg::inner(&etas[i], &images[j]) - self.coeffs[xy][i][j];
                    let gap = r.norm();
                    max_gap = max_gap.max(gap);
                    cost += gap * gap;
                }
            }
        }
        (max_gap, cost)
    }
}

/// Search for witnesses `η_1..η_n ∈ target^{⊕m}` matching the matrix
/// coefficients of the queried vectors of `source`.
pub fn fell_residual(
    source: &Correspondence,
    target: &Correspondence,
    query: &FellQuery,
    opts: &FellOptions,
) -> Result<FellOutcome> {
    if source.left_algebra() != target.left_algebra()
        || source.right_algebra() != target.right_algebra()
    {
        return Err(CorrError::Structural(
            "source and target live over different algebras".into(),
        ));
    }
    if query.eps.is_nan() || query.eps <= 0.0 {
        return Err(CorrError::Domain("ε must be > 0".into()));
    }
    if query.multiplicity == 0 {
        return Err(CorrError::Domain("multiplicity must be ≥ 1".into()));
    }
    if query.s.is_empty() {
        return Err(CorrError::Domain("query needs at least one vector".into()));
    }
    for v in &query.s {
        if v.len() != source.dim() {
            return Err(CorrError::Structural(format!(
                "query vector of length {}, source dim {}",
                v.len(),
                source.dim()
            )));
        }
    }

    let target_m =
        Correspondence::direct_sum(std::slice::from_ref(target), &[query.multiplicity])?.corr;
    let n = query.s.len();
    let d = target_m.dim();

    // Source coefficients and target gap matrices, per (x, y).
    let mut b_mats = Vec::with_capacity(query.e.len() * query.f.len());
    let mut coeffs = Vec::with_capacity(query.e.len() * query.f.len());
    for x in &query.e {
        let sx = source.left_matrix(x);
        let tx = target_m.left_matrix(x);
        for y in &query.f {
            let sy = source.right_matrix(y);
            let ty = target_m.right_matrix(y);
            let s_op = &sx * &sy;
            b_mats.push(&tx * &ty);
            let images: Vec<CVec> = query.s.iter().map(|v| &s_op * v).collect();
            let mut c = vec![vec![Complex64::ZERO; n]; n];
            #[allow(clippy::needless_range_loop)]
            for i in 0..n {
                for j in 0..n {
                    c[i][j] = linalg::inner(&query.s[i], &images[j]);
                }
            }
            coeffs.push(c);
        }
    }
    let problem = GapProblem { b_mats, coeffs, n, d };

    // Start list: warm starts, the identity copy, the equivariant
    // embedding, then seeded random starts.
    let mut starts: Vec<Vec<CVec>> = Vec::new();
    for w in &opts.warm_starts {
        if w.len() == n && w.iter().all(|v| v.len() == d) {
            starts.push(w.clone());
        }
    }
    if d >= source.dim() {
        starts.push(
            query
                .s
                .iter()
                .map(|v| {
                    let mut padded = CVec::zeros(d);
                    padded.rows_mut(0, source.dim()).copy_from(v);
                    padded
                })
                .collect(),
        );
    }
    if opts.use_intertwiner_start && source.dim() * d <= 4096 && source.dim() <= d {
        if let Ok(iso) = cpdict::equivariant_isometry(source, &target_m) {
            starts.push(query.s.iter().map(|v| &iso.isometry * v).collect());
        }
    }
    let mut rng = crate::random::rng(opts.seed);
    let scales: Vec<f64> = query.s.iter().map(|v| v.norm().max(1e-3)).collect();
    while starts.len() < opts.starts {
        let cand: Vec<CVec> = scales
            .iter()
            .map(|&s| crate::random::unit_vector(d, &mut rng) * cr(s))
            .collect();
        starts.push(cand);
    }

    let stop_at = query.eps * 0.5;
    let mut best: Option<(f64, Vec<CVec>)> = None;
    for start in starts {
        let polished = if 2 * n * d <= opts.dense_param_cap {
            levenberg_marquardt(&problem, start, opts.max_iterations, stop_at)
        } else {
            start
        };
        let (gap, _) = problem.eval(&polished);
        if best.as_ref().is_none_or(|(g, _)| gap < *g) {
            best = Some((gap, polished));
        }
        if best.as_ref().unwrap().0 <= stop_at {
            break;
        }
    }
    let (residual, witnesses) = best.expect("at least one start");
    Ok(FellOutcome { residual, witnesses, converged: residual <= query.eps })
}

/// Dense Gauss–Newton with Levenberg damping on the stacked complex gaps.
#[allow(clippy::needless_range_loop)]
fn levenberg_marquardt(
    problem: &GapProblem,
    start: Vec<CVec>,
    max_iterations: usize,
    stop_at: f64,
) -> Vec<CVec> {
    let (n, d) = (problem.n, problem.d);
    let params = 2 * n * d;
    let mut etas = start;
    let (mut gap, mut cost) = problem.eval(&etas);
    let mut lambda = 1e-3;
    for _ in 0..max_iterations {
        if gap <= stop_at {
            break;
        }
        // Accumulate JᵀJ and Jᵀr with complex per-parameter gradients g;
        // the two real rows of one complex residual contribute
        // Re(conj(g_p) g_q) and Re(conj(g_p) r).
        let mut jtj = DMatrix::<f64>::zeros(params, params);
        let mut jtr = vec![0.0f64; params];
        let mut grad_idx: Vec<usize> = Vec::with_capacity(4 * d);
        let mut grad_val: Vec<Complex64> = Vec::with_capacity(4 * d);
        for (xy, b) in problem.b_mats.iter().enumerate() {
            let images: Vec<CVec> = etas.iter().map(|e| b * e).collect();
            let adj_images: Vec<CVec> = etas.iter().map(|e| b.adjoint() * e).collect();
            for i in 0..n {
                for j in 0..n {
                    // r = Σ_a η_i[a] conj((Bη_j)[a]) − c
                    let r = linalg::inner(&etas[i], &images[j]) - problem.coeffs[xy][i][j];
                    grad_idx.clear();
                    grad_val.clear();
                    // ∂r/∂η_i[a] = conj((Bη_j)[a]); ∂r/∂conj(η_j[a]) = (B^H η_i)[a]
                    for a in 0..d {
                        let base = 2 * (i * d + a);
                        let g = images[j][a].conj();
                        grad_idx.push(base);
                        grad_val.push(g);
                        grad_idx.push(base + 1);
                        grad_val.push(Complex64::new(0.0, 1.0) * g);
                    }
                    for a in 0..d {
                        let base = 2 * (j * d + a);
                        let g = adj_images[i][a];
                        grad_idx.push(base);
                        grad_val.push(g);
                        grad_idx.push(base + 1);
                        grad_val.push(Complex64::new(0.0, -1.0) * g);
                    }
                    for (pi, &p) in grad_idx.iter().enumerate() {
                        let gp = grad_val[pi];
                        jtr[p] += (gp.conj() * r).re;
                        for (qi, &q) in grad_idx.iter().enumerate() {
                            jtj[(p, q)] += (gp.conj() * grad_val[qi]).re;
                        }
                    }
                }
            }
        }
        let mut improved = false;
        for _ in 0..8 {
            let mut damped = jtj.clone();
            for p in 0..params {
                damped[(p, p)] += lambda * (jtj[(p, p)] + 1e-12);
            }
            let rhs = DMatrix::<f64>::from_column_slice(params, 1, &jtr);
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let delta = chol.solve(&rhs);
            let mut trial = etas.clone();
            for i in 0..n {
                for a in 0..d {
                    let base = 2 * (i * d + a);
                    trial[i][a] -= Complex64::new(delta[(base, 0)], delta[(base + 1, 0)]);
                }
            }
            let (tgap, tcost) = problem.eval(&trial);
            if tcost < cost {
                etas = trial;
                gap = tgap;
                cost = tcost;
                lambda = (lambda * 0.33).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    etas
}

/// Outcome of one query inside a containment report.
#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub residual: f64,
    pub converged: bool,
    pub witnesses: Vec<CorrVector>,
}

/// Verdict of a weak-containment sweep.
#[derive(Clone, Debug)]
pub struct ContainmentReport {
    pub outcomes: Vec<QueryOutcome>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub contained: bool,
}

/// Run [`fell_residual`] over a grid of queries; the default grid pairs all
/// matrix units with an orthonormal basis of each cyclic summand of the
/// source.
pub fn weak_containment_report(
    source: &Correspondence,
    target: &Correspondence,
    multiplicity: usize,
    tolerance: f64,
    seed: u64,
    queries: Option<Vec<FellQuery>>,
    warm_starts: &[Vec<CorrVector>],
) -> Result<ContainmentReport> {
    let queries = match queries {
        Some(q) => q,
        None => {
            let mut grid = Vec::new();
            for summand in cpdict::cyclic_decomposition(source, seed)? {
                let s: Vec<CorrVector> = (0..summand.corr.dim())
                    .map(|j| summand.embedding.column(j).into_owned())
                    .collect();
                grid.push(FellQuery::full_units(
                    source.left_algebra(),
                    source.right_algebra(),
                    s,
                    tolerance,
                    multiplicity,
                ));
            }
            grid
        }
    };
    let mut outcomes = Vec::new();
    let mut max_residual: f64 = 0.0;
    for query in &queries {
        let opts =
            FellOptions { seed, warm_starts: warm_starts.to_vec(), ..FellOptions::default() };
        let out = fell_residual(source, target, query, &opts)?;
        max_residual = max_residual.max(out.residual);
        outcomes.push(QueryOutcome {
            residual: out.residual,
            converged: out.converged,
            witnesses: out.witnesses,
        });
    }
    Ok(ContainmentReport {
        outcomes,
        max_residual,
        tolerance,
        contained: max_residual <= tolerance,
    })
}

#[derive(Clone, Debug)]
pub struct SemidiscreteReport {
    pub report: ContainmentReport,
    pub elapsed_ms: u128,
}

/// Containment report for `trivial(alg) ≺ coarse(alg, alg)` — the positive
/// control: at finite dimension every algebra is semidiscrete and an exact
/// equivariant embedding exists, which seeds the solver.
pub fn semidiscrete_control(
    alg: &TracialAlgebra,
    multiplicity: usize,
    tolerance: f64,
    seed: u64,
) -> Result<SemidiscreteReport> {
    let started = std::time::Instant::now();
    let trivial = Correspondence::trivial(alg);
    let coarse = Correspondence::coarse(alg, alg);
    let embed = standard_coarse_embedding(alg);
    let summands = cpdict::cyclic_decomposition(&trivial, seed)?;
    let mut warm = Vec::new();
    let mut queries = Vec::new();
    for summand in &summands {
        let s: Vec<CorrVector> = (0..summand.corr.dim())
            .map(|j| summand.embedding.column(j).into_owned())
            .collect();
        let mut w = Vec::new();
        for v in &s {
            let image = &embed * v;
            let mut padded = CVec::zeros(coarse.dim() * multiplicity);
            padded.rows_mut(0, coarse.dim()).copy_from(&image);
            w.push(padded);
        }
        warm.push(w);
        queries.push(FellQuery::full_units(alg, alg, s, tolerance, multiplicity));
    }
    let report = weak_containment_report(
        &trivial,
        &coarse,
        multiplicity,
        tolerance,
        seed,
        Some(queries),
        &warm,
    )?;
    Ok(SemidiscreteReport { report, elapsed_ms: started.elapsed().as_millis() })
}

/// The matrix of the equivariant isometry `â ↦ (λ(a)⊗1)Ω` from the trivial
/// into the coarse correspondence, where
/// `Ω = Σ_k (λ_k n_k)^{-1/2} Σ_ij e^k_ij ⊗ e^k_ji` is a unit vector whose
/// matrix coefficients reproduce those of `1̂`.
pub fn standard_coarse_embedding(alg: &TracialAlgebra) -> CMat {
    let triv = Correspondence::trivial(alg);
    let dm = alg.dim();
    let mut omega = CVec::zeros(dm * dm);
    for (k, &n) in alg.blocks().iter().enumerate() {
        let w = alg.weights()[k];
        let amp = cr((w / n as f64).sqrt());
        for i in 0..n {
            for j in 0..n {
                let a = alg.unit_index(k, i, j);
                let b = alg.unit_index(k, j, i);
                omega[a * dm + b] = amp;
            }
        }
    }
    let eye = linalg::identity(dm);
    let mut out = CMat::zeros(dm * dm, dm);
    for a in 0..dm {
        let left = linalg::kron(triv.left_unit_matrix(a), &eye);
        let col = (&left * &omega) / cr(alg.unit_weight(a).sqrt());
        out.set_column(a, &col);
    }
    out
}

/// `max_a ‖aξ − ξa‖` over the supplied generators.
pub fn commutator_defect(
    corr: &Correspondence,
    v: &CorrVector,
    generators: &[AlgebraElement],
) -> Result<f64> {
    if !corr.is_two_sided() {
        return Err(CorrError::Structural(
            "commutators need an M-M correspondence over one algebra".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for a in generators {
        worst = worst.max((corr.act_left(a, v) - corr.act_right(a, v)).norm());
    }
    Ok(worst)
}

/// The default generating set: all matrix units (each of operator norm 1).
pub fn default_generators(alg: &TracialAlgebra) -> Vec<AlgebraElement> {
    alg.units()
}

/// Central part of a vector with its distance and commutator defect.
#[derive(Clone, Debug)]
pub struct CentralReport {
    pub central_part: CorrVector,
    pub distance: f64,
    pub defect: f64,
}

/// Orthonormal basis of the central subspace `{η : aη = ηa for all a}`,
/// from the null space of the stacked commutator operators (singular values
/// below 1e-10 count as zero).
pub fn central_subspace(corr: &Correspondence) -> Result<CMat> {
    if !corr.is_two_sided() {
        return Err(CorrError::Structural("central vectors need an M-M correspondence".into()));
    }
    let d = corr.dim();
    let dm = corr.left_algebra().dim();
    let mut stacked = CMat::zeros(dm * d, d);
    for a in 0..dm {
        let diff = corr.left_unit_matrix(a) - corr.right_unit_matrix(a);
        stacked.view_mut((a * d, 0), (d, d)).copy_from(&diff);
    }
    let svd = nalgebra::SVD::new(stacked, false, true);
    let vt = svd.v_t.expect("svd computed with v");
    let null_rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&r| svd.singular_values[r] < 1e-10)
        .collect();
    let mut basis = CMat::zeros(d, null_rows.len());
    for (j, &r) in null_rows.iter().enumerate() {
        basis.set_column(j, &vt.row(r).adjoint());
    }
    Ok(basis)
}

/// Orthogonal projection of `v` onto the central subspace.
pub fn central_projection(corr: &Correspondence, v: &CorrVector) -> Result<CentralReport> {
    if v.len() != corr.dim() {
        return Err(CorrError::Structural(format!(
            "vector of length {}, correspondence dim {}",
            v.len(),
            corr.dim()
        )));
    }
    let basis = central_subspace(corr)?;
    let central_part = if basis.ncols() == 0 {
        CVec::zeros(corr.dim())
    } else {
        &basis * (basis.adjoint() * v)
    };
    let distance = (v - &central_part).norm();
    let defect = commutator_defect(corr, v, &default_generators(corr.left_algebra()))?;
    Ok(CentralReport { central_part, distance, defect })
}

/// Options for [`averaged_central_vector`] and [`min_norm_hull_point`].
#[derive(Clone, Copy, Debug)]
pub struct AveragingOptions {
    pub haar_samples: usize,
    pub seed: u64,
}

impl Default for AveragingOptions {
    fn default() -> Self {
        Self { haar_samples: 256, seed: 0 }
    }
}

/// Output of the averaged-central-vector construction.
#[derive(Clone, Debug)]
pub struct AveragedCentralReport {
    /// The normalized central vector; `None` when the central mass vanishes.
    pub eta: Option<CorrVector>,
    /// `‖ξ − η‖` (0 when degenerate).
    pub distance: f64,
    /// Certified two-sided bound of η.
    pub eta_bound: f64,
    /// `max ‖[u, ξ]‖` over the Haar sample.
    pub delta_sampled: f64,
    /// Certified over-estimate `2 Σ_a ‖[e_a, ξ]‖` of the unitary supremum.
    pub delta_certified: f64,
    /// `‖ξ − η‖ ≤ 2δ` held at the supplied δ.
    pub distance_within_bound: bool,
    /// Certified bound of η at most `K/(1−δ)²`.
    pub bound_within_bound: bool,
}

/// For a K-bounded unit vector with `sup_u ‖[u, ξ]‖ ≤ δ < 1`, the min-norm
/// point of `conv{uξu*}` is exactly the central projection of ξ (every hull
/// element shares the central component, and the Haar average — which is
/// that projection — lies in the hull); normalizing it gives a
/// `K/(1−δ)²`-bounded central unit vector within `2δ` of ξ.
pub fn averaged_central_vector(
    corr: &Correspondence,
    v: &CorrVector,
    k: f64,
    delta: f64,
    opts: &AveragingOptions,
) -> Result<AveragedCentralReport> {
    if delta.is_nan() || delta >= 1.0 {
        return Err(CorrError::Domain(format!("δ must be < 1, got {delta}")));
    }
    if (v.norm() - 1.0).abs() > 1e-8 {
        return Err(CorrError::Precondition(format!("needs a unit vector; ‖ξ‖ = {}", v.norm())));
    }
    let cert = boundcalc::radon_nikodym(corr, v)?;
    if cert.max_bound() > k + 1e-9 {
        return Err(CorrError::Precondition(format!(
            "vector is not {k}-bounded: certified bound {}",
            cert.max_bound()
        )));
    }
    let alg = corr.left_algebra().clone();
    let mut rng = crate::random::rng(opts.seed);
    let mut delta_sampled: f64 = 0.0;
    for _ in 0..opts.haar_samples {
        let u = crate::random::unitary(&alg, &mut rng);
        delta_sampled = delta_sampled.max((corr.act_left(&u, v) - corr.act_right(&u, v)).norm());
    }
    if delta_sampled > delta + 1e-12 {
        return Err(CorrError::Precondition(format!(
            "sampled commutator supremum {delta_sampled:.3e} exceeds δ = {delta}"
        )));
    }
    let mut delta_certified = 0.0;
    for a in alg.units() {
        delta_certified += (corr.act_left(&a, v) - corr.act_right(&a, v)).norm();
    }
    delta_certified *= 2.0;

    let projected = central_projection(corr, v)?;
    let mass = projected.central_part.norm();
    if mass < 1e-14 {
        return Ok(AveragedCentralReport {
            eta: None,
            distance: 0.0,
            eta_bound: 0.0,
            delta_sampled,
            delta_certified,
            distance_within_bound: false,
            bound_within_bound: false,
        });
    }
    let eta = &projected.central_part / cr(mass);
    let distance = (v - &eta).norm();
    let eta_bound = boundcalc::radon_nikodym(corr, &eta)?.max_bound();
    Ok(AveragedCentralReport {
        eta: Some(eta),
        distance,
        eta_bound,
        delta_sampled,
        delta_certified,
        distance_within_bound: distance <= 2.0 * delta + 1e-9,
        bound_within_bound: eta_bound <= k / (1.0 - delta).powi(2) + 1e-9,
    })
}

/// Min-norm point of the sampled hull `conv{u_j ξ u_j*}` by Frank–Wolfe —
/// the cross-check for the central-projection identity.
pub fn min_norm_hull_point(
    corr: &Correspondence,
    v: &CorrVector,
    opts: &AveragingOptions,
) -> Result<(CorrVector, f64)> {
    if !corr.is_two_sided() {
        return Err(CorrError::Structural("needs an M-M correspondence".into()));
    }
    let alg = corr.left_algebra().clone();
    let mut rng = crate::random::rng(opts.seed);
    let mut atoms = Vec::with_capacity(opts.haar_samples);
    for _ in 0..opts.haar_samples {
        let u = crate::random::unitary(&alg, &mut rng);
        atoms.push(corr.act_right(&u.adjoint(), &corr.act_left(&u, v)));
    }
    let zero = CVec::zeros(corr.dim());
    let sol = solvers::simplex_least_squares(&atoms, &zero, 1e-10, 50_000);
    Ok((sol.point, sol.duality_gap))
}

/// Constraint values of a candidate almost-central vector.
#[derive(Clone, Copy, Debug)]
pub struct CentralityConstraints {
    /// `max_x ‖[x, ξ]‖`.
    pub commutator: f64,
    /// `max_x |⟨xξ, ξ⟩ − τ(x)|`.
    pub left_tracial: f64,
    /// `max_x |⟨ξx, ξ⟩ − τ(x)|`.
    pub right_tracial: f64,
}

impl CentralityConstraints {
    pub fn max(&self) -> f64 {
        self.commutator.max(self.left_tracial).max(self.right_tracial)
    }
}

/// Outcome of [`almost_central_search`].
#[derive(Clone, Debug)]
pub struct CentralSearchReport {
    pub witness: Option<CorrVector>,
    pub constraints: CentralityConstraints,
    /// Worst excess of a constraint over δ at the best candidate.
    pub residual: f64,
    /// Certified bound of the best candidate.
    pub bound: f64,
}

/// Options for the projected-gradient feasibility search.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub seed: u64,
    pub starts: usize,
    pub iterations: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { seed: 0, starts: 8, iterations: 300 }
    }
}

fn constraint_values(
    corr: &Correspondence,
    gens: &[AlgebraElement],
    v: &CorrVector,
) -> CentralityConstraints {
    let mut commutator: f64 = 0.0;
    let mut left: f64 = 0.0;
    let mut right: f64 = 0.0;
    for a in gens {
        let tau = a.trace();
        commutator = commutator.max((corr.act_left(a, v) - corr.act_right(a, v)).norm());
        left = left.max((linalg::inner(&corr.act_left(a, v), v) - tau).norm());
        right = right.max((linalg::inner(&corr.act_right(a, v), v) - tau).norm());
    }
    CentralityConstraints { commutator, left_tracial: left, right_tracial: right }
}

/// Projected-gradient search for a K-bounded unit vector that is almost
/// central and almost tracial at level δ over the generating set; the
/// K-bound is enforced by renormalization toward K after every step.
pub fn almost_central_search(
    corr: &Correspondence,
    generators: &[AlgebraElement],
    delta: f64,
    k: f64,
    opts: &SearchOptions,
) -> Result<CentralSearchReport> {
    if !corr.is_two_sided() {
        return Err(CorrError::Structural("needs an M-M correspondence".into()));
    }
    if k.is_nan() || k <= 0.0 {
        return Err(CorrError::Precondition(
            "K = 0 admits no unit vector (⟨ξ, ξ⟩ = 1 > 0 = K·τ(1))".into(),
        ));
    }
    if delta < 0.0 {
        return Err(CorrError::Domain("δ must be ≥ 0".into()));
    }
    let d = corr.dim();
    let gens = generators;
    let diff_mats: Vec<CMat> =
        gens.iter().map(|a| corr.left_matrix(a) - corr.right_matrix(a)).collect();
    let left_mats: Vec<CMat> = gens.iter().map(|a| corr.left_matrix(a)).collect();
    let right_mats: Vec<CMat> = gens.iter().map(|a| corr.right_matrix(a)).collect();
    let taus: Vec<Complex64> = gens.iter().map(AlgebraElement::trace).collect();

    let objective = |v: &CVec| -> f64 {
        let mut total = 0.0;
        for m in &diff_mats {
            total += (m * v).norm_squared();
        }
        for (m, tau) in left_mats.iter().zip(&taus).chain(right_mats.iter().zip(&taus)) {
            total += (linalg::inner(&(m * v), v) - tau).norm_sqr();
        }
        total
    };
    let gradient = |v: &CVec| -> CVec {
        let mut g = CVec::zeros(d);
        for m in &diff_mats {
            g += m.adjoint() * (m * v);
        }
        for (m, tau) in left_mats.iter().zip(&taus).chain(right_mats.iter().zip(&taus)) {
            let f = linalg::inner(&(m * v), v) - tau;
            g += (m * v) * f.conj() + (m.adjoint() * v) * f;
        }
        g
    };
    let project = |v: &CVec| -> Result<CVec> {
        let mut w = v.clone();
        for _ in 0..3 {
            let n = w.norm();
            if n < 1e-14 {
                return Ok(CVec::zeros(d));
            }
            w /= cr(n);
            let cert = boundcalc::radon_nikodym(corr, &w)?;
            if cert.max_bound() <= k * (1.0 + 1e-12) {
                break;
            }
            w = boundcalc::scale_to_bound(corr, &w, k)?.vector;
        }
        let n = w.norm();
        if n > 1e-14 {
            w /= cr(n);
        }
        Ok(w)
    };

    let mut rng = crate::random::rng(opts.seed);
    let mut best: Option<(f64, CVec)> = None;
    for s in 0..opts.starts.max(1) {
        let raw = crate::random::unit_vector(d, &mut rng);
        let mut cand = if s % 2 == 0 {
            // start from the central part when it exists
            let c = central_projection(corr, &raw)?.central_part;
            if c.norm() > 1e-10 {
                c
            } else {
                raw
            }
        } else {
            raw
        };
        cand = project(&cand)?;
        if cand.norm() < 0.5 {
            continue;
        }
        let mut value = objective(&cand);
        let mut lr = 0.1;
        for _ in 0..opts.iterations {
            if value < 1e-24 {
                break;
            }
            let g = gradient(&cand);
            if g.norm() < 1e-14 {
                break;
            }
            let mut stepped = false;
            while lr > 1e-9 {
                let trial = project(&(&cand - &g * cr(lr)))?;
                if trial.norm() < 0.5 {
                    lr *= 0.5;
                    continue;
                }
                let tv = objective(&trial);
                if tv < value {
                    cand = trial;
                    value = tv;
                    lr = (lr * 1.5).min(0.5);
                    stepped = true;
                    break;
                }
                lr *= 0.5;
            }
            if !stepped {
                break;
            }
        }
        if best.as_ref().is_none_or(|(bv, _)| value < *bv) {
            best = Some((value, cand));
        }
        if best.as_ref().unwrap().0 < 1e-24 {
            break;
        }
    }
    let (_, cand) = best.ok_or(CorrError::Solver { residual: f64::INFINITY })?;
    let constraints = constraint_values(corr, gens, &cand);
    let residual = (constraints.max() - delta).max(0.0);
    let bound = boundcalc::radon_nikodym(corr, &cand)?.max_bound();
    let feasible = residual <= 1e-9 && bound <= k + 1e-9;
    Ok(CentralSearchReport {
        witness: feasible.then_some(cand),
        constraints,
        residual,
        bound,
    })
}
