//! Distinguished state families on a multi-matrix C*-algebra and the
//! two-sided L² seminorm `‖x‖_{2,Φ} = sup_φ max{φ(x*x), φ(xx*)}^{1/2}`.
//!
//! The `full_closure` flag replaces a finite family by the unitary orbit of
//! each of its states; the orbit supremum is computed exactly per block by
//! the trace inequality `sup_u φ(u*Au) = Σ μ_i↓(ρ) μ_i↓(A)`.

use crate::boundcalc::tail_supremum;
use crate::error::{CorrError, Result};
use crate::linalg::{self, cr, CMat};
use crate::matalg::{AlgebraElement, TracialAlgebra};

/// A family of states given by density elements under the plain trace
/// pairing; densities need not be faithful individually.
#[derive(Clone, Debug)]
pub struct StatialFamily {
    algebra: TracialAlgebra,
    densities: Vec<AlgebraElement>,
    full_closure: bool,
}

impl StatialFamily {
    pub fn new(
        algebra: TracialAlgebra,
        densities: Vec<AlgebraElement>,
        full_closure: bool,
    ) -> Result<Self> {
        if densities.is_empty() {
            return Err(CorrError::Domain("state family must be nonempty".into()));
        }
        for (i, rho) in densities.iter().enumerate() {
            if rho.algebra() != &algebra {
                return Err(CorrError::Structural(format!(
                    "density {i} lives over a different algebra"
                )));
            }
            let pos = rho.positivity_check(1e-10);
            if !pos.is_positive {
                return Err(CorrError::NotPositive { min_eig: pos.min_eigenvalue });
            }
            let total: f64 = rho.blocks().iter().map(|b| b.trace().re).sum();
            if (total - 1.0).abs() > 1e-10 {
                return Err(CorrError::Domain(format!(
                    "density {i} has total trace {total}, expected 1"
                )));
            }
        }
        Ok(Self { algebra, densities, full_closure })
    }

    /// The singleton family of the algebra's trace.
    pub fn tracial(algebra: &TracialAlgebra) -> Self {
        let blocks = algebra
            .blocks()
            .iter()
            .zip(algebra.weights())
            .map(|(&n, &w)| CMat::identity(n, n) * cr(w))
            .collect();
        let rho = AlgebraElement::from_blocks(algebra, blocks).expect("matching shapes");
        Self { algebra: algebra.clone(), densities: vec![rho], full_closure: false }
    }

    pub fn algebra(&self) -> &TracialAlgebra {
        &self.algebra
    }

    pub fn densities(&self) -> &[AlgebraElement] {
        &self.densities
    }

    pub fn full_closure(&self) -> bool {
        self.full_closure
    }

    pub fn with_full_closure(mut self, on: bool) -> Self {
        self.full_closure = on;
        self
    }

    fn evaluate(rho: &AlgebraElement, x: &AlgebraElement) -> f64 {
        Self::evaluate_complex(rho, x).re
    }

    fn evaluate_complex(rho: &AlgebraElement, x: &AlgebraElement) -> num_complex::Complex64 {
        rho.blocks().iter().zip(x.blocks()).map(|(r, b)| (r * b).trace()).sum()
    }
}

fn descending_eigenvalues(x: &AlgebraElement, block: usize) -> Result<Vec<f64>> {
    let eig = x.eigen()?;
    let mut v: Vec<f64> = eig.eigenvalues(block).to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// `sup_u φ(u* x*x u)` via the rearrangement pairing of descending
/// eigenvalues per block; `x*x` and `xx*` share their spectra blockwise, so
/// the squared singular values of `x` serve both routes.
fn orbit_sup_squares(rho: &AlgebraElement, x: &AlgebraElement) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..rho.algebra().num_blocks() {
        let r = descending_eigenvalues(rho, k)?;
        let mut s: Vec<f64> = x.block(k).clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        total += r.iter().zip(&s).map(|(w, sv)| w * sv * sv).sum::<f64>();
    }
    Ok(total)
}

/// The statial seminorm of `x`; with `full_closure` the supremum runs over
/// the exact unitary orbit of every listed state.
pub fn statial_norm(x: &AlgebraElement, family: &StatialFamily) -> Result<f64> {
    let (r1, r2) = statial_norm_routes(x, family)?;
    Ok(r1.max(r2))
}

/// The two routes `sup_φ φ(x*x)^{1/2}` and `sup_φ φ(xx*)^{1/2}` separately;
/// under `full_closure` they coincide by construction (one set of singular
/// values feeds both).
pub fn statial_norm_routes(x: &AlgebraElement, family: &StatialFamily) -> Result<(f64, f64)> {
    if x.algebra() != family.algebra() {
        return Err(CorrError::Structural("element over a different algebra".into()));
    }
    let mut via_star_x: f64 = 0.0;
    let mut via_x_star: f64 = 0.0;
    if family.full_closure() {
        for rho in family.densities() {
            let v = orbit_sup_squares(rho, x)?;
            via_star_x = via_star_x.max(v);
            via_x_star = via_x_star.max(v);
        }
    } else {
        let xsx = x.adjoint().mul(x);
        let xxs = x.mul(&x.adjoint());
        for rho in family.densities() {
            via_star_x = via_star_x.max(StatialFamily::evaluate(rho, &xsx));
            via_x_star = via_x_star.max(StatialFamily::evaluate(rho, &xxs));
        }
    }
    Ok((via_star_x.max(0.0).sqrt(), via_x_star.max(0.0).sqrt()))
}

/// Faithfulness verdict with a witness when the seminorm degenerates.
#[derive(Clone, Debug)]
pub struct FaithfulnessReport {
    pub faithful: bool,
    /// Min eigenvalue of the summed Gram form (closure off).
    pub min_form_eigenvalue: Option<f64>,
    /// A nonzero element of vanishing seminorm, when one exists.
    pub witness: Option<AlgebraElement>,
}

/// `(A, Φ)` is faithful iff `‖·‖_{2,Φ}` separates points.  With the closure
/// off this is positive definiteness of the form `Σ_φ (φ(x*x) + φ(xx*))`;
/// with the closure on it reduces to every block carrying mass under some
/// listed state.
pub fn faithful_check(family: &StatialFamily) -> Result<FaithfulnessReport> {
    let alg = family.algebra();
    if family.full_closure() {
        for (k, &n) in alg.blocks().iter().enumerate() {
            let mass = family
                .densities()
                .iter()
                .map(|rho| rho.block(k).trace().re)
                .fold(0.0f64, f64::max);
            if mass <= 1e-12 {
                let mut blocks: Vec<CMat> =
                    alg.blocks().iter().map(|&m| CMat::zeros(m, m)).collect();
                blocks[k] = CMat::identity(n, n);
                let witness = AlgebraElement::from_blocks(alg, blocks)?;
                return Ok(FaithfulnessReport {
                    faithful: false,
                    min_form_eigenvalue: None,
                    witness: Some(witness),
                });
            }
        }
        return Ok(FaithfulnessReport { faithful: true, min_form_eigenvalue: None, witness: None });
    }
    let d = alg.dim();
    let units = alg.units();
    let mut gram = CMat::zeros(d, d);
    for rho in family.densities() {
        for p in 0..d {
            for q in 0..d {
                // x^H G x = Σ_φ φ(x*x) + φ(xx*) on coordinates
                let left = StatialFamily::evaluate_complex(rho, &units[p].adjoint().mul(&units[q]));
                let right = StatialFamily::evaluate_complex(rho, &units[q].mul(&units[p].adjoint()));
                gram[(p, q)] += left + right;
            }
        }
    }
    let eig = linalg::hermitian_eig(&gram);
    let min = eig.min_value();
    if min > 1e-12 {
        return Ok(FaithfulnessReport {
            faithful: true,
            min_form_eigenvalue: Some(min),
            witness: None,
        });
    }
    let witness = AlgebraElement::from_coords(alg, &eig.vectors.column(0).into_owned())?;
    Ok(FaithfulnessReport {
        faithful: false,
        min_form_eigenvalue: Some(min),
        witness: Some(witness),
    })
}

/// Deviation of the listed family from unitary-conjugation invariance,
/// measured over Haar samples by the dual-pairing (trace-norm) distance to
/// the closest listed state.
pub fn full_check(family: &StatialFamily, samples: usize, seed: u64) -> Result<f64> {
    if family.full_closure() {
        return Err(CorrError::Domain(
            "full_check applies to listed families (full_closure off)".into(),
        ));
    }
    let alg = family.algebra().clone();
    let mut rng = crate::random::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = crate::random::unitary(&alg, &mut rng);
        for rho in family.densities() {
            let conj = u.adjoint().mul(rho).mul(&u);
            let dev = family
                .densities()
                .iter()
                .map(|sigma| trace_norm(&conj.sub(sigma)))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

/// `Σ_k tr |x_k|` — the dual norm of the operator norm on self-adjoints.
fn trace_norm(x: &AlgebraElement) -> f64 {
    match x.eigen() {
        Ok(w) => w.all_eigenvalues().iter().map(|t| t.abs()).sum(),
        Err(_) => {
            // non-self-adjoint deviation: fall back to singular values
            x.blocks()
                .iter()
                .map(|b| b.clone().singular_values().iter().sum::<f64>())
                .sum()
        }
    }
}

/// A certified interval for the best two-sided multiplier constant.
#[derive(Clone, Copy, Debug)]
pub struct MultiplierInterval {
    /// Largest squared ratio reached by the probe set.
    pub lo: f64,
    /// Certified upper bound.
    pub hi: f64,
}

impl MultiplierInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Options for the multiplier probes.
#[derive(Clone, Copy, Debug)]
pub struct MultiplierOptions {
    pub probes: usize,
    pub seed: u64,
}

impl Default for MultiplierOptions {
    fn default() -> Self {
        Self { probes: 64, seed: 0 }
    }
}

/// Certified interval `[lo, hi]` with
/// `lo ≤ K_true = sup_ξ (max{‖aξ‖, ‖ξa‖}/‖ξ‖)² ≤ hi` for the action of `a`
/// as a two-sided multiplier on `(A, ‖·‖_{2,Φ})`.
///
/// `lo` maximizes the ratio over seeded random and extreme-point probes.
/// With the closure on, `hi = ‖a‖²` and the supremum attains it; with the
/// closure off, `hi` is the best generalized-eigenvalue relaxation obtained
/// by lowering the denominator to one state's quadratic form.
pub fn multiplier_bound(
    a: &AlgebraElement,
    family: &StatialFamily,
    opts: &MultiplierOptions,
) -> Result<MultiplierInterval> {
    if a.algebra() != family.algebra() {
        return Err(CorrError::Structural("element over a different algebra".into()));
    }
    let verdict = faithful_check(family)?;
    if !verdict.faithful {
        return Err(CorrError::Precondition("multiplier bounds need a faithful family".into()));
    }
    let alg = family.algebra().clone();

    // ---- probe lower bound ----
    let mut probes: Vec<AlgebraElement> = Vec::new();
    probes.push(AlgebraElement::identity(&alg));
    probes.push(a.clone());
    probes.extend(alg.units());
    // extreme-point probes: top-eigenvector outer products of a*a and aa*
    for sq in [a.adjoint().mul(a), a.mul(&a.adjoint())] {
        if let Ok(w) = sq.eigen() {
            for k in 0..alg.num_blocks() {
                let vals = w.eigenvalues(k);
                if vals.is_empty() {
                    continue;
                }
                let top = vals.len() - 1;
                let v = w.apply(|t| if (t - vals[top]).abs() < 1e-12 { 1.0 } else { 0.0 });
                // the spectral projection of the top eigenvalue works as a
                // probe concentrated on the maximizing direction
                let mut blocks: Vec<CMat> =
                    alg.blocks().iter().map(|&m| CMat::zeros(m, m)).collect();
                blocks[k] = v.block(k).clone();
                probes.push(AlgebraElement::from_blocks(&alg, blocks)?);
            }
        }
    }
    let mut rng = crate::random::rng(opts.seed);
    for _ in 0..opts.probes {
        probes.push(crate::random::element(&alg, &mut rng));
    }
    let mut lo: f64 = 0.0;
    for xi in &probes {
        let den = statial_norm(xi, family)?;
        if den < 1e-12 {
            continue;
        }
        let num = statial_norm(&a.mul(xi), family)?.max(statial_norm(&xi.mul(a), family)?);
        lo = lo.max((num / den).powi(2));
    }

    // ---- certified upper bound ----
    let hi = if family.full_closure() {
        a.op_norm().powi(2)
    } else {
        multiplier_upper_bound(a, family)?
    };
    Ok(MultiplierInterval { lo, hi })
}

/// Route-matched generalized-eigenvalue relaxation.
///
/// For each state φ and each of the four word forms, the numerator
/// `φ(w(ξ)* w(ξ))` is paired with the denominator of the same ξ-side route
/// (`φ(ξ*ξ)` for `aξ` and `a*ξ*ξa`-type words, `φ(ξξ*)` for the starred
/// routes); dropping the statial max in the denominator down to the
/// matching term of the same state only enlarges the ratio, so the max over
/// all pairs bounds the true multiplier constant and is exact for scalars
/// and in the Hilbert (single tracial state) case.  When some state's
/// matching form is singular the pair degenerates and the averaged-form
/// fallback is used instead.
fn multiplier_upper_bound(a: &AlgebraElement, family: &StatialFamily) -> Result<f64> {
    let alg = family.algebra();
    let d = alg.dim();
    let units = alg.units();
    // Sesquilinear form on entry coordinates ξ with value Σ conj(ξ_p) ξ_q ·
    // φ(expr(e_p, e_q)); the six instantiations below realize the four word
    // squarings and the two denominators, all quadratic in ξ itself.
    let form =
        |rho: &AlgebraElement,
         expr: &dyn Fn(&AlgebraElement, &AlgebraElement) -> AlgebraElement|
         -> CMat {
            let mut f = CMat::zeros(d, d);
            for p in 0..d {
                for q in 0..d {
                    f[(p, q)] = StatialFamily::evaluate_complex(rho, &expr(&units[p], &units[q]));
                }
            }
            linalg::hermitian_part(&f)
        };
    let a_star_a = a.adjoint().mul(a);
    let a_a_star = a.mul(&a.adjoint());
    // φ(ξ*(a*a)ξ)
    let n_left_star = |p: &AlgebraElement, q: &AlgebraElement| p.adjoint().mul(&a_star_a).mul(q);
    // φ(a ξξ* a*)
    let n_left_plain = |p: &AlgebraElement, q: &AlgebraElement| {
        a.mul(q).mul(&p.adjoint()).mul(&a.adjoint())
    };
    // φ(a* ξ*ξ a)
    let n_right_star =
        |p: &AlgebraElement, q: &AlgebraElement| a.adjoint().mul(&p.adjoint()).mul(q).mul(a);
    // φ(ξ (aa*) ξ*)
    let n_right_plain = |p: &AlgebraElement, q: &AlgebraElement| q.mul(&a_a_star).mul(&p.adjoint());
    // φ(ξ*ξ) and φ(ξξ*)
    let d_star = |p: &AlgebraElement, q: &AlgebraElement| p.adjoint().mul(q);
    let d_plain = |p: &AlgebraElement, q: &AlgebraElement| q.mul(&p.adjoint());

    let mut matched: f64 = 0.0;
    let mut all_matched_finite = true;
    'states: for rho in family.densities() {
        let den_star = form(rho, &d_star);
        let den_plain = form(rho, &d_plain);
        let pairs: [(CMat, &CMat); 4] = [
            (form(rho, &n_left_star), &den_star),
            (form(rho, &n_left_plain), &den_plain),
            (form(rho, &n_right_star), &den_star),
            (form(rho, &n_right_plain), &den_plain),
        ];
        for (num, den) in pairs {
            if linalg::hermitian_eig(den).min_value() <= 1e-12 {
                all_matched_finite = false;
                break 'states;
            }
            matched = matched.max(linalg::max_generalized_eigenvalue(&num, den));
        }
    }
    if all_matched_finite {
        return Ok(matched);
    }

    // Fallback for families with individually singular states:
    // ‖ξ‖²_Φ ≥ D̄(ξ) := (1/2|Φ|) Σ_φ (φ(ξ*ξ) + φ(ξξ*)), positive definite
    // exactly when the family is faithful.
    let count = family.densities().len() as f64;
    let mut dbar = CMat::zeros(d, d);
    let mut numerators: Vec<CMat> = Vec::new();
    for rho in family.densities() {
        dbar += form(rho, &d_star) + form(rho, &d_plain);
        numerators.push(form(rho, &n_left_star));
        numerators.push(form(rho, &n_left_plain));
        numerators.push(form(rho, &n_right_star));
        numerators.push(form(rho, &n_right_plain));
    }
    dbar /= cr(2.0 * count);
    let mut worst: f64 = 0.0;
    for num in &numerators {
        worst = worst.max(linalg::max_generalized_eigenvalue(num, &dbar));
    }
    Ok(worst)
}

/// Per-index multiplier intervals of a sequence with the tail fraction of
/// indices certified below `k`.
#[derive(Clone, Debug)]
pub struct SequenceTailReport {
    pub intervals: Vec<MultiplierInterval>,
    /// Fraction of the last half of the sequence with `hi ≤ k`.
    pub tail_fraction: f64,
    /// Tail supremum of the certified upper bounds.
    pub tail_sup_hi: f64,
}

/// Uniform-boundedness surrogate for sequences of statial pairs.
pub fn statial_sequence_tail(
    seq: &[(AlgebraElement, StatialFamily)],
    k: f64,
    opts: &MultiplierOptions,
) -> Result<SequenceTailReport> {
    if seq.is_empty() {
        return Err(CorrError::Precondition("empty sequence".into()));
    }
    let mut intervals = Vec::with_capacity(seq.len());
    for (x, family) in seq {
        intervals.push(multiplier_bound(x, family, opts)?);
    }
    let start = intervals.len() / 2;
    let tail = &intervals[start..];
    let below = tail.iter().filter(|iv| iv.hi <= k + 1e-12).count();
    let his: Vec<f64> = intervals.iter().map(|iv| iv.hi).collect();
    Ok(SequenceTailReport {
        tail_fraction: below as f64 / tail.len() as f64,
        tail_sup_hi: tail_supremum(&his),
        intervals,
    })
}
