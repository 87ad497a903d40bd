//! Seeded generators for algebra elements, states, vectors and
//! correspondences.  Every routine takes the RNG explicitly so that all
//! randomized checks in the crate are reproducible.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bimodule::Correspondence;
use crate::boundcalc;
use crate::cpdict;
use crate::linalg::{c, cr, CMat, CVec};
use crate::matalg::{AlgebraElement, TracialAlgebra};
use crate::sigmafin::FaithfulState;

/// The crate-wide deterministic RNG.
pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    c(gaussian(rng), gaussian(rng)) * cr(std::f64::consts::FRAC_1_SQRT_2)
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre(n: usize, m: usize, rng: &mut impl Rng) -> CMat {
    DMatrix::from_fn(n, m, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary via the QR decomposition of a Ginibre matrix,
/// with the phases of the R diagonal fixed.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let g = ginibre(n, n, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / cr(d.norm()) } else { cr(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn vector(dim: usize, rng: &mut impl Rng) -> CVec {
    CVec::from_fn(dim, |_, _| complex_gaussian(rng))
}

pub fn unit_vector(dim: usize, rng: &mut impl Rng) -> CVec {
    let v = vector(dim, rng);
    let n = v.norm();
    if n > 0.0 {
        v / cr(n)
    } else {
        CVec::from_fn(dim, |i, _| if i == 0 { cr(1.0) } else { cr(0.0) })
    }
}

pub fn element(alg: &TracialAlgebra, rng: &mut impl Rng) -> AlgebraElement {
    let blocks = alg.blocks().iter().map(|&n| ginibre(n, n, rng)).collect();
    AlgebraElement::from_blocks(alg, blocks).expect("matching shapes")
}

pub fn self_adjoint(alg: &TracialAlgebra, rng: &mut impl Rng) -> AlgebraElement {
    let x = element(alg, rng);
    x.add(&x.adjoint()).scale(cr(0.5))
}

pub fn positive(alg: &TracialAlgebra, rng: &mut impl Rng) -> AlgebraElement {
    let x = element(alg, rng);
    x.adjoint().mul(&x)
}

/// Blockwise Haar unitary element.
pub fn unitary(alg: &TracialAlgebra, rng: &mut impl Rng) -> AlgebraElement {
    let blocks = alg.blocks().iter().map(|&n| haar_unitary(n, rng)).collect();
    AlgebraElement::from_blocks(alg, blocks).expect("matching shapes")
}

/// A faithful state with eigenvalues bounded away from zero by
/// `min_weight` relative to the largest.
pub fn faithful_state(alg: &TracialAlgebra, min_weight: f64, rng: &mut impl Rng) -> FaithfulState {
    let x = positive(alg, rng);
    let shift = AlgebraElement::identity(alg).scale(cr(min_weight * x.op_norm().max(1.0)));
    let rho = x.add(&shift);
    let total: f64 = rho.blocks().iter().map(|b| b.trace().re).sum();
    FaithfulState::new(rho.scale(cr(1.0 / total))).expect("full support by construction")
}

/// Options for [`correspondence`].
#[derive(Clone, Copy, Debug)]
pub struct CorrOptions {
    /// Hard cap on the Hilbert dimension of the result.
    pub max_dim: usize,
    /// Max number of cyclic pieces summed before conjugation.
    pub max_pieces: usize,
}

impl Default for CorrOptions {
    fn default() -> Self {
        Self { max_dim: 32, max_pieces: 2 }
    }
}

/// A generic-looking M-N correspondence: a direct sum of cyclic pieces
/// `H_{φ_ξ}` generated from random subtracial vectors of the coarse
/// correspondence, conjugated by a Haar unitary.
pub fn correspondence(
    left: &TracialAlgebra,
    right: &TracialAlgebra,
    opts: CorrOptions,
    rng: &mut impl Rng,
) -> Correspondence {
    let coarse = Correspondence::coarse(left, right);
    let mut pieces: Vec<Correspondence> = Vec::new();
    let mut total = 0usize;
    let n_pieces = 1 + rng.random_range(0..opts.max_pieces);
    for _ in 0..n_pieces {
        let xi = vector(coarse.dim(), rng);
        let xi0 = boundcalc::renormalize_subtracial(&coarse, &xi)
            .expect("coarse vector has a certificate")
            .vector;
        if xi0.norm() < 1e-12 {
            continue;
        }
        let phi = cpdict::vector_to_cp(&coarse, &xi0).expect("coarse vectors are bounded");
        let (piece, _) = cpdict::cp_to_correspondence(&phi).expect("gram form is psd");
        if piece.dim() == 0 || total + piece.dim() > opts.max_dim {
            continue;
        }
        total += piece.dim();
        pieces.push(piece);
    }
    if pieces.is_empty() {
        pieces.push(coarse);
    }
    let mults = vec![1usize; pieces.len()];
    let sum = Correspondence::direct_sum(&pieces, &mults).expect("common algebras");
    let u = haar_unitary(sum.corr.dim(), rng);
    sum.corr.conjugate(&u)
}
