//! Serde descriptors for every object the tooling reads or writes.
//!
//! Complex numbers serialize as two-element arrays `[re, im]`, matrices as
//! row-major nested arrays, algebra elements as one matrix per block.
//! Correspondences come either explicit (`dim` plus one representation
//! matrix per matrix unit) or through the builders `"trivial"`, `"coarse"`
//! and `"direct_sum"`.

use serde::{Deserialize, Serialize};

use crate::bimodule::Correspondence;
use crate::boundcalc::BoundCertificate;
use crate::cpdict::CPMap;
use crate::error::{CorrError, Result};
use crate::linalg::{c, CMat, CVec};
use crate::matalg::{AlgebraElement, TracialAlgebra};
use crate::sigmafin::{FaithfulState, SigmaSequence};
use crate::statial::StatialFamily;

pub type ComplexData = [f64; 2];
pub type MatrixData = Vec<Vec<ComplexData>>;

pub fn matrix_to_data(m: &CMat) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_data(data: &MatrixData) -> Result<CMat> {
    let rows = data.len();
    let cols = data.first().map_or(0, Vec::len);
    if data.iter().any(|r| r.len() != cols) {
        return Err(CorrError::Structural("ragged matrix data".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| c(data[i][j][0], data[i][j][1])))
}

pub fn vector_to_data(v: &CVec) -> Vec<ComplexData> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_data(data: &[ComplexData]) -> CVec {
    CVec::from_iterator(data.len(), data.iter().map(|z| c(z[0], z[1])))
}

/// `{ "blocks": [...], "weights": [...] }`; omitted weights mean Markov.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl AlgebraDescriptor {
    pub fn to_algebra(&self) -> Result<TracialAlgebra> {
        match &self.weights {
            Some(w) => TracialAlgebra::new(self.blocks.clone(), w.clone()),
            None => TracialAlgebra::markov(self.blocks.clone()),
        }
    }

    pub fn from_algebra(alg: &TracialAlgebra) -> Self {
        Self { blocks: alg.blocks().to_vec(), weights: Some(alg.weights().to_vec()) }
    }
}

/// An element as one matrix per block, without an algebra echo.
pub type ElementBlocks = Vec<MatrixData>;

pub fn element_to_blocks(x: &AlgebraElement) -> ElementBlocks {
    x.blocks().iter().map(matrix_to_data).collect()
}

pub fn element_from_blocks(alg: &TracialAlgebra, data: &ElementBlocks) -> Result<AlgebraElement> {
    let blocks = data.iter().map(matrix_from_data).collect::<Result<Vec<_>>>()?;
    AlgebraElement::from_blocks(alg, blocks)
}

/// A standalone element file: `{ "algebra": ..., "blocks": [...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementDescriptor {
    pub algebra: AlgebraDescriptor,
    pub blocks: ElementBlocks,
}

impl ElementDescriptor {
    pub fn to_element(&self) -> Result<AlgebraElement> {
        element_from_blocks(&self.algebra.to_algebra()?, &self.blocks)
    }

    pub fn from_element(x: &AlgebraElement) -> Self {
        Self {
            algebra: AlgebraDescriptor::from_algebra(x.algebra()),
            blocks: element_to_blocks(x),
        }
    }
}

/// `{ "coords": [[re,im],...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorDescriptor {
    pub coords: Vec<ComplexData>,
}

impl VectorDescriptor {
    pub fn to_vector(&self) -> CVec {
        vector_from_data(&self.coords)
    }

    pub fn from_vector(v: &CVec) -> Self {
        Self { coords: vector_to_data(v) }
    }
}

/// Explicit data or a builder shortcut.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorrespondenceDescriptor {
    Builder(BuilderDescriptor),
    Explicit {
        left_algebra: AlgebraDescriptor,
        right_algebra: AlgebraDescriptor,
        dim: usize,
        left_rep: Vec<MatrixData>,
        right_rep: Vec<MatrixData>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum BuilderDescriptor {
    Trivial {
        algebra: AlgebraDescriptor,
    },
    Coarse {
        left_algebra: AlgebraDescriptor,
        right_algebra: AlgebraDescriptor,
    },
    DirectSum {
        parts: Vec<CorrespondenceDescriptor>,
        multiplicities: Vec<usize>,
    },
}

impl CorrespondenceDescriptor {
    pub fn to_correspondence(&self) -> Result<Correspondence> {
        match self {
            Self::Builder(BuilderDescriptor::Trivial { algebra }) => {
                Ok(Correspondence::trivial(&algebra.to_algebra()?))
            }
            Self::Builder(BuilderDescriptor::Coarse { left_algebra, right_algebra }) => Ok(
                Correspondence::coarse(&left_algebra.to_algebra()?, &right_algebra.to_algebra()?),
            ),
            Self::Builder(BuilderDescriptor::DirectSum { parts, multiplicities }) => {
                let built: Vec<Correspondence> =
                    parts.iter().map(Self::to_correspondence).collect::<Result<_>>()?;
                Ok(Correspondence::direct_sum(&built, multiplicities)?.corr)
            }
            Self::Explicit { left_algebra, right_algebra, dim, left_rep, right_rep } => {
                let left = left_algebra.to_algebra()?;
                let right = right_algebra.to_algebra()?;
                let lm = left_rep.iter().map(matrix_from_data).collect::<Result<Vec<_>>>()?;
                let rm = right_rep.iter().map(matrix_from_data).collect::<Result<Vec<_>>>()?;
                Correspondence::new(left, right, *dim, lm, rm)
            }
        }
    }

    pub fn from_correspondence(corr: &Correspondence) -> Self {
        Self::Explicit {
            left_algebra: AlgebraDescriptor::from_algebra(corr.left_algebra()),
            right_algebra: AlgebraDescriptor::from_algebra(corr.right_algebra()),
            dim: corr.dim(),
            left_rep: (0..corr.left_algebra().dim())
                .map(|a| matrix_to_data(corr.left_unit_matrix(a)))
                .collect(),
            right_rep: (0..corr.right_algebra().dim())
                .map(|a| matrix_to_data(corr.right_unit_matrix(a)))
                .collect(),
        }
    }
}

/// `{ "source": ..., "target": ..., "action": matrix }` on vectorized
/// matrix-unit coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CpMapDescriptor {
    pub source: AlgebraDescriptor,
    pub target: AlgebraDescriptor,
    pub action: MatrixData,
}

impl CpMapDescriptor {
    pub fn to_cp_map(&self) -> Result<CPMap> {
        CPMap::new(
            self.source.to_algebra()?,
            self.target.to_algebra()?,
            matrix_from_data(&self.action)?,
        )
    }

    pub fn from_cp_map(phi: &CPMap) -> Self {
        Self {
            source: AlgebraDescriptor::from_algebra(phi.source()),
            target: AlgebraDescriptor::from_algebra(phi.target()),
            action: matrix_to_data(phi.action()),
        }
    }
}

/// `{ "algebra": ..., "density": [matrix per block] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateDescriptor {
    pub algebra: AlgebraDescriptor,
    pub density: ElementBlocks,
}

impl StateDescriptor {
    pub fn to_state(&self) -> Result<FaithfulState> {
        FaithfulState::new(element_from_blocks(&self.algebra.to_algebra()?, &self.density)?)
    }

    pub fn from_state(state: &FaithfulState) -> Self {
        Self {
            algebra: AlgebraDescriptor::from_algebra(state.algebra()),
            density: element_to_blocks(state.density()),
        }
    }
}

/// `{ "algebra": ..., "densities": [...], "full_closure": bool }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub algebra: AlgebraDescriptor,
    pub densities: Vec<ElementBlocks>,
    #[serde(default)]
    pub full_closure: bool,
}

impl FamilyDescriptor {
    pub fn to_family(&self) -> Result<StatialFamily> {
        let alg = self.algebra.to_algebra()?;
        let densities = self
            .densities
            .iter()
            .map(|d| element_from_blocks(&alg, d))
            .collect::<Result<Vec<_>>>()?;
        StatialFamily::new(alg, densities, self.full_closure)
    }

    pub fn from_family(family: &StatialFamily) -> Self {
        Self {
            algebra: AlgebraDescriptor::from_algebra(family.algebra()),
            densities: family.densities().iter().map(element_to_blocks).collect(),
            full_closure: family.full_closure(),
        }
    }
}

/// A vector sequence over one correspondence with an optional limit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceDescriptor {
    pub correspondence: CorrespondenceDescriptor,
    pub terms: Vec<Vec<ComplexData>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<Vec<ComplexData>>,
}

impl SequenceDescriptor {
    pub fn to_parts(&self) -> Result<(Correspondence, crate::boundcalc::VectorSequence)> {
        let corr = self.correspondence.to_correspondence()?;
        let terms: Vec<CVec> = self.terms.iter().map(|t| vector_from_data(t)).collect();
        let limit = self.limit.as_ref().map(|l| vector_from_data(l));
        Ok((corr, crate::boundcalc::VectorSequence::new(terms, limit)))
    }
}

/// A sequence of algebra elements, one full element per term.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementSequenceDescriptor {
    pub algebra: AlgebraDescriptor,
    pub terms: Vec<ElementBlocks>,
}

impl ElementSequenceDescriptor {
    pub fn to_elements(&self) -> Result<Vec<AlgebraElement>> {
        let alg = self.algebra.to_algebra()?;
        self.terms.iter().map(|t| element_from_blocks(&alg, t)).collect()
    }
}

/// One `(element, density)` pair of a σ-finite sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaTermDescriptor {
    pub element: ElementBlocks,
    pub density: ElementBlocks,
}

/// A sequence of pairs `(x_i, φ_i)` with optional declared limits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaSequenceDescriptor {
    pub algebra: AlgebraDescriptor,
    pub terms: Vec<SigmaTermDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_element: Option<ElementBlocks>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_density: Option<ElementBlocks>,
}

impl SigmaSequenceDescriptor {
    pub fn to_sequence(&self) -> Result<SigmaSequence> {
        let alg = self.algebra.to_algebra()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let x = element_from_blocks(&alg, &t.element)?;
            let rho = FaithfulState::new(element_from_blocks(&alg, &t.density)?)?;
            terms.push((x, rho));
        }
        let limit = match (&self.limit_element, &self.limit_density) {
            (Some(x), Some(d)) => Some((
                element_from_blocks(&alg, x)?,
                FaithfulState::new(element_from_blocks(&alg, d)?)?,
            )),
            (None, None) => None,
            _ => {
                return Err(CorrError::Structural(
                    "limit needs both an element and a density".into(),
                ))
            }
        };
        Ok(SigmaSequence { terms, limit })
    }
}

/// One `(element, family)` pair of a statial sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatialTermDescriptor {
    pub element: ElementBlocks,
    pub densities: Vec<ElementBlocks>,
    #[serde(default)]
    pub full_closure: bool,
}

/// A sequence of statial pairs over one algebra.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatialSequenceDescriptor {
    pub algebra: AlgebraDescriptor,
    pub terms: Vec<StatialTermDescriptor>,
}

impl StatialSequenceDescriptor {
    pub fn to_sequence(&self) -> Result<Vec<(AlgebraElement, StatialFamily)>> {
        let alg = self.algebra.to_algebra()?;
        self.terms
            .iter()
            .map(|t| {
                let x = element_from_blocks(&alg, &t.element)?;
                let densities = t
                    .densities
                    .iter()
                    .map(|d| element_from_blocks(&alg, d))
                    .collect::<Result<Vec<_>>>()?;
                Ok((x, StatialFamily::new(alg.clone(), densities, t.full_closure)?))
            })
            .collect()
    }
}

/// Certificates serialize with the field names of the wire format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateRecord {
    #[serde(rename = "K_left")]
    pub k_left: f64,
    #[serde(rename = "K_right")]
    pub k_right: f64,
    pub b_left: ElementBlocks,
    pub d_right: ElementBlocks,
}

impl CertificateRecord {
    pub fn from_certificate(cert: &BoundCertificate) -> Self {
        Self {
            k_left: cert.k_left,
            k_right: cert.k_right,
            b_left: element_to_blocks(&cert.b_left),
            d_right: element_to_blocks(&cert.d_right),
        }
    }
}

/// A Fell query file: sets of elements, vectors and the neighborhood data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FellQueryDescriptor {
    #[serde(default)]
    pub e: Option<Vec<ElementBlocks>>,
    #[serde(default)]
    pub f: Option<Vec<ElementBlocks>>,
    pub s: Vec<Vec<ComplexData>>,
    pub eps: f64,
    #[serde(default = "default_multiplicity")]
    pub multiplicity: usize,
}

fn default_multiplicity() -> usize {
    1
}

impl FellQueryDescriptor {
    /// Elements default to the full matrix-unit sets of the given algebras.
    pub fn to_query(
        &self,
        left: &TracialAlgebra,
        right: &TracialAlgebra,
    ) -> Result<crate::analysis::FellQuery> {
        let e = match &self.e {
            Some(els) => els
                .iter()
                .map(|b| element_from_blocks(left, b))
                .collect::<Result<Vec<_>>>()?,
            None => left.units(),
        };
        let f = match &self.f {
            Some(els) => els
                .iter()
                .map(|b| element_from_blocks(right, b))
                .collect::<Result<Vec<_>>>()?,
            None => right.units(),
        };
        Ok(crate::analysis::FellQuery {
            e,
            f,
            s: self.s.iter().map(|v| vector_from_data(v)).collect(),
            eps: self.eps,
            multiplicity: self.multiplicity,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn algebra_round_trip() {
        let alg = TracialAlgebra::markov(vec![2, 3]).unwrap();
        let de = AlgebraDescriptor::from_algebra(&alg);
        let json = serde_json::to_string(&de).unwrap();
        let back: AlgebraDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_algebra().unwrap(), alg);
        // omitted weights default to Markov
        let short: AlgebraDescriptor = serde_json::from_str(r#"{"blocks":[2,3]}"#).unwrap();
        assert_eq!(short.to_algebra().unwrap(), alg);
    }

    #[test]
    fn element_round_trip() {
        let alg = TracialAlgebra::markov(vec![2, 1]).unwrap();
        let mut rng = random::rng(3);
        let x = random::element(&alg, &mut rng);
        let de = ElementDescriptor::from_element(&x);
        let json = serde_json::to_string(&de).unwrap();
        let back: ElementDescriptor = serde_json::from_str(&json).unwrap();
        assert!(back.to_element().unwrap().sub(&x).op_norm() < 1e-15);
    }

    #[test]
    fn builder_descriptors_parse() {
        let trivial: CorrespondenceDescriptor =
            serde_json::from_str(r#"{"builder":"trivial","algebra":{"blocks":[2]}}"#).unwrap();
        assert_eq!(trivial.to_correspondence().unwrap().dim(), 4);

        let coarse: CorrespondenceDescriptor = serde_json::from_str(
            r#"{"builder":"coarse","left_algebra":{"blocks":[2]},"right_algebra":{"blocks":[2]}}"#,
        )
        .unwrap();
        assert_eq!(coarse.to_correspondence().unwrap().dim(), 16);

        let sum: CorrespondenceDescriptor = serde_json::from_str(
            r#"{"builder":"direct_sum","parts":[{"builder":"trivial","algebra":{"blocks":[2]}}],"multiplicities":[4]}"#,
        )
        .unwrap();
        assert_eq!(sum.to_correspondence().unwrap().dim(), 16);
    }

    #[test]
    fn explicit_correspondence_round_trip() {
        let alg = TracialAlgebra::factor(2);
        let corr = Correspondence::coarse(&alg, &alg);
        let de = CorrespondenceDescriptor::from_correspondence(&corr);
        let json = serde_json::to_string(&de).unwrap();
        let back: CorrespondenceDescriptor = serde_json::from_str(&json).unwrap();
        let rebuilt = back.to_correspondence().unwrap();
        assert_eq!(rebuilt, corr);
    }

    #[test]
    fn sigma_limit_needs_both_parts() {
        let json = r#"{
            "algebra": {"blocks": [2]},
            "terms": [],
            "limit_element": [[[ [1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]]
        }"#;
        // a limit element without a density is rejected at conversion
        let de: SigmaSequenceDescriptor = serde_json::from_str(json).unwrap();
        assert!(de.to_sequence().is_err());
    }
}
