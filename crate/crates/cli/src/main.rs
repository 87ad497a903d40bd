//! corrkit: command-line front end over the correspondence calculus.
//!
//! Every command reads JSON descriptors, runs one operation, and emits a
//! JSON report with an input echo, results, and a list of named checks,
//! each carrying the tolerance it was tested at.  Exit codes: 0 when all
//! checks pass, 1 when a check fails, 2 on input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use corrkit_core::analysis;
use corrkit_core::bimodule::Correspondence;
use corrkit_core::boundcalc;
use corrkit_core::cpdict;
use corrkit_core::descriptor::*;
use corrkit_core::linalg::CVec;
use corrkit_core::sigmafin;
use corrkit_core::statial;

#[derive(Parser)]
#[command(name = "corrkit", version, about = "numerical calculus of correspondences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit wall-clock timing so identical runs emit byte-identical reports.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Tracial algebra utilities.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Correspondence construction and validation.
    #[command(subcommand)]
    Corr(CorrCmd),
    /// Bound certificates, cutoffs and renormalization.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// The c.p.-map dictionary and cyclic decomposition.
    #[command(subcommand)]
    Cp(CpCmd),
    /// Fell neighborhoods and weak containment.
    #[command(subcommand)]
    Fell(FellCmd),
    /// Central vectors and averaging.
    #[command(subcommand)]
    Central(CentralCmd),
    /// Faithful states: GNS, bounds, sharp norm, modular flow.
    #[command(subcommand)]
    Sigma(SigmaCmd),
    /// Statial families and the two-sided L² seminorm.
    #[command(subcommand)]
    Statial(StatialCmd),
    /// Sequence diagnostics (uniformization and tail profiles).
    #[command(subcommand)]
    Seq(SeqCmd),
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Check normalization and faithfulness data of an algebra descriptor.
    Validate {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Evaluate the trace of an element.
    Trace {
        #[arg(long)]
        element: PathBuf,
    },
}

#[derive(Subcommand)]
enum CorrCmd {
    /// Expand a builder descriptor into explicit representation matrices.
    Build {
        #[arg(long)]
        descriptor: PathBuf,
    },
    /// Residuals of the correspondence axiom families.
    Validate {
        #[arg(long)]
        corr: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Args)]
struct CorrVectorArgs {
    #[arg(long)]
    corr: PathBuf,
    #[arg(long)]
    vector: PathBuf,
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Radon–Nikodym certificate of a vector.
    Certify {
        #[command(flatten)]
        cv: CorrVectorArgs,
    },
    /// Spectral cutoff of the left (or right) bound at a level.
    Cutoff {
        #[command(flatten)]
        cv: CorrVectorArgs,
        #[arg(long)]
        radius: f64,
        /// Cut the right bound instead of the left.
        #[arg(long)]
        right: bool,
    },
    /// Renormalize toward a target bound (default: subtracial).
    Renormalize {
        #[command(flatten)]
        cv: CorrVectorArgs,
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
    },
    /// Certified membership in the sort of K-bounded vectors.
    Membership {
        #[command(flatten)]
        cv: CorrVectorArgs,
        #[arg(long)]
        k: f64,
    },
}

#[derive(Subcommand)]
enum CpCmd {
    /// GNS correspondence of a completely positive map.
    ToCorr {
        #[arg(long)]
        map: PathBuf,
    },
    /// The c.p. map attached to a vector of a correspondence.
    FromVector {
        #[command(flatten)]
        cv: CorrVectorArgs,
    },
    /// Decompose into cyclic summands.
    Decompose {
        #[arg(long)]
        corr: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum FellCmd {
    /// Best witnesses for the queries in a file.
    Residual {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Weak-containment sweep over the default query grid.
    Contain {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 1)]
        mult: usize,
        #[arg(long, alias = "eps", default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Positive control: trivial(alg) inside coarse(alg, alg).
    Semidiscrete {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 1)]
        mult: usize,
        #[arg(long, alias = "eps", default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CentralCmd {
    /// Max commutator norm over the matrix-unit generators.
    Defect {
        #[command(flatten)]
        cv: CorrVectorArgs,
    },
    /// Orthogonal projection onto the central subspace.
    Project {
        #[command(flatten)]
        cv: CorrVectorArgs,
    },
    /// Averaged central vector with its bound guarantees.
    Average {
        #[command(flatten)]
        cv: CorrVectorArgs,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for an almost central, almost tracial K-bounded unit vector.
    Search {
        #[arg(long)]
        corr: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct StateElementArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    element: PathBuf,
}

#[derive(Subcommand)]
enum SigmaCmd {
    /// GNS space of a faithful state.
    Gns {
        #[arg(long)]
        state: PathBuf,
    },
    /// φ-right bound, closed form against the maximization oracle.
    Bound {
        #[command(flatten)]
        se: StateElementArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// The sharp norm of an element.
    Sharp {
        #[command(flatten)]
        se: StateElementArgs,
    },
    /// Membership in the sort S_{K,N}.
    Member {
        #[command(flatten)]
        se: StateElementArgs,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        n: f64,
    },
    /// Modular flow σ_t of an element.
    Flow {
        #[command(flatten)]
        se: StateElementArgs,
        #[arg(long)]
        t: f64,
    },
    /// Strong-density projection p_K toward a target element.
    Dense {
        #[command(flatten)]
        se: StateElementArgs,
        #[arg(long)]
        k: f64,
    },
}

#[derive(Args)]
struct FamilyElementArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    element: PathBuf,
}

#[derive(Subcommand)]
enum StatialCmd {
    /// The statial seminorm of an element, through both routes.
    Norm {
        #[command(flatten)]
        fe: FamilyElementArgs,
    },
    /// Faithfulness verdict with a witness when degenerate.
    Faithful {
        #[arg(long)]
        family: PathBuf,
    },
    /// Deviation of a listed family from conjugation invariance.
    Full {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certified multiplier interval of an element.
    Multiplier {
        #[command(flatten)]
        fe: FamilyElementArgs,
        #[arg(long, default_value_t = 64)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SeqCmd {
    /// Uniformize a sequence toward its K-bounded declared limit.
    Uniformize {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// Tail profile of ‖χ_K(|x_i|)·|x_i|‖₂ for an element sequence.
    ConnesTail {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        k: f64,
    },
    /// Ideal and multiplier tail profiles for a σ-finite sequence.
    Ocneanu {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        cap: Option<f64>,
        /// Optional test sequence inside the ideal.
        #[arg(long)]
        tests: Option<PathBuf>,
    },
    /// Residual profile of the modular flow against the declared limit.
    ModularLimit {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Per-index multiplier intervals with the tail fraction below K.
    StatialTail {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 16)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A named numeric claim with the tolerance it was tested at.
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, pass: value <= tolerance }
    }

    fn holds(name: &'static str, pass: bool, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, pass }
    }
}

struct Report {
    command: String,
    inputs: Value,
    results: Value,
    checks: Vec<Check>,
}

enum CliError {
    /// Bad inputs: parse failures, missing files, contract violations.
    Input(String),
}

impl From<corrkit_core::CorrError> for CliError {
    fn from(e: corrkit_core::CorrError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed JSON in {}: {e}", path.display())))
}

fn load_corr(path: &Path) -> Result<Correspondence, CliError> {
    let de: CorrespondenceDescriptor = read_json(path)?;
    Ok(de.to_correspondence()?)
}

fn load_vector(path: &Path, corr: &Correspondence) -> Result<CVec, CliError> {
    let de: VectorDescriptor = read_json(path)?;
    let v = de.to_vector();
    if v.len() != corr.dim() {
        return Err(CliError::Input(format!(
            "vector of length {} does not match correspondence dim {}",
            v.len(),
            corr.dim()
        )));
    }
    Ok(v)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli.command) {
        Ok(report) => {
            let all_pass = report.checks.iter().all(|c| c.pass);
            let mut doc = json!({
                "schema_version": "1",
                "command": report.command,
                "inputs": report.inputs,
                "results": report.results,
                "checks": report
                    .checks
                    .iter()
                    .map(|c| {
                        json!({
                            "name": c.name,
                            "value": c.value,
                            "tolerance": c.tolerance,
                            "pass": c.pass,
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            if !cli.no_timestamp {
                doc["wall_clock_ms"] = json!(started.elapsed().as_millis() as u64);
            }
            let text = serde_json::to_string_pretty(&doc).expect("report serializes");
            let emitted = match &cli.out {
                Some(path) => std::fs::write(path, text + "\n")
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    println!("{text}");
                    Ok(())
                }
            };
            if let Err(msg) = emitted {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Algebra(cmd) => run_algebra(cmd),
        Command::Corr(cmd) => run_corr(cmd),
        Command::Bound(cmd) => run_bound(cmd),
        Command::Cp(cmd) => run_cp(cmd),
        Command::Fell(cmd) => run_fell(cmd),
        Command::Central(cmd) => run_central(cmd),
        Command::Sigma(cmd) => run_sigma(cmd),
        Command::Statial(cmd) => run_statial(cmd),
        Command::Seq(cmd) => run_seq(cmd),
    }
}

fn run_algebra(cmd: &AlgebraCmd) -> Result<Report, CliError> {
    match cmd {
        AlgebraCmd::Validate { algebra, tol } => {
            let de: AlgebraDescriptor = read_json(algebra)?;
            let alg = de.to_algebra()?;
            let normalization: f64 = alg
                .blocks()
                .iter()
                .zip(alg.weights())
                .map(|(&n, &w)| w * n as f64)
                .sum::<f64>()
                - 1.0;
            let min_weight = alg.weights().iter().copied().fold(f64::INFINITY, f64::min);
            Ok(Report {
                command: "algebra validate".into(),
                inputs: json!({ "algebra": algebra.display().to_string() }),
                results: json!({
                    "blocks": alg.blocks(),
                    "weights": alg.weights(),
                    "dim": alg.dim(),
                    "min_weight": min_weight,
                }),
                checks: vec![
                    Check::below("trace_normalization", normalization.abs(), *tol),
                    Check::holds("weights_positive", min_weight > 0.0, min_weight, 0.0),
                ],
            })
        }
        AlgebraCmd::Trace { element } => {
            let de: ElementDescriptor = read_json(element)?;
            let x = de.to_element()?;
            let tr = x.trace();
            Ok(Report {
                command: "algebra trace".into(),
                inputs: json!({ "element": element.display().to_string() }),
                results: json!({ "trace": [tr.re, tr.im], "op_norm": x.op_norm() }),
                checks: vec![],
            })
        }
    }
}

fn run_corr(cmd: &CorrCmd) -> Result<Report, CliError> {
    match cmd {
        CorrCmd::Build { descriptor } => {
            let corr = load_corr(descriptor)?;
            let expanded = CorrespondenceDescriptor::from_correspondence(&corr);
            let rep = corr.validate(1e-10);
            Ok(Report {
                command: "corr build".into(),
                inputs: json!({ "descriptor": descriptor.display().to_string() }),
                results: json!({
                    "dim": corr.dim(),
                    "correspondence": serde_json::to_value(&expanded)?,
                }),
                checks: vec![Check::below("axiom_residual", rep.max_residual(), rep.tol)],
            })
        }
        CorrCmd::Validate { corr, tol } => {
            let c = load_corr(corr)?;
            let rep = c.validate(*tol);
            Ok(Report {
                command: "corr validate".into(),
                inputs: json!({ "corr": corr.display().to_string(), "dim": c.dim() }),
                results: json!({
                    "homomorphism": rep.homomorphism,
                    "star": rep.star,
                    "commutation": rep.commutation,
                    "boundedness": rep.boundedness,
                }),
                checks: vec![
                    Check::below("homomorphism", rep.homomorphism, *tol),
                    Check::below("star", rep.star, *tol),
                    Check::below("commutation", rep.commutation, *tol),
                    Check::below("boundedness", rep.boundedness, *tol),
                ],
            })
        }
    }
}

fn run_bound(cmd: &BoundCmd) -> Result<Report, CliError> {
    match cmd {
        BoundCmd::Certify { cv } => {
            let corr = load_corr(&cv.corr)?;
            let v = load_vector(&cv.vector, &corr)?;
            let cert = boundcalc::radon_nikodym(&corr, &v)?;
            let positivity = cert
                .b_left
                .positivity_check(1e-10)
                .min_eigenvalue
                .min(cert.d_right.positivity_check(1e-10).min_eigenvalue);
            let trace_gap = (cert.b_left.trace().re - v.norm_squared())
                .abs()
                .max((cert.d_right.trace().re - v.norm_squared()).abs());
            Ok(Report {
                command: "bound certify".into(),
                inputs: json!({
                    "corr": cv.corr.display().to_string(),
                    "vector": cv.vector.display().to_string(),
                }),
                results: serde_json::to_value(CertificateRecord::from_certificate(&cert))?,
                checks: vec![
                    Check::holds("certificates_positive", positivity >= -1e-10, positivity, 1e-10),
                    Check::below("trace_consistency", trace_gap, 1e-10),
                ],
            })
        }
        BoundCmd::Cutoff { cv, radius, right } => {
            let corr = load_corr(&cv.corr)?;
            let v = load_vector(&cv.vector, &corr)?;
            let out = if *right {
                boundcalc::cutoff_right(&corr, &v, *radius)?
            } else {
                boundcalc::cutoff(&corr, &v, *radius)?
            };
            Ok(Report {
                command: "bound cutoff".into(),
                inputs: json!({
                    "corr": cv.corr.display().to_string(),
                    "vector": cv.vector.display().to_string(),
                    "radius": radius,
                    "side": if *right { "right" } else { "left" },
                }),
                results: json!({
                    "vector": VectorDescriptor::from_vector(&out.vector),
                    "projection": element_to_blocks(&out.projection),
                    "certified_bound": out.certified_bound,
                }),
                checks: vec![Check::below(
                    "bound_at_most_radius",
                    out.certified_bound - radius,
                    1e-9,
                )],
            })
        }
        BoundCmd::Renormalize { cv, bound } => {
            let corr = load_corr(&cv.corr)?;
            let v = load_vector(&cv.vector, &corr)?;
            let out = boundcalc::scale_to_bound(&corr, &v, *bound)?;
            let cert = boundcalc::radon_nikodym(&corr, &out.vector)?;
            Ok(Report {
                command: "bound renormalize".into(),
                inputs: json!({
                    "corr": cv.corr.display().to_string(),
                    "vector": cv.vector.display().to_string(),
                    "bound": bound,
                }),
                results: json!({
                    "vector": VectorDescriptor::from_vector(&out.vector),
                    "distance_bound": out.distance_bound,
                    "certificate": CertificateRecord::from_certificate(&cert),
                }),
                checks: vec![Check::below(
                    "renormalized_bound",
                    cert.max_bound() - bound,
                    1e-9,
                )],
            })
        }
        BoundCmd::Membership { cv, k } => {
            let corr = load_corr(&cv.corr)?;
            let v = load_vector(&cv.vector, &corr)?;
            let (member, cert) = boundcalc::sort_membership(&corr, &v, *k)?;
            Ok(Report {
                command: "bound membership".into(),
                inputs: json!({
                    "corr": cv.corr.display().to_string(),
                    "vector": cv.vector.display().to_string(),
                    "k": k,
                }),
                results: json!({
                    "member": member,
                    "certificate": CertificateRecord::from_certificate(&cert),
                }),
                checks: vec![],
            })
        }
    }
}

fn run_cp(cmd: &CpCmd) -> Result<Report, CliError> {
    match cmd {
        CpCmd::ToCorr { map } => {
            let de: CpMapDescriptor = read_json(map)?;
            let phi = de.to_cp_map()?;
            let (min_choi, star_defect) = (phi.choi()?.1, phi.star_defect());
            let (h, cyclic) = cpdict::cp_to_correspondence(&phi)?;
            let validation = h.validate(1e-8);
            Ok(Report {
                command: "cp to-corr".into(),
                inputs: json!({ "map": map.display().to_string() }),
                results: json!({
                    "dim": h.dim(),
                    "correspondence":
                        serde_json::to_value(CorrespondenceDescriptor::from_correspondence(&h))?,
                    "cyclic_vector": VectorDescriptor::from_vector(&cyclic),
                }),
                checks: vec![
                    Check::holds("choi_positive", min_choi >= -1e-10, min_choi, 1e-10),
                    Check::below("star_preservation", star_defect, 1e-10),
                    Check::below("axiom_residual", validation.max_residual(), 1e-8),
                ],
            })
        }
        CpCmd::FromVector { cv } => {
            let corr = load_corr(&cv.corr)?;
            let v = load_vector(&cv.vector, &corr)?;
            let phi = cpdict::vector_to_cp(&corr, &v)?;
            let min_choi = phi.choi()?.1;
            let sub = phi.subtracial_report(1e-9)?;
            Ok(Report {
                command: "cp from-vector".into(),
                inputs: json!({
                    "corr": cv.corr.display().to_string(),
                    "vector": cv.vector.display().to_string(),
                }),
                results: json!({
                    "map": serde_json::to_value(CpMapDescriptor::from_cp_map(&phi))?,
                    "subtracial": sub.is_subtracial,
                    "unital_defect": sub.unital_defect,
                    "trace_defect": sub.trace_defect,
                }),
                checks: vec![Check::holds(
                    "choi_positive",
                    min_choi >= -1e-10,
                    min_choi,
                    1e-10,
                )],
            })
        }
        CpCmd::Decompose { corr, seed } => {
            let c = load_corr(corr)?;
            let summands = cpdict::cyclic_decomposition(&c, *seed)?;
            let total: usize = summands.iter().map(|s| s.corr.dim()).sum();
            let worst_invariance =
                summands.iter().map(|s| s.invariance_defect).fold(0.0, f64::max);
            Ok(Report {
                command: "cp decompose".into(),
                inputs: json!({ "corr": corr.display().to_string(), "seed": seed }),
                results: json!({
                    "count": summands.len(),
                    "dims": summands.iter().map(|s| s.corr.dim()).collect::<Vec<_>>(),
                    "cp_maps": summands
                        .iter()
                        .map(|s| serde_json::to_value(CpMapDescriptor::from_cp_map(&s.cp_map)))
                        .collect::<Result<Vec<_>, _>>()?,
                }),
                checks: vec![
                    Check::holds(
                        "dimensions_complete",
                        total == c.dim(),
                        total as f64,
                        c.dim() as f64,
                    ),
                    Check::below("invariance_defect", worst_invariance, 1e-8),
                ],
            })
        }
    }
}

fn run_fell(cmd: &FellCmd) -> Result<Report, CliError> {
    match cmd {
        FellCmd::Residual { source, target, queries, seed } => {
            let s = load_corr(source)?;
            let t = load_corr(target)?;
            let qde: FellQueryDescriptor = read_json(queries)?;
            let q = qde.to_query(s.left_algebra(), s.right_algebra())?;
            let opts = analysis::FellOptions { seed: *seed, ..Default::default() };
            let out = analysis::fell_residual(&s, &t, &q, &opts)?;
            Ok(Report {
                command: "fell residual".into(),
                inputs: json!({
                    "source": source.display().to_string(),
                    "target": target.display().to_string(),
                    "queries": queries.display().to_string(),
                    "eps": q.eps,
                    "multiplicity": q.multiplicity,
                    "seed": seed,
                }),
                results: json!({
                    "residual": out.residual,
                    "converged": out.converged,
                    "witnesses": out
                        .witnesses
                        .iter()
                        .map(VectorDescriptor::from_vector)
                        .map(serde_json::to_value)
                        .collect::<Result<Vec<_>, _>>()?,
                }),
                checks: vec![Check::below("residual", out.residual, q.eps)],
            })
        }
        FellCmd::Contain { source, target, mult, tol, seed } => {
            let s = load_corr(source)?;
            let t = load_corr(target)?;
            let rep = analysis::weak_containment_report(&s, &t, *mult, *tol, *seed, None, &[])?;
            Ok(Report {
                command: "fell contain".into(),
                inputs: json!({
                    "source": source.display().to_string(),
                    "target": target.display().to_string(),
                    "multiplicity": mult,
                    "tolerance": tol,
                    "seed": seed,
                }),
                results: json!({
                    "contained": rep.contained,
                    "max_residual": rep.max_residual,
                    "residuals": rep.outcomes.iter().map(|o| o.residual).collect::<Vec<_>>(),
                }),
                checks: vec![Check::below("max_residual", rep.max_residual, *tol)],
            })
        }
        FellCmd::Semidiscrete { algebra, mult, tol, seed } => {
            let de: AlgebraDescriptor = read_json(algebra)?;
            let alg = de.to_algebra()?;
            let rep = analysis::semidiscrete_control(&alg, *mult, *tol, *seed)?;
            Ok(Report {
                command: "fell semidiscrete".into(),
                inputs: json!({
                    "algebra": algebra.display().to_string(),
                    "multiplicity": mult,
                    "tolerance": tol,
                    "seed": seed,
                }),
                results: json!({
                    "contained": rep.report.contained,
                    "max_residual": rep.report.max_residual,
                }),
                checks: vec![Check::below("max_residual", rep.report.max_residual, *tol)],
            })
        }
    }
}

fn run_central(cmd: &CentralCmd) -> Result<Report, CliError> {
    match cmd {
        CentralCmd::Defect { cv } => {
            let corr = load_corr(&cv.corr)?;
            let v = load_vector(&cv.vector, &corr)?;
            let gens = analysis::default_generators(corr.left_algebra());
            let defect = analysis::commutator_defect(&corr, &v, &gens)?;
            Ok(Report {
                command: "central defect".into(),
                inputs: json!({
                    "corr": cv.corr.display().to_string(),
                    "vector": cv.vector.display().to_string(),
                }),
                results: json!({ "defect": defect, "generators": gens.len() }),
                checks: vec![],
            })
        }
        CentralCmd::Project { cv } => {
            let corr = load_corr(&cv.corr)?;
            let v = load_vector(&cv.vector, &corr)?;
            let rep = analysis::central_projection(&corr, &v)?;
            let gens = analysis::default_generators(corr.left_algebra());
            let central_defect = analysis::commutator_defect(&corr, &rep.central_part, &gens)?;
            Ok(Report {
                command: "central project".into(),
                inputs: json!({
                    "corr": cv.corr.display().to_string(),
                    "vector": cv.vector.display().to_string(),
                }),
                results: json!({
                    "central_part": VectorDescriptor::from_vector(&rep.central_part),
                    "distance": rep.distance,
                    "defect": rep.defect,
                }),
                checks: vec![Check::below("central_part_defect", central_defect, 1e-10)],
            })
        }
        CentralCmd::Average { cv, k, delta, samples, seed } => {
            let corr = load_corr(&cv.corr)?;
            let v = load_vector(&cv.vector, &corr)?;
            let rep = analysis::averaged_central_vector(
                &corr,
                &v,
                *k,
                *delta,
                &analysis::AveragingOptions { haar_samples: *samples, seed: *seed },
            )?;
            let eta = rep
                .eta
                .as_ref()
                .map(VectorDescriptor::from_vector)
                .map(serde_json::to_value)
                .transpose()?;
            Ok(Report {
                command: "central average".into(),
                inputs: json!({
                    "corr": cv.corr.display().to_string(),
                    "vector": cv.vector.display().to_string(),
                    "k": k, "delta": delta, "samples": samples, "seed": seed,
                }),
                results: json!({
                    "eta": eta,
                    "distance": rep.distance,
                    "eta_bound": rep.eta_bound,
                    "delta_sampled": rep.delta_sampled,
                    "delta_certified": rep.delta_certified,
                }),
                checks: vec![
                    Check::below("distance_at_most_2delta", rep.distance - 2.0 * delta, 1e-9),
                    Check::below(
                        "bound_at_most_k_over_sq",
                        rep.eta_bound - k / (1.0 - delta).powi(2),
                        1e-9,
                    ),
                ],
            })
        }
        CentralCmd::Search { corr, delta, k, seed } => {
            let c = load_corr(corr)?;
            let gens = analysis::default_generators(c.left_algebra());
            let rep = analysis::almost_central_search(
                &c,
                &gens,
                *delta,
                *k,
                &analysis::SearchOptions { seed: *seed, ..Default::default() },
            )?;
            let witness = rep
                .witness
                .as_ref()
                .map(VectorDescriptor::from_vector)
                .map(serde_json::to_value)
                .transpose()?;
            Ok(Report {
                command: "central search".into(),
                inputs: json!({
                    "corr": corr.display().to_string(),
                    "delta": delta, "k": k, "seed": seed,
                }),
                results: json!({
                    "witness": witness,
                    "residual": rep.residual,
                    "bound": rep.bound,
                    "commutator": rep.constraints.commutator,
                    "left_tracial": rep.constraints.left_tracial,
                    "right_tracial": rep.constraints.right_tracial,
                }),
                checks: vec![Check::below("feasibility_residual", rep.residual, 1e-9)],
            })
        }
    }
}

fn run_sigma(cmd: &SigmaCmd) -> Result<Report, CliError> {
    let load_state = |p: &Path| -> Result<sigmafin::FaithfulState, CliError> {
        let de: StateDescriptor = read_json(p)?;
        Ok(de.to_state()?)
    };
    match cmd {
        SigmaCmd::Gns { state } => {
            let phi = load_state(state)?;
            let space = sigmafin::gns(&phi)?;
            Ok(Report {
                command: "sigma gns".into(),
                inputs: json!({ "state": state.display().to_string() }),
                results: json!({
                    "dim": phi.algebra().dim(),
                    "min_gram_eigenvalue": space.min_gram_eigenvalue(),
                }),
                checks: vec![Check::holds(
                    "gram_positive_definite",
                    space.min_gram_eigenvalue() > 1e-14,
                    space.min_gram_eigenvalue(),
                    1e-14,
                )],
            })
        }
        SigmaCmd::Bound { se, tol } => {
            let phi = load_state(&se.state)?;
            let de: ElementDescriptor = read_json(&se.element)?;
            let x = de.to_element()?;
            let closed = sigmafin::phi_right_bound(&x, &phi)?;
            let oracle = sigmafin::phi_right_bound_oracle(&x, &phi)?;
            Ok(Report {
                command: "sigma bound".into(),
                inputs: json!({
                    "state": se.state.display().to_string(),
                    "element": se.element.display().to_string(),
                }),
                results: json!({ "closed_form": closed, "maximization_oracle": oracle }),
                checks: vec![Check::below(
                    "closed_form_vs_oracle",
                    (closed - oracle).abs() / closed.max(1.0),
                    *tol,
                )],
            })
        }
        SigmaCmd::Sharp { se } => {
            let phi = load_state(&se.state)?;
            let de: ElementDescriptor = read_json(&se.element)?;
            let x = de.to_element()?;
            let sharp = phi.sharp_norm(&x);
            let star_gap = (sharp - phi.sharp_norm(&x.adjoint())).abs();
            Ok(Report {
                command: "sigma sharp".into(),
                inputs: json!({
                    "state": se.state.display().to_string(),
                    "element": se.element.display().to_string(),
                }),
                results: json!({ "sharp_norm": sharp, "gns_norm": phi.gns_norm(&x) }),
                checks: vec![Check::below("adjoint_isometry", star_gap, 1e-12)],
            })
        }
        SigmaCmd::Member { se, k, n } => {
            let phi = load_state(&se.state)?;
            let de: ElementDescriptor = read_json(&se.element)?;
            let x = de.to_element()?;
            let m = sigmafin::sort_membership_sigma(&x, &phi, *k, *n)?;
            Ok(Report {
                command: "sigma member".into(),
                inputs: json!({
                    "state": se.state.display().to_string(),
                    "element": se.element.display().to_string(),
                    "k": k, "n": n,
                }),
                results: json!({
                    "member": m.is_member,
                    "op_norm": m.op_norm,
                    "right_bound": m.right_bound,
                }),
                checks: vec![],
            })
        }
        SigmaCmd::Flow { se, t } => {
            let phi = load_state(&se.state)?;
            let de: ElementDescriptor = read_json(&se.element)?;
            let x = de.to_element()?;
            let flowed = sigmafin::modular_flow(&x, &phi, *t)?;
            let invariance = (phi.evaluate(&flowed) - phi.evaluate(&x)).norm();
            let star = sigmafin::modular_flow(&x.adjoint(), &phi, *t)?
                .sub(&flowed.adjoint())
                .op_norm();
            Ok(Report {
                command: "sigma flow".into(),
                inputs: json!({
                    "state": se.state.display().to_string(),
                    "element": se.element.display().to_string(),
                    "t": t,
                }),
                results: json!({ "flowed": element_to_blocks(&flowed) }),
                checks: vec![
                    Check::below("state_invariance", invariance, 1e-10),
                    Check::below("star_preservation", star, 1e-10),
                ],
            })
        }
        SigmaCmd::Dense { se, k } => {
            let phi = load_state(&se.state)?;
            let de: ElementDescriptor = read_json(&se.element)?;
            let u = de.to_element()?;
            let step = sigmafin::phi_dense_projection(&u, &phi, *k)?;
            Ok(Report {
                command: "sigma dense".into(),
                inputs: json!({
                    "state": se.state.display().to_string(),
                    "element": se.element.display().to_string(),
                    "k": k,
                }),
                results: json!({
                    "projection": element_to_blocks(&step.projection),
                    "approximant": element_to_blocks(&step.approximant),
                    "gns_distance": step.gns_distance,
                    "right_bound": step.right_bound,
                }),
                checks: vec![Check::below("domination_defect", step.domination_defect, 1e-10)],
            })
        }
    }
}

fn run_statial(cmd: &StatialCmd) -> Result<Report, CliError> {
    let load_family = |p: &Path| -> Result<statial::StatialFamily, CliError> {
        let de: FamilyDescriptor = read_json(p)?;
        Ok(de.to_family()?)
    };
    match cmd {
        StatialCmd::Norm { fe } => {
            let family = load_family(&fe.family)?;
            let de: ElementDescriptor = read_json(&fe.element)?;
            let x = de.to_element()?;
            let (via_star, via_plain) = statial::statial_norm_routes(&x, &family)?;
            let norm = via_star.max(via_plain);
            Ok(Report {
                command: "statial norm".into(),
                inputs: json!({
                    "family": fe.family.display().to_string(),
                    "element": fe.element.display().to_string(),
                    "full_closure": family.full_closure(),
                }),
                results: json!({
                    "norm": norm,
                    "via_x_star_x": via_star,
                    "via_x_x_star": via_plain,
                    "op_norm": x.op_norm(),
                }),
                checks: vec![Check::below(
                    "dominated_by_op_norm",
                    norm - x.op_norm(),
                    1e-12,
                )],
            })
        }
        StatialCmd::Faithful { family } => {
            let fam = load_family(family)?;
            let rep = statial::faithful_check(&fam)?;
            let witness_norm = match &rep.witness {
                Some(w) => statial::statial_norm(w, &fam)?,
                None => 0.0,
            };
            Ok(Report {
                command: "statial faithful".into(),
                inputs: json!({ "family": family.display().to_string() }),
                results: json!({
                    "faithful": rep.faithful,
                    "min_form_eigenvalue": rep.min_form_eigenvalue,
                    "witness": rep.witness.as_ref().map(element_to_blocks),
                    "witness_seminorm": witness_norm,
                }),
                checks: vec![],
            })
        }
        StatialCmd::Full { family, samples, seed } => {
            let fam = load_family(family)?;
            let deviation = statial::full_check(&fam, *samples, *seed)?;
            Ok(Report {
                command: "statial full".into(),
                inputs: json!({
                    "family": family.display().to_string(),
                    "samples": samples, "seed": seed,
                }),
                results: json!({ "max_deviation": deviation }),
                checks: vec![],
            })
        }
        StatialCmd::Multiplier { fe, probes, seed } => {
            let family = load_family(&fe.family)?;
            let de: ElementDescriptor = read_json(&fe.element)?;
            let x = de.to_element()?;
            let iv = statial::multiplier_bound(
                &x,
                &family,
                &statial::MultiplierOptions { probes: *probes, seed: *seed },
            )?;
            Ok(Report {
                command: "statial multiplier".into(),
                inputs: json!({
                    "family": fe.family.display().to_string(),
                    "element": fe.element.display().to_string(),
                    "probes": probes, "seed": seed,
                }),
                results: json!({
                    "lo": iv.lo,
                    "hi": iv.hi,
                    "width": iv.width(),
                    // Banach-algebra multiplier norm against the C*-norm;
                    // the general comparison keeps this ratio at most 4.
                    "op_norm_sq": x.op_norm().powi(2),
                    "banach_vs_cstar": iv.hi / x.op_norm().powi(2).max(1e-300),
                }),
                checks: vec![Check::below("interval_consistent", iv.lo - iv.hi, 1e-9)],
            })
        }
    }
}

fn run_seq(cmd: &SeqCmd) -> Result<Report, CliError> {
    match cmd {
        SeqCmd::Uniformize { seq, k, window } => {
            let de: SequenceDescriptor = read_json(seq)?;
            let (corr, sequence) = de.to_parts()?;
            let opts = boundcalc::UniformizeOptions {
                window: *window,
                ..Default::default()
            };
            let rep = boundcalc::uniformize_sequence(&corr, &sequence, *k, &opts)?;
            let worst_bound = rep
                .per_term
                .iter()
                .map(|d| d.bound_after - k)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(Report {
                command: "seq uniformize".into(),
                inputs: json!({
                    "seq": seq.display().to_string(),
                    "k": k, "window": window,
                    "terms": sequence.terms.len(),
                }),
                results: json!({
                    "terms": rep
                        .sequence
                        .terms
                        .iter()
                        .map(VectorDescriptor::from_vector)
                        .map(serde_json::to_value)
                        .collect::<Result<Vec<_>, _>>()?,
                    "bounds_before": rep.per_term.iter().map(|d| d.bound_before).collect::<Vec<_>>(),
                    "bounds_after": rep.per_term.iter().map(|d| d.bound_after).collect::<Vec<_>>(),
                    "distances": rep
                        .per_term
                        .iter()
                        .map(|d| d.distance_to_limit)
                        .collect::<Vec<_>>(),
                    "stages": [rep.stages.0, rep.stages.1],
                    "composite_constant": rep.composite_constant,
                    "max_solver_gap": rep.max_solver_gap,
                }),
                checks: vec![Check::below("uniform_bound_excess", worst_bound, 1e-8)],
            })
        }
        SeqCmd::ConnesTail { seq, k } => {
            let de: ElementSequenceDescriptor = read_json(seq)?;
            let elems = de.to_elements()?;
            let profile = boundcalc::connes_tail(&elems, *k)?;
            Ok(Report {
                command: "seq connes-tail".into(),
                inputs: json!({ "seq": seq.display().to_string(), "k": k, "terms": elems.len() }),
                results: json!({ "profile": profile.values, "tail_sup": profile.tail_sup }),
                checks: vec![],
            })
        }
        SeqCmd::Ocneanu { seq, cap, tests } => {
            let de: SigmaSequenceDescriptor = read_json(seq)?;
            let sequence = de.to_sequence()?;
            let ideal_tests = match tests {
                Some(path) => {
                    let tde: ElementSequenceDescriptor = read_json(path)?;
                    vec![tde.to_elements()?]
                }
                None => Vec::new(),
            };
            let rep = sigmafin::ocneanu_predicates(&sequence, &ideal_tests, *cap)?;
            Ok(Report {
                command: "seq ocneanu".into(),
                inputs: json!({
                    "seq": seq.display().to_string(),
                    "cap": cap,
                    "terms": sequence.terms.len(),
                }),
                results: json!({
                    "sharp_profile": rep.sharp_profile.values,
                    "sharp_tail_sup": rep.sharp_profile.tail_sup,
                    "sup_op_norm": rep.sup_op_norm,
                    "multiplier_profiles": rep
                        .multiplier_profiles
                        .iter()
                        .map(|(r, l)| json!({
                            "right": r.values, "right_tail": r.tail_sup,
                            "left": l.values, "left_tail": l.tail_sup,
                        }))
                        .collect::<Vec<_>>(),
                }),
                checks: vec![],
            })
        }
        SeqCmd::ModularLimit { seq, t } => {
            let de: SigmaSequenceDescriptor = read_json(seq)?;
            let sequence = de.to_sequence()?;
            let profile = sigmafin::modular_limit_check(&sequence, *t)?;
            Ok(Report {
                command: "seq modular-limit".into(),
                inputs: json!({
                    "seq": seq.display().to_string(),
                    "t": t,
                    "terms": sequence.terms.len(),
                }),
                results: json!({ "profile": profile.values, "tail_sup": profile.tail_sup }),
                checks: vec![],
            })
        }
        SeqCmd::StatialTail { seq, k, probes, seed } => {
            let de: StatialSequenceDescriptor = read_json(seq)?;
            let sequence = de.to_sequence()?;
            let rep = statial::statial_sequence_tail(
                &sequence,
                *k,
                &statial::MultiplierOptions { probes: *probes, seed: *seed },
            )?;
            Ok(Report {
                command: "seq statial-tail".into(),
                inputs: json!({
                    "seq": seq.display().to_string(),
                    "k": k, "probes": probes, "seed": seed,
                    "terms": sequence.len(),
                }),
                results: json!({
                    "lo": rep.intervals.iter().map(|iv| iv.lo).collect::<Vec<_>>(),
                    "hi": rep.intervals.iter().map(|iv| iv.hi).collect::<Vec<_>>(),
                    "tail_fraction": rep.tail_fraction,
                    "tail_sup_hi": rep.tail_sup_hi,
                }),
                checks: vec![],
            })
        }
    }
}
