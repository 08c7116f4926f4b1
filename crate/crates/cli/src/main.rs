//! `mpsym`: command-line front end. JSON goes to stdout (or `--out`), a
//! one-line summary to stderr.
//!
//! Exit codes: 0 success, 1 valid negative answer or failed verification,
//! 2 invalid input, 3 unsupported or outside the theorems.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use mpsym::catalog::{get_tensor, spec_from_parts};
use mpsym::io::{
    complex_to_json, matrix_to_json, parse_matrix_literal, PlanJson, ReportJson, StateJson, SymmetryReportJson, TensorJson,
};
use mpsym::mps::{build_state_capped, default_injectivity_bound, injectivity_length_tol, DEFAULT_AMPLITUDE_CAP};
use mpsym::oracle::{verify_claims, Claim, ClaimKind};
use mpsym::slocc::{self, ExtendedComplex};
use mpsym::{CMatrix, Error, Rank3Tensor};

#[derive(Parser)]
#[command(name = "mpsym", version, about = "Local symmetries and transformations of translation-invariant MPS")]
struct Cli {
    #[command(flatten)]
    cfg: Config,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Config {
    /// Relative tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Comparison mode used by `verify` (defaults to the claim kind).
    #[arg(long, global = true, value_enum)]
    scalar_mode: Option<Mode>,
    /// Maximum number of dense amplitudes.
    #[arg(long, global = true, default_value_t = DEFAULT_AMPLITUDE_CAP)]
    amplitude_cap: usize,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    UpToScalar,
}

#[derive(Args)]
struct Source {
    /// Catalogued family: w, ghz, cluster, aklt, vb, ghz-b, w-b, aklt-g.
    #[arg(long, conflicts_with = "tensor")]
    family: Option<String>,
    /// Family parameter as a matrix literal, e.g. '[[1,1],[1,-1]]'.
    #[arg(long)]
    param: Option<String>,
    /// Tensor JSON file.
    #[arg(long)]
    tensor: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dense MPS amplitudes.
    State {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        n: usize,
    },
    /// The invariant b00 b11 / (b01 b10).
    Chi {
        #[arg(long)]
        b: String,
    },
    /// SLOCC class of a d = D = 2 tensor.
    Classify {
        #[command(flatten)]
        src: Source,
        /// Also report whether the state vanishes at this size.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Injectivity length and minimal size.
    Normality {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        l_max: Option<usize>,
    },
    /// Local symmetries of a catalogued family.
    Symmetries {
        #[arg(long)]
        family: String,
        #[arg(long)]
        param: Option<String>,
        #[arg(long)]
        n: usize,
    },
    /// SLOCC equivalence of Psi(GHZ_b) and Psi(GHZ_c), or of W_b and W_c with --kind w.
    Equivalent {
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "ghz")]
        kind: Kind,
        /// Write the witness plan here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Feasibility of Psi(A) -> Psi(B) with a certificate.
    Transform {
        #[arg(long)]
        from: String,
        #[arg(long)]
        from_param: Option<String>,
        #[arg(long)]
        to: String,
        #[arg(long)]
        to_param: Option<String>,
        #[arg(long)]
        n: usize,
        /// Also run the oracle on every emitted certificate.
        #[arg(long)]
        verify: bool,
    },
    /// Re-check a plan or symmetry report with the dense oracle.
    Verify {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ghz,
    W,
}

enum Failure {
    Negative(Value, String),
    Err(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Err(e)
    }
}

type Outcome = std::result::Result<(Value, String), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.cfg.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok((v, summary)) => match emit(&cli.cfg, &v) {
            Ok(()) => {
                eprintln!("{summary}");
                ExitCode::SUCCESS
            }
            Err(e) => report_error(&e),
        },
        Err(Failure::Negative(v, summary)) => match emit(&cli.cfg, &v) {
            Ok(()) => {
                eprintln!("{summary}");
                ExitCode::from(1)
            }
            Err(e) => report_error(&e),
        },
        Err(Failure::Err(e)) => report_error(&e),
    }
}

fn report_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        Error::InvalidInput(_) | Error::NotInjective { .. } | Error::Indeterminate(_) => 2,
        Error::NoWitness(_) | Error::Numerical(_) => 1,
        Error::Unsupported(_) | Error::TheoremsInapplicable { .. } | Error::NotNormal(_) | Error::ResourceLimit { .. } => 3,
    })
}

fn emit(cfg: &Config, v: &Value) -> mpsym::Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(e.to_string()))?;
    write_json(cfg.out.as_ref(), &text)
}

fn write_json(path: Option<&PathBuf>, text: &str) -> mpsym::Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn parse_opt(s: &Option<String>) -> mpsym::Result<Option<CMatrix>> {
    s.as_deref().map(parse_matrix_literal).transpose()
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> mpsym::Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load(src: &Source) -> mpsym::Result<(Rank3Tensor, String)> {
    match (&src.family, &src.tensor) {
        (Some(f), None) => {
            let spec = spec_from_parts(f, parse_opt(&src.param)?)?;
            Ok((get_tensor(&spec)?, spec.to_string()))
        }
        (None, Some(p)) => {
            if src.param.is_some() {
                return Err(Error::InvalidInput("--param needs --family".into()));
            }
            let t: TensorJson = read_json(p)?;
            Ok((t.to_tensor()?, p.display().to_string()))
        }
        _ => Err(Error::InvalidInput("give exactly one of --family or --tensor".into())),
    }
}

fn chi_json(c: ExtendedComplex) -> Value {
    match c {
        ExtendedComplex::Infinity => json!("inf"),
        ExtendedComplex::Finite(z) => json!(complex_to_json(z)),
    }
}

fn run(cli: &Cli) -> Outcome {
    let cfg = &cli.cfg;
    let tol = cfg.tol;
    match &cli.cmd {
        Cmd::State { src, n } => {
            let (a, name) = load(src)?;
            let psi = build_state_capped(std::slice::from_ref(&a), *n, cfg.amplitude_cap)?;
            Ok((to_value(&StateJson::from(&psi)), format!("{name}: {} amplitudes, norm {:.6}", psi.amplitudes().len(), psi.norm())))
        }
        Cmd::Chi { b } => {
            let b = parse_matrix_literal(b)?;
            let c = slocc::chi(&b, tol)?;
            Ok((json!({ "chi": chi_json(c) }), format!("chi = {c}")))
        }
        Cmd::Classify { src, n } => {
            let (a, name) = load(src)?;
            let cls = match n {
                Some(n) => slocc::classify_at(&a, *n, tol)?,
                None => slocc::classify(&a, tol)?,
            };
            let v = json!({
                "kind": cls.kind.name(),
                "chi": cls.chi.map(chi_json),
                "b": cls.b.as_ref().map(matrix_to_json),
                "injectivity_length": cls.injectivity_length,
                "symmetry_order": cls.symmetry_order.describe(),
                "reducible": cls.reducible,
            });
            Ok((v, format!("{name}: {}", cls.kind.name())))
        }
        Cmd::Normality { src, l_max } => {
            let (a, name) = load(src)?;
            let rep = injectivity_length_tol(&a, l_max.unwrap_or(default_injectivity_bound(a.bond())), tol);
            let v = json!({
                "injectivity_length": rep.injectivity_length,
                "searched_up_to": rep.searched_up_to,
                "normal_for_sites": rep.normal_for_sites,
            });
            let summary = match rep.injectivity_length {
                Some(l) => format!("{name}: normal, L = {l}"),
                None => format!("{name}: not normal up to L = {}", rep.searched_up_to),
            };
            Ok((v, summary))
        }
        Cmd::Symmetries { family, param, n } => {
            let spec = spec_from_parts(family, parse_opt(param)?)?;
            let sol = mpsym::family_symmetries(&spec, *n, tol)?;
            let tensor = get_tensor(&spec)?;
            let rep = SymmetryReportJson::new(&sol, &tensor);
            let summary = format!(
                "{spec}, N = {n}: {} certificates, {} parametrized families",
                sol.certificates.len(),
                sol.parametrized.len()
            );
            Ok((to_value(&rep), summary))
        }
        Cmd::Equivalent { b, c, n, kind, witness } => {
            let (b, c) = (parse_matrix_literal(b)?, parse_matrix_literal(c)?);
            let (family, make): (&str, fn(&CMatrix) -> mpsym::Result<Rank3Tensor>) = match kind {
                Kind::Ghz => ("ghz-b", mpsym::catalog::ghz_b),
                Kind::W => ("w-b", mpsym::catalog::w_b),
            };
            let (ta, tb) = (make(&b)?, make(&c)?);
            let eq = slocc::slocc_equivalent(&ta, &tb, *n, tol)?;
            let mut out = json!({ "equivalent": eq, "n": n });
            if !eq {
                return Err(Failure::Negative(out, format!("not SLOCC equivalent at N = {n}")));
            }
            let cert = match kind {
                Kind::Ghz => slocc::equivalence_witness(&b, &c, *n, tol)?,
                Kind::W => slocc::w_equivalence_witness(&b, &c, *n, tol)?,
            };
            let plan = mpsym::TransformPlan {
                source_family: Some(spec_from_parts(family, Some(b))?),
                target_family: Some(spec_from_parts(family, Some(c))?),
                source_tensor: ta,
                target_tensor: tb,
                n: *n,
                feasible: true,
                reason: "SLOCC equivalence witness".into(),
                certificate: Some(cert),
                alternatives: Vec::new(),
                verification: None,
            };
            let pj = PlanJson::from(&plan);
            if let Some(path) = witness {
                let text = serde_json::to_string_pretty(&pj).expect("serializable");
                write_json(Some(path), &text)?;
            }
            out["witness"] = to_value(&pj.certificate);
            Ok((out, format!("SLOCC equivalent at N = {n}")))
        }
        Cmd::Transform { from, from_param, to, to_param, n, verify } => {
            let src = spec_from_parts(from, parse_opt(from_param)?)?;
            let dst = spec_from_parts(to, parse_opt(to_param)?)?;
            let plan = mpsym::decide_transform(&src, &dst, *n, tol)?;
            let mut v = to_value(&PlanJson::from(&plan));
            if *verify {
                let claims = plan_claims(&PlanJson::from(&plan), tol)?;
                let rep = verify_claims(&claims, *n..=*n, tol.max(1e-8));
                v["verification_report"] = to_value(&ReportJson::from(&rep));
                if !rep.all_passed() {
                    return Err(Failure::Negative(v, "certificate failed verification".into()));
                }
            }
            let summary = format!("{src} -> {dst}, N = {n}: {} ({})", if plan.feasible { "feasible" } else { "infeasible" }, plan.reason);
            if plan.feasible {
                Ok((v, summary))
            } else {
                Err(Failure::Negative(v, summary))
            }
        }
        Cmd::Verify { plan, n_min, n_max } => {
            let artifact: Artifact = read_json(plan)?;
            let (claims, n0) = match &artifact {
                Artifact::Plan(p) => (plan_claims(p, tol)?, p.n),
                Artifact::Symmetries(s) => (symmetry_claims(s, tol)?, s.n),
                Artifact::Other(_) => (Vec::new(), 0),
            };
            let lo = n_min.unwrap_or(n0);
            let hi = n_max.unwrap_or(lo.max(n0));
            let claims: Vec<Claim> = match cfg.scalar_mode {
                None => claims,
                Some(m) => claims
                    .into_iter()
                    .map(|mut c| {
                        c.kind = match m {
                            Mode::Strict => ClaimKind::Symmetry,
                            Mode::UpToScalar => ClaimKind::Transform,
                        };
                        c
                    })
                    .collect(),
            };
            let vtol = tol.max(1e-9);
            let rep = verify_claims(&claims, lo..=hi, vtol);
            let v = to_value(&ReportJson::from(&rep));
            let summary = format!("{}/{} checks passed, worst residual {:.3e}", rep.passed, rep.checked, rep.worst_residual);
            if rep.all_passed() {
                Ok((v, summary))
            } else {
                Err(Failure::Negative(v, summary))
            }
        }
    }
}

/// Any JSON the CLI writes; artifacts without certificates verify vacuously.
#[derive(Deserialize)]
#[serde(untagged)]
enum Artifact {
    Plan(PlanJson),
    Symmetries(SymmetryReportJson),
    Other(serde::de::IgnoredAny),
}

fn plan_claims(p: &PlanJson, tol: f64) -> mpsym::Result<Vec<Claim>> {
    let plan = p.to_plan(tol.max(1e-9))?;
    let certs = plan.certificate.iter().chain(&plan.alternatives);
    Ok(certs
        .enumerate()
        .map(|(k, c)| Claim {
            id: if k == 0 { "certificate".into() } else { format!("alternative{k}") },
            kind: ClaimKind::Transform,
            source: plan.source_tensor.clone(),
            target: plan.target_tensor.clone(),
            certificate: c.clone(),
        })
        .collect())
}

fn symmetry_claims(s: &SymmetryReportJson, tol: f64) -> mpsym::Result<Vec<Claim>> {
    let tensor = s.tensor.to_tensor()?;
    s.certificates
        .iter()
        .enumerate()
        .map(|(k, c)| {
            Ok(Claim {
                id: format!("symmetry{k}"),
                kind: ClaimKind::Symmetry,
                source: tensor.clone(),
                target: tensor.clone(),
                certificate: c.to_certificate(tol.max(1e-9))?,
            })
        })
        .collect()
}
