//! The `gk` command line. Exit status 0 means verified, 1 means a check
//! failed (a witness is printed), 2 means bad usage or a resource limit.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use crate::claims::{self, Certificate, ClaimError, MRule, Verdict};
use crate::exactalg::{parse_rational, read_matrix, write_matrix, write_prime_to, AnyMatrix, PrimeFieldMatrix};
use crate::factorize::lempel_factorize;
use crate::guard::{gf2_bytes, ResourceGuard, DEFAULT_MAX_BYTES, DEFAULT_MAX_VERTICES};
use crate::kneser::{ExplicitGraph, GKGraph, GKParams, GirthMode};
use crate::oracles::{self, OracleBudget};
use crate::polyrep::representing_matrix_mod_p;
use crate::subspaces::{avoiding_subspace, graded_subspace, uncovered_vector, Subspace};

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "gk", version, about = "Exact certificates for generalized Kneser graphs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to GK_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Ignore the memory guard.
    #[arg(long, global = true)]
    force: bool,
    /// Memory guard in MiB.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_BYTES >> 20)]
    max_mib: u64,
    /// Vertex-count guard.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: u64,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Export K(d,s,m) as JSON.
    Build {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        edges: bool,
    },
    /// Rank of a matrix file.
    Rank {
        /// A prime, or Q.
        #[arg(long)]
        field: Option<String>,
        file: PathBuf,
    },
    /// Representing matrix of K(d,s,m) modulo p.
    Represent {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
    /// Symmetric factorization M = B B^T of a GF(2) matrix file.
    Factor { file: PathBuf },
    /// Exact small-graph oracles.
    Oracle {
        #[arg(value_enum)]
        op: OracleOp,
        /// Graph JSON with `n` and `edges`.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Comma-separated `vertices=`, `dim=`, `steps=`, `seconds=`.
        #[arg(long)]
        budget: Option<String>,
        /// JSON-lines results ledger (default: oracle-ledger.jsonl under --out).
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Subspace constructions over Q.
    Subspace {
        #[arg(value_enum)]
        op: SubspaceOp,
        /// JSON with `u`, `family` and `limit` (avoid) or `target` (grade).
        #[arg(long)]
        input: PathBuf,
    },
    /// End-to-end certificates.
    Cert {
        #[command(subcommand)]
        which: CertCommand,
    },
    /// Exact R versus n over admissible d.
    Crossover {
        /// `ell:<odd>` or `eighth`.
        #[arg(long)]
        rule: String,
        #[arg(long)]
        max_d: u32,
    },
    /// Closed-form bounds.
    Formulas {
        #[arg(value_enum)]
        which: Formula,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long)]
        d: u64,
        /// Additive constant, a rational.
        #[arg(long)]
        c: Option<String>,
    },
    /// Re-verify a stored certificate and its artifacts.
    VerifyCert { file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OracleOp {
    Minrank,
    Od2,
    ChiK,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SubspaceOp {
    Uncovered,
    Avoid,
    Grade,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Formula {
    Stahl,
    S2,
    General,
    Bukhcox,
}

#[derive(Subcommand, Debug)]
enum CertCommand {
    /// K(d, d/2, d/(2 ell)): odd girth above ell and rank at most R.
    Cycles {
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// `exhaustive`, `transitive` or `sampled:<samples>:<size>:<seed>`.
        #[arg(long)]
        girth: Option<String>,
    },
    /// Full GF(2) pipeline on K(d, d/2, d/6).
    TriangleFree {
        #[arg(long)]
        d: u32,
    },
    /// Sign-vector coloring and complement minrank bound on K(d, d/2, d/8).
    Vchrom {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
}

/// Everything needed to reproduce a run; copied into every JSON artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub argv: Vec<String>,
    pub max_vertices: u64,
    pub max_bytes: u64,
    pub force: bool,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub verbosity: u8,
}

struct Ctx {
    config: RunConfig,
    guard: ResourceGuard,
    out: Option<PathBuf>,
    verbose: u8,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Refuted(String),
}

impl From<ClaimError> for Failure {
    fn from(e: ClaimError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_VERIFIED };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.global.threads.or_else(|| std::env::var("GK_THREADS").ok().and_then(|s| s.parse().ok()));
    if let Some(t) = threads {
        // fails harmlessly if a pool already exists in this process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let g = &cli.global;
    let guard = ResourceGuard { max_vertices: g.max_vertices, max_bytes: g.max_mib << 20, force: g.force };
    let ctx = Ctx {
        config: RunConfig {
            argv: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
            max_vertices: guard.max_vertices,
            max_bytes: guard.max_bytes,
            force: guard.force,
            threads,
            out: g.out.as_ref().map(|p| p.display().to_string()),
            verbosity: g.verbose,
        },
        guard,
        out: g.out.clone(),
        verbose: g.verbose,
    };
    match dispatch(&cli.command, &ctx) {
        Ok(()) => EXIT_VERIFIED,
        Err(Failure::Refuted(why)) => {
            eprintln!("refuted: {why}");
            EXIT_REFUTED
        }
        Err(Failure::Usage(why)) => {
            eprintln!("error: {why}");
            EXIT_ERROR
        }
    }
}

fn run_config_value(ctx: &Ctx) -> serde_json::Value {
    serde_json::to_value(&ctx.config).expect("plain data")
}

/// Prints `value` and, with `--out`, also writes it to `<out>/<file>`.
fn emit_json(ctx: &Ctx, file: &str, mut value: serde_json::Value) -> Result<(), Failure> {
    if let Some(obj) = value.as_object_mut() {
        obj.insert("run_config".into(), run_config_value(ctx));
    }
    let text = serde_json::to_string_pretty(&value).expect("json serializes");
    if let Some(dir) = &ctx.out {
        write_file(&dir.join(file), text.as_bytes())?;
    }
    println!("{text}");
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| usage(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    serde_json::from_str(&read_text(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<(), Failure> {
    match cmd {
        Command::Build { d, s, m, edges } => {
            let params = GKParams::new(*d, *s, *m).map_err(usage)?;
            let n = params.vertex_count();
            let edge_bytes = if *edges { n.saturating_mul(params.degree()).saturating_mul(8) } else { 0 };
            ctx.guard.check("graph export", n, n * 8 + edge_bytes).map_err(usage)?;
            let g = GKGraph::build(params);
            emit_json(ctx, &format!("graph-d{d}-s{s}-m{m}.json"), g.export_json(*edges))
        }
        Command::Rank { field, file } => {
            let m = read_matrix(&read_text(file)?).map_err(usage)?;
            let rank = rank_in_field(m, field.as_deref())?;
            println!("{rank}");
            Ok(())
        }
        Command::Represent { d, s, m, p } => {
            let params = GKParams::new(*d, *s, *m).map_err(usage)?;
            let rep = representing_matrix_mod_p(params, *p, &ctx.guard).map_err(usage)?;
            if let Some(dir) = &ctx.out {
                let mut buf = Vec::new();
                write_prime_to(&rep.matrix, &mut buf).map_err(usage)?;
                write_file(&dir.join(format!("matrix-d{d}-s{s}-m{m}-p{p}.txt")), &buf)?;
            }
            let verified = rep.verified();
            emit_json(ctx, &format!("represent-d{d}-s{s}-m{m}-p{p}.json"), rep.certificate_fragment())?;
            if verified {
                Ok(())
            } else {
                Err(Failure::Refuted(format!("{:?}", rep.represents.violation)))
            }
        }
        Command::Factor { file } => {
            let m = match read_matrix(&read_text(file)?).map_err(usage)? {
                AnyMatrix::Prime(m) if m.modulus() == 2 => m.into_gf2().expect("p = 2 is packed"),
                _ => return Err(usage("factorization needs a matrix over GF(2)")),
            };
            let n = m.rows() as u64;
            ctx.guard.check("factorization", n, 3 * gf2_bytes(n, n)).map_err(usage)?;
            let f = lempel_factorize(&m).map_err(usage)?;
            let text = write_matrix(&AnyMatrix::Prime(PrimeFieldMatrix::from_gf2(f.b)));
            match &ctx.out {
                Some(dir) => {
                    let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or("matrix".into());
                    let path = dir.join(format!("{stem}.factor.txt"));
                    write_file(&path, text.as_bytes())?;
                    println!("rank {} factor {}", f.rank, path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Oracle { op, graph, p, k, budget, ledger } => oracle(ctx, *op, graph, *p, *k, budget.as_deref(), ledger),
        Command::Subspace { op, input } => subspace(ctx, *op, input),
        Command::Cert { which } => cert(ctx, which),
        Command::Crossover { rule, max_d } => {
            let rule: MRule = rule.parse()?;
            let reports = claims::crossover_search(rule, *max_d)?;
            let minimal = claims::minimal_crossover(&reports);
            let value = serde_json::json!({
                "rule": rule.to_string(),
                "max_d": max_d,
                "minimal_d": minimal,
                "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            let file = format!("crossover-{}-{max_d}.json", rule.to_string().replace(':', ""));
            emit_json(ctx, &file, value)
        }
        Command::Formulas { which, k, s, d, c } => {
            let need_s = || s.ok_or_else(|| usage("--s is required"));
            let value = match which {
                Formula::Stahl => claims::stahl_rhs(*k, need_s()?, *d)?.to_string(),
                Formula::S2 => claims::thm_s2_value(*k, *d)?.to_string(),
                Formula::General => {
                    let c: BigRational = match c {
                        Some(text) => parse_rational(text).ok_or_else(|| usage(format!("bad rational {text:?}")))?,
                        None => return Err(usage("--c is required")),
                    };
                    claims::thm_general_lower(*k, need_s()?, *d, &c)?.to_string()
                }
                Formula::Bukhcox => claims::bukh_cox_lower(*k, need_s()?, *d)?.to_string(),
            };
            println!("{value}");
            Ok(())
        }
        Command::VerifyCert { file } => {
            let r = claims::verify_certificate(file, &ctx.guard)?;
            for m in &r.mismatches {
                eprintln!("mismatch: {m}");
            }
            println!("stored {:?}, reproduced {:?}", r.stored, r.reproduced);
            match (r.consistent(), r.reproduced) {
                (true, Verdict::Verified) => Ok(()),
                (true, v) => Err(Failure::Refuted(format!("certificate reproduces verdict {v:?}"))),
                (false, _) => Err(Failure::Refuted("certificate does not re-verify".into())),
            }
        }
    }
}

fn rank_in_field(m: AnyMatrix, field: Option<&str>) -> Result<usize, Failure> {
    match (field, m) {
        (None, m) => Ok(m.rank()),
        (Some("Q"), AnyMatrix::Prime(_)) => Err(usage("a matrix over GF(p) has no rank over Q")),
        (Some("Q"), m) => Ok(m.rank()),
        (Some(f), m) => {
            let p: u64 = f.parse().map_err(|_| usage(format!("field must be a prime or Q, got {f:?}")))?;
            match m {
                AnyMatrix::Prime(m) if m.modulus() as u64 == p => Ok(m.rank()),
                AnyMatrix::Prime(m) => Err(usage(format!("matrix is over GF({}), not GF({p})", m.modulus()))),
                AnyMatrix::Integer(m) => Ok(m.reduce_mod_p(p).map_err(usage)?.rank()),
                AnyMatrix::Rational(_) => Err(usage("rational matrices have no reduction mod p here")),
            }
        }
    }
}

fn parse_budget(spec: Option<&str>) -> Result<OracleBudget, Failure> {
    let mut b = OracleBudget::default();
    for item in spec.unwrap_or("").split(',').filter(|s| !s.is_empty()) {
        let (key, value) = item.split_once('=').ok_or_else(|| usage(format!("budget item {item:?} is not key=value")))?;
        let value: u64 = value.parse().map_err(|_| usage(format!("budget value {value:?} is not a number")))?;
        match key {
            "vertices" => b.max_vertices = value as usize,
            "dim" => b.max_dimension = value as usize,
            "steps" => b.max_steps = value,
            "seconds" => b.max_seconds = value,
            _ => return Err(usage(format!("unknown budget key {key:?}"))),
        }
    }
    Ok(b)
}

fn oracle(
    ctx: &Ctx,
    op: OracleOp,
    graph: &Path,
    p: u64,
    k: usize,
    budget: Option<&str>,
    ledger: &Option<PathBuf>,
) -> Result<(), Failure> {
    let g = ExplicitGraph::from_json(&read_json(graph)?).map_err(usage)?;
    let budget = parse_budget(budget)?;
    let (name, params, outcome) = match op {
        OracleOp::Minrank => ("minrank", serde_json::json!({ "p": p }), oracles::minrank_exact(&g, p, &budget)),
        OracleOp::Od2 => ("od2", serde_json::json!({}), oracles::od_exact_gf2(&g, &budget)),
        OracleOp::ChiK => ("chi-k", serde_json::json!({ "k": k }), oracles::multichromatic_exact(&g, k, &budget)),
    };
    let outcome = outcome.map(|v| serde_json::json!(v));
    let mut entry = oracles::ledger_entry(name, &g, params, &outcome);
    entry["budget"] = serde_json::to_value(budget).expect("plain data");
    entry["run_config"] = run_config_value(ctx);
    let ledger = ledger.clone().or_else(|| ctx.out.as_ref().map(|d| d.join("oracle-ledger.jsonl")));
    if let Some(path) = ledger {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(usage)?;
        }
        oracles::append_ledger(&path, &entry).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    println!("{entry}");
    outcome.map(|_| ()).map_err(usage)
}

fn subspace(ctx: &Ctx, op: SubspaceOp, input: &Path) -> Result<(), Failure> {
    let v = read_json(input)?;
    let u = Subspace::from_json(&v["u"]).map_err(usage)?;
    let family = v["family"]
        .as_array()
        .ok_or_else(|| usage("`family` must be a list of subspaces"))?
        .iter()
        .map(Subspace::from_json)
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let number = |key: &str| v[key].as_u64().map(|x| x as usize).ok_or_else(|| usage(format!("`{key}` is required")));
    let result = match op {
        SubspaceOp::Uncovered => {
            let r = uncovered_vector(&u, &family).map_err(usage)?;
            serde_json::json!({
                "vector": r.vector.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "alpha": r.alpha,
                "candidates": r.candidates,
                "bound": r.bound,
            })
        }
        SubspaceOp::Avoid => {
            let w = avoiding_subspace(&u, &family, number("limit")?).map_err(usage)?;
            serde_json::json!({ "subspace": w.to_json(), "dim": w.dim() })
        }
        SubspaceOp::Grade => {
            let w = graded_subspace(&u, &family, number("target")?).map_err(usage)?;
            serde_json::json!({ "subspace": w.to_json(), "dim": w.dim() })
        }
    };
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or("subspace".into());
    emit_json(ctx, &format!("{stem}.{op:?}.json").to_lowercase(), result)
}

fn parse_girth(spec: &str) -> Result<GirthMode, Failure> {
    match spec.split(':').collect::<Vec<_>>().as_slice() {
        ["exhaustive"] => Ok(GirthMode::Exhaustive),
        ["transitive"] => Ok(GirthMode::Transitive),
        ["sampled", a, b, c] => {
            let num = |x: &str| x.parse::<u64>().map_err(|_| usage(format!("bad number {x:?} in girth mode")));
            Ok(GirthMode::Sampled { samples: num(a)? as usize, size: num(b)? as usize, seed: num(c)? })
        }
        _ => Err(usage(format!("girth mode must be exhaustive, transitive or sampled:S:SIZE:SEED, got {spec:?}"))),
    }
}

fn cert(ctx: &Ctx, which: &CertCommand) -> Result<(), Failure> {
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut c: Certificate = match which {
        CertCommand::Cycles { ell, d, p, girth } => {
            let mode = girth.as_deref().map(parse_girth).transpose()?;
            claims::cycle_free_certificate(*ell, *d, *p, mode, &ctx.guard, Some(&dir))?
        }
        CertCommand::TriangleFree { d } => claims::triangle_free_od_certificate(*d, &ctx.guard, Some(&dir))?,
        CertCommand::Vchrom { d, p } => claims::vchrom3_certificate(*d, *p, &ctx.guard, Some(&dir))?,
    };
    c.run_config = run_config_value(ctx);
    c.seal();
    let path = c.write_to(&dir)?;
    if ctx.verbose > 0 {
        eprintln!("{}", serde_json::to_string_pretty(&c.measured).expect("json serializes"));
    }
    for note in &c.notes {
        eprintln!("note: {note}");
    }
    println!("{} {:?} {}", c.claim, c.verdict, path.display());
    match c.verdict {
        Verdict::Verified => Ok(()),
        Verdict::Refuted => Err(Failure::Refuted(witness(&c))),
        Verdict::Inconclusive => Err(Failure::Refuted("inconclusive: the chosen checks cannot confirm the claim".into())),
    }
}

/// The measured fields that carry a counterexample.
fn witness(c: &Certificate) -> String {
    let m = &c.measured;
    let mut parts = Vec::new();
    if let Some(g) = m.girth.as_ref().and_then(|g| g.witness.as_ref()) {
        parts.push(format!("odd cycle {g:?}"));
    }
    if let Some(v) = &m.represents_violation {
        parts.push(format!("representation {v:?}"));
    }
    if let Some(v) = m.complement_representation.as_ref().and_then(|o| o.violation.as_ref()) {
        parts.push(format!("orthogonality {v:?}"));
    }
    if let Some(n) = &m.nearly_orthogonal {
        if let Some(t) = n.triple {
            parts.push(format!("non-orthogonal triple {t:?}"));
        }
        if let Some(v) = n.self_orthogonal {
            parts.push(format!("self-orthogonal vector {v}"));
        }
    }
    if let Some(e) = m.vector_coloring.as_ref().and_then(|v| v.violation) {
        parts.push(format!("edge {e:?} with 4|A△B| < 3d"));
    }
    if parts.is_empty() {
        c.notes.join("; ")
    } else {
        parts.join("; ")
    }
}
