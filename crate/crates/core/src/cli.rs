//! The `gind` command line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 semantic input error, 3 parse
//! error (unreadable file, malformed JSON, bad arguments).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{Algebra, Representation};
use crate::corpus::{write_corpus, CORPUS_ENV};
use crate::error::Error;
use crate::groupoid::{GroupoidDocument, LoadedGroupoid};
use crate::induction::{full_regular_representation, InductionChain};
use crate::spectrum::{
    group_irreps, harness_rows, irrep_label, main_theorem_check, stability_algebra, HarnessRow, DEFAULT_SEED,
};
use crate::tolerance::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SEMANTIC: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "gind", version, about = "Induced representations of finite groupoid algebras")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Relative cutoff for null Gram eigenvalues.
    #[arg(long, global = true, default_value_t = Tolerances::default().null_tol, value_parser = positive)]
    pub null_tol: f64,
    /// Relative singular-value cutoff for commutant rank decisions.
    #[arg(long, global = true, default_value_t = Tolerances::default().rank_tol, value_parser = positive)]
    pub rank_tol: f64,
    /// Bound on transfer and stages residuals.
    #[arg(long, global = true, default_value_t = Tolerances::default().residual_tol, value_parser = positive)]
    pub residual_tol: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

fn chain_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((h, k)) if !h.is_empty() && !k.is_empty() && !k.contains(',') => Ok((h.into(), k.into())),
        _ => Err(format!("expected `H,K`, got `{s}`")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a definition file: groupoid axioms, Haar block, subgroupoids.
    Validate { file: PathBuf },
    /// Induce an irreducible of a stability group and test irreducibility.
    Induce {
        file: PathBuf,
        /// Unit, by element name or point label.
        #[arg(long)]
        unit: String,
        /// Index into the irreducibles of the stability group.
        #[arg(long, conflicts_with = "rep", required_unless_present = "rep")]
        irrep: Option<usize>,
        /// Representation file for the stability group.
        #[arg(long)]
        rep: Option<PathBuf>,
    },
    /// Compare Ind_H^G L with Ind_K^G(Ind_H^K L).
    Stages {
        file: PathBuf,
        /// `H,K` with H ⊆ K, by subgroupoid name.
        #[arg(long, value_parser = chain_pair)]
        chain: (String, String),
        /// Representation of H; defaults to the sum of its regular representations.
        #[arg(long)]
        rep: Option<PathBuf>,
    },
    /// Run the induction check over every definition file in a directory.
    Harness {
        #[arg(env = CORPUS_ENV, default_value = "corpus")]
        dir: PathBuf,
    },
    /// Write the built-in corpus as definition files.
    Corpus {
        #[arg(long)]
        out: PathBuf,
    },
}

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances { null_tol: self.null_tol, rank_tol: self.rank_tol, residual_tol: self.residual_tol }
    }
}

enum Failure {
    Parse(String),
    Semantic(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(_) | Error::Io(_) => Failure::Parse(e.to_string()),
            _ => Failure::Semantic(e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<LoadedGroupoid, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let doc = GroupoidDocument::from_json(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    Ok(doc.build()?)
}

fn read_rep(path: &Path, alg: &std::sync::Arc<Algebra>) -> Result<Representation, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let rep = Representation::from_json(alg, &value)?;
    rep.ensure_valid()?;
    Ok(rep)
}

fn emit(out: &mut dyn Write, format: Format, value: &impl Serialize, table: impl FnOnce() -> String) {
    let text = match format {
        Format::Json => {
            let v = serde_json::to_value(value).expect("report serializes");
            serde_json::to_string_pretty(&v).expect("report serializes")
        }
        Format::Table => table(),
    };
    let _ = writeln!(out, "{text}");
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => EXIT_PARSE,
            };
        }
    };
    match dispatch(&config, out) {
        Ok(code) => code,
        Err(Failure::Parse(m)) => {
            let _ = writeln!(err, "parse error: {m}");
            EXIT_PARSE
        }
        Err(Failure::Semantic(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_SEMANTIC
        }
    }
}

fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let tol = config.tolerances();
    match &config.command {
        Command::Validate { file } => {
            let loaded = load(file)?;
            let g = &loaded.groupoid;
            let report = json!({
                "file": file.display().to_string(),
                "groupoid": loaded.name,
                "elements": g.len(),
                "units": g.units().iter().map(|&u| g.unit_display(u)).collect::<Vec<_>>(),
                "haar": if !loaded.haar_given { "counting" } else if loaded.haar.is_exact() { "exact" } else { "float" },
                "subgroupoids": loaded.named.keys().collect::<Vec<_>>(),
                "valid": true,
            });
            emit(out, config.format, &report, || {
                format!(
                    "{}: valid groupoid `{}` ({} elements, {} units, {} Haar system)",
                    file.display(),
                    loaded.name,
                    g.len(),
                    g.units().len(),
                    report["haar"].as_str().unwrap()
                )
            });
            Ok(EXIT_OK)
        }
        Command::Induce { file, unit, irrep, rep } => {
            let loaded = load(file)?;
            let alg = Algebra::new(loaded.groupoid.clone(), loaded.haar.clone())?;
            let u = loaded.groupoid.resolve_unit(unit)?;
            let (_, h_alg) = stability_algebra(&alg, u)?;
            let (label, l) = match (irrep, rep) {
                (Some(k), _) => {
                    let set = group_irreps(&h_alg, config.seed, tol.rank_tol)?;
                    let l = set.irreps.get(*k).cloned().ok_or_else(|| {
                        Failure::Semantic(format!("no irreducible with index {k} ({} available)", set.irreps.len()))
                    })?;
                    (irrep_label(*k), l)
                }
                (None, Some(path)) => (path.display().to_string(), read_rep(path, &h_alg)?),
                (None, None) => unreachable!("clap requires one of --irrep/--rep"),
            };
            let mut verdict = main_theorem_check(&alg, u, &l, &tol, config.seed)?;
            verdict.groupoid = loaded.name.clone();
            verdict.irrep_label = label;
            emit(out, config.format, &verdict, || {
                format!(
                    "groupoid {}  unit {}  {} (dim {})\n  induced_dim       {}\n  commutant_dim     {}\n  xind_commutant    {}\n  irreducible       {}\n  transfer_residual {:.3e}\n  i_norm_bound      {}\n  verdict           {}",
                    verdict.groupoid,
                    verdict.unit,
                    verdict.irrep_label,
                    verdict.irrep_dim,
                    verdict.induced_dim,
                    verdict.commutant_dim,
                    verdict.xind_commutant_dim,
                    verdict.commutant_dim == 1,
                    verdict.transfer_residual,
                    if verdict.i_norm_ok { "ok" } else { "violated" },
                    if verdict.pass { "PASS" } else { "FAIL" },
                )
            });
            Ok(if verdict.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Stages { file, chain, rep } => {
            let loaded = load(file)?;
            let alg = Algebra::new(loaded.groupoid.clone(), loaded.haar.clone())?;
            let (h_name, k_name) = chain;
            let h = loaded.subgroupoid(h_name)?;
            let k = loaded.subgroupoid(k_name)?;
            let alpha = loaded.haar.restrict(&h);
            let ch = InductionChain::new(alg, h, k, alpha)?;
            let h_alg = ch.direct().h_algebra().clone();
            let l = match rep {
                Some(path) => read_rep(path, &h_alg)?,
                None => full_regular_representation(&h_alg)?,
            };
            let report = ch.stages_check(&l, tol.null_tol)?;
            let pass = report.passes(tol.residual_tol);
            let value = json!({
                "groupoid": loaded.name,
                "chain": [h_name, k_name],
                "inducing_dim": l.dim(),
                "report": report,
                "pass": pass,
                "seed": config.seed,
                "tolerances": tol,
            });
            emit(out, config.format, &value, || {
                format!(
                    "groupoid {}  chain {h_name} ⊆ {k_name} ⊆ G  (dim L = {})\n  dim Ind_H^G L         {}\n  dim Ind_K^G Ind_H^K L {}\n  unitarity_defect      {:.3e}\n  intertwining_residual {:.3e}\n  verdict               {}",
                    loaded.name,
                    l.dim(),
                    report.direct_dim,
                    report.staged_dim,
                    report.unitarity_defect,
                    report.intertwining_residual,
                    if pass { "PASS" } else { "FAIL" }
                )
            });
            Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Harness { dir } => harness(dir, config, out),
        Command::Corpus { out: dir } => {
            let written = write_corpus(dir)?;
            let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
            emit(out, config.format, &json!({ "written": files }), || files.join("\n"));
            Ok(EXIT_OK)
        }
    }
}

#[derive(Debug, Serialize)]
struct FileError {
    file: String,
    error: String,
}

fn harness(dir: &Path, config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let tol = config.tolerances();
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::Parse(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();

    let mut rows: Vec<(String, HarnessRow)> = Vec::new();
    let mut file_errors = Vec::new();
    let mut parse_failed = false;
    for path in &files {
        let file = path.file_name().unwrap().to_string_lossy().into_owned();
        match load(path) {
            Ok(loaded) => rows.extend(harness_rows(&loaded, &tol, config.seed).into_iter().map(|r| (file.clone(), r))),
            Err(Failure::Parse(m)) => {
                parse_failed = true;
                file_errors.push(FileError { file, error: m });
            }
            Err(Failure::Semantic(m)) => file_errors.push(FileError { file, error: m }),
        }
    }
    let failed = rows.iter().filter(|(_, r)| !r.pass()).count();
    let value = json!({
        "directory": dir.display().to_string(),
        "rows": rows.iter().map(|(f, r)| json!({"file": f, "row": r})).collect::<Vec<_>>(),
        "file_errors": file_errors,
        "passed": rows.len() - failed,
        "failed": failed,
        "seed": config.seed,
        "tolerances": tol,
    });
    emit(out, config.format, &value, || {
        let mut s = format!(
            "{:<16} {:<12} {:<8} {:>4} {:>4} {:>5} {:>5} {:>10}  {}\n",
            "file", "unit", "irrep", "dimL", "ind", "comm", "xcomm", "transfer", "result"
        );
        for (f, r) in &rows {
            match &r.verdict {
                Some(v) => {
                    s += &format!(
                        "{:<16} {:<12} {:<8} {:>4} {:>4} {:>5} {:>5} {:>10.2e}  {}\n",
                        f,
                        v.unit,
                        v.irrep_label,
                        v.irrep_dim,
                        v.induced_dim,
                        v.commutant_dim,
                        v.xind_commutant_dim,
                        v.transfer_residual,
                        if v.pass { "PASS" } else { "FAIL" }
                    )
                }
                None => {
                    s += &format!(
                        "{:<16} {:<12} {:<8} error: {}\n",
                        f,
                        r.unit,
                        r.irrep_label,
                        r.error.as_deref().unwrap_or("")
                    )
                }
            }
        }
        for e in &file_errors {
            s += &format!("{:<16} flagged: {}\n", e.file, e.error);
        }
        s += &format!(
            "{} rows, {} passed, {} failed, {} files flagged (seed {})",
            rows.len(),
            rows.len() - failed,
            failed,
            file_errors.len(),
            config.seed
        );
        s
    });
    Ok(if failed > 0 {
        EXIT_CHECK_FAILED
    } else if parse_failed {
        EXIT_PARSE
    } else if !file_errors.is_empty() {
        EXIT_SEMANTIC
    } else {
        EXIT_OK
    })
}
