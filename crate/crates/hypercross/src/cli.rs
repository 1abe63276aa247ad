//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when a computed verdict or bound fails, 1 on
//! usage or numerical errors.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hypercross_core::hypercross::{eps_dimension, materialize, verify_bounds, CrossParams};
use hypercross_core::pde::study::{default_c, StudyReport};
use hypercross_core::summability::{classify, sum_powers, Verdict};
use hypercross_core::tensorfield::check_projection_lemma;
use serde_json::{json, Value};

use crate::drivers::{self, DecayVersion};
use crate::formats::{self, interval_json, multiindex_to_json};

/// Spectral window accepted by the study summaries.
pub const SLOPE_WINDOW: (f64, f64) = (-1.3, -0.7);

#[derive(Debug, Parser)]
#[command(
    name = "hypercross",
    version,
    about = "Infinite-dimensional hyperbolic crosses and sparse parametric Galerkin studies"
)]
pub struct Cli {
    /// Worker threads; falls back to HYPERCROSS_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decides whether the factorial weights of a sequence lie in l_p.
    Summability {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact cardinality of E_{a,b}(T) with its closed-form bounds.
    Card {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        m: u32,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket of the eps-dimension of A^{alpha,b} in K^beta.
    Epsdim {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes E_{a,b}(T) as JSON lines.
    Materialize {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        m: u32,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates both sides of the truncation error bound for a field.
    ProjectCheck {
        #[arg(long)]
        field: PathBuf,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fourier Galerkin convergence for a problem without parameters.
    SpatialStudy {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "Ts", value_delimiter = ',')]
        ts: Vec<f64>,
        #[arg(long, default_value_t = 1024)]
        modes: u64,
        /// CSV table; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Stochastic Galerkin convergence on E_{1,b}(T) with b = c d.
    PdeStudy {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "Ts", value_delimiter = ',')]
        ts: Vec<f64>,
        /// The c_j; defaults to 1 + j^(-1.1).
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
        #[arg(long, default_value_t = 512)]
        modes: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Compares Legendre coefficient norms with their factorial bound.
    DecayCheck {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = DecayVersion::V)]
        version: DecayVersion,
        #[arg(long, default_value_t = 512)]
        modes: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
        }
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json(out: &Option<PathBuf>, v: &Value) -> Result<()> {
    let mut w = sink(out)?;
    writeln!(w, "{}", serde_json::to_string_pretty(v)?)?;
    w.flush()?;
    Ok(())
}

/// `T,n,error_V,bound,slope_so_far`.
pub fn write_study_csv(report: &StudyReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T", "n", "error_V", "bound", "slope_so_far"])?;
    for r in &report.rows {
        w.write_record([
            r.t.to_string(),
            r.n.to_string(),
            r.error.to_string(),
            r.bound.to_string(),
            r.slope_so_far.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn study_summary(report: &StudyReport) -> Value {
    let in_window = report.slope >= SLOPE_WINDOW.0 && report.slope <= SLOPE_WINDOW.1;
    json!({
        "constant": report.constant,
        "slope": report.slope,
        "slope_in_window": in_window,
        "bounds_hold": report.bounds_hold,
    })
}

fn finish_study(
    report: &StudyReport,
    out: &Option<PathBuf>,
    summary: &Option<PathBuf>,
    extra: Value,
) -> Result<Status> {
    write_study_csv(report, sink(out)?)?;
    let mut s = study_summary(report);
    if let (Value::Object(map), Value::Object(more)) = (&mut s, extra) {
        map.extend(more);
    }
    match summary {
        Some(_) => emit_json(summary, &s)?,
        None => eprintln!("{s}"),
    }
    Ok(Status::from_ok(report.bounds_hold))
}

fn read_path_sequence(p: &Path) -> Result<hypercross_core::WeightSequence> {
    formats::read_sequence(p)
}

/// Runs one parsed command.
pub fn execute(cmd: &Command) -> Result<Status> {
    match cmd {
        Command::Summability { p, seq, tol, out } => {
            let b = read_path_sequence(seq)?;
            let c = classify(*p, &b)?;
            let (sum, note) = match c.verdict {
                Verdict::Summable => match sum_powers(*p, &b, *tol) {
                    Ok(i) => (interval_json(&i), Value::Null),
                    Err(e) => (Value::Null, Value::from(format!("summable, not enumerable with level bound: {e}"))),
                },
                _ => (Value::Null, Value::Null),
            };
            let v = json!({
                "verdict": format!("{:?}", c.verdict),
                "rule": c.rule.tag(),
                "p": c.p,
                "l1": interval_json(&c.l1),
                "lp": interval_json(&c.lp),
                "sum": sum,
                "note": note,
            });
            emit_json(out, &v)?;
            Ok(Status::from_ok(c.verdict == Verdict::Summable))
        }
        Command::Card { a, m, t, seq, tol, out } => {
            let params = CrossParams::new(*a, *m, *t, read_path_sequence(seq)?);
            let r = verify_bounds(&params, *tol)?;
            let v = json!({
                "exact": r.count,
                "lower": r.lower,
                "constant": interval_json(&r.constant),
                "upper": r.upper,
                "lower_holds": r.lower_holds,
                "upper_holds": r.upper_holds,
            });
            emit_json(out, &v)?;
            Ok(Status::from_ok(r.lower_holds && r.upper_holds))
        }
        Command::Epsdim { alpha, beta, m, eps, seq, tol, out } => {
            let e = eps_dimension(*alpha, *beta, *m, &read_path_sequence(seq)?, *eps, *tol)?;
            let holds = e.closed_lower <= e.upper as f64 && e.upper as f64 <= e.closed_upper;
            let v = json!({
                "lower": e.lower,
                "upper": e.upper,
                "closed_lower": e.closed_lower,
                "closed_upper": e.closed_upper,
                "bounds_hold": holds,
            });
            emit_json(out, &v)?;
            Ok(Status::from_ok(holds))
        }
        Command::Materialize { a, m, t, seq, cap, out } => {
            let params = CrossParams::new(*a, *m, *t, read_path_sequence(seq)?);
            let set = materialize(&params, *cap)?;
            let mut w = sink(out)?;
            formats::write_pairs(&set.pairs, &mut w)?;
            w.flush()?;
            if set.truncated {
                eprintln!("warning: the index set was truncated by caps");
            }
            Ok(Status::Pass)
        }
        Command::ProjectCheck { field, t, alpha, beta, seq, out } => {
            let file = File::open(field).with_context(|| format!("opening {}", field.display()))?;
            let v = formats::read_field(BufReader::new(file))?;
            let r = check_projection_lemma(&v, *t, *alpha, *beta, &read_path_sequence(seq)?)?;
            emit_json(out, &json!({"lhs": r.lhs, "rhs": r.rhs, "ok": r.ok}))?;
            Ok(Status::from_ok(r.ok))
        }
        Command::SpatialStudy { spec, ts, modes, out, summary } => {
            let sp = formats::read_problem(spec)?;
            let report = drivers::run_spatial_study(&sp, ts, *modes, &drivers::study_options())?;
            finish_study(&report, out, summary, json!({}))
        }
        Command::PdeStudy { spec, ts, c, modes, out, summary } => {
            let sp = formats::read_problem(spec)?;
            let c = c.clone().unwrap_or_else(|| default_c(sp.parametric_dimension()));
            let st = drivers::run_pde_study(&sp, &c, ts, *modes, &drivers::study_options())?;
            let extra = json!({
                "b": st.bound.b.head(),
                "K": st.bound.decay.k,
                "d": st.bound.decay.d,
                "c_inverse_norm": st.bound.c_inverse_norm,
                "cardinality_constant": st.bound.cardinality_constant,
                "nodes_per_dim": st.reference.design.nodes_per_dim,
            });
            finish_study(&st.report, out, summary, extra)
        }
        Command::DecayCheck { spec, degree, version, modes, out } => {
            let sp = formats::read_problem(spec)?;
            let (decay, rows) = drivers::run_decay_check(&sp, *degree, *version, *modes, &drivers::study_options())?;
            let ok = rows.iter().all(|r| r.ratio <= 1.0);
            let list: Vec<Value> = rows
                .iter()
                .map(|r| json!({"s": multiindex_to_json(&r.s), "norm": r.norm, "bound": r.bound, "ratio": r.ratio}))
                .collect();
            emit_json(out, &json!({"K": decay.k, "d": decay.d, "rows": list, "all_within": ok}))?;
            Ok(Status::from_ok(ok))
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = drivers::thread_count(cli.threads).and_then(|n| drivers::with_threads(n, || execute(&cli.command))?);
    match outcome {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
