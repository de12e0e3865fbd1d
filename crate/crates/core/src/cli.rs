//! Subcommand implementations behind the `qmds` binary.
//!
//! Each command writes its report to a caller-supplied writer and returns
//! the process exit code: 0 on success, 1 on a mathematical failure, 2 on a
//! usage or parse error.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::construct::{construct_with, CaseTag};
use crate::error::Error;
use crate::format::{certificate_json, certificate_text, parse_matrix, write_matrix, MatrixMeta, EXPERIMENTAL_MARKER};
use crate::gf::{make_field, make_field_experimental, FieldCtx};
use crate::partition::{build_partition, check_norm_sum, check_pair_norm_identity, norm_fibre_sizes};
use crate::search::{search, SearchConfig, SearchMode, DEFAULT_MAX_CANDIDATES};
use crate::verify::{certify, QuantumParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qmds", version, about = "Hermitian self-orthogonal [n,2,n-1] codes and [[n,n-4,3]]_q quantum MDS codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the matrix for one length and certify it.
    Construct(ConstructArgs),
    /// Certify a matrix file.
    Verify(VerifyArgs),
    /// Construct and certify every length 4..=q^2+1.
    Sweep(SweepArgs),
    /// Self-test the norm identities for one field.
    Lemmas(FieldArgs),
    /// Search for codes exhaustively or at random.
    Search(SearchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Randomized,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub n: usize,
    /// Matrix file path; the certificate goes next to it with a `.cert` suffix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub allow_even_q: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub allow_even_q: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
    pub max_candidates: u64,
    /// Directory for the matrices found.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let code = match &cli.command {
        Command::Construct(a) => cmd_construct(a, out, err),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Lemmas(a) => cmd_lemmas(a, out, err),
        Command::Search(a) => cmd_search(a, out, err),
    };
    code.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_FAIL
    })
}

fn usage(err: &mut dyn Write, e: impl std::fmt::Display) -> io::Result<i32> {
    writeln!(err, "usage error: {e}")?;
    Ok(EXIT_USAGE)
}

/// Builds the field for an odd-characteristic command.
fn field_or_exit(p: u32, r: u32, err: &mut dyn Write) -> io::Result<Result<FieldCtx, i32>> {
    match make_field(p, r) {
        Ok(ctx) => Ok(Ok(ctx)),
        Err(e @ Error::EvenCharacteristic(_)) => {
            writeln!(err, "error: {e}")?;
            Ok(Err(EXIT_FAIL))
        }
        Err(e) => usage(err, e).map(Err),
    }
}

fn cert_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".cert");
    PathBuf::from(s)
}

pub fn cmd_construct(a: &ConstructArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let ctx = match field_or_exit(a.field.p, a.field.r, err)? {
        Ok(ctx) => ctx,
        Err(code) => return Ok(code),
    };
    let part = match build_partition(&ctx) {
        Ok(p) => p,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FAIL);
        }
    };
    let c = match construct_with(&ctx, &part, a.n) {
        Ok(c) => c,
        Err(e @ Error::LengthOutOfRange { .. }) => return usage(err, e),
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FAIL);
        }
    };
    for note in &c.notes {
        writeln!(err, "note: {note}")?;
    }
    let meta = Some(MatrixMeta {
        case: c.case,
        repaired: c.repaired,
    });
    let cert = certify(&ctx, &c.matrix);
    let matrix_text = write_matrix(&ctx, &c.matrix, meta);
    let cert_text = match a.field.format {
        Format::Machine => certificate_json(&cert, meta),
        Format::Text => certificate_text(&cert, meta),
    };
    match &a.out {
        Some(path) => {
            fs::write(path, &matrix_text)?;
            fs::write(cert_path(path), &cert_text)?;
            writeln!(out, "wrote {} and {}", path.display(), cert_path(path).display())?;
        }
        None => {
            out.write_all(matrix_text.as_bytes())?;
            out.write_all(cert_text.as_bytes())?;
        }
    }
    Ok(if cert.passes() { EXIT_OK } else { EXIT_FAIL })
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let text = match fs::read_to_string(&a.file) {
        Ok(t) => t,
        Err(e) => return usage(err, format!("{}: {e}", a.file.display())),
    };
    let parsed = match parse_matrix(&text) {
        Ok(p) => p,
        Err(e) => return usage(err, e),
    };
    if parsed.p == 2 && !a.allow_even_q {
        return usage(err, "even characteristic files need --allow-even-q");
    }
    let (ctx, m) = match parsed.load(a.allow_even_q) {
        Ok(v) => v,
        Err(e) => return usage(err, e),
    };
    let cert = certify(&ctx, &m);
    let doc = match a.format {
        Format::Machine => certificate_json(&cert, parsed.meta),
        Format::Text => certificate_text(&cert, parsed.meta),
    };
    out.write_all(doc.as_bytes())?;
    Ok(if cert.passes() { EXIT_OK } else { EXIT_FAIL })
}

/// One length of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub case: String,
    pub repaired: bool,
    pub pass: bool,
    pub oracle_agreement: &'static str,
    pub quantum: Option<QuantumParams>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepTotals {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub p: u32,
    pub r: u32,
    pub q: u32,
    pub rows: Vec<SweepRow>,
    pub totals: SweepTotals,
    pub wall: Duration,
}

impl SweepReport {
    pub fn tags(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.case.as_str()).collect()
    }
}

fn sweep_row(ctx: &FieldCtx, part: &crate::partition::StandardPartition, n: usize) -> SweepRow {
    match construct_with(ctx, part, n) {
        Ok(c) => {
            let cert = certify(ctx, &c.matrix);
            SweepRow {
                n,
                case: c.case.label(),
                repaired: c.repaired,
                pass: cert.passes() && cert.quantum.is_some_and(|q| q.mds),
                oracle_agreement: cert.oracle.as_str(),
                quantum: cert.quantum,
                error: None,
            }
        }
        Err(e) => SweepRow {
            n,
            case: match &e {
                Error::ConstructionFailed { case, .. } | Error::NormTargetZero { case, .. } => case.label(),
                _ => "none".into(),
            },
            repaired: false,
            pass: false,
            oracle_agreement: "skipped",
            quantum: None,
            error: Some(e.to_string()),
        },
    }
}

/// Constructs and certifies every length, `jobs` at a time, handing rows
/// to `emit` in increasing n as soon as each prefix is complete.
pub fn run_sweep(ctx: &FieldCtx, jobs: usize, mut emit: impl FnMut(&SweepRow)) -> Result<SweepReport, Error> {
    let start = Instant::now();
    let part = build_partition(ctx)?;
    let lengths: Vec<usize> = (4..=ctx.order() as usize + 1).collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<SweepRow>();
    let mut rows = Vec::with_capacity(lengths.len());
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1) {
            let tx = tx.clone();
            let (next, lengths, part) = (&next, &lengths, &part);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&n) = lengths.get(i) else { break };
                if tx.send(sweep_row(ctx, part, n)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        let mut want = 4;
        for row in rx {
            pending.insert(row.n, row);
            while let Some(row) = pending.remove(&want) {
                emit(&row);
                rows.push(row);
                want += 1;
            }
        }
    });
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(SweepReport {
        p: ctx.p(),
        r: ctx.r(),
        q: ctx.q(),
        totals: SweepTotals {
            rows: rows.len(),
            passed,
            failed: rows.len() - passed,
        },
        rows,
        wall: start.elapsed(),
    })
}

#[derive(Serialize)]
struct SweepHeader {
    kind: &'static str,
    p: u32,
    r: u32,
    q: u32,
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    kind: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

fn text_row(row: &SweepRow) -> String {
    let quantum = row
        .quantum
        .map(|q| format!("{q}{}", if q.mds { " MDS" } else { "" }))
        .unwrap_or_else(|| row.error.clone().unwrap_or_else(|| "-".into()));
    format!(
        "{:>6}  {:<14} {:<8} {:<6} {:<8} {}",
        row.n,
        row.case,
        if row.repaired { "yes" } else { "no" },
        if row.pass { "PASS" } else { "FAIL" },
        row.oracle_agreement,
        quantum
    )
}

/// Writes a full sweep report in the chosen format. The machine format is
/// one JSON object per line and carries no timing, so equal inputs give
/// identical bytes.
pub fn write_sweep(ctx: &FieldCtx, jobs: usize, format: Format, out: &mut dyn Write) -> io::Result<SweepReport> {
    match format {
        Format::Machine => {
            let header = SweepHeader {
                kind: "sweep",
                p: ctx.p(),
                r: ctx.r(),
                q: ctx.q(),
            };
            writeln!(out, "{}", serde_json::to_string(&header)?)?;
        }
        Format::Text => {
            writeln!(out, "sweep over GF({}^2), p={} r={}, n = 4..={}", ctx.q(), ctx.p(), ctx.r(), ctx.order() + 1)?;
            writeln!(out, "{:>6}  {:<14} {:<8} {:<6} {:<8} quantum", "n", "case", "repaired", "result", "oracle")?;
        }
    }
    let mut io_err = None;
    let report = run_sweep(ctx, jobs, |row| {
        if io_err.is_some() {
            return;
        }
        let line = match format {
            Format::Machine => serde_json::to_string(&Tagged { kind: "row", body: row }).expect("row serializes"),
            Format::Text => text_row(row),
        };
        if let Err(e) = writeln!(out, "{line}") {
            io_err = Some(e);
        }
    })
    .map_err(|e| io::Error::other(e.to_string()))?;
    if let Some(e) = io_err {
        return Err(e);
    }
    match format {
        Format::Machine => {
            let totals = Tagged {
                kind: "totals",
                body: &report.totals,
            };
            writeln!(out, "{}", serde_json::to_string(&totals)?)?;
        }
        Format::Text => {
            writeln!(
                out,
                "rows {}  passed {}  failed {}  wall {:.3}s",
                report.totals.rows,
                report.totals.passed,
                report.totals.failed,
                report.wall.as_secs_f64()
            )?;
        }
    }
    Ok(report)
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let ctx = match field_or_exit(a.field.p, a.field.r, err)? {
        Ok(ctx) => ctx,
        Err(code) => return Ok(code),
    };
    if a.jobs == 0 {
        return usage(err, "--jobs must be at least 1");
    }
    let report = match &a.out {
        Some(path) => {
            let mut file = io::BufWriter::new(fs::File::create(path)?);
            let report = write_sweep(&ctx, a.jobs, a.field.format, &mut file)?;
            file.flush()?;
            writeln!(out, "wrote {} ({} rows)", path.display(), report.totals.rows)?;
            report
        }
        None => write_sweep(&ctx, a.jobs, a.field.format, out)?,
    };
    for row in report.rows.iter().filter(|r| !r.pass) {
        writeln!(err, "failed: n = {} case {} {}", row.n, row.case, row.error.as_deref().unwrap_or(""))?;
    }
    Ok(if report.totals.failed == 0 { EXIT_OK } else { EXIT_FAIL })
}

/// Verdicts of the norm self-tests for one field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub p: u32,
    pub r: u32,
    pub q: u32,
    /// `(beta, number of norm preimages)` for every beta in GF(q)*.
    pub fibres: Vec<(u32, usize)>,
    pub fibres_ok: bool,
    pub norm_sum_zero: bool,
    pub pair_identity_zero: bool,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.fibres_ok && self.norm_sum_zero && self.pair_identity_zero
    }
}

pub fn lemma_report(ctx: &FieldCtx) -> Result<LemmaReport, Error> {
    let part = build_partition(ctx)?;
    let fibres: Vec<(u32, usize)> = norm_fibre_sizes(ctx)
        .into_iter()
        .map(|(b, c)| (b.encoding(), c))
        .collect();
    let q = ctx.q() as usize;
    let fibres_ok = fibres.len() == q - 1
        && fibres.iter().all(|&(b, c)| {
            c == q + 1 && ctx.element(b).and_then(|e| ctx.norm_preimages(e)).map(|v| v.len()) == Ok(q + 1)
        });
    Ok(LemmaReport {
        p: ctx.p(),
        r: ctx.r(),
        q: ctx.q(),
        fibres,
        fibres_ok,
        norm_sum_zero: check_norm_sum(ctx),
        pair_identity_zero: check_pair_norm_identity(ctx, &part),
    })
}

pub fn cmd_lemmas(a: &FieldArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let ctx = match field_or_exit(a.p, a.r, err)? {
        Ok(ctx) => ctx,
        Err(code) => return Ok(code),
    };
    let report = match lemma_report(&ctx) {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FAIL);
        }
    };
    let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
    match a.format {
        Format::Machine => writeln!(out, "{}", serde_json::to_string(&report)?)?,
        Format::Text => {
            writeln!(out, "GF({}^2), p={} r={}", report.q, report.p, report.r)?;
            for &(b, c) in &report.fibres {
                writeln!(out, "  norm preimages of {b}: {c}")?;
            }
            writeln!(out, "norm fibres have q+1 = {} elements   {}", report.q + 1, verdict(report.fibres_ok))?;
            writeln!(out, "sum of all nonzero norms is 0        {}", verdict(report.norm_sum_zero))?;
            writeln!(out, "pair norm identity is 0              {}", verdict(report.pair_identity_zero))?;
        }
    }
    Ok(if report.all_hold() { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct SearchSummary<'a> {
    p: u32,
    r: u32,
    n: usize,
    mode: &'static str,
    seed: u64,
    candidates: u64,
    found: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    experimental: Option<&'a str>,
}

pub fn cmd_search(a: &SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    if a.field.p == 2 && !a.allow_even_q {
        return usage(err, "even characteristic search needs --allow-even-q");
    }
    let ctx = match make_field_experimental(a.field.p, a.field.r) {
        Ok(c) => c,
        Err(e) => return usage(err, e),
    };
    let config = SearchConfig {
        mode: match a.mode {
            Mode::Exhaustive => SearchMode::Exhaustive,
            Mode::Randomized => SearchMode::Randomized,
        },
        n: a.n,
        max_candidates: a.max_candidates,
        seed: a.seed,
        allow_even_q: a.allow_even_q,
        edit_budget: 0,
        reverse_order: false,
    };
    let start = Instant::now();
    let outcome = match search(&ctx, &config) {
        Ok(o) => o,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FAIL);
        }
    };
    writeln!(err, "search took {:.3}s", start.elapsed().as_secs_f64())?;

    let summary = SearchSummary {
        p: ctx.p(),
        r: ctx.r(),
        n: a.n,
        mode: match a.mode {
            Mode::Exhaustive => "exhaustive",
            Mode::Randomized => "randomized",
        },
        seed: a.seed,
        candidates: outcome.candidates,
        found: outcome.matrices.len(),
        experimental: outcome.experimental.then_some(EXPERIMENTAL_MARKER),
    };
    match a.field.format {
        Format::Machine => writeln!(out, "{}", serde_json::to_string(&summary)?)?,
        Format::Text => {
            writeln!(
                out,
                "{} search over GF({}^2), n = {}: {} candidates, {} found",
                summary.mode,
                ctx.q(),
                a.n,
                summary.candidates,
                summary.found
            )?;
            if outcome.experimental {
                writeln!(out, "note: {EXPERIMENTAL_MARKER}")?;
            }
        }
    }
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let width = outcome.matrices.len().max(1).to_string().len();
            for (i, m) in outcome.matrices.iter().enumerate() {
                fs::write(dir.join(format!("match_{i:0width$}.txt")), write_matrix(&ctx, m, None))?;
            }
        }
        None => {
            for m in &outcome.matrices {
                out.write_all(write_matrix(&ctx, m, None).as_bytes())?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Tags that should fire somewhere in a characteristic-3 sweep with q >= 9.
pub fn char3_tags() -> Vec<String> {
    CaseTag::CHAR3.iter().map(|t| t.label()).collect()
}

/// Tags that should fire somewhere across sweeps with p >= 5.
pub fn general_tags() -> Vec<String> {
    CaseTag::GENERAL.iter().map(|t| t.label()).collect()
}
