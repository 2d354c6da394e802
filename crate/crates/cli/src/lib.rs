//! Verification campaigns: argument parsing, batch fan-out over a worker
//! pool, and deterministic report assembly.
//!
//! Exit codes separate failure kinds: 0 when every requested verification
//! passed, 1 when a verification ran and the mathematics failed (a red-alert
//! regression), 2 for usage and domain errors — including batches where
//! every item had to be skipped.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use normal_core::certificate::NormalityCertificate;
use normal_core::criterion::{cor23_exponent, thm31_exponent, thm32_exponent};
use normal_core::cyclotomic::CyclotomicElement;
use normal_core::elements::{
    cos_half_element, cos_plus_one_element, sqrt_minus_t, DEGENERATE_LEVELS,
};
use normal_core::error::Error;
use normal_core::galois::{GaloisGroup, GroupMode};
use normal_core::modular::{verify_lemma42, verify_thm44};
use normal_core::normality::{composite_normal_check, is_completely_normal_power, NormalityEvidence};
use normal_core::rational::rat;

pub const SCHEMA: &str = "verify-report/1";

#[derive(Parser, Debug)]
#[command(
    name = "verify",
    version,
    about = "Exact verification of completely normal field elements",
    after_help = "Batch items run on a worker pool; set VERIFY_WORKERS to bound its size."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Completely normal powers of explicit real-cyclotomic elements
    Cyclotomic(CyclotomicArgs),
    /// Gauss-sum composites, normal over the full cyclotomic Galois group
    Composite(CompositeArgs),
    /// Discriminant-quotient product identity and valuation certificates
    Modular(ModularArgs),
}

#[derive(Args, Debug)]
pub struct CyclotomicArgs {
    /// level l, or an inclusive range like 5..16
    #[arg(long)]
    pub ell: String,
    #[arg(long, value_enum)]
    pub construction: Construction,
    /// coefficient a of a*x + b (ax-plus-b only; needs |a| > 2|b|)
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<i64>,
    /// coefficient b of a*x + b (ax-plus-b only; nonzero)
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<i64>,
    /// exponent m >= 1, or "auto" for the minimal certified exponent
    #[arg(long, default_value = "auto")]
    pub exponent: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CompositeArgs {
    /// t = 4 or an odd prime congruent to 3 mod 4; ranges allowed
    #[arg(long)]
    pub t: String,
    /// level l outside {1, 2, 3, 4, 6}; ranges allowed
    #[arg(long)]
    pub ell: String,
    /// exponent m >= 1, or "auto" for the closed-form exponent at level t*l
    #[arg(long, default_value = "auto")]
    pub exponent: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ModularArgs {
    /// level N >= 2, or an inclusive range like 2..8
    #[arg(long)]
    pub level: String,
    /// compare q-expansion coefficients below this exponent
    #[arg(long, default_value_t = 40)]
    pub truncation: i64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// write the report to this path instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    CosPlusOne,
    CosHalf,
    AxPlusB,
}

impl Construction {
    pub fn label(self) -> &'static str {
        match self {
            Construction::CosPlusOne => "cos-plus-one",
            Construction::CosHalf => "cos-half",
            Construction::AxPlusB => "ax-plus-b",
        }
    }
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ExponentMode {
    Auto,
    Fixed(u64),
}

/// "5" -> [5]; "5..16" -> [5, 6, ..., 16] (inclusive ends).
pub fn parse_range(spec: &str) -> Result<Vec<u64>, String> {
    let one = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| format!("invalid number `{}` in `{spec}`", s.trim()))
    };
    match spec.split_once("..") {
        Some((lo, hi)) => {
            let lo = one(lo)?;
            let hi = one(hi)?;
            if lo > hi {
                return Err(format!("range `{spec}` is empty"));
            }
            if hi - lo >= 10_000 {
                return Err(format!("range `{spec}` is too large"));
            }
            Ok((lo..=hi).collect())
        }
        None => Ok(vec![one(spec)?]),
    }
}

pub fn parse_exponent(spec: &str) -> Result<ExponentMode, String> {
    if spec == "auto" {
        return Ok(ExponentMode::Auto);
    }
    match spec.parse::<u64>() {
        Ok(m) if m >= 1 => Ok(ExponentMode::Fixed(m)),
        _ => Err(format!("--exponent takes `auto` or an integer >= 1, not `{spec}`")),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Error,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
            Status::Error => "error",
        }
    }
}

#[derive(Debug)]
pub struct ItemReport {
    pub label: String,
    pub status: Status,
    pub note: Option<String>,
    /// extra fields merged into the item's JSON object
    pub detail: Map<String, Value>,
}

impl ItemReport {
    fn skip(label: String, note: String) -> Self {
        ItemReport { label, status: Status::Skip, note: Some(note), detail: Map::new() }
    }

    /// Mathematical failures (the verification ran; the claim is false)
    /// become `fail`; everything else is an operational error.
    fn from_error(label: String, e: &Error) -> Self {
        let status = if e.is_mathematical_failure() { Status::Fail } else { Status::Error };
        ItemReport { label, status, note: Some(e.to_string()), detail: Map::new() }
    }
}

fn worker_count(jobs: usize) -> usize {
    let requested = std::env::var("VERIFY_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w >= 1);
    let fallback = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    requested.unwrap_or(fallback).min(jobs.max(1))
}

/// Fans items out to the pool; the report vector is indexed by input order
/// no matter which worker finishes when.
fn run_parallel<T, F>(items: &[T], f: F) -> Vec<ItemReport>
where
    T: Sync,
    F: Fn(&T) -> ItemReport + Sync,
{
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<ItemReport>>> =
        items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..worker_count(items.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let report = f(&items[i]);
                *slots[i].lock().unwrap() = Some(report);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

// ---------------------------------------------------------------------------
// per-item verification
// ---------------------------------------------------------------------------

fn cyclotomic_item(
    ell: u64,
    construction: Construction,
    a: i64,
    b: i64,
    exponent: ExponentMode,
) -> ItemReport {
    let label = format!("ell={ell}");
    if DEGENERATE_LEVELS.contains(&ell) {
        return ItemReport::skip(
            label,
            format!("level {ell} is degenerate: the real subfield is the rationals"),
        );
    }
    if construction == Construction::CosHalf && ell % 2 == 0 {
        return ItemReport::skip(label, format!("cos(pi/l) needs odd l, got {ell}"));
    }
    match verify_cyclotomic(ell, construction, a, b, exponent) {
        Ok((m, exponent_json, cert)) => {
            let mut detail = Map::new();
            detail.insert("exponent_used".into(), json!(m));
            if let Some(e) = exponent_json {
                detail.insert("exponent".into(), e);
            }
            detail.insert("certificate".into(), cert.to_json());
            let (status, note) = if cert.completely_normal() {
                (Status::Pass, None)
            } else {
                (Status::Fail, Some("exact normality oracles rejected the power".to_string()))
            };
            ItemReport { label, status, note, detail }
        }
        Err(e) => ItemReport::from_error(label, &e),
    }
}

fn verify_cyclotomic(
    ell: u64,
    construction: Construction,
    a: i64,
    b: i64,
    exponent: ExponentMode,
) -> normal_core::Result<(u64, Option<Value>, NormalityCertificate)> {
    let group = GaloisGroup::new(ell, GroupMode::RealQuotient)?;
    let x = match construction {
        Construction::CosPlusOne => cos_plus_one_element(ell)?,
        Construction::CosHalf => cos_half_element(ell)?,
        Construction::AxPlusB => real_generator(ell)?
            .scale(&rat(a, 1))
            .add(&CyclotomicElement::from_integer(ell, b))?,
    };
    let (m, exponent_json) = match exponent {
        ExponentMode::Fixed(m) => (m, None),
        ExponentMode::Auto => {
            let result = match construction {
                Construction::CosPlusOne => thm31_exponent(ell)?,
                Construction::CosHalf => thm32_exponent(ell)?,
                Construction::AxPlusB => cor23_exponent(&x, a, b, &group)?,
            };
            (result.exponent, Some(result.to_json()))
        }
    };
    let cert = is_completely_normal_power(&x, m, &group)?;
    Ok((m, exponent_json, cert))
}

/// zeta + zeta^-1, the standard generator of the real subfield.
fn real_generator(ell: u64) -> normal_core::Result<CyclotomicElement> {
    CyclotomicElement::root_of_unity(ell, 1).add(&CyclotomicElement::root_of_unity(ell, -1))
}

fn composite_item(t: u64, ell: u64, exponent: ExponentMode) -> ItemReport {
    let label = format!("t={t} ell={ell}");
    let sqrt = match sqrt_minus_t(t) {
        Ok(s) => s,
        Err(Error::QuadraticShape { .. }) => {
            return ItemReport::skip(
                label,
                format!("t = {t} is not 4 or an odd prime congruent to 3 mod 4"),
            )
        }
        Err(e) => return ItemReport::from_error(label, &e),
    };
    if DEGENERATE_LEVELS.contains(&ell) {
        return ItemReport::skip(
            label,
            format!("level {ell} is excluded: cos(2 pi / l) + 1 is rational there"),
        );
    }
    match verify_composite(&sqrt, t * ell, exponent) {
        Ok((m, exponent_json, evidence)) => {
            let mut detail = Map::new();
            detail.insert("combined_level".into(), json!(t * ell));
            detail.insert("exponent_used".into(), json!(m));
            if let Some(e) = exponent_json {
                detail.insert("exponent".into(), e);
            }
            // reaching a verdict means the disjointness gate held
            detail.insert("disjoint".into(), json!(true));
            detail.insert("normal".into(), json!(evidence.normal));
            detail.insert(
                "vanishing_characters".into(),
                json!(evidence.vanishing_characters),
            );
            let (status, note) = if evidence.normal {
                (Status::Pass, None)
            } else {
                (Status::Fail, Some("a character sum over the full group vanishes".to_string()))
            };
            ItemReport { label, status, note, detail }
        }
        Err(e) => ItemReport::from_error(label, &e),
    }
}

fn verify_composite(
    sqrt: &CyclotomicElement,
    combined: u64,
    exponent: ExponentMode,
) -> normal_core::Result<(u64, Option<Value>, NormalityEvidence)> {
    let x1 = sqrt.add(&CyclotomicElement::one(sqrt.level()))?;
    let (m, exponent_json) = match exponent {
        ExponentMode::Fixed(m) => (m, None),
        ExponentMode::Auto => {
            let result = thm31_exponent(combined)?;
            (result.exponent, Some(result.to_json()))
        }
    };
    let x2 = cos_plus_one_element(combined)?.pow(m);
    let evidence = composite_normal_check(&x1, &x2, combined)?;
    Ok((m, exponent_json, evidence))
}

fn modular_item(level: u64, truncation: i64) -> ItemReport {
    let label = format!("N={level}");
    if level < 2 {
        return ItemReport::skip(label, format!("level must be at least 2, got {level}"));
    }
    let window = rat(truncation, 1);
    if let Err(e) = verify_lemma42(level, &window) {
        return ItemReport::from_error(label, &e);
    }
    match verify_thm44(level, &window) {
        Ok(cert) => {
            let mut detail = Map::new();
            detail.insert("identity_verified".into(), json!(true));
            detail.insert("certificate".into(), cert.to_json());
            let (status, note) = if cert.completely_normal() {
                (Status::Pass, None)
            } else {
                (Status::Fail, Some("a valuation gap is not strictly positive".to_string()))
            };
            ItemReport { label, status, note, detail }
        }
        Err(e) => ItemReport::from_error(label, &e),
    }
}

// ---------------------------------------------------------------------------
// report assembly
// ---------------------------------------------------------------------------

pub struct RunReport {
    pub exit_code: i32,
    pub body: String,
    pub out: Option<PathBuf>,
}

/// 0 iff every verification passed; 1 on any mathematical failure; 2 when
/// something errored operationally or every item was skipped.
fn exit_code(items: &[ItemReport]) -> i32 {
    if items.iter().any(|i| i.status == Status::Fail) {
        return 1;
    }
    if items.iter().any(|i| i.status == Status::Error) {
        return 2;
    }
    if items.iter().all(|i| i.status == Status::Skip) {
        return 2;
    }
    0
}

fn status_counts(items: &[ItemReport]) -> [usize; 4] {
    let mut counts = [0usize; 4];
    for item in items {
        let slot = match item.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Skip => 2,
            Status::Error => 3,
        };
        counts[slot] += 1;
    }
    counts
}

fn render_json(command: &str, config: &Value, items: &[ItemReport]) -> String {
    let items_json: Vec<Value> = items
        .iter()
        .map(|item| {
            let mut obj = Map::new();
            obj.insert("item".into(), json!(item.label));
            obj.insert("status".into(), json!(item.status.label()));
            if let Some(note) = &item.note {
                obj.insert("note".into(), json!(note));
            }
            for (k, v) in &item.detail {
                obj.insert(k.clone(), v.clone());
            }
            Value::Object(obj)
        })
        .collect();
    let [passed, failed, skipped, errors] = status_counts(items);
    let report = json!({
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "items": items_json,
        "summary": {
            "total": items.len(),
            "passed": passed,
            "failed": failed,
            "skipped": skipped,
            "errors": errors,
        },
    });
    let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
    body.push('\n');
    body
}

fn render_text(command: &str, items: &[ItemReport]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&format!("[{}] {} {}", item.status.label(), command, item.label));
        if let Some(m) = item.detail.get("exponent_used") {
            out.push_str(&format!(" m={m}"));
        }
        if let Some(note) = &item.note {
            out.push_str(" — ");
            out.push_str(note);
        }
        out.push('\n');
    }
    let [passed, failed, skipped, errors] = status_counts(items);
    let noun = if items.len() == 1 { "item" } else { "items" };
    out.push_str(&format!(
        "summary: {} {noun} — {passed} passed, {failed} failed, {skipped} skipped, {errors} errors\n",
        items.len()
    ));
    out
}

fn assemble(command: &str, config: Value, items: Vec<ItemReport>, output: &OutputArgs) -> RunReport {
    let body = match output.format {
        Format::Json => render_json(command, &config, &items),
        Format::Text => render_text(command, &items),
    };
    RunReport { exit_code: exit_code(&items), body, out: output.out.clone() }
}

// ---------------------------------------------------------------------------
// command entry points
// ---------------------------------------------------------------------------

pub fn run(cli: &Cli) -> Result<RunReport, String> {
    match &cli.command {
        Command::Cyclotomic(args) => run_cyclotomic(args),
        Command::Composite(args) => run_composite(args),
        Command::Modular(args) => run_modular(args),
    }
}

fn run_cyclotomic(args: &CyclotomicArgs) -> Result<RunReport, String> {
    let levels = parse_range(&args.ell)?;
    let exponent = parse_exponent(&args.exponent)?;
    let (a, b) = match args.construction {
        Construction::AxPlusB => {
            let a = args.a.ok_or("--a is required for ax-plus-b")?;
            let b = args.b.ok_or("--b is required for ax-plus-b")?;
            if b == 0 {
                return Err("--b must be nonzero".into());
            }
            if a.unsigned_abs() <= 2 * b.unsigned_abs() {
                return Err(format!("domination needs |a| > 2|b|; got a = {a}, b = {b}"));
            }
            (a, b)
        }
        _ => {
            if args.a.is_some() || args.b.is_some() {
                return Err("--a/--b only apply to --construction ax-plus-b".into());
            }
            (0, 0)
        }
    };
    let items = run_parallel(&levels, |&ell| {
        cyclotomic_item(ell, args.construction, a, b, exponent)
    });
    let config = json!({
        "ell": args.ell,
        "construction": args.construction.label(),
        "a": args.a,
        "b": args.b,
        "exponent": args.exponent,
    });
    Ok(assemble("cyclotomic", config, items, &args.output))
}

fn run_composite(args: &CompositeArgs) -> Result<RunReport, String> {
    let ts = parse_range(&args.t)?;
    let ells = parse_range(&args.ell)?;
    let exponent = parse_exponent(&args.exponent)?;
    let pairs: Vec<(u64, u64)> =
        ts.iter().flat_map(|&t| ells.iter().map(move |&l| (t, l))).collect();
    let items = run_parallel(&pairs, |&(t, ell)| composite_item(t, ell, exponent));
    let config = json!({
        "t": args.t,
        "ell": args.ell,
        "exponent": args.exponent,
    });
    Ok(assemble("composite", config, items, &args.output))
}

fn run_modular(args: &ModularArgs) -> Result<RunReport, String> {
    let levels = parse_range(&args.level)?;
    if args.truncation < 1 {
        return Err(format!(
            "--truncation must be a positive exponent window, got {}",
            args.truncation
        ));
    }
    let items = run_parallel(&levels, |&n| modular_item(n, args.truncation));
    let config = json!({
        "level": args.level,
        "truncation": args.truncation,
    });
    Ok(assemble("modular", config, items, &args.output))
}
