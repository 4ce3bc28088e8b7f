use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use qpp_core::arith::gcd;
use qpp_core::interleave::{
    generate_s_random, is_mcf, spread_factor, spread_factor_exhaustive, spread_upper_bound, write_interleaver,
};
use qpp_core::parwin::{parallel_turbo_decode_with, trace_access, Enforcement};
use qpp_core::poly::{
    compose as compose_polys, count_quadratic_pps, enumerate_quadratic_pps, inverse, is_pp_general,
    is_quadratic_pp, quadratic_inverses, ParityCase,
};
use qpp_core::turbo::channel::{awgn_channel_with, substream};
use qpp_core::turbo::{
    code_rate, dmin_upper_bound, encode, run_fer, turbo_decode_with, FerPoint, RscSpec, SerialExchange,
    SimConfig, TurboConfig,
};
use qpp_core::{factorize, Direction, Error, Interleaver, PolySpec};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::FerConfig;
use crate::output::{joined, Format, RunManifest, Sink, Table};
use crate::source::Source;
use crate::{GlobalArgs, SourceArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

fn sink(g: &GlobalArgs, subcommand: &str, params: impl Serialize, seed: u64) -> Result<Sink> {
    Ok(Sink {
        format: g.format,
        out: g.out.clone(),
        manifest: RunManifest::new(subcommand, serde_json::to_value(params)?, seed),
    })
}

fn load(args: &SourceArgs) -> Result<(Source, Interleaver)> {
    let source = Source::parse(&args.source)?;
    let pi = source.load()?;
    Ok((source, pi))
}

fn factor_string(x: u64) -> String {
    if x < 2 {
        x.to_string()
    } else {
        factorize(x).map(|f| f.to_string()).unwrap_or_default()
    }
}

/// Finite numbers as JSON numbers, infinities as `"inf"` / `"-inf"`.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    pub n: u64,
    pub f1: u64,
    pub f2: u64,
}

/// First failed condition of the quadratic criterion, if any.
fn failure_reason(n: u64, f1: u64, f2: u64) -> Result<Option<String>> {
    let fact = factorize(n)?;
    let reason = match ParityCase::of(&fact) {
        ParityCase::Case1 => {
            if gcd(f1, n) != 1 {
                Some(format!("gcd(f1, N) = {}", gcd(f1, n)))
            } else {
                fact.primes().find(|p| f2 % p != 0).map(|p| format!("{p} divides N but not f2"))
            }
        }
        ParityCase::Case2 => {
            if (f1 + f2) % 2 == 0 {
                Some("f1 + f2 is even".to_owned())
            } else if gcd(f1, n / 2) != 1 {
                Some(format!("gcd(f1, N/2) = {}", gcd(f1, n / 2)))
            } else {
                fact.primes()
                    .filter(|&p| p != 2)
                    .find(|p| f2 % p != 0)
                    .map(|p| format!("{p} divides N but not f2"))
            }
        }
    };
    Ok(reason)
}

pub fn check(g: &GlobalArgs, a: &CheckArgs) -> Result<Verdict> {
    let pp = is_quadratic_pp(a.n, a.f1, a.f2)?;
    let fact = factorize(a.n)?;
    let case = ParityCase::of(&fact).number();
    let form = if a.f2 == 0 { "linear" } else { "quadratic" };
    let reason = failure_reason(a.n, a.f1, a.f2)?.unwrap_or_default();
    let f2_fact = factor_string(a.f2);
    let table = Table {
        header: vec!["n", "f1", "f2", "permutation", "case", "form", "n_factorization", "f2_factorization", "reason"],
        rows: vec![vec![
            a.n.to_string(),
            a.f1.to_string(),
            a.f2.to_string(),
            if pp { "yes" } else { "no" }.to_owned(),
            case.to_string(),
            form.to_owned(),
            fact.to_string(),
            f2_fact.clone(),
            reason.clone(),
        ]],
        json: json!({
            "n": a.n, "f1": a.f1, "f2": a.f2, "permutation": pp, "case": case, "form": form,
            "n_factorization": fact.to_string(), "f2_factorization": f2_fact,
            "reason": if pp { Value::Null } else { json!(reason) },
        }),
    };
    sink(g, "check", a, g.seed())?.emit(&table)?;
    Ok(pp.into())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountArgs {
    pub n: u64,
}

pub fn count(g: &GlobalArgs, a: &CountArgs) -> Result<Verdict> {
    let c = count_quadratic_pps(a.n)?;
    let table = Table {
        header: vec!["n", "count"],
        rows: vec![vec![a.n.to_string(), c.to_string()]],
        json: json!({ "n": a.n, "count": c }),
    };
    sink(g, "count", a, g.seed())?.emit(&table)?;
    Ok(Verdict::Yes)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnumerateArgs {
    pub n: u64,
    /// Stop after this many polynomials.
    #[arg(long)]
    pub limit: Option<usize>,
}

pub fn enumerate(g: &GlobalArgs, a: &EnumerateArgs) -> Result<Verdict> {
    let pairs: Vec<(u64, u64)> = enumerate_quadratic_pps(a.n)?
        .take(a.limit.unwrap_or(usize::MAX))
        .collect();
    let table = Table {
        header: vec!["f1", "f2"],
        rows: pairs.iter().map(|(f1, f2)| vec![f1.to_string(), f2.to_string()]).collect(),
        json: json!({ "n": a.n, "polynomials": pairs }),
    };
    sink(g, "enumerate", a, g.seed())?.emit(&table)?;
    Ok(Verdict::Yes)
}

fn emit_interleaver(sink: &Sink, pi: &Interleaver, extra: Value) -> Result<()> {
    match sink.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_interleaver(pi, &mut buf)?;
            sink.emit_raw(&buf)
        }
        Format::Json => {
            let mut doc = json!({ "n": pi.len(), "map": pi.as_slice() });
            if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
                d.extend(e);
            }
            sink.emit(&Table {
                header: vec![],
                rows: vec![],
                json: doc,
            })
        }
    }
}

pub fn materialize(g: &GlobalArgs, a: &SourceArgs) -> Result<Verdict> {
    let source = Source::parse(&a.source)?;
    let pi = match source.load() {
        Ok(pi) => pi,
        Err(e) => {
            if let Some(Error::NotPermutation { .. }) = e.downcast_ref::<Error>() {
                eprintln!("{source}: {e}");
                return Ok(Verdict::No);
            }
            return Err(e);
        }
    };
    let sink = sink(g, "materialize", json!({ "source": source }), g.seed())?;
    emit_interleaver(&sink, &pi, json!({}))?;
    Ok(Verdict::Yes)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InvertArgs {
    pub n: u64,
    pub f1: u64,
    pub f2: u64,
    /// List every quadratic representative, not just the preferred one.
    #[arg(long)]
    pub all: bool,
}

pub fn invert(g: &GlobalArgs, a: &InvertArgs) -> Result<Verdict> {
    if !is_quadratic_pp(a.n, a.f1, a.f2)? {
        eprintln!("{}x + {}x^2 does not permute Z_{}", a.f1, a.f2, a.n);
        return Ok(Verdict::No);
    }
    let spec = PolySpec::quadratic(a.n, a.f1, a.f2)?;
    let inv = inverse(&spec)?;
    let quads = quadratic_inverses(&spec)?;
    let mut rows = vec![vec![joined(inv.coeffs()), inv.to_string()]];
    if a.all {
        rows = quads
            .iter()
            .map(|&(g1, g2)| {
                let p = PolySpec::quadratic(a.n, g1, g2).expect("reduced coefficients");
                vec![joined(&[g1, g2]), p.to_string()]
            })
            .collect();
    }
    let table = Table {
        header: vec!["coefficients", "polynomial"],
        rows,
        json: json!({
            "n": a.n,
            "inverse": inv.coeffs(),
            "polynomial": inv.to_string(),
            "quadratic_representatives": quads,
        }),
    };
    sink(g, "invert", a, g.seed())?.emit(&table)?;
    Ok(Verdict::Yes)
}

fn parse_coeffs(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|t| t.trim().parse().with_context(|| format!("malformed coefficient {t:?}")))
        .collect()
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComposeArgs {
    pub n: u64,
    /// Coefficients of x, x^2, ... of the outer polynomial, comma separated.
    pub outer: String,
    /// Coefficients of the inner polynomial.
    pub inner: String,
}

pub fn compose(g: &GlobalArgs, a: &ComposeArgs) -> Result<Verdict> {
    let outer = PolySpec::reduced(a.n, parse_coeffs(&a.outer)?)?;
    let inner = PolySpec::reduced(a.n, parse_coeffs(&a.inner)?)?;
    let h = compose_polys(&outer, &inner)?;
    let pp = is_pp_general(&h);
    let table = Table {
        header: vec!["coefficients", "polynomial", "permutation"],
        rows: vec![vec![joined(h.coeffs()), h.to_string(), if pp { "yes" } else { "no" }.to_owned()]],
        json: json!({ "n": a.n, "coefficients": h.coeffs(), "polynomial": h.to_string(), "permutation": pp }),
    };
    sink(g, "compose", a, g.seed())?.emit(&table)?;
    Ok(Verdict::Yes)
}

pub fn mcf(g: &GlobalArgs, a: &SourceArgs) -> Result<Verdict> {
    let (source, pi) = load(a)?;
    let report = is_mcf(&pi);
    let rows = report
        .reports
        .values()
        .map(|r| {
            let (dir, j, t, v) = match &r.violation {
                Some(x) => (x.direction.to_string(), x.j.to_string(), x.t.to_string(), x.v.to_string()),
                None => Default::default(),
            };
            vec![
                r.window.to_string(),
                (pi.len() / r.window).to_string(),
                r.passed.to_string(),
                dir,
                j,
                t,
                v,
            ]
        })
        .collect();
    let table = Table {
        header: vec!["window", "processors", "passed", "direction", "j", "t", "v"],
        rows,
        json: json!({ "n": pi.len(), "mcf": report.passed(), "reports": report.reports.values().collect::<Vec<_>>() }),
    };
    sink(g, "mcf", json!({ "source": source }), g.seed())?.emit(&table)?;
    Ok(report.passed().into())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpreadArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Scan every index pair instead of the pruned search.
    #[arg(long)]
    pub exhaustive: bool,
}

pub fn spread(g: &GlobalArgs, a: &SpreadArgs) -> Result<Verdict> {
    let (source, pi) = load(&a.source)?;
    let d = if a.exhaustive {
        spread_factor_exhaustive(&pi)
    } else {
        spread_factor(&pi)
    };
    let bound = spread_upper_bound(pi.len());
    let ratio = d as f64 / bound;
    let table = Table {
        header: vec!["n", "spread", "bound", "ratio"],
        rows: vec![vec![pi.len().to_string(), d.to_string(), bound.to_string(), ratio.to_string()]],
        json: json!({ "n": pi.len(), "spread": d, "bound": bound, "ratio": ratio }),
    };
    let params = json!({ "source": source, "exhaustive": a.exhaustive });
    sink(g, "spread", params, g.seed())?.emit(&table)?;
    Ok(Verdict::Yes)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SrandomArgs {
    pub n: usize,
    pub s: usize,
    /// Restarts before giving up.
    #[arg(long, default_value_t = 10_000)]
    pub attempts: usize,
}

pub fn srandom(g: &GlobalArgs, a: &SrandomArgs) -> Result<Verdict> {
    let pi = match generate_s_random(a.n, a.s, g.seed(), a.attempts) {
        Ok(pi) => pi,
        Err(e @ Error::ConstructionFailed { .. }) => {
            eprintln!("no S-random interleaver with N = {}, S = {}: {e}", a.n, a.s);
            return Ok(Verdict::No);
        }
        Err(e) => return Err(e.into()),
    };
    let sink = sink(g, "srandom", a, g.seed())?;
    emit_interleaver(&sink, &pi, json!({ "s": a.s, "seed": g.seed() }))?;
    Ok(Verdict::Yes)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FerArgs {
    /// `key = value` config file.
    pub config: PathBuf,
}

fn fer_table(points: &[FerPoint]) -> Table {
    let fmt = |x: f64| if x.is_finite() { x.to_string() } else { "inf".into() };
    Table {
        header: vec!["ebn0_db", "frames", "frame_errors", "bit_errors", "fer", "ber", "ci95"],
        rows: points
            .iter()
            .map(|p| {
                vec![
                    fmt(p.ebn0_db),
                    p.frames.to_string(),
                    p.frame_errors.to_string(),
                    p.bit_errors.to_string(),
                    p.fer.to_string(),
                    p.ber.to_string(),
                    p.ci95.to_string(),
                ]
            })
            .collect(),
        json: Value::Array(
            points
                .iter()
                .map(|p| {
                    json!({
                        "ebn0_db": num(p.ebn0_db), "frames": p.frames, "frame_errors": p.frame_errors,
                        "bit_errors": p.bit_errors, "fer": p.fer, "ber": p.ber, "ci95": p.ci95,
                    })
                })
                .collect(),
        ),
    }
}

pub fn fer(g: &GlobalArgs, a: &FerArgs) -> Result<Verdict> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("cannot read {}", a.config.display()))?;
    let mut cfg = FerConfig::parse(&text).with_context(|| format!("invalid config {}", a.config.display()))?;
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    let pi = cfg.interleaver.load()?;
    let sim = SimConfig {
        max_frames: cfg.max_frames,
        target_frame_errors: cfg.target_errors,
        iterations: cfg.iterations,
        seed: cfg.seed,
        kind: cfg.decoder,
        ..SimConfig::new(pi, cfg.ebn0_db.clone())
    };
    let points = run_fer(&sim)?;
    let params = json!({
        "config": a.config,
        "interleaver": cfg.interleaver.to_string(),
        "ebn0_db": cfg.ebn0_db.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "iterations": cfg.iterations,
        "target_errors": cfg.target_errors,
        "max_frames": cfg.max_frames,
        "decoder": cfg.decoder,
        "noiseless": cfg.noiseless,
    });
    sink(g, "fer", params, cfg.seed)?.emit(&fer_table(&points))?;
    Ok(Verdict::Yes)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DminArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Largest input weight enumerated (1 to 4).
    #[arg(long, default_value_t = 3)]
    pub weight: usize,
}

pub fn dmin_bound(g: &GlobalArgs, a: &DminArgs) -> Result<Verdict> {
    let (source, pi) = load(&a.source)?;
    let b = dmin_upper_bound(&pi, &RscSpec::umts(), a.weight)?;
    let table = Table {
        header: vec!["max_input_weight", "weight", "positions"],
        rows: vec![vec![b.max_input_weight.to_string(), b.weight.to_string(), joined(&b.positions)]],
        json: json!({ "n": pi.len(), "bound": b }),
    };
    let params = json!({ "source": source, "weight": a.weight });
    sink(g, "dmin-bound", params, g.seed())?.emit(&table)?;
    Ok(Verdict::Yes)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PartraceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Number of parallel processors M; must divide N.
    #[arg(long, short = 'm')]
    pub processors: usize,
    /// Also decode this many noisy frames in parallel and serially.
    #[arg(long, default_value_t = 0)]
    pub frames: u64,
    #[arg(long, default_value_t = 1.0)]
    pub ebn0: f64,
    #[arg(long, default_value_t = 8)]
    pub iterations: usize,
}

#[derive(Serialize)]
struct DecodeSummary {
    frames: u64,
    ebn0_db: f64,
    iterations: usize,
    mismatched_frames: u64,
    contention_events: usize,
}

/// Decodes `frames` noisy frames through both exchanges; counts frames
/// whose hard decisions differ and contention events seen.
fn compare_decoders(pi: &Interleaver, a: &PartraceArgs, seed: u64) -> Result<DecodeSummary> {
    let spec = RscSpec::umts();
    let rate = code_rate(pi.len(), &spec);
    let config = TurboConfig::default();
    let (mut mismatched, mut events) = (0, 0);
    for f in 0..a.frames {
        let mut rng = substream(seed, &[f]);
        let info: Vec<u8> = (0..pi.len()).map(|_| rng.random_range(0..2u8)).collect();
        let llrs = awgn_channel_with(&encode(&info, pi, &spec)?, a.ebn0, rate, &mut rng);
        let serial = turbo_decode_with(&llrs, pi, a.iterations, &config, &mut SerialExchange::new(pi))?;
        let par = parallel_turbo_decode_with(&llrs, pi, a.processors, a.iterations, Enforcement::Record, &config)?;
        mismatched += u64::from(par.output.bits != serial.bits);
        events += par.contentions.len();
    }
    Ok(DecodeSummary {
        frames: a.frames,
        ebn0_db: a.ebn0,
        iterations: a.iterations,
        mismatched_frames: mismatched,
        contention_events: events,
    })
}

pub fn partrace(g: &GlobalArgs, a: &PartraceArgs) -> Result<Verdict> {
    let (source, pi) = load(&a.source)?;
    if a.ebn0.is_nan() {
        bail!("Eb/N0 must be a number");
    }
    let traces = [
        trace_access(&pi, a.processors, Direction::Interleave)?,
        trace_access(&pi, a.processors, Direction::Deinterleave)?,
    ];
    let contention_free = traces.iter().all(|t| t.is_contention_free());
    let decode = if a.frames > 0 {
        Some(compare_decoders(&pi, a, g.seed())?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for t in &traces {
        for step in &t.steps {
            for acc in &step.accesses {
                let contended = step.accesses.iter().filter(|b| b.bank == acc.bank).count() > 1;
                rows.push(vec![
                    t.direction.to_string(),
                    step.j.to_string(),
                    acc.proc.to_string(),
                    acc.bank.to_string(),
                    acc.addr.to_string(),
                    contended.to_string(),
                ]);
            }
        }
    }
    let table = Table {
        header: vec!["direction", "step", "proc", "bank", "addr", "contended"],
        rows,
        json: json!({
            "n": pi.len(),
            "processors": a.processors,
            "window": pi.len() / a.processors,
            "contention_free": contention_free,
            "traces": traces,
            "decode": decode,
        }),
    };
    let ok = contention_free && decode
        .as_ref()
        .map_or(true, |d| d.mismatched_frames == 0 && d.contention_events == 0);
    let params = json!({
        "source": source, "processors": a.processors, "frames": a.frames,
        "ebn0_db": a.ebn0, "iterations": a.iterations,
    });
    sink(g, "partrace", params, g.seed())?.emit(&table)?;
    Ok(ok.into())
}
