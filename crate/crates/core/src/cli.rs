//! The `btsp` command line.
//!
//! Exit codes: 0 success, 1 a check failed (certificate violation, bound not
//! met, internal invariant), 2 bad usage or unreadable input.
//!
//! Every result line is a record of space-separated `key=value` pairs after
//! a leading tag. Rationals appear twice: `key=p/q` and `key_dec=` with six
//! decimals. `-` marks an absent value.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::backbone::build_backbone;
use crate::cactus::{
    approximation_factor, parse_certificate, run_pipeline, verify_certificate, write_certificate, write_tour,
    TourCertificate,
};
use crate::error::Error;
use crate::instance::{
    beta_of, effective_beta, gen_euclidean_power, gen_uniform_beta, parse_instance, write_native, Format, Instance,
};
use crate::onetree::min_bounded_one_tree_detailed;
use crate::oracles::exact_tsp;
use crate::rational::{format_rational, parse_rational, to_decimal, Rational};

/// Largest `n` that `solve` accepts without `--unsafe-large`.
pub const SOLVE_CAP: usize = 60;

const DECIMALS: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "btsp", version, about = "Approximate tours for β-relaxed TSP instances, with exact certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random instance.
    Gen(GenArgs),
    /// Size, β and weight statistics of an instance.
    Info { instance: PathBuf },
    /// Run the approximation algorithm.
    Solve(SolveArgs),
    /// Build only the Eulerian backbone.
    Backbone {
        instance: PathBuf,
        /// Compare c(H) with 3/2 of the optimum (n <= 20).
        #[arg(long)]
        check_exact: bool,
    },
    /// Optimal tour by Held–Karp (n <= 20).
    Exact {
        instance: PathBuf,
        #[arg(long, value_name = "PATH")]
        tour_out: Option<PathBuf>,
    },
    /// Recheck a stored certificate.
    Verify {
        certificate: PathBuf,
        /// Recompute the optimum (n <= 20) and check the approximation bound.
        #[arg(long)]
        check_exact: bool,
    },
    /// Degree-bounded 1-tree.
    Onetree {
        instance: PathBuf,
        /// Degree bound, one value for all vertices or a comma list.
        #[arg(long, default_value = "2")]
        b: String,
        /// Print every root's LP value and tree.
        #[arg(long)]
        dump: bool,
    },
    /// Solve a sweep of generated instances.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    UniformBeta,
    EuclideanPower,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// β for uniform-beta.
    #[arg(long)]
    beta: Option<String>,
    /// Distance exponent for euclidean-power.
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    /// Verify the certificate and print its summary.
    #[arg(long)]
    certify: bool,
    /// Add the optimum by Held–Karp (n <= 20).
    #[arg(long)]
    check_exact: bool,
    /// Print the Rule-1, entry-site and orientation events.
    #[arg(long)]
    trace: bool,
    /// Fill the wall-time field (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
    /// Allow n above the default cap.
    #[arg(long)]
    unsafe_large: bool,
    #[arg(long, value_name = "PATH")]
    cert_out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    tour_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "uniform-beta")]
    kind: Kind,
    /// Sizes, as `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "6..10")]
    sizes: String,
    /// Seeds, as `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "1..5")]
    seeds: String,
    /// Generator parameters, comma separated: β for uniform-beta, p for
    /// euclidean-power.
    #[arg(long, default_value = "1,3/2,2,3")]
    betas: String,
    /// Verify every certificate.
    #[arg(long)]
    certify: bool,
    #[arg(long)]
    check_exact: bool,
    #[arg(long)]
    timing: bool,
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

/// One solved instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub name: String,
    pub n: usize,
    pub beta: Rational,
    pub backbone_weight: Rational,
    pub tour_weight: Rational,
    pub opt: Option<Rational>,
    pub ratio: Option<Rational>,
    /// `3β/4 + 3β²/4`.
    pub factor: Rational,
    /// `factor · opt` when `opt` is known.
    pub bound: Option<Rational>,
    pub wall_ms: Option<u128>,
    pub seed: Option<u64>,
}

impl RunRecord {
    pub fn from_certificate(name: &str, cert: &TourCertificate, wall_ms: Option<u128>, seed: Option<u64>) -> Self {
        RunRecord {
            name: name.split_whitespace().collect::<Vec<_>>().join("_"),
            n: cert.n,
            beta: cert.beta.clone(),
            backbone_weight: cert.backbone_weight.clone(),
            tour_weight: cert.tour_weight.clone(),
            opt: cert.opt.clone(),
            ratio: cert.ratio(),
            factor: approximation_factor(&cert.beta),
            bound: cert.bound(),
            wall_ms,
            seed,
        }
    }

    pub const CSV_HEADER: [&'static str; 18] = [
        "name", "n", "beta", "beta_dec", "c_h", "c_h_dec", "tour", "tour_dec", "opt", "opt_dec", "ratio", "ratio_dec",
        "factor", "factor_dec", "bound", "bound_dec", "wall_ms", "seed",
    ];

    pub fn fields(&self) -> Vec<String> {
        let exact = |r: Option<&Rational>| r.map_or("-".to_string(), format_rational);
        let dec = |r: Option<&Rational>| r.map_or("-".to_string(), |r| to_decimal(r, DECIMALS));
        let mut out = vec![self.name.clone(), self.n.to_string()];
        for r in [Some(&self.beta), Some(&self.backbone_weight), Some(&self.tour_weight), self.opt.as_ref(), self.ratio.as_ref(), Some(&self.factor), self.bound.as_ref()] {
            out.push(exact(r));
            out.push(dec(r));
        }
        out.push(self.wall_ms.map_or("-".to_string(), |t| t.to_string()));
        out.push(self.seed.map_or("-".to_string(), |s| s.to_string()));
        out
    }

    /// `run name=.. n=.. beta=.. beta_dec=.. ...`
    pub fn line(&self) -> String {
        let pairs: Vec<String> =
            Self::CSV_HEADER.iter().zip(self.fields()).map(|(k, v)| format!("{k}={v}")).collect();
        format!("run {}", pairs.join(" "))
    }

    /// Whether `tour ≤ bound`, equivalently `ratio ≤ factor`, holds (vacuous
    /// without `opt`).
    pub fn within_bound(&self) -> bool {
        self.bound.as_ref().is_none_or(|b| &self.tour_weight <= b)
    }
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("io error: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a, out),
        Command::Info { instance } => info(&instance, out),
        Command::Solve(a) => solve(a, out),
        Command::Backbone { instance, check_exact } => backbone(&instance, check_exact, out),
        Command::Exact { instance, tour_out } => exact(&instance, tour_out.as_deref(), out),
        Command::Verify { certificate, check_exact } => verify(&certificate, check_exact, out),
        Command::Onetree { instance, b, dump } => onetree(&instance, &b, dump, out),
        Command::Bench(a) => bench(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn read_instance(path: &Path) -> std::result::Result<Instance, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&bytes, Format::from_path(path))
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn rational_flag(flag: &str, text: &str) -> std::result::Result<Rational, Failure> {
    parse_rational(text).ok_or_else(|| Failure::Usage(format!("{flag}: invalid rational `{text}`")))
}

fn generate(kind: Kind, n: usize, param: &Rational, seed: u64) -> crate::Result<Instance> {
    match kind {
        Kind::UniformBeta => gen_uniform_beta(n, param, seed),
        Kind::EuclideanPower => gen_euclidean_power(n, param, seed),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Outcome {
    let (flag, value, unused) = match a.kind {
        Kind::UniformBeta => ("--beta", a.beta, a.p.map(|_| "--p")),
        Kind::EuclideanPower => ("--p", a.p, a.beta.map(|_| "--beta")),
    };
    if let Some(other) = unused {
        return Err(Failure::Usage(format!("{other} does not apply to this --kind")));
    }
    let value = value.ok_or_else(|| Failure::Usage(format!("{flag} is required for this --kind")))?;
    let param = rational_flag(flag, &value)?;
    let inst = generate(a.kind, a.n, &param, a.seed)?;
    let text = write_native(&inst);
    match a.out {
        Some(path) => {
            std::fs::write(&path, text)?;
            writeln!(out, "wrote {} n={} name={}", path.display(), inst.n(), inst.name())?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn both(key: &str, r: &Rational) -> String {
    format!("{key}={} {key}_dec={}", format_rational(r), to_decimal(r, DECIMALS))
}

fn info(path: &Path, out: &mut dyn Write) -> Outcome {
    let inst = read_instance(path)?;
    let n = inst.n();
    let pairs = Rational::from_integer((n * (n - 1) / 2).into());
    let declared = inst.declared_beta().map_or("-".to_string(), format_rational);
    let beta = match beta_of(&inst) {
        Ok(b) => b.to_string(),
        Err(_) => "-".to_string(),
    };
    writeln!(out, "info name={} n={n} declared_beta={declared} beta={beta}", inst.name().replace(' ', "_"))?;
    writeln!(
        out,
        "weights {} {} {} {}",
        both("min", &inst.min_weight()),
        both("max", &inst.max_weight()),
        both("total", &inst.total_weight()),
        both("mean", &(inst.total_weight() / pairs)),
    )?;
    Ok(())
}

fn with_exact_opt(inst: &Instance, cert: TourCertificate) -> std::result::Result<TourCertificate, Failure> {
    let opt = exact_tsp(inst)?;
    Ok(cert.with_opt(opt.weight))
}

fn certify(inst: &Instance, cert: &TourCertificate, out: &mut dyn Write) -> Outcome {
    match verify_certificate(inst, cert) {
        Ok(report) => {
            writeln!(out, "verify ok checks={}", report.checks.join(","))?;
            writeln!(
                out,
                "certificate {} {} {} {} {}",
                both("c_h", &cert.backbone_weight),
                both("m_star", &cert.m_star_weight),
                both("m_prime_star", &cert.m_prime_star_weight),
                both("m_literal", &cert.m_literal_weight),
                both("tour", &cert.tour_weight),
            )?;
            writeln!(out, "decisions count={}", cert.families.decisions.len())?;
            Ok(())
        }
        Err(v) => {
            writeln!(out, "verify violation check={} detail={}", v.check, v.detail)?;
            Err(Failure::Check(format!("certificate violation: {v}")))
        }
    }
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Outcome {
    let inst = read_instance(&a.instance)?;
    if inst.n() > SOLVE_CAP && !a.unsafe_large {
        return Err(Failure::Usage(format!(
            "n = {} exceeds the solve cap of {SOLVE_CAP}; pass --unsafe-large to run anyway",
            inst.n()
        )));
    }
    let start = Instant::now();
    let run = run_pipeline(&inst, None)?;
    let wall = start.elapsed().as_millis();
    let mut cert = run.certificate;
    if a.check_exact {
        cert = with_exact_opt(&inst, cert)?;
    }
    if a.trace {
        for e in &run.trace {
            writeln!(out, "trace {e}")?;
        }
    }
    let record = RunRecord::from_certificate(inst.name(), &cert, a.timing.then_some(wall), None);
    writeln!(out, "{}", record.line())?;
    if let Some(path) = &a.cert_out {
        std::fs::write(path, write_certificate(&inst, &cert))?;
    }
    if let Some(path) = &a.tour_out {
        std::fs::write(path, write_tour(&cert.order))?;
    }
    if a.certify {
        certify(&inst, &cert, out)?;
    }
    if !record.within_bound() {
        return Err(Failure::Check("tour exceeds the approximation bound".into()));
    }
    Ok(())
}

fn backbone(path: &Path, check_exact: bool, out: &mut dyn Write) -> Outcome {
    let inst = read_instance(path)?;
    effective_beta(&inst)?;
    let h = build_backbone(&inst)?;
    for e in h.edges() {
        writeln!(out, "edge id={} u={} v={} weight={} source={}", e.id, e.u, e.v, format_rational(&e.weight), e.source)?;
    }
    let max_degree = h.degrees().into_iter().max().unwrap_or(0);
    writeln!(out, "backbone edges={} max_degree={max_degree} {}", h.edges().len(), both("c_h", &h.weight()))?;
    if check_exact {
        let opt = exact_tsp(&inst)?.weight;
        let cap = Rational::new(3.into(), 2.into()) * &opt;
        let ok = h.weight() <= cap;
        writeln!(out, "exact {} {} within={ok}", both("opt", &opt), both("bound", &cap))?;
        if !ok {
            return Err(Failure::Check("c(H) exceeds 3/2 of the optimum".into()));
        }
    }
    Ok(())
}

fn exact(path: &Path, tour_out: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let inst = read_instance(path)?;
    let t = exact_tsp(&inst)?;
    let order: Vec<String> = t.order.iter().map(|v| v.to_string()).collect();
    writeln!(out, "exact {} order={}", both("opt", &t.weight), order.join(","))?;
    if let Some(p) = tour_out {
        std::fs::write(p, write_tour(&t.order))?;
    }
    Ok(())
}

fn verify(path: &Path, check_exact: bool, out: &mut dyn Write) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let (inst, mut cert) = match parse_certificate(&text) {
        Ok(parsed) => parsed,
        Err(e) => {
            writeln!(out, "verify violation check=parse detail={e}")?;
            return Err(Failure::Check(format!("unreadable certificate: {e}")));
        }
    };
    if check_exact {
        let opt = exact_tsp(&inst)?.weight;
        if let Some(stated) = &cert.opt {
            if stated != &opt {
                let detail = format!("stated {} but the optimum is {}", format_rational(stated), format_rational(&opt));
                writeln!(out, "verify violation check=opt detail={detail}")?;
                return Err(Failure::Check(format!("opt: {detail}")));
            }
        }
        cert.opt = Some(opt);
    }
    certify(&inst, &cert, out)
}

fn onetree(path: &Path, b: &str, dump: bool, out: &mut dyn Write) -> Outcome {
    let inst = read_instance(path)?;
    let parsed: Vec<usize> = b
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::Usage(format!("--b: invalid bound `{t}`"))))
        .collect::<std::result::Result<_, _>>()?;
    let bounds = match parsed.len() {
        1 => vec![parsed[0]; inst.n()],
        k if k == inst.n() => parsed,
        k => return Err(Failure::Usage(format!("--b: expected 1 or {} values, got {k}", inst.n()))),
    };
    let res = min_bounded_one_tree_detailed(&inst, &bounds)?;
    if dump {
        for (r, root) in res.roots.iter().enumerate() {
            match root {
                Some(x) => writeln!(
                    out,
                    "root {r} {} {} rounds={} cuts={}",
                    both("lp", &x.lp_value),
                    both("tree", &x.tree.weight),
                    x.rounds,
                    x.cuts
                )?,
                None => writeln!(out, "root {r} skipped")?,
            }
        }
    }
    let t = &res.tree;
    let edges: Vec<String> = t.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
    writeln!(out, "onetree root={} max_degree={} {} edges={}", t.root, t.max_degree(), both("weight", &t.weight), edges.join(","))?;
    Ok(())
}

/// `a..b` (inclusive) or `x,y,z`.
fn parse_list(flag: &str, text: &str) -> std::result::Result<Vec<u64>, Failure> {
    let bad = || Failure::Usage(format!("{flag}: expected `a..b` or a comma list, got `{text}`"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn threads() -> std::result::Result<Option<usize>, Failure> {
    match std::env::var("BTSP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Failure::Usage(format!("BTSP_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

struct BenchItem {
    lines: Vec<String>,
    record: Option<RunRecord>,
    failure: Option<String>,
}

fn bench_one(a: &BenchArgs, n: usize, param: &Rational, seed: u64) -> BenchItem {
    let mut lines = Vec::new();
    let go = || -> crate::Result<(TourCertificate, String, u128)> {
        let inst = generate(a.kind, n, param, seed)?;
        let start = Instant::now();
        let mut cert = run_pipeline(&inst, None)?.certificate;
        let wall = start.elapsed().as_millis();
        if a.check_exact {
            cert = cert.with_opt(exact_tsp(&inst)?.weight);
        }
        if a.certify {
            if let Err(v) = verify_certificate(&inst, &cert) {
                return Err(Error::Invariant(format!("certificate violation on {}: {v}", inst.name())));
            }
        }
        Ok((cert, inst.name().to_string(), wall))
    };
    match go() {
        Ok((cert, name, wall)) => {
            let record = RunRecord::from_certificate(&name, &cert, a.timing.then_some(wall), Some(seed));
            lines.push(record.line());
            let failure = (!record.within_bound()).then(|| format!("{name}: ratio exceeds the bound"));
            BenchItem { lines, record: Some(record), failure }
        }
        Err(e) => {
            lines.push(format!("fail n={n} param={} seed={seed} error={e}", format_rational(param)));
            BenchItem { lines, record: None, failure: Some(e.to_string()) }
        }
    }
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Outcome {
    let sizes: Vec<usize> = parse_list("--sizes", &a.sizes)?.into_iter().map(|n| n as usize).collect();
    let seeds = parse_list("--seeds", &a.seeds)?;
    let params: Vec<Rational> =
        a.betas.split(',').map(|t| rational_flag("--betas", t.trim())).collect::<std::result::Result<_, _>>()?;
    let mut jobs = Vec::new();
    for &n in &sizes {
        for p in &params {
            for &s in &seeds {
                jobs.push((n, p.clone(), s));
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads()? {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| Failure::Usage(format!("cannot start the worker pool: {e}")))?;
    let items: Vec<BenchItem> = pool.install(|| jobs.par_iter().map(|(n, p, s)| bench_one(&a, *n, p, *s)).collect());
    let mut writer = match &a.csv {
        Some(path) => {
            let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            w.write_record(RunRecord::CSV_HEADER).map_err(|e| Failure::Usage(e.to_string()))?;
            Some(w)
        }
        None => None,
    };
    let mut failures = Vec::new();
    for item in &items {
        for line in &item.lines {
            writeln!(out, "{line}")?;
        }
        if let (Some(w), Some(r)) = (writer.as_mut(), &item.record) {
            w.write_record(r.fields()).map_err(|e| Failure::Usage(e.to_string()))?;
        }
        failures.extend(item.failure.clone());
    }
    if let Some(mut w) = writer {
        w.flush()?;
    }
    let ratios: Vec<&Rational> = items.iter().filter_map(|i| i.record.as_ref()?.ratio.as_ref()).collect();
    let mut summary = format!("bench runs={} failures={}", items.len(), failures.len());
    if !ratios.is_empty() {
        let mean = ratios.iter().copied().sum::<Rational>() / Rational::from_integer(ratios.len().into());
        let max = ratios.iter().max().copied().unwrap();
        summary.push_str(&format!(" {} {}", both("mean_ratio", &mean), both("max_ratio", max)));
    }
    writeln!(out, "{summary}")?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}
