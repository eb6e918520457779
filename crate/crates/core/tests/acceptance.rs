//! Acceptance criteria 1-9. Prints one `PASS`/`FAIL` line per criterion and
//! exits non-zero if any fails. All comparisons are exact.

use std::time::Instant;

use btsp::backbone::{random_backbone, EdgeSource, EulerianBackbone};
use btsp::cactus::{approximation_factor, run_pipeline, run_pipeline_on, verify_certificate, Audit, TourCertificate};
use btsp::instance::{gen_euclidean_power, gen_uniform_beta};
use btsp::matching::{min_weight_perfect_matching, verify_perfect_matching, MatchingGraph};
use btsp::onetree::min_bounded_one_tree;
use btsp::oracles::{exact_tsp, exhaustive_one_tree, exhaustive_parity_bmatching, exhaustive_perfect_matching};
use btsp::parity::{certify, solve_parity_bmatching, ParityEdge, ParitySpec};
use btsp::rational::{format_rational, rat, to_decimal, Rational};
use btsp::{Error, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], detail: String) -> Outcome {
    match failures.first() {
        None => Outcome { pass: true, detail },
        Some(first) => Outcome { pass: false, detail: format!("{detail}; {} failures, first: {first}", failures.len()) },
    }
}

/// One pipeline run. Runs without `opt` start from a random backbone
/// instead of the real one and only feed criteria 6 and 7.
struct Run {
    name: String,
    backbone: EulerianBackbone,
    cert: TourCertificate,
    opt: Option<Rational>,
    audited: Vec<&'static str>,
    verified: Result<Vec<&'static str>, String>,
}

fn corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 4..=12 {
        for seed in 0..4u64 {
            for beta in [rat(1, 1), rat(3, 2), rat(2, 1), rat(3, 1)] {
                out.push(gen_uniform_beta(n, &beta, seed).unwrap());
            }
            for p in [rat(1, 1), rat(2, 1)] {
                out.push(gen_euclidean_power(n, &p, seed).unwrap());
            }
        }
    }
    out
}

fn solve_corpus(instances: &[Instance]) -> Result<Vec<Run>, String> {
    let mut runs = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let audit = Audit { seed: i as u64, ..Audit::default() };
        let pipe = run_pipeline(inst, Some(&audit)).map_err(|e| format!("{}: {e}", inst.name()))?;
        let opt = exact_tsp(inst).map_err(|e| format!("{}: {e}", inst.name()))?.weight;
        let cert = pipe.certificate.with_opt(opt.clone());
        let verified = verify_certificate(inst, &cert).map(|r| r.checks).map_err(|v| v.to_string());
        let name = inst.name().to_string();
        runs.push(Run { name, backbone: pipe.backbone, cert, opt: Some(opt), audited: pipe.audited, verified });
    }
    for (i, inst) in instances.iter().enumerate() {
        let seed = 1000 + i as u64;
        let h = random_backbone(inst, seed).map_err(|e| format!("{}: {e}", inst.name()))?;
        let audit = Audit { seed, ..Audit::default() };
        let pipe = run_pipeline_on(inst, h, Some(&audit)).map_err(|e| format!("{} random backbone: {e}", inst.name()))?;
        let verified = verify_certificate(inst, &pipe.certificate).map(|r| r.checks).map_err(|v| v.to_string());
        let name = format!("{} random-backbone-{seed}", inst.name());
        runs.push(Run { name, backbone: pipe.backbone, cert: pipe.certificate, opt: None, audited: pipe.audited, verified });
    }
    Ok(runs)
}

fn required(runs: &[Run]) -> impl Iterator<Item = (&Run, &Rational)> {
    runs.iter().filter_map(|r| Some((r, r.opt.as_ref()?)))
}

fn criterion_1(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst: Option<Rational> = None;
    for (r, opt) in required(runs) {
        let bound = approximation_factor(&r.cert.beta) * opt;
        if r.cert.tour_weight > bound {
            failures.push(format!("{}: tour {} > {}", r.name, format_rational(&r.cert.tour_weight), format_rational(&bound)));
        }
        if let Some(x) = r.cert.ratio().map(|q| q / approximation_factor(&r.cert.beta)) {
            if worst.as_ref().is_none_or(|w| &x > w) {
                worst = Some(x);
            }
        }
    }
    let worst = worst.map_or("-".into(), |w| to_decimal(&w, 4));
    outcome(&failures, format!("{} instances, max ratio/factor {worst}", required(runs).count()))
}

fn criterion_2(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    for (r, opt) in required(runs) {
        let h = &r.backbone;
        if let Err(e) = h.validate() {
            failures.push(format!("{}: {e}", r.name));
        }
        if h.degrees().iter().any(|&d| d % 2 == 1 || d > 4 || d == 0) {
            failures.push(format!("{}: degree sequence {:?}", r.name, h.degrees()));
        }
        if h.weight() * rat(2, 1) > opt * rat(3, 1) {
            failures.push(format!("{}: c(H) {} > 3/2 opt", r.name, format_rational(&h.weight())));
        }
    }
    let branching = required(runs).filter(|(r, _)| r.backbone.degrees().contains(&4)).count();
    let matched =
        required(runs).filter(|(r, _)| r.backbone.edges().iter().any(|e| e.source == EdgeSource::Matching)).count();
    outcome(
        &failures,
        format!("{} instances, {matched} with matching edges, {branching} with a degree-4 vertex", required(runs).count()),
    )
}

fn random_b(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(1..=3)).collect()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let (mut feasible, mut cases) = (0, 0);
    for case in 0..320u64 {
        let n = rng.gen_range(4..=8);
        let inst = match case % 3 {
            0 => gen_uniform_beta(n, &rat(rng.gen_range(2..=6), 2), case).unwrap(),
            1 => gen_euclidean_power(n, &rat(rng.gen_range(2..=4), 2), case).unwrap(),
            _ => gen_uniform_beta(n, &rat(1, 1), case).unwrap(),
        };
        // bias towards bounds that bind
        let b = if case % 4 == 0 { vec![2; n] } else { random_b(&mut rng, n) };
        cases += 1;
        let want = exhaustive_one_tree(&inst, &b).unwrap();
        match (min_bounded_one_tree(&inst, &b), want) {
            (Ok(t), want) => {
                if let Err(e) = t.validate(n) {
                    failures.push(format!("case {case}: {e}"));
                }
                if (0..n).any(|v| t.degree[v] > b[v] + 1) {
                    failures.push(format!("case {case}: degrees {:?} vs b {:?}", t.degree, b));
                }
                if let Some(w) = want {
                    feasible += 1;
                    if t.weight > w {
                        failures.push(format!("case {case}: weight {} > {}", format_rational(&t.weight), format_rational(&w)));
                    }
                }
            }
            (Err(Error::Infeasible(_)), None) => {}
            (Err(e), want) => failures.push(format!("case {case}: {e} (exhaustive {want:?})")),
        }
    }
    outcome(&failures, format!("{cases} cases, {feasible} with a degree-b-bounded 1-tree"))
}

fn random_spec(rng: &mut ChaCha8Rng) -> ParitySpec {
    let n = rng.gen_range(2..=9);
    let m = rng.gen_range(1..=22);
    let edges = (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            ParityEdge { u, v, weight: rat(rng.gen_range(-12..=12), rng.gen_range(1..=3)) }
        })
        .collect();
    let odd: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    let even: Vec<usize> = (0..n).filter(|v| !odd.contains(v)).collect();
    ParitySpec::new(n, edges, &odd, &even).unwrap()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let (mut feasible, mut negative) = (0, 0);
    let cases = 320;
    for case in 0..cases {
        let spec = random_spec(&mut rng);
        if spec.edges().iter().any(|e| e.weight < rat(0, 1)) {
            negative += 1;
        }
        let want = exhaustive_parity_bmatching(&spec).unwrap();
        let got = solve_parity_bmatching(&spec).unwrap();
        if let Some(x) = &got {
            feasible += 1;
            if let Err(e) = certify(&spec, x) {
                failures.push(format!("spec {case}: {e}"));
            }
        }
        if got.as_ref().map(|x| &x.weight) != want.as_ref() {
            failures.push(format!("spec {case}: solver {:?} vs exhaustive {want:?}", got.map(|x| x.weight)));
        }
    }
    outcome(&failures, format!("{cases} specs, {feasible} feasible, {negative} with negative weights"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let (mut matched, mut dense) = (0, 0);
    let cases = 540;
    for case in 0..cases {
        let n = 2 * rng.gen_range(1..=6);
        let density = if case % 2 == 0 { rng.gen_range(70..=100) } else { rng.gen_range(10..=50) };
        if density >= 70 {
            dense += 1;
        }
        let mut g = MatchingGraph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_range(0..100) < density {
                    g.add_edge(u, v, rat(rng.gen_range(-30..=30), rng.gen_range(1..=4))).unwrap();
                }
            }
        }
        let want = exhaustive_perfect_matching(&g).unwrap();
        let got = min_weight_perfect_matching(&g);
        if let Some(m) = &got {
            matched += 1;
            if let Err(e) = verify_perfect_matching(&g, m) {
                failures.push(format!("graph {case}: {e}"));
            }
        }
        if got.as_ref().map(|m| &m.weight) != want.as_ref() {
            failures.push(format!("graph {case}: blossom {:?} vs exhaustive {want:?}", got.map(|m| m.weight)));
        }
    }
    outcome(&failures, format!("{cases} graphs ({dense} dense), {matched} with a perfect matching"))
}

/// Counts over the required runs and, separately, the random-backbone ones.
fn summary(runs: &[Run], count: impl Fn(&Run) -> usize, what: &str) -> String {
    let (real, extra): (Vec<&Run>, Vec<&Run>) = runs.iter().partition(|r| r.opt.is_some());
    let total = |rs: &[&Run]| rs.iter().map(|r| count(r)).sum::<usize>();
    format!(
        "{} runs: {} {what}; {} random-backbone runs: {} {what}",
        real.len(),
        total(&real),
        extra.len(),
        total(&extra)
    )
}

fn criterion_6(runs: &[Run]) -> Outcome {
    let expected = ["cut-balance", "contraction-order", "cactus-each-iteration", "one-exit-point", "hamiltonian"];
    let mut failures = Vec::new();
    for r in runs {
        if r.audited != expected {
            failures.push(format!("{}: audited {:?}", r.name, r.audited));
        }
        match &r.verified {
            Ok(checks) if ["tour", "partitions", "p-paths", "joined-edges"].iter().all(|c| checks.contains(c)) => {}
            Ok(checks) => failures.push(format!("{}: checks {checks:?}", r.name)),
            Err(v) => failures.push(format!("{}: {v}", r.name)),
        }
    }
    outcome(&failures, summary(runs, |r| r.cert.families.decisions.len(), "orientation decisions"))
}

fn criterion_7(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    for r in runs {
        let c = &r.cert;
        let beta = &c.beta;
        let ok = c.m_star_weight <= c.m_prime_star_weight
            && &c.m_star_weight + &c.m_prime_star_weight == c.backbone_weight
            && c.backbone_weight == r.backbone.weight()
            && c.tour_weight <= beta * &c.m_prime_star_weight + beta * beta * &c.m_star_weight
            && beta * &c.m_prime_star_weight + beta * beta * &c.m_star_weight
                <= (beta + beta * beta) * &c.backbone_weight * rat(1, 2);
        if !ok {
            failures.push(r.name.clone());
        }
        if let Err(v) = &r.verified {
            failures.push(format!("{}: {v}", r.name));
        }
    }
    outcome(&failures, summary(runs, |r| usize::from(!r.cert.m_star.is_empty()), "with nonempty M*"))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    for n in 4..=12 {
        for seed in 100..112u64 {
            let inst = gen_euclidean_power(n, &rat(1, 1), seed).unwrap();
            let cert = match run_pipeline(&inst, None) {
                Ok(p) => p.certificate,
                Err(e) => {
                    failures.push(format!("{}: {e}", inst.name()));
                    continue;
                }
            };
            if cert.beta != rat(1, 1) {
                failures.push(format!("{}: beta {}", inst.name(), format_rational(&cert.beta)));
            }
            let opt = exact_tsp(&inst).unwrap().weight;
            let ratio = &cert.tour_weight / &opt;
            if ratio > rat(3, 2) {
                failures.push(format!("{}: ratio {}", inst.name(), format_rational(&ratio)));
            }
            ratios.push(ratio);
        }
    }
    let k = ratios.len();
    let mean: Rational = ratios.iter().sum::<Rational>() / rat(k as i64, 1);
    let max = ratios.iter().max().cloned().unwrap_or_else(|| rat(0, 1));
    outcome(&failures, format!("{k} instances, mean ratio {}, max ratio {}", to_decimal(&mean, 4), to_decimal(&max, 4)))
}

fn cli(args: &[&str], env_threads: Option<&str>) -> (i32, String) {
    match env_threads {
        Some(t) => std::env::set_var("BTSP_THREADS", t),
        None => std::env::remove_var("BTSP_THREADS"),
    }
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["btsp"];
    argv.extend_from_slice(args);
    let code = btsp::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut failures = Vec::new();
    let mut solved = 0;
    let gens: [(&str, &str, &str); 4] =
        [("uniform-beta", "--beta", "3/2"), ("uniform-beta", "--beta", "3"), ("euclidean-power", "--p", "1"), ("euclidean-power", "--p", "2")];
    for (i, (kind, flag, param)) in gens.iter().enumerate() {
        for n in ["7", "12", "20"] {
            let inst = path(&format!("i{i}-{n}.btsp"));
            let (code, text) = cli(&["gen", "--kind", kind, "--n", n, flag, param, "--seed", "9", "--out", &inst], None);
            if code != 0 {
                failures.push(format!("gen: {text}"));
                continue;
            }
            let mut certs = Vec::new();
            let mut outputs = Vec::new();
            for round in 0..3 {
                let cert = path(&format!("i{i}-{n}-{round}.cert"));
                let (code, text) = cli(&["solve", &inst, "--certify", "--cert-out", &cert], None);
                if code != 0 {
                    failures.push(format!("solve {inst}: {text}"));
                }
                certs.push(std::fs::read(&cert).unwrap_or_default());
                outputs.push(text);
            }
            solved += 1;
            if certs.windows(2).any(|w| w[0] != w[1]) || outputs.windows(2).any(|w| w[0] != w[1]) {
                failures.push(format!("{inst}: repeated solves differ"));
            }
        }
    }
    let mut benches = Vec::new();
    for threads in ["1", "2", "4", "8"] {
        let csv = path(&format!("bench-{threads}.csv"));
        let (code, text) = cli(
            &["bench", "--sizes", "5..9", "--seeds", "1..3", "--betas", "1,2", "--check-exact", "--certify", "--csv", &csv],
            Some(threads),
        );
        if code != 0 {
            failures.push(format!("bench with {threads} threads: {text}"));
        }
        let rows = std::fs::read_to_string(&csv).unwrap_or_default();
        if rows.lines().count() != 1 + 5 * 3 * 2 {
            failures.push(format!("bench csv has {} lines", rows.lines().count()));
        }
        benches.push((text, rows));
    }
    std::env::remove_var("BTSP_THREADS");
    if benches.windows(2).any(|w| w[0] != w[1]) {
        failures.push("bench output depends on the thread count".into());
    }
    outcome(&failures, format!("{solved} instances solved 3 times each, bench compared at 1/2/4/8 threads"))
}

fn main() {
    let start = Instant::now();
    let instances = corpus();
    let runs = solve_corpus(&instances);
    let shared = |f: fn(&[Run]) -> Outcome| match &runs {
        Ok(r) => f(r),
        Err(e) => Outcome { pass: false, detail: format!("pipeline failed: {e}") },
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("end-to-end bound c(K'') <= (3b/4 + 3b^2/4) opt", Box::new(move || shared(criterion_1))),
        ("backbone bound and structure", Box::new(move || shared(criterion_2))),
        ("1-tree bicriteria against exhaustive search", Box::new(criterion_3)),
        ("parity b-matching against exhaustive search", Box::new(criterion_4)),
        ("blossom matching against exhaustive search", Box::new(criterion_5)),
        ("structural claims on every run", Box::new(move || shared(criterion_6))),
        ("weight-accounting chain", Box::new(move || shared(criterion_7))),
        ("metric sanity (beta = 1)", Box::new(criterion_8)),
        ("determinism of solve and bench", Box::new(criterion_9)),
    ];
    let mut all = true;
    for (i, (what, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        all &= o.pass;
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag} {what}: {} ({:.1?})", i + 1, o.detail, t.elapsed());
    }
    println!("acceptance {} in {:.1?}", if all { "PASS" } else { "FAIL" }, start.elapsed());
    if !all {
        std::process::exit(1);
    }
}
