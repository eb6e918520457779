//! The whole tour construction and its checkable certificate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backbone::{build_backbone_parts, euler_orient, ArcSequence, BackboneEdge, EulerianBackbone};
use crate::error::{Error, Result};
use crate::instance::{effective_beta, Instance, Vertex};
use crate::onetree::OneTree;
use crate::rational::{rat, Rational};

use super::grow::{grow_cactus_observed, Cactus};
use super::orient::{finalize_tour, orient_blocks, Decision, KPrime, Tour};
use super::{BiDigraph, TraceEvent};

/// An edge by id. Tour edges have `u < v`; `K′` arcs are stored `tail, head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TourEdge {
    pub id: usize,
    pub u: Vertex,
    pub v: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Families {
    /// `K′` arc id to backbone edge ids.
    pub p_prime: BTreeMap<usize, Vec<usize>>,
    /// Tour edge id to `K′` arc ids.
    pub p_second: BTreeMap<usize, Vec<usize>>,
    /// Tour edge id to backbone edge ids.
    pub p: BTreeMap<usize, Vec<usize>>,
    pub decisions: Vec<Decision>,
}

impl Families {
    pub fn e_cheap(&self) -> Vec<usize> {
        self.decisions.iter().map(|d| d.cheap).collect()
    }

    pub fn e_expensive(&self) -> Vec<usize> {
        self.decisions.iter().map(|d| d.expensive).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TourCertificate {
    pub n: usize,
    pub beta: Rational,
    /// Vertex order of the tour, from 0.
    pub order: Vec<Vertex>,
    pub tour: Vec<TourEdge>,
    pub backbone: Vec<BackboneEdge>,
    pub k_prime: Vec<TourEdge>,
    pub families: Families,
    pub tour_weight: Rational,
    pub backbone_weight: Rational,
    /// Per decision, the backbone class of smaller weight (ties to the
    /// cheap edge's class); sorted.
    pub m_star: Vec<usize>,
    pub m_star_weight: Rational,
    pub m_prime_star_weight: Rational,
    /// Union of the classes of the cheap edges; sorted. Reported only.
    pub m_literal: Vec<usize>,
    pub m_literal_weight: Rational,
    pub opt: Option<Rational>,
}

/// `3β/4 + 3β²/4`.
pub fn approximation_factor(beta: &Rational) -> Rational {
    rat(3, 4) * beta + rat(3, 4) * beta * beta
}

impl TourCertificate {
    pub fn factor(&self) -> Rational {
        approximation_factor(&self.beta)
    }

    /// `factor · opt` when `opt` is known.
    pub fn bound(&self) -> Option<Rational> {
        self.opt.as_ref().map(|o| self.factor() * o)
    }

    pub fn ratio(&self) -> Option<Rational> {
        self.opt.as_ref().filter(|o| !o.is_zero()).map(|o| &self.tour_weight / o)
    }

    pub fn with_opt(mut self, opt: Rational) -> Self {
        self.opt = Some(opt);
        self
    }
}

/// Optional structural self-checks while the pipeline runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Audit {
    pub seed: u64,
    /// Random vertex sets tested for Euler cut balance.
    pub subsets: usize,
    /// Random orders tried for the contraction.
    pub orders: usize,
}

impl Default for Audit {
    fn default() -> Self {
        Audit { seed: 0, subsets: 50, orders: 10 }
    }
}

/// Every intermediate object of one run.
#[derive(Debug, Clone)]
pub struct Pipeline {
    /// `None` when the run started from a given backbone.
    pub tree: Option<OneTree>,
    pub backbone: EulerianBackbone,
    pub euler: ArcSequence,
    pub contracted: BiDigraph,
    pub cactus: Cactus,
    pub k_prime: KPrime,
    pub tour: Tour,
    pub certificate: TourCertificate,
    pub trace: Vec<TraceEvent>,
    /// Names of the audit checks that ran (and passed).
    pub audited: Vec<&'static str>,
}

pub fn run_alg_beta(inst: &Instance) -> Result<TourCertificate> {
    Ok(run_pipeline(inst, None)?.certificate)
}

pub fn run_pipeline(inst: &Instance, audit: Option<&Audit>) -> Result<Pipeline> {
    effective_beta(inst)?;
    let (backbone, tree) = build_backbone_parts(inst)?;
    let mut run = run_pipeline_on(inst, backbone, audit)?;
    run.tree = Some(tree);
    Ok(run)
}

/// The pipeline after the backbone step, starting from `backbone`.
pub fn run_pipeline_on(inst: &Instance, backbone: EulerianBackbone, audit: Option<&Audit>) -> Result<Pipeline> {
    let beta = effective_beta(inst)?;
    let mut trace = Vec::new();
    let mut audited = Vec::new();
    backbone.validate()?;
    let euler = euler_orient(&backbone)?;
    let mut rng = ChaCha8Rng::seed_from_u64(audit.map_or(0, |a| a.seed));
    let n = inst.n();
    if let Some(a) = audit {
        for _ in 0..a.subsets {
            let inside: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let (out, into) = euler.cut_balance(&inside);
            if out != into {
                return Err(Error::invariant(format!("Euler orientation cut imbalance {out} vs {into}")));
            }
        }
        audited.push("cut-balance");
    }
    let oriented = BiDigraph::from_euler(&backbone, &euler)?;
    let mut contracted = oriented.clone();
    for v in contracted.contract_to_cycles(inst)? {
        let arc = contracted.arc(contracted.join_id(v)).unwrap();
        let (_, replaced) = arc.provenance().unwrap();
        trace.push(TraceEvent::Rule1 { stage: "contract", vertex: v, replaced, arc: arc.id, ends: arc.ends });
    }
    if let Some(a) = audit {
        for _ in 0..a.orders {
            let mut order: Vec<Vertex> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut other = oriented.clone();
            other.contract_in_order(inst, &order)?;
            if other != contracted {
                return Err(Error::invariant("contraction depends on the processing order"));
            }
        }
        audited.push("contraction-order");
    }
    let check_each = audit.is_some();
    let cactus = grow_cactus_observed(contracted.clone(), &euler, &mut trace, |k| if check_each { k.check() } else { Ok(()) })?;
    if check_each {
        audited.push("cactus-each-iteration");
        audited.push("one-exit-point");
    }
    let k_prime = orient_blocks(&cactus, &mut trace)?;
    let tour = finalize_tour(inst, &k_prime, &mut trace)?;
    if check_each {
        audited.push("hamiltonian");
    }
    let certificate = build_certificate(inst, beta, &backbone, &k_prime, &tour);
    Ok(Pipeline { tree: None, backbone, euler, contracted, cactus, k_prime, tour, certificate, trace, audited })
}

fn class_weight(backbone: &[BackboneEdge], class: &[usize]) -> Rational {
    class.iter().map(|&h| &backbone[h].weight).sum()
}

/// `(M*, M)`: argmin classes per decision, and the classes of the cheap
/// edges.
fn m_sets(backbone: &[BackboneEdge], families: &Families) -> (Vec<usize>, Vec<usize>) {
    let mut star = Vec::new();
    let mut literal = Vec::new();
    for d in &families.decisions {
        let cheap = &families.p_prime[&d.cheap];
        let expensive = &families.p_prime[&d.expensive];
        if class_weight(backbone, expensive) < class_weight(backbone, cheap) {
            star.extend(expensive);
        } else {
            star.extend(cheap);
        }
        literal.extend(cheap);
    }
    star.sort_unstable();
    literal.sort_unstable();
    (star, literal)
}

fn build_certificate(
    inst: &Instance,
    beta: Rational,
    backbone: &EulerianBackbone,
    kp: &KPrime,
    tour: &Tour,
) -> TourCertificate {
    let edges = backbone.edges().to_vec();
    let families = Families {
        p_prime: kp.p_prime.clone(),
        p_second: tour.p_second.clone(),
        p: tour.p.clone(),
        decisions: kp.decisions.clone(),
    };
    let (m_star, m_literal) = m_sets(&edges, &families);
    let m_star_weight = class_weight(&edges, &m_star);
    let m_literal_weight = class_weight(&edges, &m_literal);
    let backbone_weight = backbone.weight();
    let tour_edges = tour
        .graph
        .arcs()
        .map(|a| {
            let (u, v) = a.ends.pair();
            TourEdge { id: a.id, u, v }
        })
        .collect();
    let k_prime = kp
        .graph
        .arcs()
        .map(|a| {
            let (u, v) = a.endpoints();
            TourEdge { id: a.id, u, v }
        })
        .collect();
    TourCertificate {
        n: inst.n(),
        beta,
        order: tour.order.clone(),
        tour: tour_edges,
        k_prime,
        families,
        tour_weight: tour.weight.clone(),
        m_prime_star_weight: &backbone_weight - &m_star_weight,
        backbone_weight,
        backbone: edges,
        m_star,
        m_star_weight,
        m_literal,
        m_literal_weight,
        opt: None,
    }
}

/// A failed certificate check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

impl std::error::Error for Violation {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    /// Names of the checks that passed, in order.
    pub checks: Vec<&'static str>,
}

fn fail<T>(check: &'static str, detail: impl Into<String>) -> std::result::Result<T, Violation> {
    Err(Violation { check, detail: detail.into() })
}

/// Whether the edges can be ordered and oriented into a walk from `s` to
/// `t` using each exactly once.
fn is_trail(edges: &[(Vertex, Vertex)], s: Vertex, t: Vertex) -> bool {
    fn go(edges: &[(Vertex, Vertex)], used: &mut Vec<bool>, at: Vertex, t: Vertex, left: usize) -> bool {
        if left == 0 {
            return at == t;
        }
        for i in 0..edges.len() {
            if used[i] {
                continue;
            }
            let (a, b) = edges[i];
            let next = if a == at {
                b
            } else if b == at {
                a
            } else {
                continue;
            };
            used[i] = true;
            if go(edges, used, next, t, left - 1) {
                used[i] = false;
                return true;
            }
            used[i] = false;
        }
        false
    }
    go(edges, &mut vec![false; edges.len()], s, t, edges.len())
}

fn check_partition(
    check: &'static str,
    classes: &BTreeMap<usize, Vec<usize>>,
    universe: &BTreeSet<usize>,
    max: usize,
) -> std::result::Result<(), Violation> {
    let mut seen = BTreeSet::new();
    for (key, class) in classes {
        if class.is_empty() || class.len() > max {
            return fail(check, format!("class {key} has {} members", class.len()));
        }
        for x in class {
            if !universe.contains(x) {
                return fail(check, format!("class {key} names unknown element {x}"));
            }
            if !seen.insert(*x) {
                return fail(check, format!("element {x} appears in two classes (again in {key})"));
            }
        }
    }
    if let Some(x) = universe.difference(&seen).next() {
        return fail(check, format!("element {x} is in no class"));
    }
    Ok(())
}

/// Re-checks a certificate against `inst` in exact arithmetic.
pub fn verify_certificate(inst: &Instance, cert: &TourCertificate) -> std::result::Result<VerifyReport, Violation> {
    let mut checks = Vec::new();
    let n = inst.n();
    if cert.n != n {
        return fail("instance", format!("certificate is for n = {}, instance has n = {n}", cert.n));
    }
    match effective_beta(inst) {
        Ok(b) if b == cert.beta => {}
        Ok(b) => return fail("beta", format!("certificate uses {}, instance has {}", cert.beta, b)),
        Err(e) => return fail("beta", e.to_string()),
    }
    checks.push("beta");

    // tour
    let mut order = cert.order.clone();
    order.sort_unstable();
    if order != (0..n).collect::<Vec<_>>() || cert.tour.len() != n {
        return fail("tour", "order is not a permutation or edge count differs from n");
    }
    let mut tour_pairs: Vec<(Vertex, Vertex)> = cert.tour.iter().map(|e| (e.u, e.v)).collect();
    tour_pairs.sort_unstable();
    let mut walked: Vec<(Vertex, Vertex)> = (0..n)
        .map(|i| {
            let (a, b) = (cert.order[i], cert.order[(i + 1) % n]);
            (a.min(b), a.max(b))
        })
        .collect();
    walked.sort_unstable();
    if tour_pairs != walked {
        return fail("tour", "tour edges do not match the vertex order");
    }
    let tour_weight: Rational = cert.tour.iter().map(|e| inst.weight(e.u, e.v)).sum();
    if tour_weight != cert.tour_weight || inst.tour_weight(&cert.order) != tour_weight {
        return fail("tour", format!("tour weight is {tour_weight}, certificate says {}", cert.tour_weight));
    }
    checks.push("tour");

    // backbone
    for (i, e) in cert.backbone.iter().enumerate() {
        if e.id != i || e.u >= n || e.v >= n || e.u == e.v || &e.weight != inst.weight(e.u, e.v) {
            return fail("backbone", format!("bad backbone edge {i}"));
        }
    }
    let listed: Vec<_> = cert.backbone.iter().map(|e| (e.u, e.v, e.source)).collect();
    let h = match EulerianBackbone::from_edges(inst, &listed) {
        Ok(h) => h,
        Err(e) => return fail("backbone", e.to_string()),
    };
    if h.weight() != cert.backbone_weight {
        return fail("backbone", format!("weight is {}, certificate says {}", h.weight(), cert.backbone_weight));
    }
    checks.push("backbone");

    // families
    let h_ids: BTreeSet<usize> = (0..cert.backbone.len()).collect();
    let k_ids: BTreeSet<usize> = cert.k_prime.iter().map(|a| a.id).collect();
    let t_ids: BTreeSet<usize> = cert.tour.iter().map(|e| e.id).collect();
    let fam = &cert.families;
    if fam.p_prime.keys().copied().collect::<BTreeSet<_>>() != k_ids {
        return fail("p-prime", "classes are not indexed by the K' arcs");
    }
    check_partition("p-prime", &fam.p_prime, &h_ids, 2)?;
    if fam.p_second.keys().copied().collect::<BTreeSet<_>>() != t_ids {
        return fail("p-second", "classes are not indexed by the tour edges");
    }
    check_partition("p-second", &fam.p_second, &k_ids, 2)?;
    if fam.p.keys().copied().collect::<BTreeSet<_>>() != t_ids {
        return fail("p", "classes are not indexed by the tour edges");
    }
    check_partition("p", &fam.p, &h_ids, 3)?;
    for (f, class) in &fam.p_second {
        let mut composed: Vec<usize> = class.iter().flat_map(|g| fam.p_prime[g].iter().copied()).collect();
        composed.sort_unstable();
        let mut stated = fam.p[f].clone();
        stated.sort_unstable();
        if composed != stated {
            return fail("p", format!("class of tour edge {f} is not the union of its P' classes"));
        }
    }
    checks.push("partitions");

    let tour_edge: BTreeMap<usize, TourEdge> = cert.tour.iter().map(|e| (e.id, *e)).collect();
    for (f, class) in &fam.p {
        let e = tour_edge[f];
        let edges: Vec<(Vertex, Vertex)> = class.iter().map(|&h| (cert.backbone[h].u, cert.backbone[h].v)).collect();
        if !is_trail(&edges, e.u, e.v) {
            return fail("p-paths", format!("class of tour edge {f} is not a walk from {} to {}", e.u, e.v));
        }
    }
    checks.push("p-paths");

    let cheap: BTreeSet<usize> = fam.e_cheap().into_iter().collect();
    let expensive: BTreeSet<usize> = fam.e_expensive().into_iter().collect();
    if cheap.len() != fam.decisions.len() || cheap.intersection(&expensive).next().is_some() {
        return fail("decisions", "E and E' overlap or repeat");
    }
    let k_arc: BTreeMap<usize, TourEdge> = cert.k_prime.iter().map(|a| (a.id, *a)).collect();
    for d in &fam.decisions {
        let (Some(e), Some(e2)) = (k_arc.get(&d.cheap), k_arc.get(&d.expensive)) else {
            return fail("decisions", format!("decision at {} names unknown arcs", d.exit));
        };
        if e.u != d.exit || ![e2.u, e2.v].contains(&d.exit) {
            return fail("decisions", format!("decision at {} does not start at its exit point", d.exit));
        }
        if inst.weight(e.u, e.v) > inst.weight(e2.u, e2.v) {
            return fail("decisions", format!("cheap arc {} costs more than {}", d.cheap, d.expensive));
        }
    }
    checks.push("decisions");

    for (f, class) in &fam.p_second {
        if class.len() != 2 {
            continue;
        }
        let e = tour_edge[f];
        let (a, b) = (k_arc[&class[0]], k_arc[&class[1]]);
        let (orig, via_cheap) = if cheap.contains(&a.id) { (b, a) } else { (a, b) };
        let shared = [orig.u, orig.v].into_iter().find(|x| [via_cheap.u, via_cheap.v].contains(x));
        let ok = cheap.contains(&via_cheap.id)
            && orig.id < cert.backbone.len()
            && shared.is_some_and(|v| {
                let s = if orig.u == v { orig.v } else { orig.u };
                let t = if via_cheap.u == v { via_cheap.v } else { via_cheap.u };
                (s.min(t), s.max(t)) == (e.u, e.v)
            });
        if !ok {
            return fail("joined-edges", format!("tour edge {f} is not s-v-t with {{s,v}} in H and {{v,t}} in E"));
        }
    }
    checks.push("joined-edges");

    let (m_star, m_literal) = m_sets(&cert.backbone, fam);
    if m_star != cert.m_star || m_literal != cert.m_literal {
        return fail("m-star", "M* or M differs from the recomputed set");
    }
    let w_star = class_weight(&cert.backbone, &m_star);
    let w_rest = &cert.backbone_weight - &w_star;
    if w_star != cert.m_star_weight || w_rest != cert.m_prime_star_weight {
        return fail("m-star", "stated weights of M* or M'* are wrong");
    }
    if cert.m_literal_weight != class_weight(&cert.backbone, &m_literal) {
        return fail("m-star", "stated weight of M is wrong");
    }
    checks.push("m-star");
    if w_star > w_rest {
        return fail("weight-chain", format!("c(M*) = {w_star} exceeds c(M'*) = {w_rest}"));
    }
    let beta = &cert.beta;
    let charged = beta * &w_rest + beta * beta * &w_star;
    if cert.tour_weight > charged {
        return fail("weight-chain", format!("tour weight {} exceeds β c(M'*) + β² c(M*) = {charged}", cert.tour_weight));
    }
    let cap = (beta + beta * beta) * &cert.backbone_weight * rat(1, 2);
    if charged > cap {
        return fail("weight-chain", format!("β c(M'*) + β² c(M*) = {charged} exceeds (β+β²) c(H)/2 = {cap}"));
    }
    checks.push("weight-chain");

    if let Some(bound) = cert.bound() {
        if cert.tour_weight > bound {
            return fail("approximation", format!("tour weight {} exceeds {bound}", cert.tour_weight));
        }
        checks.push("approximation");
    }
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::*;
    use crate::oracles::exact_tsp;
    use crate::rational::int;
    use proptest::prelude::*;

    #[test]
    fn fixture_b_certificate() {
        let inst = fixture_b();
        let cert = run_alg_beta(&inst).unwrap();
        assert_eq!(cert.tour_weight, int(5));
        assert!(cert.m_star.is_empty());
        assert_eq!(cert.m_star_weight, int(0));
        let cert = cert.with_opt(int(5));
        assert_eq!(cert.ratio(), Some(int(1)));
        verify_certificate(&inst, &cert).unwrap();
    }

    #[test]
    fn fixture_c_bound() {
        let inst = fixture_c();
        let opt = exact_tsp(&inst).unwrap().weight;
        let cert = run_pipeline(&inst, Some(&Audit::default())).unwrap().certificate.with_opt(opt);
        assert_eq!(cert.beta, rat(5, 3));
        assert_eq!(cert.bound(), Some(rat(100, 3)));
        let report = verify_certificate(&inst, &cert).unwrap();
        assert!(report.checks.contains(&"approximation"));
    }

    #[test]
    fn tampered_certificate_fails_partition() {
        let inst = fixture_c();
        let mut cert = run_alg_beta(&inst).unwrap();
        let key = *cert.families.p.keys().next().unwrap();
        cert.families.p.get_mut(&key).unwrap().pop();
        let v = verify_certificate(&inst, &cert).unwrap_err();
        assert_eq!(v.check, "p");
    }

    #[test]
    fn fixture_e_joined_class() {
        let inst = crate::backbone::tests::fixture_e_instance();
        let h = crate::backbone::tests::fixture_e(&inst);
        let run = run_pipeline_on(&inst, h, Some(&Audit::default())).unwrap();
        let cert = &run.certificate;
        verify_certificate(&inst, cert).unwrap();
        let joined: Vec<_> = cert.families.p.iter().filter(|(_, c)| c.len() == 3).collect();
        assert_eq!(joined.len(), 1);
        let (f, class) = joined[0];
        let e = cert.tour.iter().find(|e| e.id == *f).unwrap();
        assert_eq!((e.u, e.v), (3, 4));
        let edges: Vec<_> = class.iter().map(|&h| (cert.backbone[h].u, cert.backbone[h].v)).collect();
        assert!(is_trail(&edges, 3, 4));
        let lines: Vec<String> = run.trace.iter().map(|t| t.to_string()).collect();
        assert_eq!(
            lines,
            vec![
                "rule1 stage=contract vertex=1 replaced=1,4 arc=9 ends={2-,4-}",
                "rule1 stage=contract vertex=2 replaced=2,7 arc=10 ends={3-,1-}",
                "entry-site arc=10 ends={3-,1-} vertex=2 block=0",
                "reverse arc=10 restored=2,7",
                "exit-point vertex=2 block=1",
                "orient-root block=0 start=0 first=0",
                "orient block=1 start=2 cheap=9 expensive=6",
                "rule1 stage=finalize vertex=2 replaced=2,9 arc=16 ends={3-,4-}",
            ]
        );
    }

    fn random_backbone_run(n: usize, seed: u64) -> Pipeline {
        let inst = match seed % 3 {
            0 => crate::instance::gen_uniform_beta(n, &rat(2, 1), seed).unwrap(),
            1 => crate::instance::gen_euclidean_power(n, &rat(1, 1), seed).unwrap(),
            _ => crate::instance::gen_euclidean_power(n, &rat(2, 1), seed).unwrap(),
        };
        let h = crate::backbone::random_backbone(&inst, seed).unwrap();
        let run = run_pipeline_on(&inst, h, Some(&Audit { seed, ..Audit::default() })).unwrap();
        if let Err(v) = verify_certificate(&inst, &run.certificate) {
            panic!("n={n} seed={seed}: {v}");
        }
        run
    }

    #[test]
    fn random_backbones_reach_every_stage() {
        let runs: Vec<Pipeline> = (0..60).map(|s| random_backbone_run(4 + (s as usize) % 9, s)).collect();
        let decisions: usize = runs.iter().map(|r| r.certificate.families.decisions.len()).sum();
        let nonempty = runs.iter().filter(|r| !r.certificate.m_star.is_empty()).count();
        assert!(decisions >= 10, "only {decisions} decisions");
        assert!(nonempty >= 3, "only {nonempty} runs with nonempty M*");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn random_backbones_certify(n in 3usize..16, seed in any::<u64>()) {
            random_backbone_run(n, seed);
        }
    }

    #[test]
    fn trails() {
        assert!(is_trail(&[(3, 2), (1, 2), (1, 4)], 3, 4));
        assert!(!is_trail(&[(3, 2), (1, 4)], 3, 4));
        assert!(is_trail(&[(0, 1)], 1, 0));
    }

    #[test]
    fn negative_weights_are_rejected() {
        let inst = Instance::from_fn("neg", 4, |u, v| int(u as i64 - v as i64)).unwrap();
        assert!(matches!(run_alg_beta(&inst), Err(Error::Domain(_))));
    }
}
