//! Text forms of tours and certificates.
//!
//! `.tour`: one vertex per line, in tour order. `#` starts a comment.
//!
//! `.cert`:
//!
//! ```text
//! BTSP-CERT 1
//! N 4
//! BETA 1
//! ORDER 0 1 2 3
//! TOUR-WEIGHT 4
//! BACKBONE-WEIGHT 4
//! M-STAR-WEIGHT 0
//! M-PRIME-STAR-WEIGHT 4
//! M-LITERAL-WEIGHT 0
//! OPT 4
//! H 0 0 1 1 tree
//! K 0 0 1
//! T 0 0 1
//! PP 0 : 0
//! PS 0 : 0
//! P 0 : 0
//! D 2 9 6
//! M-STAR
//! M-LITERAL
//! INSTANCE
//! BTSP 1
//! ...
//! ```
//!
//! `H id u v weight source` lists backbone edges, `K id tail head` the arcs
//! of `K′`, `T id u v` the tour edges (`u < v`). `PP`, `PS` and `P` give the
//! classes of `P′`, `P″` and `P`; `D exit cheap expensive` one orientation
//! decision each. `OPT` is `none` when unknown. Everything after `INSTANCE`
//! is the instance in NATIVE form. Lines appear in exactly this order, so
//! writing is deterministic.

use std::fmt::Write as _;

use crate::backbone::{BackboneEdge, EdgeSource};
use crate::error::{Error, Result};
use crate::instance::{parse_instance, write_native, Format, Instance, Vertex};
use crate::rational::{format_rational, parse_rational, Rational};

use super::certificate::{Families, TourCertificate, TourEdge};
use super::orient::Decision;

pub fn write_tour(order: &[Vertex]) -> String {
    order.iter().map(|v| format!("{v}\n")).collect()
}

pub fn parse_tour(text: &str) -> Result<Vec<Vertex>> {
    let mut order = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        order.push(body.parse().map_err(|_| Error::parse(i + 1, 1, format!("invalid vertex `{body}`")))?);
    }
    Ok(order)
}

fn join(ids: &[usize]) -> String {
    ids.iter().map(|x| format!(" {x}")).collect()
}

pub fn write_certificate(inst: &Instance, cert: &TourCertificate) -> String {
    let mut out = String::from("BTSP-CERT 1\n");
    let r = format_rational;
    let _ = writeln!(out, "N {}", cert.n);
    let _ = writeln!(out, "BETA {}", r(&cert.beta));
    let _ = writeln!(out, "ORDER{}", join(&cert.order));
    let _ = writeln!(out, "TOUR-WEIGHT {}", r(&cert.tour_weight));
    let _ = writeln!(out, "BACKBONE-WEIGHT {}", r(&cert.backbone_weight));
    let _ = writeln!(out, "M-STAR-WEIGHT {}", r(&cert.m_star_weight));
    let _ = writeln!(out, "M-PRIME-STAR-WEIGHT {}", r(&cert.m_prime_star_weight));
    let _ = writeln!(out, "M-LITERAL-WEIGHT {}", r(&cert.m_literal_weight));
    let _ = writeln!(out, "OPT {}", cert.opt.as_ref().map_or("none".to_string(), r));
    for e in &cert.backbone {
        let _ = writeln!(out, "H {} {} {} {} {}", e.id, e.u, e.v, r(&e.weight), e.source);
    }
    for a in &cert.k_prime {
        let _ = writeln!(out, "K {} {} {}", a.id, a.u, a.v);
    }
    for e in &cert.tour {
        let _ = writeln!(out, "T {} {} {}", e.id, e.u, e.v);
    }
    let fam = &cert.families;
    for (key, map) in [("PP", &fam.p_prime), ("PS", &fam.p_second), ("P", &fam.p)] {
        for (id, class) in map {
            let _ = writeln!(out, "{key} {id} :{}", join(class));
        }
    }
    for d in &fam.decisions {
        let _ = writeln!(out, "D {} {} {}", d.exit, d.cheap, d.expensive);
    }
    let _ = writeln!(out, "M-STAR{}", join(&cert.m_star));
    let _ = writeln!(out, "M-LITERAL{}", join(&cert.m_literal));
    out.push_str("INSTANCE\n");
    out.push_str(&write_native(inst));
    out
}

struct Line<'a> {
    no: usize,
    toks: Vec<&'a str>,
}

impl Line<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.no, 1, msg)
    }

    fn arity(&self, k: usize) -> Result<()> {
        if self.toks.len() == k {
            Ok(())
        } else {
            Err(self.err(format!("`{}` takes {} fields, found {}", self.toks[0], k - 1, self.toks.len() - 1)))
        }
    }

    fn num(&self, i: usize) -> Result<usize> {
        let t = self.toks.get(i).ok_or_else(|| self.err("missing field"))?;
        t.parse().map_err(|_| self.err(format!("invalid integer `{t}`")))
    }

    fn rat(&self, i: usize) -> Result<Rational> {
        let t = self.toks.get(i).ok_or_else(|| self.err("missing field"))?;
        parse_rational(t).ok_or_else(|| self.err(format!("invalid rational `{t}`")))
    }

    fn nums_from(&self, i: usize) -> Result<Vec<usize>> {
        (i..self.toks.len()).map(|j| self.num(j)).collect()
    }

    fn class(&self) -> Result<(usize, Vec<usize>)> {
        if self.toks.get(2) != Some(&":") {
            return Err(self.err(format!("`{}` expects `id : members`", self.toks[0])));
        }
        Ok((self.num(1)?, self.nums_from(3)?))
    }
}

/// Parses a `.cert` file into the embedded instance and the certificate.
/// Only the syntax is checked here; see `verify_certificate`.
pub fn parse_certificate(text: &str) -> Result<(Instance, TourCertificate)> {
    let (head, inst_text, inst_line) = match text.find("\nINSTANCE\n") {
        Some(i) => (&text[..i], &text[i + "\nINSTANCE\n".len()..], text[..i].lines().count() + 2),
        None => return Err(Error::parse(text.lines().count().max(1), 1, "missing INSTANCE section")),
    };
    let inst = parse_instance(inst_text.as_bytes(), Format::Native).map_err(|e| match e {
        Error::Parse { line, column, message } => Error::parse(line + inst_line - 1, column, message),
        other => other,
    })?;
    let mut lines = head.lines().enumerate().filter_map(|(i, l)| {
        let toks: Vec<&str> = l.split('#').next().unwrap_or("").split_whitespace().collect();
        (!toks.is_empty()).then_some(Line { no: i + 1, toks })
    });
    let first = lines.next().ok_or_else(|| Error::parse(1, 1, "missing header `BTSP-CERT 1`"))?;
    if first.toks != ["BTSP-CERT", "1"] {
        return Err(first.err("expected header `BTSP-CERT 1`"));
    }
    let mut n = None;
    let mut beta = None;
    let mut order = None;
    let mut weights: [Option<Rational>; 5] = Default::default();
    let mut opt: Option<Option<Rational>> = None;
    let mut backbone = Vec::new();
    let mut k_prime = Vec::new();
    let mut tour = Vec::new();
    let mut families = Families::default();
    let mut m_star = None;
    let mut m_literal = None;
    for line in lines {
        let slot = |name: &str| {
            ["TOUR-WEIGHT", "BACKBONE-WEIGHT", "M-STAR-WEIGHT", "M-PRIME-STAR-WEIGHT", "M-LITERAL-WEIGHT"]
                .iter()
                .position(|k| *k == name)
        };
        match line.toks[0] {
            "N" => {
                line.arity(2)?;
                n = Some(line.num(1)?);
            }
            "BETA" => {
                line.arity(2)?;
                beta = Some(line.rat(1)?);
            }
            "ORDER" => order = Some(line.nums_from(1)?),
            key if slot(key).is_some() => {
                line.arity(2)?;
                weights[slot(key).unwrap()] = Some(line.rat(1)?);
            }
            "OPT" => {
                line.arity(2)?;
                opt = Some(if line.toks[1] == "none" { None } else { Some(line.rat(1)?) });
            }
            "H" => {
                line.arity(6)?;
                let source = match line.toks[5] {
                    "tree" => EdgeSource::Tree,
                    "matching" => EdgeSource::Matching,
                    other => return Err(line.err(format!("unknown edge source `{other}`"))),
                };
                backbone.push(BackboneEdge {
                    id: line.num(1)?,
                    u: line.num(2)?,
                    v: line.num(3)?,
                    weight: line.rat(4)?,
                    source,
                });
            }
            "K" | "T" => {
                line.arity(4)?;
                let e = TourEdge { id: line.num(1)?, u: line.num(2)?, v: line.num(3)? };
                if line.toks[0] == "K" { k_prime.push(e) } else { tour.push(e) }
            }
            "PP" | "PS" | "P" => {
                let (id, class) = line.class()?;
                let map = match line.toks[0] {
                    "PP" => &mut families.p_prime,
                    "PS" => &mut families.p_second,
                    _ => &mut families.p,
                };
                if map.insert(id, class).is_some() {
                    return Err(line.err(format!("class {id} listed twice")));
                }
            }
            "D" => {
                line.arity(4)?;
                families.decisions.push(Decision { exit: line.num(1)?, cheap: line.num(2)?, expensive: line.num(3)? });
            }
            "M-STAR" => m_star = Some(line.nums_from(1)?),
            "M-LITERAL" => m_literal = Some(line.nums_from(1)?),
            other => return Err(line.err(format!("unknown record `{other}`"))),
        }
    }
    let end = head.lines().count();
    let missing = |what: &str| Error::parse(end, 1, format!("missing {what} line"));
    let [tour_weight, backbone_weight, m_star_weight, m_prime_star_weight, m_literal_weight] = weights;
    let cert = TourCertificate {
        n: n.ok_or_else(|| missing("N"))?,
        beta: beta.ok_or_else(|| missing("BETA"))?,
        order: order.ok_or_else(|| missing("ORDER"))?,
        tour,
        backbone,
        k_prime,
        families,
        tour_weight: tour_weight.ok_or_else(|| missing("TOUR-WEIGHT"))?,
        backbone_weight: backbone_weight.ok_or_else(|| missing("BACKBONE-WEIGHT"))?,
        m_star: m_star.ok_or_else(|| missing("M-STAR"))?,
        m_star_weight: m_star_weight.ok_or_else(|| missing("M-STAR-WEIGHT"))?,
        m_prime_star_weight: m_prime_star_weight.ok_or_else(|| missing("M-PRIME-STAR-WEIGHT"))?,
        m_literal: m_literal.ok_or_else(|| missing("M-LITERAL"))?,
        m_literal_weight: m_literal_weight.ok_or_else(|| missing("M-LITERAL-WEIGHT"))?,
        opt: opt.ok_or_else(|| missing("OPT"))?,
    };
    Ok((inst, cert))
}

#[cfg(test)]
mod tests {
    use super::super::certificate::{run_alg_beta, verify_certificate};
    use super::*;
    use crate::instance::fixtures::fixture_c;
    use crate::instance::gen_uniform_beta;
    use crate::rational::rat;

    #[test]
    fn certificate_round_trip() {
        for inst in [fixture_c(), gen_uniform_beta(9, &rat(2, 1), 4).unwrap()] {
            let cert = run_alg_beta(&inst).unwrap().with_opt(rat(10, 1));
            let text = write_certificate(&inst, &cert);
            let (back_inst, back) = parse_certificate(&text).unwrap();
            assert_eq!(back, cert);
            assert_eq!(write_native(&back_inst), write_native(&inst));
            assert_eq!(write_certificate(&back_inst, &back), text);
            let plain = run_alg_beta(&inst).unwrap();
            let (i2, c2) = parse_certificate(&write_certificate(&inst, &plain)).unwrap();
            verify_certificate(&i2, &c2).unwrap();
        }
    }

    #[test]
    fn malformed_certificates() {
        let inst = fixture_c();
        let text = write_certificate(&inst, &run_alg_beta(&inst).unwrap());
        let no_instance = text.split("INSTANCE\n").next().unwrap();
        assert!(matches!(parse_certificate(no_instance), Err(Error::Parse { .. })));
        let bad = text.replacen("BETA", "BETA x", 1);
        assert!(matches!(parse_certificate(&bad), Err(Error::Parse { line: 3, .. })));
        let unknown = text.replacen("ORDER", "ORDR", 1);
        assert!(matches!(parse_certificate(&unknown), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn tour_round_trip() {
        let order = vec![0, 3, 1, 2];
        assert_eq!(parse_tour(&write_tour(&order)).unwrap(), order);
        assert_eq!(parse_tour("# c\n0\n\n2 # x\n1\n").unwrap(), vec![0, 2, 1]);
        assert!(parse_tour("0\nx\n").is_err());
    }
}
