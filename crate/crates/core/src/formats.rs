//! Text file formats: tournaments as 0/1 matrices, patterns as arc lists,
//! certificates as JSON documents that round-trip losslessly and can be
//! re-verified from the document plus the host file alone, and the bench
//! CSV rows.

use serde::{Deserialize, Serialize};

use crate::digraph::{Arc, Pattern, Tournament};
use crate::embed::{is_free, Budget, ModelKind};
use crate::error::Error;
use crate::hit::{BoundReport, EpOutcome, EpResult, TraceEvent};
use crate::oracle;
use crate::pack::Disjointness;

/// Parses the matrix format: first line n, then n rows of n characters,
/// '1' at row i column j meaning the arc (i, j).
pub fn parse_tournament(text: &str, file: &str) -> Result<Tournament, Error> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::parse(file, 1, 1, "empty file"))?;
    let n: usize = first
        .trim()
        .parse()
        .map_err(|_| Error::parse(file, 1, 1, "expected the vertex count"))?;
    let mut adj = vec![false; n * n];
    for i in 0..n {
        let (lineno, row) = lines
            .next()
            .ok_or_else(|| Error::parse(file, i + 2, 1, format!("expected {n} matrix rows")))?;
        let row = row.trim_end();
        if row.chars().count() != n {
            return Err(Error::parse(
                file,
                lineno + 1,
                row.chars().count() + 1,
                format!("row must have exactly {n} characters"),
            ));
        }
        for (j, ch) in row.chars().enumerate() {
            match ch {
                '1' => adj[i * n + j] = true,
                '0' => {}
                _ => {
                    return Err(Error::parse(
                        file,
                        lineno + 1,
                        j + 1,
                        format!("expected '0' or '1', found {ch:?}"),
                    ))
                }
            }
        }
    }
    for (extra_no, extra) in lines {
        if !extra.trim().is_empty() {
            return Err(Error::parse(file, extra_no + 1, 1, "trailing content"));
        }
    }
    Tournament::from_matrix(n, &adj).map_err(|e| match e {
        Error::Invalid(msg) => Error::parse(file, 1, 1, msg),
        other => other,
    })
}

pub fn write_tournament(t: &Tournament) -> String {
    let n = t.n();
    let mut out = format!("{n}\n");
    for i in 0..n {
        for j in 0..n {
            out.push(if t.has_arc(i, j) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Parses the pattern format: "digraph n" on the first line, then one
/// "u v" arc per line, 0-indexed.
pub fn parse_pattern(text: &str, file: &str) -> Result<Pattern, Error> {
    let mut arcs: Vec<Arc> = Vec::new();
    let mut n: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if n.is_none() {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("digraph") {
                return Err(Error::parse(file, lineno + 1, 1, "expected \"digraph n\""));
            }
            let count = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::parse(file, lineno + 1, 9, "expected the vertex count"))?;
            if parts.next().is_some() {
                return Err(Error::parse(file, lineno + 1, 1, "trailing tokens"));
            }
            n = Some(count);
            continue;
        }
        let mut parts = line.split_whitespace();
        let u: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::parse(file, lineno + 1, 1, "expected the arc tail"))?;
        let v: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::parse(file, lineno + 1, 1, "expected the arc head"))?;
        if parts.next().is_some() {
            return Err(Error::parse(file, lineno + 1, 1, "trailing tokens"));
        }
        arcs.push((u, v));
    }
    let n = n.ok_or_else(|| Error::parse(file, 1, 1, "empty file"))?;
    Pattern::new(n, &arcs).map_err(|e| match e {
        Error::Invalid(msg) => Error::parse(file, 1, 1, msg),
        Error::UnknownVertex(v) => {
            Error::parse(file, 1, 1, format!("vertex {v} out of range"))
        }
        other => other,
    })
}

pub fn write_pattern(p: &Pattern) -> String {
    let mut out = format!("digraph {}\n", p.n());
    for (u, v) in p.arcs() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// The certificate document: outcome, bound report, trace, the pattern it
/// talks about, the seed and tool version that produced it. JSON keeps it
/// diffable and byte-deterministic for golden tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub tool: String,
    pub seed: u64,
    pub mode: ModelKind,
    pub k: usize,
    pub host_vertices: usize,
    pub pattern_vertices: usize,
    pub pattern_arcs: Vec<Arc>,
    pub result: String,
    pub outcome: EpResult,
    pub report: BoundReport,
    pub trace: Vec<TraceEvent>,
    pub nodes_expanded: u64,
}

impl CertificateDocument {
    pub fn new(
        host: &Tournament,
        pattern: &Pattern,
        k: usize,
        mode: ModelKind,
        seed: u64,
        outcome: &EpOutcome,
    ) -> Self {
        CertificateDocument {
            tool: format!("eptour {}", env!("CARGO_PKG_VERSION")),
            seed,
            mode,
            k,
            host_vertices: host.n(),
            pattern_vertices: pattern.n(),
            pattern_arcs: pattern.arcs().to_vec(),
            result: match outcome.result {
                EpResult::Packing(_) => "packing".into(),
                EpResult::Hitting(_) => "hitting".into(),
            },
            outcome: outcome.result.clone(),
            report: outcome.report.clone(),
            trace: outcome.trace.clone(),
            nodes_expanded: outcome.nodes_expanded,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn pattern(&self) -> Result<Pattern, Error> {
        Pattern::new(self.pattern_vertices, &self.pattern_arcs)
    }

    /// Re-verification from the document plus the host: packings are
    /// audited copy by copy, hitting sets are checked by removing them and
    /// searching. With `deep`, the brute-force oracles corroborate within
    /// their caps.
    pub fn verify(&self, host: &Tournament, deep: bool) -> Result<Vec<String>, Error> {
        let mut violations = Vec::new();
        if host.n() != self.host_vertices {
            violations.push(format!(
                "host has {} vertices, certificate says {}",
                host.n(),
                self.host_vertices
            ));
            return Ok(violations);
        }
        let pattern = self.pattern()?;
        match &self.outcome {
            EpResult::Packing(cert) => {
                if cert.models.len() < self.k {
                    violations.push(format!(
                        "packing holds {} copies, k = {}",
                        cert.models.len(),
                        self.k
                    ));
                }
                if cert.kind != self.mode {
                    violations.push("packing kind differs from the document mode".into());
                }
                violations.extend(cert.audit(host.as_digraph(), &pattern));
            }
            EpResult::Hitting(cert) => {
                if cert.kind != self.mode {
                    violations.push("hitting kind differs from the document mode".into());
                }
                let free = match &cert.elements {
                    crate::hit::HitElements::Arcs(arcs) => {
                        match host.delete_arcs(arcs) {
                            Ok(residual) => {
                                is_free(&residual, &pattern, self.mode, &Budget::unlimited())?
                            }
                            Err(e) => {
                                violations.push(format!("bad hitting arc: {e}"));
                                return Ok(violations);
                            }
                        }
                    }
                    crate::hit::HitElements::Vertices(verts) => {
                        let gone: std::collections::BTreeSet<usize> =
                            verts.iter().copied().collect();
                        match host.delete_vertices(&gone) {
                            Ok((residual, _)) => {
                                is_free(&residual, &pattern, self.mode, &Budget::unlimited())?
                            }
                            Err(e) => {
                                violations.push(format!("bad hitting vertex: {e}"));
                                return Ok(violations);
                            }
                        }
                    }
                };
                if !free {
                    violations.push("a pattern copy survives the hitting set".into());
                }
            }
        }
        if deep {
            violations.extend(self.deep_checks(host, &pattern)?);
        }
        Ok(violations)
    }

    /// Oracle corroboration, silently skipped outside the oracle caps.
    fn deep_checks(&self, host: &Tournament, pattern: &Pattern) -> Result<Vec<String>, Error> {
        let mut violations = Vec::new();
        if host.n() > oracle::ORACLE_HOST_CAP || pattern.n() > oracle::ORACLE_PATTERN_CAP {
            return Ok(violations);
        }
        match &self.outcome {
            EpResult::Packing(cert) => {
                let max = oracle::brute_max_packing(
                    host,
                    pattern,
                    cert.kind,
                    cert.disjointness,
                    cert.models.len(),
                )?
                .value;
                if max < cert.models.len() {
                    violations.push(format!(
                        "oracle finds at most {max} disjoint copies, certificate claims {}",
                        cert.models.len()
                    ));
                }
            }
            EpResult::Hitting(cert) => {
                let min = oracle::brute_min_hitting(host, pattern, cert.kind)?.value;
                if cert.elements.len() < min {
                    violations.push(format!(
                        "certificate removes {} elements but the optimum is {min}",
                        cert.elements.len()
                    ));
                }
            }
        }
        Ok(violations)
    }
}

pub const BENCH_HEADER: &str =
    "n,seed,pattern,k,mode,outcome,cert_size,bound_value,width_used,s_used,nodes_expanded,millis";

/// One bench CSV row; everything except `millis` is deterministic.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub n: usize,
    pub seed: u64,
    pub pattern: String,
    pub k: usize,
    pub mode: ModelKind,
    pub outcome: String,
    pub cert_size: usize,
    pub bound_value: Option<f64>,
    pub width_used: usize,
    pub s_used: Option<usize>,
    pub nodes_expanded: u64,
    pub millis: u128,
}

impl BenchRow {
    pub fn from_outcome(
        n: usize,
        seed: u64,
        pattern: &str,
        k: usize,
        mode: ModelKind,
        outcome: &EpOutcome,
        millis: u128,
    ) -> Self {
        BenchRow {
            n,
            seed,
            pattern: pattern.to_string(),
            k,
            mode,
            outcome: match outcome.result {
                EpResult::Packing(_) => "packing".into(),
                EpResult::Hitting(_) => "hitting".into(),
            },
            cert_size: outcome.report.certificate_size,
            bound_value: outcome.report.formula.as_ref().map(|f| f.value),
            width_used: outcome.report.width,
            s_used: outcome.report.s,
            nodes_expanded: outcome.nodes_expanded,
            millis,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.seed,
            self.pattern,
            self.k,
            self.mode,
            self.outcome,
            self.cert_size,
            self.bound_value.map_or(String::new(), |v| v.to_string()),
            self.width_used,
            self.s_used.map_or(String::new(), |s| s.to_string()),
            self.nodes_expanded,
            self.millis
        )
    }

    /// The row with the millis column dropped, for determinism comparisons.
    pub fn to_csv_stable(&self) -> String {
        let full = self.to_csv();
        match full.rfind(',') {
            Some(i) => full[..i].to_string(),
            None => full,
        }
    }
}

/// A packing or hitting outcome's disjointness, for reporting.
pub fn outcome_disjointness(outcome: &EpResult) -> Option<Disjointness> {
    match outcome {
        EpResult::Packing(cert) => Some(cert.disjointness),
        EpResult::Hitting(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tournament_round_trip() {
        let t = crate::gen::generate(7, 3, crate::gen::GenModel::Uniform);
        let text = write_tournament(&t);
        let back = parse_tournament(&text, "mem").unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn tournament_parse_errors_carry_positions() {
        let err = parse_tournament("2\n01\n0\n", "t.txt").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        let err = parse_tournament("2\n0x\n10\n", "t.txt").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!((line, col), (2, 2));
            }
            other => panic!("unexpected {other}"),
        }
        // Symmetric pair: not a tournament.
        assert!(parse_tournament("2\n01\n10\n", "t.txt").is_ok());
        assert!(parse_tournament("2\n00\n00\n", "t.txt").is_err());
    }

    #[test]
    fn pattern_round_trip() {
        let p = crate::gen::pattern_by_name("c3-source").unwrap();
        let text = write_pattern(&p);
        let back = parse_pattern(&text, "mem").unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn certificate_round_trip() {
        let t = Tournament::c3();
        let p = crate::gen::pattern_by_name("c3").unwrap();
        let outcome =
            crate::hit::erdos_posa(&t, &p, 1, ModelKind::Immersion, &Default::default()).unwrap();
        let doc = CertificateDocument::new(&t, &p, 1, ModelKind::Immersion, 0, &outcome);
        let json = doc.to_json();
        let back = CertificateDocument::from_json(&json).unwrap();
        assert_eq!(doc, back);
        assert_eq!(json, back.to_json());
        assert!(doc.verify(&t, true).unwrap().is_empty());
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let t = crate::oracle::two_c3_blocks();
        let p = crate::gen::pattern_by_name("c3").unwrap();
        let outcome =
            crate::hit::erdos_posa(&t, &p, 2, ModelKind::Immersion, &Default::default()).unwrap();
        let mut doc = CertificateDocument::new(&t, &p, 2, ModelKind::Immersion, 0, &outcome);
        match &mut doc.outcome {
            EpResult::Packing(cert) => {
                // Drop one arc from a model path: the path disconnects.
                let (_, path) = &mut cert.models[0].paths[0];
                path.remove(1);
            }
            EpResult::Hitting(_) => panic!("expected a packing on this instance"),
        }
        let violations = doc.verify(&t, false).unwrap();
        assert!(!violations.is_empty());
    }
}
