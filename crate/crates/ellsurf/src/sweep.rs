//! Batch runs over a family of curves, written as JSONL or CSV.
//!
//! Records are keyed by the SHA-256 of the canonical spec. A rerun skips
//! keys already present and appends the rest in enumeration order, so an
//! interrupted sweep finishes with the same file an uninterrupted one writes.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use ellsurf_core::mw::CertificateStatus;
use ellsurf_core::predict::Verdict;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{self, Member};

/// Short curves `y^2 = x^3 + a4 x + a6` over `F_p` with bounded degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub p: u64,
    pub a4_degree: usize,
    pub a6_degree: usize,
    /// Keep one curve per orbit of `t -> alpha t + beta`, `(a4, a6) -> (u^4 a4, u^6 a6)`.
    #[serde(default)]
    pub orbits: bool,
    /// Draw this many curves with the given seed instead of enumerating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomDraw>,
    #[serde(default)]
    pub weights: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomDraw {
    pub count: usize,
    pub seed: u64,
}

impl FamilySpec {
    pub fn members(&self) -> Vec<Member> {
        match &self.random {
            Some(r) => corpus::random_members(self.p, self.a4_degree, self.a6_degree, r.count, r.seed),
            None if self.orbits => corpus::orbit_representatives(self.p, self.a4_degree, self.a6_degree),
            None => corpus::full_family(self.p, self.a4_degree, self.a6_degree),
        }
    }
}

/// One row of sweep output. List-valued columns are space separated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub hash: String,
    pub spec: String,
    pub orbit_size: usize,
    pub status: String,
    pub error: String,
    pub conductor_degree: u32,
    pub l_coeffs: String,
    pub lefschetz_agree: bool,
    pub epsilon: i32,
    pub torsion: String,
    pub certificate: String,
    pub all_pass: bool,
    pub deferred: bool,
    pub failed: String,
}

pub const CSV_COLUMNS: [&str; 14] = [
    "hash",
    "spec",
    "orbit_size",
    "status",
    "error",
    "conductor_degree",
    "l_coeffs",
    "lefschetz_agree",
    "epsilon",
    "torsion",
    "certificate",
    "all_pass",
    "deferred",
    "failed",
];

pub fn spec_hash(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn record(m: &Member, weights: &[u32]) -> Record {
    let canonical = m.spec().to_canonical();
    let mut rec = Record {
        hash: spec_hash(&canonical),
        spec: canonical,
        orbit_size: m.orbit_size,
        status: "ok".into(),
        error: String::new(),
        conductor_degree: 0,
        l_coeffs: String::new(),
        lefschetz_agree: false,
        epsilon: 0,
        torsion: String::new(),
        certificate: String::new(),
        all_pass: false,
        deferred: false,
        failed: String::new(),
    };
    let result = m.spec().curve().map_err(crate::RunError::from).and_then(|e| crate::run(&e, &[], weights));
    match result {
        Err(e) => {
            rec.status = "error".into();
            rec.error = e.name();
        }
        Ok((a, r)) => {
            rec.conductor_degree = a.surface.conductor_degree();
            rec.l_coeffs = a.l.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
            rec.lefschetz_agree = matches!(&a.lefschetz, Ok(l) if l.coeffs == a.l.coeffs);
            rec.epsilon = ellsurf_core::lfun::functional_equation_sign(&a.l).unwrap_or(0);
            rec.torsion = a.torsion.verified_lower.cyclic_orders.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
            rec.certificate = match a.torsion.status {
                CertificateStatus::Exact => "exact".into(),
                CertificateStatus::Interval => format!("interval<={}", a.torsion.upper_bound),
            };
            rec.all_pass = r.all_pass();
            rec.deferred = r.deferred();
            let failed: Vec<String> = r
                .checks
                .iter()
                .filter(|c| c.verdict == Verdict::Fail)
                .map(|c| c.name.clone())
                .chain(r.all_slots().filter(|s| s.verdict == Verdict::Fail).map(|s| s.name.clone()))
                .collect();
            rec.failed = failed.join(" ");
        }
    }
    rec
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub curves: usize,
    pub resumed: usize,
    pub computed: usize,
    pub errors: usize,
    pub all_pass: usize,
    pub deferred: usize,
}

// drops a trailing partial line left by an interrupted run
fn existing_keys(path: &Path, format: Format) -> io::Result<(HashSet<String>, Vec<Record>)> {
    let mut keys = HashSet::new();
    let mut recs = Vec::new();
    let Ok(file) = File::open(path) else {
        return Ok((keys, recs));
    };
    let mut lines: Vec<String> = Vec::new();
    let mut reader = BufReader::new(file);
    let mut buf = String::new();
    let mut complete_len = 0u64;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        if n == 0 || !buf.ends_with('\n') {
            break;
        }
        complete_len += n as u64;
        lines.push(buf.trim_end().to_string());
    }
    OpenOptions::new().write(true).open(path)?.set_len(complete_len)?;
    match format {
        Format::Jsonl => {
            for l in lines.iter().filter(|l| !l.is_empty()) {
                let r: Record = serde_json::from_str(l).map_err(io::Error::other)?;
                keys.insert(r.hash.clone());
                recs.push(r);
            }
        }
        Format::Csv => {
            let body = lines.join("\n");
            let mut rd = csv::Reader::from_reader(body.as_bytes());
            for r in rd.deserialize() {
                let r: Record = r.map_err(io::Error::other)?;
                keys.insert(r.hash.clone());
                recs.push(r);
            }
        }
    }
    Ok((keys, recs))
}

fn tally(s: &mut Summary, r: &Record) {
    if r.status != "ok" {
        s.errors += 1;
    }
    if r.all_pass {
        s.all_pass += 1;
    }
    if r.deferred {
        s.deferred += 1;
    }
}

/// Run the family into `out`, resuming from whatever is already there.
pub fn sweep(family: &FamilySpec, out: &Path, batch: usize) -> io::Result<Summary> {
    let format = Format::from_path(out);
    let (keys, previous) = existing_keys(out, format)?;
    let members = family.members();
    let mut summary = Summary { curves: members.len(), ..Summary::default() };
    for r in &previous {
        tally(&mut summary, r);
    }
    summary.resumed = previous.len();
    let todo: Vec<&Member> = members.iter().filter(|m| !keys.contains(&spec_hash(&m.spec().to_canonical()))).collect();
    let fresh = !out.exists() || std::fs::metadata(out)?.len() == 0;
    let mut file = OpenOptions::new().create(true).append(true).open(out)?;
    if format == Format::Csv && fresh {
        writeln!(file, "{}", CSV_COLUMNS.join(","))?;
    }
    for chunk in todo.chunks(batch.max(1)) {
        let recs: Vec<Record> = chunk.par_iter().map(|m| record(m, &family.weights)).collect();
        for r in &recs {
            match format {
                Format::Jsonl => writeln!(file, "{}", serde_json::to_string(r).map_err(io::Error::other)?)?,
                Format::Csv => {
                    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
                    w.serialize(r).map_err(io::Error::other)?;
                    file.write_all(&w.into_inner().map_err(|e| io::Error::other(e.to_string()))?)?;
                }
            }
            tally(&mut summary, r);
            summary.computed += 1;
        }
        file.flush()?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable() {
        assert_eq!(spec_hash("").len(), 64);
        assert_eq!(spec_hash("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn csv_header_matches_record() {
        let mut w = csv::Writer::from_writer(Vec::new());
        let r = record(&Member { p: 5, a4: vec![0, 1], a6: vec![1], orbit_size: 1 }, &[]);
        w.serialize(&r).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    }
}
