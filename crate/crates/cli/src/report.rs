//! Report model with two renderings: a line-delimited machine format whose
//! exact values survive round-trips (rationals as `p/q`), and a human table.
//! Machine reports parse back for certificate replay.

use gptt_core::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Record {
    pub name: String,
    pub kind: String,
    pub fields: Vec<(String, String)>,
    pub certs: Vec<CertRecord>,
}

impl Record {
    pub fn new(name: &str, kind: &str) -> Self {
        Record {
            name: name.to_string(),
            kind: kind.to_string(),
            fields: Vec::new(),
            certs: Vec::new(),
        }
    }

    pub fn field(&mut self, key: &str, value: &str) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct CertRecord {
    pub task: String,
    pub kind: String,
    pub fields: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct AssertResult {
    pub task: String,
    pub key: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub scenario_path: String,
    pub backend: String,
    pub seed: u64,
    pub tol: Option<f64>,
    pub records: Vec<Record>,
    pub certs: Vec<CertRecord>,
    pub asserts: Vec<AssertResult>,
}

impl Report {
    pub fn all_asserts_pass(&self) -> bool {
        self.asserts.iter().all(|a| a.pass)
    }

    /// Line-delimited machine format; byte-stable for fixed inputs.
    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        out.push_str("gptt-report v1\n");
        out.push_str(&format!("scenario: {}\n", self.scenario_path));
        out.push_str(&format!("backend: {}\n", self.backend));
        out.push_str(&format!("seed: {}\n", self.seed));
        if let Some(tol) = self.tol {
            out.push_str(&format!("tol: {tol:?}\n"));
        }
        for record in &self.records {
            out.push_str(&format!("task {} kind={}", record.name, record.kind));
            for (k, v) in &record.fields {
                out.push_str(&format!(" {k}={}", sanitize(v)));
            }
            out.push('\n');
            for cert in &record.certs {
                out.push_str(&format!("cert {} kind={}", cert.task, cert.kind));
                for (k, v) in &cert.fields {
                    out.push_str(&format!(" {k}={v}"));
                }
                out.push('\n');
            }
        }
        for a in &self.asserts {
            out.push_str(&format!(
                "assert {} {} expected={} actual={} result={}\n",
                a.task,
                a.key,
                a.expected,
                a.actual,
                if a.pass { "pass" } else { "fail" }
            ));
        }
        out.push_str(&format!(
            "status: {}\n",
            if self.all_asserts_pass() { "pass" } else { "fail" }
        ));
        out
    }

    /// Human-readable table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "scenario {} (backend {}, seed {})\n",
            self.scenario_path, self.backend, self.seed
        ));
        for record in &self.records {
            out.push_str(&format!("\n[{}] {}\n", record.kind, record.name));
            for (k, v) in &record.fields {
                out.push_str(&format!("  {k:<24} {v}\n"));
            }
            for cert in &record.certs {
                out.push_str(&format!("  certificate ({})\n", cert.kind));
                for (k, v) in &cert.fields {
                    out.push_str(&format!("    {k:<22} {v}\n"));
                }
            }
        }
        if !self.asserts.is_empty() {
            out.push_str("\nassertions\n");
            for a in &self.asserts {
                out.push_str(&format!(
                    "  {} {} = {} (expected {}): {}\n",
                    a.task,
                    a.key,
                    a.actual,
                    a.expected,
                    if a.pass { "pass" } else { "FAIL" }
                ));
            }
        }
        out.push_str(&format!(
            "\nstatus: {}\n",
            if self.all_asserts_pass() { "pass" } else { "fail" }
        ));
        out
    }

    /// Parse the machine format back (for `verify`).
    pub fn parse_machine(text: &str) -> Result<Report> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != "gptt-report v1" {
            return Err(Error::Parse("not a gptt report".into()));
        }
        let mut report = Report {
            scenario_path: String::new(),
            backend: String::new(),
            seed: 0,
            tol: None,
            records: Vec::new(),
            certs: Vec::new(),
            asserts: Vec::new(),
        };
        for line in lines {
            if let Some(rest) = line.strip_prefix("scenario: ") {
                report.scenario_path = rest.to_string();
            } else if let Some(rest) = line.strip_prefix("backend: ") {
                report.backend = rest.to_string();
            } else if let Some(rest) = line.strip_prefix("seed: ") {
                report.seed = rest
                    .parse()
                    .map_err(|_| Error::Parse("bad seed in report".into()))?;
            } else if let Some(rest) = line.strip_prefix("tol: ") {
                report.tol = rest.parse().ok();
            } else if let Some(rest) = line.strip_prefix("cert ") {
                let mut parts = split_kv(rest);
                if parts.is_empty() {
                    return Err(Error::Parse("empty cert line".into()));
                }
                let task = parts.remove(0).0;
                let kind = parts
                    .iter()
                    .position(|(k, _)| k == "kind")
                    .map(|i| parts.remove(i).1)
                    .ok_or_else(|| Error::Parse("cert without kind".into()))?;
                report.certs.push(CertRecord {
                    task,
                    kind,
                    fields: parts,
                });
            }
            // task and assert lines are informational for verify
        }
        Ok(report)
    }
}

/// Whitespace survives nowhere in machine values.
fn sanitize(v: &str) -> String {
    v.replace(char::is_whitespace, "_")
}

/// Split `name k=v k=v ...` into pairs; the first bare word becomes a pair
/// with an empty value.
fn split_kv(line: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for word in line.split_whitespace() {
        match word.split_once('=') {
            Some((k, v)) => out.push((k.to_string(), v.to_string())),
            None => out.push((word.to_string(), String::new())),
        }
    }
    out
}
