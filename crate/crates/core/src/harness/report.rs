use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::OutputFormat;
use crate::error::{Error, Result};
use crate::hermite::HermiteExpansion;

/// One pass/fail invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub observed: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `observed <= threshold`; NaN fails.
    pub fn at_most(name: impl Into<String>, observed: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: observed <= threshold,
            observed,
            threshold,
            detail: detail.into(),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool, observed: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            observed,
            threshold: 0.0,
            detail: detail.into(),
        }
    }
}

/// Per-function values for one parameter combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub label: String,
    /// What `values` holds, e.g. `ratio` or `abs error`.
    pub quantity: String,
    pub values: Vec<f64>,
    pub max: f64,
    /// Same maximum with the `t` grid refined ×2, where applicable.
    pub max_refined: Option<f64>,
}

impl CaseResult {
    pub fn new(label: impl Into<String>, quantity: impl Into<String>, values: Vec<f64>) -> Self {
        let max = max_of(&values);
        CaseResult {
            label: label.into(),
            quantity: quantity.into(),
            values,
            max,
            max_refined: None,
        }
    }
}

/// Largest entry, NaN if any entry is NaN, `-∞` for an empty slice.
pub fn max_of(values: &[f64]) -> f64 {
    values
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    /// Git-style blob hash of the serialized test family.
    pub input_sha256: String,
}

impl Provenance {
    pub fn new(canonical_config: &str, family: &[HermiteExpansion]) -> Result<Self> {
        let family_json = serde_json::to_string(family)?;
        Ok(Provenance {
            config_sha256: hex(&Sha256::digest(canonical_config.as_bytes())),
            input_sha256: blob_hash(family_json.as_bytes()),
        })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// `sha256("blob <len>\0" ++ content)`.
pub fn blob_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex(&h.finalize())
}

/// Result of one experiment. Deterministic for a fixed config; wall time
/// is kept out of the serialized body and reported in [`Metadata`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub experiment: String,
    pub summary: String,
    pub provenance: Provenance,
    pub passed: bool,
    /// Max over all boundedness cases; `None` for experiments without ratios.
    pub max_ratio: Option<f64>,
    pub cases: Vec<CaseResult>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub runtime_secs: f64,
}

impl TheoremReport {
    pub fn new(
        experiment: &str,
        summary: &str,
        provenance: Provenance,
        cases: Vec<CaseResult>,
        checks: Vec<Check>,
    ) -> Self {
        let ratios: Vec<f64> = cases
            .iter()
            .filter(|c| c.quantity == "ratio")
            .map(|c| c.max)
            .collect();
        TheoremReport {
            experiment: experiment.to_string(),
            summary: summary.to_string(),
            provenance,
            passed: checks.iter().all(|c| c.passed),
            max_ratio: if ratios.is_empty() { None } else { Some(max_of(&ratios)) },
            cases,
            checks,
            runtime_secs: 0.0,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Wall-clock data, kept apart from the deterministic part of a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub runtime_secs: BTreeMap<String, f64>,
    pub total_secs: f64,
    pub threads: usize,
    pub version: String,
}

/// A set of experiment reports; what the CLI emits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiments: Vec<TheoremReport>,
    pub passed: bool,
    pub metadata: Metadata,
}

impl Report {
    pub fn new(experiments: Vec<TheoremReport>) -> Self {
        let runtime_secs: BTreeMap<String, f64> = experiments
            .iter()
            .map(|r| (r.experiment.clone(), r.runtime_secs))
            .collect();
        Report {
            passed: experiments.iter().all(|r| r.passed),
            metadata: Metadata {
                total_secs: runtime_secs.values().sum(),
                runtime_secs,
                threads: rayon::current_num_threads(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            experiments,
        }
    }

    /// Process exit code: 0 when every invariant holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// The report without wall-clock data, for byte comparisons.
    pub fn without_metadata(&self) -> Report {
        Report {
            metadata: Metadata::default(),
            ..self.clone()
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: [&str; 7] = ["experiment", "kind", "name", "index", "value", "passed", "threshold"];

/// Serializes a report. JSON numbers use the shortest representation that
/// round-trips; CSV and text use [`fmt17`].
pub fn render(report: &Report, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Text => Ok(render_text(report)),
    }
}

fn render_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &report.experiments {
        let e = r.experiment.as_str();
        for c in &r.cases {
            let name = format!("{} [{}]", c.label, c.quantity);
            for (i, v) in c.values.iter().enumerate() {
                w.write_record([e, "value", &name, &i.to_string(), &fmt17(*v), "", ""])?;
            }
            w.write_record([e, "case_max", &name, "", &fmt17(c.max), "", ""])?;
            if let Some(m) = c.max_refined {
                w.write_record([e, "case_max_refined", &name, "", &fmt17(m), "", ""])?;
            }
        }
        for c in &r.checks {
            w.write_record([
                e,
                "check",
                &c.name,
                "",
                &fmt17(c.observed),
                if c.passed { "true" } else { "false" },
                &fmt17(c.threshold),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_text(report: &Report) -> String {
    let mut s = String::new();
    for r in &report.experiments {
        let _ = writeln!(s, "== {}: {}", r.experiment, r.summary);
        let _ = writeln!(
            s,
            "   config sha256 {}  input sha256 {}",
            r.provenance.config_sha256, r.provenance.input_sha256
        );
        if let Some(m) = r.max_ratio {
            let _ = writeln!(s, "   max ratio {}", fmt17(m));
        }
        for c in &r.cases {
            let refined = c.max_refined.map(|m| format!(", refined {}", fmt17(m))).unwrap_or_default();
            let _ = writeln!(
                s,
                "   case {} ({}, n={}): max {}{refined}",
                c.label,
                c.quantity,
                c.values.len(),
                fmt17(c.max)
            );
        }
        for c in &r.checks {
            let _ = writeln!(
                s,
                "   {} {}: observed {} threshold {}{}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                fmt17(c.observed),
                fmt17(c.threshold),
                if c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) }
            );
        }
    }
    let _ = writeln!(s, "-- runtime {:.3}s on {} thread(s)", report.metadata.total_secs, report.metadata.threads);
    let _ = writeln!(s, "overall: {}", if report.passed { "PASS" } else { "FAIL" });
    s
}

/// Writes the report to `out`, or stdout when `None`.
pub fn emit_report(report: &Report, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let text = render(report, format)?;
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Per-function values from CSV output, keyed by `(experiment, case name)`.
pub fn csv_values(text: &str) -> Result<BTreeMap<(String, String), Vec<f64>>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        if &rec[1] != "value" {
            continue;
        }
        let v: f64 = rec[4]
            .parse()
            .map_err(|_| Error::Config(format!("bad float `{}` in csv", &rec[4])))?;
        out.entry((rec[0].to_string(), rec[2].to_string())).or_default().push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        let prov = Provenance::new("seed=1\n", &[HermiteExpansion::constant(1, 1.0)]).unwrap();
        let case = CaseResult::new("alpha=0.5", "ratio", vec![0.1 + 0.2, 1.0 / 3.0, std::f64::consts::PI]);
        let checks = vec![Check::at_most("ratios finite", 0.0, 0.0, "")];
        Report::new(vec![TheoremReport::new("demo", "demo summary", prov, vec![case], checks)])
    }

    #[test]
    fn empty_report_passes() {
        let r = Report::new(vec![]);
        assert!(r.passed);
        assert_eq!(r.exit_code(), 0);
        for f in [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Text] {
            assert!(render(&r, f).is_ok());
        }
    }

    #[test]
    fn failing_check_sets_exit_code() {
        let prov = Provenance::new("", &[]).unwrap();
        let checks = vec![Check::at_most("inversion: D^β I_β f = Π₀f", 1e-9, 1e-12, "")];
        let r = Report::new(vec![TheoremReport::new("inversion", "", prov, vec![], checks)]);
        assert_eq!(r.exit_code(), 1);
        let text = render(&r, OutputFormat::Text).unwrap();
        assert!(text.contains("FAIL inversion: D^β I_β f = Π₀f"));
        assert!(!Check::at_most("nan", f64::NAN, 1.0, "").passed);
    }

    #[test]
    fn json_and_csv_round_trip_bit_exact() {
        let r = sample_report();
        let json = render(&r, OutputFormat::Json).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        let vals = &r.experiments[0].cases[0].values;
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.experiments[0].cases[0].values), bits(vals));
        let csv = render(&r, OutputFormat::Csv).unwrap();
        let parsed = csv_values(&csv).unwrap();
        let got = &parsed[&("demo".to_string(), "alpha=0.5 [ratio]".to_string())];
        assert_eq!(bits(got), bits(vals));
    }

    #[test]
    fn blob_hash_matches_git() {
        // `printf 'hello\n' | git hash-object --stdin` with sha256 object format
        assert_eq!(
            blob_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }

    #[test]
    fn max_of_propagates_nan() {
        assert!(max_of(&[1.0, f64::NAN]).is_nan());
        assert_eq!(max_of(&[1.0, 3.0, 2.0]), 3.0);
    }
}
