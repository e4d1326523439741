//! Running a directory of experiment configs, golden-value checks, and the
//! summary table.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentKind, RawConfig};
use crate::harness::experiments::{run_case, Artifact, Check, Metric};

/// One `metric,expected,tolerance` line of a golden file.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldenValue {
    pub metric: String,
    pub expected: f64,
    pub tolerance: f64,
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenValue>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "metric,expected,tolerance" {
            continue;
        }
        let bad = || Error::Parse(format!("golden line {}: `{line}`", lineno + 1));
        let mut parts = line.split(',').map(str::trim);
        let (Some(metric), Some(expected), Some(tolerance), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let expected: f64 = expected.parse().map_err(|_| bad())?;
        let tolerance: f64 = tolerance.parse().map_err(|_| bad())?;
        if !expected.is_finite() || !(tolerance >= 0.0) {
            return Err(bad());
        }
        out.push(GoldenValue {
            metric: metric.to_string(),
            expected,
            tolerance,
        });
    }
    Ok(out)
}

/// Outcome of one config file, all of its cases merged.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub kind: ExperimentKind,
    /// Metric names carry a `case.` prefix for multi-case experiments.
    pub metrics: Vec<Metric>,
    pub artifacts: Vec<Artifact>,
    /// Errors and golden mismatches.
    pub failures: Vec<String>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.metrics.iter().all(Metric::passed)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// Short reason for a failure, empty on success.
    pub fn detail(&self) -> String {
        let mut parts: Vec<String> = self
            .metrics
            .iter()
            .filter(|m| !m.passed())
            .map(|m| format!("{} = {:e} not {}", m.name, m.value, m.check.describe()))
            .collect();
        parts.extend(self.failures.iter().cloned());
        parts.join("; ")
    }
}

/// Runs every case of one config file. Case errors become failures rather
/// than aborting the experiment.
pub fn run_config(path: &Path) -> Result<ExperimentReport> {
    let raw = RawConfig::load(path)?;
    let cases = raw.resolve()?;
    let first = &cases[0];
    if cases.iter().any(|c| c.kind != first.kind || c.name != first.name) {
        return Err(Error::Config(format!("{}: cases must share name and kind", path.display())));
    }
    let multi = cases.len() > 1;
    let mut report = ExperimentReport {
        name: first.name.clone(),
        kind: first.kind,
        metrics: Vec::new(),
        artifacts: Vec::new(),
        failures: Vec::new(),
    };
    for case in &cases {
        let prefix = match (&case.case, multi) {
            (Some(c), true) => format!("{c}."),
            _ => String::new(),
        };
        match run_case(case) {
            Ok(result) => {
                report.metrics.extend(result.metrics.into_iter().map(|mut m| {
                    m.name.insert_str(0, &prefix);
                    m
                }));
                report.artifacts.extend(result.artifacts.into_iter().map(|mut a| {
                    a.name.insert_str(0, &prefix);
                    a
                }));
            }
            Err(e) => report.failures.push(e.to_string()),
        }
    }
    if let Some(golden) = &first.golden {
        check_golden(&mut report, golden);
    }
    Ok(report)
}

fn check_golden(report: &mut ExperimentReport, path: &Path) {
    let values = match fs::read_to_string(path).map_err(Error::from).and_then(|t| parse_golden(&t)) {
        Ok(v) => v,
        Err(e) => {
            report.failures.push(format!("golden {}: {e}", path.display()));
            return;
        }
    };
    for g in values {
        match report.metric(&g.metric) {
            None => report.failures.push(format!("golden metric `{}` was not produced", g.metric)),
            Some(v) => {
                let check = Check::Within(g.expected - g.tolerance, g.expected + g.tolerance);
                report.metrics.push(Metric::new(format!("golden.{}", g.metric), v, check));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub claim: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub reports: Vec<ExperimentReport>,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(ExperimentReport::passed)
    }

    pub fn rows(&self) -> Vec<SummaryRow> {
        self.reports
            .iter()
            .map(|r| SummaryRow {
                experiment: r.name.clone(),
                claim: r.kind.claim(),
                passed: r.passed(),
                detail: r.detail(),
            })
            .collect()
    }

    pub fn failed(&self) -> Vec<&str> {
        self.reports.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect()
    }

    /// Aligned columns `experiment  claim  result`.
    pub fn to_text(&self) -> String {
        let rows = self.rows();
        let w_exp = rows.iter().map(|r| r.experiment.len()).chain([10]).max().unwrap_or(10);
        let w_claim = rows.iter().map(|r| r.claim.chars().count()).chain([5]).max().unwrap_or(5);
        let mut s = String::new();
        writeln!(s, "{:<w_exp$}  {:<w_claim$}  result", "experiment", "claim").unwrap();
        for r in &rows {
            let pad = w_claim - r.claim.chars().count();
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            write!(s, "{:<w_exp$}  {}{}  {verdict}", r.experiment, r.claim, " ".repeat(pad)).unwrap();
            if !r.detail.is_empty() {
                write!(s, "  ({})", r.detail).unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// `experiment,claim,result,detail`, quoting the free-text fields.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "experiment,claim,result,detail")?;
        for r in self.rows() {
            let verdict = if r.passed { "pass" } else { "fail" };
            writeln!(out, "{},{},{verdict},{}", r.experiment, quote(r.claim), quote(&r.detail))?;
        }
        Ok(())
    }

    /// Writes the summary and every artifact under `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.txt"), self.to_text())?;
        self.write_csv(fs::File::create(dir.join("summary.csv"))?)?;
        for r in &self.reports {
            for a in &r.artifacts {
                fs::write(dir.join(format!("{}_{}.csv", r.name, a.name)), &a.contents)?;
            }
        }
        Ok(())
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// The `*.cfg` files of a directory in name order.
pub fn config_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::NoExperiments(dir.display().to_string()));
    }
    Ok(files)
}

/// Runs every experiment in `dir`. A config that fails to load counts as a
/// failed experiment named after its file.
pub fn verify_all(dir: &Path) -> Result<Summary> {
    let mut reports = Vec::new();
    for path in config_files(dir)? {
        let report = run_config(&path).unwrap_or_else(|e| ExperimentReport {
            name: path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            kind: ExperimentKind::NormSeries,
            metrics: Vec::new(),
            artifacts: Vec::new(),
            failures: vec![e.to_string()],
        });
        reports.push(report);
    }
    Ok(Summary { reports })
}

/// Caps the global worker pool at `MODSPACE_THREADS` when it is set.
/// Results do not depend on the thread count.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("MODSPACE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("MODSPACE_THREADS must be a positive integer, got `{value}`")))?;
    // A pool that already exists keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_parsing() {
        let g = parse_golden("metric,expected,tolerance\n# note\na.b,1.5,1e-3\n").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].metric, "a.b");
        assert!(parse_golden("a,1\n").is_err());
        assert!(parse_golden("a,x,1\n").is_err());
        assert!(parse_golden("a,1,-1\n").is_err());
        assert!(parse_golden("a,1,2,3\n").is_err());
    }

    #[test]
    fn empty_dir_has_no_experiments() {
        let dir = tempfile::tempdir().unwrap();
        let err = verify_all(dir.path()).unwrap_err();
        assert!(err.to_string().contains("no experiments"), "{err}");
    }

    fn write(dir: &Path, name: &str, text: &str) {
        fs::write(dir.join(name), text).unwrap();
    }

    #[test]
    fn golden_mismatch_fails_the_named_experiment() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = "experiment.name = ids\nexperiment.kind = identities\ngrid.N = 64\ngrid.L = 8\n\
                   time.list = 0.1\nsolver.dt = 0.01\npotential.kind = harmonic\ncheck.golden = ids.csv\n";
        write(dir.path(), "ids.cfg", cfg);
        write(dir.path(), "ids.csv", "metric,expected,tolerance\nplancherel_error,0,1e-8\n");
        let summary = verify_all(dir.path()).unwrap();
        assert!(summary.all_passed(), "{}", summary.to_text());

        write(dir.path(), "ids.csv", "metric,expected,tolerance\nplancherel_error,5,1e-8\n");
        let summary = verify_all(dir.path()).unwrap();
        assert_eq!(summary.failed(), vec!["ids"]);
        assert!(summary.to_text().contains("FAIL"));

        write(dir.path(), "ids.csv", "garbage\n");
        assert_eq!(verify_all(dir.path()).unwrap().failed(), vec!["ids"]);
    }

    #[test]
    fn bad_config_is_a_failed_row() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "broken.cfg", "grid.banana = 1\n");
        let summary = verify_all(dir.path()).unwrap();
        assert_eq!(summary.failed(), vec!["broken"]);
        let mut csv = Vec::new();
        summary.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().contains("broken,\"norm series\",fail,"));
    }
}
