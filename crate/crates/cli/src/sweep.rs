//! Batch classification over templated equation families, stored as JSON Lines.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use fermat_pr_core::{classify, parse_equation, ConstantSolutions, Verdict};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::CliError;

/// Records are classified and appended in chunks of this many instantiations.
const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub template: String,
    /// Placeholders in order of first appearance, each with its values.
    pub ranges: Vec<(String, Vec<i64>)>,
    pub p_max: u64,
    pub out: PathBuf,
}

/// Placeholder names of a template, in order of first appearance.
pub fn placeholders(template: &str) -> Result<Vec<String>, CliError> {
    let mut names = Vec::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        let end =
            rest[start..].find('}').ok_or_else(|| CliError::Usage(format!("unclosed placeholder in `{template}`")))?;
        let name = &rest[start + 1..start + end];
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(CliError::Usage(format!("bad placeholder `{{{name}}}`")));
        }
        if !names.iter().any(|n| n == name) {
            names.push(name.to_string());
        }
        rest = &rest[start + end + 1..];
    }
    Ok(names)
}

/// Parses `a..b` (inclusive) or `a,b,c`.
pub fn parse_range(text: &str) -> Result<Vec<i64>, CliError> {
    let bad = || CliError::Usage(format!("bad range `{text}`; expected `a..b` or `a,b,c`"));
    let values: Vec<i64> = if let Some((a, b)) = text.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        text.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(CliError::Usage(format!("range `{text}` is empty")));
    }
    Ok(values)
}

impl SweepSpec {
    /// Binds `name=range` arguments to the template's placeholders.
    pub fn new(template: &str, bindings: &[String], p_max: u64, out: PathBuf) -> Result<Self, CliError> {
        let mut given: BTreeMap<String, Vec<i64>> = BTreeMap::new();
        for binding in bindings {
            let (name, range) = binding
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("bad binding `{binding}`; expected name=range")))?;
            given.insert(name.trim().to_string(), parse_range(range)?);
        }
        let names = placeholders(template)?;
        if let Some(extra) = given.keys().find(|k| !names.contains(k)) {
            return Err(CliError::Usage(format!("`{extra}` is not a placeholder of the template")));
        }
        let ranges = names
            .into_iter()
            .map(|name| match given.remove(&name) {
                Some(values) => Ok((name, values)),
                None => Err(CliError::Usage(format!("placeholder `{name}` has no range"))),
            })
            .collect::<Result<_, _>>()?;
        Ok(SweepSpec { template: template.to_string(), ranges, p_max, out })
    }

    /// Every instantiation, the last placeholder varying fastest.
    pub fn instantiations(&self) -> Vec<String> {
        let mut texts = vec![self.template.clone()];
        for (name, values) in &self.ranges {
            let slot = format!("{{{name}}}");
            texts = texts.iter().flat_map(|t| values.iter().map(|v| t.replace(&slot, &v.to_string()))).collect();
        }
        texts
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub equation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<Box<RawValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rules: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_solutions: Option<ConstantSolutions>,
    /// Why the instantiation was not classified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub elapsed_ms: f64,
}

pub fn classify_record(text: &str, p_max: u64) -> Result<SweepRecord, CliError> {
    let started = Instant::now();
    let skipped = |reason: String| SweepRecord {
        equation: text.to_string(),
        canonical: None,
        verdict: None,
        rules: Vec::new(),
        prime: None,
        constant_solutions: None,
        skipped: Some(reason),
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let eq = match parse_equation(text) {
        Ok(eq) => eq,
        Err(err) => return Ok(skipped(err.to_string())),
    };
    let cert = match classify(&eq, p_max) {
        Ok(cert) => cert,
        Err(fermat_pr_core::Error::OverflowDetected(what)) => return Err(CliError::Overflow(what)),
        Err(err) => return Ok(skipped(err.to_string())),
    };
    Ok(SweepRecord {
        equation: text.to_string(),
        canonical: Some(RawValue::from_string(eq.to_canonical_json()).expect("canonical JSON is valid")),
        verdict: Some(cert.verdict),
        rules: cert.rules().iter().map(|r| r.name().to_string()).collect(),
        prime: cert.witness_prime(),
        constant_solutions: Some(cert.constant_solutions),
        skipped: None,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn read_store(path: &Path) -> Result<Vec<SweepRecord>, CliError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CliError::Io(path.display().to_string(), e)),
    };
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::Io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| CliError::Usage(format!("{}:{}: not a sweep record: {e}", path.display(), i + 1)))?;
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct SweepSummary {
    pub total: usize,
    pub written: usize,
    pub resumed: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub rules: BTreeMap<String, usize>,
}

impl SweepSummary {
    fn add(&mut self, record: &SweepRecord) {
        let verdict = match (&record.verdict, &record.skipped) {
            (Some(v), _) => v.to_string(),
            _ => "skipped".to_string(),
        };
        *self.verdicts.entry(verdict).or_default() += 1;
        for rule in &record.rules {
            *self.rules.entry(rule.clone()).or_default() += 1;
        }
    }

    /// Aligned two-column text table.
    pub fn table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("instantiations".into(), self.total.to_string()),
            ("written".into(), self.written.to_string()),
            ("already stored".into(), self.resumed.to_string()),
        ];
        rows.extend(self.verdicts.iter().map(|(k, v)| (format!("verdict {k}"), v.to_string())));
        rows.extend(self.rules.iter().map(|(k, v)| (format!("rule {k}"), v.to_string())));
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let value_width = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v:>value_width$}\n")).collect()
    }
}

/// Classifies every instantiation missing from the store and appends it.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepSummary, CliError> {
    let existing = read_store(&spec.out)?;
    let mut by_text: BTreeMap<String, SweepRecord> = existing.into_iter().map(|r| (r.equation.clone(), r)).collect();
    let instantiations = spec.instantiations();
    let mut seen = HashSet::new();
    let pending: Vec<&String> =
        instantiations.iter().filter(|t| !by_text.contains_key(*t) && seen.insert(t.as_str())).collect();

    let io_err = |e| CliError::Io(spec.out.display().to_string(), e);
    let mut file = OpenOptions::new().create(true).append(true).open(&spec.out).map_err(io_err)?;
    let mut summary = SweepSummary { total: instantiations.len(), ..Default::default() };
    for chunk in pending.chunks(CHUNK) {
        let records: Vec<SweepRecord> =
            chunk.par_iter().map(|t| classify_record(t, spec.p_max)).collect::<Result<_, _>>()?;
        let mut buf = String::new();
        for record in &records {
            buf.push_str(&serde_json::to_string(record).expect("records serialize"));
            buf.push('\n');
        }
        file.write_all(buf.as_bytes()).map_err(io_err)?;
        file.flush().map_err(io_err)?;
        summary.written += records.len();
        by_text.extend(records.into_iter().map(|r| (r.equation.clone(), r)));
    }
    summary.resumed = summary.total - summary.written;
    let mut counted = HashSet::new();
    for text in &instantiations {
        if counted.insert(text.as_str()) {
            summary.add(&by_text[text]);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_range("3, 5,7").unwrap(), vec![3, 5, 7]);
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn instantiation_order() {
        let spec = SweepSpec::new("x^{n} + y = {c}z^{n}", &["n=1..2".into(), "c=3,5".into()], 100, "s".into()).unwrap();
        assert_eq!(spec.instantiations(), vec!["x^1 + y = 3z^1", "x^1 + y = 5z^1", "x^2 + y = 3z^2", "x^2 + y = 5z^2"]);
        assert!(SweepSpec::new("x^{n} = y", &[], 100, "s".into()).is_err());
        assert!(SweepSpec::new("x^{n} = y", &["n=1".into(), "m=2".into()], 100, "s".into()).is_err());
    }

    #[test]
    fn invalid_instantiations_are_skipped() {
        let record = classify_record("x + y = 0z", 100).unwrap();
        assert!(record.skipped.is_some());
        assert!(record.verdict.is_none());
        let ok = classify_record("x + y = 3z^2", 100).unwrap();
        assert_eq!(ok.verdict, Some(Verdict::NotPR));
        assert!(ok.rules.contains(&"Cor1i".to_string()));
    }
}
