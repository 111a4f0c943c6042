//! Seeded experiment drivers producing long-format result tables.

mod bounds_table;
mod checks;
mod runs;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub use bounds_table::{bounds_table, BoundsSettings};
pub use checks::{
    bounds_checks, environment_checks, gp_checks, oracle_checks, packing_checks, poly_checks, polyreg_retains_argmax, polyreg_retention, run_checks,
    CheckRow,
};
pub use runs::{run_d1, run_d4, run_d7, run_lbval, run_tv, D1Settings, D4Settings, D7Settings, LbValSettings, TvSettings};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    LbVal,
    D1Gauge,
    D7Switching,
    D4Threds,
    TvNumeric,
    Checks,
    Bounds,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::LbVal => "lbval",
            Experiment::D1Gauge => "d1",
            Experiment::D7Switching => "d7",
            Experiment::D4Threds => "d4",
            Experiment::TvNumeric => "tv",
            Experiment::Checks => "checks",
            Experiment::Bounds => "bounds",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "lbval" => Experiment::LbVal,
            "d1" => Experiment::D1Gauge,
            "d7" => Experiment::D7Switching,
            "d4" => Experiment::D4Threds,
            "tv" => Experiment::TvNumeric,
            "checks" => Experiment::Checks,
            "bounds" => Experiment::Bounds,
            _ => return Err(Error::Parse(format!("unknown experiment '{s}'"))),
        })
    }
}

/// `key = value` text, one pair per line; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got '{raw}'", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Parameter lookup that records every effective value (defaults included).
#[derive(Clone, Debug, Default)]
pub struct Params {
    given: BTreeMap<String, String>,
    effective: BTreeMap<String, String>,
}

impl Params {
    pub fn new(given: BTreeMap<String, String>) -> Self {
        Self { given, effective: BTreeMap::new() }
    }

    fn raw(&mut self, key: &str, default: String) -> String {
        let v = self.given.get(key).cloned().unwrap_or(default);
        self.effective.insert(key.to_string(), v.clone());
        v
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.raw(key, fmt_num(default));
        v.parse().map_err(|_| Error::Parse(format!("{key}: expected a number, got '{v}'")))
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = self.raw(key, default.to_string());
        v.parse().map_err(|_| Error::Parse(format!("{key}: expected a non-negative integer, got '{v}'")))
    }

    /// Optional key without a default; recorded only when given.
    pub fn usize_opt(&mut self, key: &str) -> Result<Option<usize>> {
        match self.given.get(key).cloned() {
            None => Ok(None),
            Some(v) => {
                self.effective.insert(key.to_string(), v.clone());
                v.parse().map(Some).map_err(|_| Error::Parse(format!("{key}: expected a non-negative integer, got '{v}'")))
            }
        }
    }

    pub fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        let v = self.raw(key, default.to_string());
        v.parse().map_err(|_| Error::Parse(format!("{key}: expected a non-negative integer, got '{v}'")))
    }

    pub fn string(&mut self, key: &str, default: &str) -> String {
        self.raw(key, default.to_string())
    }

    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = self.raw(key, default.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(","));
        v.split(',')
            .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("{key}: bad list entry '{s}'"))))
            .collect()
    }

    pub fn usize_list(&mut self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        let v = self.raw(key, default.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        v.split(',')
            .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("{key}: bad list entry '{s}'"))))
            .collect()
    }

    /// Fails on keys that no experiment parameter consumed.
    pub fn finish(&self) -> Result<()> {
        let unknown: Vec<&String> = self.given.keys().filter(|k| !self.effective.contains_key(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Parse(format!("unknown configuration keys: {unknown:?}")))
        }
    }

    pub fn effective(&self) -> &BTreeMap<String, String> {
        &self.effective
    }

    pub fn manifest(&self, experiment: Experiment) -> String {
        let mut s = format!("experiment={}\n", experiment.name());
        for (k, v) in &self.effective {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

/// One long-format result row; `seed = -1` marks reference and summary rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub experiment: String,
    pub param_name: String,
    pub param_value: f64,
    pub seed: i64,
    pub metric: String,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<Row>,
}

impl ResultTable {
    pub fn push(&mut self, experiment: &str, param_name: &str, param_value: f64, seed: i64, metric: &str, value: f64) {
        self.rows.push(Row {
            experiment: experiment.into(),
            param_name: param_name.into(),
            param_value,
            seed,
            metric: metric.into(),
            value,
        });
    }

    /// Sorts by (param_value, seed), then parameter and metric name.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.param_value
                .total_cmp(&b.param_value)
                .then(a.seed.cmp(&b.seed))
                .then_with(|| a.param_name.cmp(&b.param_name))
                .then_with(|| a.metric.cmp(&b.metric))
        });
    }

    pub fn select(&self, param_name: &str, metric: &str) -> impl Iterator<Item = &Row> {
        let (p, m) = (param_name.to_string(), metric.to_string());
        self.rows.iter().filter(move |r| r.param_name == p && r.metric == m)
    }

    /// Values of `metric` at `param_value` over seeds ≥ 0.
    pub fn seed_values(&self, param_name: &str, param_value: f64, metric: &str) -> Vec<f64> {
        self.select(param_name, metric).filter(|r| r.param_value == param_value && r.seed >= 0).map(|r| r.value).collect()
    }

    pub fn reference(&self, param_name: &str, param_value: f64, metric: &str) -> Option<f64> {
        self.select(param_name, metric).find(|r| r.param_value == param_value && r.seed < 0).map(|r| r.value)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["experiment", "param_name", "param_value", "seed", "metric", "value"])?;
        for r in &self.rows {
            w.write_record([
                r.experiment.clone(),
                r.param_name.clone(),
                fmt_num(r.param_value),
                r.seed.to_string(),
                r.metric.clone(),
                fmt_num(r.value),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> { rec[i].parse().map_err(|_| Error::Parse(format!("bad number '{}'", &rec[i]))) };
            rows.push(Row {
                experiment: rec[0].to_string(),
                param_name: rec[1].to_string(),
                param_value: num(2)?,
                seed: rec[3].parse().map_err(|_| Error::Parse(format!("bad seed '{}'", &rec[3])))?,
                metric: rec[4].to_string(),
                value: num(5)?,
            });
        }
        Ok(Self { rows })
    }
}

/// Environment-stream seed for run seed `s`.
pub fn env_seed(s: u64) -> u64 {
    s
}

/// Noise-stream seed for run seed `s`, decorrelated from the environment stream.
pub fn noise_seed(s: u64) -> u64 {
    s.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03
}

pub fn median(v: &[f64]) -> f64 {
    quantile(v, 0.5)
}

/// Linear-interpolation quantile (type 7).
pub fn quantile(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let h = (s.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Standard error of the mean.
pub fn std_err(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
}

/// Ordinary least-squares slope of ln y on ln x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (mean(&lx), mean(&ly));
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Common CLI overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub horizon: Option<usize>,
    pub seeds: Option<usize>,
    pub seed_base: Option<u64>,
}

/// Outcome of an experiment run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: ResultTable,
    pub manifest: String,
    /// False when a check suite failed.
    pub passed: bool,
}

/// Resolves parameters, writes `manifest.txt`, runs the experiment and writes `results.csv`.
pub fn run_experiment(exp: Experiment, given: BTreeMap<String, String>, ov: &Overrides, out_dir: &Path) -> Result<Outcome> {
    let mut given = given;
    if let Some(t) = ov.horizon {
        let key = if exp == Experiment::LbVal { "horizons" } else { "T" };
        given.insert(key.into(), t.to_string());
    }
    if let Some(s) = ov.seeds {
        given.insert("seeds".into(), s.to_string());
    }
    if let Some(b) = ov.seed_base {
        given.insert("seed_base".into(), b.to_string());
    }
    let mut p = Params::new(given);
    std::fs::create_dir_all(out_dir)?;
    let write_manifest = |p: &Params| -> Result<String> {
        p.finish()?;
        let m = p.manifest(exp);
        std::fs::write(out_dir.join("manifest.txt"), &m)?;
        Ok(m)
    };
    let (table, manifest, passed) = match exp {
        Experiment::LbVal => {
            let s = LbValSettings::resolve(&mut p)?;
            let m = write_manifest(&p)?;
            (run_lbval(&s)?, m, true)
        }
        Experiment::D1Gauge => {
            let s = D1Settings::resolve(&mut p)?;
            let m = write_manifest(&p)?;
            (run_d1(&s)?, m, true)
        }
        Experiment::D7Switching => {
            let s = D7Settings::resolve(&mut p)?;
            let m = write_manifest(&p)?;
            (run_d7(&s)?, m, true)
        }
        Experiment::D4Threds => {
            let s = D4Settings::resolve(&mut p)?;
            let m = write_manifest(&p)?;
            (run_d4(&s)?, m, true)
        }
        Experiment::TvNumeric => {
            let s = TvSettings::resolve(&mut p)?;
            let m = write_manifest(&p)?;
            (run_tv(&s)?, m, true)
        }
        Experiment::Checks => {
            let pairs = p.usize("oracle_pairs", 200)?;
            let seed = p.u64("seed_base", 0)?;
            let m = write_manifest(&p)?;
            let (table, rows) = run_checks(pairs, seed)?;
            let ok = rows.iter().all(|r| r.passed);
            (table, m, ok)
        }
        Experiment::Bounds => {
            let s = BoundsSettings::resolve(&mut p)?;
            let m = write_manifest(&p)?;
            (bounds_table(&s)?, m, true)
        }
    };
    std::fs::write(out_dir.join("results.csv"), table.to_csv()?)?;
    Ok(Outcome { table, manifest, passed })
}
