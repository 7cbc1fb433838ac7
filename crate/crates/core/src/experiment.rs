//! Scaling experiments: grid runs, log-log exponent fits and reports.
//!
//! A config is `key = value` text (TOML syntax). Every experiment writes a
//! CSV of grid rows and a JSON summary whose `measured`, `target` and
//! `timing` sections are kept apart, so the summary minus `timing` is
//! byte-identical across runs with the same config.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cover::{cover_planes, densest_planes_count};
use crate::lattice::IntegerLattice;
use crate::poly::{Monomial, Poly};
use crate::projection::{best_projection, SpaceCurve};
use crate::projective::{count_points_on_plane, plane_from_lattice};
use crate::subdivision::subdivide;
use crate::variety::{count_affine_points, count_proj_points, union_of_planes_variety, VarietySpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fewest grid points for which a fitted exponent is reported.
pub const MIN_FIT_POINTS: usize = 3;

pub const EXPERIMENT_IDS: &[&str] = &[
    "cover-scaling",
    "densest-sublinear",
    "lattice-point-bound",
    "line-union",
    "parallel-lines",
    "random-curves",
    "projection-degree",
    "subdivision",
];

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample {index} is not positive: ({x}, {y})")]
    NonPositive { index: usize, x: f64, y: f64 },
    #[error("all x values coincide")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_exponent(samples: &[(f64, f64)]) -> Result<Fit, FitError> {
    if samples.len() < 2 {
        return Err(FitError::TooFewSamples(samples.len()));
    }
    for (index, &(x, y)) in samples.iter().enumerate() {
        if !(x > 0.0 && y > 0.0) {
            return Err(FitError::NonPositive { index, x, y });
        }
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::Degenerate);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).abs())
        .fold(0.0, f64::max);
    Ok(Fit {
        slope,
        intercept,
        max_residual,
    })
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config is not valid key = value text: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("missing key `id`")]
    MissingId,
    #[error("unknown experiment id {0:?}")]
    UnknownId(String),
    #[error("key `{key}`: expected {expected}")]
    Type { key: String, expected: &'static str },
    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: String,
    table: toml::Table,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse()?;
        let id = match table.get("id") {
            Some(toml::Value::String(s)) => s.clone(),
            Some(_) => {
                return Err(ConfigError::Type {
                    key: "id".into(),
                    expected: "a string",
                })
            }
            None => return Err(ConfigError::MissingId),
        };
        ExperimentConfig::with_id(&id, table)
    }

    /// A config for `id`; defaults apply to every key not in `table`.
    pub fn with_id(id: &str, mut table: toml::Table) -> Result<Self, ConfigError> {
        if !EXPERIMENT_IDS.contains(&id) {
            return Err(ConfigError::UnknownId(id.to_string()));
        }
        table.insert("id".into(), toml::Value::String(id.to_string()));
        Ok(ExperimentConfig {
            id: id.to_string(),
            table,
        })
    }

    /// Parses a config for `id`; an `id` key in the text must agree.
    pub fn parse_for(id: &str, text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse()?;
        if let Some(v) = table.get("id") {
            if v.as_str() != Some(id) {
                return Err(ConfigError::Invalid {
                    key: "id".into(),
                    message: format!("config is for {v}, not {id:?}"),
                });
            }
        }
        ExperimentConfig::with_id(id, table)
    }

    pub fn load(path: &Path, id: Option<&str>) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        match id {
            Some(id) => ExperimentConfig::parse_for(id, &text),
            None => ExperimentConfig::parse(&text),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<toml::Value>) {
        self.table.insert(key.to_string(), value.into());
    }

    fn u64(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.table.get(key) {
            None => Ok(default),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(*i as u64),
            Some(_) => Err(ConfigError::Type {
                key: key.into(),
                expected: "a nonnegative integer",
            }),
        }
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.table.get(key) {
            None => Ok(default),
            Some(toml::Value::Float(x)) => Ok(*x),
            Some(toml::Value::Integer(i)) => Ok(*i as f64),
            Some(_) => Err(ConfigError::Type {
                key: key.into(),
                expected: "a number",
            }),
        }
    }

    fn u64_list(&self, key: &str, default: &[u64]) -> Result<Vec<u64>, ConfigError> {
        let list = match self.table.get(key) {
            None => return Ok(default.to_vec()),
            Some(toml::Value::Array(a)) => a,
            Some(_) => {
                return Err(ConfigError::Type {
                    key: key.into(),
                    expected: "a list of nonnegative integers",
                })
            }
        };
        let out = list
            .iter()
            .map(|v| match v {
                toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
                _ => Err(ConfigError::Type {
                    key: key.into(),
                    expected: "a list of nonnegative integers",
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if out.is_empty() {
            return Err(ConfigError::Invalid {
                key: key.into(),
                message: "empty grid".into(),
            });
        }
        Ok(out)
    }

    fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let list = match self.table.get(key) {
            None => return Ok(default.to_vec()),
            Some(toml::Value::Array(a)) => a,
            Some(_) => {
                return Err(ConfigError::Type {
                    key: key.into(),
                    expected: "a list of numbers",
                })
            }
        };
        let out = list
            .iter()
            .map(|v| match v {
                toml::Value::Float(x) => Ok(*x),
                toml::Value::Integer(i) => Ok(*i as f64),
                _ => Err(ConfigError::Type {
                    key: key.into(),
                    expected: "a list of numbers",
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if out.is_empty() {
            return Err(ConfigError::Invalid {
                key: key.into(),
                message: "empty grid".into(),
            });
        }
        Ok(out)
    }

    fn positive(&self, key: &str, v: u64) -> Result<u64, ConfigError> {
        if v == 0 {
            return Err(ConfigError::Invalid {
                key: key.into(),
                message: "must be positive".into(),
            });
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub params: Vec<(String, i64)>,
    pub count: u64,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub name: String,
    pub points: usize,
    pub status: &'static str,
    #[serde(flatten)]
    pub fit: Option<Fit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    pub seed: u64,
    config: toml::Table,
    pub rows: Vec<GridRow>,
    pub fits: Vec<FitReport>,
    /// Measured scalars other than fits.
    pub values: BTreeMap<String, f64>,
    /// Targets taken from theory and configured tolerances.
    pub targets: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl ExperimentReport {
    fn new(cfg: &ExperimentConfig, seed: u64) -> Self {
        ExperimentReport {
            id: cfg.id.clone(),
            seed,
            config: cfg.table.clone(),
            rows: Vec::new(),
            fits: Vec::new(),
            values: BTreeMap::new(),
            targets: BTreeMap::new(),
            checks: Vec::new(),
            error: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn fit(&self, name: &str) -> Option<Fit> {
        self.fits.iter().find(|f| f.name == name).and_then(|f| f.fit)
    }

    fn push_row(&mut self, params: &[(&str, i64)], count: u64, started: Instant) {
        self.rows.push(GridRow {
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            count,
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }

    /// Fits `count` against the parameter `x` over the rows so far.
    fn fit_rows(&mut self, name: &str, x: &str) -> Option<Fit> {
        let samples: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| r.params.iter().find(|(k, _)| k == x).map(|(_, v)| (*v as f64, r.count as f64)))
            .collect();
        self.fit_samples(name, &samples)
    }

    fn fit_samples(&mut self, name: &str, samples: &[(f64, f64)]) -> Option<Fit> {
        let (status, fit) = if samples.len() < MIN_FIT_POINTS {
            ("insufficient data", None)
        } else {
            match fit_exponent(samples) {
                Ok(f) => ("ok", Some(f)),
                Err(_) => ("invalid samples", None),
            }
        };
        self.fits.push(FitReport {
            name: name.to_string(),
            points: samples.len(),
            status,
            fit,
        });
        fit
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            detail,
            passed,
        });
    }

    fn check_slope_at_most(&mut self, name: &str, fit: Option<Fit>, max: f64) {
        match fit {
            Some(f) => self.check(name, f.slope <= max, format!("slope {:.4} <= {max}", f.slope)),
            None => self.check(name, false, "insufficient data".into()),
        }
    }

    fn check_slope_within(&mut self, name: &str, fit: Option<Fit>, lo: f64, hi: f64) {
        match fit {
            Some(f) => self.check(
                name,
                (lo..=hi).contains(&f.slope),
                format!("slope {:.4} in [{lo}, {hi}]", f.slope),
            ),
            None => self.check(name, false, "insufficient data".into()),
        }
    }

    /// Everything except wall-clock data.
    pub fn summary(&self) -> Value {
        let counts: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = serde_json::Map::new();
                for (k, v) in &r.params {
                    m.insert(k.clone(), json!(v));
                }
                m.insert("count".into(), json!(r.count));
                Value::Object(m)
            })
            .collect();
        json!({
            "id": self.id,
            "version": VERSION,
            "seed": self.seed,
            "config": self.config,
            "measured": {
                "counts": counts,
                "fits": self.fits,
                "values": self.values,
            },
            "target": self.targets,
            "checks": self.checks,
            "passed": self.passed(),
            "error": self.error,
        })
    }

    /// The summary plus a `timing` section.
    pub fn summary_with_timing(&self) -> Value {
        let mut v = self.summary();
        let per_row: Vec<f64> = self.rows.iter().map(|r| r.elapsed_ms).collect();
        v["timing"] = json!({
            "elapsed_ms": per_row,
            "total_ms": per_row.iter().sum::<f64>(),
        });
        v
    }

    /// Grid rows as CSV: parameter columns, `count`, `elapsed_ms`.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(first) = self.rows.first() {
            let mut header: Vec<&str> = first.params.iter().map(|(k, _)| k.as_str()).collect();
            header.extend(["count", "elapsed_ms"]);
            w.write_record(&header)?;
        }
        for r in &self.rows {
            let mut rec: Vec<String> = r.params.iter().map(|(_, v)| v.to_string()).collect();
            rec.push(r.count.to_string());
            rec.push(format!("{:.3}", r.elapsed_ms));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<id>.csv` and `<id>.json` into `dir`, returning both paths.
    pub fn write(&self, dir: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.id));
        let json_path = dir.join(format!("{}.json", self.id));
        let csv = self.to_csv().map_err(std::io::Error::other)?;
        fs::write(&csv_path, csv)?;
        let json = serde_json::to_string_pretty(&self.summary_with_timing()).map_err(std::io::Error::other)?;
        fs::write(&json_path, json + "\n")?;
        Ok((csv_path, json_path))
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("experiment {} (seed {})\n", self.id, self.seed);
        for f in &self.fits {
            match f.fit {
                Some(fit) => out.push_str(&format!(
                    "  fit {}: slope {:.4}, intercept {:.4}, max residual {:.4} ({} points)\n",
                    f.name, fit.slope, fit.intercept, fit.max_residual, f.points
                )),
                None => out.push_str(&format!("  fit {}: {} ({} points)\n", f.name, f.status, f.points)),
            }
        }
        for (k, v) in &self.values {
            out.push_str(&format!("  {k} = {v:.6}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("  [{}] {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        out.push_str(if self.passed() { "result: PASS\n" } else { "result: FAIL\n" });
        out
    }
}

type StepResult = Result<(), Box<dyn std::error::Error>>;

/// Runs the experiment named by `cfg.id`. Configuration and computation
/// errors are recorded in the report rather than returned.
pub fn run_experiment(cfg: &ExperimentConfig) -> ExperimentReport {
    let seed = cfg.u64("seed", 0).unwrap_or(0);
    let mut report = ExperimentReport::new(cfg, seed);
    let result = match cfg.id.as_str() {
        "cover-scaling" => cover_scaling(cfg, &mut report),
        "densest-sublinear" => densest_sublinear(cfg, &mut report),
        "lattice-point-bound" => lattice_point_bound(cfg, &mut report),
        "line-union" => line_union(cfg, &mut report),
        "parallel-lines" => parallel_lines(cfg, &mut report),
        "random-curves" => random_curves(cfg, &mut report),
        "projection-degree" => projection_degree(cfg, &mut report),
        "subdivision" => subdivision(cfg, &mut report),
        other => Err(ConfigError::UnknownId(other.to_string()).into()),
    };
    if let Err(e) = result {
        report.error = Some(e.to_string());
    }
    report
}

fn cover_scaling(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> StepResult {
    let n = cfg.u64("n", 2)?;
    let k = cfg.u64("k", 1)?;
    let bs = cfg.u64_list("b_values", &[4, 8, 16, 32, 64])?;
    let lo = cfg.f64("min_exponent", 1.2)?;
    let hi = cfg.f64("max_exponent", 1.8)?;
    r.targets
        .insert("exponent".into(), ((n + 1) * (n - k.min(n))) as f64 / n as f64);
    r.targets.insert("min_exponent".into(), lo);
    r.targets.insert("max_exponent".into(), hi);
    for &b in &bs {
        let t = Instant::now();
        let cover = cover_planes(n as usize, k as usize, cfg.positive("b_values", b)?)?;
        r.push_row(&[("n", n as i64), ("k", k as i64), ("b", b as i64)], cover.len() as u64, t);
    }
    let fit = r.fit_rows("cover_size_vs_b", "b");
    r.check_slope_within("cover exponent", fit, lo, hi);
    Ok(())
}

fn densest_sublinear(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> StepResult {
    let n = cfg.u64("n", 2)?;
    let k = cfg.u64("k", 1)?;
    let b = cfg.positive("b", cfg.u64("b", 50)?)?;
    let ds = cfg.u64_list("d_values", &[1, 2, 4, 8, 16, 32, 64])?;
    let max_exp = cfg.f64("max_exponent", 0.75)?;
    let factor = cfg.f64("growth_factor", 2.0)?;
    r.targets.insert("exponent".into(), n as f64 / (n + 1) as f64);
    r.targets.insert("max_exponent".into(), max_exp);
    r.targets.insert("growth_factor".into(), factor);
    for &d in &ds {
        let t = Instant::now();
        let res = densest_planes_count(n as usize, k as usize, d as usize, b)?;
        r.push_row(&[("n", n as i64), ("k", k as i64), ("d", d as i64), ("b", b as i64)], res.count as u64, t);
    }
    let fit = r.fit_rows("count_vs_d", "d");
    r.check_slope_at_most("sublinear exponent", fit, max_exp);
    let first = r.rows.first().map(|x| (x.params[2].1 as f64, x.count as f64));
    let last = r.rows.last().map(|x| (x.params[2].1 as f64, x.count as f64));
    if let (Some((d0, n0)), Some((d1, n1))) = (first, last) {
        let bound = factor * n0 * (d1 / d0).powf(max_exp);
        r.values.insert("growth_bound".into(), bound);
        r.check(
            "growth bound",
            n1 <= bound,
            format!("N(d={d1}) = {n1} <= {factor} * N(d={d0}) * {}^{max_exp} = {bound:.1}", d1 / d0),
        );
    }
    Ok(())
}

/// A primitive vector of `Z^3` with squared norm in `[1, max_sq]`.
fn random_primitive_vector(rng: &mut ChaCha8Rng, max_sq: u64) -> [i64; 3] {
    let r = (max_sq as f64).sqrt() as i64;
    loop {
        let v = [rng.gen_range(-r..=r), rng.gen_range(-r..=r), rng.gen_range(-r..=r)];
        let nsq = v.iter().map(|x| (x * x) as u64).sum::<u64>();
        if nsq == 0 || nsq > max_sq {
            continue;
        }
        if v.iter().fold(0i64, |g, x| g.gcd(x)) == 1 {
            return v;
        }
    }
}

/// Random primitive rank-2 sublattices of `Z^3`, drawn as orthogonal
/// complements of random primitive vectors.
pub fn random_primitive_planes(samples: usize, max_det_sq: u64, seed: u64) -> Vec<IntegerLattice> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let a = random_primitive_vector(&mut rng, max_det_sq);
            IntegerLattice::from_rows(&[a])
                .and_then(|l| l.orthogonal_complement())
                .expect("complement of a nonzero vector in Z^3")
        })
        .collect()
}

fn lattice_point_bound(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> StepResult {
    let samples = cfg.u64("samples", 200)? as usize;
    let max_det_sq = cfg.positive("max_det_sq", cfg.u64("max_det_sq", 100)?)?;
    let bs = cfg.u64_list("b_values", &[10, 100])?;
    let cmax = cfg.f64("constant_max", 20.0)?;
    r.targets.insert("constant_max".into(), cmax);
    let lattices = random_primitive_planes(samples, max_det_sq, r.seed);
    let mut worst: f64 = 0.0;
    for &b in &bs {
        let b = cfg.positive("b_values", b)?;
        for (i, l) in lattices.iter().enumerate() {
            let t = Instant::now();
            let plane = plane_from_lattice(l)?;
            let count = count_points_on_plane(&plane, b)? as u64;
            let det_sq: u64 = l.det_sq().try_into().unwrap_or(u64::MAX);
            worst = worst.max(count as f64 * (det_sq as f64).sqrt() / (b * b) as f64);
            r.push_row(&[("sample", i as i64), ("det_sq", det_sq as i64), ("b", b as i64)], count, t);
        }
    }
    r.values.insert("max_normalized_count".into(), worst);
    r.check(
        "normalized count bound",
        worst <= cmax,
        format!("max count*sqrt(det_sq)/B^2 = {worst:.4} <= {cmax}"),
    );
    Ok(())
}

fn line_union(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> StepResult {
    let b = cfg.positive("b", cfg.u64("b", 30)?)?;
    let ds = cfg.u64_list("d_values", &[2, 4, 8, 16])?;
    let max_exp = cfg.f64("max_exponent", 0.75)?;
    r.targets.insert("exponent".into(), 2.0 / 3.0);
    r.targets.insert("max_exponent".into(), max_exp);
    let mut agree = true;
    let mut mismatches = Vec::new();
    for &d in &ds {
        let t = Instant::now();
        let dense = densest_planes_count(2, 1, d as usize, b)?;
        let variety = union_of_planes_variety(&dense.planes)?;
        let count = count_proj_points(&variety, b)?;
        if count != dense.count as u64 {
            agree = false;
            mismatches.push(format!("d={d}: {count} vs {}", dense.count));
        }
        r.push_row(&[("d", d as i64), ("b", b as i64)], count, t);
    }
    r.check(
        "variety count equals densest count",
        agree,
        if agree { "all grid points agree".into() } else { mismatches.join(", ") },
    );
    let fit = r.fit_rows("count_vs_d", "d");
    r.check_slope_at_most("d exponent", fit, max_exp);
    Ok(())
}

fn parallel_lines(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> StepResult {
    let bs = cfg.u64_list("b_values", &[5, 10, 20])?;
    let mut ok = true;
    for &b in &bs {
        let b = cfg.positive("b_values", b)?;
        for d in 1..=b {
            let t = Instant::now();
            let f = (0..d).fold(Poly::one(2), |acc, i| &acc * &(&Poly::var(2, 0) - &Poly::constant(2, i)));
            let count = count_affine_points(&VarietySpec::affine(2, vec![f])?, b)?;
            ok &= count == d * (2 * b + 1);
            r.push_row(&[("d", d as i64), ("b", b as i64)], count, t);
        }
    }
    r.check("parallel lines meet d(2B+1)", ok, "exact equality on every grid point".into());
    Ok(())
}

/// A random ternary form of degree `d` with coefficients in `[-c, c]`.
pub fn random_ternary_form(rng: &mut ChaCha8Rng, d: u32, c: i64) -> Poly {
    loop {
        let mut terms = Vec::new();
        for a in 0..=d {
            for b in 0..=d - a {
                terms.push((vec![a, b, d - a - b], rng.gen_range(-c..=c)));
            }
        }
        let f = Poly::from_terms(3, terms);
        if !f.is_zero() && f.terms().all(|(m, _): (&Monomial, &BigInt)| m.degree() == d) {
            return f;
        }
    }
}

fn random_curves(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> StepResult {
    let degrees = cfg.u64_list("degrees", &[2, 3])?;
    let samples = cfg.u64("samples", 5)?;
    let bs = cfg.u64_list("b_values", &[4, 8, 16])?;
    let coeff = cfg.u64("coefficient_bound", 3)? as i64;
    let cmax = cfg.f64("constant_max", 10.0)?;
    r.targets.insert("constant_max".into(), cmax);
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let mut worst: f64 = 0.0;
    for &d in &degrees {
        for s in 0..samples {
            let f = random_ternary_form(&mut rng, d as u32, coeff);
            let v = VarietySpec::projective(2, vec![f])?;
            for &b in &bs {
                let b = cfg.positive("b_values", b)?;
                let t = Instant::now();
                let count = count_proj_points(&v, b)?;
                worst = worst.max(count as f64 / (d * b * b) as f64);
                r.push_row(&[("degree", d as i64), ("sample", s as i64), ("b", b as i64)], count, t);
            }
        }
    }
    r.values.insert("max_count_over_dB2".into(), worst);
    r.check("count <= C d B^2", worst <= cmax, format!("max count/(d B^2) = {worst:.4} <= {cmax}"));
    Ok(())
}

/// Twisted cubic plus seeded random polynomial parametrizations.
pub fn curve_corpus(size: usize, max_degree: u32, seed: u64) -> Vec<SpaceCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![SpaceCurve::twisted_cubic()];
    while out.len() < size {
        let mut coeffs = || -> Vec<i64> {
            let deg = rng.gen_range(1..=max_degree as usize);
            let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-3..=3)).collect();
            if c[deg] == 0 {
                c[deg] = 1;
            }
            c
        };
        out.push(SpaceCurve::parametrized(&coeffs(), &coeffs()));
    }
    out
}

fn projection_degree(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> StepResult {
    let size = cfg.positive("curves", cfg.u64("curves", 25)?)? as usize;
    let max_degree = cfg.positive("max_degree", cfg.u64("max_degree", 4)?)? as u32;
    let mut ok = true;
    for (i, c) in curve_corpus(size, max_degree, r.seed).iter().enumerate() {
        let t = Instant::now();
        let best = best_projection(c)?;
        ok &= best.contract_holds();
        r.push_row(
            &[
                ("curve", i as i64),
                ("declared_degree", best.declared_degree as i64),
                ("drop", best.drop as i64),
            ],
            best.d_prime as u64,
            t,
        );
    }
    r.check("d' <= d and d'^2 >= d", ok, format!("{size} curves"));
    Ok(())
}

fn subdivision(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> StepResult {
    let ks = cfg.u64_list("k_values", &[2, 3, 4])?;
    let hs = cfg.f64_list("h_values", &[10.0, 100.0, 1000.0, 10000.0])?;
    let mut ok = true;
    let mut failures = Vec::new();
    for &k in &ks {
        for &h in &hs {
            let t = Instant::now();
            let s = subdivide(h, k as u32)?;
            let all = s.count_bound_holds()
                && s.endpoints_bracket_two()
                && s.within_declared_precision()
                && s.ratio_bound_holds()
                && s.f_step_property_holds();
            if !all {
                ok = false;
                failures.push(format!("k={k}, H={h}"));
            }
            r.push_row(&[("k", k as i64), ("h", h.round() as i64)], s.intervals() as u64, t);
        }
    }
    r.check(
        "subdivision invariants",
        ok,
        if ok { "all grid points".into() } else { failures.join(", ") },
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn fit_examples() {
        let f = fit_exponent(&[(1.0, 1.0), (10.0, 10f64.powf(1.5)), (100.0, 1000.0)]).unwrap();
        assert!(close(f.slope, 1.5) && f.max_residual < 1e-12);
        let f = fit_exponent(&[(1.0, 5.0), (10.0, 5.0), (100.0, 5.0)]).unwrap();
        assert!(close(f.slope, 0.0));
        let f = fit_exponent(&[(2.0, 4.0), (4.0, 16.0), (8.0, 64.0)]).unwrap();
        assert!(close(f.slope, 2.0));
    }

    #[test]
    fn fit_errors() {
        assert_eq!(fit_exponent(&[(1.0, 1.0)]), Err(FitError::TooFewSamples(1)));
        assert!(matches!(
            fit_exponent(&[(1.0, 1.0), (2.0, 0.0)]),
            Err(FitError::NonPositive { index: 1, .. })
        ));
        assert_eq!(fit_exponent(&[(3.0, 1.0), (3.0, 2.0)]), Err(FitError::Degenerate));
    }

    #[test]
    fn config_parsing() {
        let c = ExperimentConfig::parse("id = \"parallel-lines\"\nb_values = [2, 3]\n").unwrap();
        assert_eq!(c.u64_list("b_values", &[]).unwrap(), vec![2, 3]);
        assert_eq!(c.f64("max_exponent", 0.5).unwrap(), 0.5);
        assert!(matches!(ExperimentConfig::parse("b = 1"), Err(ConfigError::MissingId)));
        assert!(matches!(ExperimentConfig::parse("id = \"nope\""), Err(ConfigError::UnknownId(_))));
        assert!(matches!(ExperimentConfig::parse("id = "), Err(ConfigError::Syntax(_))));
        assert_eq!(ExperimentConfig::parse_for("subdivision", "k_values = [2]").unwrap().id, "subdivision");
        assert!(matches!(
            ExperimentConfig::parse_for("subdivision", "id = \"parallel-lines\""),
            Err(ConfigError::Invalid { .. })
        ));
    }

    #[test]
    fn parallel_lines_report_and_determinism() {
        let mut c = ExperimentConfig::with_id("parallel-lines", toml::Table::new()).unwrap();
        c.set("b_values", vec![2i64, 4]);
        let a = run_experiment(&c);
        let b = run_experiment(&c);
        assert!(a.passed(), "{}", a.render_text());
        assert_eq!(a.rows.len(), 6);
        assert_eq!(
            serde_json::to_string(&a.summary()).unwrap(),
            serde_json::to_string(&b.summary()).unwrap()
        );
        let csv = a.to_csv().unwrap();
        assert!(csv.starts_with("d,b,count,elapsed_ms\n1,2,5,"));
        assert!(a.summary_with_timing()["timing"]["elapsed_ms"].is_array());
    }

    #[test]
    fn short_grid_is_insufficient() {
        let mut c = ExperimentConfig::with_id("cover-scaling", toml::Table::new()).unwrap();
        c.set("b_values", vec![2i64, 3]);
        let r = run_experiment(&c);
        assert_eq!(r.fits[0].status, "insufficient data");
        assert!(!r.passed());
    }

    #[test]
    fn errors_are_recorded() {
        let mut c = ExperimentConfig::with_id("densest-sublinear", toml::Table::new()).unwrap();
        c.set("b", 0i64);
        let r = run_experiment(&c);
        assert!(r.error.is_some());
        assert!(!r.passed());
        let mut c = ExperimentConfig::with_id("line-union", toml::Table::new()).unwrap();
        c.set("d_values", toml::Value::Array(vec![]));
        assert!(run_experiment(&c).error.unwrap().contains("empty grid"));
    }

    #[test]
    fn small_experiments_pass() {
        for (id, overrides) in [
            ("lattice-point-bound", "samples = 20\nb_values = [10]"),
            ("projection-degree", "curves = 6"),
            ("subdivision", "k_values = [2]\nh_values = [10, 100, 1000]"),
            ("random-curves", "samples = 2\nb_values = [2, 4, 6]"),
        ] {
            let c = ExperimentConfig::parse(&format!("id = \"{id}\"\n{overrides}")).unwrap();
            let r = run_experiment(&c);
            assert!(r.passed(), "{}", r.render_text());
        }
    }
}
