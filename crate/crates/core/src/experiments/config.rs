//! Flat `key = value` experiment configuration.
//!
//! One setting per line, `#` starts a comment, lists are comma-separated.
//! Keys starting with `run.` are run metadata written into manifests and are
//! ignored on input, so a manifest can be fed back as a config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::KernelShape;
use crate::observables::TestFunction;
use crate::profile::ProfileSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// Independent site-wise sampling from the profiles.
    Product,
    /// Exact counts `round(rho * L^d)` at uniformly random positions
    /// (constant profiles only).
    Exact,
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "product" => Ok(InitMode::Product),
            "exact" => Ok(InitMode::Exact),
            other => Err(Error::Config(format!("init must be product | exact, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for InitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InitMode::Product => "product",
            InitMode::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kernel: KernelShape,
    /// Infection strengths; single-run commands use the first.
    pub betas: Vec<f64>,
    pub dim: usize,
    /// Strictly increasing side lengths.
    pub sides: Vec<usize>,
    /// Seeding exponent for critical runs, in `(0, 1/2)`.
    pub alpha: Option<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub rho0: ProfileSpec,
    pub rho1: ProfileSpec,
    pub init: InitMode,
    /// Empty means the standard trigonometric family for `dim`.
    pub test_functions: Vec<TestFunction>,
    pub out: PathBuf,
    pub dt: f64,
    pub t_end: f64,
    /// Number of uniformly spaced sample times on `[0, t_end]`.
    pub samples: usize,
    /// PDE output stride in steps.
    pub sample_every: usize,
    pub u1_tol: f64,
    pub fp_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kernel: KernelShape::MeanField,
            betas: vec![2.0],
            dim: 1,
            sides: vec![100],
            alpha: None,
            replicas: 1,
            seed: 0,
            rho0: ProfileSpec::Constant(0.99),
            rho1: ProfileSpec::Constant(0.01),
            init: InitMode::Product,
            test_functions: Vec::new(),
            out: PathBuf::from("out"),
            dt: 1e-3,
            t_end: 10.0,
            samples: 64,
            sample_every: 100,
            u1_tol: 1e-8,
            fp_tol: 1e-12,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?}")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            if key.starts_with("run.") {
                continue;
            }
            if seen.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key}", lineno + 1)));
            }
        }

        let mut cfg = Self::default();
        for (key, value) in &seen {
            let (key, value) = (key.as_str(), value.as_str());
            match key {
                "kernel" => cfg.kernel = value.parse()?,
                "beta" => cfg.betas = parse_list(key, value)?,
                "d" => cfg.dim = parse_one(key, value)?,
                "L" => cfg.sides = parse_list(key, value)?,
                "alpha" => cfg.alpha = Some(parse_one(key, value)?),
                "replicas" => cfg.replicas = parse_one(key, value)?,
                "seed" => cfg.seed = parse_one(key, value)?,
                "rho0" => cfg.rho0 = value.parse()?,
                "rho1" => cfg.rho1 = value.parse()?,
                "init" => cfg.init = value.parse()?,
                "test_functions" => cfg.test_functions = parse_list(key, value)?,
                "out" => cfg.out = PathBuf::from(value),
                "dt" => cfg.dt = parse_one(key, value)?,
                "t_end" => cfg.t_end = parse_one(key, value)?,
                "samples" => cfg.samples = parse_one(key, value)?,
                "sample_every" => cfg.sample_every = parse_one(key, value)?,
                "u1_tol" => cfg.u1_tol = parse_one(key, value)?,
                "fp_tol" => cfg.fp_tol = parse_one(key, value)?,
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.betas.is_empty() || self.betas.iter().any(|&b| !(b >= 0.0) || !b.is_finite()) {
            return fail(format!("beta must be a nonempty list of nonnegative values, got {:?}", self.betas));
        }
        if self.dim == 0 {
            return fail("d must be positive".into());
        }
        if self.sides.is_empty() || self.sides.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("L values must be strictly increasing, got {:?}", self.sides));
        }
        if self.sides[0] == 0 {
            return fail("L must be positive".into());
        }
        if self.replicas == 0 {
            return fail("replicas must be at least 1".into());
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 0.5) {
                return fail(format!("alpha must lie in (0, 1/2), got {a}"));
            }
        }
        if !(self.dt > 0.0 && self.dt <= crate::pde::MAX_DT) {
            return fail(format!("dt must lie in (0, 0.1], got {}", self.dt));
        }
        if !(self.t_end >= 0.0) || !(self.u1_tol > 0.0) || !(self.fp_tol > 0.0) {
            return fail("t_end must be nonnegative and tolerances positive".into());
        }
        if self.samples == 0 || self.sample_every == 0 {
            return fail("samples and sample_every must be positive".into());
        }
        for tf in &self.test_functions {
            if let TestFunction::Cos { axis, .. } | TestFunction::Sin { axis, .. } = tf {
                if *axis >= self.dim {
                    return fail(format!("test function {tf} needs axis {axis} < d"));
                }
            }
        }
        if self.init == InitMode::Exact && !(self.rho0.is_constant() && self.rho1.is_constant()) {
            return fail("init = exact needs constant rho0 and rho1".into());
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        self.betas[0]
    }

    pub fn tests(&self) -> Vec<TestFunction> {
        if self.test_functions.is_empty() {
            TestFunction::standard_family(self.dim)
        } else {
            self.test_functions.clone()
        }
    }

    /// `samples` uniformly spaced times on `[0, t_end]`.
    pub fn sample_times(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.t_end];
        }
        let n = self.samples - 1;
        (0..=n).map(|k| self.t_end * k as f64 / n as f64).collect()
    }

    /// The config as parseable text; every value round-trips exactly.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("kernel", self.kernel.to_string());
        kv("beta", join(self.betas.iter().map(|b| b.to_string()).collect()));
        kv("d", self.dim.to_string());
        kv("L", join(self.sides.iter().map(|l| l.to_string()).collect()));
        if let Some(a) = self.alpha {
            kv("alpha", a.to_string());
        }
        kv("replicas", self.replicas.to_string());
        kv("seed", self.seed.to_string());
        kv("rho0", self.rho0.to_string());
        kv("rho1", self.rho1.to_string());
        kv("init", self.init.to_string());
        kv(
            "test_functions",
            join(self.tests().iter().map(|t| t.to_string()).collect()),
        );
        kv("out", self.out.display().to_string());
        kv("dt", self.dt.to_string());
        kv("t_end", self.t_end.to_string());
        kv("samples", self.samples.to_string());
        kv("sample_every", self.sample_every.to_string());
        kv("u1_tol", self.u1_tol.to_string());
        kv("fp_tol", self.fp_tol.to_string());
        s
    }
}
