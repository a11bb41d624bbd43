//! Experiment configuration: flat `key = value` lines with dotted keys.
//!
//! ```text
//! # comments start with '#'
//! geometry.dims = 8 8 8 8
//! geometry.spacing = 0.125          # one value applies to every axis
//! geometry.k.kind = constant        # or bump
//! geometry.k.value = 0
//! sector.flux = 2 0 0 0 0 0         # n12 n13 n14 n23 n24 n34
//! flow.step = backtracking          # or fixed
//! screen.form = direct_sum(hyperbolic(3), neg(e8), neg(e8))
//! ```
//!
//! Every error names the offending key.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use swtk_core::admissibility::{standard_form, IntersectionForm};
use swtk_core::flow::{FlowOptions, StepRule, Thresholds};
use swtk_core::gauge::FluxMatrix;
use swtk_core::geometry::{Geometry, KSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        path: path.to_string(),
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KKind {
    Constant,
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Fixed,
    Backtracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Random,
    Constant,
    Zero,
}

/// Parsed configuration. The serialized form omits the output directory so
/// that reports do not depend on where they are written.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dims: [usize; 4],
    pub spacing: [f64; 4],
    pub k_kind: KKind,
    pub k_value: f64,
    pub k_center: [f64; 4],
    pub k_radius: f64,
    pub k_depth: f64,
    pub flux: [i64; 6],

    pub max_iters: usize,
    pub step: StepKind,
    pub eta: f64,
    pub initial_step: f64,
    pub armijo_c: f64,
    pub shrink: f64,
    pub grad_tol: f64,
    pub gauge_fix: bool,
    pub gauge_fix_every: usize,
    pub init: InitKind,
    pub init_amplitude: f64,
    pub fluct_amplitude: f64,
    pub eps_mono: Option<f64>,
    pub eps_phi: f64,

    pub form: String,
    pub coeff_bound: u32,
    pub screen_volume: Option<f64>,
    pub screen_k_minus: Option<f64>,
    pub budget: f64,

    pub samples: usize,
    pub clifford_scale: f64,
    pub weitzenbock_grids: Vec<usize>,

    #[serde(skip)]
    pub out_dir: PathBuf,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dims: [8; 4],
            spacing: [0.125; 4],
            k_kind: KKind::Constant,
            k_value: 0.0,
            k_center: [0.5; 4],
            k_radius: 0.25,
            k_depth: 1.0,
            flux: [2, 0, 0, 0, 0, 0],
            max_iters: 5000,
            step: StepKind::Backtracking,
            eta: 1e-3,
            initial_step: 1e-3,
            armijo_c: 1e-4,
            shrink: 0.5,
            grad_tol: 1e-6,
            gauge_fix: false,
            gauge_fix_every: 50,
            init: InitKind::Random,
            init_amplitude: 0.5,
            fluct_amplitude: 0.2,
            eps_mono: None,
            eps_phi: 1e-4,
            form: "hyperbolic(1)".into(),
            coeff_bound: 2,
            screen_volume: None,
            screen_k_minus: None,
            budget: swtk_core::admissibility::DEFAULT_BUDGET,
            samples: 1000,
            clifford_scale: 1.0,
            weitzenbock_grids: vec![8, 16, 32],
            out_dir: PathBuf::from("out"),
            seed: 0,
            parallel: false,
        }
    }
}

fn one<T: FromStr>(path: &str, v: &str) -> Result<T, ConfigError> {
    let toks: Vec<&str> = v.split_whitespace().collect();
    match toks.as_slice() {
        [t] => t.parse().map_err(|_| ConfigError {
            path: path.into(),
            message: format!("cannot parse '{t}'"),
        }),
        _ => err(path, format!("expected one value, got '{v}'")),
    }
}

fn many<T: FromStr>(path: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| ConfigError {
                path: path.into(),
                message: format!("cannot parse '{t}'"),
            })
        })
        .collect()
}

fn fixed<T: FromStr + Copy, const N: usize>(path: &str, v: &str, broadcast: bool) -> Result<[T; N], ConfigError> {
    let xs: Vec<T> = many(path, v)?;
    if broadcast && xs.len() == 1 {
        return Ok([xs[0]; N]);
    }
    xs.try_into().map_err(|x: Vec<T>| ConfigError {
        path: path.into(),
        message: format!("expected {N} values, got {}", x.len()),
    })
}

fn boolean(path: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => err(path, format!("expected true or false, got '{other}'")),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(
                    &format!("line {}", lineno + 1),
                    format!("expected 'key = value', got '{line}'"),
                );
            };
            c.set(key.trim(), value.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "geometry.dims" => self.dims = fixed(key, v, true)?,
            "geometry.spacing" => self.spacing = fixed(key, v, true)?,
            "geometry.k.kind" => {
                self.k_kind = match v {
                    "constant" => KKind::Constant,
                    "bump" => KKind::Bump,
                    _ => return err(key, format!("expected constant or bump, got '{v}'")),
                }
            }
            "geometry.k.value" => self.k_value = one(key, v)?,
            "geometry.k.center" => self.k_center = fixed(key, v, true)?,
            "geometry.k.radius" => self.k_radius = one(key, v)?,
            "geometry.k.depth" => self.k_depth = one(key, v)?,
            "sector.flux" => self.flux = fixed(key, v, false)?,
            "flow.max_iters" => self.max_iters = one(key, v)?,
            "flow.step" => {
                self.step = match v {
                    "fixed" => StepKind::Fixed,
                    "backtracking" => StepKind::Backtracking,
                    _ => return err(key, format!("expected fixed or backtracking, got '{v}'")),
                }
            }
            "flow.eta" => self.eta = one(key, v)?,
            "flow.initial_step" => self.initial_step = one(key, v)?,
            "flow.armijo_c" => self.armijo_c = one(key, v)?,
            "flow.shrink" => self.shrink = one(key, v)?,
            "flow.grad_tol" => self.grad_tol = one(key, v)?,
            "flow.gauge_fix" => self.gauge_fix = boolean(key, v)?,
            "flow.gauge_fix_every" => self.gauge_fix_every = one(key, v)?,
            "flow.init" => {
                self.init = match v {
                    "random" => InitKind::Random,
                    "constant" => InitKind::Constant,
                    "zero" => InitKind::Zero,
                    _ => return err(key, format!("expected random, constant or zero, got '{v}'")),
                }
            }
            "flow.init_amplitude" => self.init_amplitude = one(key, v)?,
            "flow.fluct_amplitude" => self.fluct_amplitude = one(key, v)?,
            "flow.eps_mono" => self.eps_mono = Some(one(key, v)?),
            "flow.eps_phi" => self.eps_phi = one(key, v)?,
            "screen.form" => self.form = v.to_string(),
            "screen.coeff_bound" => self.coeff_bound = one(key, v)?,
            "screen.volume" => self.screen_volume = Some(one(key, v)?),
            "screen.k_minus" => self.screen_k_minus = Some(one(key, v)?),
            "screen.budget" => self.budget = one(key, v)?,
            "identities.samples" => self.samples = one(key, v)?,
            "identities.clifford_scale" => self.clifford_scale = one(key, v)?,
            "identities.weitzenbock_grids" => self.weitzenbock_grids = many(key, v)?,
            "output.dir" => self.out_dir = PathBuf::from(v),
            "seed" => self.seed = one(key, v)?,
            "parallel" => self.parallel = boolean(key, v)?,
            _ => return err(key, "unknown key"),
        }
        Ok(())
    }

    /// Checks every precondition the modules will later rely on.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dims.iter().any(|&n| n < 4) {
            return err("geometry.dims", "every axis needs at least 4 sites");
        }
        if self.spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return err("geometry.spacing", "spacings must be positive");
        }
        if !self.k_value.is_finite() {
            return err("geometry.k.value", "must be finite");
        }
        if self.k_kind == KKind::Bump {
            if !(self.k_radius > 0.0 && self.k_radius.is_finite()) {
                return err("geometry.k.radius", "must be positive");
            }
            if !self.k_depth.is_finite() {
                return err("geometry.k.depth", "must be finite");
            }
        }
        if let Some((k, v)) = self.flux.iter().enumerate().find(|(_, v)| *v % 2 != 0) {
            return err("sector.flux", format!("entry {k} is {v}; fluxes must be even"));
        }
        if self.step == StepKind::Fixed && !(self.eta > 0.0 && self.eta.is_finite()) {
            return err("flow.eta", "must be positive");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return err("flow.initial_step", "must be positive");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return err("flow.armijo_c", "must lie in (0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return err("flow.shrink", "must lie in (0, 1)");
        }
        if !(self.grad_tol > 0.0) {
            return err("flow.grad_tol", "must be positive");
        }
        if self.gauge_fix_every == 0 {
            return err("flow.gauge_fix_every", "must be at least 1");
        }
        if !(self.init_amplitude >= 0.0 && self.init_amplitude.is_finite()) {
            return err("flow.init_amplitude", "must be non-negative");
        }
        if !(self.fluct_amplitude >= 0.0 && self.fluct_amplitude.is_finite()) {
            return err("flow.fluct_amplitude", "must be non-negative");
        }
        if let Some(e) = self.eps_mono {
            if !(e > 0.0) {
                return err("flow.eps_mono", "must be positive");
            }
        }
        if !(self.eps_phi > 0.0) {
            return err("flow.eps_phi", "must be positive");
        }
        if let Err(e) = standard_form(&self.form) {
            return err("screen.form", e.to_string());
        }
        if let Some(v) = self.screen_volume {
            if !(v > 0.0 && v.is_finite()) {
                return err("screen.volume", "must be positive");
            }
        }
        if let Some(k) = self.screen_k_minus {
            if !(k >= 0.0 && k.is_finite()) {
                return err("screen.k_minus", "must be non-negative");
            }
        }
        if !(self.budget > 0.0) {
            return err("screen.budget", "must be positive");
        }
        if self.samples == 0 {
            return err("identities.samples", "must be at least 1");
        }
        if !self.clifford_scale.is_finite() {
            return err("identities.clifford_scale", "must be finite");
        }
        if self.weitzenbock_grids.len() < 2 || self.weitzenbock_grids.iter().any(|&n| n < 4) {
            return err("identities.weitzenbock_grids", "need at least two grid sizes, each ≥ 4");
        }
        Ok(())
    }

    pub fn k_spec(&self) -> KSpec {
        match self.k_kind {
            KKind::Constant => KSpec::Constant(self.k_value),
            KKind::Bump => KSpec::Bump {
                center: self.k_center,
                radius: self.k_radius,
                depth: self.k_depth,
            },
        }
    }

    pub fn geometry(&self) -> Result<Geometry, ConfigError> {
        Geometry::new(self.dims, self.spacing, &self.k_spec())
            .map(|g| g.with_parallel(self.parallel))
            .or_else(|e| err("geometry", e.to_string()))
    }

    pub fn flux_matrix(&self) -> Result<FluxMatrix, ConfigError> {
        FluxMatrix::new(self.flux).or_else(|e| err("sector.flux", e.to_string()))
    }

    pub fn intersection_form(&self) -> Result<IntersectionForm, ConfigError> {
        standard_form(&self.form).or_else(|e| err("screen.form", e.to_string()))
    }

    pub fn flow_options(&self, g: &Geometry) -> FlowOptions {
        let step_rule = match self.step {
            StepKind::Fixed => StepRule::Fixed { eta: self.eta },
            StepKind::Backtracking => StepRule::Backtracking {
                c: self.armijo_c,
                rho: self.shrink,
                initial: self.initial_step,
            },
        };
        let defaults = Thresholds::for_volume(g.volume());
        FlowOptions {
            max_iters: self.max_iters,
            step_rule,
            grad_tol: self.grad_tol,
            gauge_fix: self.gauge_fix,
            gauge_fix_every: self.gauge_fix_every,
            seed: self.seed,
            thresholds: Thresholds {
                eps_mono: self.eps_mono.unwrap_or(defaults.eps_mono),
                eps_phi: self.eps_phi,
            },
        }
    }
}
