//! Scenario files: flat TOML with units in the key names.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use greencell::analytics::{gauss_hermite, QuadratureRule};
use greencell::channel::{AssociationScheme, ChannelModel, ShadowConvention};
use greencell::geomsim::{InterferenceGains, SimConfig, SimWindow};
use greencell::optimizer::LoadContext;
use greencell::powergreen::{dbm_to_watts, LinkBudget, PowerModel};
use greencell::preset;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Everything a figure, compute or validate run reads from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub alpha: f64,
    pub mu_db: f64,
    /// `std-db` or `var-db`; required in every file.
    pub shadow_convention: String,
    /// Curves as `scheme:shadow_db`, with scheme `nearest` or `mrp`.
    pub curves: Vec<String>,
    pub lambda_u_per_km2: f64,
    pub lambda_u_grid_per_km2: Vec<f64>,
    pub load_grid: Vec<f64>,
    pub coverage_grid_db: Vec<f64>,
    pub p_on_w: f64,
    pub p_off_w: f64,
    pub delta: f64,
    pub p_min_dbm: f64,
    pub quad_order: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Loads at which figures also run the simulator; empty disables it.
    pub sim_load_grid: Vec<f64>,
    pub sim_bs_count: f64,
    pub trials: usize,
    pub users_per_trial: usize,
    pub seed: u64,
    /// `fresh` or `correlated`.
    pub interference: String,
    pub out_dir: String,
}

/// Association scheme of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Nearest,
    Mrp,
}

/// One curve of a figure: a scheme and a shadowing level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curve {
    pub scheme: SchemeKind,
    pub shadow_db: f64,
}

impl Curve {
    pub fn scheme(&self) -> AssociationScheme {
        match self.scheme {
            SchemeKind::Nearest => AssociationScheme::NearestBs,
            SchemeKind::Mrp => AssociationScheme::MaxReceivedPower,
        }
    }

    /// File-name friendly label such as `mrp_8db`.
    pub fn label(&self) -> String {
        let name = match self.scheme {
            SchemeKind::Nearest => "nearest",
            SchemeKind::Mrp => "mrp",
        };
        format!("{name}_{}db", self.shadow_db)
    }
}

impl FromStr for Curve {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, db) = s
            .split_once(':')
            .ok_or_else(|| format!("curve `{s}` must look like `nearest:0` or `mrp:8`"))?;
        let scheme = match name {
            "nearest" => SchemeKind::Nearest,
            "mrp" => SchemeKind::Mrp,
            other => return Err(format!("unknown scheme `{other}` in curve `{s}` (expected nearest or mrp)")),
        };
        let shadow_db: f64 = db.parse().map_err(|_| format!("shadowing `{db}` in curve `{s}` is not a number"))?;
        if !(shadow_db >= 0.0 && shadow_db.is_finite()) {
            return Err(format!("shadowing in curve `{s}` must be finite and non-negative"));
        }
        Ok(Self { scheme, shadow_db })
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.scheme {
            SchemeKind::Nearest => "nearest",
            SchemeKind::Mrp => "mrp",
        };
        write!(f, "{name}:{}", self.shadow_db)
    }
}

impl Scenario {
    /// Reference urban micro deployment.
    pub fn preset() -> Self {
        let mut curves = vec!["nearest:0".to_string()];
        curves.extend(preset::MRP_SHADOW_DB.iter().map(|db| format!("mrp:{db}")));
        Self {
            alpha: preset::ALPHA,
            mu_db: preset::MU_DB,
            shadow_convention: ShadowConvention::StdDb.as_str().to_string(),
            curves,
            lambda_u_per_km2: preset::LAMBDA_U,
            lambda_u_grid_per_km2: preset::LAMBDA_U_GRID.to_vec(),
            load_grid: preset::LOAD_GRID.to_vec(),
            coverage_grid_db: (-10..=20).step_by(2).map(f64::from).collect(),
            p_on_w: preset::P_ON_W,
            p_off_w: preset::P_OFF_W,
            delta: preset::DELTA,
            p_min_dbm: preset::P_MIN_DBM,
            quad_order: preset::QUAD_ORDER,
            beta_min: 1.0,
            beta_max: 20.0,
            sim_load_grid: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            sim_bs_count: 500.0,
            trials: 10,
            users_per_trial: 1000,
            seed: 1,
            interference: "fresh".to_string(),
            out_dir: "out".to_string(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }

    /// Parses and validates a scenario, reporting the offending line.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let scenario: Self = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start));
            CliError::Config {
                line,
                message: e.message().to_string(),
            }
        })?;
        scenario.validate().map_err(|(key, message)| CliError::Config {
            line: key_line(text, key),
            message: format!("`{key}`: {message}"),
        })?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are all representable in TOML")
    }

    /// Checks every field, returning the first offending key.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        fn need(ok: bool, key: &'static str, msg: &str) -> Result<(), (&'static str, String)> {
            if ok {
                Ok(())
            } else {
                Err((key, msg.to_string()))
            }
        }
        fn positive_grid(grid: &[f64], key: &'static str) -> Result<(), (&'static str, String)> {
            need(!grid.is_empty(), key, "must not be empty")?;
            need(grid.iter().all(|&x| x.is_finite() && x > 0.0), key, "entries must be finite and positive")
        }
        need(self.alpha > 2.0 && self.alpha.is_finite(), "alpha", "path-loss exponent must exceed 2")?;
        need(self.mu_db.is_finite(), "mu_db", "must be finite")?;
        self.convention().map_err(|e| ("shadow_convention", e))?;
        need(!self.curves.is_empty(), "curves", "must list at least one curve")?;
        self.parsed_curves().map_err(|e| ("curves", e))?;
        need(
            self.lambda_u_per_km2 > 0.0 && self.lambda_u_per_km2.is_finite(),
            "lambda_u_per_km2",
            "must be positive",
        )?;
        positive_grid(&self.lambda_u_grid_per_km2, "lambda_u_grid_per_km2")?;
        positive_grid(&self.load_grid, "load_grid")?;
        need(!self.coverage_grid_db.is_empty(), "coverage_grid_db", "must not be empty")?;
        need(
            self.coverage_grid_db.iter().all(|x| x.is_finite()),
            "coverage_grid_db",
            "entries must be finite",
        )?;
        need(self.p_off_w > 0.0 && self.p_off_w.is_finite(), "p_off_w", "dormant power must be positive")?;
        need(
            self.p_on_w >= self.p_off_w && self.p_on_w.is_finite(),
            "p_on_w",
            "active power must not be below dormant power",
        )?;
        need(self.delta >= 0.0 && self.delta.is_finite(), "delta", "must be non-negative")?;
        need(self.p_min_dbm.is_finite(), "p_min_dbm", "must be finite")?;
        need((4..=64).contains(&self.quad_order), "quad_order", "must lie in 4..=64")?;
        need(self.beta_min >= 1.0, "beta_min", "must be at least 1")?;
        need(
            self.beta_max > self.beta_min && self.beta_max <= 20.0,
            "beta_max",
            "must exceed beta_min and be at most 20",
        )?;
        if !self.sim_load_grid.is_empty() {
            positive_grid(&self.sim_load_grid, "sim_load_grid")?;
        }
        need(self.sim_bs_count >= 10.0, "sim_bs_count", "must be at least 10")?;
        need(self.trials >= 2, "trials", "at least two trials are needed")?;
        need(self.users_per_trial >= 1, "users_per_trial", "must be positive")?;
        self.interference_gains().map_err(|e| ("interference", e))?;
        need(!self.out_dir.is_empty(), "out_dir", "must not be empty")?;
        Ok(())
    }

    pub fn convention(&self) -> Result<ShadowConvention, String> {
        self.shadow_convention.parse()
    }

    pub fn parsed_curves(&self) -> Result<Vec<Curve>, String> {
        self.curves.iter().map(|c| c.parse()).collect()
    }

    pub fn interference_gains(&self) -> Result<InterferenceGains, String> {
        match self.interference.as_str() {
            "fresh" => Ok(InterferenceGains::Fresh),
            "correlated" => Ok(InterferenceGains::Correlated),
            other => Err(format!("unknown interference mode `{other}` (expected fresh or correlated)")),
        }
    }

    pub fn channel(&self, curve: &Curve) -> greencell::Result<ChannelModel> {
        let convention = self.convention().unwrap_or(ShadowConvention::StdDb);
        ChannelModel::from_db(self.alpha, self.mu_db, curve.shadow_db, convention)
    }

    /// Power model with `P_min` referred to one meter through the urban
    /// micro link budget.
    pub fn power_model(&self) -> greencell::Result<PowerModel> {
        PowerModel::new(
            self.p_on_w,
            self.p_off_w,
            self.delta,
            LinkBudget::URBAN_MICRO.effective_p_min(dbm_to_watts(self.p_min_dbm)),
        )
    }

    pub fn quadrature(&self) -> greencell::Result<QuadratureRule> {
        gauss_hermite(self.quad_order)
    }

    pub fn load_context(&self, curve: &Curve) -> greencell::Result<LoadContext> {
        LoadContext::new(
            self.channel(curve)?,
            curve.scheme(),
            self.lambda_u_per_km2,
            self.power_model()?,
            &self.quadrature()?,
        )
    }

    /// Simulation settings for a run at BS intensity `lambda_b` (per km²).
    pub fn sim_config(&self, lambda_b: f64) -> greencell::Result<SimConfig> {
        let mut cfg = SimConfig::new(SimWindow::for_expected_count(lambda_b, self.sim_bs_count)?, self.trials, self.seed);
        cfg.users_per_trial = self.users_per_trial;
        cfg.interference = self.interference_gains().unwrap_or_default();
        Ok(cfg)
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}
