//! Per-run record of resolved inputs, grids, checks and timings.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{to_config_toml, ConfigSource, GridOverrides, RunConfig};
use crate::error::{Error, Result};
use crate::grid::UniformAxis;
use crate::oracle::Rho54Coupling;
use crate::params::{derived_rates, DerivedRates, SystemParams};
use crate::validate::Check;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESOLVED_CONFIG_FILE: &str = "resolved.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub name: String,
    /// "rad_per_s" for detunings, "s" for delays.
    pub unit: String,
    pub axis: UniformAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub source: ConfigSource,
    /// rad/s and seconds.
    pub params: SystemParams,
    pub derived: Option<DerivedRates>,
    pub rho54: Rho54Coupling,
    pub grid_overrides: GridOverrides,
    pub warnings: Vec<String>,
    pub grids: Vec<GridRecord>,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub outputs: Vec<String>,
    pub timings: Vec<StageTiming>,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            source: cfg.source.clone(),
            params: cfg.params,
            derived: derived_rates(&cfg.params).ok(),
            rho54: cfg.rho54,
            grid_overrides: cfg.grids,
            warnings: cfg.warnings.clone(),
            grids: Vec::new(),
            tolerances: BTreeMap::new(),
            checks: Vec::new(),
            outputs: Vec::new(),
            timings: Vec::new(),
        }
    }

    pub fn grid(&mut self, name: &str, unit: &str, axis: &UniformAxis) {
        self.grids.push(GridRecord {
            name: name.into(),
            unit: unit.into(),
            axis: *axis,
        });
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.into(), value);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn output(&mut self, file: &str) {
        self.outputs.push(file.into());
    }

    /// Runs `f` and records its wall-clock time under `stage`.
    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.since(stage, t);
        out
    }

    /// Records the time since `start` under `stage`.
    pub fn since(&mut self, stage: &str, start: Instant) {
        self.timings.push(StageTiming {
            stage: stage.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Copy with timings cleared, for comparing runs.
    pub fn without_timings(&self) -> Self {
        let mut m = self.clone();
        for t in &mut m.timings {
            t.seconds = 0.0;
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
    }

    /// Config text reproducing the resolved parameters exactly.
    pub fn config_toml(&self) -> String {
        to_config_toml(&self.params, self.rho54, &self.grid_overrides)
    }

    /// Writes the manifest and the resolved config into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        std::fs::write(dir.join(MANIFEST_FILE), self.to_json() + "\n").map_err(Error::from)?;
        std::fs::write(dir.join(RESOLVED_CONFIG_FILE), self.config_toml()).map_err(Error::from)?;
        Ok(())
    }
}
