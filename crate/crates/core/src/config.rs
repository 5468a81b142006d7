//! TOML run configuration and the bundled presets.
//!
//! Every section holding rates carries a `unit` tag. Keys not listed here are
//! rejected.
//!
//! ```toml
//! base = "fig3"            # optional: start from a preset and override
//!
//! [fields]
//! unit = "gamma_21"        # or "MHz_cyclic", "rad_per_s"
//! omega_c2 = 10.0
//!
//! [dephasing]
//! unit = "MHz_cyclic"
//! gamma_21 = 3.0
//! [dephasing.ratio]        # multiples of gamma_21
//! gamma_51 = 0.2
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

use crate::oracle::Rho54Coupling;
use crate::params::{from_mhz_cyclic, validate_params, Coherence, DenominatorSign, SystemParams};

pub const FIG2_PRESET: &str = include_str!("../presets/fig2.cfg");
pub const FIG3_PRESET: &str = include_str!("../presets/fig3.cfg");

pub const PRESET_NAMES: [&str; 2] = ["fig2", "fig3"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {col}: {message}")]
    ParseError { line: usize, col: usize, message: String },

    #[error("unknown key `{key}` in [{section}]")]
    UnknownKey { section: String, key: String },

    #[error("[{section}] holds rates but has no `unit` tag")]
    UnitMissing { section: String },

    #[error("unknown unit `{unit}` in [{section}]")]
    UnknownUnit { section: String, unit: String },

    #[error("missing key `{key}` in [{section}]")]
    MissingKey { section: String, key: String },

    #[error("bad value for `{key}` in [{section}]: {message}")]
    BadValue { section: String, key: String, message: String },

    #[error("unknown preset `{0}` (expected fig2 or fig3)")]
    UnknownPreset(String),

    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("invalid parameters: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateUnit {
    #[serde(rename = "MHz_cyclic")]
    MhzCyclic,
    #[serde(rename = "rad_per_s")]
    RadPerS,
    #[serde(rename = "gamma_21")]
    Gamma21,
}

impl RateUnit {
    fn parse(section: &str, s: &str) -> Result<Self, ConfigError> {
        match s {
            "MHz_cyclic" => Ok(RateUnit::MhzCyclic),
            "rad_per_s" => Ok(RateUnit::RadPerS),
            "gamma_21" => Ok(RateUnit::Gamma21),
            _ => Err(ConfigError::UnknownUnit {
                section: section.into(),
                unit: s.into(),
            }),
        }
    }

    fn to_rad_per_s(self, v: f64, gamma21: f64) -> f64 {
        match self {
            RateUnit::MhzCyclic => from_mhz_cyclic(v),
            RateUnit::RadPerS => v,
            RateUnit::Gamma21 => v * gamma21,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigSource {
    Preset(String),
    File(PathBuf),
    Inline,
}

/// Point-count overrides for the spectral grids.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridOverrides {
    pub n2: Option<usize>,
    pub n3: Option<usize>,
}

/// A fully resolved configuration, rates in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: ConfigSource,
    pub params: SystemParams,
    pub rho54: Rho54Coupling,
    pub grids: GridOverrides,
    pub warnings: Vec<String>,
}

/// Preset name or file path.
pub fn load_config(path_or_preset: &str) -> Result<RunConfig, ConfigError> {
    if PRESET_NAMES.contains(&path_or_preset) {
        return load_preset(path_or_preset);
    }
    let path = Path::new(path_or_preset);
    if !path.exists() && !path_or_preset.contains(['/', '.']) {
        return Err(ConfigError::UnknownPreset(path_or_preset.into()));
    }
    load_file(path)
}

pub fn load_preset(name: &str) -> Result<RunConfig, ConfigError> {
    let text = preset_text(name)?;
    let mut cfg = parse_config(text)?;
    cfg.source = ConfigSource::Preset(name.into());
    Ok(cfg)
}

pub fn preset_text(name: &str) -> Result<&'static str, ConfigError> {
    match name {
        "fig2" => Ok(FIG2_PRESET),
        "fig3" => Ok(FIG3_PRESET),
        _ => Err(ConfigError::UnknownPreset(name.into())),
    }
}

pub fn load_file(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut cfg = parse_config(&text)?;
    cfg.source = ConfigSource::File(path.to_path_buf());
    Ok(cfg)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Parses, unit-converts and validates configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    if text.trim().is_empty() {
        return Err(ConfigError::ParseError {
            line: 1,
            col: 1,
            message: "empty configuration".into(),
        });
    }
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, col) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ConfigError::ParseError {
            line,
            col,
            message: e.message().to_string(),
        }
    })?;
    if table.is_empty() {
        return Err(ConfigError::ParseError {
            line: 1,
            col: 1,
            message: "configuration has no keys".into(),
        });
    }

    for key in table.keys() {
        if !["base", "fields", "detunings", "dephasing", "medium", "model", "grids"].contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey {
                section: "top level".into(),
                key: key.clone(),
            });
        }
    }

    let base = match table.get("base") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(bad("top level", "base", "expected a preset name")),
    };
    let mut params = match base.as_deref() {
        Some("fig2") => SystemParams::fig2(),
        Some("fig3") => SystemParams::fig3(),
        Some(other) => return Err(ConfigError::UnknownPreset(other.into())),
        None => SystemParams::fig2(),
    };
    let required = base.is_none();

    // dephasing first: gamma_21 sets the scale for the other sections
    let deph = section(&table, "dephasing")?;
    if let Some(d) = deph {
        let ratio = match d.get("ratio") {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => return Err(bad("dephasing", "ratio", "expected a table")),
        };
        let unit = unit_of(d, "dephasing", d.keys().any(|k| k != "unit" && k != "ratio"))?;
        if unit == Some(RateUnit::Gamma21) {
            return Err(bad("dephasing", "unit", "gamma_21 must be given in MHz_cyclic or rad_per_s"));
        }
        let g21 = match number(d, "dephasing", "gamma_21")? {
            Some(v) => unit.expect("unit checked").to_rad_per_s(v, 0.0),
            None if required => return Err(missing("dephasing", "gamma_21")),
            None => params.gamma21(),
        };
        // unspecified dephasing rates follow gamma_21
        let mut gammas = if required || number(d, "dephasing", "gamma_21")?.is_some() {
            crate::params::Dephasing::uniform(g21)
        } else {
            params.gammas
        };
        for key in d.keys() {
            if key == "unit" || key == "ratio" || key == "gamma_21" {
                continue;
            }
            let c = coherence_key(key).ok_or_else(|| unknown("dephasing", key))?;
            let v = number(d, "dephasing", key)?.expect("key present");
            gammas.set(c, unit.expect("unit checked").to_rad_per_s(v, g21));
        }
        if let Some(r) = ratio {
            for key in r.keys() {
                let c = coherence_key(key).ok_or_else(|| unknown("dephasing.ratio", key))?;
                if c == Coherence::R21 {
                    return Err(bad("dephasing.ratio", key, "gamma_21 cannot be a ratio of itself"));
                }
                if d.contains_key(key) {
                    return Err(bad("dephasing.ratio", key, "also given in [dephasing]"));
                }
                let v = number(r, "dephasing.ratio", key)?.expect("key present");
                gammas.set(c, v * g21);
            }
        }
        params.gammas = gammas;
    } else if required {
        return Err(missing("dephasing", "gamma_21"));
    }
    let g21 = params.gamma21();

    if let Some(f) = section(&table, "fields")? {
        let unit = unit_of(f, "fields", f.keys().any(|k| k != "unit"))?;
        for (key, slot) in [
            ("omega_p", &mut params.omega_p),
            ("omega_c1", &mut params.omega_c1),
            ("omega_c2", &mut params.omega_c2),
        ] {
            match number(f, "fields", key)? {
                Some(v) => *slot = unit.expect("unit checked").to_rad_per_s(v, g21),
                None if required => return Err(missing("fields", key)),
                None => {}
            }
        }
        reject_others(f, "fields", &["unit", "omega_p", "omega_c1", "omega_c2"])?;
    } else if required {
        return Err(missing("fields", "omega_p"));
    }

    if let Some(t) = section(&table, "detunings")? {
        let unit = unit_of(t, "detunings", t.keys().any(|k| k != "unit"))?;
        for (key, slot) in [
            ("delta_p", &mut params.delta_p),
            ("delta_c1", &mut params.delta_c1),
            ("delta_c2", &mut params.delta_c2),
        ] {
            match number(t, "detunings", key)? {
                Some(v) => *slot = unit.expect("unit checked").to_rad_per_s(v, g21),
                None if required => return Err(missing("detunings", key)),
                None => {}
            }
        }
        reject_others(t, "detunings", &["unit", "delta_p", "delta_c1", "delta_c2"])?;
    } else if required {
        return Err(missing("detunings", "delta_p"));
    }

    if let Some(m) = section(&table, "medium")? {
        reject_others(
            m,
            "medium",
            &["unit", "transit_time", "phase_mismatch_offset", "signal_group_velocity_ratio"],
        )?;
        if let Some(v) = number(m, "medium", "transit_time")? {
            let unit = match m.get("unit") {
                None => return Err(ConfigError::UnitMissing { section: "medium".into() }),
                Some(Value::String(s)) => s.as_str(),
                Some(_) => return Err(bad("medium", "unit", "expected a string")),
            };
            params.medium_transit_time = match unit {
                "ns" => v / 1e9,
                "s" => v,
                other => {
                    return Err(ConfigError::UnknownUnit {
                        section: "medium".into(),
                        unit: other.into(),
                    })
                }
            };
        }
        if let Some(v) = number(m, "medium", "phase_mismatch_offset")? {
            params.phase_mismatch_offset = v;
        }
        if let Some(v) = number(m, "medium", "signal_group_velocity_ratio")? {
            params.signal_group_velocity_ratio = v;
        }
    }

    let mut rho54 = Rho54Coupling::default();
    if let Some(m) = section(&table, "model")? {
        reject_others(m, "model", &["chi5_sign", "rho54"])?;
        if let Some(s) = string(m, "model", "chi5_sign")? {
            params.denominator_sign = match s {
                "plus" => DenominatorSign::Plus,
                "minus" => DenominatorSign::Minus,
                _ => return Err(bad("model", "chi5_sign", "expected \"plus\" or \"minus\"")),
            };
        }
        if let Some(s) = string(m, "model", "rho54")? {
            rho54 = match s {
                "lowering" => Rho54Coupling::Lowering,
                "raising" => Rho54Coupling::Raising,
                _ => return Err(bad("model", "rho54", "expected \"lowering\" or \"raising\"")),
            };
        }
    }

    let mut grids = GridOverrides::default();
    if let Some(g) = section(&table, "grids")? {
        reject_others(g, "grids", &["n2", "n3"])?;
        grids.n2 = count(g, "n2")?;
        grids.n3 = count(g, "n3")?;
    }

    let report = validate_params(&params);
    if !report.is_valid() {
        return Err(ConfigError::Invalid(report.violations));
    }
    Ok(RunConfig {
        source: ConfigSource::Inline,
        params,
        rho54,
        grids,
        warnings: report.warnings,
    })
}

/// Config text that reloads to exactly these parameters.
pub fn to_config_toml(p: &SystemParams, rho54: Rho54Coupling, grids: &GridOverrides) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[fields]\nunit = \"rad_per_s\"");
    let _ = writeln!(s, "omega_p = {:?}\nomega_c1 = {:?}\nomega_c2 = {:?}\n", p.omega_p, p.omega_c1, p.omega_c2);
    let _ = writeln!(s, "[detunings]\nunit = \"rad_per_s\"");
    let _ = writeln!(s, "delta_p = {:?}\ndelta_c1 = {:?}\ndelta_c2 = {:?}\n", p.delta_p, p.delta_c1, p.delta_c2);
    let _ = writeln!(s, "[dephasing]\nunit = \"rad_per_s\"");
    for (c, g) in p.gammas.iter() {
        let _ = writeln!(s, "{} = {g:?}", c.gamma_key());
    }
    let _ = writeln!(s, "\n[medium]\nunit = \"s\"");
    let _ = writeln!(
        s,
        "transit_time = {:?}\nphase_mismatch_offset = {:?}\nsignal_group_velocity_ratio = {:?}\n",
        p.medium_transit_time, p.phase_mismatch_offset, p.signal_group_velocity_ratio
    );
    let sign = match p.denominator_sign {
        DenominatorSign::Plus => "plus",
        DenominatorSign::Minus => "minus",
    };
    let coupling = match rho54 {
        Rho54Coupling::Lowering => "lowering",
        Rho54Coupling::Raising => "raising",
    };
    let _ = writeln!(s, "[model]\nchi5_sign = \"{sign}\"\nrho54 = \"{coupling}\"");
    if grids.n2.is_some() || grids.n3.is_some() {
        let _ = writeln!(s, "\n[grids]");
        if let Some(n) = grids.n2 {
            let _ = writeln!(s, "n2 = {n}");
        }
        if let Some(n) = grids.n3 {
            let _ = writeln!(s, "n3 = {n}");
        }
    }
    s
}

fn coherence_key(key: &str) -> Option<Coherence> {
    let digits = key.strip_prefix("gamma_")?.as_bytes();
    if digits.len() != 2 {
        return None;
    }
    let (i, j) = (digits[0].wrapping_sub(b'0'), digits[1].wrapping_sub(b'0'));
    Coherence::from_levels(i, j)
}

fn section<'a>(t: &'a Table, name: &str) -> Result<Option<&'a Table>, ConfigError> {
    match t.get(name) {
        None => Ok(None),
        Some(Value::Table(s)) => Ok(Some(s)),
        Some(_) => Err(bad("top level", name, "expected a table")),
    }
}

fn unit_of(t: &Table, section: &str, has_rates: bool) -> Result<Option<RateUnit>, ConfigError> {
    match t.get("unit") {
        None if has_rates => Err(ConfigError::UnitMissing { section: section.into() }),
        None => Ok(None),
        Some(Value::String(s)) => RateUnit::parse(section, s).map(Some),
        Some(_) => Err(bad(section, "unit", "expected a string")),
    }
}

fn number(t: &Table, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
    match t.get(key) {
        None => Ok(None),
        Some(Value::Float(v)) => Ok(Some(*v)),
        Some(Value::Integer(v)) => Ok(Some(*v as f64)),
        Some(_) => Err(bad(section, key, "expected a number")),
    }
}

fn string<'a>(t: &'a Table, section: &str, key: &str) -> Result<Option<&'a str>, ConfigError> {
    match t.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(bad(section, key, "expected a string")),
    }
}

fn count(t: &Table, key: &str) -> Result<Option<usize>, ConfigError> {
    match t.get(key) {
        None => Ok(None),
        Some(Value::Integer(v)) if *v >= 2 => Ok(Some(*v as usize)),
        Some(_) => Err(bad("grids", key, "expected an integer >= 2")),
    }
}

fn reject_others(t: &Table, section: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    match t.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(unknown(section, k)),
        None => Ok(()),
    }
}

fn unknown(section: &str, key: &str) -> ConfigError {
    ConfigError::UnknownKey {
        section: section.into(),
        key: key.into(),
    }
}

fn missing(section: &str, key: &str) -> ConfigError {
    ConfigError::MissingKey {
        section: section.into(),
        key: key.into(),
    }
}

fn bad(section: &str, key: &str, message: &str) -> ConfigError {
    ConfigError::BadValue {
        section: section.into(),
        key: key.into(),
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_bit_identical() {
        assert_eq!(load_preset("fig2").unwrap().params, SystemParams::fig2());
        assert_eq!(load_preset("fig3").unwrap().params, SystemParams::fig3());
    }

    #[test]
    fn fig3_values() {
        let p = load_config("fig3").unwrap().params;
        let g21 = from_mhz_cyclic(3.0);
        assert_eq!(p.gamma21(), g21);
        assert_eq!(p.omega_c1, 5.0 * g21);
        assert_eq!(p.omega_c2, 5.0 * g21);
        assert_eq!(p.gamma(Coherence::R51), 0.2 * g21);
        assert_eq!(p.delta_p, from_mhz_cyclic(-1000.0));
    }

    #[test]
    fn empty_is_parse_error() {
        assert!(matches!(parse_config(""), Err(ConfigError::ParseError { .. })));
        assert!(matches!(parse_config("  \n# only a comment\n"), Err(ConfigError::ParseError { .. })));
    }

    #[test]
    fn syntax_error_position() {
        let e = parse_config("base = \"fig3\"\n[fields\nunit = 1").unwrap_err();
        match e {
            ConfigError::ParseError { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unit_missing() {
        let e = parse_config("base = \"fig3\"\n[dephasing]\ngamma_21 = 3\n").unwrap_err();
        assert_eq!(e, ConfigError::UnitMissing { section: "dephasing".into() });
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = parse_config("base = \"fig3\"\n[fields]\nunit = \"gamma_21\"\nomega_x = 1\n").unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { .. }));
        let e = parse_config("base = \"fig3\"\n[extra]\n").unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { .. }));
        let e = parse_config("base = \"fig3\"\n[dephasing]\nunit = \"MHz_cyclic\"\ngamma_71 = 1\n").unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { .. }));
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(load_config("fig9"), Err(ConfigError::UnknownPreset(_))));
        assert!(matches!(parse_config("base = \"fig9\"\n"), Err(ConfigError::UnknownPreset(_))));
    }

    #[test]
    fn overrides_on_base() {
        let cfg = parse_config("base = \"fig3\"\n[fields]\nunit = \"gamma_21\"\nomega_c2 = 10\n[medium]\nunit = \"ns\"\ntransit_time = 30\n")
            .unwrap();
        let g21 = from_mhz_cyclic(3.0);
        assert_eq!(cfg.params.omega_c2, 10.0 * g21);
        assert_eq!(cfg.params.omega_c1, 5.0 * g21);
        assert_eq!(cfg.params.medium_transit_time, 30e-9);
        assert!(cfg.warnings.iter().any(|w| w.contains("transit")));
    }

    #[test]
    fn unspecified_gammas_follow_gamma21() {
        let text = "[fields]\nunit = \"MHz_cyclic\"\nomega_p = 0.01\nomega_c1 = 10\nomega_c2 = 10\n\
                    [detunings]\nunit = \"MHz_cyclic\"\ndelta_p = -500\ndelta_c1 = 500\ndelta_c2 = 0\n\
                    [dephasing]\nunit = \"MHz_cyclic\"\ngamma_21 = 2\ngamma_51 = 0.5\n";
        let p = parse_config(text).unwrap().params;
        assert_eq!(p.gamma(Coherence::R64), from_mhz_cyclic(2.0));
        assert_eq!(p.gamma(Coherence::R51), from_mhz_cyclic(0.5));
    }

    #[test]
    fn missing_required_without_base() {
        let e = parse_config("[dephasing]\nunit = \"MHz_cyclic\"\ngamma_21 = 3\n").unwrap_err();
        assert!(matches!(e, ConfigError::MissingKey { .. }));
    }

    #[test]
    fn invalid_values_rejected() {
        let e = parse_config("base = \"fig3\"\n[dephasing.ratio]\ngamma_61 = -1\n").unwrap_err();
        assert!(matches!(e, ConfigError::Invalid(_)), "{e:?}");
    }

    #[test]
    fn round_trip() {
        let mut p = SystemParams::fig3().with_omega_c2(7.3e7);
        p.phase_mismatch_offset = 0.25;
        let grids = GridOverrides { n2: Some(256), n3: None };
        let text = to_config_toml(&p, Rho54Coupling::Raising, &grids);
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.params, p);
        assert_eq!(cfg.rho54, Rho54Coupling::Raising);
        assert_eq!(cfg.grids, grids);
    }
}
