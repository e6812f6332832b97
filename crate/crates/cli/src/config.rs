//! Layered experiment configuration.
//!
//! Every accepted key is declared in [`SCHEMA`]. Documents and `--set`
//! overrides are checked against it key by key, merged over the defaults
//! and only then deserialized, so errors always name the offending key.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("cannot parse config near `{key}`: {reason}")]
    Parse { key: String, reason: String },
}

impl ConfigError {
    pub fn key(&self) -> &str {
        match self {
            ConfigError::UnknownKey(k) => k,
            ConfigError::InvalidValue { key, .. } | ConfigError::Parse { key, .. } => key,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Int,
    Float,
    Str,
    Bool,
    Floats,
}

const SCHEMA: &[(&str, Kind)] = &[
    ("n", Kind::Int),
    ("geometry.shape", Kind::Str),
    ("geometry.radius", Kind::Float),
    ("geometry.axial", Kind::Float),
    ("geometry.half_length", Kind::Float),
    ("geometry.nodes", Kind::Int),
    ("flow.dt_safety", Kind::Float),
    ("flow.max_h_blowup", Kind::Float),
    ("flow.t_end", Kind::Float),
    ("flow.remesh_interval", Kind::Int),
    ("flow.snapshot_dt", Kind::Float),
    ("flow.max_steps", Kind::Int),
    ("audit.estimate", Kind::Str),
    ("audit.alpha", Kind::Float),
    ("audit.tol", Kind::Float),
    ("audit.l", Kind::Float),
    ("audit.eps_list", Kind::Floats),
    ("audit.center", Kind::Float),
    ("audit.r_list", Kind::Floats),
    ("audit.interior_l", Kind::Floats),
    ("audit.barrier_p", Kind::Float),
    ("audit.barrier_c", Kind::Float),
    ("audit.barrier_t_max", Kind::Float),
    ("audit.barrier_tol", Kind::Float),
    ("audit.refine", Kind::Bool),
    ("audit.stability", Kind::Float),
    ("soliton.kind", Kind::Str),
    ("soliton.rho_max", Kind::Float),
    ("soliton.step", Kind::Float),
    ("soliton.tip_height", Kind::Float),
    ("soliton.alpha_list", Kind::Floats),
    ("spacetime.delta", Kind::Float),
    ("spacetime.seed_snapshot", Kind::Int),
    ("spacetime.seed_node", Kind::Int),
    ("spacetime.horizons", Kind::Floats),
    ("spacetime.lambda", Kind::Float),
    ("spacetime.random_fields", Kind::Int),
    ("spacetime.field_nodes", Kind::Int),
    ("spacetime.field_snapshots", Kind::Int),
    ("existence.shape", Kind::Str),
    ("existence.heights", Kind::Floats),
    ("existence.epss", Kind::Floats),
    ("existence.delta", Kind::Float),
    ("existence.ball_radius", Kind::Float),
    ("existence.nodes", Kind::Int),
    ("existence.x_max", Kind::Float),
    ("existence.samples", Kind::Int),
    ("existence.tol", Kind::Float),
];

fn kind_of(key: &str) -> Option<Kind> {
    SCHEMA.iter().find(|(k, _)| *k == key).map(|(_, kind)| *kind)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// `sphere`, `ellipsoid` or `capsule`.
    pub shape: String,
    /// Sphere radius, equatorial semi-axis or capsule radius.
    pub radius: f64,
    pub axial: f64,
    pub half_length: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub dt_safety: f64,
    pub max_h_blowup: Option<f64>,
    pub t_end: Option<f64>,
    pub remesh_interval: usize,
    pub snapshot_dt: Option<f64>,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    /// `umbilic`, `interior`, `pinching` or `barrier`.
    pub estimate: String,
    /// Pinching constant; unset means the initial `min kappa_1 / H`.
    pub alpha: Option<f64>,
    pub tol: f64,
    pub l: f64,
    pub eps_list: Vec<f64>,
    pub center: f64,
    pub r_list: Vec<f64>,
    pub interior_l: Vec<f64>,
    pub barrier_p: f64,
    pub barrier_c: Option<f64>,
    pub barrier_t_max: Option<f64>,
    pub barrier_tol: f64,
    /// Repeat the audit at doubled resolution and compare constants.
    pub refine: bool,
    /// Allowed relative drift of measured constants under refinement.
    pub stability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonSection {
    /// `translator` or `expander`.
    pub kind: String,
    pub rho_max: f64,
    pub step: f64,
    pub tip_height: f64,
    pub alpha_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeSection {
    pub delta: f64,
    pub seed_snapshot: usize,
    /// Unset means the equator.
    pub seed_node: Option<usize>,
    pub horizons: Vec<f64>,
    pub lambda: f64,
    pub random_fields: usize,
    pub field_nodes: usize,
    pub field_snapshots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExistenceSection {
    /// `paraboloid` (x = r^2 / 2) or `cone` (x = r).
    pub shape: String,
    pub heights: Vec<f64>,
    pub epss: Vec<f64>,
    pub delta: f64,
    pub ball_radius: f64,
    pub nodes: usize,
    pub x_max: f64,
    pub samples: usize,
    /// Required spread between the two finest settings.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub n: usize,
    pub geometry: GeometrySection,
    pub flow: FlowSection,
    pub audit: AuditSection,
    pub soliton: SolitonSection,
    pub spacetime: SpacetimeSection,
    pub existence: ExistenceSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n: 2,
            geometry: GeometrySection {
                shape: "ellipsoid".into(),
                radius: 1.0,
                axial: 1.5,
                half_length: 1.0,
                nodes: 201,
            },
            flow: FlowSection {
                dt_safety: 0.9,
                max_h_blowup: None,
                t_end: None,
                remesh_interval: 1000,
                snapshot_dt: Some(0.002),
                max_steps: 50_000_000,
            },
            audit: AuditSection {
                estimate: "pinching".into(),
                alpha: None,
                tol: 1e-3,
                l: 4.0,
                eps_list: vec![0.05, 0.1, 0.2],
                center: 0.0,
                r_list: vec![0.3, 0.5],
                interior_l: vec![2.0, 4.0],
                barrier_p: -2.0,
                barrier_c: None,
                barrier_t_max: Some(0.05),
                barrier_tol: 1e-3,
                refine: true,
                stability: 0.1,
            },
            soliton: SolitonSection {
                kind: "translator".into(),
                rho_max: 20.0,
                step: 0.01,
                tip_height: 1.0,
                alpha_list: vec![0.3, 0.1, 0.03],
            },
            spacetime: SpacetimeSection {
                delta: 0.5,
                seed_snapshot: 0,
                seed_node: None,
                horizons: vec![0.05, 0.1, 0.2],
                lambda: 2.0,
                random_fields: 100,
                field_nodes: 41,
                field_snapshots: 30,
            },
            existence: ExistenceSection {
                shape: "paraboloid".into(),
                heights: vec![2.0, 4.0, 8.0],
                epss: vec![0.1, 0.01, 0.001],
                delta: 0.05,
                ball_radius: 1.0,
                nodes: 801,
                x_max: 12.5,
                samples: 4001,
                tol: 1e-2,
            },
        }
    }
}

/// Default tree with every declared key present (optional keys absent).
fn default_table() -> Table {
    Table::try_from(Config::default()).expect("defaults serialize")
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "string",
        Value::Integer(_) => "integer",
        Value::Float(_) => "float",
        Value::Boolean(_) => "boolean",
        Value::Datetime(_) => "datetime",
        Value::Array(_) => "array",
        Value::Table(_) => "table",
    }
}

/// Coerces `v` to the declared kind of `key`.
fn coerce(key: &str, kind: Kind, v: Value) -> Result<Value, ConfigError> {
    let bad = |reason: String| ConfigError::InvalidValue {
        key: key.to_string(),
        reason,
    };
    let number = |v: &Value| match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    };
    match kind {
        Kind::Int => match v {
            Value::Integer(i) if i >= 0 => Ok(Value::Integer(i)),
            Value::Integer(i) => Err(bad(format!("expected a non-negative integer, got {i}"))),
            other => Err(bad(format!("expected an integer, got {}", type_name(&other)))),
        },
        Kind::Float => match number(&v) {
            Some(x) if x.is_finite() => Ok(Value::Float(x)),
            Some(x) => Err(bad(format!("expected a finite number, got {x}"))),
            None => Err(bad(format!("expected a number, got {}", type_name(&v)))),
        },
        Kind::Str => match v {
            Value::String(_) => Ok(v),
            other => Err(bad(format!("expected a string, got {}", type_name(&other)))),
        },
        Kind::Bool => match v {
            Value::Boolean(_) => Ok(v),
            other => Err(bad(format!("expected a boolean, got {}", type_name(&other)))),
        },
        Kind::Floats => match v {
            Value::Array(items) => items
                .iter()
                .map(|x| match number(x) {
                    Some(f) if f.is_finite() => Ok(Value::Float(f)),
                    _ => Err(bad(format!("array entries must be numbers, got {}", type_name(x)))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Array),
            other => match number(&other) {
                Some(f) if f.is_finite() => Ok(Value::Array(vec![Value::Float(f)])),
                _ => Err(bad(format!("expected an array of numbers, got {}", type_name(&other)))),
            },
        },
    }
}

fn set_path(root: &mut Table, key: &str, v: Value) {
    match key.split_once('.') {
        Some((section, leaf)) => {
            let entry = root
                .entry(section.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            if let Value::Table(t) = entry {
                t.insert(leaf.to_string(), v);
            }
        }
        None => {
            root.insert(key.to_string(), v);
        }
    }
}

/// Flattens a document into dotted keys, rejecting nesting deeper than one
/// section.
fn flatten(doc: Table) -> Result<Vec<(String, Value)>, ConfigError> {
    let mut out = Vec::new();
    for (k, v) in doc {
        match v {
            Value::Table(section) => {
                if !SCHEMA.iter().any(|(key, _)| key.starts_with(&format!("{k}."))) {
                    return Err(ConfigError::UnknownKey(k));
                }
                for (leaf, v) in section {
                    out.push((format!("{k}.{leaf}"), v));
                }
            }
            v => out.push((k, v)),
        }
    }
    Ok(out)
}

/// Maps a toml syntax error back to the key written on the offending line.
fn parse_error(text: &str, err: toml::de::Error) -> ConfigError {
    let mut key = String::from("<document>");
    if let Some(span) = err.span() {
        let start = text[..span.start.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
        let line = text[start..].lines().next().unwrap_or("");
        let mut section = None;
        for l in text[..start].lines() {
            let l = l.trim();
            if l.starts_with('[') && l.ends_with(']') {
                section = Some(l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
            }
        }
        if let Some((k, _)) = line.split_once('=') {
            let k = k.trim();
            key = match section {
                Some(s) => format!("{s}.{k}"),
                None => k.to_string(),
            };
        }
    }
    ConfigError::Parse {
        key,
        reason: err.message().to_string(),
    }
}

/// Parses a `key = value` override; bare words become strings.
pub fn parse_override(arg: &str) -> Result<(String, Value), ConfigError> {
    let (key, raw) = arg.split_once('=').ok_or_else(|| ConfigError::Parse {
        key: arg.to_string(),
        reason: "expected key=value".into(),
    })?;
    let key = key.trim().to_string();
    let raw = raw.trim();
    let kind = kind_of(&key).ok_or_else(|| ConfigError::UnknownKey(key.clone()))?;
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or(Value::String(raw.into())),
        Err(_) if kind == Kind::Floats => {
            let items: Result<Vec<Value>, ConfigError> = raw
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map(Value::Float).map_err(|_| ConfigError::InvalidValue {
                        key: key.clone(),
                        reason: format!("`{raw}` is not a number list"),
                    })
                })
                .collect();
            Value::Array(items?)
        }
        Err(_) => Value::String(raw.into()),
    };
    Ok((key, value))
}

/// Layered configuration: defaults, then each layer of dotted-key values in
/// order. Layers come from presets, config files and command-line overrides.
#[derive(Debug, Clone)]
pub struct Layers {
    table: Table,
}

impl Default for Layers {
    fn default() -> Self {
        Layers {
            table: default_table(),
        }
    }
}

impl Layers {
    pub fn set(&mut self, key: &str, v: Value) -> Result<(), ConfigError> {
        let kind = kind_of(key).ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
        let v = coerce(key, kind, v)?;
        set_path(&mut self.table, key, v);
        Ok(())
    }

    pub fn apply_pairs(&mut self, pairs: Vec<(String, Value)>) -> Result<(), ConfigError> {
        for (k, v) in pairs {
            self.set(&k, v)?;
        }
        Ok(())
    }

    pub fn apply_document(&mut self, text: &str) -> Result<(), ConfigError> {
        let doc: Table = text.parse().map_err(|e| parse_error(text, e))?;
        self.apply_pairs(flatten(doc)?)
    }

    pub fn apply_override(&mut self, arg: &str) -> Result<(), ConfigError> {
        let (k, v) = parse_override(arg)?;
        self.set(&k, v)
    }

    pub fn resolve(self) -> Result<Config, ConfigError> {
        let cfg: Config = Value::Table(self.table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse {
                key: "<document>".into(),
                reason: e.message().to_string(),
            })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Resolves a single document over the defaults.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut layers = Layers::default();
    layers.apply_document(text)?;
    layers.resolve()
}

fn check(cond: bool, key: &str, reason: &str) -> Result<(), ConfigError> {
    if cond {
        Ok(())
    } else {
        Err(ConfigError::InvalidValue {
            key: key.into(),
            reason: reason.into(),
        })
    }
}

fn one_of(value: &str, key: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    check(
        allowed.contains(&value),
        key,
        &format!("`{value}` is not one of {}", allowed.join(", ")),
    )
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        check(self.n >= 1, "n", "dimension must be at least 1")?;
        let g = &self.geometry;
        one_of(&g.shape, "geometry.shape", &["sphere", "ellipsoid", "capsule"])?;
        check(g.radius > 0.0, "geometry.radius", "must be positive")?;
        check(g.axial > 0.0, "geometry.axial", "must be positive")?;
        check(g.half_length >= 0.0, "geometry.half_length", "must be non-negative")?;
        check(g.nodes >= 11, "geometry.nodes", "need at least 11 nodes")?;
        let f = &self.flow;
        check(f.dt_safety > 0.0 && f.dt_safety <= 1.0, "flow.dt_safety", "must lie in (0, 1]")?;
        check(f.max_h_blowup.map_or(true, |h| h > 0.0), "flow.max_h_blowup", "must be positive")?;
        check(f.t_end.map_or(true, |t| t > 0.0), "flow.t_end", "must be positive")?;
        check(f.snapshot_dt.map_or(true, |t| t > 0.0), "flow.snapshot_dt", "must be positive")?;
        check(f.max_steps > 0, "flow.max_steps", "must be positive")?;
        let a = &self.audit;
        one_of(&a.estimate, "audit.estimate", &["umbilic", "interior", "pinching", "barrier"])?;
        check(a.alpha.map_or(true, |x| (0.0..=1.0).contains(&x)), "audit.alpha", "must lie in [0, 1]")?;
        check(a.tol > 0.0, "audit.tol", "must be positive")?;
        check(a.l > 0.0, "audit.l", "must be positive")?;
        check(
            !a.eps_list.is_empty() && a.eps_list.iter().all(|e| *e > 0.0),
            "audit.eps_list",
            "needs positive entries",
        )?;
        check(
            !a.r_list.is_empty() && a.r_list.iter().all(|e| *e > 0.0),
            "audit.r_list",
            "needs positive entries",
        )?;
        check(
            !a.interior_l.is_empty() && a.interior_l.iter().all(|e| *e > 0.0),
            "audit.interior_l",
            "needs positive entries",
        )?;
        check(a.stability > 0.0, "audit.stability", "must be positive")?;
        check(a.barrier_tol > 0.0, "audit.barrier_tol", "must be positive")?;
        check(a.barrier_t_max.map_or(true, |t| t > 0.0), "audit.barrier_t_max", "must be positive")?;
        let s = &self.soliton;
        one_of(&s.kind, "soliton.kind", &["translator", "expander"])?;
        check(s.rho_max > 0.0, "soliton.rho_max", "must be positive")?;
        check(s.step > 0.0 && s.step < s.rho_max, "soliton.step", "must lie in (0, rho_max)")?;
        check(s.tip_height > 0.0, "soliton.tip_height", "must be positive")?;
        check(
            s.alpha_list.iter().all(|x| *x > 0.0 && *x <= 1.0),
            "soliton.alpha_list",
            "entries must lie in (0, 1]",
        )?;
        let st = &self.spacetime;
        check(st.delta > 0.0, "spacetime.delta", "must be positive")?;
        check(st.lambda > 0.0, "spacetime.lambda", "must be positive")?;
        check(st.field_nodes >= 11, "spacetime.field_nodes", "need at least 11 nodes")?;
        check(st.field_snapshots >= 1, "spacetime.field_snapshots", "need at least one snapshot")?;
        check(st.horizons.iter().all(|j| *j > 0.0), "spacetime.horizons", "must be positive")?;
        let e = &self.existence;
        one_of(&e.shape, "existence.shape", &["paraboloid", "cone"])?;
        check(
            !e.heights.is_empty() && e.heights.windows(2).all(|w| w[1] > w[0]) && e.heights[0] > 0.0,
            "existence.heights",
            "must be positive and increasing",
        )?;
        check(
            !e.epss.is_empty() && e.epss.windows(2).all(|w| w[1] < w[0]) && e.epss.iter().all(|x| *x > 0.0),
            "existence.epss",
            "must be positive and decreasing",
        )?;
        check(e.delta > 0.0, "existence.delta", "must be positive")?;
        check(e.ball_radius > 0.0, "existence.ball_radius", "must be positive")?;
        check(e.nodes >= 11, "existence.nodes", "need at least 11 nodes")?;
        check(e.samples >= 11, "existence.samples", "need at least 11 samples")?;
        check(
            e.heights.last().map_or(true, |h| *h < e.x_max),
            "existence.x_max",
            "must exceed the largest height",
        )?;
        check(e.tol > 0.0, "existence.tol", "must be positive")?;
        Ok(())
    }

    pub fn flow_config(&self) -> mcflab::FlowConfig {
        let f = &self.flow;
        mcflab::FlowConfig {
            n: self.n,
            dt_safety: f.dt_safety,
            max_h_blowup: f.max_h_blowup,
            t_end: f.t_end,
            remesh_interval: f.remesh_interval,
            snapshot_dt: f.snapshot_dt,
            max_steps: f.max_steps,
        }
    }

    pub fn initial_profile(&self, nodes: usize) -> Result<mcflab::Profile, mcflab::geometry::GeometryError> {
        let g = &self.geometry;
        match g.shape.as_str() {
            "sphere" => mcflab::Profile::sphere(self.n, g.radius, nodes),
            "capsule" => mcflab::Profile::capsule(self.n, g.radius, g.half_length, nodes),
            _ => mcflab::Profile::ellipsoid(self.n, g.radius, g.axial, nodes),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_the_schema() {
        for (k, _) in default_table()
            .iter()
            .flat_map(|(k, v)| match v {
                Value::Table(t) => t.keys().map(|l| (format!("{k}.{l}"), ())).collect::<Vec<_>>(),
                _ => vec![(k.clone(), ())],
            })
        {
            assert!(kind_of(&k).is_some(), "{k} missing from schema");
        }
        Config::default().validate().unwrap();
    }

    #[test]
    fn override_lists_accept_commas() {
        let (k, v) = parse_override("soliton.alpha_list=0.3,0.1").unwrap();
        assert_eq!(k, "soliton.alpha_list");
        assert_eq!(v, Value::Array(vec![Value::Float(0.3), Value::Float(0.1)]));
        let (_, v) = parse_override("geometry.shape=sphere").unwrap();
        assert_eq!(v, Value::String("sphere".into()));
    }

    #[test]
    fn optional_keys_can_be_set() {
        let cfg = parse_config("[flow]\nt_end = 0.1\n[audit]\nalpha = 0.25\n").unwrap();
        assert_eq!(cfg.flow.t_end, Some(0.1));
        assert_eq!(cfg.audit.alpha, Some(0.25));
    }

    #[test]
    fn integers_widen_to_floats() {
        let cfg = parse_config("[soliton]\nrho_max = 10\n").unwrap();
        assert_eq!(cfg.soliton.rho_max, 10.0);
    }
}
