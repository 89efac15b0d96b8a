//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Later assignments win, so command-line
//! overrides are applied by setting keys after the file has been read.

use std::collections::BTreeMap;
use std::sync::Arc;

use evalexpr::{build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value};
use lowsing::fields::Grid;
use lowsing::operator::{CoefficientField, SeparableTerm, ZCoefficient};
use lowsing::orlicz::NFunction;
use lowsing::symbols::SubordinatorSpec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("configuration is empty")]
    Empty,
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value:?} ({reason})")]
    BadValue { key: String, value: String, reason: String },
}

/// Recognized keys with a short description of the expected value.
pub const KEYS: &[(&str, &str)] = &[
    ("spec", "gamma | stable:<alpha>"),
    ("dim", "1 | 2"),
    ("grid", "points per axis, a power of two"),
    ("length", "side length L of the torus"),
    ("lambda", "positive discount / resolvent parameter"),
    ("beta", "Hölder index of the Schauder ratio, in [0, 1)"),
    ("seed", "base seed"),
    ("eps", "small-jump cutoff"),
    ("paths", "number of simulated paths"),
    ("horizon", "simulation horizon T"),
    ("radii", "comma-separated ball radii"),
    ("delta", "exit radius"),
    ("orlicz", "power:<p> | exp:<beta>"),
    ("amplitude", "x-oscillation amplitude of the coefficient"),
    ("coeff_x", "expression in x, y for the x-factor of the coefficient"),
    ("coeff_z", "expression in r = |z| for the z-factor of the coefficient"),
    ("field", "path of an input field container"),
    ("events", "number of paths written to event CSV files"),
    ("jtrunc", "truncation level of the counterexample"),
    ("start", "comma-separated start point"),
];

/// Parsed key-value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

impl ConfigMap {
    /// Parses a configuration file; a file without any assignment is an error.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.into(),
            })?;
            map.set(k.trim(), v.trim())?;
        }
        if map.entries.is_empty() {
            return Err(ConfigError::Empty);
        }
        Ok(map)
    }

    /// Sets `key`, replacing an earlier value; parses `key=value` overrides the same way.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !known(key) {
            return Err(ConfigError::UnknownKey(key.into()));
        }
        self.entries.insert(key.into(), value.into());
        Ok(())
    }

    pub fn set_assignment(&mut self, text: &str) -> Result<(), ConfigError> {
        let (k, v) = text.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: 0,
            text: text.into(),
        })?;
        self.set(k.trim(), v.trim())
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Checks every present key against its expected type before any computation runs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for key in self.entries.keys() {
            match key.as_str() {
                "spec" | "dim" => {
                    self.spec()?;
                }
                "grid" => {
                    self.grid(16, 16.0)?;
                }
                "length" | "lambda" | "eps" | "horizon" | "delta" => {
                    self.positive(key, 1.0)?;
                }
                "amplitude" => {
                    self.amplitude()?;
                }
                "beta" => {
                    self.beta()?;
                }
                "seed" => {
                    self.seed(0)?;
                }
                "paths" | "events" | "jtrunc" => {
                    self.count(key, 1)?;
                }
                "radii" => {
                    self.list("radii", &[])?;
                }
                "start" => {
                    self.start()?;
                }
                "orlicz" => {
                    self.orlicz()?;
                }
                "coeff_x" | "coeff_z" | "field" => {}
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
        if self.get("coeff_x").is_some() || self.get("coeff_z").is_some() {
            self.coefficient(16.0)?;
        }
        Ok(())
    }

    pub fn dim(&self) -> Result<usize, ConfigError> {
        match self.get("dim") {
            None => Ok(1),
            Some(v) => match v {
                "1" => Ok(1),
                "2" => Ok(2),
                _ => Err(bad("dim", v, "expected 1 or 2")),
            },
        }
    }

    pub fn spec(&self) -> Result<SubordinatorSpec, ConfigError> {
        let dim = self.dim()?;
        let text = self.get("spec").unwrap_or("gamma");
        let spec = match text.split_once(':') {
            None if text == "gamma" => SubordinatorSpec::gamma(dim),
            None if text == "stable" => SubordinatorSpec::stable(1.0, dim),
            Some(("stable", a)) => {
                let alpha: f64 = a.parse().map_err(|_| bad("spec", text, "alpha is not a number"))?;
                SubordinatorSpec::stable(alpha, dim)
            }
            _ => return Err(bad("spec", text, "expected gamma or stable:<alpha>")),
        };
        spec.map_err(|e| bad("spec", text, e.to_string()))
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
                _ => Err(bad(key, v, "expected a positive number")),
            },
        }
    }

    pub fn amplitude(&self) -> Result<f64, ConfigError> {
        match self.get("amplitude") {
            None => Ok(0.1),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if (0.0..1.0).contains(&x) => Ok(x),
                _ => Err(bad("amplitude", v, "expected a number in [0, 1)")),
            },
        }
    }

    pub fn beta(&self) -> Result<f64, ConfigError> {
        match self.get("beta") {
            None => Ok(0.0),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if (0.0..1.0).contains(&x) => Ok(x),
                _ => Err(bad("beta", v, "expected a number in [0, 1)")),
            },
        }
    }

    pub fn seed(&self, default: u64) -> Result<u64, ConfigError> {
        match self.get("seed") {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad("seed", v, "expected an unsigned integer")),
        }
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.parse::<usize>() {
                Ok(x) if x >= 1 || key == "events" => Ok(x),
                _ => Err(bad(key, v, "expected a positive integer")),
            },
        }
    }

    pub fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|t| match t.trim().parse::<f64>() {
                    Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
                    _ => Err(bad(key, v, "expected comma-separated positive numbers")),
                })
                .collect(),
        }
    }

    pub fn start(&self) -> Result<[f64; 2], ConfigError> {
        match self.get("start") {
            None => Ok([0.0; 2]),
            Some(v) => {
                let parts: Result<Vec<f64>, _> = v.split(',').map(|t| t.trim().parse::<f64>()).collect();
                match parts.as_deref() {
                    Ok([x]) => Ok([*x, 0.0]),
                    Ok([x, y]) => Ok([*x, *y]),
                    _ => Err(bad("start", v, "expected one or two numbers")),
                }
            }
        }
    }

    pub fn grid(&self, default_n: usize, length: f64) -> Result<Grid, ConfigError> {
        let text = self.get("grid").map(str::to_owned).unwrap_or_else(|| default_n.to_string());
        let n: usize = text.parse().map_err(|_| bad("grid", &text, "expected an integer"))?;
        Grid::new(self.dim()?, n, length).map_err(|e| bad("grid", &text, e.to_string()))
    }

    pub fn orlicz(&self) -> Result<NFunction, ConfigError> {
        let text = self.get("orlicz").unwrap_or("exp:2");
        let parsed = match text.split_once(':') {
            Some(("power", p)) => p.parse::<f64>().ok().map(NFunction::power),
            Some(("exp", b)) => b.parse::<f64>().ok().map(NFunction::exp_power),
            _ => None,
        };
        match parsed {
            Some(Ok(a)) => Ok(a),
            Some(Err(e)) => Err(bad("orlicz", text, e.to_string())),
            None => Err(bad("orlicz", text, "expected power:<p> or exp:<beta>")),
        }
    }

    /// `a(x, z) = p(x)·q(|z|)` from `coeff_x`/`coeff_z`, or the default
    /// `1 + amplitude·sin(2πx/L)`.
    pub fn coefficient(&self, length: f64) -> Result<CoefficientField, ConfigError> {
        let (px, qz) = (self.get("coeff_x"), self.get("coeff_z"));
        if px.is_none() && qz.is_none() {
            return CoefficientField::x_oscillation(self.amplitude()?, length)
                .map_err(|e| bad("amplitude", self.get("amplitude").unwrap_or(""), e.to_string()));
        }
        let p = Expression::new("coeff_x", px.unwrap_or("1"), &["x", "y"])?;
        let q = Expression::new("coeff_z", qz.unwrap_or("1"), &["r"])?;
        // Sample both factors to find the bounds c₀ ≤ a ≤ 1/c₀; sampling misses extremes, hence the 1% margin.
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut p_range = (f64::INFINITY, 0.0f64);
        for i in 0..=256 {
            for j in 0..=if self.dim()? == 2 { 256 } else { 0 } {
                let x = -0.5 * length + length * i as f64 / 256.0;
                let y = -0.5 * length + length * j as f64 / 256.0;
                let v = p.eval(&[x, y]);
                p_range = (p_range.0.min(v), p_range.1.max(v));
            }
        }
        for k in 0..=400 {
            let r = 10f64.powf(-8.0 + 10.0 * k as f64 / 400.0);
            let v = q.eval(&[r]);
            for pv in [p_range.0, p_range.1] {
                lo = lo.min(pv * v);
                hi = hi.max(pv * v);
            }
        }
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(bad("coeff_x", px.unwrap_or("1"), "coefficient must be positive and finite"));
        }
        let c0 = 0.99 * lo.min(1.0 / hi);
        let label = format!("({})*({})", p.text, q.text);
        let (p, q) = (Arc::new(p), Arc::new(q));
        let term = SeparableTerm {
            p: Arc::new(move |x: &[f64; 2]| p.eval(x)),
            q: ZCoefficient::from_fn(move |z: &[f64; 2]| q.eval(&[z[0].hypot(z[1])])),
        };
        CoefficientField::separable(vec![term], c0, 1.0, p_range.1 - p_range.0, 1.0, label)
            .map_err(|e| bad("coeff_x", px.unwrap_or("1"), e.to_string()))
    }
}

/// A compiled arithmetic expression over named variables.
struct Expression {
    text: String,
    vars: Vec<&'static str>,
    tree: Node<DefaultNumericTypes>,
}

impl Expression {
    fn new(key: &str, text: &str, vars: &[&'static str]) -> Result<Self, ConfigError> {
        let tree = build_operator_tree::<DefaultNumericTypes>(text).map_err(|e| bad(key, text, e.to_string()))?;
        for v in tree.iter_variable_identifiers() {
            if !vars.contains(&v) {
                return Err(bad(key, text, format!("unknown variable {v}; allowed: {}", vars.join(", "))));
            }
        }
        let e = Self {
            text: text.into(),
            vars: vars.to_vec(),
            tree,
        };
        e.try_eval(&[0.5; 2]).map_err(|reason| bad(key, text, reason))?;
        Ok(e)
    }

    fn try_eval(&self, values: &[f64]) -> Result<f64, String> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        for (name, v) in self.vars.iter().zip(values) {
            ctx.set_value((*name).into(), Value::from_float(*v)).map_err(|e| e.to_string())?;
        }
        self.tree.eval_number_with_context(&ctx).map_err(|e| e.to_string())
    }

    fn eval(&self, values: &[f64]) -> f64 {
        self.try_eval(values).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_assignments_win_and_comments_are_ignored() {
        let mut c = ConfigMap::parse("lambda = 4 # first\n\nlambda=8\nseed = 3\n").unwrap();
        assert_eq!(c.positive("lambda", 1.0).unwrap(), 8.0);
        c.set_assignment("lambda=16").unwrap();
        assert_eq!(c.positive("lambda", 1.0).unwrap(), 16.0);
        assert_eq!(c.seed(0).unwrap(), 3);
    }

    #[test]
    fn empty_unknown_and_malformed_are_rejected() {
        assert_eq!(ConfigMap::parse("# nothing\n   \n"), Err(ConfigError::Empty));
        assert_eq!(ConfigMap::parse("colour = red"), Err(ConfigError::UnknownKey("colour".into())));
        assert!(matches!(ConfigMap::parse("lambda"), Err(ConfigError::Syntax { line: 1, .. })));
        let c = ConfigMap::parse("lambda = -1").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn spec_and_orlicz_parsing() {
        let c = ConfigMap::parse("spec = stable:0.5\ndim = 2\norlicz = power:3").unwrap();
        assert_eq!(c.spec().unwrap().dim(), 2);
        assert_eq!(c.orlicz().unwrap().value(2.0), 8.0);
        assert!(ConfigMap::parse("spec = cauchy").unwrap().validate().is_err());
    }

    #[test]
    fn expression_coefficient() {
        let c = ConfigMap::parse("coeff_x = 1 + 0.2 * math::sin(x)\ncoeff_z = 1").unwrap();
        let a = c.coefficient(16.0).unwrap();
        assert!((a.eval(&[1.0, 0.0], &[0.3, 0.0]) - (1.0 + 0.2 * 1f64.sin())).abs() < 1e-12);
        assert!(a.c0() <= 0.8 && a.c0() >= 0.79, "{}", a.c0());
        assert!(ConfigMap::parse("coeff_x = 1 + w").unwrap().validate().is_err());
    }
}
