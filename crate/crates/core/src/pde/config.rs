//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bc {
    Periodic,
    Dirichlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    Zero,
    Constant,
    Linear,
    Gaussian,
    /// Gaussian with `q = −p_x`, travelling right at unit speed in the linear limit.
    GaussianRight,
    /// One period of a sine over the domain.
    Sine,
}

/// Initial `r = p_tt` for the damped system, which is free data there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitR {
    Zero,
    /// The undamped reduced value `(2βq² + p_xx)/(1 − 2βp)`.
    Consistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitProfile {
    pub name: InitName,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    /// Uniform offset added to `q`.
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub alpha: f64,
    pub beta: f64,
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub bc: Bc,
    pub cfl: f64,
    pub t_end: f64,
    pub init: InitProfile,
    pub init_r: Option<InitR>,
    pub output_every: usize,
    /// Hyperbolicity margin: `1 − 2βp ≥ delta` everywhere.
    pub delta: f64,
}

const KEYS: [&str; 16] = [
    "alpha",
    "beta",
    "x0",
    "x1",
    "nx",
    "bc",
    "cfl",
    "t_end",
    "init.name",
    "init.amplitude",
    "init.width",
    "init.center",
    "init.rate",
    "init.r",
    "output.every",
    "delta",
];

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl FromStr for Bc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Bc> {
        match s {
            "periodic" => Ok(Bc::Periodic),
            "dirichlet" => Ok(Bc::Dirichlet),
            _ => Err(cfg_err(format!("bc must be periodic or dirichlet, got `{s}`"))),
        }
    }
}

impl FromStr for InitName {
    type Err = Error;
    fn from_str(s: &str) -> Result<InitName> {
        Ok(match s {
            "zero" => InitName::Zero,
            "constant" => InitName::Constant,
            "linear" => InitName::Linear,
            "gaussian" => InitName::Gaussian,
            "gaussian_right" => InitName::GaussianRight,
            "sine" => InitName::Sine,
            _ => return Err(cfg_err(format!("unknown init.name `{s}`"))),
        })
    }
}

impl FromStr for InitR {
    type Err = Error;
    fn from_str(s: &str) -> Result<InitR> {
        match s {
            "zero" => Ok(InitR::Zero),
            "consistent" => Ok(InitR::Consistent),
            _ => Err(cfg_err(format!("init.r must be zero or consistent, got `{s}`"))),
        }
    }
}

macro_rules! name_display {
    ($t:ty { $($v:path => $s:literal),* $(,)? }) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($v => $s),* })
            }
        }
    };
}

name_display!(Bc { Bc::Periodic => "periodic", Bc::Dirichlet => "dirichlet" });
name_display!(InitR { InitR::Zero => "zero", InitR::Consistent => "consistent" });
name_display!(InitName {
    InitName::Zero => "zero",
    InitName::Constant => "constant",
    InitName::Linear => "linear",
    InitName::Gaussian => "gaussian",
    InitName::GaussianRight => "gaussian_right",
    InitName::Sine => "sine",
});

impl SolverConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<SolverConfig> {
        let mut kv = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| cfg_err(format!("line {}: expected key=value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(cfg_err(format!("line {}: unknown key `{k}`", n + 1)));
            }
            if kv.insert(k.to_string(), v.to_string()).is_some() {
                return Err(cfg_err(format!("line {}: duplicate key `{k}`", n + 1)));
            }
        }
        SolverConfig::from_map(&kv)
    }

    pub fn from_map(kv: &BTreeMap<String, String>) -> Result<SolverConfig> {
        let get = |k: &str| kv.get(k).map(String::as_str);
        let num = |k: &str, default: Option<f64>| -> Result<f64> {
            match get(k) {
                Some(s) => s.parse::<f64>().map_err(|_| cfg_err(format!("{k}: `{s}` is not a number"))),
                None => default.ok_or_else(|| cfg_err(format!("missing key {k}"))),
            }
        };
        let int = |k: &str, default: Option<usize>| -> Result<usize> {
            match get(k) {
                Some(s) => s.parse::<usize>().map_err(|_| cfg_err(format!("{k}: `{s}` is not a nonnegative integer"))),
                None => default.ok_or_else(|| cfg_err(format!("missing key {k}"))),
            }
        };
        let x0 = num("x0", None)?;
        let x1 = num("x1", None)?;
        let alpha = num("alpha", Some(0.0))?;
        let cfg = SolverConfig {
            alpha,
            beta: num("beta", None)?,
            x0,
            x1,
            nx: int("nx", None)?,
            bc: get("bc").unwrap_or("periodic").parse()?,
            cfl: num("cfl", Some(0.5))?,
            t_end: num("t_end", None)?,
            init: InitProfile {
                name: get("init.name").ok_or_else(|| cfg_err("missing key init.name"))?.parse()?,
                amplitude: num("init.amplitude", Some(1.0))?,
                width: num("init.width", Some(1.0))?,
                center: num("init.center", Some(0.5 * (x0 + x1)))?,
                rate: num("init.rate", Some(0.0))?,
            },
            init_r: get("init.r").map(str::parse).transpose()?,
            output_every: int("output.every", Some(10))?,
            delta: num("delta", Some(1e-6))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.beta, self.x0, self.x1, self.cfl, self.t_end, self.init.amplitude, self.init.width];
        if finite.iter().any(|v| !v.is_finite()) || !self.init.center.is_finite() || !self.init.rate.is_finite() {
            return Err(cfg_err("all numeric values must be finite"));
        }
        if self.alpha < 0.0 {
            return Err(cfg_err("alpha must be >= 0"));
        }
        if self.beta <= 0.0 {
            return Err(cfg_err("beta must be > 0"));
        }
        if self.x1 <= self.x0 {
            return Err(cfg_err("x1 must exceed x0"));
        }
        if self.nx < 16 {
            return Err(cfg_err("nx must be at least 16"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(cfg_err("cfl must lie in (0, 1]"));
        }
        if self.t_end <= 0.0 {
            return Err(cfg_err("t_end must be > 0"));
        }
        if self.init.width <= 0.0 {
            return Err(cfg_err("init.width must be > 0"));
        }
        if self.output_every == 0 {
            return Err(cfg_err("output.every must be >= 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(cfg_err("delta must lie in (0, 1)"));
        }
        match (self.alpha > 0.0, self.init_r) {
            (true, None) => Err(cfg_err("damped runs need init.r (zero or consistent): r = p_tt at t = 0 is free data")),
            (false, Some(_)) => Err(cfg_err("init.r applies only to damped runs (alpha > 0)")),
            _ => Ok(()),
        }
    }

    pub fn damped(&self) -> bool {
        self.alpha > 0.0
    }

    /// The fully resolved configuration in the input format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = vec![
            ("alpha".into(), self.alpha.to_string()),
            ("beta".into(), self.beta.to_string()),
            ("x0".into(), self.x0.to_string()),
            ("x1".into(), self.x1.to_string()),
            ("nx".into(), self.nx.to_string()),
            ("bc".into(), self.bc.to_string()),
            ("cfl".into(), self.cfl.to_string()),
            ("t_end".into(), self.t_end.to_string()),
            ("init.name".into(), self.init.name.to_string()),
            ("init.amplitude".into(), self.init.amplitude.to_string()),
            ("init.width".into(), self.init.width.to_string()),
            ("init.center".into(), self.init.center.to_string()),
            ("init.rate".into(), self.init.rate.to_string()),
        ];
        if let Some(r) = self.init_r {
            v.push(("init.r".into(), r.to_string()));
        }
        v.push(("output.every".into(), self.output_every.to_string()));
        v.push(("delta".into(), self.delta.to_string()));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "beta = 0.1\nx0 = -8\nx1 = 8\nnx = 64\nt_end = 1\ninit.name = gaussian\n";

    #[test]
    fn parses_with_defaults() {
        let c = SolverConfig::parse(&format!("# pulse\n{BASE}init.width = 0.5 # narrow\n")).unwrap();
        assert_eq!(c.cfl, 0.5);
        assert_eq!(c.bc, Bc::Periodic);
        assert_eq!(c.init.center, 0.0);
        assert_eq!(c.init.width, 0.5);
        assert_eq!(SolverConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        for extra in ["cfl = 1.5", "nx2 = 3", "bc = open", "alpha = 0.1", "init.r = zero", "beta = 0.2"] {
            let text = format!("{BASE}{extra}\n");
            assert!(SolverConfig::parse(&text).is_err(), "{extra}");
        }
        for (from, to) in [("nx = 64", "nx = 8"), ("beta = 0.1", "beta = -1"), ("x1 = 8", "x1 = -9"), ("t_end = 1", "t_end = x")] {
            assert!(SolverConfig::parse(&BASE.replace(from, to)).is_err(), "{to}");
        }
        assert!(SolverConfig::parse(&format!("{BASE}alpha = 0.1\ninit.r = zero\n")).is_ok());
        assert!(SolverConfig::parse("beta 1").is_err());
    }
}
