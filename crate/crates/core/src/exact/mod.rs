//! Closed-form and implicit solutions of the undamped equation obtained by
//! mapping polynomial and similarity solutions of the linear wave equation
//! back through the contact transformation.

mod newton;

pub use newton::{newton_1d, newton_2d, NewtonOptions};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Deg4Case {
    /// `a2 = 0`, parameter `a1`.
    A2Zero,
    /// `a1 = 0`, parameter `a2`.
    A1Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityBranch {
    Nonsingular,
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Deg2 { a1: f64, a2: f64, a3: f64 },
    Deg3 { a1: f64, plus: bool },
    Deg4 { case: Deg4Case, a: f64 },
    Similarity { branch: SimilarityBranch },
}

/// Point-symmetry generators of the undamped equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Generator {
    X1,
    X2,
    X3,
    X4,
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Generator> {
        Ok(match s {
            "X1" | "x1" => Generator::X1,
            "X2" | "x2" => Generator::X2,
            "X3" | "x3" => Generator::X3,
            "X4" | "x4" => Generator::X4,
            _ => return Err(Error::Config(format!("unknown generator `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactSolution {
    pub family: Family,
    pub beta: f64,
    /// Applied in order; the last entry is the outermost transformation.
    pub transforms: Vec<(Generator, f64)>,
}

pub fn make_deg2(a1: f64, a2: f64, a3: f64, beta: f64) -> Result<ExactSolution> {
    if a3 == 0.0 {
        return Err(Error::Config("deg2 requires a3 != 0".into()));
    }
    Ok(ExactSolution { family: Family::Deg2 { a1, a2, a3 }, beta, transforms: Vec::new() })
}

pub fn make_deg3(a1: f64, plus: bool, beta: f64) -> Result<ExactSolution> {
    if a1 == 0.0 {
        return Err(Error::Config("deg3 requires a1 != 0".into()));
    }
    Ok(ExactSolution { family: Family::Deg3 { a1, plus }, beta, transforms: Vec::new() })
}

pub fn make_deg4(case: Deg4Case, a: f64, beta: f64) -> Result<ExactSolution> {
    if a == 0.0 {
        return Err(Error::Config("deg4 requires a nonzero coefficient".into()));
    }
    Ok(ExactSolution { family: Family::Deg4 { case, a }, beta, transforms: Vec::new() })
}

pub fn make_similarity(branch: SimilarityBranch, beta: f64) -> Result<ExactSolution> {
    if beta <= 0.0 {
        return Err(Error::Config("similarity family requires beta > 0".into()));
    }
    Ok(ExactSolution { family: Family::Similarity { branch }, beta, transforms: Vec::new() })
}

/// Finite flow of a point symmetry applied to a solution.
pub fn group_transform(sol: &ExactSolution, g: Generator, eps: f64) -> ExactSolution {
    let mut out = sol.clone();
    out.transforms.push((g, eps));
    out
}

impl ExactSolution {
    /// Builds a family from command-line style parameters.
    pub fn from_params(family: &str, params: &BTreeMap<String, String>) -> Result<ExactSolution> {
        let num = |k: &str, default: Option<f64>| -> Result<f64> {
            match params.get(k) {
                Some(v) => v.parse::<f64>().map_err(|_| Error::Config(format!("parameter {k}: `{v}` is not a number"))),
                None => default.ok_or_else(|| Error::Config(format!("missing parameter {k}"))),
            }
        };
        let known: &[&str] = match family {
            "deg2" => &["a1", "a2", "a3", "beta"],
            "deg3" => &["a1", "beta", "branch"],
            "deg4a" | "deg4b" => &["a", "a1", "a2", "beta"],
            "similarity" => &["beta", "branch"],
            _ => return Err(Error::Config(format!("unknown family `{family}`"))),
        };
        if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown parameter `{k}` for {family}")));
        }
        let beta = num("beta", Some(1.0))?;
        let branch = params.get("branch").map(String::as_str);
        match family {
            "deg2" => make_deg2(num("a1", Some(0.0))?, num("a2", Some(0.0))?, num("a3", Some(1.0))?, beta),
            "deg3" => {
                let plus = match branch.unwrap_or("minus") {
                    "plus" | "+" | "1" => true,
                    "minus" | "-" | "-1" => false,
                    b => return Err(Error::Config(format!("deg3 branch must be plus or minus, got `{b}`"))),
                };
                make_deg3(num("a1", None)?, plus, beta)
            }
            "deg4a" => make_deg4(Deg4Case::A2Zero, num("a", None).or_else(|_| num("a1", None))?, beta),
            "deg4b" => make_deg4(Deg4Case::A1Zero, num("a", None).or_else(|_| num("a2", None))?, beta),
            _ => {
                let branch = match branch.unwrap_or("nonsingular") {
                    "nonsingular" => SimilarityBranch::Nonsingular,
                    "singular" => SimilarityBranch::Singular,
                    b => return Err(Error::Config(format!("similarity branch must be nonsingular or singular, got `{b}`"))),
                };
                make_similarity(branch, beta)
            }
        }
    }

    pub fn eval_p(&self, t: f64, x: f64) -> Result<f64> {
        self.eval(self.transforms.len(), t, x, false)
    }

    /// The potential `v` with `v_t = p` (gauge fixed by the contact map).
    pub fn eval_v(&self, t: f64, x: f64) -> Result<f64> {
        self.eval(self.transforms.len(), t, x, true)
    }

    fn eval(&self, depth: usize, t: f64, x: f64, want_v: bool) -> Result<f64> {
        if depth == 0 {
            let (p, v) = self.base(t, x, want_v)?;
            return Ok(if want_v { v } else { p });
        }
        let (g, eps) = self.transforms[depth - 1];
        let b = self.beta;
        let c = 1.0 / (2.0 * b);
        Ok(match g {
            Generator::X1 => self.eval(depth - 1, t - eps, x, want_v)?,
            Generator::X2 => self.eval(depth - 1, t, x - eps, want_v)?,
            Generator::X3 => {
                let mu = (-2.0 * b * eps).exp();
                let nu = (-3.0 * b * eps).exp();
                let inner = self.eval(depth - 1, mu * t, nu * x, want_v)?;
                if want_v {
                    inner + (1.0 - mu) * t * c
                } else {
                    c + (inner - c) * mu
                }
            }
            Generator::X4 => {
                let s = (-eps).exp();
                let inner = self.eval(depth - 1, s * t, s * x, want_v)?;
                if want_v {
                    inner / s
                } else {
                    inner
                }
            }
        })
    }

    /// `(p, v)` of the untransformed family; `v` only when requested.
    fn base(&self, t: f64, x: f64, want_v: bool) -> Result<(f64, f64)> {
        let b = self.beta;
        match self.family {
            Family::Deg2 { a1, a2, a3 } => Ok((-(x + a1) / a3, -(t + a2) * (x + a1) / a3)),
            Family::Deg3 { a1, plus } => {
                let disc = 1.0 - 4.0 * b * b * t / (3.0 * a1);
                if disc < 0.0 {
                    return Err(Error::DomainViolation(format!(
                        "deg3 requires 1 - 4 beta^2 t/(3 a1) >= 0, got {disc:e} at t = {t}"
                    )));
                }
                let s = if plus { disc.sqrt() } else { -disc.sqrt() };
                let p = (1.0 + s) / (2.0 * b);
                let psi2 = b * x / (3.0 * a1);
                let star = PolyStar::deg3(a1, b);
                Ok((p, if want_v { t * p + x * psi2 + star.value(p, psi2) } else { 0.0 }))
            }
            Family::Deg4 { case, a } => {
                let p = deg4_root(case, a, b, t, x)?;
                if !want_v {
                    return Ok((p, 0.0));
                }
                let (psi2, star) = match case {
                    Deg4Case::A2Zero => (-b * t / (3.0 * a * p * (b * p - 1.0)), PolyStar::deg4(a, 0.0, b)),
                    Deg4Case::A1Zero => (b * b * x / (3.0 * a * (2.0 * b * p + 1.0)), PolyStar::deg4(0.0, a, b)),
                };
                Ok((p, t * p + x * psi2 + star.value(p, psi2)))
            }
            Family::Similarity { branch } => {
                if t <= 0.0 {
                    return Err(Error::DomainViolation(format!("similarity solution requires t > 0, got {t}")));
                }
                let z = b.cbrt() * x / t.powf(4.0 / 3.0);
                let psi0 = psi0(z, branch)?;
                let u = (b / t).powf(2.0 / 3.0) * psi0;
                let p = (1.0 + u) / (2.0 * b);
                if !want_v {
                    return Ok((p, 0.0));
                }
                let psi2 = x * u * u / (3.0 * b * t);
                Ok((p, t * p + x * psi2 + SimilarityStar { beta: b }.value(p, psi2)))
            }
        }
    }

    /// Residual of `(1 − 2βp)p_tt − 2βp_t² − p_xx` by centered differences
    /// with step `h` in both directions.
    pub fn fd_residual(&self, t: f64, x: f64, h: f64, stencil: Stencil) -> Result<f64> {
        let p = |dt: f64, dx: f64| self.eval_p(t + dt, x + dx);
        let p0 = p(0.0, 0.0)?;
        let (pt, ptt, pxx) = match stencil {
            Stencil::Three => {
                let (tp, tm, xp, xm) = (p(h, 0.0)?, p(-h, 0.0)?, p(0.0, h)?, p(0.0, -h)?);
                ((tp - tm) / (2.0 * h), (tp - 2.0 * p0 + tm) / (h * h), (xp - 2.0 * p0 + xm) / (h * h))
            }
            Stencil::Five => {
                let (tp, tm, tp2, tm2) = (p(h, 0.0)?, p(-h, 0.0)?, p(2.0 * h, 0.0)?, p(-2.0 * h, 0.0)?);
                let (xp, xm, xp2, xm2) = (p(0.0, h)?, p(0.0, -h)?, p(0.0, 2.0 * h)?, p(0.0, -2.0 * h)?);
                let d1 = (-tp2 + 8.0 * tp - 8.0 * tm + tm2) / (12.0 * h);
                let d2 = |f2: f64, f1: f64, m1: f64, m2: f64| (-f2 + 16.0 * f1 - 30.0 * p0 + 16.0 * m1 - m2) / (12.0 * h * h);
                (d1, d2(tp2, tp, tm, tm2), d2(xp2, xp, xm, xm2))
            }
        };
        let b = self.beta;
        Ok((1.0 - 2.0 * b * p0) * ptt - 2.0 * b * pt * pt - pxx)
    }

    /// `p_t` and `p_tt` by five-point differences in time.
    pub fn time_derivatives(&self, t: f64, x: f64, h: f64) -> Result<(f64, f64)> {
        let p = |dt: f64| self.eval_p(t + dt, x);
        let (p0, tp, tm, tp2, tm2) = (p(0.0)?, p(h)?, p(-h)?, p(2.0 * h)?, p(-2.0 * h)?);
        Ok((
            (-tp2 + 8.0 * tp - 8.0 * tm + tm2) / (12.0 * h),
            (-tp2 + 16.0 * tp - 30.0 * p0 + 16.0 * tm - tm2) / (12.0 * h * h),
        ))
    }

    /// Samples `p` (and `v`) on a tensor grid, rows ordered by t then x.
    pub fn sample(&self, t: &[f64], x: &[f64]) -> Result<Vec<[f64; 4]>> {
        let mut out = Vec::with_capacity(t.len() * x.len());
        for &tt in t {
            for &xx in x {
                out.push([tt, xx, self.eval_p(tt, xx)?, self.eval_v(tt, xx)?]);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    Three,
    Five,
}

/// Root of the implicit equation for `p` in the degree-4 families, followed
/// by continuation along the segment from the origin.
pub fn deg4_root(case: Deg4Case, a: f64, b: f64, t: f64, x: f64) -> Result<f64> {
    let seed = match case {
        Deg4Case::A2Zero => 3.0 / (2.0 * b),
        Deg4Case::A1Zero => 0.0,
    };
    let n = ((t.hypot(x) / 0.02).ceil() as usize).clamp(1, 4000);
    let mut psi = seed;
    for k in 1..=n {
        let s = k as f64 / n as f64;
        let (tk, xk) = (s * t, s * x);
        psi = newton_1d(|u| deg4_equation(case, a, b, tk, xk, u), psi, None, NewtonOptions::default())
            .map_err(|e| Error::DomainViolation(format!("deg4 branch lost at (t, x) = ({tk}, {xk}): {e}")))?;
    }
    Ok(psi)
}

/// Value and derivative of the degree-4 implicit equation in `Ψ1`.
pub fn deg4_equation(case: Deg4Case, a: f64, b: f64, t: f64, x: f64, u: f64) -> (f64, f64) {
    match case {
        Deg4Case::A2Zero => {
            let g = u * u * (b * u - 1.0).powi(2);
            let dg = 2.0 * u * (b * u - 1.0) * (2.0 * b * u - 1.0);
            let k = b * b * t * t / (3.0 * a);
            (a * (2.0 * b * u - 3.0) * u * u - k / g + 2.0 * b * x, a * (6.0 * b * u * u - 6.0 * u) + k * dg / (g * g))
        }
        Deg4Case::A1Zero => {
            let w = 2.0 * b * u + 1.0;
            let k = b.powi(5) * x * x / (3.0 * a);
            (
                a * (4.0 * b * b * u * u - 3.0) * u - k / (w * w) + b * b * t,
                a * (12.0 * b * b * u * u - 3.0) + 4.0 * b * k / (w * w * w),
            )
        }
    }
}

/// Solves `(1 + z²Ψ)^7 Ψ^9 = 1` on the chosen branch, in logarithmic form.
pub fn psi0(z: f64, branch: SimilarityBranch) -> Result<f64> {
    let z2 = z * z;
    match branch {
        SimilarityBranch::Nonsingular => {
            if z2 == 0.0 {
                return Ok(1.0);
            }
            // g(ψ) = 7 ln(1 + z²ψ) + 9 ln ψ, increasing on (0, 1]
            let g = |u: f64| (7.0 * (1.0 + z2 * u).ln() + 9.0 * u.ln(), 7.0 * z2 / (1.0 + z2 * u) + 9.0 / u);
            let seed = if z2 > 1.0 { z2.powf(-7.0 / 16.0) } else { 1.0 / (1.0 + 7.0 * z2 / 16.0) };
            newton_1d(g, seed.min(1.0), Some((f64::MIN_POSITIVE, 1.0)), NewtonOptions::default())
        }
        SimilarityBranch::Singular => {
            if z2 == 0.0 {
                return Err(Error::DomainViolation("singular similarity branch is undefined at z = 0".into()));
            }
            // a = −ψ > 1/z²: h(a) = 7 ln(z²a − 1) + 9 ln a, increasing
            let h = |a: f64| (7.0 * (z2 * a - 1.0).ln() + 9.0 * a.ln(), 7.0 * z2 / (z2 * a - 1.0) + 9.0 / a);
            let lo = 1.0 / z2;
            // h(lo·(1+δ)) < 0 for small δ; upper end where both logs are positive
            let hi = lo.max(1.0) * 2.0 + 1.0;
            let seed = if z2 < 1.0 { lo * (1.0 + z2.powf(9.0 / 7.0)) } else { z2.powf(-7.0 / 16.0) + lo };
            let a = newton_1d(h, seed.clamp(lo * (1.0 + 1e-15), hi), Some((lo * (1.0 + 1e-15), hi)), NewtonOptions::default())?;
            Ok(-a)
        }
    }
}

/// A solution `v* = ψ*(t*, x*)` of the linear wave equation with its first
/// and second derivatives.
pub trait PsiStar {
    fn value(&self, ts: f64, xs: f64) -> f64;
    fn grad(&self, ts: f64, xs: f64) -> [f64; 2];
    fn hess(&self, ts: f64, xs: f64) -> [[f64; 2]; 2];
}

/// Polynomial `ψ*` as a list of `(coefficient, power of t*, power of x*)`.
#[derive(Clone, Debug)]
pub struct PolyStar {
    pub terms: Vec<(f64, i32, i32)>,
}

impl PolyStar {
    /// `a3 t* x* + a2 t* + a1 x*`.
    pub fn deg2(a1: f64, a2: f64, a3: f64) -> PolyStar {
        PolyStar { terms: vec![(a3, 1, 1), (a2, 1, 0), (a1, 0, 1)] }
    }

    /// `a1 (t*³ − (3/2)(t*² + x*²)/β)`.
    pub fn deg3(a1: f64, b: f64) -> PolyStar {
        PolyStar { terms: vec![(a1, 3, 0), (-1.5 * a1 / b, 2, 0), (-1.5 * a1 / b, 0, 2)] }
    }

    /// `a1 (2βt*³ − 3t*² − x*²) x*/(2β) + a2 (2β²t*⁴ − 6βt*x*² − 3(t*² + x*²))/(2β²)`.
    pub fn deg4(a1: f64, a2: f64, b: f64) -> PolyStar {
        let c1 = a1 / (2.0 * b);
        let c2 = a2 / (2.0 * b * b);
        PolyStar {
            terms: vec![
                (2.0 * b * c1, 3, 1),
                (-3.0 * c1, 2, 1),
                (-c1, 0, 3),
                (2.0 * b * b * c2, 4, 0),
                (-6.0 * b * c2, 1, 2),
                (-3.0 * c2, 2, 0),
                (-3.0 * c2, 0, 2),
            ],
        }
    }

    fn eval_d(&self, ts: f64, xs: f64, dt: i32, dx: i32) -> f64 {
        let fall = |n: i32, k: i32| -> f64 { (0..k).map(|j| (n - j) as f64).product() };
        self.terms
            .iter()
            .filter(|&&(_, a, b)| a >= dt && b >= dx)
            .map(|&(c, a, b)| c * fall(a, dt) * fall(b, dx) * ts.powi(a - dt) * xs.powi(b - dx))
            .sum()
    }
}

impl PsiStar for PolyStar {
    fn value(&self, ts: f64, xs: f64) -> f64 {
        self.eval_d(ts, xs, 0, 0)
    }
    fn grad(&self, ts: f64, xs: f64) -> [f64; 2] {
        [self.eval_d(ts, xs, 1, 0), self.eval_d(ts, xs, 0, 1)]
    }
    fn hess(&self, ts: f64, xs: f64) -> [[f64; 2]; 2] {
        let m = self.eval_d(ts, xs, 1, 1);
        [[self.eval_d(ts, xs, 2, 0), m], [m, self.eval_d(ts, xs, 0, 2)]]
    }
}

/// `ψ* = S^{−1/6}`, `S = 9β²x*² + (2βt* − 1)³`: the similarity solution with
/// `s = 0`, `q = −β`.
#[derive(Clone, Copy, Debug)]
pub struct SimilarityStar {
    pub beta: f64,
}

impl SimilarityStar {
    fn s(&self, ts: f64, xs: f64) -> (f64, f64, f64) {
        let b = self.beta;
        let u = 2.0 * b * ts - 1.0;
        (9.0 * b * b * xs * xs + u * u * u, u, b)
    }
}

impl PsiStar for SimilarityStar {
    fn value(&self, ts: f64, xs: f64) -> f64 {
        self.s(ts, xs).0.powf(-1.0 / 6.0)
    }
    fn grad(&self, ts: f64, xs: f64) -> [f64; 2] {
        let (s, u, b) = self.s(ts, xs);
        let k = -s.powf(-7.0 / 6.0) / 6.0;
        [k * 6.0 * b * u * u, k * 18.0 * b * b * xs]
    }
    fn hess(&self, ts: f64, xs: f64) -> [[f64; 2]; 2] {
        let (s, u, b) = self.s(ts, xs);
        let (st, sx) = (6.0 * b * u * u, 18.0 * b * b * xs);
        let (stt, sxx) = (24.0 * b * b * u, 18.0 * b * b);
        let k1 = -s.powf(-7.0 / 6.0) / 6.0;
        let k2 = 7.0 / 36.0 * s.powf(-13.0 / 6.0);
        [[k2 * st * st + k1 * stt, k2 * st * sx], [k2 * st * sx, k2 * sx * sx + k1 * sxx]]
    }
}

/// Steps 1–3 of the inversion: solves `ψ*_{t*}(Ψ1, Ψ2) = −t`,
/// `ψ*_{x*}(Ψ1, Ψ2) = −x` and assembles `v = tΨ1 + xΨ2 + ψ*(Ψ1, Ψ2)`.
pub fn invert_contact(star: &dyn PsiStar, t: f64, x: f64, seed: [f64; 2]) -> Result<(f64, f64, f64)> {
    let f = |u: [f64; 2]| {
        let g = star.grad(u[0], u[1]);
        [g[0] + t, g[1] + x]
    };
    let j = |u: [f64; 2]| star.hess(u[0], u[1]);
    let u = newton_2d(f, j, seed, NewtonOptions::default())?;
    Ok((u[0], u[1], t * u[0] + x * u[1] + star.value(u[0], u[1])))
}

/// Parses `a:b:n` into `n` evenly spaced points including both ends.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("range `{s}` must be start:end:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Deg2 { .. } => f.write_str("deg2"),
            Family::Deg3 { .. } => f.write_str("deg3"),
            Family::Deg4 { case: Deg4Case::A2Zero, .. } => f.write_str("deg4a"),
            Family::Deg4 { case: Deg4Case::A1Zero, .. } => f.write_str("deg4b"),
            Family::Similarity { .. } => f.write_str("similarity"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_residual(sol: &ExactSolution, pts: &[(f64, f64)], h: f64, st: Stencil) -> f64 {
        pts.iter().map(|&(t, x)| sol.fd_residual(t, x, h, st).unwrap().abs()).fold(0.0, f64::max)
    }

    #[test]
    fn deg2_examples() {
        let s = make_deg2(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(s.eval_p(0.3, 0.25).unwrap(), -0.25);
        assert!(make_deg2(0.0, 0.0, 0.0, 1.0).is_err());
        // v_t = p
        let (t, x, h) = (0.4, 0.3, 1e-5);
        let vt = (s.eval_v(t + h, x).unwrap() - s.eval_v(t - h, x).unwrap()) / (2.0 * h);
        assert!((vt - s.eval_p(t, x).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn deg3_examples() {
        let minus = make_deg3(1.0, false, 1.0).unwrap();
        let plus = make_deg3(1.0, true, 1.0).unwrap();
        assert_eq!(minus.eval_p(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(plus.eval_p(0.0, 0.0).unwrap(), 1.0);
        let expect = (1.0 - 0.75f64.sqrt()) / 2.0;
        assert!((minus.eval_p(3.0 / 16.0, 0.0).unwrap() - expect).abs() < 1e-15);
        assert!(matches!(minus.eval_p(0.8, 0.0), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn potentials_satisfy_vt_eq_p() {
        let sols = [
            make_deg3(1.0, false, 1.0).unwrap(),
            make_deg4(Deg4Case::A2Zero, 1.0, 1.0).unwrap(),
            make_deg4(Deg4Case::A1Zero, 1.0, 1.0).unwrap(),
            make_similarity(SimilarityBranch::Nonsingular, 1.0).unwrap(),
        ];
        for s in &sols {
            let (t, x, h) = (0.3, 0.2, 1e-5);
            let vt = (s.eval_v(t + h, x).unwrap() - s.eval_v(t - h, x).unwrap()) / (2.0 * h);
            let p = s.eval_p(t, x).unwrap();
            assert!((vt - p).abs() < 1e-6 * (1.0 + p.abs()), "{}: {vt} vs {p}", s.family);
        }
    }

    #[test]
    fn deg4_residual_and_origin_seed() {
        let s = make_deg4(Deg4Case::A2Zero, 1.0, 1.0).unwrap();
        assert!((s.eval_p(0.0, 0.0).unwrap() - 1.5).abs() < 1e-14);
        for case in [Deg4Case::A2Zero, Deg4Case::A1Zero] {
            let (t, x) = (0.2, -0.1);
            let u = deg4_root(case, 1.0, 1.0, t, x).unwrap();
            assert!(deg4_equation(case, 1.0, 1.0, t, x, u).0.abs() <= 1e-12);
        }
    }

    #[test]
    fn exact_families_solve_the_equation() {
        let pts = [(0.3, 0.1), (0.35, -0.2), (0.25, 0.3)];
        let sols = [
            make_deg3(1.0, false, 1.0).unwrap(),
            make_deg4(Deg4Case::A2Zero, 1.0, 1.0).unwrap(),
            make_deg4(Deg4Case::A1Zero, 1.0, 1.0).unwrap(),
            make_similarity(SimilarityBranch::Nonsingular, 1.0).unwrap(),
        ];
        for s in &sols {
            let r1 = max_residual(s, &pts, 2e-2, Stencil::Three);
            let r2 = max_residual(s, &pts, 1e-2, Stencil::Three);
            let order = (r1 / r2).log2();
            assert!((1.8..2.2).contains(&order), "{}: order {order} ({r1:e} -> {r2:e})", s.family);
        }
    }

    #[test]
    fn psi0_branches() {
        assert_eq!(psi0(0.0, SimilarityBranch::Nonsingular).unwrap(), 1.0);
        let (a, b) = (1e3, 1e6);
        let slope = (psi0(b, SimilarityBranch::Nonsingular).unwrap().ln()
            - psi0(a, SimilarityBranch::Nonsingular).unwrap().ln())
            / (b / a).ln();
        assert!((slope + 0.875).abs() < 0.02 * 0.875, "slope {slope}");
        let z = 1e-4;
        let s = psi0(z, SimilarityBranch::Singular).unwrap();
        assert!((s * z * z + 1.0).abs() < 0.02, "{s}");
        assert!(psi0(0.0, SimilarityBranch::Singular).is_err());
    }

    #[test]
    fn invert_contact_recovers_polynomial_families() {
        let (t, x) = (0.3, 0.2);
        let (p, _, v) = invert_contact(&PolyStar::deg2(0.5, 0.1, 2.0), t, x, [0.0, 0.0]).unwrap();
        let d2 = make_deg2(0.5, 0.1, 2.0, 1.0).unwrap();
        assert!((p - d2.eval_p(t, x).unwrap()).abs() < 1e-12);
        assert!((v - d2.eval_v(t, x).unwrap()).abs() < 1e-12);
        let d3 = make_deg3(1.0, false, 1.0).unwrap();
        let (p, psi2, v) = invert_contact(&PolyStar::deg3(1.0, 1.0), t, x, [0.1, 0.1]).unwrap();
        assert!((p - d3.eval_p(t, x).unwrap()).abs() < 1e-12);
        assert!((psi2 - x / 3.0).abs() < 1e-12);
        assert!((v - d3.eval_v(t, x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn group_transform_identity_and_composition() {
        let s = make_deg4(Deg4Case::A1Zero, 1.0, 1.0).unwrap();
        for g in [Generator::X1, Generator::X2, Generator::X3, Generator::X4] {
            let id = group_transform(&s, g, 0.0);
            assert!((id.eval_p(0.2, 0.1).unwrap() - s.eval_p(0.2, 0.1).unwrap()).abs() < 1e-15);
        }
        let two = group_transform(&group_transform(&s, Generator::X3, 0.1), Generator::X3, 0.2);
        let one = group_transform(&s, Generator::X3, 0.3);
        assert!((two.eval_p(0.2, 0.1).unwrap() - one.eval_p(0.2, 0.1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn x3_on_static_solution_stays_affine() {
        let s = make_deg2(0.0, 0.0, 1.0, 1.0).unwrap();
        let e = 0.2;
        let g = group_transform(&s, Generator::X3, e);
        let expect = |x: f64| (1.0 - (-2.0 * e).exp()) / 2.0 - (-5.0 * e).exp() * x;
        assert!((g.eval_p(0.3, 0.4).unwrap() - expect(0.4)).abs() < 1e-14);
        assert!(g.fd_residual(0.3, 0.4, 1e-3, Stencil::Three).unwrap().abs() < 1e-8);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_range("0:1").is_err());
    }
}
