//! Safeguarded Newton iterations in one and two unknowns.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-12, max_iter: 50 }
    }
}

/// Newton on `f` (returning value and derivative) with bisection fallback.
/// When `bracket` is given, iterates never leave it and a step that would is
/// replaced by bisection. Without a bracket one is grown geometrically around
/// the seed if plain Newton stalls.
pub fn newton_1d(
    f: impl Fn(f64) -> (f64, f64),
    x0: f64,
    bracket: Option<(f64, f64)>,
    opts: NewtonOptions,
) -> Result<f64> {
    if let Some(x) = plain_newton(&f, x0, bracket, opts) {
        return Ok(x);
    }
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => grow_bracket(&f, x0)?,
    };
    let (mut flo, fhi) = (f(lo).0, f(hi).0);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NewtonNonConvergence(format!("no sign change on [{lo}, {hi}]")));
    }
    let mut x = if (lo..=hi).contains(&x0) { x0 } else { 0.5 * (lo + hi) };
    for _ in 0..(opts.max_iter + 200) {
        let (fx, dfx) = f(x);
        if fx == 0.0 || hi - lo <= opts.tol * (1.0 + x.abs()) {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let step = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        let next = if step.is_finite() && step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= opts.tol * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NewtonNonConvergence(format!("bracketed iteration stalled near {x}")))
}

fn plain_newton(f: &impl Fn(f64) -> (f64, f64), x0: f64, bracket: Option<(f64, f64)>, opts: NewtonOptions) -> Option<f64> {
    let mut x = x0;
    for _ in 0..opts.max_iter {
        let (fx, dfx) = f(x);
        if !fx.is_finite() || !dfx.is_finite() || dfx == 0.0 {
            return None;
        }
        let dx = fx / dfx;
        x -= dx;
        if let Some((lo, hi)) = bracket {
            if !(lo..=hi).contains(&x) {
                return None;
            }
        }
        if dx.abs() <= opts.tol * (1.0 + x.abs()) {
            // one polishing step
            let (fx, dfx) = f(x);
            if dfx != 0.0 && fx.is_finite() {
                let y = x - fx / dfx;
                if bracket.is_none_or(|(lo, hi)| (lo..=hi).contains(&y)) {
                    x = y;
                }
            }
            return x.is_finite().then_some(x);
        }
    }
    None
}

fn grow_bracket(f: &impl Fn(f64) -> (f64, f64), x0: f64) -> Result<(f64, f64)> {
    let f0 = f(x0).0;
    let mut d = 1e-3 * (1.0 + x0.abs());
    for _ in 0..60 {
        for c in [x0 - d, x0 + d] {
            let fc = f(c).0;
            if fc.is_finite() && f0.is_finite() && fc.signum() != f0.signum() {
                return Ok(if c < x0 { (c, x0) } else { (x0, c) });
            }
        }
        d *= 2.0;
    }
    Err(Error::NewtonNonConvergence(format!("no bracket found around {x0}")))
}

/// Two-unknown Newton for `F(u) = 0` with Jacobian `J`; step halving keeps
/// the residual norm decreasing.
pub fn newton_2d(
    f: impl Fn([f64; 2]) -> [f64; 2],
    jac: impl Fn([f64; 2]) -> [[f64; 2]; 2],
    u0: [f64; 2],
    opts: NewtonOptions,
) -> Result<[f64; 2]> {
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut u = u0;
    let mut r = f(u);
    for _ in 0..opts.max_iter {
        if norm(r) == 0.0 {
            return Ok(u);
        }
        let j = jac(u);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let scale = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if !det.is_finite() || det.abs() <= 1e-14 * scale * scale {
            return Err(Error::SingularJacobian);
        }
        let dx = [(r[0] * j[1][1] - r[1] * j[0][1]) / det, (j[0][0] * r[1] - j[1][0] * r[0]) / det];
        let mut lam = 1.0;
        let n0 = norm(r);
        loop {
            let cand = [u[0] - lam * dx[0], u[1] - lam * dx[1]];
            let rc = f(cand);
            if rc.iter().all(|v| v.is_finite()) && (norm(rc) <= n0 || lam < 1e-4) {
                u = cand;
                r = rc;
                break;
            }
            lam *= 0.5;
        }
        let step = lam * dx[0].hypot(dx[1]);
        if step <= opts.tol * (1.0 + u[0].hypot(u[1])) {
            return Ok(u);
        }
    }
    Err(Error::NewtonNonConvergence(format!("2D iteration from {u0:?} did not converge")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let r = newton_1d(|x| (x * x - 2.0, 2.0 * x), 1.0, None, NewtonOptions::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bracket_keeps_branch() {
        // roots at ±1; from 0.01 plain Newton overshoots far to the right
        let f = |x: f64| (x * x - 1.0, 2.0 * x);
        let r = newton_1d(f, 0.01, Some((0.0, 5.0)), NewtonOptions::default()).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x.powi(3) - x - 1.0, 3.0 * x * x - 1.0);
        let a = newton_1d(f, 1.5, None, NewtonOptions::default()).unwrap();
        let b = newton_1d(f, 1.5, None, NewtonOptions::default()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn two_dimensional() {
        let f = |u: [f64; 2]| [u[0] * u[0] + u[1] * u[1] - 4.0, u[0] - u[1]];
        let j = |u: [f64; 2]| [[2.0 * u[0], 2.0 * u[1]], [1.0, -1.0]];
        let u = newton_2d(f, j, [1.0, 1.5], NewtonOptions::default()).unwrap();
        assert!((u[0] - 2f64.sqrt()).abs() < 1e-12 && (u[1] - 2f64.sqrt()).abs() < 1e-12);
    }
}
