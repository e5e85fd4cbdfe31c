//! Method-of-lines solver: second-order central differences in space and the
//! classical four-stage Runge–Kutta method in time.
//!
//! Undamped: `p_t = q`, `q_t = (2βq² + Δp)/(1 − 2βp)`.
//! Damped:   `p_t = q`, `q_t = r`, `r_t = ((1 − 2βp)r − 2βq² − Δp)/α`.
//! In both cases `v_t = p` with `v(0,·) = 0`.

mod config;

pub use config::{Bc, InitName, InitProfile, InitR, SolverConfig};

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactSolution;
use crate::observables::MonitorSet;

/// Uniform grid. Periodic grids omit the right endpoint; Dirichlet grids
/// include both endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub x: Vec<f64>,
    pub h: f64,
    pub bc: Bc,
}

impl Grid {
    pub fn new(x0: f64, x1: f64, nx: usize, bc: Bc) -> Grid {
        let h = match bc {
            Bc::Periodic => (x1 - x0) / nx as f64,
            Bc::Dirichlet => (x1 - x0) / (nx - 1) as f64,
        };
        Grid { x: (0..nx).map(|i| x0 + i as f64 * h).collect(), h, bc }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Second difference; zero at Dirichlet endpoints.
    pub fn laplacian(&self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        let ih2 = 1.0 / (self.h * self.h);
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * ih2;
        }
        match self.bc {
            Bc::Periodic => {
                out[0] = (f[1] - 2.0 * f[0] + f[n - 1]) * ih2;
                out[n - 1] = (f[0] - 2.0 * f[n - 1] + f[n - 2]) * ih2;
            }
            Bc::Dirichlet => {
                out[0] = 0.0;
                out[n - 1] = 0.0;
            }
        }
    }

    /// Central first difference; one-sided second order at Dirichlet endpoints.
    pub fn dx(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len();
        let i2h = 0.5 / self.h;
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - f[i - 1]) * i2h;
        }
        match self.bc {
            Bc::Periodic => {
                out[0] = (f[1] - f[n - 1]) * i2h;
                out[n - 1] = (f[0] - f[n - 2]) * i2h;
            }
            Bc::Dirichlet => {
                out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * i2h;
                out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * i2h;
            }
        }
        out
    }

    /// Composite trapezoid rule (a plain sum on periodic grids).
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let s: f64 = f.iter().sum();
        match self.bc {
            Bc::Periodic => self.h * s,
            Bc::Dirichlet => self.h * (s - 0.5 * (f[0] + f[f.len() - 1])),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverState {
    pub t: f64,
    pub p: Vec<f64>,
    /// `p_t`.
    pub q: Vec<f64>,
    /// `p_tt`, damped runs only.
    pub r: Option<Vec<f64>>,
    pub v: Vec<f64>,
}

impl SolverState {
    pub fn zeros(n: usize, t: f64, damped: bool) -> SolverState {
        SolverState { t, p: vec![0.0; n], q: vec![0.0; n], r: damped.then(|| vec![0.0; n]), v: vec![0.0; n] }
    }

    fn axpy(&self, a: f64, d: &SolverState) -> SolverState {
        let f = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(x, y)| x + a * y).collect::<Vec<_>>();
        SolverState {
            t: self.t + a,
            p: f(&self.p, &d.p),
            q: f(&self.q, &d.q),
            r: self.r.as_ref().zip(d.r.as_ref()).map(|(x, y)| f(x, y)),
            v: f(&self.v, &d.v),
        }
    }

    fn all_finite(&self) -> bool {
        let ok = |v: &[f64]| v.iter().all(|x| x.is_finite());
        self.t.is_finite() && ok(&self.p) && ok(&self.q) && ok(&self.v) && self.r.as_deref().is_none_or(ok)
    }
}

/// Time-dependent Dirichlet data: `[p, p_t, p_tt]` at the left and right ends.
pub type BoundaryFn = Box<dyn Fn(f64) -> Result<[[f64; 3]; 2]> + Send + Sync>;

pub struct Solver {
    pub cfg: SolverConfig,
    pub grid: Grid,
    boundary: Option<BoundaryFn>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("cfg", &self.cfg).field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Solver> {
        cfg.validate()?;
        let grid = Grid::new(cfg.x0, cfg.x1, cfg.nx, cfg.bc);
        Ok(Solver { cfg, grid, boundary: None })
    }

    /// Replaces the default Dirichlet data (endpoint values held fixed).
    pub fn with_boundary(mut self, f: BoundaryFn) -> Solver {
        self.boundary = Some(f);
        self
    }

    /// State at `t = 0` from the configured profile.
    pub fn initial_state(&self) -> Result<SolverState> {
        let c = &self.cfg;
        let init = &c.init;
        let x = &self.grid.x;
        let (a, w, x_c) = (init.amplitude, init.width, init.center);
        let gauss = |x: f64| a * (-((x - x_c) / w).powi(2)).exp();
        let len = c.x1 - c.x0;
        let p: Vec<f64> = x
            .iter()
            .map(|&x| match init.name {
                InitName::Zero => 0.0,
                InitName::Constant => a,
                InitName::Linear => a * (x - x_c),
                InitName::Gaussian | InitName::GaussianRight => gauss(x),
                InitName::Sine => a * (2.0 * std::f64::consts::PI * (x - c.x0) / len).sin(),
            })
            .collect();
        let q: Vec<f64> = x
            .iter()
            .map(|&x| {
                let travel = match init.name {
                    InitName::GaussianRight => 2.0 * (x - x_c) / (w * w) * gauss(x),
                    _ => 0.0,
                };
                travel + init.rate
            })
            .collect();
        let mut s = SolverState { t: 0.0, p, q, r: None, v: vec![0.0; x.len()] };
        if let Some(ir) = c.init_r {
            s.r = Some(match ir {
                InitR::Zero => vec![0.0; x.len()],
                InitR::Consistent => self.reduced_ptt(&s)?,
            });
        }
        self.check_state(&s)?;
        s.v = self.initial_potential(&s).0;
        Ok(s)
    }

    /// `v(0,·)` solving `Δv = T1 = (1 − 2βp)q − αr` with the solver's own
    /// Laplacian, zero mean (periodic) or zero ends (Dirichlet). Then
    /// `(p − βp²)_t − αp_tt = Δv` holds for all time, so `v` is a potential of
    /// the run. Returns the mean of `T1` removed on periodic grids; a nonzero
    /// value means no periodic potential exists.
    pub fn initial_potential(&self, s: &SolverState) -> (Vec<f64>, f64) {
        let (b, a) = (self.cfg.beta, self.cfg.alpha);
        let n = s.p.len();
        let h2 = self.grid.h * self.grid.h;
        let mut f: Vec<f64> = (0..n)
            .map(|i| (1.0 - 2.0 * b * s.p[i]) * s.q[i] - s.r.as_ref().map_or(0.0, |r| a * r[i]))
            .collect();
        if f.iter().all(|&v| v == 0.0) {
            return (vec![0.0; n], 0.0);
        }
        // differences d_i = v_{i+1} − v_i satisfy d_i − d_{i−1} = h² f_i
        let (lo, hi, mean) = match self.grid.bc {
            Bc::Periodic => {
                let mean = f.iter().sum::<f64>() / n as f64;
                f.iter_mut().for_each(|v| *v -= mean);
                (1, n, mean)
            }
            Bc::Dirichlet => (1, n - 1, 0.0),
        };
        let mut d = vec![0.0; hi];
        for i in lo..hi {
            d[i] = d[i - 1] + h2 * f[i];
        }
        // the differences must sum to zero around the loop or across the interval
        let shift = d.iter().sum::<f64>() / hi as f64;
        let mut v = vec![0.0; n];
        for i in 1..n {
            v[i] = v[i - 1] + d[i - 1] - shift;
        }
        if self.grid.bc == Bc::Periodic {
            let m = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|x| *x -= m);
        }
        (v, mean)
    }

    /// `(2βq² + Δp)/(1 − 2βp)`: `p_tt` of the undamped equation.
    pub fn reduced_ptt(&self, s: &SolverState) -> Result<Vec<f64>> {
        self.margin(s)?;
        let b = self.cfg.beta;
        let mut lap = vec![0.0; s.p.len()];
        self.grid.laplacian(&s.p, &mut lap);
        Ok((0..s.p.len()).map(|i| (2.0 * b * s.q[i] * s.q[i] + lap[i]) / (1.0 - 2.0 * b * s.p[i])).collect())
    }

    /// `min(1 − 2βp)` with its location; errors when below the margin.
    pub fn margin(&self, s: &SolverState) -> Result<f64> {
        let b = self.cfg.beta;
        let (i, m) = s
            .p
            .iter()
            .map(|&p| 1.0 - 2.0 * b * p)
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, m)| if m < acc.1 || m.is_nan() { (i, m) } else { acc });
        if m.is_nan() {
            return Err(Error::NonFiniteState { t: s.t });
        }
        if m < self.cfg.delta {
            return Err(Error::DegenerateWaveSpeed { margin: m, x: self.grid.x[i] });
        }
        Ok(m)
    }

    fn check_state(&self, s: &SolverState) -> Result<()> {
        if !s.all_finite() {
            return Err(Error::NonFiniteState { t: s.t });
        }
        self.margin(s).map(|_| ())
    }

    /// Time derivative of the state.
    pub fn rhs(&self, s: &SolverState) -> Result<SolverState> {
        let b = self.cfg.beta;
        let n = s.p.len();
        let mut lap = vec![0.0; n];
        self.grid.laplacian(&s.p, &mut lap);
        let mut d = SolverState::zeros(n, 1.0, s.r.is_some());
        d.p.copy_from_slice(&s.q);
        d.v.copy_from_slice(&s.p);
        match &s.r {
            None => {
                self.margin(s)?;
                for i in 0..n {
                    d.q[i] = (2.0 * b * s.q[i] * s.q[i] + lap[i]) / (1.0 - 2.0 * b * s.p[i]);
                }
            }
            Some(r) => {
                let a = self.cfg.alpha;
                d.q.copy_from_slice(r);
                let dr = d.r.as_mut().expect("damped derivative");
                for i in 0..n {
                    dr[i] = ((1.0 - 2.0 * b * s.p[i]) * r[i] - 2.0 * b * s.q[i] * s.q[i] - lap[i]) / a;
                }
            }
        }
        if self.grid.bc == Bc::Dirichlet {
            let data = match &self.boundary {
                Some(f) => Some(f(s.t)?),
                None => None,
            };
            for (k, i) in [0, n - 1].into_iter().enumerate() {
                let (pt, ptt) = data.map_or((0.0, 0.0), |d| (d[k][1], d[k][2]));
                d.p[i] = pt;
                d.q[i] = ptt;
                if let Some(dr) = d.r.as_mut() {
                    dr[i] = 0.0;
                }
            }
        }
        Ok(d)
    }

    /// Stable step size for the current state.
    pub fn cfl_dt(&self, s: &SolverState) -> Result<f64> {
        let m = self.margin(s)?;
        let mut dt = self.cfg.cfl * self.grid.h * m.sqrt();
        if self.cfg.damped() {
            dt = dt.min(self.cfg.cfl * self.cfg.alpha);
        }
        Ok(dt)
    }

    /// One RK4 step of size `dt` (negative steps integrate backwards).
    pub fn step(&self, s: &SolverState, dt: f64) -> Result<SolverState> {
        let k1 = self.rhs(s)?;
        let k2 = self.rhs(&s.axpy(0.5 * dt, &k1))?;
        let k3 = self.rhs(&s.axpy(0.5 * dt, &k2))?;
        let k4 = self.rhs(&s.axpy(dt, &k3))?;
        let comb = |f: fn(&SolverState) -> &[f64], base: &[f64]| -> Vec<f64> {
            let (a, b, c, d) = (f(&k1), f(&k2), f(&k3), f(&k4));
            (0..base.len()).map(|i| base[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect()
        };
        let mut out = SolverState {
            t: s.t + dt,
            p: comb(|k| &k.p, &s.p),
            q: comb(|k| &k.q, &s.q),
            r: s.r.as_ref().map(|r| comb(|k| k.r.as_deref().expect("damped stage"), r)),
            v: comb(|k| &k.v, &s.v),
        };
        if let (Bc::Dirichlet, Some(f)) = (self.grid.bc, &self.boundary) {
            let data = f(out.t)?;
            let n = out.p.len();
            for (k, i) in [0, n - 1].into_iter().enumerate() {
                out.p[i] = data[k][0];
                out.q[i] = data[k][1];
            }
        }
        self.check_state(&out)?;
        Ok(out)
    }

    /// Advances to `t_end` with CFL-limited steps, the last one shortened to
    /// land on `t_end` exactly. Calls `observe` after every step.
    pub fn advance(
        &self,
        mut s: SolverState,
        t_end: f64,
        mut observe: impl FnMut(usize, &SolverState) -> Result<()>,
    ) -> Result<SolverState> {
        let mut n = 0;
        while s.t < t_end {
            let dt = self.cfl_dt(&s)?;
            let remaining = t_end - s.t;
            let last = remaining <= dt;
            // split the final stretch evenly rather than leave a sliver step
            let dt = if last { remaining } else if remaining < 2.0 * dt { 0.5 * remaining } else { dt };
            s = self.step(&s, dt)?;
            if last {
                s.t = t_end;
            }
            n += 1;
            observe(n, &s)?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub outputs: usize,
    pub t_final: f64,
    pub monitors: Vec<String>,
    pub warnings: Vec<String>,
}

fn write_fields(dir: &Path, index: usize, grid: &Grid, s: &SolverState) -> Result<()> {
    let f = fs::File::create(dir.join(format!("fields_{index:04}.csv")))?;
    let mut w = BufWriter::new(f);
    writeln!(w, "x,p,q,v")?;
    for i in 0..grid.len() {
        writeln!(w, "{},{},{},{}", grid.x[i], s.p[i], s.q[i], s.v[i])?;
    }
    w.flush()?;
    Ok(())
}

/// Integrates the configured problem, writing `fields_NNNN.csv` every
/// `output.every` steps (and at both ends) plus `monitors.csv`.
pub fn run(cfg: &SolverConfig, out_dir: &Path) -> Result<RunSummary> {
    let solver = Solver::new(cfg.clone())?;
    fs::create_dir_all(out_dir)?;
    let monitors = MonitorSet::for_config(cfg)?;
    let mut mon = BufWriter::new(fs::File::create(out_dir.join("monitors.csv"))?);
    writeln!(mon, "{}", monitors.header())?;
    let mut warnings = Vec::new();
    let mut outputs = 0;
    let mut emit = |s: &SolverState, outputs: &mut usize, warnings: &mut Vec<String>| -> Result<()> {
        write_fields(out_dir, *outputs, &solver.grid, s)?;
        let (row, warn) = monitors.row(s, &solver)?;
        // One warning per monitor; later occurrences differ only in the numbers.
        for w in warn {
            let key = w.split(':').next().unwrap_or("");
            if !warnings.iter().any(|x| x.split(':').next() == Some(key)) {
                warnings.push(w);
            }
        }
        let cells: Vec<String> = std::iter::once(s.t).chain(row).map(|v| v.to_string()).collect();
        writeln!(mon, "{}", cells.join(","))?;
        *outputs += 1;
        Ok(())
    };
    let s0 = solver.initial_state()?;
    let mean = solver.initial_potential(&s0).1;
    if mean.abs() > 1e-12 * s0.q.iter().fold(1.0f64, |m, q| m.max(q.abs())) {
        warnings.push(format!(
            "net C1 density {mean:e} per unit length: no periodic potential exists; potential-level monitors are not conserved"
        ));
    }
    emit(&s0, &mut outputs, &mut warnings)?;
    let mut last = 0;
    let every = cfg.output_every;
    let s = solver.advance(s0, cfg.t_end, |n, s| {
        last = n;
        if n % every == 0 {
            emit(s, &mut outputs, &mut warnings)?;
        }
        Ok(())
    })?;
    if last % every != 0 {
        emit(&s, &mut outputs, &mut warnings)?;
    }
    mon.flush()?;
    Ok(RunSummary { steps: last, outputs, t_final: s.t, monitors: monitors.ids(), warnings })
}

/// Setup of a manufactured-solution study on a Dirichlet grid.
#[derive(Clone, Debug, Serialize)]
pub struct MmsSetup {
    pub x0: f64,
    pub x1: f64,
    pub t0: f64,
    pub t1: f64,
    /// Points on the coarsest grid; each refinement halves `h`.
    pub nx: usize,
    pub cfl: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MmsLevel {
    pub nx: usize,
    pub h: f64,
    pub max_error: f64,
}

/// Integrates from exact data at `t0` to `t1` on `refinements + 1` grids and
/// returns the max-norm error in `p` at `t1` on each.
pub fn mms_convergence(sol: &ExactSolution, setup: &MmsSetup, refinements: usize) -> Result<Vec<MmsLevel>> {
    let mut out = Vec::with_capacity(refinements + 1);
    let ht = 2e-3 * (setup.t1 - setup.t0).abs().clamp(1e-3, 1.0);
    for k in 0..=refinements {
        let nx = (setup.nx - 1) * (1 << k) + 1;
        let cfg = SolverConfig {
            alpha: 0.0,
            beta: sol.beta,
            x0: setup.x0,
            x1: setup.x1,
            nx,
            bc: Bc::Dirichlet,
            cfl: setup.cfl,
            t_end: setup.t1,
            init: InitProfile { name: InitName::Zero, amplitude: 0.0, width: 1.0, center: 0.0, rate: 0.0 },
            init_r: None,
            output_every: 1,
            delta: 1e-6,
        };
        let (xl, xr) = (setup.x0, setup.x1);
        let bsol = sol.clone();
        let data = move |t: f64| -> Result<[[f64; 3]; 2]> {
            let mut d = [[0.0; 3]; 2];
            for (k, x) in [xl, xr].into_iter().enumerate() {
                let (pt, ptt) = bsol.time_derivatives(t, x, ht)?;
                d[k] = [bsol.eval_p(t, x)?, pt, ptt];
            }
            Ok(d)
        };
        let solver = Solver::new(cfg)?.with_boundary(Box::new(data));
        let x = solver.grid.x.clone();
        let mut s = SolverState::zeros(nx, setup.t0, false);
        for (i, &xi) in x.iter().enumerate() {
            s.p[i] = sol.eval_p(setup.t0, xi)?;
            s.q[i] = sol.time_derivatives(setup.t0, xi, ht)?.0;
        }
        let s = solver.advance(s, setup.t1, |_, _| Ok(()))?;
        let mut err: f64 = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            err = err.max((s.p[i] - sol.eval_p(setup.t1, xi)?).abs());
        }
        out.push(MmsLevel { nx, h: solver.grid.h, max_error: err });
    }
    Ok(out)
}

/// `log2(e_i / e_{i+1})` for consecutive levels.
pub fn observed_orders(levels: &[MmsLevel]) -> Vec<f64> {
    levels.windows(2).map(|w| (w[0].max_error / w[1].max_error).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{make_deg2, make_deg3, make_similarity, SimilarityBranch};

    fn cfg(text: &str) -> SolverConfig {
        SolverConfig::parse(text).unwrap()
    }

    fn pulse(nx: usize) -> SolverConfig {
        cfg(&format!("beta = 0.1\nx0 = -8\nx1 = 8\nnx = {nx}\nt_end = 1\ninit.name = gaussian\ninit.width = 0.7\n"))
    }

    #[test]
    fn cfl_examples() {
        let s = Solver::new(cfg("beta = 1\nx0 = 0\nx1 = 0.16\nnx = 16\nt_end = 1\ninit.name = zero\n")).unwrap();
        let z = s.initial_state().unwrap();
        assert!((s.cfl_dt(&z).unwrap() - 0.005).abs() < 1e-15);
        let mut w = z.clone();
        w.p.iter_mut().for_each(|p| *p = 0.375);
        assert!((s.cfl_dt(&w).unwrap() - 0.0025).abs() < 1e-15);
        let d = Solver::new(cfg("alpha = 1e-3\ninit.r = zero\nbeta = 1\nx0 = 0\nx1 = 1\nnx = 16\nt_end = 1\ninit.name = zero\n"))
            .unwrap();
        assert!(d.cfl_dt(&d.initial_state().unwrap()).unwrap() <= 5e-4);
    }

    #[test]
    fn constant_state_persists() {
        let s = Solver::new(cfg("beta = 1\nx0 = 0\nx1 = 1\nnx = 32\nt_end = 1\ninit.name = constant\ninit.amplitude = 0.1\n")).unwrap();
        let z = s.initial_state().unwrap();
        let d = s.rhs(&z).unwrap();
        assert!(d.p.iter().chain(&d.q).all(|&v| v == 0.0));
        let zero = SolverState::zeros(32, 0.0, false);
        assert_eq!(s.step(&zero, 0.01).unwrap().p, zero.p);
    }

    #[test]
    fn affine_data_is_static() {
        let s = Solver::new(cfg(
            "beta = 1\nx0 = -0.4\nx1 = 0.4\nnx = 33\nbc = dirichlet\nt_end = 0.5\ninit.name = linear\ninit.amplitude = -1\ninit.center = 0\n",
        ))
        .unwrap();
        let z = s.initial_state().unwrap();
        assert!(s.rhs(&z).unwrap().q.iter().all(|&v| v.abs() < 1e-10));
        let end = s.advance(z.clone(), 0.5, |_, _| Ok(())).unwrap();
        let err = end.p.iter().zip(&z.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn spatially_constant_matches_degree_three() {
        // p(0) = 0, p_t(0) = 1/3 for beta = 1, a1 = 1
        let s = Solver::new(cfg("beta = 1\nx0 = 0\nx1 = 1\nnx = 16\nt_end = 0.5\ninit.name = zero\ninit.rate = 0.3333333333333333\n"))
            .unwrap();
        let sol = make_deg3(1.0, false, 1.0).unwrap();
        let end = s.advance(s.initial_state().unwrap(), 0.5, |_, _| Ok(())).unwrap();
        let exact = sol.eval_p(0.5, 0.0).unwrap();
        assert!((end.p[3] - exact).abs() < 1e-6, "{} vs {exact}", end.p[3]);
    }

    #[test]
    fn gauge_invariance() {
        let s = Solver::new(pulse(64)).unwrap();
        let a = s.initial_state().unwrap();
        let mut b = a.clone();
        b.v.iter_mut().for_each(|v| *v += 3.25);
        let (a, b) = (s.advance(a, 0.3, |_, _| Ok(())).unwrap(), s.advance(b, 0.3, |_, _| Ok(())).unwrap());
        assert_eq!(a.p, b.p);
        assert_eq!(a.q, b.q);
    }

    #[test]
    fn reversal_error_is_fifth_order() {
        let s = Solver::new(pulse(128)).unwrap();
        let z = s.initial_state().unwrap();
        let err = |dt: f64| {
            let back = s.step(&s.step(&z, dt).unwrap(), -dt).unwrap();
            back.p.iter().zip(&z.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.04), err(0.02));
        assert!(e1 / e2 > 20.0, "{e1:e} {e2:e}");
    }

    #[test]
    fn initial_potential_solves_poisson() {
        for bc in ["periodic", "dirichlet"] {
            let s = Solver::new(cfg(&format!(
                "beta = 0.1\nx0 = -8\nx1 = 8\nnx = 64\nbc = {bc}\nt_end = 1\ninit.name = gaussian_right\n"
            )))
            .unwrap();
            let z = s.initial_state().unwrap();
            let mut lap = vec![0.0; 64];
            s.grid.laplacian(&z.v, &mut lap);
            for i in 1..63 {
                let t1 = (1.0 - 0.2 * z.p[i]) * z.q[i];
                assert!((lap[i] - t1).abs() < 1e-9, "{bc} {i}: {} vs {t1}", lap[i]);
            }
            assert!(z.v[0].abs() < 1e-12 || bc == "periodic");
        }
        let s = Solver::new(pulse(64)).unwrap();
        assert!(s.initial_state().unwrap().v.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn watchdog_fires() {
        let s = Solver::new(cfg("beta = 1\nx0 = 0\nx1 = 1\nnx = 16\nt_end = 1\ninit.name = zero\n")).unwrap();
        let mut z = s.initial_state().unwrap();
        z.p[4] = 0.5;
        assert!(matches!(s.rhs(&z), Err(Error::DegenerateWaveSpeed { .. })));
        z.p[4] = f64::NAN;
        assert!(matches!(s.rhs(&z), Err(Error::NonFiniteState { .. })));
    }

    #[test]
    fn pulse_stays_finite() {
        let s = Solver::new(pulse(128)).unwrap();
        let end = s.advance(s.initial_state().unwrap(), 1.0, |_, _| Ok(())).unwrap();
        assert!(end.p.iter().all(|p| p.is_finite()));
        assert_eq!(end.t, 1.0);
    }

    #[test]
    fn damped_run_decays() {
        // the parasitic mode grows like exp(t/alpha); stay within a few alpha
        let c = cfg("alpha = 0.5\ninit.r = consistent\nbeta = 0.1\nx0 = -8\nx1 = 8\nnx = 128\nt_end = 1\ninit.name = gaussian\n");
        let s = Solver::new(c).unwrap();
        let end = s.advance(s.initial_state().unwrap(), 1.0, |_, _| Ok(())).unwrap();
        assert!(end.p.iter().all(|p| p.is_finite() && p.abs() < 1.0));
        let short = cfg("alpha = 0.05\ninit.r = zero\nbeta = 0.1\nx0 = -8\nx1 = 8\nnx = 128\nt_end = 1\ninit.name = gaussian\n");
        let s = Solver::new(short).unwrap();
        assert!(s.advance(s.initial_state().unwrap(), 1.0, |_, _| Ok(())).is_err());
    }

    #[test]
    fn mms_static_and_similarity() {
        let setup = MmsSetup { x0: -0.4, x1: 0.4, t0: 0.0, t1: 0.2, nx: 17, cfl: 0.5 };
        let d2 = mms_convergence(&make_deg2(0.0, 0.0, 1.0, 1.0).unwrap(), &setup, 1).unwrap();
        assert!(d2.iter().all(|l| l.max_error < 1e-12), "{d2:?}");
        let setup = MmsSetup { x0: 0.5, x1: 1.5, t0: 1.0, t1: 1.1, nx: 17, cfl: 0.5 };
        let sim = make_similarity(SimilarityBranch::Singular, 1.0).unwrap();
        let levels = mms_convergence(&sim, &setup, 2).unwrap();
        let orders = observed_orders(&levels);
        assert!(orders.iter().all(|o| (1.8..2.2).contains(o)), "{levels:?}");
    }
}
