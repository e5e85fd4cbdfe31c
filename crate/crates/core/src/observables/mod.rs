//! Grid quadrature of conserved integrals and drift tracking.
//!
//! Densities come from the catalog and are evaluated node by node, with jet
//! coordinates bound to grid data: `p_t = q`, `p_tt = r` (damped) or the
//! reduced expression (undamped), and x-derivatives by central differences.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::calculus::EquationName;
use crate::catalog::{get_currents, instantiate_f_current, printed_integrals, t6_phi6};
use crate::error::{Error, Result};
use crate::jetspace::{Dep, Indet, JetExpr};
use crate::pde::{Solver, SolverConfig, SolverState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MonitorId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    E,
    M,
    K,
    H,
    Tv3,
    Tv4,
}

impl MonitorId {
    pub const ALL: [MonitorId; 12] = [
        MonitorId::C1,
        MonitorId::C2,
        MonitorId::C3,
        MonitorId::C4,
        MonitorId::C5,
        MonitorId::C6,
        MonitorId::E,
        MonitorId::M,
        MonitorId::K,
        MonitorId::H,
        MonitorId::Tv3,
        MonitorId::Tv4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MonitorId::C1 => "C1",
            MonitorId::C2 => "C2",
            MonitorId::C3 => "C3",
            MonitorId::C4 => "C4",
            MonitorId::C5 => "C5",
            MonitorId::C6 => "C6",
            MonitorId::E => "E",
            MonitorId::M => "M",
            MonitorId::K => "K",
            MonitorId::H => "H",
            MonitorId::Tv3 => "Tv3",
            MonitorId::Tv4 => "Tv4",
        }
    }

    pub fn spec(self) -> MonitorSpec {
        use MonitorId::*;
        MonitorSpec {
            id: self,
            undamped_only: !matches!(self, C1 | C2 | C3 | C4),
            needs_v: matches!(self, E | M | K | H | Tv3 | Tv4),
        }
    }

    /// The integrand, in `p`-jets for C1–C6 and in `v`-jets otherwise.
    pub fn density(self) -> Result<JetExpr> {
        use MonitorId::*;
        let current = |eq: EquationName, id: &str| -> Result<JetExpr> {
            get_currents(eq)?
                .into_iter()
                .find(|c| c.id == id)
                .map(|c| c.t)
                .ok_or_else(|| Error::Config(format!("catalog has no current {id}")))
        };
        let printed = |id: &str| -> Result<JetExpr> {
            printed_integrals()
                .into_iter()
                .find(|d| d.id == id)
                .map(|d| d.density)
                .ok_or_else(|| Error::Config(format!("catalog has no integral {id}")))
        };
        match self {
            C1 | C2 | C3 | C4 | C5 => current(EquationName::WesterveltDamped, self.as_str()),
            C6 => Ok(t6_phi6().0),
            E | M | K | H => printed(self.as_str()),
            Tv3 => current(EquationName::PotentialUndamped, "Cv3"),
            Tv4 => current(EquationName::PotentialUndamped, "Cv4"),
        }
    }
}

impl fmt::Display for MonitorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MonitorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<MonitorId> {
        MonitorId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown monitor `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonitorSpec {
    pub id: MonitorId,
    pub undamped_only: bool,
    pub needs_v: bool,
}

/// Grid data bound to jet coordinates.
struct NodeData {
    p: Vec<f64>,
    q: Vec<f64>,
    ptt: Vec<f64>,
    v: Vec<f64>,
    px: Vec<f64>,
    qx: Vec<f64>,
    vx: Vec<f64>,
}

impl NodeData {
    fn new(s: &SolverState, solver: &Solver) -> Result<NodeData> {
        let g = &solver.grid;
        let ptt = match &s.r {
            Some(r) => r.clone(),
            None => solver.reduced_ptt(s)?,
        };
        Ok(NodeData {
            px: g.dx(&s.p),
            qx: g.dx(&s.q),
            vx: g.dx(&s.v),
            p: s.p.clone(),
            q: s.q.clone(),
            v: s.v.clone(),
            ptt,
        })
    }

    fn value(&self, i: usize, ind: Indet, t: f64, x: f64, cfg: &SolverConfig) -> f64 {
        match ind {
            Indet::Alpha => cfg.alpha,
            Indet::Beta => cfg.beta,
            Indet::T => t,
            Indet::X => x,
            Indet::Jet(j) => match (j.dep, j.t_order, j.x_order) {
                (Dep::P, 0, 0) | (Dep::V, 1, 0) => self.p[i],
                (Dep::P, 1, 0) | (Dep::V, 2, 0) => self.q[i],
                (Dep::P, 2, 0) | (Dep::V, 3, 0) => self.ptt[i],
                (Dep::P, 0, 1) | (Dep::V, 1, 1) => self.px[i],
                (Dep::P, 1, 1) | (Dep::V, 2, 1) => self.qx[i],
                (Dep::V, 0, 0) => self.v[i],
                (Dep::V, 0, 1) => self.vx[i],
                _ => f64::NAN,
            },
            _ => f64::NAN,
        }
    }

    fn integrand(&self, e: &JetExpr, t: f64, solver: &Solver) -> Vec<f64> {
        let x = &solver.grid.x;
        (0..x.len()).map(|i| e.eval_f64(&|ind| self.value(i, ind, t, x[i], &solver.cfg))).collect()
    }

    /// Fails when `p_x² − (1 − 2βp)p_t²` nearly vanishes somewhere.
    fn check_denominator(&self, solver: &Solver) -> Result<()> {
        let b = solver.cfg.beta;
        let j: Vec<f64> = (0..self.p.len())
            .map(|i| self.px[i] * self.px[i] - (1.0 - 2.0 * b * self.p[i]) * self.q[i] * self.q[i])
            .collect();
        let scale = (0..self.p.len())
            .map(|i| (self.px[i] * self.px[i]).max((1.0 - 2.0 * b * self.p[i]) * self.q[i] * self.q[i]))
            .fold(1.0f64, f64::max);
        let eps = 1e-12 * scale;
        match j.iter().enumerate().find(|(_, v)| v.abs() < eps) {
            Some((i, v)) => Err(Error::DegenerateDenominator { x: solver.grid.x[i], value: v.abs() }),
            None => Ok(()),
        }
    }
}

fn integrate_checked(id: MonitorId, e: &JetExpr, nd: &NodeData, s: &SolverState, solver: &Solver) -> Result<f64> {
    let vals = nd.integrand(e, s.t, solver);
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(match id {
            MonitorId::C5 | MonitorId::C6 => Error::DegenerateDenominator { x: solver.grid.x[i], value: 0.0 },
            _ => Error::NonFiniteState { t: s.t },
        });
    }
    Ok(solver.grid.integrate(&vals))
}

fn guard(id: MonitorId, nd: &NodeData, solver: &Solver) -> Result<()> {
    if id.spec().undamped_only && solver.cfg.damped() {
        return Err(Error::UndampedOnly(id.to_string()));
    }
    if matches!(id, MonitorId::C5 | MonitorId::C6) {
        nd.check_denominator(solver)?;
    }
    Ok(())
}

/// The integral of the monitor density over the grid.
pub fn evaluate(id: MonitorId, s: &SolverState, solver: &Solver) -> Result<f64> {
    let nd = NodeData::new(s, solver)?;
    guard(id, &nd, solver)?;
    integrate_checked(id, &id.density()?, &nd, s, solver)
}

/// [`evaluate`] minus its value on the quiescent state `p = v = 0` at the same
/// time. The potential-level densities contain `t`, `x` and constants, so the
/// background is neither zero nor conserved on a bounded domain; the excess is
/// what a localized disturbance carries. C5 and C6 are returned unchanged
/// (their densities are singular at rest).
pub fn evaluate_excess(id: MonitorId, s: &SolverState, solver: &Solver) -> Result<f64> {
    let set = MonitorSet { ids: vec![id], densities: vec![id.density()?] };
    set.values(s, solver)?.remove(0)
}

/// `J = ∫ T_f dx` for the current with multiplier `f(v_t, v_x)`.
pub fn evaluate_j(f: &JetExpr, s: &SolverState, solver: &Solver) -> Result<f64> {
    if solver.cfg.damped() {
        return Err(Error::UndampedOnly("J_f".into()));
    }
    let c = instantiate_f_current(f)?;
    let nd = NodeData::new(s, solver)?;
    let vals = nd.integrand(&c.t, s.t, solver);
    Ok(solver.grid.integrate(&vals))
}

/// The monitors written to `monitors.csv`, with densities built once.
#[derive(Clone, Debug)]
pub struct MonitorSet {
    ids: Vec<MonitorId>,
    densities: Vec<JetExpr>,
}

impl MonitorSet {
    /// C1–C4 always; the undamped-only monitors when `alpha = 0`.
    pub fn for_config(cfg: &SolverConfig) -> Result<MonitorSet> {
        let ids: Vec<MonitorId> =
            MonitorId::ALL.into_iter().filter(|m| !(cfg.damped() && m.spec().undamped_only)).collect();
        let densities = ids.iter().map(|m| m.density()).collect::<Result<_>>()?;
        Ok(MonitorSet { ids, densities })
    }

    pub fn ids(&self) -> Vec<String> {
        self.ids.iter().map(|m| m.to_string()).collect()
    }

    pub fn header(&self) -> String {
        std::iter::once("t".to_string()).chain(self.ids()).collect::<Vec<_>>().join(",")
    }

    /// Per-monitor background-subtracted values.
    pub fn values(&self, s: &SolverState, solver: &Solver) -> Result<Vec<Result<f64>>> {
        let nd = NodeData::new(s, solver)?;
        let rest = SolverState::zeros(s.p.len(), s.t, s.r.is_some());
        let nd0 = NodeData::new(&rest, solver)?;
        Ok(self
            .ids
            .iter()
            .zip(&self.densities)
            .map(|(&id, e)| {
                guard(id, &nd, solver)?;
                let raw = integrate_checked(id, e, &nd, s, solver)?;
                if matches!(id, MonitorId::C5 | MonitorId::C6) {
                    return Ok(raw);
                }
                Ok(raw - integrate_checked(id, e, &nd0, &rest, solver)?)
            })
            .collect())
    }

    /// A `monitors.csv` row (without `t`). Degenerate C5/C6 become NaN with a
    /// warning; other failures are errors.
    pub fn row(&self, s: &SolverState, solver: &Solver) -> Result<(Vec<f64>, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut row = Vec::with_capacity(self.ids.len());
        for (id, v) in self.ids.iter().zip(self.values(s, solver)?) {
            match v {
                Ok(v) => row.push(v),
                Err(e @ Error::DegenerateDenominator { .. }) => {
                    warnings.push(format!("{id}: {e}; written as NaN"));
                    row.push(f64::NAN);
                }
                Err(e) => return Err(e),
            }
        }
        Ok((row, warnings))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonitorSeries {
    pub id: String,
    pub samples: Vec<(f64, f64)>,
    pub reference: f64,
}

impl MonitorSeries {
    pub fn new(id: impl Into<String>, t0: f64, value: f64) -> MonitorSeries {
        MonitorSeries { id: id.into(), samples: vec![(t0, value)], reference: value }
    }

    pub fn push(&mut self, t: f64, value: f64) {
        debug_assert!(self.samples.last().is_none_or(|&(tl, _)| t > tl));
        self.samples.push((t, value));
    }
}

/// `(max |value − reference|, that / max(|reference|, floor))`.
pub fn drift_report(series: &MonitorSeries, floor: f64) -> (f64, f64) {
    let max = series.samples.iter().map(|&(_, v)| (v - series.reference).abs()).fold(0.0, f64::max);
    (max, max / series.reference.abs().max(floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetspace::{beta, frac, v};

    fn solver(text: &str) -> Solver {
        Solver::new(SolverConfig::parse(text).unwrap()).unwrap()
    }

    const UNIT: &str = "beta = 1\nx0 = 0\nx1 = 1\nnx = 32\nt_end = 1\ninit.name = zero\n";
    const PULSE: &str = "beta = 0.1\nx0 = -8\nx1 = 8\nnx = 256\nt_end = 1\ninit.name = gaussian\ninit.width = 0.7\n";

    #[test]
    fn zero_state_values() {
        let s = solver(UNIT);
        let z = s.initial_state().unwrap();
        assert_eq!(evaluate(MonitorId::C1, &z, &s).unwrap(), 0.0);
        assert!((evaluate(MonitorId::E, &z, &s).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(evaluate_excess(MonitorId::E, &z, &s).unwrap(), 0.0);
        assert!(matches!(evaluate(MonitorId::C5, &z, &s), Err(Error::DegenerateDenominator { .. })));
    }

    #[test]
    fn undamped_only_is_enforced() {
        let s = solver(&format!("{UNIT}alpha = 0.1\ninit.r = zero\n"));
        let z = s.initial_state().unwrap();
        assert!(matches!(evaluate(MonitorId::E, &z, &s), Err(Error::UndampedOnly(_))));
        assert_eq!(MonitorSet::for_config(&s.cfg).unwrap().header(), "t,C1,C2,C3,C4");
        let u = MonitorSet::for_config(&solver(UNIT).cfg).unwrap();
        assert_eq!(u.header(), "t,C1,C2,C3,C4,C5,C6,E,M,K,H,Tv3,Tv4");
    }

    #[test]
    fn momentum_vanishes_for_even_data() {
        let s = solver(PULSE);
        let z = s.initial_state().unwrap();
        assert!(evaluate(MonitorId::M, &z, &s).unwrap().abs() < 1e-14);
    }

    #[test]
    fn j_of_vx_is_scaled_momentum() {
        let s = solver(PULSE);
        let end = s.advance(s.initial_state().unwrap(), 0.5, |_, _| Ok(())).unwrap();
        let j = evaluate_j(&v(0, 1), &end, &s).unwrap();
        let m = evaluate(MonitorId::M, &end, &s).unwrap();
        // J = −β M + (1/(4β)) ∫ v_x dx, and ∫ v_x vanishes on a periodic grid
        assert!((j + 0.1 * m).abs() < 1e-12 * (1.0 + m.abs()), "{j} {m}");
        let zero = evaluate_j(&JetExpr::zero(), &end, &s).unwrap();
        assert_eq!(zero, 0.0);
        let e_like = v(1, 0) - (2 * beta()).recip().unwrap();
        assert!(evaluate_j(&e_like, &end, &s).is_ok());
        assert!(evaluate_j(&(v(1, 0) * v(1, 0) * frac(1, 1)), &end, &s).is_err());
    }

    fn c1_drift(cfl: f64) -> f64 {
        let s = solver(&format!("{PULSE}cfl = {cfl}\n"));
        let set = MonitorSet::for_config(&s.cfg).unwrap();
        let z = s.initial_state().unwrap();
        let (row0, _) = set.row(&z, &s).unwrap();
        let mut series = MonitorSeries::new("C1", 0.0, row0[0]);
        s.advance(z, 1.0, |_, st| {
            let (row, _) = set.row(st, &s)?;
            series.push(st.t, row[0]);
            Ok(())
        })
        .unwrap();
        drift_report(&series, 1.0).0
    }

    #[test]
    fn c1_drift_is_time_integration_error() {
        // the flux telescopes exactly, so only the RK4 error remains
        let (a, b) = (c1_drift(0.5), c1_drift(0.25));
        assert!(a < 1e-6 && a / b > 10.0, "{a:e} {b:e}");
    }

    #[test]
    fn drift_report_examples() {
        let mut s = MonitorSeries::new("x", 0.0, 2.0);
        s.push(1.0, 2.0);
        assert_eq!(drift_report(&s, 1.0), (0.0, 0.0));
        s.push(2.0, 2.5);
        s.push(3.0, 2.0);
        assert_eq!(drift_report(&s, 1.0), (0.5, 0.25));
    }

    #[test]
    fn kinetic_dilation_matches_tv3() {
        let s = solver(PULSE);
        let end = s.advance(s.initial_state().unwrap(), 0.5, |_, _| Ok(())).unwrap();
        let k = evaluate_excess(MonitorId::K, &end, &s).unwrap();
        let tv3 = evaluate_excess(MonitorId::Tv3, &end, &s).unwrap();
        assert!((k + tv3 / 5.0).abs() < 1e-10 * (1.0 + k.abs()), "{k} {tv3}");
    }
}
