//! Named equations, their leading-derivative rewrite rules and reduction to
//! the solution manifold.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{total_derivative, Dir, Frame};
use crate::error::{Error, Result};
use crate::jetspace::{alpha, beta, jet, Dep, Indet, JetExpr, JetVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationName {
    WesterveltDamped,
    WesterveltUndamped,
    PotentialDamped,
    PotentialUndamped,
    LinearWave,
    FEquation,
}

impl EquationName {
    pub const ALL: [EquationName; 6] = [
        EquationName::WesterveltDamped,
        EquationName::WesterveltUndamped,
        EquationName::PotentialDamped,
        EquationName::PotentialUndamped,
        EquationName::LinearWave,
        EquationName::FEquation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EquationName::WesterveltDamped => "westervelt_damped",
            EquationName::WesterveltUndamped => "westervelt_undamped",
            EquationName::PotentialDamped => "potential_damped",
            EquationName::PotentialUndamped => "potential_undamped",
            EquationName::LinearWave => "linear_wave",
            EquationName::FEquation => "f_equation",
        }
    }

    pub fn is_damped(self) -> bool {
        matches!(self, EquationName::WesterveltDamped | EquationName::PotentialDamped)
    }
}

impl fmt::Display for EquationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EquationName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EquationName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownEquation(s.to_string()))
    }
}

type ReductionCache = Arc<Mutex<FxHashMap<(usize, usize), JetExpr>>>;

/// A PDE `residual = 0` solved for its leading `t`-derivative.
#[derive(Clone)]
pub struct EquationSpec {
    pub name: EquationName,
    pub residual: JetExpr,
    pub leading: JetVar,
    pub rewrite: JetExpr,
    pub frame: Frame,
    cache: ReductionCache,
}

impl fmt::Debug for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquationSpec")
            .field("name", &self.name)
            .field("residual", &self.residual)
            .field("leading", &self.leading)
            .field("rewrite", &self.rewrite)
            .finish()
    }
}

fn build(name: EquationName) -> EquationSpec {
    let one = JetExpr::one();
    let b2 = 2 * beta();
    let (residual, leading, rewrite, frame) = match name {
        EquationName::WesterveltDamped | EquationName::WesterveltUndamped => {
            let p = |a, b| jet(Dep::P, a, b);
            let w = &one - &b2 * p(0, 0);
            let core = &w * p(2, 0) - &b2 * p(1, 0) * p(1, 0) - p(0, 2);
            if name == EquationName::WesterveltDamped {
                let rw = (&w * p(2, 0) - &b2 * p(1, 0) * p(1, 0) - p(0, 2)) / alpha();
                (core - alpha() * p(3, 0), JetVar::at(Dep::P, 3, 0), rw, Frame::standard())
            } else {
                let rw = (&b2 * p(1, 0) * p(1, 0) + p(0, 2)) / w;
                (core, JetVar::at(Dep::P, 2, 0), rw, Frame::standard())
            }
        }
        EquationName::PotentialDamped | EquationName::PotentialUndamped => {
            let v = |a, b| jet(Dep::V, a, b);
            let w = &one - &b2 * v(1, 0);
            let core = &w * v(2, 0) - v(0, 2);
            if name == EquationName::PotentialDamped {
                let rw = (&w * v(2, 0) - v(0, 2)) / alpha();
                (core - alpha() * v(3, 0), JetVar::at(Dep::V, 3, 0), rw, Frame::standard())
            } else {
                (core, JetVar::at(Dep::V, 2, 0), v(0, 2) / w, Frame::standard())
            }
        }
        EquationName::LinearWave => {
            let vs = |a, b| jet(Dep::VStar, a, b);
            let c = &one - &b2 * JetExpr::var(Indet::TStar);
            (vs(2, 0) - &c * vs(0, 2), JetVar::at(Dep::VStar, 2, 0), c * vs(0, 2), Frame::star())
        }
        EquationName::FEquation => {
            let f = |a, b| jet(Dep::F, a, b);
            let c = &one - &b2 * jet(Dep::V, 1, 0);
            (f(2, 0) - &c * f(0, 2), JetVar::at(Dep::F, 2, 0), c * f(0, 2), Frame::f_frame())
        }
    };
    EquationSpec { name, residual, leading, rewrite, frame, cache: Default::default() }
}

impl EquationSpec {
    /// Shared instance for a named equation (reduction rules are memoized).
    pub fn get(name: EquationName) -> &'static EquationSpec {
        static SPECS: OnceLock<Vec<EquationSpec>> = OnceLock::new();
        let specs = SPECS.get_or_init(|| EquationName::ALL.into_iter().map(build).collect());
        &specs[EquationName::ALL.iter().position(|n| *n == name).unwrap()]
    }

    pub fn by_name(name: &str) -> Result<&'static EquationSpec> {
        Ok(EquationSpec::get(name.parse()?))
    }

    pub fn dep(&self) -> Dep {
        self.leading.dep
    }

    fn leading_order(&self) -> usize {
        self.leading.t_order as usize
    }

    /// On-shell expression for `w_{t^a x^b}`, `a ≥` the leading order.
    fn reduced_jet(&self, a: usize, b: usize) -> Result<JetExpr> {
        if let Some(e) = self.cache.lock().unwrap().get(&(a, b)) {
            return Ok(e.clone());
        }
        let lead = self.leading_order();
        let e = if a == lead && b == 0 {
            self.rewrite.clone()
        } else if a == lead {
            total_derivative(&self.reduced_jet(a, b - 1)?, &self.frame, Dir::X)?
        } else {
            let d = total_derivative(&self.reduced_jet(a - 1, b)?, &self.frame, Dir::T)?;
            self.substitute_reducible(&d)?
        };
        self.cache.lock().unwrap().insert((a, b), e.clone());
        Ok(e)
    }

    fn substitute_reducible(&self, e: &JetExpr) -> Result<JetExpr> {
        let dep = self.dep();
        let lead = self.leading_order();
        let targets: Vec<JetVar> =
            e.jet_vars().into_iter().filter(|j| j.dep == dep && j.t_order as usize >= lead).collect();
        if targets.is_empty() {
            return Ok(e.clone());
        }
        let mut bindings = Vec::with_capacity(targets.len());
        for j in targets {
            bindings.push((Indet::Jet(j), self.reduced_jet(j.t_order as usize, j.x_order as usize)?));
        }
        e.substitute(&bindings)
    }

    /// Eliminates every jet coordinate at or above the leading `t`-order.
    pub fn reduce(&self, e: &JetExpr) -> Result<JetExpr> {
        self.substitute_reducible(e)
    }
}

/// Maps a potential-level expression to the pressure level: `v_xx`-type
/// coordinates are replaced through the potential equation, then
/// `v_{t^{a+1} x^b}` is renamed to `p_{t^a x^b}`. Fails if `v` or `v_x`
/// derivatives without a `t` remain.
pub fn to_westervelt(e: &JetExpr, damped: bool) -> Result<JetExpr> {
    let v = |a, b| jet(Dep::V, a, b);
    let mut cur = e.clone();
    // v_{0,b}, b ≥ 2, via v_xx = (1 − 2βv_t)v_tt − αv_ttt
    let vxx = {
        let base = (1 - 2 * beta() * v(1, 0)) * v(2, 0);
        if damped {
            base - alpha() * v(3, 0)
        } else {
            base
        }
    };
    loop {
        let pure_x: Vec<JetVar> =
            cur.jet_vars().into_iter().filter(|j| j.dep == Dep::V && j.t_order == 0 && j.x_order >= 2).collect();
        if pure_x.is_empty() {
            break;
        }
        let mut bindings = Vec::new();
        for j in pure_x {
            let mut r = vxx.clone();
            for _ in 2..j.x_order {
                r = total_derivative(&r, &Frame::standard(), Dir::X)?;
            }
            bindings.push((Indet::Jet(j), r));
        }
        cur = cur.substitute(&bindings)?;
    }
    let mut bindings = Vec::new();
    for j in cur.jet_vars() {
        if j.dep != Dep::V {
            continue;
        }
        if j.t_order == 0 {
            return Err(Error::Nonlocal(j.to_string()));
        }
        bindings.push((Indet::Jet(j), jet(Dep::P, j.t_order - 1, j.x_order)));
    }
    cur.substitute(&bindings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetspace::{p, v};

    #[test]
    fn rewrite_rules_solve_their_residuals() {
        for name in EquationName::ALL {
            let eq = EquationSpec::get(name);
            let r = eq.residual.substitute(&[(Indet::Jet(eq.leading), eq.rewrite.clone())]).unwrap();
            assert!(r.is_zero(), "{name}");
            assert!(eq.rewrite.jet_vars().iter().all(|j| j.dep != eq.dep() || j.t_order < eq.leading.t_order));
        }
    }

    #[test]
    fn reduction_examples() {
        let wu = EquationSpec::get(EquationName::WesterveltUndamped);
        let expect = (2 * beta() * p(1, 0) * p(1, 0) + p(0, 2)) / (1 - 2 * beta() * p(0, 0));
        assert_eq!(wu.reduce(&p(2, 0)).unwrap(), expect);
        let pu = EquationSpec::get(EquationName::PotentialUndamped);
        assert_eq!(pu.reduce(&v(2, 0)).unwrap(), v(0, 2) / (1 - 2 * beta() * v(1, 0)));
        let wd = EquationSpec::get(EquationName::WesterveltDamped);
        let expect = ((1 - 2 * beta() * p(0, 0)) * p(2, 0) - 2 * beta() * p(1, 0) * p(1, 0) - p(0, 2)) / alpha();
        assert_eq!(wd.reduce(&p(3, 0)).unwrap(), expect);
    }

    #[test]
    fn reduction_is_idempotent_and_consistent() {
        let wu = EquationSpec::get(EquationName::WesterveltUndamped);
        let e = p(3, 1) * p(0, 0) + p(2, 2);
        let r = wu.reduce(&e).unwrap();
        assert!(wu.reduce(&r).unwrap().structurally_eq(&r));
        // the residual's derivatives vanish on-shell
        let d = total_derivative(&wu.residual, &Frame::standard(), Dir::T).unwrap();
        let d = total_derivative(&d, &Frame::standard(), Dir::X).unwrap();
        assert!(wu.reduce(&d).unwrap().is_zero());
    }

    #[test]
    fn pressure_level_rename() {
        assert!(to_westervelt(&v(2, 0), false).unwrap().structurally_eq(&p(1, 0)));
        assert!(matches!(to_westervelt(&v(0, 1), false), Err(Error::Nonlocal(_))));
        let e = to_westervelt(&v(0, 2), false).unwrap();
        assert_eq!(e, (1 - 2 * beta() * p(0, 0)) * p(1, 0));
    }
}
