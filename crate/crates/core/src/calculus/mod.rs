//! Jet-space differential operators.

pub mod equation;
mod operator;

pub use equation::{to_westervelt, EquationName, EquationSpec};
pub use operator::LinearDiffOp;

use crate::error::Result;
use crate::jetspace::{DVar, Dep, Indet, JetExpr, JetVar};

/// Independent variables and the dependents whose jets shift under total
/// differentiation. `t` is the first direction, `x` the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub t: Indet,
    pub x: Option<Indet>,
    pub deps: Vec<Dep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    T,
    X,
}

impl Frame {
    /// `(t, x)` with dependents `p` and `v`.
    pub fn standard() -> Frame {
        Frame { t: Indet::T, x: Some(Indet::X), deps: vec![Dep::P, Dep::V] }
    }

    /// `(t*, x*)` with dependent `v*`.
    pub fn star() -> Frame {
        Frame { t: Indet::TStar, x: Some(Indet::XStar), deps: vec![Dep::VStar] }
    }

    /// The similarity variable `zeta` with profile `V`.
    pub fn similarity() -> Frame {
        Frame { t: Indet::Zeta, x: None, deps: vec![Dep::BigV] }
    }

    /// `f(v_t, v_x)`: the independent variables are the jet coordinates
    /// `v[1,0]`, `v[0,1]` and `f[a,b]` is the mixed partial of `f`.
    pub fn f_frame() -> Frame {
        Frame {
            t: Indet::Jet(JetVar::at(Dep::V, 1, 0)),
            x: Some(Indet::Jet(JetVar::at(Dep::V, 0, 1))),
            deps: vec![Dep::F],
        }
    }

    fn explicit(&self, dir: Dir) -> Option<Indet> {
        match dir {
            Dir::T => Some(self.t),
            Dir::X => self.x,
        }
    }
}

/// `D_t e` or `D_x e` in the given frame.
pub fn total_derivative(e: &JetExpr, frame: &Frame, dir: Dir) -> Result<JetExpr> {
    let explicit = frame.explicit(dir).map(|v| v.id());
    e.derive(&|id| {
        if Some(id) == explicit {
            return Ok(DVar::One);
        }
        match Indet::from_id(id) {
            Indet::Jet(j) if frame.deps.contains(&j.dep) => {
                let s = match dir {
                    Dir::T => j.shifted(1, 0)?,
                    Dir::X => j.shifted(0, 1)?,
                };
                Ok(DVar::Var(Indet::Jet(s).id()))
            }
            _ => Ok(DVar::Zero),
        }
    })
}

pub fn dt(e: &JetExpr) -> Result<JetExpr> {
    total_derivative(e, &Frame::standard(), Dir::T)
}

pub fn dx(e: &JetExpr) -> Result<JetExpr> {
    total_derivative(e, &Frame::standard(), Dir::X)
}

/// `D_t^a D_x^b e`.
pub fn total_derivative_n(e: &JetExpr, frame: &Frame, a: usize, b: usize) -> Result<JetExpr> {
    let mut out = e.clone();
    for _ in 0..a {
        out = total_derivative(&out, frame, Dir::T)?;
    }
    for _ in 0..b {
        out = total_derivative(&out, frame, Dir::X)?;
    }
    Ok(out)
}

/// Jet coordinates of `dep` present in `e`, as `(t_order, x_order)`.
pub fn jet_orders(e: &JetExpr, dep: Dep) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = e
        .jet_vars()
        .into_iter()
        .filter(|j| j.dep == dep)
        .map(|j| (j.t_order as usize, j.x_order as usize))
        .collect();
    v.sort_unstable();
    v
}

fn jet_indet(dep: Dep, a: usize, b: usize) -> Indet {
    Indet::Jet(JetVar::at(dep, a as u8, b as u8))
}

/// Higher Euler operator with respect to `w_{t^a0}`:
/// `Σ_{a ≥ a0, b} (−D_t)^{a−a0} (−D_x)^b ∂e/∂w_{a,b}`.
/// With `a0 = 0` this is the variational derivative `E_w`.
pub fn euler_wrt(e: &JetExpr, frame: &Frame, dep: Dep, a0: usize) -> Result<JetExpr> {
    let orders: Vec<(usize, usize)> = jet_orders(e, dep).into_iter().filter(|&(a, _)| a >= a0).collect();
    if orders.is_empty() {
        return Ok(JetExpr::zero());
    }
    let max_b = orders.iter().map(|&(_, b)| b).max().unwrap();
    // Horner nesting: inner sums over t-order, outer over x-order
    let mut outer = JetExpr::zero();
    for b in (0..=max_b).rev() {
        let mut col: Vec<usize> = orders.iter().filter(|&&(_, bb)| bb == b).map(|&(a, _)| a).collect();
        col.sort_unstable();
        let mut inner = JetExpr::zero();
        if let Some(&amax) = col.last() {
            for a in (a0..=amax).rev() {
                let d = if col.contains(&a) { e.partial(jet_indet(dep, a, b)) } else { JetExpr::zero() };
                inner = if inner.is_zero() { d } else { d - total_derivative(&inner, frame, Dir::T)? };
            }
        }
        outer = if outer.is_zero() {
            inner
        } else {
            inner - total_derivative(&outer, frame, Dir::X)?
        };
    }
    Ok(outer)
}

/// Variational derivative `E_w(e)`.
pub fn euler_operator(e: &JetExpr, frame: &Frame, dep: Dep) -> Result<JetExpr> {
    euler_wrt(e, frame, dep, 0)
}

/// Frechet derivative of `e` in the direction `p`: `Σ (D^J p) ∂e/∂w_J`.
pub fn prolong_evolutionary(p: &JetExpr, e: &JetExpr, frame: &Frame, dep: Dep) -> Result<JetExpr> {
    let orders = jet_orders(e, dep);
    let mut terms = Vec::with_capacity(orders.len());
    let mut cache: rustc_hash::FxHashMap<(usize, usize), JetExpr> = Default::default();
    cache.insert((0, 0), p.clone());
    for &(a, b) in &orders {
        let dp = derivative_cached(&mut cache, frame, a, b)?;
        terms.push(dp * e.partial(jet_indet(dep, a, b)));
    }
    Ok(JetExpr::sum(terms))
}

fn derivative_cached(
    cache: &mut rustc_hash::FxHashMap<(usize, usize), JetExpr>,
    frame: &Frame,
    a: usize,
    b: usize,
) -> Result<JetExpr> {
    if let Some(v) = cache.get(&(a, b)) {
        return Ok(v.clone());
    }
    let v = if b > 0 {
        total_derivative(&derivative_cached(cache, frame, a, b - 1)?, frame, Dir::X)?
    } else {
        total_derivative(&derivative_cached(cache, frame, a - 1, 0)?, frame, Dir::T)?
    };
    cache.insert((a, b), v.clone());
    Ok(v)
}

/// Antiderivative with respect to an indeterminate, zero integration constant.
pub fn antiderivative(e: &JetExpr, var: Indet) -> Result<JetExpr> {
    let coeffs = e.coefficients_in(var)?;
    let v = JetExpr::var(var);
    let mut terms = Vec::with_capacity(coeffs.len());
    let mut pw = v.clone();
    for (k, c) in coeffs.into_iter().enumerate() {
        if !c.is_zero() {
            terms.push(c * &pw * JetExpr::frac(1, k as i64 + 1));
        }
        pw = &pw * &v;
    }
    Ok(JetExpr::sum(terms))
}

/// Antiderivative with respect to a jet coordinate (e.g. `∫ … dv_t`).
pub fn t_antiderivative(e: &JetExpr, var: JetVar) -> Result<JetExpr> {
    antiderivative(e, Indet::Jet(var))
}
