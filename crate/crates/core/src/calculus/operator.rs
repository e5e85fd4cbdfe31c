//! Linear total-differential operators `Σ c_{a,b} D_t^a D_x^b`.

use std::collections::BTreeMap;

use super::{jet_orders, total_derivative_n, Frame};
use crate::error::Result;
use crate::jetspace::{Dep, Indet, JetExpr, JetVar};

#[derive(Clone, Debug, Default)]
pub struct LinearDiffOp {
    terms: BTreeMap<(usize, usize), JetExpr>,
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

impl LinearDiffOp {
    pub fn new(terms: impl IntoIterator<Item = (JetExpr, usize, usize)>) -> LinearDiffOp {
        let mut op = LinearDiffOp::default();
        for (c, a, b) in terms {
            op.add_term(c, a, b);
        }
        op
    }

    fn add_term(&mut self, c: JetExpr, a: usize, b: usize) {
        let slot = self.terms.entry((a, b)).or_insert_with(JetExpr::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JetExpr, usize, usize)> {
        self.terms.iter().map(|((a, b), c)| (c, *a, *b))
    }

    pub fn coefficient(&self, a: usize, b: usize) -> JetExpr {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(JetExpr::zero)
    }

    /// Frechet derivative of `e` with respect to `dep`.
    pub fn frechet(e: &JetExpr, dep: Dep) -> LinearDiffOp {
        LinearDiffOp::new(
            jet_orders(e, dep)
                .into_iter()
                .map(|(a, b)| (e.partial(Indet::Jet(JetVar::at(dep, a as u8, b as u8))), a, b)),
        )
    }

    pub fn apply(&self, f: &JetExpr, frame: &Frame) -> Result<JetExpr> {
        let mut parts = Vec::new();
        for ((a, b), c) in &self.terms {
            parts.push(c * total_derivative_n(f, frame, *a, *b)?);
        }
        Ok(JetExpr::sum(parts))
    }

    /// `L*` with `L* f = Σ (−D_t)^a (−D_x)^b (c f)`, expanded by Leibniz.
    pub fn formal_adjoint(&self, frame: &Frame) -> Result<LinearDiffOp> {
        let mut out = LinearDiffOp::default();
        for ((a, b), c) in &self.terms {
            let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
            for i in 0..=*a {
                for j in 0..=*b {
                    let dc = total_derivative_n(c, frame, a - i, b - j)?;
                    out.add_term(dc * (sign * binom(*a, i) * binom(*b, j)), i, j);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LinearDiffOp) -> LinearDiffOp {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(-c, *a, *b);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Operators agree coefficient by coefficient.
    pub fn equals(&self, other: &LinearDiffOp) -> bool {
        self.sub(other).is_zero()
    }

    /// Coefficient differences, for reporting a failed comparison.
    pub fn residual_terms(&self, other: &LinearDiffOp) -> Vec<(usize, usize, JetExpr)> {
        self.sub(other).terms.into_iter().map(|((a, b), c)| (a, b, c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{dt, Frame};
    use crate::jetspace::{beta, v};

    fn fr() -> Frame {
        Frame::standard()
    }

    #[test]
    fn adjoint_examples() {
        let dtt = LinearDiffOp::new([(JetExpr::one(), 2, 0)]);
        assert!(dtt.formal_adjoint(&fr()).unwrap().equals(&dtt));
        let d3 = LinearDiffOp::new([(JetExpr::one(), 3, 0)]);
        let neg = LinearDiffOp::new([(JetExpr::int(-1), 3, 0)]);
        assert!(d3.formal_adjoint(&fr()).unwrap().equals(&neg));
        let g = (1 - 2 * beta() * v(1, 0)) * v(2, 0) - v(0, 2);
        let l = LinearDiffOp::frechet(&g, Dep::V);
        assert!(l.formal_adjoint(&fr()).unwrap().equals(&l));
    }

    #[test]
    fn frechet_matches_directional_derivative() {
        let g = (1 - 2 * beta() * v(1, 0)) * v(2, 0) - v(0, 2);
        let l = LinearDiffOp::frechet(&g, Dep::V);
        let dir = v(0, 1) * v(1, 0);
        let a = l.apply(&dir, &fr()).unwrap();
        let b = crate::calculus::prolong_evolutionary(&dir, &g, &fr(), Dep::V).unwrap();
        assert_eq!(a, b);
        let _ = dt(&a).unwrap();
    }
}
