//! Recursion operators, the Jacobian |J| and the linearizing contact map.

use serde::Serialize;

use super::inv;
use crate::calculus::{dt, equation::to_westervelt, total_derivative, Dir, Frame};
use crate::error::Result;
use crate::jetspace::{beta, jet, p, t, v, x, Dep, Indet, JetExpr};

/// `|J| = v_tt v_xx − v_tx²`.
pub fn jacobian_potential() -> JetExpr {
    v(2, 0) * v(0, 2) - v(1, 1) * v(1, 1)
}

/// `|J|` on solutions, in pressure variables: `(1 − 2βp)p_t² − p_x²`.
pub fn jacobian_westervelt() -> JetExpr {
    (1 - 2 * beta() * p(0, 0)) * p(1, 0) * p(1, 0) - p(0, 1) * p(0, 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecursionKind {
    XTranslation,
    Dilation,
    WesterveltLifted,
}

/// `denom⁻¹ (coeff_t D_t + coeff_x D_x)`.
#[derive(Clone, Debug)]
pub struct RecursionOp {
    pub kind: RecursionKind,
    pub coeff_t: JetExpr,
    pub coeff_x: JetExpr,
    pub denom: JetExpr,
}

impl RecursionOp {
    pub fn x_translation() -> RecursionOp {
        RecursionOp {
            kind: RecursionKind::XTranslation,
            coeff_t: v(1, 1),
            coeff_x: -v(2, 0),
            denom: jacobian_potential(),
        }
    }

    pub fn dilation() -> RecursionOp {
        let c = inv(beta()) - 2 * v(1, 0);
        RecursionOp {
            kind: RecursionKind::Dilation,
            coeff_t: -(3 * v(0, 1) * v(1, 1) + &c * v(0, 2)),
            coeff_x: 3 * v(0, 1) * v(2, 0) + &c * v(1, 1),
            denom: jacobian_potential(),
        }
    }

    /// Pressure-level operator `D_t |J|⁻¹ (p_x D_t − p_t D_x) D_t⁻¹`; the
    /// stored coefficients are those of the middle factor.
    pub fn westervelt_lifted() -> RecursionOp {
        RecursionOp {
            kind: RecursionKind::WesterveltLifted,
            coeff_t: p(0, 1),
            coeff_x: -p(1, 0),
            denom: jacobian_westervelt(),
        }
    }

    pub fn all() -> Vec<RecursionOp> {
        vec![RecursionOp::x_translation(), RecursionOp::dilation(), RecursionOp::westervelt_lifted()]
    }

    pub fn id(&self) -> &'static str {
        match self.kind {
            RecursionKind::XTranslation => "x_translation",
            RecursionKind::Dilation => "dilation",
            RecursionKind::WesterveltLifted => "westervelt_lifted",
        }
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            RecursionKind::XTranslation => "inherited from translation in x* of the linear wave equation",
            RecursionKind::Dilation => "inherited from the dilation of the linear wave equation",
            RecursionKind::WesterveltLifted => "prolongation of the x-translation operator to the pressure",
        }
    }

    fn apply_once(&self, e: &JetExpr) -> Result<JetExpr> {
        let f = Frame::standard();
        let a = &self.coeff_t * total_derivative(e, &f, Dir::T)?;
        let b = &self.coeff_x * total_derivative(e, &f, Dir::X)?;
        (a + b).try_div(&self.denom)
    }

    /// `R^k(e)`. For the lifted operator `e` is the potential-level preimage
    /// `D_t⁻¹P` and the result is the pressure-level image on solutions.
    pub fn apply(&self, e: &JetExpr, k: usize) -> Result<JetExpr> {
        if self.kind == RecursionKind::WesterveltLifted {
            let pv = RecursionOp::x_translation().apply(e, k)?;
            return to_westervelt(&dt(&pv)?, false);
        }
        let mut out = e.clone();
        for _ in 0..k {
            out = self.apply_once(&out)?;
        }
        Ok(out)
    }
}

/// Contact transformation `(t, x, v, v_t, v_x) ↔ (t*, x*, v*, v*_t*, v*_x*)`.
#[derive(Clone, Debug)]
pub struct ContactMap {
    pub forward: [JetExpr; 5],
    pub inverse: [JetExpr; 5],
}

impl ContactMap {
    /// Source coordinates of the forward map, in component order.
    pub fn source_coords() -> [Indet; 5] {
        [Indet::T, Indet::X, v_ind(0, 0), v_ind(1, 0), v_ind(0, 1)]
    }

    /// Target coordinates (those of the linear wave equation).
    pub fn target_coords() -> [Indet; 5] {
        let s = |a, b| Indet::Jet(crate::jetspace::JetVar::at(Dep::VStar, a, b));
        [Indet::TStar, Indet::XStar, s(0, 0), s(1, 0), s(0, 1)]
    }
}

fn v_ind(a: u8, b: u8) -> Indet {
    Indet::Jet(crate::jetspace::JetVar::at(Dep::V, a, b))
}

pub fn contact_map() -> ContactMap {
    let vs = |a, b| jet(Dep::VStar, a, b);
    let ts = JetExpr::var(Indet::TStar);
    let xs = JetExpr::var(Indet::XStar);
    ContactMap {
        forward: [v(1, 0), v(0, 1), v(0, 0) - t() * v(1, 0) - x() * v(0, 1), -t(), -x()],
        inverse: [-vs(1, 0), -vs(0, 1), vs(0, 0) - &ts * vs(1, 0) - &xs * vs(0, 1), ts, xs],
    }
}
