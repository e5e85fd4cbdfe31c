//! Symmetry characteristics.

use serde::Serialize;

use super::maps::{jacobian_potential, jacobian_westervelt, RecursionOp};
use super::inv;
use crate::calculus::EquationName;
use crate::error::Result;
use crate::jetspace::{beta, jet, p, t, v, x, Dep, Indet, JetExpr};

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryChar {
    pub id: String,
    pub equation: EquationName,
    #[serde(serialize_with = "crate::catalog::currents::ser_expr")]
    pub expr: JetExpr,
    pub order: usize,
    pub local: bool,
    pub undamped_only: bool,
    pub tag: String,
}

impl SymmetryChar {
    pub(crate) fn new(id: &str, equation: EquationName, expr: JetExpr, undamped_only: bool, tag: &str) -> SymmetryChar {
        let order = expr.jet_vars().iter().map(|j| j.order()).max().unwrap_or(0);
        SymmetryChar { id: id.into(), equation, expr, order, local: true, undamped_only, tag: tag.into() }
    }

    /// The equation the characteristic is checked against.
    pub fn check_equation(&self) -> EquationName {
        match (self.equation, self.undamped_only) {
            (EquationName::WesterveltDamped, true) => EquationName::WesterveltUndamped,
            (EquationName::PotentialDamped, true) => EquationName::PotentialUndamped,
            (e, _) => e,
        }
    }
}

pub fn get_symmetries(eq: EquationName) -> Result<Vec<SymmetryChar>> {
    use EquationName::*;
    let b = beta;
    Ok(match eq {
        WesterveltDamped | WesterveltUndamped => vec![
            SymmetryChar::new("P1", WesterveltDamped, -p(1, 0), false, "time translation"),
            SymmetryChar::new("P2", WesterveltDamped, -p(0, 1), false, "space translation"),
            SymmetryChar::new(
                "P3",
                WesterveltDamped,
                1 - 2 * b() * p(0, 0) - 2 * b() * t() * p(1, 0) - 3 * b() * x() * p(0, 1),
                false,
                "scaling combined with a shift",
            ),
            SymmetryChar::new("P4", WesterveltDamped, -(t() * p(1, 0)) - x() * p(0, 1), true, "dilation"),
        ],
        PotentialDamped | PotentialUndamped => vec![
            SymmetryChar::new("Pv1", PotentialDamped, JetExpr::one(), false, "shift of v"),
            SymmetryChar::new("Pv2", PotentialDamped, x(), false, "x-dependent shift of v"),
            SymmetryChar::new("Pv3", PotentialDamped, -v(1, 0), false, "time translation"),
            SymmetryChar::new("Pv4", PotentialDamped, -v(0, 1), false, "space translation"),
            SymmetryChar::new(
                "Pv5",
                PotentialDamped,
                t() - 2 * b() * t() * v(1, 0) - 3 * b() * x() * v(0, 1),
                false,
                "scaling combined with a shift",
            ),
            SymmetryChar::new("Pv6", PotentialDamped, v(0, 0) - t() * v(1, 0) - x() * v(0, 1), true, "dilation"),
        ],
        LinearWave => {
            let vs = |a, c| jet(Dep::VStar, a, c);
            let ts = JetExpr::var(Indet::TStar);
            let xs = JetExpr::var(Indet::XStar);
            vec![
                SymmetryChar::new("Ls1", LinearWave, -vs(0, 1), false, "translation in x*"),
                SymmetryChar::new("Ls2", LinearWave, vs(0, 0), false, "linear scaling of v*"),
                SymmetryChar::new(
                    "Ls3",
                    LinearWave,
                    -((2 * &ts - inv(beta())) * vs(1, 0)) - 3 * xs * vs(0, 1),
                    false,
                    "dilation of x* and t* - 1/(2 beta)",
                ),
            ]
        }
        FEquation => Vec::new(),
    })
}

/// Hierarchy members generated by the recursion operators.
pub fn hierarchy() -> Vec<SymmetryChar> {
    use EquationName::*;
    let b = beta;
    let jv = jacobian_potential();
    let jw = jacobian_westervelt();
    let w = 1 - 2 * b() * p(0, 0);
    let r = RecursionOp::x_translation();
    let pv5p1 = ((1 - 2 * b() * v(1, 0)) * v(1, 1) + 3 * b() * v(0, 1) * v(2, 0)) / &jv;
    let pv5p2 = r.apply(&pv5p1, 1).expect("recursion within the order cap");
    let pv63 = (v(1, 1).powi(3).unwrap() * v(3, 0) - 3 * v(2, 0) * v(1, 1) * v(1, 1) * v(2, 1)
        + 3 * v(2, 0) * v(2, 0) * v(1, 1) * v(1, 2)
        - v(2, 0).powi(3).unwrap() * v(0, 3))
        * jv.powi(-3).unwrap();
    let p1 = ((&w * p(1, 0) * p(1, 0) + p(0, 1) * p(0, 1)) * p(2, 0) - 2 * p(1, 0) * p(0, 1) * p(1, 1)
        - 2 * b() * p(1, 0).powi(4).unwrap())
        * jw.powi(-2).unwrap();
    let a = &w * p(1, 0) * p(1, 0);
    let px = p(0, 1);
    let pt = p(1, 0);
    let p2 = (&px * (3 * &a + &px * &px) * p(3, 0) - &pt * (&a + 3 * &px * &px) * p(2, 1)) * jw.powi(-3).unwrap()
        + (-12 * &pt * &px * (&a + &px * &px) * (&w * p(2, 0) * p(2, 0) + p(1, 1) * p(1, 1))
            + 6 * (&w * &w * pt.powi(4).unwrap() + 6 * &a * &px * &px + px.powi(4).unwrap()) * p(1, 1) * p(2, 0)
            + 4 * b() * pt.powi(3).unwrap() * &px * (5 * &a + 7 * &px * &px) * p(2, 0)
            - 8 * pt.powi(4).unwrap() * b() * (&a + 5 * &px * &px) * p(1, 1)
            - 24 * b() * b() * pt.powi(7).unwrap() * &px)
            * jw.powi(-4).unwrap();
    vec![
        SymmetryChar::new("Pv5'", PotentialUndamped, t() - 3 * b() * v(0, 0) + b() * t() * v(1, 0), true, "Pv5 - 3 beta Pv6"),
        SymmetryChar::new("Pv6_(2)", PotentialUndamped, -v(2, 0) / &jv, true, "second member of the Pv6 hierarchy"),
        SymmetryChar::new("Pv5'_(1)", PotentialUndamped, pv5p1, true, "first member of the Pv5' hierarchy"),
        SymmetryChar::new("Pv5'_(2)", PotentialUndamped, pv5p2, true, "second member of the Pv5' hierarchy (computed)"),
        SymmetryChar::new("Pv6_(3)", PotentialUndamped, pv63, true, "third member of the Pv6 hierarchy"),
        SymmetryChar::new("P_(1)", WesterveltUndamped, p1, true, "second-order local symmetry"),
        SymmetryChar::new("P_(2)'", WesterveltUndamped, p2, true, "third-order local symmetry"),
    ]
}
