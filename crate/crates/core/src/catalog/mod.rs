//! Machine-readable encodings of the symmetries, multipliers, conserved
//! currents, recursion operators and transformations of the Westervelt and
//! potential equations.

mod currents;
mod maps;
mod symmetries;

pub use currents::{
    get_currents, instantiate_f_current, lagrangian, multipliers, printed_integrals, printed_variants, t6_phi6,
    ConservedCurrent, CurrentCheck, IntegralDensity, Multiplier,
};
pub use maps::{contact_map, jacobian_potential, jacobian_westervelt, ContactMap, RecursionKind, RecursionOp};
pub use symmetries::{get_symmetries, hierarchy, SymmetryChar};

use serde::Serialize;

use crate::calculus::EquationName;
use crate::jetspace::{beta, frac, v, JetExpr};

/// `βv_t − 1/2`, the combination that recurs in the potential currents.
pub(crate) fn w() -> JetExpr {
    beta() * v(1, 0) - frac(1, 2)
}

pub(crate) fn inv(e: JetExpr) -> JetExpr {
    e.recip().expect("nonzero catalog denominator")
}

#[derive(Serialize)]
struct DumpEntry {
    kind: &'static str,
    id: String,
    equation: EquationName,
    expressions: Vec<(String, String)>,
    tag: String,
}

/// Every catalog entry as JSON (expressions in the jetspace text syntax).
pub fn dump_json() -> String {
    let mut out = Vec::new();
    for name in EquationName::ALL {
        for s in get_symmetries(name).unwrap_or_default() {
            out.push(DumpEntry {
                kind: "symmetry",
                id: s.id.clone(),
                equation: s.equation,
                expressions: vec![("P".into(), s.expr.to_string())],
                tag: s.tag.clone(),
            });
        }
    }
    for s in hierarchy() {
        out.push(DumpEntry {
            kind: "symmetry",
            id: s.id.clone(),
            equation: s.equation,
            expressions: vec![("P".into(), s.expr.to_string())],
            tag: s.tag.clone(),
        });
    }
    for m in multipliers() {
        out.push(DumpEntry {
            kind: "multiplier",
            id: m.id.clone(),
            equation: m.equation,
            expressions: vec![("Q".into(), m.expr.to_string())],
            tag: m.tag.clone(),
        });
    }
    for name in EquationName::ALL {
        for c in get_currents(name).unwrap_or_default() {
            out.push(DumpEntry {
                kind: "current",
                id: c.id.clone(),
                equation: c.equation,
                expressions: vec![
                    ("Q".into(), c.q.as_ref().map(|q| q.to_string()).unwrap_or_default()),
                    ("T".into(), c.t.to_string()),
                    ("Phi".into(), c.phi.to_string()),
                ],
                tag: c.tag.clone(),
            });
        }
    }
    for r in RecursionOp::all() {
        out.push(DumpEntry {
            kind: "recursion_operator",
            id: r.id().into(),
            equation: EquationName::PotentialUndamped,
            expressions: vec![
                ("coeff_t".into(), r.coeff_t.to_string()),
                ("coeff_x".into(), r.coeff_x.to_string()),
                ("denom".into(), r.denom.to_string()),
            ],
            tag: r.tag().into(),
        });
    }
    let cm = contact_map();
    let names = ["t*", "x*", "v*", "v*_t*", "v*_x*"];
    out.push(DumpEntry {
        kind: "contact_map",
        id: "contact.forward".into(),
        equation: EquationName::PotentialUndamped,
        expressions: names.iter().zip(cm.forward.iter()).map(|(n, e)| (n.to_string(), e.to_string())).collect(),
        tag: "contact transformation to the linear wave equation".into(),
    });
    let inames = ["t", "x", "v", "v_t", "v_x"];
    out.push(DumpEntry {
        kind: "contact_map",
        id: "contact.inverse".into(),
        equation: EquationName::LinearWave,
        expressions: inames.iter().zip(cm.inverse.iter()).map(|(n, e)| (n.to_string(), e.to_string())).collect(),
        tag: "inverse contact transformation".into(),
    });
    out.push(DumpEntry {
        kind: "lagrangian",
        id: "lagrangian".into(),
        equation: EquationName::PotentialUndamped,
        expressions: vec![("L".into(), lagrangian().to_string())],
        tag: "Lagrangian of the undamped potential equation".into(),
    });
    for d in printed_integrals() {
        out.push(DumpEntry {
            kind: "integral",
            id: d.id,
            equation: EquationName::PotentialUndamped,
            expressions: vec![("density".into(), d.density.to_string())],
            tag: d.tag,
        });
    }
    serde_json::to_string_pretty(&out).expect("catalog serializes")
}
