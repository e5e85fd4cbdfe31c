//! Multipliers, conserved currents and the Lagrangian.

use serde::{Serialize, Serializer};

use super::{inv, w};
use crate::calculus::{t_antiderivative, EquationName};
use crate::error::{Error, Result};
use crate::jetspace::{alpha, beta, frac, p, t, v, x, Dep, Indet, JetExpr, JetVar};

pub(crate) fn ser_expr<S: Serializer>(e: &JetExpr, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

/// How a current is checked: as an off-shell multiplier identity, or as a
/// divergence that vanishes on solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurrentCheck {
    OffShell,
    OnShell,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservedCurrent {
    pub id: String,
    pub equation: EquationName,
    #[serde(serialize_with = "ser_opt")]
    pub q: Option<JetExpr>,
    #[serde(serialize_with = "ser_expr")]
    pub t: JetExpr,
    #[serde(serialize_with = "ser_expr")]
    pub phi: JetExpr,
    pub undamped_only: bool,
    pub check: CurrentCheck,
    pub tag: String,
}

fn ser_opt<S: Serializer>(e: &Option<JetExpr>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match e {
        Some(e) => s.serialize_str(&e.to_string()),
        None => s.serialize_none(),
    }
}

impl ConservedCurrent {
    fn off(id: &str, eq: EquationName, q: JetExpr, t: JetExpr, phi: JetExpr, undamped: bool, tag: &str) -> Self {
        ConservedCurrent {
            id: id.into(),
            equation: eq,
            q: Some(q),
            t,
            phi,
            undamped_only: undamped,
            check: CurrentCheck::OffShell,
            tag: tag.into(),
        }
    }

    fn on(id: &str, eq: EquationName, t: JetExpr, phi: JetExpr, tag: &str) -> Self {
        ConservedCurrent {
            id: id.into(),
            equation: eq,
            q: None,
            t,
            phi,
            undamped_only: true,
            check: CurrentCheck::OnShell,
            tag: tag.into(),
        }
    }

    /// The equation the current is checked against.
    pub fn check_equation(&self) -> EquationName {
        match (self.equation, self.undamped_only) {
            (EquationName::WesterveltDamped, true) => EquationName::WesterveltUndamped,
            (EquationName::PotentialDamped, true) => EquationName::PotentialUndamped,
            (e, _) => e,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Multiplier {
    pub id: String,
    pub equation: EquationName,
    #[serde(serialize_with = "ser_expr")]
    pub expr: JetExpr,
    pub undamped_only: bool,
    pub tag: String,
}

impl Multiplier {
    fn new(id: &str, equation: EquationName, expr: JetExpr, undamped_only: bool, tag: &str) -> Self {
        Multiplier { id: id.into(), equation, expr, undamped_only, tag: tag.into() }
    }

    pub fn check_equation(&self) -> EquationName {
        match (self.equation, self.undamped_only) {
            (EquationName::WesterveltDamped, true) => EquationName::WesterveltUndamped,
            (EquationName::PotentialDamped, true) => EquationName::PotentialUndamped,
            (e, _) => e,
        }
    }
}

fn j5() -> JetExpr {
    p(0, 1) * p(0, 1) - (1 - 2 * beta() * p(0, 0)) * p(1, 0) * p(1, 0)
}

pub(crate) fn q5() -> JetExpr {
    2 * p(1, 0) * p(0, 1) * j5().powi(-2).unwrap()
}

pub(crate) fn qv3() -> JetExpr {
    2 * t() / beta() + v(0, 0) - 5 * t() * v(1, 0) - 7 * x() * v(0, 1)
}

pub(crate) fn qv4() -> JetExpr {
    (2 * t() / beta() + v(0, 0) - 5 * t() * v(1, 0)) * v(0, 1)
        - 4 * x() * (v(0, 1) * v(0, 1) - frac(2, 3) / (beta() * beta()) * w().powi(3).unwrap())
}

pub fn multipliers() -> Vec<Multiplier> {
    use EquationName::*;
    vec![
        Multiplier::new("Q1", WesterveltDamped, JetExpr::one(), false, "mass flux"),
        Multiplier::new("Q2", WesterveltDamped, x(), false, "x-weighted mass flux"),
        Multiplier::new("Q3", WesterveltDamped, t(), false, "net displaced mass"),
        Multiplier::new("Q4", WesterveltDamped, t() * x(), false, "x-weighted net displaced mass"),
        Multiplier::new("Q5", WesterveltDamped, q5(), true, "first-order multiplier, undamped"),
        Multiplier::new("Qv1", PotentialDamped, JetExpr::one(), false, "inherited from Q3"),
        Multiplier::new("Qv2", PotentialDamped, x(), false, "inherited from Q4"),
        Multiplier::new("Qv3", PotentialDamped, qv3(), true, "dilational energy"),
        Multiplier::new("Qv4", PotentialDamped, qv4(), true, "dilational momentum"),
        Multiplier::new("Qv5a", PotentialDamped, v(1, 0) - inv(2 * beta()), true, "energy"),
        Multiplier::new("Qv5b", PotentialDamped, v(0, 1), true, "momentum"),
    ]
}

fn pot_t1() -> JetExpr {
    w() * w() / beta() + alpha() * v(2, 0)
}

pub fn get_currents(eq: EquationName) -> Result<Vec<ConservedCurrent>> {
    use EquationName::*;
    let b = beta;
    Ok(match eq {
        WesterveltDamped | WesterveltUndamped => {
            let t1 = (1 - 2 * b() * p(0, 0)) * p(1, 0) - alpha() * p(2, 0);
            let t3 = t() * &t1 - (1 - b() * p(0, 0)) * p(0, 0) + alpha() * p(1, 0);
            let mut out = vec![
                ConservedCurrent::off("C1", WesterveltDamped, JetExpr::one(), t1.clone(), -p(0, 1), false, "mass flux"),
                ConservedCurrent::off(
                    "C2",
                    WesterveltDamped,
                    x(),
                    x() * &t1,
                    p(0, 0) - x() * p(0, 1),
                    false,
                    "x-weighted mass flux",
                ),
                ConservedCurrent::off("C3", WesterveltDamped, t(), t3.clone(), -t() * p(0, 1), false, "net displaced mass"),
                ConservedCurrent::off(
                    "C4",
                    WesterveltDamped,
                    t() * x(),
                    x() * &t3,
                    t() * (p(0, 0) - x() * p(0, 1)),
                    false,
                    "x-weighted net displaced mass",
                ),
                ConservedCurrent::off(
                    "C5",
                    WesterveltDamped,
                    q5(),
                    p(0, 1) / j5(),
                    p(1, 0) / j5(),
                    true,
                    "first-order conservation law, undamped",
                ),
            ];
            let (t6, phi6) = t6_phi6();
            out.push(ConservedCurrent::on("C6", WesterveltUndamped, t6, phi6, "next member of the local hierarchy"));
            out
        }
        PotentialDamped | PotentialUndamped => {
            let w = w;
            let vt2b = v(0, 0) - t() / (2 * b());
            let b2 = || b() * b();
            let tv3 = t() * (frac(10, 3) / b2() * w().powi(3).unwrap() - frac(5, 2) * v(0, 1) * v(0, 1))
                + 7 * x() * w() * w() * v(0, 1) / b()
                - w() * w() * &vt2b / b();
            let phiv3 = 5 * t() * w() * v(0, 1) / b()
                + x() * (frac(7, 2) * v(0, 1) * v(0, 1) - frac(7, 3) / b2() * w().powi(3).unwrap())
                - v(0, 1) * &vt2b;
            let tv4 = t() * (frac(10, 3) / b2() * w().powi(3).unwrap() * v(0, 1) - frac(5, 6) * v(0, 1).powi(3).unwrap())
                + 4 * x() * w() * w() * (v(0, 1) * v(0, 1) - frac(4, 15) / b2() * w().powi(3).unwrap()) / b()
                - w() * w() * v(0, 1) * &vt2b / b();
            let phiv4 = t()
                * (frac(5, 2) * w() * v(0, 1) * v(0, 1) / b() - frac(5, 6) * w().powi(4).unwrap() / b().powi(3).unwrap())
                + x() * (frac(4, 3) * v(0, 1).powi(3).unwrap() - frac(8, 3) / b2() * w().powi(3).unwrap() * v(0, 1))
                + (frac(1, 3) / b2() * w().powi(3).unwrap() - frac(1, 2) * v(0, 1) * v(0, 1)) * &vt2b;
            let jv = super::maps::jacobian_potential();
            let mut out = vec![
                ConservedCurrent::off("Cv1", PotentialDamped, JetExpr::int(-1), pot_t1(), v(0, 1), false, "mass"),
                ConservedCurrent::off(
                    "Cv2",
                    PotentialDamped,
                    -x(),
                    x() * pot_t1(),
                    x() * v(0, 1) - v(0, 0),
                    false,
                    "x-weighted mass",
                ),
                ConservedCurrent::off("Cv3", PotentialDamped, qv3(), tv3, phiv3, true, "dilational energy"),
                ConservedCurrent::off("Cv4", PotentialDamped, qv4(), tv4, phiv4, true, "dilational momentum"),
                ConservedCurrent::off(
                    "Cv5a",
                    PotentialDamped,
                    v(1, 0) - inv(2 * b()),
                    frac(1, 2) * v(0, 1) * v(0, 1) - frac(2, 3) / b2() * w().powi(3).unwrap(),
                    -(v(1, 0) - inv(2 * b())) * v(0, 1),
                    true,
                    "energy",
                ),
                ConservedCurrent::off(
                    "Cv5b",
                    PotentialDamped,
                    v(0, 1),
                    -(w() * w() * v(0, 1)) / b(),
                    frac(1, 3) / b2() * w().powi(3).unwrap() - frac(1, 2) * v(0, 1) * v(0, 1),
                    true,
                    "momentum",
                ),
            ];
            out.push(ConservedCurrent::on(
                "Cv_R3",
                PotentialUndamped,
                v(1, 1) / &jv,
                v(2, 0) / &jv,
                "conservation law of the variational symmetry Pv6_(3)",
            ));
            for (i, f) in f_examples().into_iter().enumerate() {
                let mut c = instantiate_f_current(&f)?;
                c.id = format!("Cv5f.{}", i + 1);
                out.push(c);
            }
            out
        }
        LinearWave | FEquation => Vec::new(),
    })
}

/// Solutions of the f-equation used to instantiate the general current.
pub fn f_examples() -> Vec<JetExpr> {
    vec![
        v(0, 1),
        v(1, 0) - inv(2 * beta()),
        v(0, 1) * v(0, 1) + v(1, 0) * v(1, 0) - frac(2, 3) * beta() * v(1, 0).powi(3).unwrap(),
    ]
}

fn vt() -> JetVar {
    JetVar::at(Dep::V, 1, 0)
}

fn vx() -> JetVar {
    JetVar::at(Dep::V, 0, 1)
}

/// Residual of `f_{v_t v_t} − (1 − 2βv_t) f_{v_x v_x}`.
pub fn f_equation_residual(f: &JetExpr) -> JetExpr {
    let (t, x) = (Indet::Jet(vt()), Indet::Jet(vx()));
    f.partial(t).partial(t) - (1 - 2 * beta() * v(1, 0)) * f.partial(x).partial(x)
}

/// The current with multiplier `f(v_t, v_x)`:
/// `T = ∫(1−2βv_t) f dv_t + C`,
/// `Φ = ∫(1−2βv_t) v_t f_{v_x} dv_t − v_t ∫(1−2βv_t) f_{v_x} dv_t − A − v_t B`,
/// where `A = ∫ f(0,v_x) dv_x`, `B = ∫ f_{v_t}(0,v_x) dv_x`, `C = ∫ B dv_x`.
pub fn instantiate_f_current(f: &JetExpr) -> Result<ConservedCurrent> {
    let allowed = [Indet::Alpha, Indet::Beta, Indet::Jet(vt()), Indet::Jet(vx())];
    if f.var_ids().iter().any(|id| !allowed.iter().any(|a| a.id() == *id)) {
        return Err(Error::FEquation(format!("f must depend on v_t and v_x only, got {f}")));
    }
    let r = f_equation_residual(f);
    if !r.is_zero() {
        return Err(Error::FEquation(r.to_string()));
    }
    let (t_ind, x_ind) = (Indet::Jet(vt()), Indet::Jet(vx()));
    let weight = 1 - 2 * beta() * v(1, 0);
    let fx = f.partial(x_ind);
    let at0 = |e: &JetExpr| e.substitute(&[(t_ind, JetExpr::zero())]);
    let a = crate::calculus::antiderivative(&at0(f)?, x_ind)?;
    let bb = crate::calculus::antiderivative(&at0(&f.partial(t_ind))?, x_ind)?;
    let c = crate::calculus::antiderivative(&bb, x_ind)?;
    let t = t_antiderivative(&(&weight * f), vt())? + c;
    let phi = t_antiderivative(&(&weight * v(1, 0) * &fx), vt())?
        - v(1, 0) * t_antiderivative(&(&weight * &fx), vt())?
        - a
        - v(1, 0) * bb;
    Ok(ConservedCurrent::off(
        "Cv5f",
        EquationName::PotentialDamped,
        f.clone(),
        t,
        phi,
        true,
        "generalized energy-momentum",
    ))
}

/// The f-current with all integration constants set to zero.
pub fn f_current_zero_constants(f: &JetExpr) -> Result<ConservedCurrent> {
    let fx = f.partial(Indet::Jet(vx()));
    let weight = 1 - 2 * beta() * v(1, 0);
    let t = t_antiderivative(&(&weight * f), vt())?;
    let phi = t_antiderivative(&(&weight * v(1, 0) * &fx), vt())? - v(1, 0) * t_antiderivative(&(&weight * &fx), vt())?;
    Ok(ConservedCurrent::off(
        "Cv5f.zero_constants",
        EquationName::PotentialDamped,
        f.clone(),
        t,
        phi,
        true,
        "generalized energy-momentum without integration constants",
    ))
}

/// Printed forms that do not satisfy their divergence identity; kept so the
/// discrepancies stay regression-tested.
pub fn printed_variants() -> Vec<ConservedCurrent> {
    use EquationName::*;
    let b = beta;
    let mut out = vec![
        ConservedCurrent::off(
            "Cv2.printed",
            PotentialDamped,
            -x(),
            x() * (w() * w() + alpha() * v(2, 0)) / b(),
            x() * v(0, 1) - v(0, 0),
            false,
            "x-weighted mass, alpha term divided by beta",
        ),
        ConservedCurrent::off(
            "Cv5b.printed",
            PotentialDamped,
            v(0, 1),
            w() * w() * v(0, 1) / (b() * b()),
            frac(1, 2) * v(0, 1) * v(0, 1) - frac(1, 3) / (b() * b()) * w().powi(3).unwrap(),
            true,
            "momentum with density scaled by 1/beta^2",
        ),
    ];
    if let Ok(c) = f_current_zero_constants(&v(0, 1)) {
        out.push(c);
    }
    out
}

/// The density and flux of the next local conservation law in the hierarchy.
pub fn t6_phi6() -> (JetExpr, JetExpr) {
    let b = beta;
    let ww = 1 - 2 * b() * p(0, 0);
    let (pt, px, ptt, ptx) = (p(1, 0), p(0, 1), p(2, 0), p(1, 1));
    let a = &ww * &pt * &pt;
    let s = &a + &px * &px;
    let pw = |e: &JetExpr, k: i32| e.powi(k).unwrap();
    let d5 = pw(&(&a - &px * &px), -5);
    let k1 = 5 * &s * &s - 4 * pw(&px, 4);
    let k2 = 5 * &s * &s - 4 * &ww * &ww * pw(&pt, 4);
    let red_tt = &ww * &ptt - 2 * b() * &pt * &pt;
    let t6 = frac(1, 2)
        * (&px * &k1 * (&ww * &ptt * &ptt + &ptx * &ptx)
            - 2 * &pt * &k2 * &red_tt * &ptx
            - 8 * b() * &ww * &px * pw(&pt, 4) * (3 * &a + 5 * &px * &px) * &ptt
            + 4 * b() * b() * &px * pw(&pt, 6) * (7 * &a + 5 * &px * &px))
        * &d5
        + 4 * b() * &px * &red_tt / (pw(&ww, 4) * pw(&pt, 4))
        - 8 * b() * &px * &px * (&ww * &ptx - 2 * b() * &px * &pt) / (pw(&ww, 5) * pw(&pt, 5));
    let phi6 = frac(1, 2)
        * (&pt * &k2 * (&ww * &ptt * &ptt + &ptx * &ptx - 4 * b() * &pt * &pt * &ptt)
            - 2 * &px * &k1 * &ptx * &ptt
            + 8 * b() * &px * pw(&pt, 4) * (3 * &a + 5 * &px * &px) * &ptx
            + 4 * b() * b() * pw(&pt, 7) * (&a + 11 * &px * &px))
        * &d5
        - 4 * b() * &px * &ptx / (pw(&ww, 4) * pw(&pt, 4))
        + 8 * b() * &px * &px * &red_tt / (pw(&ww, 5) * pw(&pt, 5));
    (t6, phi6)
}

/// `L = ½(v_x² − v_t²) + (β/3) v_t³`.
pub fn lagrangian() -> JetExpr {
    frac(1, 2) * (v(0, 1) * v(0, 1) - v(1, 0) * v(1, 0)) + beta() * frac(1, 3) * v(1, 0).powi(3).unwrap()
}

/// A printed integral density in potential variables (`p = v_t`).
#[derive(Clone, Debug, Serialize)]
pub struct IntegralDensity {
    pub id: String,
    #[serde(serialize_with = "ser_expr")]
    pub density: JetExpr,
    pub tag: String,
}

/// The energy, momentum and dilational integrands as printed, with
/// `p − 1/(2β) = w/β`.
pub fn printed_integrals() -> Vec<IntegralDensity> {
    let b = beta;
    let pc = || w() / b();
    let vx = || v(0, 1);
    let shift = |k: i64| k * x() * vx() - v(0, 0) + t() / (2 * b());
    let ener = frac(1, 2) * vx() * vx() - frac(2, 3) * b() * pc().powi(3).unwrap();
    let k = t() * &ener - frac(1, 5) * b() * shift(7) * pc() * pc();
    let h = (frac(1, 2) * t() * (vx() * vx() - 4 * b() * pc().powi(3).unwrap())
        - frac(3, 5) * b() * shift(4) * pc() * pc()
        + frac(16, 25) * b() * b() * x() * vx().powi(4).unwrap())
        * vx();
    let mk = |id: &str, density: JetExpr, tag: &str| IntegralDensity { id: id.into(), density, tag: tag.into() };
    vec![
        mk("E", ener, "energy"),
        mk("M", pc() * pc() * vx(), "momentum"),
        mk("K", k, "dilation-type energy"),
        mk("H", h, "dilation-type momentum"),
    ]
}
