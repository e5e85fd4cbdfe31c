//! Indeterminates of the jet-space polynomial ring.
//!
//! Every indeterminate maps to a fixed `u16` id; the id order is the global
//! variable enumeration used by the graded-lex term order.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard ceiling on jet order supported by the id encoding.
pub const MAX_ORDER: usize = 40;
pub const DEFAULT_ORDER_CAP: usize = 10;

static ORDER_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ORDER_CAP);

/// Current jet order cap (total derivative order `t_order + x_order`).
pub fn order_cap() -> usize {
    ORDER_CAP.load(Ordering::Relaxed)
}

/// Sets the process-wide jet order cap. Values above [`MAX_ORDER`] are clamped.
pub fn set_order_cap(cap: usize) {
    ORDER_CAP.store(cap.min(MAX_ORDER), Ordering::Relaxed);
}

/// Dependent variables known to the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dep {
    /// Acoustic pressure `p(t, x)`.
    P,
    /// Second-layer potential `v(t, x)` with `p = v_t`.
    V,
    /// Linear-wave variable `v*(t*, x*)`.
    VStar,
    /// Similarity profile `V(zeta)`.
    BigV,
    /// Multiplier function `f(v_t, v_x)`.
    F,
}

impl Dep {
    pub const ALL: [Dep; 5] = [Dep::P, Dep::V, Dep::VStar, Dep::BigV, Dep::F];

    fn index(self) -> u16 {
        match self {
            Dep::P => 0,
            Dep::V => 1,
            Dep::VStar => 2,
            Dep::BigV => 3,
            Dep::F => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dep::P => "p",
            Dep::V => "v",
            Dep::VStar => "vs",
            Dep::BigV => "V",
            Dep::F => "f",
        }
    }

    pub fn from_name(s: &str) -> Option<Dep> {
        Dep::ALL.into_iter().find(|d| d.name() == s)
    }
}

/// A jet coordinate `w_{t^a x^b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JetVar {
    pub dep: Dep,
    pub t_order: u8,
    pub x_order: u8,
}

impl JetVar {
    /// Checked constructor honouring the configured order cap.
    pub fn new(dep: Dep, t_order: usize, x_order: usize) -> Result<JetVar> {
        let order = t_order + x_order;
        if order > order_cap() {
            return Err(Error::OrderCap { order, cap: order_cap() });
        }
        Ok(JetVar { dep, t_order: t_order as u8, x_order: x_order as u8 })
    }

    /// Unchecked constructor for catalog literals well inside the cap.
    pub const fn at(dep: Dep, t_order: u8, x_order: u8) -> JetVar {
        JetVar { dep, t_order, x_order }
    }

    pub fn order(&self) -> usize {
        self.t_order as usize + self.x_order as usize
    }

    /// The jet coordinate obtained by one more `t` (dir 0) or `x` (dir 1) derivative.
    pub fn shifted(&self, dt: usize, dx: usize) -> Result<JetVar> {
        JetVar::new(self.dep, self.t_order as usize + dt, self.x_order as usize + dx)
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.dep.name(), self.t_order, self.x_order)
    }
}

/// A polynomial indeterminate: parameter, independent variable or jet coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Indet {
    Alpha,
    Beta,
    /// Symbolic integrating-factor exponent.
    S,
    /// Symbolic similarity weight.
    Q,
    T,
    X,
    TStar,
    XStar,
    Zeta,
    Z,
    Jet(JetVar),
}

const JET_BASE: u16 = 16;
const JET_STRIDE: u16 = 1024;

const SCALARS: [(Indet, &str); 10] = [
    (Indet::Alpha, "alpha"),
    (Indet::Beta, "beta"),
    (Indet::S, "s"),
    (Indet::Q, "q"),
    (Indet::T, "t"),
    (Indet::X, "x"),
    (Indet::TStar, "ts"),
    (Indet::XStar, "xs"),
    (Indet::Zeta, "zeta"),
    (Indet::Z, "z"),
];

fn tri_index(a: u16, b: u16) -> u16 {
    let n = a + b;
    n * (n + 1) / 2 + b
}

impl Indet {
    pub fn id(self) -> u16 {
        match self {
            Indet::Alpha => 0,
            Indet::Beta => 1,
            Indet::S => 2,
            Indet::Q => 3,
            Indet::T => 4,
            Indet::X => 5,
            Indet::TStar => 6,
            Indet::XStar => 7,
            Indet::Zeta => 8,
            Indet::Z => 9,
            Indet::Jet(j) => {
                JET_BASE + j.dep.index() * JET_STRIDE + tri_index(j.t_order as u16, j.x_order as u16)
            }
        }
    }

    pub fn from_id(id: u16) -> Indet {
        if id < JET_BASE {
            return SCALARS[id as usize].0;
        }
        let rel = id - JET_BASE;
        let dep = Dep::ALL[(rel / JET_STRIDE) as usize];
        let k = rel % JET_STRIDE;
        let mut n = 0u16;
        while (n + 1) * (n + 2) / 2 <= k {
            n += 1;
        }
        let b = k - n * (n + 1) / 2;
        Indet::Jet(JetVar { dep, t_order: (n - b) as u8, x_order: b as u8 })
    }

    pub fn jet(self) -> Option<JetVar> {
        match self {
            Indet::Jet(j) => Some(j),
            _ => None,
        }
    }

    pub fn name(self) -> String {
        match self {
            Indet::Jet(j) => j.to_string(),
            other => SCALARS
                .iter()
                .find(|(i, _)| *i == other)
                .map(|(_, n)| n.to_string())
                .unwrap_or_default(),
        }
    }

    pub fn scalar_from_name(s: &str) -> Option<Indet> {
        SCALARS.iter().find(|(_, n)| *n == s).map(|(i, _)| *i)
    }
}

impl From<JetVar> for Indet {
    fn from(j: JetVar) -> Self {
        Indet::Jet(j)
    }
}

impl fmt::Display for Indet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for dep in Dep::ALL {
            for a in 0..=12u8 {
                for b in 0..=(12 - a) {
                    let i = Indet::Jet(JetVar::at(dep, a, b));
                    assert_eq!(Indet::from_id(i.id()), i);
                }
            }
        }
        for (i, _) in SCALARS {
            assert_eq!(Indet::from_id(i.id()), i);
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        assert!(JetVar::new(Dep::P, 10, 0).is_ok());
        assert!(matches!(JetVar::new(Dep::P, 6, 5), Err(Error::OrderCap { order: 11, .. })));
    }
}
