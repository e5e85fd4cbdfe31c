//! Exact symbolic arithmetic over jet coordinates and parameters.

mod expr;
mod int;
mod parse;
mod poly;
mod var;

pub use expr::JetExpr;
pub use int::Int;
pub use parse::{parse, print};
pub use poly::{DVar, Mono, Poly};
pub use var::{order_cap, set_order_cap, Dep, Indet, JetVar, DEFAULT_ORDER_CAP, MAX_ORDER};

/// Shorthand for the jet coordinate `dep_{t^a x^b}`.
pub fn jet(dep: Dep, a: u8, b: u8) -> JetExpr {
    JetExpr::jet(dep, a, b)
}

pub fn p(a: u8, b: u8) -> JetExpr {
    JetExpr::jet(Dep::P, a, b)
}

pub fn v(a: u8, b: u8) -> JetExpr {
    JetExpr::jet(Dep::V, a, b)
}

pub fn alpha() -> JetExpr {
    JetExpr::alpha()
}

pub fn beta() -> JetExpr {
    JetExpr::beta()
}

pub fn t() -> JetExpr {
    JetExpr::var(Indet::T)
}

pub fn x() -> JetExpr {
    JetExpr::var(Indet::X)
}

pub fn int(n: i64) -> JetExpr {
    JetExpr::int(n)
}

pub fn frac(n: i64, d: i64) -> JetExpr {
    JetExpr::frac(n, d)
}
