//! Exact rational functions over the jet-space indeterminates.
//!
//! A `JetExpr` is `scale * num / Π den_i^k_i`. The numerator is primitive
//! with a positive leading coefficient, every denominator factor is a
//! primitive non-monomial polynomial with positive leading coefficient or a
//! single indeterminate, and factors are kept sorted. Sums use the factored
//! least common multiple of the denominators, which keeps the expressions
//! produced by total derivatives small without polynomial gcds.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::int::Int;
use super::poly::{DVar, Mono, Poly};
use super::var::{Dep, Indet, JetVar};
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct JetExpr {
    scale: BigRational,
    num: Poly,
    den: Vec<(Poly, u32)>,
}

fn rat(i: &Int) -> BigRational {
    BigRational::from_integer(i.to_big())
}

fn int_of(b: &BigInt) -> Int {
    Int::from_big(b.clone())
}

/// Largest numerator size for which exact cancellation against a
/// denominator factor is attempted.
const CANCEL_LIMIT: usize = 20_000;

impl JetExpr {
    pub fn zero() -> JetExpr {
        JetExpr { scale: BigRational::zero(), num: Poly::zero(), den: Vec::new() }
    }

    pub fn one() -> JetExpr {
        JetExpr::int(1)
    }

    pub fn int(v: i64) -> JetExpr {
        JetExpr::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn frac(n: i64, d: i64) -> JetExpr {
        JetExpr::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(r: BigRational) -> JetExpr {
        if r.is_zero() {
            return JetExpr::zero();
        }
        JetExpr { scale: r, num: Poly::one(), den: Vec::new() }
    }

    pub fn var(v: Indet) -> JetExpr {
        JetExpr { scale: BigRational::one(), num: Poly::var(v), den: Vec::new() }
    }

    pub fn jet(dep: Dep, t_order: u8, x_order: u8) -> JetExpr {
        JetExpr::var(Indet::Jet(JetVar::at(dep, t_order, x_order)))
    }

    pub fn alpha() -> JetExpr {
        JetExpr::var(Indet::Alpha)
    }

    pub fn beta() -> JetExpr {
        JetExpr::var(Indet::Beta)
    }

    pub fn from_poly(p: Poly) -> JetExpr {
        JetExpr::build(BigRational::one(), p, Vec::new())
    }

    /// Assembles and canonicalizes `scale * num / Π den`.
    pub fn build(scale: BigRational, num: Poly, den: Vec<(Poly, u32)>) -> JetExpr {
        normalize(scale, num, den)
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn den_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    /// Expanded denominator polynomial.
    pub fn denominator(&self) -> Poly {
        self.den.iter().fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.den.is_empty() {
            self.num.as_constant().map(|c| &self.scale * rat(&c))
        } else {
            None
        }
    }

    /// The indeterminate id if this expression is exactly one indeterminate.
    pub fn as_var(&self) -> Option<u16> {
        if !self.den.is_empty() || !self.scale.is_one() {
            return None;
        }
        match self.num.terms() {
            [(m, c)] if c.is_one() && m.0.len() == 1 && m.0[0].1 == 1 => Some(m.0[0].0),
            _ => None,
        }
    }

    /// Number of numerator terms (size measure used in reports).
    pub fn term_count(&self) -> usize {
        self.num.len()
    }

    pub fn var_ids(&self) -> Vec<u16> {
        let mut ids = self.num.var_ids();
        for (f, _) in &self.den {
            ids.extend(f.var_ids());
        }
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn contains(&self, v: Indet) -> bool {
        self.num.contains(v) || self.den.iter().any(|(f, _)| f.contains(v))
    }

    /// Jet coordinates occurring anywhere in the expression.
    pub fn jet_vars(&self) -> Vec<JetVar> {
        self.var_ids().into_iter().filter_map(|id| Indet::from_id(id).jet()).collect()
    }

    pub fn recip(&self) -> Result<JetExpr> {
        self.powi(-1)
    }

    pub fn try_div(&self, other: &JetExpr) -> Result<JetExpr> {
        Ok(self.mul(&other.recip()?))
    }

    /// Integer power; negative exponents move the numerator into the
    /// denominator as a single factor.
    pub fn powi(&self, e: i32) -> Result<JetExpr> {
        if e >= 0 {
            let e = e as u32;
            return Ok(JetExpr::build(
                pow_rat(&self.scale, e),
                self.num.pow(e),
                self.den.iter().map(|(f, k)| (f.clone(), k * e)).collect(),
            ));
        }
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = e.unsigned_abs();
        let mut num = Poly::one();
        for (f, m) in &self.den {
            num = num.mul(&f.pow(m * k));
        }
        Ok(JetExpr::build(pow_rat(&self.scale.recip(), k), num, vec![(self.num.clone(), k)]))
    }

    pub fn scale_by(&self, r: &BigRational) -> JetExpr {
        if r.is_zero() || self.is_zero() {
            return JetExpr::zero();
        }
        JetExpr { scale: &self.scale * r, num: self.num.clone(), den: self.den.clone() }
    }

    /// Applies a derivation given by its action on indeterminates
    /// (quotient rule over the factored denominator).
    pub fn derive(&self, d: &impl Fn(u16) -> Result<DVar>) -> Result<JetExpr> {
        if self.is_zero() {
            return Ok(JetExpr::zero());
        }
        let dn = self.num.derive(d)?;
        if self.den.is_empty() {
            return Ok(JetExpr::build(self.scale.clone(), dn, Vec::new()));
        }
        let dfs: Vec<Poly> = self.den.iter().map(|(f, _)| f.derive(d)).collect::<Result<_>>()?;
        let active: Vec<usize> = (0..self.den.len()).filter(|&i| !dfs[i].is_zero()).collect();
        if active.is_empty() {
            return Ok(JetExpr::build(self.scale.clone(), dn, self.den.clone()));
        }
        // d(n / Π f^k) = (dn·Πa f − n·Σa k_i f_i' Π_{j≠i} f_j) / (Π f^k · Πa f)
        let prod_active = |skip: Option<usize>| {
            active.iter().filter(|&&j| Some(j) != skip).fold(Poly::one(), |acc, &j| acc.mul(&self.den[j].0))
        };
        let mut out = dn.mul(&prod_active(None));
        for &i in &active {
            let k = Int::from(self.den[i].1 as i64);
            let term = self.num.mul(&dfs[i]).mul(&prod_active(Some(i))).scale(&k);
            out = out.sub(&term);
        }
        let mut den = self.den.clone();
        for &i in &active {
            den[i].1 += 1;
        }
        Ok(JetExpr::build(self.scale.clone(), out, den))
    }

    pub fn partial(&self, v: Indet) -> JetExpr {
        let id = v.id();
        self.derive(&|w| Ok(if w == id { DVar::One } else { DVar::Zero }))
            .expect("partial derivative is infallible")
    }

    /// Sum of many expressions over one common denominator.
    pub fn sum(items: impl IntoIterator<Item = JetExpr>) -> JetExpr {
        let items: Vec<JetExpr> = items.into_iter().filter(|e| !e.is_zero()).collect();
        match items.len() {
            0 => return JetExpr::zero(),
            1 => return items.into_iter().next().unwrap(),
            _ => {}
        }
        let mut lcm: BTreeMap<Poly, u32> = BTreeMap::new();
        let mut qd = BigInt::one();
        for e in &items {
            for (f, k) in &e.den {
                let slot = lcm.entry(f.clone()).or_insert(0);
                *slot = (*slot).max(*k);
            }
            qd = qd.lcm(e.scale.denom());
        }
        let mut acc: FxHashMap<Mono, Int> = FxHashMap::default();
        for e in &items {
            let mut cofactor = Poly::one();
            for (f, k) in &lcm {
                let have = e.den.iter().find(|(g, _)| g == f).map(|(_, m)| *m).unwrap_or(0);
                if *k > have {
                    cofactor = cofactor.mul(&f.pow(k - have));
                }
            }
            let c = int_of(&(e.scale.numer() * (&qd / e.scale.denom())));
            let part = e.num.mul(&cofactor);
            for (m, a) in part.terms() {
                let v = a * &c;
                match acc.get_mut(m) {
                    Some(x) => *x = &*x + &v,
                    None => {
                        acc.insert(m.clone(), v);
                    }
                }
            }
        }
        let num = Poly::from_terms(acc);
        JetExpr::build(BigRational::new(BigInt::one(), qd), num, lcm.into_iter().collect())
    }

    /// Simultaneous substitution of indeterminates by expressions.
    pub fn substitute(&self, bindings: &[(Indet, JetExpr)]) -> Result<JetExpr> {
        let map: FxHashMap<u16, JetExpr> = bindings.iter().map(|(v, e)| (v.id(), e.clone())).collect();
        self.substitute_ids(&map)
    }

    pub fn substitute_ids(&self, map: &FxHashMap<u16, JetExpr>) -> Result<JetExpr> {
        if self.is_zero() {
            return Ok(JetExpr::zero());
        }
        if !self.var_ids().iter().any(|id| map.contains_key(id)) {
            return Ok(self.clone());
        }
        let renames: Option<FxHashMap<u16, u16>> =
            map.iter().map(|(k, v)| v.as_var().map(|w| (*k, w))).collect();
        if let Some(r) = renames {
            let f = |id: u16| *r.get(&id).unwrap_or(&id);
            return Ok(JetExpr::build(
                self.scale.clone(),
                self.num.rename(&f),
                self.den.iter().map(|(p, k)| (p.rename(&f), *k)).collect(),
            ));
        }
        let mut cache: FxHashMap<(u16, u16), JetExpr> = FxHashMap::default();
        let mut result = subst_poly(&self.num, map, &mut cache).scale_by(&self.scale);
        for (f, k) in &self.den {
            let g = subst_poly(f, map, &mut cache);
            if g.is_zero() {
                return Err(Error::DivisionByZero);
            }
            result = result.mul(&g.powi(-(*k as i32))?);
        }
        Ok(result)
    }

    /// Coefficients of `v^k`, requiring the denominator to be free of `v`.
    pub fn coefficients_in(&self, v: Indet) -> Result<Vec<JetExpr>> {
        if self.den.iter().any(|(f, _)| f.contains(v)) {
            return Err(Error::NotPolynomial(v.name()));
        }
        Ok(self
            .num
            .coefficients_in(v)
            .into_iter()
            .map(|c| JetExpr::build(self.scale.clone(), c, self.den.clone()))
            .collect())
    }

    /// Floating-point evaluation given values of the indeterminates.
    pub fn eval_f64(&self, env: &impl Fn(Indet) -> f64) -> f64 {
        let mut cache: FxHashMap<u16, f64> = FxHashMap::default();
        let mut val = |id: u16| *cache.entry(id).or_insert_with(|| env(Indet::from_id(id)));
        let mut eval_poly = |p: &Poly| -> f64 {
            p.terms()
                .iter()
                .map(|(m, c)| m.0.iter().fold(c.to_f64(), |acc, &(v, e)| acc * val(v).powi(e as i32)))
                .sum()
        };
        let n = eval_poly(&self.num);
        let d: f64 = self.den.iter().map(|(f, k)| eval_poly(f).powi(*k as i32)).product();
        self.scale.to_f64().unwrap_or(f64::NAN) * n / d
    }

    /// Exact evaluation at rational values; `None` on a vanishing denominator.
    pub fn eval_rational(&self, env: &impl Fn(Indet) -> BigRational) -> Option<BigRational> {
        let eval_poly = |p: &Poly| -> BigRational {
            let mut acc = BigRational::zero();
            for (m, c) in p.terms() {
                let mut t = rat(c);
                for &(v, e) in m.0.iter() {
                    t *= pow_rat(&env(Indet::from_id(v)), e as u32);
                }
                acc += t;
            }
            acc
        };
        let mut d = BigRational::one();
        for (f, k) in &self.den {
            d *= pow_rat(&eval_poly(f), *k);
        }
        if d.is_zero() {
            return None;
        }
        Some(&self.scale * eval_poly(&self.num) / d)
    }

    /// Exact structural equality of canonical forms.
    pub fn structurally_eq(&self, other: &JetExpr) -> bool {
        self.scale == other.scale && self.num == other.num && self.den == other.den
    }
}

fn pow_rat(r: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

fn subst_poly(p: &Poly, map: &FxHashMap<u16, JetExpr>, cache: &mut FxHashMap<(u16, u16), JetExpr>) -> JetExpr {
    let bound: Vec<u16> = p.var_ids().into_iter().filter(|id| map.contains_key(id)).collect();
    if bound.is_empty() {
        return JetExpr::from_poly(p.clone());
    }
    let mut groups: BTreeMap<Vec<u16>, Vec<(Mono, Int)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let key: Vec<u16> = bound.iter().map(|&id| m.exponent(id)).collect();
        let mut rest = Mono::one();
        for &(v, e) in m.0.iter() {
            if !map.contains_key(&v) {
                rest = rest.mul(&Mono(smallvec::smallvec![(v, e)]));
            }
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }
    let mut parts = Vec::with_capacity(groups.len());
    for (key, terms) in groups {
        let mut prod = JetExpr::from_poly(Poly::from_terms(terms));
        for (&id, &e) in bound.iter().zip(key.iter()) {
            if e > 0 {
                prod = prod.mul(&cached_pow(id, e, map, cache));
            }
        }
        parts.push(prod);
    }
    JetExpr::sum(parts)
}

fn cached_pow(
    id: u16,
    e: u16,
    map: &FxHashMap<u16, JetExpr>,
    cache: &mut FxHashMap<(u16, u16), JetExpr>,
) -> JetExpr {
    if let Some(v) = cache.get(&(id, e)) {
        return v.clone();
    }
    let v = if e == 1 {
        map[&id].clone()
    } else {
        cached_pow(id, e - 1, map, cache).mul(&map[&id])
    };
    cache.insert((id, e), v.clone());
    v
}

/// Makes `f` primitive with positive leading coefficient, returning the
/// extracted signed content.
fn make_primitive(f: &Poly) -> (Int, Poly) {
    let mut c = f.content();
    if f.leading().map(|(_, lc)| lc.is_negative()).unwrap_or(false) {
        c = -c;
    }
    (c.clone(), f.div_int(&c))
}

fn normalize(mut scale: BigRational, num: Poly, den: Vec<(Poly, u32)>) -> JetExpr {
    if num.is_zero() || scale.is_zero() {
        return JetExpr::zero();
    }
    // denominator: fold constants into the scale, split monomials, merge repeats
    let mut factors: BTreeMap<Poly, u32> = BTreeMap::new();
    let mut pending: Vec<(Poly, u32)> = den.into_iter().filter(|(_, k)| *k > 0).collect();
    while let Some((f, k)) = pending.pop() {
        if f.is_zero() {
            panic!("zero denominator factor");
        }
        let (c, g) = make_primitive(&f);
        if !c.is_one() {
            scale /= pow_rat(&rat(&c), k);
        }
        let mc = g.mono_content();
        if !mc.is_one() {
            for &(v, e) in mc.0.iter() {
                *factors.entry(Poly::monomial(Mono::var(v), Int::ONE)).or_insert(0) += e as u32 * k;
            }
            let rest = g.div_mono(&mc);
            if rest.as_constant().is_none() {
                pending.push((rest, k));
            }
            continue;
        }
        if g.as_constant().is_some() {
            continue;
        }
        // split against an existing factor that divides it (or that it divides)
        let mut split = None;
        for h in factors.keys() {
            if h.len() > 1 && h != &g && h.total_degree() <= g.total_degree() {
                if let Some(q) = try_divide(&g, h) {
                    split = Some((h.clone(), q));
                    break;
                }
            }
        }
        if let Some((h, q)) = split {
            *factors.get_mut(&h).unwrap() += k;
            pending.push((q, k));
            continue;
        }
        let mut absorbed = None;
        for h in factors.keys() {
            if h.len() > 1 && h != &g && h.total_degree() > g.total_degree() {
                if let Some(q) = try_divide(h, &g) {
                    absorbed = Some((h.clone(), q));
                    break;
                }
            }
        }
        if let Some((h, q)) = absorbed {
            let m = factors.remove(&h).unwrap();
            *factors.entry(g).or_insert(0) += k + m;
            pending.push((q, m));
            continue;
        }
        *factors.entry(g).or_insert(0) += k;
    }
    // numerator content and sign
    let (c, mut num) = make_primitive(&num);
    scale *= rat(&c);
    // cancel monomial content against single-indeterminate factors
    let mc = num.mono_content();
    if !mc.is_one() {
        let mut cancel = Mono::one();
        for &(v, e) in mc.0.iter() {
            let key = Poly::monomial(Mono::var(v), Int::ONE);
            if let Some(k) = factors.get_mut(&key) {
                let m = (*k).min(e as u32);
                *k -= m;
                cancel = cancel.mul(&Mono(smallvec::smallvec![(v, m as u16)]));
            }
        }
        num = num.div_mono(&cancel);
    }
    // cancel whole factors
    if num.len() <= CANCEL_LIMIT {
        for (f, k) in factors.iter_mut() {
            if f.len() == 1 {
                continue;
            }
            while *k > 0 && num.total_degree() >= f.total_degree() {
                match try_divide(&num, f) {
                    Some(q) => {
                        num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
    }
    let den: Vec<(Poly, u32)> = factors.into_iter().filter(|(_, k)| *k > 0).collect();
    JetExpr { scale, num, den }
}

/// Exact quotient `a / b` if it exists, with a cheap modular pre-check.
pub(crate) fn try_divide(a: &Poly, b: &Poly) -> Option<Poly> {
    for id in b.var_ids() {
        let v = Indet::from_id(id);
        if a.degree_in(v) < b.degree_in(v) {
            return None;
        }
    }
    if !modular::may_divide(a, b) {
        return None;
    }
    divide_heap(a, b)
}

fn divide_heap(a: &Poly, b: &Poly) -> Option<Poly> {
    let (lm, lc) = b.leading()?.clone();
    let mut rem: BTreeMap<Mono, Int> = a.terms().iter().cloned().collect();
    let mut quotient = Vec::new();
    while let Some((m, c)) = rem.pop_last() {
        let qm = m.div(&lm)?;
        if !c.gcd(&lc).eq(&lc.abs()) {
            return None;
        }
        let qc = c.div_exact(&lc);
        for (bm, bc) in &b.terms()[1..] {
            let t = bm.mul(&qm);
            let v = bc * &qc;
            match rem.get_mut(&t) {
                Some(x) => {
                    *x = &*x - &v;
                    if x.is_zero() {
                        rem.remove(&t);
                    }
                }
                None => {
                    rem.insert(t, -v);
                }
            }
        }
        quotient.push((qm, qc));
    }
    Some(Poly::from_terms(quotient))
}

mod modular {
    //! Univariate divisibility filter modulo a Mersenne prime.
    use super::*;

    const P: u64 = (1 << 61) - 1;

    fn reduce(v: u128) -> u64 {
        let lo = (v as u64) & P;
        let hi = (v >> 61) as u64;
        let mut s = lo + (hi & P) + ((v >> 122) as u64);
        while s >= P {
            s -= P;
        }
        s
    }

    fn mulm(a: u64, b: u64) -> u64 {
        reduce(a as u128 * b as u128)
    }

    fn addm(a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= P {
            s - P
        } else {
            s
        }
    }

    fn subm(a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + P - b
        }
    }

    fn powm(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, a);
            }
            a = mulm(a, a);
            e >>= 1;
        }
        r
    }

    fn int_mod(c: &Int) -> u64 {
        match c {
            Int::Small(s) => {
                let m = s.unsigned_abs() % P;
                if *s < 0 {
                    subm(0, m)
                } else {
                    m
                }
            }
            Int::Big(b) => {
                let r = b.mod_floor(&BigInt::from(P));
                r.to_u64().unwrap()
            }
        }
    }

    fn point(id: u16) -> u64 {
        // fixed pseudo-random evaluation point per indeterminate
        let mut z = (id as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) % P
    }

    fn specialize(p: &Poly, keep: u16) -> Vec<u64> {
        let mut coeffs: Vec<u64> = Vec::new();
        for (m, c) in p.terms() {
            let mut val = int_mod(c);
            let mut deg = 0usize;
            for &(v, e) in m.0.iter() {
                if v == keep {
                    deg = e as usize;
                } else {
                    val = mulm(val, powm(point(v), e as u64));
                }
            }
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, 0);
            }
            coeffs[deg] = addm(coeffs[deg], val);
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        coeffs
    }

    /// False only when `b` certainly does not divide `a`.
    pub fn may_divide(a: &Poly, b: &Poly) -> bool {
        let Some(&keep) = b.var_ids().iter().max_by_key(|&&id| b.degree_in(Indet::from_id(id))) else {
            return true;
        };
        let mut r = specialize(a, keep);
        let d = specialize(b, keep);
        if d.len() < 2 || d.len() - 1 != b.degree_in(Indet::from_id(keep)) as usize {
            return true;
        }
        let inv = powm(*d.last().unwrap(), P - 2);
        while r.len() >= d.len() {
            let lead = mulm(*r.last().unwrap(), inv);
            let shift = r.len() - d.len();
            for (i, dc) in d.iter().enumerate() {
                r[shift + i] = subm(r[shift + i], mulm(lead, *dc));
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        r.is_empty()
    }
}

impl PartialEq for JetExpr {
    /// Mathematical equality: the difference is identically zero.
    fn eq(&self, other: &JetExpr) -> bool {
        if self.structurally_eq(other) {
            return true;
        }
        self.sub(other).is_zero()
    }
}

impl JetExpr {
    pub fn add(&self, other: &JetExpr) -> JetExpr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        JetExpr::sum([self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &JetExpr) -> JetExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> JetExpr {
        JetExpr { scale: -&self.scale, num: self.num.clone(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &JetExpr) -> JetExpr {
        if self.is_zero() || other.is_zero() {
            return JetExpr::zero();
        }
        let mut den = self.den.clone();
        den.extend(other.den.iter().cloned());
        JetExpr::build(&self.scale * &other.scale, self.num.mul(&other.num), den)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:expr) => {
        impl $tr<&JetExpr> for &JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: &JetExpr) -> JetExpr {
                $f(self, rhs)
            }
        }
        impl $tr<JetExpr> for JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: JetExpr) -> JetExpr {
                $f(&self, &rhs)
            }
        }
        impl $tr<&JetExpr> for JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: &JetExpr) -> JetExpr {
                $f(&self, rhs)
            }
        }
        impl $tr<JetExpr> for &JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: JetExpr) -> JetExpr {
                $f(self, &rhs)
            }
        }
        impl $tr<i64> for JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: i64) -> JetExpr {
                $f(&self, &JetExpr::int(rhs))
            }
        }
        impl $tr<i64> for &JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: i64) -> JetExpr {
                $f(self, &JetExpr::int(rhs))
            }
        }
        impl $tr<JetExpr> for i64 {
            type Output = JetExpr;
            fn $m(self, rhs: JetExpr) -> JetExpr {
                $f(&JetExpr::int(self), &rhs)
            }
        }
        impl $tr<&JetExpr> for i64 {
            type Output = JetExpr;
            fn $m(self, rhs: &JetExpr) -> JetExpr {
                $f(&JetExpr::int(self), rhs)
            }
        }
    };
}

/// Division panics on an identically zero divisor; use [`JetExpr::try_div`]
/// for fallible division.
fn div_or_panic(a: &JetExpr, b: &JetExpr) -> JetExpr {
    a.try_div(b).expect("division by zero expression")
}

binop!(Add, add, JetExpr::add);
binop!(Sub, sub, JetExpr::sub);
binop!(Mul, mul, JetExpr::mul);
binop!(Div, div, div_or_panic);

impl Neg for JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        JetExpr::neg(&self)
    }
}

impl Neg for &JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        JetExpr::neg(self)
    }
}

impl From<i64> for JetExpr {
    fn from(v: i64) -> Self {
        JetExpr::int(v)
    }
}

impl From<Indet> for JetExpr {
    fn from(v: Indet) -> Self {
        JetExpr::var(v)
    }
}

impl From<JetVar> for JetExpr {
    fn from(v: JetVar) -> Self {
        JetExpr::var(Indet::Jet(v))
    }
}

impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::print(self))
    }
}

impl fmt::Debug for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: u8, b: u8) -> JetExpr {
        JetExpr::jet(Dep::P, a, b)
    }

    #[test]
    fn add_examples() {
        assert!((p(1, 0) + JetExpr::zero()).structurally_eq(&p(1, 0)));
        let x = JetExpr::var(Indet::X);
        let half = JetExpr::frac(1, 2);
        assert!((&half * &x + &half * &x).structurally_eq(&x));
        let lhs = p(0, 0).recip().unwrap() + p(1, 0).recip().unwrap();
        let rhs = (p(1, 0) + p(0, 0)) / (p(0, 0) * p(1, 0));
        assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn mul_examples() {
        let b = JetExpr::beta();
        assert!((&b * JetExpr::zero()).is_zero());
        let w = 1 - 2 * &b * p(0, 0);
        let sq = &w * &w;
        let expanded = 1 - 4 * &b * p(0, 0) + 4 * &b * &b * p(0, 0) * p(0, 0);
        assert!(sq.structurally_eq(&expanded));
        let j = (1 - 2 * &b * p(0, 0)) * p(1, 0) * p(1, 0) - p(0, 1) * p(0, 1);
        let e = p(0, 1) / &j * &j;
        assert!(e.structurally_eq(&p(0, 1)));
    }

    #[test]
    fn is_zero_examples() {
        let b = JetExpr::beta();
        let e = (p(1, 0) * p(1, 0) - p(1, 0) * p(1, 0)) / (1 - 2 * b * p(0, 0));
        assert!(e.is_zero());
        assert!(!(p(2, 0) - p(0, 2)).is_zero());
    }

    #[test]
    fn substitution_examples() {
        let a = JetExpr::alpha();
        let e = &a * p(3, 0);
        assert!(e.substitute(&[(Indet::Alpha, JetExpr::zero())]).unwrap().is_zero());
        let v = JetExpr::jet(Dep::V, 2, 0);
        let renamed = v
            .substitute(&[(Indet::Jet(JetVar::at(Dep::V, 2, 0)), p(1, 0))])
            .unwrap();
        assert!(renamed.structurally_eq(&p(1, 0)));
        let q = (1 - JetExpr::beta() * p(0, 0)).recip().unwrap();
        let err = q.substitute(&[(Indet::Jet(JetVar::at(Dep::P, 0, 0)), JetExpr::beta().recip().unwrap())]);
        assert!(matches!(err, Err(Error::DivisionByZero)));
    }

    #[test]
    fn derivative_of_quotient() {
        let e = p(0, 0).recip().unwrap();
        let d = e.partial(Indet::Jet(JetVar::at(Dep::P, 0, 0)));
        let expect = -(p(0, 0).powi(-2).unwrap());
        assert!((d - expect).is_zero());
    }

    #[test]
    fn factor_splitting_keeps_denominator_factored() {
        let b = JetExpr::beta();
        let w = 1 - 2 * &b * p(0, 0);
        let e = p(1, 0) * w.powi(-2).unwrap() + p(0, 1) / (&w * (1 + p(0, 0)));
        assert_eq!(e.den_factors().len(), 2);
        assert!(e.den_factors().iter().any(|(f, k)| *k == 2 && (JetExpr::from_poly(f.clone()) + &w).is_zero()));
    }
}
