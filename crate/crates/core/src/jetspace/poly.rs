//! Sparse multivariate polynomials with integer coefficients.
//!
//! Terms are kept in strictly descending graded-lexicographic order of their
//! exponent vectors, with no zero coefficients, so structural equality is
//! polynomial equality.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::int::Int;
use super::var::Indet;
use crate::error::Result;

/// Exponent vector: `(indeterminate id, power)` pairs sorted by id, powers > 0.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Mono(pub(crate) SmallVec<[(u16, u16); 6]>);

impl Hash for Mono {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for &(v, e) in self.0.iter() {
            state.write_u32(((v as u32) << 16) | e as u32);
        }
    }
}

impl Mono {
    pub fn one() -> Mono {
        Mono(SmallVec::new())
    }

    pub fn var(id: u16) -> Mono {
        let mut s = SmallVec::new();
        s.push((id, 1));
        Mono(s)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, id: u16) -> u16 {
        match self.0.binary_search_by_key(&id, |&(v, _)| v) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Indet, u16)> + '_ {
        self.0.iter().map(|&(v, e)| (Indet::from_id(v), e))
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in self.0.iter() {
            if j < other.0.len() && other.0[j].0 == v {
                let oe = other.0[j].1;
                if oe > e {
                    return None;
                }
                if e > oe {
                    out.push((v, e - oe));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < v {
                return None;
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Removes one power of `id` (caller guarantees it is present).
    fn lower(&self, id: u16) -> Mono {
        let mut out = self.0.clone();
        let i = out.binary_search_by_key(&id, |&(v, _)| v).expect("variable present");
        if out[i].1 == 1 {
            out.remove(i);
        } else {
            out[i].1 -= 1;
        }
        Mono(out)
    }

    /// Elementwise minimum of exponents (monomial gcd).
    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut out = SmallVec::new();
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1.min(b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Mono(out)
    }

    fn cmp_lex(&self, other: &Mono) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (i < a.len(), j < b.len()) {
                (false, false) => return Ordering::Equal,
                (false, true) => return Ordering::Less,
                (true, false) => return Ordering::Greater,
                (true, true) => {
                    let ((va, ea), (vb, eb)) = (a[i], b[j]);
                    if va < vb {
                        return Ordering::Greater;
                    }
                    if va > vb {
                        return Ordering::Less;
                    }
                    match ea.cmp(&eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        o => return o,
                    }
                }
            }
        }
    }
}

impl Ord for Mono {
    /// Graded lexicographic order; lower indeterminate ids rank higher.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.cmp_lex(other))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Mono {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(v, e)| if e == 1 { v.name() } else { format!("{}^{}", v.name(), e) })
            .collect();
        write!(f, "{}", if parts.is_empty() { "1".into() } else { parts.join("*") })
    }
}

/// Action of a derivation on a single indeterminate.
#[derive(Clone, Copy, Debug)]
pub enum DVar {
    Zero,
    One,
    Var(u16),
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: Vec<(Mono, Int)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: Int) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Mono::one(), c)] }
        }
    }

    pub fn one() -> Poly {
        Poly::constant(Int::ONE)
    }

    pub fn var(v: Indet) -> Poly {
        Poly { terms: vec![(Mono::var(v.id()), Int::ONE)] }
    }

    pub fn monomial(m: Mono, c: Int) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a canonical polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, Int)>) -> Poly {
        let mut acc: FxHashMap<Mono, Int> = FxHashMap::default();
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(x) => *x = &*x + &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Poly::from_map(acc)
    }

    fn from_map(acc: FxHashMap<Mono, Int>) -> Poly {
        let mut terms: Vec<(Mono, Int)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Mono, Int)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<Int> {
        match self.terms.as_slice() {
            [] => Some(Int::ZERO),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Mono, Int)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // merge of two descending lists
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Int) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        // multiplication by a monomial preserves the term order
        Poly { terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_mono(m).scale(c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_mono(m).scale(c);
        }
        let mut acc: FxHashMap<Mono, Int> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * 2, Default::default());
        let (small, big) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = ma.mul(mb);
                match acc.get_mut(&m) {
                    Some(x) => x.mul_add_assign(ca, cb),
                    None => {
                        acc.insert(m, ca * cb);
                    }
                }
            }
        }
        Poly::from_map(acc)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> Int {
        let mut g = Int::ZERO;
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Monomial gcd of all terms.
    pub fn mono_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else { return Mono::one() };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_int(&self, k: &Int) -> Poly {
        if k.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.div_exact(k))).collect() }
    }

    pub fn div_mono(&self, m: &Mono) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(t, c)| (t.div(m).expect("monomial divides"), c.clone())).collect() }
    }

    /// Applies a derivation defined by its action on each indeterminate.
    pub fn derive(&self, d: &impl Fn(u16) -> Result<DVar>) -> Result<Poly> {
        let mut acc: FxHashMap<Mono, Int> = FxHashMap::default();
        let mut cache: FxHashMap<u16, DVar> = FxHashMap::default();
        for (m, c) in &self.terms {
            for &(v, e) in m.0.iter() {
                let dv = match cache.get(&v) {
                    Some(dv) => *dv,
                    None => {
                        let dv = d(v)?;
                        cache.insert(v, dv);
                        dv
                    }
                };
                let lowered = match dv {
                    DVar::Zero => continue,
                    DVar::One => m.lower(v),
                    DVar::Var(w) => m.lower(v).mul(&Mono::var(w)),
                };
                let k = c * &Int::from(e as i64);
                match acc.get_mut(&lowered) {
                    Some(x) => *x = &*x + &k,
                    None => {
                        acc.insert(lowered, k);
                    }
                }
            }
        }
        Ok(Poly::from_map(acc))
    }

    pub fn partial(&self, v: Indet) -> Poly {
        let id = v.id();
        self.derive(&|w| Ok(if w == id { DVar::One } else { DVar::Zero })).expect("partial derivative is infallible")
    }

    /// Sorted, de-duplicated ids of the indeterminates present.
    pub fn var_ids(&self) -> Vec<u16> {
        let mut ids: Vec<u16> = self.terms.iter().flat_map(|(m, _)| m.0.iter().map(|&(v, _)| v)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn contains(&self, v: Indet) -> bool {
        let id = v.id();
        self.terms.iter().any(|(m, _)| m.exponent(id) > 0)
    }

    pub fn degree_in(&self, v: Indet) -> u16 {
        let id = v.id();
        self.terms.iter().map(|(m, _)| m.exponent(id)).max().unwrap_or(0)
    }

    /// Coefficients of `v^k` for `k = 0..=deg`.
    pub fn coefficients_in(&self, v: Indet) -> Vec<Poly> {
        let id = v.id();
        let deg = self.degree_in(v) as usize;
        let mut parts: Vec<Vec<(Mono, Int)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(id);
            let rest = if e == 0 { m.clone() } else { m.div(&Mono(smallvec::smallvec![(id, e)])).expect("divides") };
            parts[e as usize].push((rest, c.clone()));
        }
        parts.into_iter().map(Poly::from_terms).collect()
    }

    /// Renames indeterminates; unmapped ids are kept.
    pub fn rename(&self, f: &impl Fn(u16) -> u16) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut out = Mono::one();
            for &(v, e) in m.0.iter() {
                out = out.mul(&Mono(smallvec::smallvec![(f(v), e)]));
            }
            (out, c.clone())
        }))
    }

    /// Exact polynomial division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.leading().cloned() {
            let qm = m.div(lm)?;
            if c.gcd(lc) != lc.abs() {
                return None;
            }
            let qc = c.div_exact(lc);
            let step = divisor.mul_mono(&qm).scale(&qc);
            rem = rem.sub(&step);
            quotient.push((qm, qc));
        }
        Some(Poly::from_terms(quotient))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            let o = a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetspace::var::{Dep, JetVar};

    fn p(a: u8, b: u8) -> Poly {
        Poly::var(Indet::Jet(JetVar::at(Dep::P, a, b)))
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let beta = Mono::var(Indet::Beta.id());
        let pt = Mono::var(Indet::Jet(JetVar::at(Dep::P, 1, 0)).id());
        let beta2 = beta.mul(&beta);
        assert!(beta2 > pt);
        assert!(beta > pt);
        assert!(beta.mul(&pt) > beta);
    }

    #[test]
    fn square_of_binomial() {
        let b = Poly::var(Indet::Beta);
        let one = Poly::one();
        let e = one.sub(&b.mul(&p(0, 0)).scale(&Int::from(2)));
        let sq = e.mul(&e);
        assert_eq!(sq.len(), 3);
        assert_eq!(sq, e.pow(2));
    }

    #[test]
    fn exact_division() {
        let a = p(1, 0).add(&p(0, 1));
        let b = p(2, 0).sub(&Poly::var(Indet::Beta));
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.add(&Poly::one()).div_exact(&a), None);
    }
}
