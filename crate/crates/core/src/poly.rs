//! Sparse commutative polynomials over an ordered variable set.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::scalars::{Rational, Scalar};

/// Exponent vector: `(variable, exponent)` pairs, sorted, exponents positive.
pub type PolyMonomial<V> = Vec<(V, u32)>;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly<V: Ord, C> {
    terms: BTreeMap<PolyMonomial<V>, C>,
}

impl<V: Ord + Clone, C: Scalar> Default for Poly<V, C> {
    fn default() -> Self {
        Self::zero()
    }
}

fn mul_monomials<V: Ord + Clone>(a: &[(V, u32)], b: &[(V, u32)]) -> PolyMonomial<V> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            core::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl<V: Ord + Clone, C: Scalar> Poly<V, C> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn var(v: V) -> Self {
        Self::monomial(alloc::vec![(v, 1)], C::one())
    }

    /// `c` times the given exponent vector; the vector is sorted and merged.
    pub fn monomial(mut exps: PolyMonomial<V>, c: C) -> Self {
        exps.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: PolyMonomial<V> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            if e == 0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => merged.push((v, e)),
            }
        }
        let mut p = Self::zero();
        p.add_term(merged, c);
        p
    }

    pub fn add_term(&mut self, mono: PolyMonomial<V>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                existing.add_assign(&c);
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolyMonomial<V>, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &[(V, u32)]) -> C {
        self.terms.get(mono).cloned().unwrap_or_else(C::zero)
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        self.map_coeffs(|c| c.mul(s))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mul_monomials(ma, mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Poly<V, D> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Largest total degree; zero for constants and for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    /// Partial derivative with respect to `v`.
    pub fn partial(&self, v: &V) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|(w, _)| w == v) {
                let e = m[pos].1;
                let mut nm = m.clone();
                if e == 1 {
                    nm.remove(pos);
                } else {
                    nm[pos].1 = e - 1;
                }
                out.add_term(nm, c.mul(&C::from_int(e as i64)));
            }
        }
        out
    }

    /// The derivation sending each variable `v` to `image(v)`.
    pub fn derivation(&self, image: impl Fn(&V) -> Self) -> Self {
        let mut out = Self::zero();
        let vars: alloc::collections::BTreeSet<V> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|(v, _)| v.clone()))
            .collect();
        for v in vars {
            let img = image(&v);
            if img.is_zero() {
                continue;
            }
            out = out.add(&self.partial(&v).mul(&img));
        }
        out
    }

    /// The algebra homomorphism sending each variable `v` to `image(v)`.
    pub fn substitute<W: Ord + Clone>(&self, image: impl Fn(&V) -> Poly<W, C>) -> Poly<W, C> {
        let mut cache: BTreeMap<V, Poly<W, C>> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            for (v, e) in m {
                let base = cache.entry(v.clone()).or_insert_with(|| image(v));
                acc = acc.mul(&base.pow(*e));
            }
            out = out.add(&acc);
        }
        out
    }
}

impl<V: Ord + Clone + fmt::Display, C: Scalar> fmt::Display for Poly<V, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            let cs = alloc::format!("{}", c);
            let compound = cs.contains(' ');
            if m.is_empty() {
                write!(f, "{}", cs)?;
                continue;
            }
            if cs == "-1" {
                f.write_str("-")?;
            } else if cs != "1" {
                if compound {
                    write!(f, "({})*", cs)?;
                } else {
                    write!(f, "{}*", cs)?;
                }
            }
            for (i, (v, e)) in m.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                if *e == 1 {
                    write!(f, "{}", v)?;
                } else {
                    write!(f, "{}^{}", v, e)?;
                }
            }
        }
        Ok(())
    }
}

impl<V: Ord + Clone + fmt::Display, C: Scalar> fmt::Debug for Poly<V, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Rational polynomial convenience alias.
pub type RationalPoly<V> = Poly<V, Rational>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::int;

    type P = Poly<u8, Rational>;

    #[test]
    fn product_and_partial() {
        let x = P::var(0);
        let y = P::var(1);
        let p = x.add(&y).pow(2);
        assert_eq!(p.len(), 3);
        assert_eq!(p.partial(&0), x.scale(&int(2)).add(&y.scale(&int(2))));
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn substitution_is_a_homomorphism() {
        let x = P::var(0);
        let y = P::var(1);
        let p = x.mul(&y).sub(&P::constant(int(3)));
        let q = p.substitute(|v| if *v == 0 { P::var(1) } else { P::var(0).add(&P::one()) });
        let expect = y.mul(&x.add(&P::one())).sub(&P::constant(int(3)));
        assert_eq!(q, expect);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = P::var(0);
        assert!(x.sub(&x).is_zero());
    }
}
