//! Exact coefficient arithmetic: big rationals, polynomials in the formal
//! level `k`, and the rational-function field ℚ(k).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

/// Reduced fraction of big integers with a positive denominator.
pub type Rational = BigRational;

/// Builds the rational `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at level k = {0}")]
    PoleAtLevel(Rational),
}

/// Coefficient field interface shared by [`Rational`] and [`LevelScalar`].
///
/// The linear algebra, polynomial and state types are generic over it.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_rational(r: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn add_assign(&mut self, other: &Self) {
        *self = Scalar::add(&*self, other);
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
}

/// Polynomial in `k` with rational coefficients, stored by ascending power.
///
/// Never carries trailing zeros; the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LevelPoly {
    coeffs: Vec<Rational>,
}

impl LevelPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(num_traits::Zero::is_zero) {
            coeffs.pop();
        }
        LevelPoly { coeffs }
    }

    pub fn zero() -> Self {
        LevelPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(num_traits::One::one())
    }

    /// The monomial `k`.
    pub fn k() -> Self {
        LevelPoly {
            coeffs: vec![num_traits::Zero::zero(), num_traits::One::one()],
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(num_traits::Zero::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(c);
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        LevelPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LevelPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let c = &rem[shift + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &c * d;
            }
            quot[shift] = c;
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Scales to leading coefficient one. The zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) if !l.is_one() => self.scale(&l.recip()),
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, at: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    /// All rational roots, ascending, without multiplicity.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        // Clear denominators to an integer polynomial.
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let mut roots = Vec::new();
        // Factor out k = 0.
        let low = ints.iter().position(|c| !num_traits::Zero::is_zero(c)).unwrap_or(0);
        if low > 0 {
            roots.push(Rational::zero());
        }
        let ints = &ints[low..];
        if ints.len() > 1 {
            let p_divs = divisors(&ints[0].abs());
            let q_divs = divisors(&ints[ints.len() - 1].abs());
            for p in &p_divs {
                for q in &q_divs {
                    for sign in [1i64, -1] {
                        let cand = Rational::new(p * BigInt::from(sign), q.clone());
                        if self.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

/// Positive divisors by trial division; adequate for the small constants
/// that show up as level denominators.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::from(1);
    while &d * &d <= *n {
        if num_traits::Zero::is_zero(&(n % &d)) {
            out.push(d.clone());
            let other = n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}

fn fmt_rational_coeff(c: &Rational) -> String {
    alloc::format!("{}", c)
}

impl fmt::Display for LevelPoly {
    /// Ascending powers: `1 + 2*k - k^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match p {
                0 => f.write_str(&fmt_rational_coeff(&abs))?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{}*", abs)?;
                    }
                    if p == 1 {
                        f.write_str("k")?;
                    } else {
                        write!(f, "k^{}", p)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LevelPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// k-degree of a level scalar; the zero scalar has degree `NegInfinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KDegree {
    NegInfinity,
    Finite(i64),
}

impl KDegree {
    pub fn plus(self, other: KDegree) -> KDegree {
        match (self, other) {
            (KDegree::Finite(a), KDegree::Finite(b)) => KDegree::Finite(a + b),
            _ => KDegree::NegInfinity,
        }
    }
}

impl PartialOrd for KDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (KDegree::NegInfinity, KDegree::NegInfinity) => Ordering::Equal,
            (KDegree::NegInfinity, _) => Ordering::Less,
            (_, KDegree::NegInfinity) => Ordering::Greater,
            (KDegree::Finite(a), KDegree::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for KDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KDegree::NegInfinity => f.write_str("-inf"),
            KDegree::Finite(d) => write!(f, "{}", d),
        }
    }
}

/// Element of ℚ(k): a reduced fraction with monic denominator.
///
/// Normalization makes equality and hashing structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LevelScalar {
    num: LevelPoly,
    den: LevelPoly,
}

impl LevelScalar {
    pub fn new(num: LevelPoly, den: LevelPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: LevelPoly, den: LevelPoly) -> Self {
        if num.is_zero() {
            return Self::from_poly(LevelPoly::zero());
        }
        if den.degree() == Some(0) {
            let inv = den.coeffs[0].recip();
            return Self::from_poly(num.scale(&inv));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading().expect("nonzero denominator").recip();
        LevelScalar {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }

    pub fn from_poly(num: LevelPoly) -> Self {
        LevelScalar {
            num,
            den: LevelPoly::one(),
        }
    }

    /// The formal level `k`.
    pub fn k() -> Self {
        Self::from_poly(LevelPoly::k())
    }

    pub fn numer(&self) -> &LevelPoly {
        &self.num
    }

    pub fn denom(&self) -> &LevelPoly {
        &self.den
    }

    /// Rational value when the scalar does not depend on `k`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn k_degree(&self) -> KDegree {
        match (self.num.degree(), self.den.degree()) {
            (Some(n), Some(d)) => KDegree::Finite(n as i64 - d as i64),
            _ => KDegree::NegInfinity,
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        if other.num.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalized(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    /// Specializes `k` to `at`, refusing poles.
    pub fn evaluate_at(&self, at: &Rational) -> Result<Rational, ScalarError> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return Err(ScalarError::PoleAtLevel(at.clone()));
        }
        Ok(self.num.eval(at) / d)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return <Self as Scalar>::zero();
        }
        LevelScalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }
}

impl Scalar for LevelScalar {
    fn zero() -> Self {
        Self::from_poly(LevelPoly::zero())
    }

    fn one() -> Self {
        Self::from_poly(LevelPoly::one())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return Self::normalized(self.num.add(&other.num), self.den.clone());
        }
        Self::normalized(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    fn sub(&self, other: &Self) -> Self {
        Scalar::add(self, &Scalar::neg(other))
    }

    fn mul(&self, other: &Self) -> Self {
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    fn neg(&self) -> Self {
        LevelScalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::normalized(self.den.clone(), self.num.clone()))
        }
    }

    fn from_rational(r: &Rational) -> Self {
        Self::from_poly(LevelPoly::constant(r.clone()))
    }

    fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }
}

impl From<Rational> for LevelScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(&r)
    }
}

impl From<LevelPoly> for LevelScalar {
    fn from(p: LevelPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for LevelScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for LevelScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(cs: &[i64]) -> LevelPoly {
        LevelPoly::new(cs.iter().map(|&c| int(c)).collect())
    }

    fn frac(n: &[i64], d: &[i64]) -> LevelScalar {
        LevelScalar::new(poly(n), poly(d)).unwrap()
    }

    #[test]
    fn add_linear() {
        let a = frac(&[1, 1], &[1]);
        let b = frac(&[-1, 1], &[1]);
        assert_eq!(Scalar::add(&a, &b), frac(&[0, 2], &[1]));
    }

    #[test]
    fn cancels_common_factor() {
        let a = frac(&[-1, 0, 1], &[1]);
        let b = frac(&[-1, 1], &[1]);
        assert_eq!(a.checked_div(&b).unwrap(), frac(&[1, 1], &[1]));
    }

    #[test]
    fn inverse_pair() {
        let a = frac(&[1], &[2, 1]);
        let b = frac(&[2, 1], &[1]);
        assert!(Scalar::mul(&a, &b).is_one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = frac(&[1], &[1]);
        assert_eq!(
            a.checked_div(&LevelScalar::zero()),
            Err(ScalarError::DivisionByZero)
        );
        assert!(LevelScalar::new(poly(&[1]), LevelPoly::zero()).is_err());
    }

    #[test]
    fn denominators_are_monic() {
        let a = frac(&[3], &[4, 2]);
        assert_eq!(a.denom(), &poly(&[2, 1]));
        assert_eq!(a.numer(), &LevelPoly::constant(rat(3, 2)));
    }

    #[test]
    fn k_degrees() {
        assert_eq!(frac(&[3, 0, 1], &[1]).k_degree(), KDegree::Finite(2));
        assert_eq!(frac(&[1], &[2, 1]).k_degree(), KDegree::Finite(-1));
        assert_eq!(LevelScalar::zero().k_degree(), KDegree::NegInfinity);
    }

    #[test]
    fn evaluation() {
        let a = frac(&[0, 3], &[2, 1]);
        assert_eq!(a.evaluate_at(&int(1)).unwrap(), int(1));
        let b = frac(&[1], &[2, 1]);
        assert_eq!(
            b.evaluate_at(&int(-2)),
            Err(ScalarError::PoleAtLevel(int(-2)))
        );
        assert_eq!(frac(&[0, 0, 1], &[1]).evaluate_at(&int(0)).unwrap(), int(0));
    }

    #[test]
    fn rendering() {
        assert_eq!(alloc::format!("{}", frac(&[0, 3], &[2, 1])), "(3*k)/(2 + k)");
        assert_eq!(alloc::format!("{}", frac(&[1, -2, 1], &[1])), "1 - 2*k + k^2");
        assert_eq!(alloc::format!("{}", LevelScalar::zero()), "0");
        assert_eq!(alloc::format!("{}", LevelScalar::k().neg()), "-k");
    }

    #[test]
    fn rational_roots() {
        // 2k^2 + k - 1 = (2k - 1)(k + 1)
        assert_eq!(poly(&[-1, 1, 2]).rational_roots(), vec![int(-1), rat(1, 2)]);
        assert_eq!(poly(&[0, 0, 1]).rational_roots(), vec![int(0)]);
        assert!(poly(&[2, 0, 1]).rational_roots().is_empty());
    }

    fn small_poly() -> impl Strategy<Value = LevelPoly> {
        proptest::collection::vec(-4i64..=4, 0..3).prop_map(|v| poly(&v))
    }

    fn small_scalar() -> impl Strategy<Value = LevelScalar> {
        (small_poly(), small_poly())
            .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
            .prop_map(|(n, d)| LevelScalar::new(n, d).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms(a in small_scalar(), b in small_scalar(), c in small_scalar()) {
            let ab_c = Scalar::mul(&Scalar::mul(&a, &b), &c);
            let a_bc = Scalar::mul(&a, &Scalar::mul(&b, &c));
            prop_assert_eq!(ab_c, a_bc);
            let lhs = Scalar::mul(&a, &Scalar::add(&b, &c));
            let rhs = Scalar::add(&Scalar::mul(&a, &b), &Scalar::mul(&a, &c));
            prop_assert_eq!(lhs, rhs);
            let sum = Scalar::add(&Scalar::add(&a, &b), &c);
            prop_assert_eq!(sum, Scalar::add(&a, &Scalar::add(&b, &c)));
            if let Some(inv) = a.inv() {
                prop_assert!(Scalar::mul(&a, &inv).is_one());
            }
            prop_assert!(Scalar::sub(&a, &a).is_zero());
        }

        #[test]
        fn k_degree_laws(a in small_scalar(), b in small_scalar()) {
            if !a.is_zero() && !b.is_zero() {
                prop_assert_eq!(Scalar::mul(&a, &b).k_degree(), a.k_degree().plus(b.k_degree()));
            }
            prop_assert!(Scalar::add(&a, &b).k_degree() <= a.k_degree().max(b.k_degree()));
        }
    }
}
