//! The remainders `R_n(I, J)`: the closed form for `n = 1`, the general
//! recursion, the diagonal table and the `f(a)` scan.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::classical::sort_with_sign;
use crate::scalars::{int, rat, Rational, Scalar};

/// Largest `n` accepted by [`table1`].
pub const TABLE_N_MAX: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RemainderError {
    #[error("parity violation: m = {0} is odd")]
    Parity(u64),
    #[error("index list has length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("index list {0:?} is not strictly increasing")]
    NotIncreasing(Vec<u32>),
    #[error("n must be at least 1")]
    ZeroN,
    #[error("n_max = {0} outside 1..={max}", max = TABLE_N_MAX)]
    TableBound(usize),
}

/// A strictly increasing list of non-negative indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexList(Vec<u32>);

impl IndexList {
    /// Accepts only strictly increasing lists.
    pub fn new(entries: Vec<u32>) -> Result<Self, RemainderError> {
        if entries.windows(2).all(|w| w[0] < w[1]) {
            Ok(IndexList(entries))
        } else {
            Err(RemainderError::NotIncreasing(entries))
        }
    }

    /// Determinant semantics: the sign of the sorting permutation and the
    /// sorted list, or `None` when an entry repeats.
    pub fn normalize(entries: &[u32]) -> Option<(i64, IndexList)> {
        sort_with_sign(entries).map(|(s, v)| (s, IndexList(v)))
    }

    /// `(0, 1, …, n)`.
    pub fn range(n: usize) -> Self {
        IndexList((0..=n as u32).collect())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }
}

impl fmt::Display for IndexList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", x)?;
        }
        f.write_str(")")
    }
}

fn sign(x: u32) -> i64 {
    if x % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `m = |I| + |J| + 2n`.
pub fn total_weight(n: usize, i: &[u32], j: &[u32]) -> u64 {
    i.iter().chain(j).map(|&x| x as u64).sum::<u64>() + 2 * n as u64
}

fn check_shape(n: usize, i: &[u32], j: &[u32]) -> Result<(), RemainderError> {
    if n == 0 {
        return Err(RemainderError::ZeroN);
    }
    for l in [i, j] {
        if l.len() != n + 1 {
            return Err(RemainderError::Length {
                expected: n + 1,
                got: l.len(),
            });
        }
    }
    let m = total_weight(n, i, j);
    if m % 2 == 1 {
        return Err(RemainderError::Parity(m));
    }
    Ok(())
}

fn r1_unchecked(i: &[u32], j: &[u32]) -> Rational {
    let (i0, i1, j0, j1) = (i[0], i[1], j[0], j[1]);
    let t = |s: i64, d: u32| rat(s, d as i64);
    let first = t(sign(i0), 2 + i0 + i1) + t(sign(j1), 2 + i1 + j1);
    let second = t(sign(i0), 2 + i0 + i1) + t(sign(j0), 2 + i1 + j0);
    let third = t(sign(i0), 2 + i0 + j0) + t(sign(j1), 2 + j0 + j1);
    let fourth = t(sign(i0), 2 + i0 + j1) + t(sign(j0), 2 + j0 + j1);
    first * int(sign(j0)) - second * int(sign(j1)) + third * int(sign(i1)) - fourth * int(sign(i1))
}

/// The closed form `R_1(I, J)`, extended to arbitrary lists by determinant
/// semantics.
pub fn r1_closed_form(i: &[u32], j: &[u32]) -> Result<Rational, RemainderError> {
    check_shape(1, i, j)?;
    Ok(match (IndexList::normalize(i), IndexList::normalize(j)) {
        (Some((si, i)), Some((sj, j))) => r1_unchecked(&i.0, &j.0) * int(si * sj),
        _ => Rational::zero(),
    })
}

type MemoKey = (usize, Vec<u32>, Vec<u32>);

/// Evaluates the recursion, optionally sharing a memo table across calls.
#[derive(Debug, Default)]
pub struct RemainderEngine {
    memo: Option<BTreeMap<MemoKey, Rational>>,
}

impl RemainderEngine {
    pub fn memoized() -> Self {
        RemainderEngine {
            memo: Some(BTreeMap::new()),
        }
    }

    pub fn unmemoized() -> Self {
        RemainderEngine { memo: None }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.as_ref().map_or(0, BTreeMap::len)
    }

    /// `R_n(I, J)` for arbitrary lists of length `n + 1`.
    pub fn rn(&mut self, n: usize, i: &[u32], j: &[u32]) -> Result<Rational, RemainderError> {
        check_shape(n, i, j)?;
        Ok(match (IndexList::normalize(i), IndexList::normalize(j)) {
            (Some((si, i)), Some((sj, j))) => self.canonical(n, &i.0, &j.0) * int(si * sj),
            _ => Rational::zero(),
        })
    }

    fn canonical(&mut self, n: usize, i: &[u32], j: &[u32]) -> Rational {
        if n == 1 {
            return r1_unchecked(i, j);
        }
        let key = (n, i.to_vec(), j.to_vec());
        if let Some(v) = self.memo.as_ref().and_then(|m| m.get(&key)) {
            return v.clone();
        }
        let v = self.expand(n, i, j);
        if let Some(m) = self.memo.as_mut() {
            m.insert(key, v.clone());
        }
        v
    }

    fn signed(&mut self, n: usize, i: &[u32], j: &[u32]) -> Rational {
        match (IndexList::normalize(i), IndexList::normalize(j)) {
            (Some((si, i)), Some((sj, j))) => self.canonical(n, &i.0, &j.0) * int(si * sj),
            _ => Rational::zero(),
        }
    }

    fn expand(&mut self, n: usize, i: &[u32], j: &[u32]) -> Rational {
        let j0 = j[0];
        let mut total = Rational::zero();
        for r in 0..=n {
            let ir = i[r];
            let i_r: Vec<u32> = i.iter().enumerate().filter(|&(s, _)| s != r).map(|(_, &x)| x).collect();
            let shift = ir + j0 + 2;
            for (c, pref) in [(ir, sign(r as u32) * sign(ir)), (j0, sign(r as u32) * sign(j0))] {
                // I_{r,k}: replace i_k by i_k + i_r + j_0 + 2, then drop i_r.
                for k in (0..=n).filter(|&k| k != r) {
                    let ik = i[k];
                    let sub: Vec<u32> = (0..=n)
                        .filter(|&s| s != r)
                        .map(|s| if s == k { ik + shift } else { i[s] })
                        .collect();
                    let v = self.signed(n - 1, &sub, &j[1..]);
                    if !v.is_zero() {
                        total -= v * rat(pref, (ik + c + 2) as i64);
                    }
                }
                // J'_l: replace j_l by j_l + i_r + j_0 + 2, then drop j_0.
                for l in 1..=n {
                    let jl = j[l];
                    let sub: Vec<u32> = (1..=n).map(|s| if s == l { jl + shift } else { j[s] }).collect();
                    let v = self.signed(n - 1, &i_r, &sub);
                    if !v.is_zero() {
                        total -= v * rat(pref, (jl + c + 2) as i64);
                    }
                }
            }
        }
        total
    }
}

/// `R_n(I, J)` with a fresh memo table.
pub fn rn(n: usize, i: &[u32], j: &[u32]) -> Result<Rational, RemainderError> {
    RemainderEngine::memoized().rn(n, i, j)
}

/// Diagonal values `R_n((0,…,n), (0,…,n))` for `n = 1..=n_max`.
pub fn table1(n_max: usize) -> Result<Vec<(usize, Rational)>, RemainderError> {
    if !(1..=TABLE_N_MAX).contains(&n_max) {
        return Err(RemainderError::TableBound(n_max));
    }
    table1_unbounded(n_max)
}

/// [`table1`] without the resource bound.
pub fn table1_unbounded(n_max: usize) -> Result<Vec<(usize, Rational)>, RemainderError> {
    let mut engine = RemainderEngine::memoized();
    (1..=n_max)
        .map(|n| {
            let d = IndexList::range(n);
            engine.rn(n, d.entries(), d.entries()).map(|v| (n, v))
        })
        .collect()
}

/// Result of [`scan_f`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FScan {
    pub values: Vec<(u32, Rational)>,
    pub first_nonzero: Option<u32>,
    /// `(n² + 2n + a₀)/2`: the algebra is generated by `j⁰, j², …, j^{2m−2}`.
    pub bound_m: Option<u64>,
}

/// `f(a) = R_n((0,…,n), (0,…,n−1,a))` for `a = n, n+2, … ≤ a_max`.
pub fn scan_f(n: usize, a_max: u32) -> Result<FScan, RemainderError> {
    if n == 0 {
        return Err(RemainderError::ZeroN);
    }
    let mut engine = RemainderEngine::memoized();
    let i = IndexList::range(n);
    let mut values = Vec::new();
    let mut a = n as u32;
    while a <= a_max {
        let mut j: Vec<u32> = (0..n as u32).collect();
        j.push(a);
        values.push((a, engine.rn(n, i.entries(), &j)?));
        a += 2;
    }
    let first_nonzero = values.iter().find(|(_, v)| !v.is_zero()).map(|(a, _)| *a);
    let bound_m = first_nonzero.map(|a0| ((n * n + 2 * n) as u64 + a0 as u64) / 2);
    Ok(FScan {
        values,
        first_nonzero,
        bound_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert_eq!(r1_closed_form(&[0, 1], &[0, 1]).unwrap(), rat(5, 4));
        assert_eq!(r1_closed_form(&[0, 1], &[0, 3]).unwrap(), rat(14, 15));
        assert_eq!(r1_closed_form(&[0, 1], &[0, 2]), Err(RemainderError::Parity(5)));
    }

    #[test]
    fn diagonal_values() {
        let t = table1(3).unwrap();
        assert_eq!(t[0].1, rat(5, 4));
        assert_eq!(t[1].1, rat(149, 600));
        assert_eq!(t[2].1, rat(-2419, 705600));
        assert_eq!(table1(9), Err(RemainderError::TableBound(9)));
    }

    #[test]
    fn normalization_is_alternating() {
        assert_eq!(rn(2, &[0, 1, 1], &[0, 1, 3]).unwrap(), Rational::zero());
        let a = rn(2, &[0, 1, 3], &[0, 2, 4]).unwrap();
        let b = rn(2, &[1, 0, 3], &[0, 2, 4]).unwrap();
        assert_eq!(a, -b);
        assert_eq!(IndexList::normalize(&[2, 0, 1]).unwrap(), (1, IndexList(alloc::vec![0, 1, 2])));
    }

    #[test]
    fn memo_agrees_with_plain_recursion() {
        let mut memo = RemainderEngine::memoized();
        let mut plain = RemainderEngine::unmemoized();
        let i = [0, 2, 3];
        let j = [1, 2, 4];
        assert_eq!(memo.rn(2, &i, &j).unwrap(), plain.rn(2, &i, &j).unwrap());
        assert!(memo.memo_len() > 0);
        assert_eq!(plain.memo_len(), 0);
    }

    #[test]
    fn scan_for_one_boson() {
        let s = scan_f(1, 5).unwrap();
        assert_eq!(s.values[0], (1, rat(5, 4)));
        assert_eq!(s.values[1], (3, rat(14, 15)));
        assert_eq!(s.first_nonzero, Some(1));
        assert_eq!(s.bound_m, Some(2));
    }
}
