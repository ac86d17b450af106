//! Classical invariant theory on `Sym ⊕_{j≥0} V_j`.
//!
//! Variables `x[i,j]` stand for the `i`-th basis vector of the `j`-th copy
//! `V_j` (internally 0-based, rendered 1-based). The ∂-ring structure sends
//! `x[i,j]` to `x[i,j+1]`. For sl₂ the basis is `(x, y, h)`, so `a^x_j`,
//! `a^y_j`, `a^h_j` are `x[1,j]`, `x[2,j]`, `x[3,j]`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::enumerate::weighted_multisets;
use crate::liedata::ActionSpec;
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::scalars::{int, rat, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("index list {0:?} must be strictly increasing with {1} entries")]
    IndexList(Vec<u32>, usize),
    #[error("cubic generator needs k < l < m, got ({0}, {1}, {2})")]
    CubicIndices(u32, u32, u32),
}

/// The variable `x[gen, order]`: basis vector `gen` in the copy `V_order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub gen: usize,
    pub order: u32,
}

impl Var {
    pub fn new(gen: usize, order: u32) -> Self {
        Var { gen, order }
    }

    pub fn weight(&self) -> u32 {
        self.order + 1
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x[{},{}]", self.gen + 1, self.order)
    }
}

pub type ClassicalPoly<C = Rational> = Poly<Var, C>;

/// Abstract generator symbols: `Q[a,b]` (symmetric) and, for sl₂, `C[k,l,m]`
/// (alternating, stored with sorted indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QSym {
    Q(u32, u32),
    C(u32, u32, u32),
}

impl QSym {
    pub fn q(a: u32, b: u32) -> Self {
        QSym::Q(a.min(b), a.max(b))
    }

    /// Sorted cubic symbol with the sign of the sorting permutation; `None`
    /// on a repeated index.
    pub fn c(k: u32, l: u32, m: u32) -> Option<(i64, Self)> {
        let (sign, idx) = sort_with_sign(&[k, l, m])?;
        Some((sign, QSym::C(idx[0], idx[1], idx[2])))
    }

    pub fn weight(&self) -> u32 {
        match *self {
            QSym::Q(a, b) => a + b + 2,
            QSym::C(k, l, m) => k + l + m + 3,
        }
    }
}

impl fmt::Display for QSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QSym::Q(a, b) => write!(f, "Q[{},{}]", a, b),
            QSym::C(k, l, m) => write!(f, "C[{},{},{}]", k, l, m),
        }
    }
}

pub type QSymbolPoly = Poly<QSym, Rational>;

/// Sorts a small index list, returning the permutation sign, or `None` if an
/// entry repeats.
pub fn sort_with_sign(entries: &[u32]) -> Option<(i64, Vec<u32>)> {
    let mut v = entries.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

fn x(gen: usize, order: u32) -> ClassicalPoly {
    ClassicalPoly::var(Var::new(gen, order))
}

/// Weight of a classical monomial: `Σ (j+1)·e` over `x[i,j]^e`.
pub fn classical_weight(mono: &[(Var, u32)]) -> u32 {
    mono.iter().map(|(v, e)| v.weight() * e).sum()
}

/// `q_{a,b} = Σ_i x[i,a]·x[i,b]` in `n` variables per copy.
pub fn weyl_q(n: usize, a: u32, b: u32) -> ClassicalPoly {
    (0..n).fold(ClassicalPoly::zero(), |acc, i| acc.add(&x(i, a).mul(&x(i, b))))
}

const SL2_X: usize = 0;
const SL2_Y: usize = 1;
const SL2_H: usize = 2;

/// `q_ij = a^h_i a^h_j + 2 a^x_i a^y_j + 2 a^x_j a^y_i`.
pub fn sl2_q(i: u32, j: u32) -> ClassicalPoly {
    let two = ClassicalPoly::constant(int(2));
    x(SL2_H, i)
        .mul(&x(SL2_H, j))
        .add(&two.mul(&x(SL2_X, i)).mul(&x(SL2_Y, j)))
        .add(&two.mul(&x(SL2_X, j)).mul(&x(SL2_Y, i)))
}

/// `c_klm`: the 3×3 determinant with rows `(a^h, a^x, a^y)` at `k`, `l`, `m`.
pub fn sl2_c(k: u32, l: u32, m: u32) -> Result<ClassicalPoly, ClassicalError> {
    if !(k < l && l < m) {
        return Err(ClassicalError::CubicIndices(k, l, m));
    }
    Ok(sl2_c_unchecked(k, l, m))
}

fn sl2_c_unchecked(k: u32, l: u32, m: u32) -> ClassicalPoly {
    let rows = [k, l, m];
    let cols = [SL2_H, SL2_X, SL2_Y];
    determinant(3, |r, c| x(cols[c], rows[r]))
}

/// Leibniz expansion of an `n×n` determinant with polynomial entries.
fn determinant<V: Ord + Clone>(n: usize, entry: impl Fn(usize, usize) -> Poly<V, Rational>) -> Poly<V, Rational> {
    let mut out = Poly::zero();
    for (sign, perm) in permutations(n) {
        let mut term = Poly::constant(int(sign));
        for (r, &c) in perm.iter().enumerate() {
            term = term.mul(&entry(r, c));
        }
        out = out.add(&term);
    }
    out
}

fn permutations(n: usize) -> Vec<(i64, Vec<usize>)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            (if inversions % 2 == 0 { 1 } else { -1 }, p)
        })
        .collect()
}

fn check_index_list(list: &[u32], len: usize) -> Result<(), ClassicalError> {
    if list.len() != len || list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ClassicalError::IndexList(list.to_vec(), len));
    }
    Ok(())
}

fn qs(a: u32, b: u32) -> QSymbolPoly {
    QSymbolPoly::var(QSym::q(a, b))
}

fn cs(k: u32, l: u32, m: u32) -> QSymbolPoly {
    match QSym::c(k, l, m) {
        Some((sign, sym)) => QSymbolPoly::var(sym).scale(&int(sign)),
        None => QSymbolPoly::zero(),
    }
}

/// The `(n+1)×(n+1)` determinant `d_{I,J}` in the symbols `Q[i_r, j_s]`.
pub fn det_relation(n: usize, rows: &[u32], cols: &[u32]) -> Result<QSymbolPoly, ClassicalError> {
    check_index_list(rows, n + 1)?;
    check_index_list(cols, n + 1)?;
    Ok(determinant(n + 1, |r, c| qs(rows[r], cols[c])))
}

/// `Q[a,b] ↦ q_{a,b}` in `n` variables per copy.
pub fn substitute(p: &QSymbolPoly, n: usize) -> ClassicalPoly {
    p.substitute(|s| match *s {
        QSym::Q(a, b) => weyl_q(n, a, b),
        QSym::C(..) => panic!("cubic symbols need the sl2 substitution"),
    })
}

/// `Q[a,b] ↦ q_ab`, `C[k,l,m] ↦ c_klm` in the sl₂ variables.
pub fn substitute_sl2(p: &QSymbolPoly) -> ClassicalPoly {
    p.substitute(|s| match *s {
        QSym::Q(a, b) => sl2_q(a, b),
        QSym::C(k, l, m) => sl2_c_unchecked(k, l, m),
    })
}

/// `q_ij c_klm − q_kj c_ilm − q_lj c_kim − q_mj c_kli`, i.e. Cramer's rule
/// for the `i`-th vector in terms of the `k, l, m`-th.
pub fn sl2_relation_type1(i: u32, j: u32, k: u32, l: u32, m: u32) -> QSymbolPoly {
    qs(i, j)
        .mul(&cs(k, l, m))
        .sub(&qs(k, j).mul(&cs(i, l, m)))
        .sub(&qs(l, j).mul(&cs(k, i, m)))
        .sub(&qs(m, j).mul(&cs(k, l, i)))
}

/// `c_ijk c_lmn + ¼ det[q_{(i,j,k)×(l,m,n)}]`.
pub fn sl2_relation_type2(i: u32, j: u32, k: u32, l: u32, m: u32, n: u32) -> QSymbolPoly {
    let rows = [i, j, k];
    let cols = [l, m, n];
    let det = determinant(3, |r, c| qs(rows[r], cols[c]));
    cs(i, j, k).mul(&cs(l, m, n)).add(&det.scale(&rat(1, 4)))
}

/// Symbol-level ∂: `Q[a,b] ↦ Q[a+1,b] + Q[a,b+1]`, `C[k,l,m]` by Leibniz.
pub fn symbol_derivative(p: &QSymbolPoly) -> QSymbolPoly {
    p.derivation(|s| match *s {
        QSym::Q(a, b) => qs(a + 1, b).add(&qs(a, b + 1)),
        QSym::C(k, l, m) => cs(k + 1, l, m).add(&cs(k, l + 1, m)).add(&cs(k, l, m + 1)),
    })
}

/// The polarization operator `D_{r,s} = Σ_i x[i,r] ∂/∂x[i,s]`.
pub fn polarization<C: Scalar>(r: u32, s: u32, p: &ClassicalPoly<C>) -> ClassicalPoly<C> {
    p.derivation(|v| {
        if v.order == s {
            ClassicalPoly::var(Var::new(v.gen, r))
        } else {
            ClassicalPoly::zero()
        }
    })
}

/// The ∂-ring derivation `x[i,j] ↦ x[i,j+1]`.
pub fn d_ring_derivative<C: Scalar>(p: &ClassicalPoly<C>) -> ClassicalPoly<C> {
    p.derivation(|v| ClassicalPoly::var(Var::new(v.gen, v.order + 1)))
}

/// Image of a basis vector under a matrix, as a linear form in one copy.
fn transform_var(m: &Matrix<Rational>, v: &Var) -> ClassicalPoly {
    let mut out = ClassicalPoly::zero();
    for i in 0..m.rows() {
        let c = m.get(i, v.gen);
        if !c.is_zero() {
            out = out.add(&x(i, v.order).scale(c));
        }
    }
    out
}

/// Applies the Lie algebra element `rho` as a derivation, diagonally on
/// every copy `V_j`.
pub fn lie_derivation(rho: &Matrix<Rational>, p: &ClassicalPoly) -> ClassicalPoly {
    p.derivation(|v| transform_var(rho, v))
}

/// Applies a group element as an algebra automorphism.
pub fn group_transform(g: &Matrix<Rational>, p: &ClassicalPoly) -> ClassicalPoly {
    p.substitute(|v| transform_var(g, v))
}

/// True iff every Lie generator annihilates `p` and every finite element
/// fixes it.
pub fn lie_invariance_check(action: &ActionSpec, p: &ClassicalPoly) -> bool {
    action.lie_generators.iter().all(|rho| lie_derivation(rho, p).is_zero())
        && action.finite_elements.iter().all(|g| group_transform(g, p) == *p)
}

/// Coordinates of a list of polynomials against their joint monomial support.
fn coordinate_rows(polys: &[ClassicalPoly]) -> (Vec<Vec<Rational>>, usize) {
    let mut support = alloc::collections::BTreeMap::new();
    for p in polys {
        for (m, _) in p.terms() {
            let next = support.len();
            support.entry(m.clone()).or_insert(next);
        }
    }
    let dim = support.len();
    let rows = polys
        .iter()
        .map(|p| {
            let mut row = vec![Rational::zero(); dim];
            for (m, c) in p.terms() {
                row[support[m]] = c.clone();
            }
            row
        })
        .collect();
    (rows, dim)
}

/// Dimension of the span of the given polynomials.
pub fn span_dimension(polys: &[ClassicalPoly]) -> usize {
    let (rows, dim) = coordinate_rows(polys);
    if rows.is_empty() || dim == 0 {
        return 0;
    }
    Matrix::from_rows(rows).rank()
}

/// Whether `target` lies in the span of `basis`.
pub fn in_span(basis: &[ClassicalPoly], target: &ClassicalPoly) -> bool {
    if target.is_zero() {
        return true;
    }
    let mut all = basis.to_vec();
    all.push(target.clone());
    span_dimension(&all) == span_dimension(basis)
}

/// Weight-`w` dimension of the ring generated by the `q_{a,b}` in `n`
/// variables per copy: the span of all `q`-monomials of weight `w`, which is
/// `ℚ[Q]_w` modulo the determinant ideal.
pub fn invariant_ring_dimension(n: usize, w: u32) -> usize {
    if w == 0 {
        return 1;
    }
    let mut symbols = Vec::new();
    for a in 0..w {
        for b in a..w {
            if a + b + 2 <= w {
                symbols.push((QSym::q(a, b), a + b + 2, 1u32));
            }
        }
    }
    let polys: Vec<ClassicalPoly> = weighted_multisets(&symbols, w, u32::MAX)
        .into_iter()
        .map(|ms| {
            let mono: QSymbolPoly = ms
                .iter()
                .fold(QSymbolPoly::one(), |acc, &idx| acc.mul(&QSymbolPoly::var(symbols[idx].0)));
            substitute(&mono, n)
        })
        .collect();
    span_dimension(&polys)
}

/// Greedy minimal ∂-ring generating set.
///
/// Candidates are taken in the given order (callers sort by weight, then
/// degree); a candidate survives unless it lies in the weight-graded span of
/// products of derivatives of earlier survivors. Candidates must be
/// weight-homogeneous. Returns the indices of the survivors.
pub fn minimal_d_ring_generators(candidates: &[(ClassicalPoly, u32)]) -> Vec<usize> {
    let mut survivors: Vec<usize> = Vec::new();
    for (idx, (poly, w)) in candidates.iter().enumerate() {
        let mut items = Vec::new();
        for &s in &survivors {
            let sw = candidates[s].1;
            let mut d = 0;
            let mut p = candidates[s].0.clone();
            while sw + d <= *w {
                items.push((p.clone(), sw + d, 1u32));
                p = d_ring_derivative(&p);
                d += 1;
            }
        }
        let span: Vec<ClassicalPoly> = weighted_multisets(&items, *w, u32::MAX)
            .into_iter()
            .map(|ms| {
                ms.iter()
                    .fold(ClassicalPoly::one(), |acc, &i| acc.mul(&items[i].0))
            })
            .collect();
        if !in_span(&span, poly) {
            survivors.push(idx);
        }
    }
    survivors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liedata::LieSpec;

    #[test]
    fn weyl_q_rank_one() {
        assert_eq!(weyl_q(1, 0, 0), x(0, 0).pow(2));
    }

    #[test]
    fn sl2_quadratic_diagonal() {
        let expect = x(SL2_H, 0)
            .pow(2)
            .add(&x(SL2_X, 0).mul(&x(SL2_Y, 0)).scale(&int(4)));
        assert_eq!(sl2_q(0, 0), expect);
    }

    #[test]
    fn sl2_cubic_has_six_unit_terms() {
        let c = sl2_c(0, 1, 2).unwrap();
        assert_eq!(c.len(), 6);
        let mut plus = 0;
        for (_, coeff) in c.terms() {
            assert!(coeff == &int(1) || coeff == &int(-1));
            if coeff == &int(1) {
                plus += 1;
            }
        }
        assert_eq!(plus, 3);
        // a^h_0 a^x_1 a^y_2 is the diagonal term.
        let diag = vec![(Var::new(SL2_X, 1), 1), (Var::new(SL2_Y, 2), 1), (Var::new(SL2_H, 0), 1)];
        assert_eq!(
            c.coeff(&ClassicalPoly::monomial(diag, int(1)).terms().next().unwrap().0.clone()),
            int(1)
        );
        assert!(sl2_c(1, 1, 2).is_err());
    }

    #[test]
    fn two_by_two_determinant() {
        let d = det_relation(1, &[0, 1], &[0, 1]).unwrap();
        let expect = qs(0, 0).mul(&qs(1, 1)).sub(&qs(0, 1).pow(2));
        assert_eq!(d, expect);
        assert!(substitute(&d, 1).is_zero());
        assert!(!substitute(&d, 2).is_zero());
        assert!(det_relation(1, &[0, 0], &[0, 1]).is_err());
        assert!(det_relation(2, &[0, 1], &[0, 1]).is_err());
    }

    #[test]
    fn sl2_relations_vanish_on_examples() {
        assert!(substitute_sl2(&sl2_relation_type1(0, 0, 0, 1, 2)).is_zero());
        assert!(substitute_sl2(&sl2_relation_type1(3, 1, 0, 1, 2)).is_zero());
        assert!(substitute_sl2(&sl2_relation_type1(2, 0, 1, 0, 0)).is_zero());
        assert!(substitute_sl2(&sl2_relation_type2(0, 1, 2, 0, 1, 2)).is_zero());
        let t2 = sl2_relation_type2(0, 1, 2, 0, 1, 2);
        let cc = vec![(QSym::C(0, 1, 2), 2)];
        assert_eq!(t2.coeff(&cc), int(1));
    }

    #[test]
    fn polarization_and_derivative_of_q00() {
        for n in 1..=3 {
            let q00 = weyl_q(n, 0, 0);
            let two_q01 = weyl_q(n, 0, 1).scale(&int(2));
            assert_eq!(polarization(1, 0, &q00), two_q01);
            assert_eq!(d_ring_derivative(&q00), two_q01);
            assert_eq!(polarization(0, 0, &q00), q00.scale(&int(2)));
        }
    }

    #[test]
    fn invariance_examples() {
        assert!(lie_invariance_check(&ActionSpec::orthogonal(3), &weyl_q(3, 0, 1)));
        let ad = ActionSpec::adjoint(&LieSpec::sl2());
        assert!(lie_invariance_check(&ad, &sl2_c(0, 1, 2).unwrap()));
        assert!(lie_invariance_check(&ad, &sl2_q(1, 3)));
        assert!(!lie_invariance_check(&ActionSpec::orthogonal(2), &x(0, 0)));
    }

    #[test]
    fn derivative_commutes_with_substitution() {
        let d = det_relation(1, &[0, 2], &[1, 3]).unwrap();
        for n in 1..=2 {
            assert_eq!(
                d_ring_derivative(&substitute(&d, n)),
                substitute(&symbol_derivative(&d), n)
            );
        }
    }

    #[test]
    fn rank_one_graded_dimensions() {
        // x_0^2 at weight 2; x_0x_1 at weight 3; x_0x_2, x_1^2, x_0^4 at weight 4.
        assert_eq!(invariant_ring_dimension(1, 2), 1);
        assert_eq!(invariant_ring_dimension(1, 3), 1);
        assert_eq!(invariant_ring_dimension(1, 4), 3);
    }

    #[test]
    fn minimal_generators_rank_one() {
        // q_{0,0}, q_{0,1}, q_{1,1}, q_{0,2}: q_{0,1} = ∂q_{0,0}/2 is redundant,
        // and q_{1,1}, q_{0,2} share one new direction at weight 4.
        let cands = vec![
            (weyl_q(1, 0, 0), 2),
            (weyl_q(1, 0, 1), 3),
            (weyl_q(1, 0, 2), 4),
            (weyl_q(1, 1, 1), 4),
        ];
        assert_eq!(minimal_d_ring_generators(&cands), vec![0, 2]);
    }
}
