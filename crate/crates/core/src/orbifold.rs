//! Invariant subalgebras, normally ordered polynomials in named generators,
//! quantum corrections of classical relations, the projection `pr_m`, the
//! direct remainder computation and the decoupling solver.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::classical::{det_relation, ClassicalError, QSym, QSymbolPoly};
use crate::enumerate::weighted_multisets;
use crate::liedata::{ActionSpec, LieSpec};
use crate::linalg::{echelon_basis, Matrix};
use crate::scalars::{int, LevelScalar, Rational, Scalar, ScalarError};
use crate::vertex::{Level, Monomial, State, StateWeight, VertexAlgebra, VertexError};

/// Default cap on search weights.
pub const DEFAULT_MAX_WEIGHT: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbifoldError {
    #[error("unknown symbol {0}")]
    UnknownSymbol(Symbol),
    #[error("dictionary entry {symbol}: {reason}")]
    DictionaryMismatch { symbol: Symbol, reason: String },
    #[error("parity violation: m = {0} is odd")]
    Parity(u64),
    #[error("weight {weight} exceeds the search budget {max}")]
    WeightBudget { weight: u64, max: u32 },
    #[error("quantum-correction descent is stuck at degree {0}")]
    DescentFailure(usize),
    #[error("state is not weight-homogeneous")]
    NotHomogeneous,
    #[error("{0} is not invariant under the action")]
    NotInvariant(String),
    #[error("term {0} lies outside the degree-2 space A_{1}")]
    OutsideA(String, u64),
    #[error("the action has no matrices of size {0}")]
    ActionDimension(usize),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Vertex(#[from] VertexError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A generator name in a declared alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// `Ω_{a,b}` with `a ≤ b`.
    Omega(u32, u32),
    /// `J^{m} = Ω_{0,m}` as a separate name.
    J(u32),
    /// `Q̃_{i,j}` with `i ≤ j`.
    Q(u32, u32),
    /// `C̃_{k,l,m}` with `k < l < m`.
    C(u32, u32, u32),
    Named(String),
}

impl Symbol {
    pub fn omega(a: u32, b: u32) -> Self {
        Symbol::Omega(a.min(b), a.max(b))
    }

    pub fn q(i: u32, j: u32) -> Self {
        Symbol::Q(i.min(j), i.max(j))
    }

    /// The `Ω` symbol for a classical `Q[a,b]`; cubic symbols have none.
    pub fn omega_of(q: &QSym) -> Option<(i64, Symbol)> {
        match *q {
            QSym::Q(a, b) => Some((1, Symbol::omega(a, b))),
            QSym::C(..) => None,
        }
    }

    /// The sl₂ symbol for a classical `Q[i,j]` or `C[k,l,m]`.
    pub fn sl2_of(q: &QSym) -> Option<(i64, Symbol)> {
        match *q {
            QSym::Q(a, b) => Some((1, Symbol::q(a, b))),
            QSym::C(k, l, m) => Some((1, Symbol::C(k, l, m))),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Omega(a, b) => write!(f, "Omega[{},{}]", a, b),
            Symbol::J(m) => write!(f, "J[{}]", m),
            Symbol::Q(i, j) => write!(f, "Q[{},{}]", i, j),
            Symbol::C(k, l, m) => write!(f, "C[{},{},{}]", k, l, m),
            Symbol::Named(s) => f.write_str(s),
        }
    }
}

/// A factor `∂^d s` of a normally ordered monomial.
pub type NopFactor = (Symbol, u32);

/// A ℚ(k)-combination of normally ordered monomials in named generators.
///
/// Factors of each monomial are kept sorted by symbol, then derivative count;
/// evaluation is the right-nested Wick product in that order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalNop {
    terms: BTreeMap<Vec<NopFactor>, LevelScalar>,
}

impl FormalNop {
    pub fn zero() -> Self {
        FormalNop::default()
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::term(vec![(s, 0)], LevelScalar::one())
    }

    pub fn term(mut factors: Vec<NopFactor>, c: LevelScalar) -> Self {
        factors.sort();
        let mut out = FormalNop::zero();
        out.add_term(factors, c);
        out
    }

    pub fn add_term(&mut self, mut factors: Vec<NopFactor>, c: LevelScalar) {
        if c.is_zero() {
            return;
        }
        factors.sort();
        match self.terms.get_mut(&factors) {
            Some(e) => {
                e.add_assign(&c);
                if e.is_zero() {
                    self.terms.remove(&factors);
                }
            }
            None => {
                self.terms.insert(factors, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<NopFactor>, &LevelScalar)> {
        self.terms.iter()
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

    pub fn add(&self, other: &FormalNop) -> FormalNop {
        let mut out = self.clone();
        for (f, c) in &other.terms {
            out.add_term(f.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &LevelScalar) -> FormalNop {
        let mut out = FormalNop::zero();
        for (f, v) in &self.terms {
            out.add_term(f.clone(), v.mul(c));
        }
        out
    }

    pub fn sub(&self, other: &FormalNop) -> FormalNop {
        self.add(&other.scale(&LevelScalar::one().neg()))
    }

    /// Terms whose declared degree (per `dict`) equals `d`.
    pub fn degree_part(&self, dict: &GeneratorDictionary, d: usize) -> Result<FormalNop, OrbifoldError> {
        let mut out = FormalNop::zero();
        for (f, c) in &self.terms {
            if dict.monomial_degree(f)? == d {
                out.add_term(f.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Terms with exactly `count` factors.
    pub fn factor_count_part(&self, count: usize) -> FormalNop {
        FormalNop {
            terms: self
                .terms
                .iter()
                .filter(|(f, _)| f.len() == count)
                .map(|(f, c)| (f.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficients of every term, for denominator bookkeeping.
    pub fn coefficients(&self) -> impl Iterator<Item = &LevelScalar> {
        self.terms.values()
    }
}

impl fmt::Display for FormalNop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (factors, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({}) * :", c)?;
            for (i, (s, d)) in factors.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                if *d > 0 {
                    write!(f, "D^{} ", d)?;
                }
                write!(f, "{}", s)?;
            }
            f.write_str(":")?;
        }
        Ok(())
    }
}

/// A dictionary entry: the state and its declared degree and weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictEntry {
    pub state: State,
    pub degree: usize,
    pub weight: u32,
}

/// Symbol → state, with declared degree and weight checked on insertion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratorDictionary {
    entries: BTreeMap<Symbol, DictEntry>,
}

impl GeneratorDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `s ↦ state`, declaring the state's own degree and weight.
    pub fn insert(&mut self, s: Symbol, state: State) -> Result<(), OrbifoldError> {
        let weight = match state.weight() {
            StateWeight::Homogeneous(w) if w > 0 => w,
            _ => {
                return Err(OrbifoldError::DictionaryMismatch {
                    symbol: s,
                    reason: String::from("state must be nonzero, homogeneous and of positive weight"),
                })
            }
        };
        let degree = state.degree();
        self.insert_declared(s, state, degree, weight)
    }

    /// Inserts with explicitly declared degree and weight, which must match.
    pub fn insert_declared(&mut self, s: Symbol, state: State, degree: usize, weight: u32) -> Result<(), OrbifoldError> {
        if state.weight() != StateWeight::Homogeneous(weight) || weight == 0 {
            return Err(OrbifoldError::DictionaryMismatch {
                symbol: s,
                reason: format!("declared weight {} does not match the state", weight),
            });
        }
        if state.degree() != degree {
            return Err(OrbifoldError::DictionaryMismatch {
                symbol: s,
                reason: format!("declared degree {} but the state has degree {}", degree, state.degree()),
            });
        }
        self.entries.insert(s, DictEntry { state, degree, weight });
        Ok(())
    }

    pub fn get(&self, s: &Symbol) -> Result<&DictEntry, OrbifoldError> {
        self.entries.get(s).ok_or_else(|| OrbifoldError::UnknownSymbol(s.clone()))
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.entries.contains_key(s)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.entries.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Symbol, &DictEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The sub-dictionary on the given symbols.
    pub fn restrict(&self, symbols: &[Symbol]) -> Result<GeneratorDictionary, OrbifoldError> {
        let mut out = GeneratorDictionary::new();
        for s in symbols {
            out.entries.insert(s.clone(), self.get(s)?.clone());
        }
        Ok(out)
    }

    pub fn monomial_degree(&self, factors: &[NopFactor]) -> Result<usize, OrbifoldError> {
        factors.iter().map(|(s, _)| self.get(s).map(|e| e.degree)).sum()
    }

    pub fn monomial_weight(&self, factors: &[NopFactor]) -> Result<u32, OrbifoldError> {
        factors.iter().map(|(s, d)| self.get(s).map(|e| e.weight + d)).sum()
    }
}

/// `ω_{a,b} = Σ_i :∂^a α^i ∂^b α^i:` in the rank-`n` Heisenberg algebra.
pub fn omega(n: usize, a: u32, b: u32) -> State {
    let coeff = LevelScalar::from(factorial(a) * factorial(b));
    let mut out = State::zero();
    for i in 0..n {
        let m = Monomial::new(vec![
            crate::vertex::Factor::new(i, a + 1),
            crate::vertex::Factor::new(i, b + 1),
        ]);
        out.add_term(m, coeff.clone());
    }
    out
}

/// `j^{2m} = ω_{0,2m}`.
pub fn j_gen(n: usize, two_m: u32) -> State {
    omega(n, 0, two_m)
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(int(1), |acc, i| acc * int(i))
}

fn binomial(n: u32, k: u32) -> Rational {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// The dictionary `{Ω_{a,b} ↦ ω_{a,b} : a ≤ b, a + b + 2 ≤ max_weight}`.
pub fn omega_dictionary(n: usize, max_weight: u32) -> GeneratorDictionary {
    let mut dict = GeneratorDictionary::new();
    for s in 0..=max_weight.saturating_sub(2) {
        for a in 0..=s / 2 {
            dict.insert(Symbol::omega(a, s - a), omega(n, a, s - a))
                .expect("omega states are homogeneous of degree 2");
        }
    }
    dict
}

/// Right-nested Wick evaluation with derivatives applied first.
pub fn evaluate_nop(alg: &VertexAlgebra, nop: &FormalNop, dict: &GeneratorDictionary) -> Result<State, OrbifoldError> {
    let mut cache = DerivativeCache::default();
    let mut out = State::zero();
    for (factors, c) in &nop.terms {
        out.add_scaled(&cache.monomial(alg, dict, factors)?, c);
    }
    Ok(out)
}

#[derive(Default)]
struct DerivativeCache {
    states: BTreeMap<NopFactor, State>,
}

impl DerivativeCache {
    fn factor(&mut self, alg: &VertexAlgebra, dict: &GeneratorDictionary, f: &NopFactor) -> Result<State, OrbifoldError> {
        if let Some(s) = self.states.get(f) {
            return Ok(s.clone());
        }
        let s = if f.1 == 0 {
            dict.get(&f.0)?.state.clone()
        } else {
            let prev = self.factor(alg, dict, &(f.0.clone(), f.1 - 1))?;
            alg.derivative(&prev)
        };
        self.states.insert(f.clone(), s.clone());
        Ok(s)
    }

    fn monomial(&mut self, alg: &VertexAlgebra, dict: &GeneratorDictionary, factors: &[NopFactor]) -> Result<State, OrbifoldError> {
        let states = factors
            .iter()
            .map(|f| self.factor(alg, dict, f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(alg.wick_chain(&states))
    }
}

/// Normally ordered monomials of weight `w` in `dict` whose declared degree
/// lies in `degrees`.
fn candidate_monomials(dict: &GeneratorDictionary, w: u32, min_degree: usize, max_degree: usize) -> Vec<Vec<NopFactor>> {
    let mut items = Vec::new();
    for (s, e) in dict.entries() {
        let mut d = 0;
        while e.weight + d <= w {
            items.push(((s.clone(), d), e.weight + d, e.degree as u32));
            d += 1;
        }
    }
    weighted_multisets(&items, w, max_degree.min(u32::MAX as usize) as u32)
        .into_iter()
        .filter(|ms| ms.iter().map(|&i| items[i].2 as usize).sum::<usize>() >= min_degree)
        .map(|ms| ms.iter().map(|&i| items[i].0.clone()).collect())
        .collect()
}

/// Solves `Σ x_c · candidates[c] = target` on the monomials kept by `keep`;
/// free variables are set to zero.
fn solve_combination(target: &State, candidates: &[State], keep: impl Fn(&Monomial) -> bool) -> Option<Vec<LevelScalar>> {
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for s in candidates.iter().chain(core::iter::once(target)) {
        for (m, _) in s.terms() {
            if keep(m) {
                let next = rows.len();
                rows.entry(m.clone()).or_insert(next);
            }
        }
    }
    let mut a = Matrix::zeros(rows.len(), candidates.len());
    for (c, s) in candidates.iter().enumerate() {
        for (m, v) in s.terms() {
            if let Some(&r) = rows.get(m) {
                a.set(r, c, v.clone());
            }
        }
    }
    let mut rhs = vec![LevelScalar::zero(); rows.len()];
    for (m, v) in target.terms() {
        if let Some(&r) = rows.get(m) {
            rhs[r] = v.clone();
        }
    }
    a.solve(&rhs)
}

fn assemble(monomials: &[Vec<NopFactor>], coeffs: &[LevelScalar]) -> FormalNop {
    let mut out = FormalNop::zero();
    for (f, c) in monomials.iter().zip(coeffs) {
        out.add_term(f.clone(), c.clone());
    }
    out
}

/// Writes a homogeneous `target` as a normally ordered polynomial in `dict`
/// of declared degree at most `max_degree`; `None` when impossible.
pub fn express_in_generators(
    alg: &VertexAlgebra,
    target: &State,
    dict: &GeneratorDictionary,
    max_degree: usize,
) -> Result<Option<FormalNop>, OrbifoldError> {
    let w = match target.weight() {
        StateWeight::Zero => return Ok(Some(FormalNop::zero())),
        StateWeight::Homogeneous(w) => w,
        StateWeight::Mixed => return Err(OrbifoldError::NotHomogeneous),
    };
    let monomials = candidate_monomials(dict, w, 0, max_degree);
    let mut cache = DerivativeCache::default();
    let states = monomials
        .iter()
        .map(|f| cache.monomial(alg, dict, f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(solve_combination(target, &states, |_| true).map(|x| assemble(&monomials, &x)))
}

/// Lifts a classical relation to a normally ordered polynomial whose
/// evaluation vanishes.
///
/// The top part is the normal ordering of `rel` under `symbol_of`; each
/// descent step matches the current top-degree residual with normally
/// ordered monomials of that declared degree and subtracts them.
pub fn quantum_correction(
    alg: &VertexAlgebra,
    rel: &QSymbolPoly,
    dict: &GeneratorDictionary,
    symbol_of: impl Fn(&QSym) -> Option<(i64, Symbol)>,
) -> Result<FormalNop, OrbifoldError> {
    let mut p = FormalNop::zero();
    for (mono, c) in rel.terms() {
        let mut factors = Vec::new();
        let mut coeff = c.clone();
        for (q, e) in mono {
            let (sign, s) = symbol_of(q).ok_or_else(|| OrbifoldError::UnknownSymbol(Symbol::Named(format!("{}", q))))?;
            for _ in 0..*e {
                factors.push((s.clone(), 0));
                coeff *= int(sign);
            }
        }
        p.add_term(factors, LevelScalar::from(coeff));
    }
    let mut cache = DerivativeCache::default();
    let mut residual = State::zero();
    for (f, c) in p.terms() {
        residual.add_scaled(&cache.monomial(alg, dict, f)?, c);
    }
    while !residual.is_zero() {
        let d = residual.degree();
        let w = match residual.weight() {
            StateWeight::Homogeneous(w) => w,
            _ => return Err(OrbifoldError::NotHomogeneous),
        };
        let monomials = candidate_monomials(dict, w, d, d);
        let states = monomials
            .iter()
            .map(|f| cache.monomial(alg, dict, f))
            .collect::<Result<Vec<_>, _>>()?;
        let x = solve_combination(&residual, &states, |m| m.degree() == d).ok_or(OrbifoldError::DescentFailure(d))?;
        let correction = assemble(&monomials, &x);
        let mut next = residual.clone();
        for (s, c) in states.iter().zip(&x) {
            next.add_scaled(s, &c.neg());
        }
        if next.degree() >= d && !next.degree_component(d).is_zero() {
            return Err(OrbifoldError::DescentFailure(d));
        }
        p = p.sub(&correction);
        residual = next;
    }
    Ok(p)
}

/// `pr_m(Ω_{a,b})` as a multiple of `J^m` for `a + b = m` even.
///
/// Solves `Ω_{a,b} = Σ μ_{c,d} ∂²Ω_{c,d} + λ J^m` in the formal space `A_m`
/// spanned by `Ω_{c,d}`, `c ≤ d`, `c + d = m`, with
/// `∂²Ω_{c,d} = Ω_{c+2,d} + 2Ω_{c+1,d+1} + Ω_{c,d+2}`.
pub fn pr_lambda(a: u32, b: u32) -> Result<Rational, OrbifoldError> {
    let m = a + b;
    if m % 2 == 1 {
        return Err(OrbifoldError::Parity(m as u64));
    }
    let index = |c: u32, d: u32| c.min(d) as usize;
    let dim = (m / 2 + 1) as usize;
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    if m >= 2 {
        for c in 0..=(m - 2) / 2 {
            let d = m - 2 - c;
            let mut v = vec![int(0); dim];
            v[index(c + 2, d)] += int(1);
            v[index(c + 1, d + 1)] += int(2);
            v[index(c, d + 2)] += int(1);
            cols.push(v);
        }
    }
    let mut j = vec![int(0); dim];
    j[0] = int(1);
    cols.push(j);
    let mut mat = Matrix::zeros(dim, cols.len());
    for (c, v) in cols.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            mat.set(r, c, x.clone());
        }
    }
    let mut rhs = vec![int(0); dim];
    rhs[index(a, b)] = int(1);
    let x = mat.solve(&rhs).expect("∂²A_{m-2} and J^m span A_m");
    Ok(x.last().cloned().expect("J^m column"))
}

/// The `J^m` coefficient of `pr_m` applied to the single-factor `Ω`/`J`
/// terms of `nop`; multi-factor terms are ignored.
pub fn pr_coefficient(nop: &FormalNop, m: u64) -> Result<LevelScalar, OrbifoldError> {
    if m % 2 == 1 {
        return Err(OrbifoldError::Parity(m));
    }
    let mut lambdas: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    let mut total = LevelScalar::zero();
    for (factors, c) in nop.factor_count_part(1).terms() {
        let (s, d) = &factors[0];
        let (a, b) = match s {
            Symbol::Omega(a, b) => (*a, *b),
            Symbol::J(t) => (0, *t),
            other => return Err(OrbifoldError::OutsideA(format!("{}", other), m)),
        };
        if (a + b + d) as u64 != m {
            return Err(OrbifoldError::OutsideA(format!("D^{} {}", d, s), m));
        }
        let mut sum = int(0);
        for t in 0..=*d {
            let key = ((a + t).min(b + d - t), (a + t).max(b + d - t));
            if !lambdas.contains_key(&key) {
                lambdas.insert(key, pr_lambda(key.0, key.1)?);
            }
            sum += binomial(*d, t) * &lambdas[&key];
        }
        total.add_assign(&c.scale(&sum));
    }
    Ok(total)
}

/// `R_n(I, J)` from the vertex algebra: builds `D_{I,J}` by quantum
/// correction in `H(n)` at level 1 and projects its degree-2 part.
///
/// `max_weight` caps `m = |I| + |J| + 2n`.
pub fn remainder_direct(n: usize, i: &[u32], j: &[u32], max_weight: u32) -> Result<Rational, OrbifoldError> {
    let rel = det_relation(n, i, j)?;
    let m = crate::remainder::total_weight(n, i, j);
    if m % 2 == 1 {
        return Err(OrbifoldError::Parity(m));
    }
    if m > max_weight as u64 {
        return Err(OrbifoldError::WeightBudget { weight: m, max: max_weight });
    }
    let alg = VertexAlgebra::with_level(LieSpec::abelian(n), Level::Fixed(int(1)));
    let dict = omega_dictionary(n, m as u32 + 2);
    let d = quantum_correction(&alg, &rel, &dict, Symbol::omega_of)?;
    let value = pr_coefficient(&d.degree_part(&dict, 2)?, m)?;
    Ok(value.as_rational().expect("fixed level gives rational coefficients"))
}

/// Search limits for [`decouple`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_degree: usize,
    pub max_weight: u32,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_degree: usize::MAX,
            max_weight: DEFAULT_MAX_WEIGHT,
        }
    }
}

/// Outcome of [`decouple`]: the relation (if any) and the levels at which
/// its coefficients have poles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoupling {
    pub relation: Option<FormalNop>,
    pub excluded_levels: Vec<Rational>,
}

/// Rational levels at which some coefficient of `nop` has a pole.
pub fn excluded_levels(nop: &FormalNop) -> Vec<Rational> {
    let mut roots = BTreeSet::new();
    for c in nop.coefficients() {
        roots.extend(c.denom().rational_roots());
    }
    roots.into_iter().collect()
}

fn check_invariant(alg: &VertexAlgebra, action: &ActionSpec, s: &State) -> bool {
    action.lie_generators.iter().all(|rho| alg.lie_act(rho, s).is_zero())
        && action.finite_elements.iter().all(|g| alg.apply_group_element(g, s) == *s)
}

/// Expresses the target generator through a subset of the dictionary.
pub fn decouple(
    alg: &VertexAlgebra,
    action: &ActionSpec,
    dict: &GeneratorDictionary,
    subset: &[Symbol],
    target: &Symbol,
    bounds: SearchBounds,
) -> Result<Decoupling, OrbifoldError> {
    let entry = dict.get(target)?;
    if entry.weight > bounds.max_weight {
        return Err(OrbifoldError::WeightBudget {
            weight: entry.weight as u64,
            max: bounds.max_weight,
        });
    }
    let sub = dict.restrict(subset)?;
    if !check_invariant(alg, action, &entry.state) {
        return Err(OrbifoldError::NotInvariant(format!("{}", target)));
    }
    for (s, e) in sub.entries() {
        if !check_invariant(alg, action, &e.state) {
            return Err(OrbifoldError::NotInvariant(format!("{}", s)));
        }
    }
    let relation = if sub.contains(target) {
        Some(FormalNop::symbol(target.clone()))
    } else {
        express_in_generators(alg, &entry.state, &sub, bounds.max_degree)?
    };
    let excluded = relation.as_ref().map(excluded_levels).unwrap_or_default();
    Ok(Decoupling {
        relation,
        excluded_levels: excluded,
    })
}

/// Basis of the weight-`w` invariant subspace, in reduced echelon form over
/// the canonical monomial order.
pub fn invariant_subspace(alg: &VertexAlgebra, action: &ActionSpec, w: u32) -> Result<Vec<State>, OrbifoldError> {
    let n = alg.dim();
    if let Some(d) = action.dim() {
        if d != n {
            return Err(OrbifoldError::ActionDimension(n));
        }
    }
    let basis = Monomial::basis(n, w);
    let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let images = |f: &dyn Fn(&State) -> State| -> Vec<Vec<Rational>> {
        // One block of rows per map: row = output monomial, column = input.
        let mut block = vec![vec![int(0); basis.len()]; basis.len()];
        for (c, m) in basis.iter().enumerate() {
            let img = f(&State::from_monomial(m.clone(), LevelScalar::one()));
            for (om, v) in img.terms() {
                let r = index[om];
                block[r][c] = v.as_rational().expect("the action does not involve the level");
            }
        }
        block
    };
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for rho in &action.lie_generators {
        rows.extend(images(&|s| alg.lie_act(rho, s)));
    }
    for g in &action.finite_elements {
        rows.extend(images(&|s| alg.apply_group_element(g, s).sub(s)));
    }
    let kernel = if rows.is_empty() {
        Matrix::<Rational>::identity(basis.len()).to_rows()
    } else {
        Matrix::from_rows(rows).kernel()
    };
    let reduced = echelon_basis(kernel, basis.len());
    Ok(reduced
        .into_iter()
        .map(|v| {
            let mut s = State::zero();
            for (c, x) in v.into_iter().enumerate() {
                s.add_term(basis[c].clone(), LevelScalar::from(x));
            }
            s
        })
        .collect())
}

const SL2_X: usize = 0;
const SL2_Y: usize = 1;
const SL2_H: usize = 2;

/// `:∂^i X^h ∂^j X^h: + 2 :∂^i X^x ∂^j X^y: + 2 :∂^i X^y ∂^j X^x:` in `V_k(sl₂)`.
pub fn sl2_tilde_q(alg: &VertexAlgebra, i: u32, j: u32) -> State {
    let d = |g: usize, t: u32| alg.derivative_n(&alg.generator(g), t);
    let two = LevelScalar::from(int(2));
    let mut out = alg.wick(&d(SL2_H, i), &d(SL2_H, j));
    out.add_scaled(&alg.wick(&d(SL2_X, i), &d(SL2_Y, j)), &two);
    out.add_scaled(&alg.wick(&d(SL2_Y, i), &d(SL2_X, j)), &two);
    out
}

/// The alternating sum `Σ_σ sgn(σ) :∂^k X^{σ(h)} ∂^l X^{σ(x)} ∂^m X^{σ(y)}:`.
pub fn sl2_tilde_c(alg: &VertexAlgebra, k: u32, l: u32, m: u32) -> Result<State, OrbifoldError> {
    if !(k < l && l < m) {
        return Err(ClassicalError::CubicIndices(k, l, m).into());
    }
    let d = |g: usize, t: u32| alg.derivative_n(&alg.generator(g), t);
    let cols = [SL2_H, SL2_X, SL2_Y];
    let perms: [([usize; 3], i64); 6] = [
        ([0, 1, 2], 1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([0, 2, 1], -1),
        ([2, 1, 0], -1),
        ([1, 0, 2], -1),
    ];
    let mut out = State::zero();
    for (p, sign) in perms {
        let chain = alg.wick_chain(&[d(cols[p[0]], k), d(cols[p[1]], l), d(cols[p[2]], m)]);
        out.add_scaled(&chain, &LevelScalar::from(int(sign)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{sl2_c, sl2_q, substitute};
    use crate::scalars::rat;
    use crate::vertex::Factor;

    fn heis1() -> VertexAlgebra {
        VertexAlgebra::heisenberg(1)
    }

    #[test]
    fn omega_normalization() {
        let sq = |d: u32| Monomial::new(vec![Factor::new(0, d), Factor::new(0, d)]);
        assert_eq!(omega(1, 0, 0), State::from_monomial(sq(1), LevelScalar::one()));
        assert_eq!(omega(1, 1, 1), State::from_monomial(sq(2), LevelScalar::one()));
        assert_eq!(j_gen(1, 4), omega(1, 0, 4));
        // ω_{a,b} = :∂^a α ∂^b α:
        let alg = heis1();
        let da = alg.derivative(&alg.generator(0));
        assert_eq!(alg.wick(&da, &da), omega(1, 1, 1));
    }

    #[test]
    fn derivative_of_omega() {
        let alg = heis1();
        let dict = omega_dictionary(1, 4);
        let nop = FormalNop::term(vec![(Symbol::omega(0, 0), 1)], LevelScalar::one());
        let got = evaluate_nop(&alg, &nop, &dict).unwrap();
        assert_eq!(got, omega(1, 0, 1).scale(&LevelScalar::from(int(2))));
        assert!(matches!(
            evaluate_nop(&alg, &FormalNop::symbol(Symbol::J(8)), &dict),
            Err(OrbifoldError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn express_omega11() {
        let alg = heis1();
        let mut dict = GeneratorDictionary::new();
        dict.insert(Symbol::omega(0, 0), j_gen(1, 0)).unwrap();
        dict.insert(Symbol::omega(0, 2), j_gen(1, 2)).unwrap();
        let nop = express_in_generators(&alg, &omega(1, 1, 1), &dict, 4).unwrap().unwrap();
        let mut expect = FormalNop::term(vec![(Symbol::omega(0, 0), 2)], LevelScalar::from(rat(1, 2)));
        expect.add_term(vec![(Symbol::omega(0, 2), 0)], LevelScalar::from(int(-1)));
        assert_eq!(nop, expect);
        assert_eq!(evaluate_nop(&alg, &nop, &dict).unwrap(), omega(1, 1, 1));

        let mut small = GeneratorDictionary::new();
        small.insert(Symbol::J(0), j_gen(1, 0)).unwrap();
        assert_eq!(express_in_generators(&alg, &j_gen(1, 2), &small, 4).unwrap(), None);
        let id = express_in_generators(&alg, &j_gen(1, 0), &small, 4).unwrap().unwrap();
        assert_eq!(id, FormalNop::symbol(Symbol::J(0)));
    }

    #[test]
    fn dictionary_checks_declarations() {
        let mut dict = GeneratorDictionary::new();
        assert!(dict.insert_declared(Symbol::J(0), j_gen(1, 0), 2, 3).is_err());
        assert!(dict.insert_declared(Symbol::J(0), j_gen(1, 0), 1, 2).is_err());
        assert!(dict.insert_declared(Symbol::J(0), j_gen(1, 0), 2, 2).is_ok());
    }

    #[test]
    fn lambda_alternates_with_a() {
        for m in [2u32, 4, 6, 8] {
            for a in 0..=m / 2 {
                let expect = if a % 2 == 0 { int(1) } else { int(-1) };
                assert_eq!(pr_lambda(a, m - a).unwrap(), expect);
            }
        }
        assert_eq!(pr_lambda(1, 2), Err(OrbifoldError::Parity(3)));
    }

    #[test]
    fn projection_examples() {
        let j = FormalNop::symbol(Symbol::omega(0, 4));
        assert_eq!(pr_coefficient(&j, 4).unwrap(), LevelScalar::one());
        let d2 = FormalNop::term(vec![(Symbol::omega(0, 2), 2)], LevelScalar::one());
        assert!(pr_coefficient(&d2, 4).unwrap().is_zero());
        let d1 = FormalNop::term(vec![(Symbol::omega(1, 2), 1)], LevelScalar::one());
        assert!(pr_coefficient(&d1, 4).unwrap().is_zero());
        assert_eq!(pr_coefficient(&j, 5), Err(OrbifoldError::Parity(5)));
    }

    #[test]
    fn quantum_correction_vanishes() {
        let alg = VertexAlgebra::with_level(LieSpec::abelian(1), Level::Fixed(int(1)));
        let rel = det_relation(1, &[0, 1], &[0, 1]).unwrap();
        let dict = omega_dictionary(1, 6);
        let p = quantum_correction(&alg, &rel, &dict, Symbol::omega_of).unwrap();
        assert!(evaluate_nop(&alg, &p, &dict).unwrap().is_zero());
        assert_eq!(substitute(&rel, 1), crate::classical::ClassicalPoly::zero());
        assert!(quantum_correction(&alg, &QSymbolPoly::zero(), &dict, Symbol::omega_of)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn direct_remainder_table_value() {
        assert_eq!(remainder_direct(1, &[0, 1], &[0, 1], 12).unwrap(), rat(5, 4));
        assert_eq!(remainder_direct(1, &[0, 1], &[0, 3], 12).unwrap(), rat(14, 15));
        assert_eq!(remainder_direct(1, &[0, 2], &[0, 1], 12), Err(OrbifoldError::Parity(5)));
        assert!(matches!(
            remainder_direct(1, &[0, 1], &[0, 3], 4),
            Err(OrbifoldError::WeightBudget { .. })
        ));
    }

    #[test]
    fn invariant_dimensions() {
        let alg = heis1();
        let o1 = ActionSpec::orthogonal(1);
        let w2 = invariant_subspace(&alg, &o1, 2).unwrap();
        assert_eq!(w2, vec![omega(1, 0, 0)]);
        assert_eq!(invariant_subspace(&alg, &o1, 3).unwrap().len(), 1);
        let sl2 = VertexAlgebra::new(LieSpec::sl2());
        let ad = ActionSpec::adjoint(sl2.spec());
        assert!(invariant_subspace(&sl2, &ad, 1).unwrap().is_empty());
    }

    #[test]
    fn decoupling_in_one_boson() {
        let alg = heis1();
        let o1 = ActionSpec::orthogonal(1);
        let mut dict = GeneratorDictionary::new();
        for t in [0, 2, 4] {
            dict.insert(Symbol::J(t), j_gen(1, t)).unwrap();
        }
        let subset = [Symbol::J(0), Symbol::J(2)];
        let out = decouple(&alg, &o1, &dict, &subset, &Symbol::J(4), SearchBounds::default()).unwrap();
        let rel = out.relation.unwrap();
        assert_eq!(evaluate_nop(&alg, &rel, &dict).unwrap(), j_gen(1, 4));
        let triv = decouple(&alg, &o1, &dict, &subset, &Symbol::J(2), SearchBounds::default()).unwrap();
        assert_eq!(triv.relation, Some(FormalNop::symbol(Symbol::J(2))));
        assert!(triv.excluded_levels.is_empty());
        let none = decouple(&alg, &o1, &dict, &[Symbol::J(0)], &Symbol::J(2), SearchBounds::default()).unwrap();
        assert_eq!(none.relation, None);
    }

    #[test]
    fn sl2_generators_are_invariant() {
        let alg = VertexAlgebra::new(LieSpec::sl2());
        let ad = ActionSpec::adjoint(alg.spec());
        let q = sl2_tilde_q(&alg, 0, 1);
        for rho in &ad.lie_generators {
            assert!(alg.lie_act(rho, &q).is_zero());
        }
        let ls = q.leading_symbol().unwrap();
        assert_eq!(ls, sl2_q(0, 1).map_coeffs(|c| LevelScalar::from(c.clone())));
        let c = sl2_tilde_c(&alg, 0, 1, 2).unwrap();
        assert_eq!(c.weight(), StateWeight::Homogeneous(6));
        let expect = sl2_c(0, 1, 2).unwrap().scale(&int(2)).map_coeffs(|c| LevelScalar::from(c.clone()));
        assert_eq!(c.leading_symbol().unwrap(), expect);
        assert!(sl2_tilde_c(&alg, 1, 1, 2).is_err());
    }
}
