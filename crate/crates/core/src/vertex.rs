//! The universal affine vertex algebra `V_k(g, B)` on its vacuum module.
//!
//! States are finite ℚ(k)-combinations of PBW monomials
//! `X^{i_1}(−m_1)⋯X^{i_r}(−m_r)|0⟩`, kept in canonical order (mode depth
//! descending, generator index ascending). Mode actions use the affine
//! bracket
//!
//! ```text
//! [X^a(p), X^b(q)] = X^{[a,b]}(p+q) + p·B(a,b)·δ_{p+q,0}·k
//! ```
//!
//! and circle products `a∘_n b` are computed by recursion on the PBW
//! factors of `a` through the iterate formula for `(x_{(−m−1)}u)_{(n)}`.
//! Everything is even; no super signs appear.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::classical::{ClassicalPoly, Var};
use crate::liedata::LieSpec;
use crate::linalg::Matrix;
use crate::scalars::{LevelPoly, LevelScalar, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VertexError {
    #[error("leading symbol of the zero state")]
    ZeroState,
    #[error("bilinear form is degenerate")]
    DegenerateForm,
    #[error("Sugawara vector does not exist at the critical level")]
    CriticalLevel,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// One PBW factor `X^gen(−depth)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub gen: usize,
    pub depth: u32,
}

impl Factor {
    pub fn new(gen: usize, depth: u32) -> Self {
        assert!(depth >= 1, "creation modes have depth >= 1");
        Factor { gen, depth }
    }
}

impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .depth
            .cmp(&self.depth)
            .then(self.gen.cmp(&other.gen))
    }
}

impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A canonically ordered PBW monomial applied to the vacuum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<Factor>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    /// The PBW basis element with these factors (sorted into canonical order).
    pub fn new(mut factors: Vec<Factor>) -> Self {
        factors.sort();
        Monomial(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|f| f.depth).sum()
    }

    /// Filtration degree: the number of factors.
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    /// All PBW monomials of weight `w` over `dim` generators, ascending.
    pub fn basis(dim: usize, w: u32) -> Vec<Monomial> {
        fn rec(dim: usize, remaining: u32, last: Option<Factor>, cur: &mut Vec<Factor>, out: &mut Vec<Monomial>) {
            if remaining == 0 {
                out.push(Monomial(cur.clone()));
                return;
            }
            let max_depth = last.map_or(remaining, |f| f.depth.min(remaining));
            for depth in (1..=max_depth).rev() {
                for gen in 0..dim {
                    let f = Factor { gen, depth };
                    if last.is_some_and(|l| f < l) {
                        continue;
                    }
                    cur.push(f);
                    rec(dim, remaining - depth, Some(f), cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(dim, w, None, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// Weight of a state: homogeneous, mixed, or the zero state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateWeight {
    Zero,
    Homogeneous(u32),
    Mixed,
}

/// A finite ℚ(k)-linear combination of PBW monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct State {
    terms: BTreeMap<Monomial, LevelScalar>,
}

impl State {
    pub fn zero() -> Self {
        State::default()
    }

    pub fn vacuum() -> Self {
        Self::from_monomial(Monomial::vacuum(), LevelScalar::one())
    }

    /// `X^gen(−1)|0⟩`.
    pub fn generator(gen: usize) -> Self {
        Self::from_monomial(Monomial(vec![Factor::new(gen, 1)]), LevelScalar::one())
    }

    pub fn from_monomial(m: Monomial, c: LevelScalar) -> Self {
        let mut s = State::zero();
        s.add_term(m, c);
        s
    }

    pub fn add_term(&mut self, m: Monomial, c: LevelScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                existing.add_assign(&c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &State, c: &LevelScalar) {
        if c.is_zero() {
            return;
        }
        let unit = c.is_one();
        for (m, v) in &other.terms {
            let term = if unit { v.clone() } else { v.mul(c) };
            self.add_term(m.clone(), term);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &LevelScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> LevelScalar {
        self.terms.get(m).cloned().unwrap_or_else(LevelScalar::zero)
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

    pub fn add(&self, other: &State) -> State {
        let mut out = self.clone();
        out.add_scaled(other, &LevelScalar::one());
        out
    }

    pub fn sub(&self, other: &State) -> State {
        let mut out = self.clone();
        out.add_scaled(other, &LevelScalar::one().neg());
        out
    }

    pub fn neg(&self) -> State {
        self.scale(&LevelScalar::one().neg())
    }

    pub fn scale(&self, c: &LevelScalar) -> State {
        let mut out = State::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn weight(&self) -> StateWeight {
        let mut it = self.terms.keys().map(Monomial::weight);
        let Some(first) = it.next() else {
            return StateWeight::Zero;
        };
        if it.all(|w| w == first) {
            StateWeight::Homogeneous(first)
        } else {
            StateWeight::Mixed
        }
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::weight).max()
    }

    /// Largest number of PBW factors; zero for the zero state.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn weight_component(&self, w: u32) -> State {
        self.filter(|m| m.weight() == w)
    }

    pub fn weight_components(&self) -> BTreeMap<u32, State> {
        let mut out: BTreeMap<u32, State> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight()).or_default().add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn degree_component(&self, d: usize) -> State {
        self.filter(|m| m.degree() == d)
    }

    fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> State {
        State {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Specializes the level; the result has constant coefficients.
    pub fn evaluate_at(&self, k0: &Rational) -> Result<State, ScalarError> {
        let mut out = State::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), LevelScalar::from(c.evaluate_at(k0)?));
        }
        Ok(out)
    }

    /// Top filtration-degree part mapped to `Sym ⊕ V_j`, with the factor
    /// `X^i(−j−1)` sent to `x[i,j]`.
    ///
    /// Since `X^i(−j−1)|0⟩ = (1/j!)∂^j X^i`, the variable `x[i,j]` stands for
    /// `(1/j!)∂^j X^i`; a Wick monomial in `∂^j X^i` therefore picks up the
    /// product of the `j!`.
    pub fn leading_symbol(&self) -> Result<ClassicalPoly<LevelScalar>, VertexError> {
        if self.is_zero() {
            return Err(VertexError::ZeroState);
        }
        let d = self.degree();
        let mut out = ClassicalPoly::zero();
        for (m, c) in self.terms.iter().filter(|(m, _)| m.degree() == d) {
            let vars = m
                .0
                .iter()
                .map(|f| (Var::new(f.gen, f.depth - 1), 1))
                .collect();
            out = out.add(&ClassicalPoly::monomial(vars, c.clone()));
        }
        Ok(out)
    }
}

/// Nonzero singular OPE coefficients `(n, a∘_n b)`, `n` descending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpeList {
    pub terms: Vec<(u32, State)>,
}

impl OpeList {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// How the central element acts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Level {
    /// The formal variable `k`.
    Formal,
    /// A fixed numeric level.
    Fixed(Rational),
}

/// `(n choose k)` for any integer `n`: `n(n−1)⋯(n−k+1)/k!`.
pub fn generalized_binomial(n: i64, k: u32) -> Rational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Rational::new(num, den)
}

/// The vertex algebra `V_k(g, B)` with precomputed sparse bracket tables.
#[derive(Debug, Clone)]
pub struct VertexAlgebra {
    spec: LieSpec,
    level: Level,
    brackets: Vec<Vec<(usize, LevelScalar)>>,
    central: Vec<LevelScalar>,
}

impl VertexAlgebra {
    pub fn new(spec: LieSpec) -> Self {
        Self::with_level(spec, Level::Formal)
    }

    pub fn with_level(spec: LieSpec, level: Level) -> Self {
        let n = spec.dim();
        let k = match &level {
            Level::Formal => LevelScalar::k(),
            Level::Fixed(k0) => LevelScalar::from(k0.clone()),
        };
        let mut brackets = Vec::with_capacity(n * n);
        let mut central = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let entries = (0..n)
                    .filter_map(|l| {
                        let c = spec.structure_constant(i, j, l);
                        (!c.is_zero()).then(|| (l, LevelScalar::from(c.clone())))
                    })
                    .collect();
                brackets.push(entries);
                central.push(k.scale(spec.form(i, j)));
            }
        }
        VertexAlgebra {
            spec,
            level,
            brackets,
            central,
        }
    }

    /// Rank-`n` Heisenberg algebra `H_k(n)`.
    pub fn heisenberg(n: usize) -> Self {
        Self::new(LieSpec::abelian(n))
    }

    pub fn spec(&self) -> &LieSpec {
        &self.spec
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn generator(&self, gen: usize) -> State {
        assert!(gen < self.dim());
        State::generator(gen)
    }

    /// The scalar by which the central element acts.
    pub fn level_scalar(&self) -> LevelScalar {
        match &self.level {
            Level::Formal => LevelScalar::k(),
            Level::Fixed(k0) => LevelScalar::from(k0.clone()),
        }
    }

    fn bracket_terms(&self, i: usize, j: usize) -> &[(usize, LevelScalar)] {
        &self.brackets[i * self.dim() + j]
    }

    /// `X^i(n)` applied to a single monomial.
    fn mode_on_monomial(&self, i: usize, n: i64, mono: &[Factor]) -> State {
        if n >= 0 {
            let Some((f, rest)) = mono.split_first() else {
                return State::zero();
            };
            let m = f.depth as i64;
            let mut out = State::zero();
            let inner = self.mode_on_monomial(i, n, rest);
            for (im, c) in &inner.terms {
                out.add_scaled(&self.mode_on_monomial(f.gen, -m, &im.0), c);
            }
            for (l, c) in self.bracket_terms(i, f.gen) {
                out.add_scaled(&self.mode_on_monomial(*l, n - m, rest), c);
            }
            if n == m {
                let c = self.central[i * self.dim() + f.gen].scale(&Rational::from_integer(n.into()));
                out.add_term(Monomial(rest.to_vec()), c);
            }
            out
        } else {
            let new = Factor::new(i, (-n) as u32);
            match mono.split_first() {
                Some((f, rest)) if new > *f => {
                    let m = f.depth as i64;
                    let mut out = State::zero();
                    let inner = self.mode_on_monomial(i, n, rest);
                    for (im, c) in &inner.terms {
                        out.add_scaled(&self.mode_on_monomial(f.gen, -m, &im.0), c);
                    }
                    for (l, c) in self.bracket_terms(i, f.gen) {
                        out.add_scaled(&self.mode_on_monomial(*l, n - m, rest), c);
                    }
                    out
                }
                _ => {
                    let mut factors = Vec::with_capacity(mono.len() + 1);
                    factors.push(new);
                    factors.extend_from_slice(mono);
                    State::from_monomial(Monomial(factors), LevelScalar::one())
                }
            }
        }
    }

    /// The mode `X^i(n)` acting on `v`.
    pub fn mode_action(&self, i: usize, n: i64, v: &State) -> State {
        let mut out = State::zero();
        for (m, c) in &v.terms {
            out.add_scaled(&self.mode_on_monomial(i, n, &m.0), c);
        }
        out
    }

    /// Applies a word of modes `(gen, n)` to the vacuum, rightmost first.
    pub fn apply_word(&self, word: &[(usize, i64)]) -> State {
        word.iter()
            .rev()
            .fold(State::vacuum(), |s, &(g, n)| self.mode_action(g, n, &s))
    }

    fn circle_monomial(&self, a: &[Factor], n: i64, c: &State) -> State {
        let Some((x, u)) = a.split_first() else {
            return if n == -1 { c.clone() } else { State::zero() };
        };
        if c.is_zero() {
            return State::zero();
        }
        let m = (x.depth - 1) as i64;
        if u.is_empty() {
            // (X(−m−1)|0⟩)_{(n)} = (−1)^m·binom(n, m)·X(n−m).
            let mut b = generalized_binomial(n, m as u32);
            if m % 2 == 1 {
                b = -b;
            }
            if b.is_zero() {
                return State::zero();
            }
            return self.mode_action(x.gen, n - m, c).scale(&LevelScalar::from(b));
        }
        let wu = u.iter().map(|f| f.depth as i64).sum::<i64>();
        let wc = c.max_weight().unwrap_or(0) as i64;
        let mut out = State::zero();
        // Σ_j binom(m+j, j)·x(−m−1−j)·(u_{(n+j)} c)
        let mut j = 0i64;
        while n + j <= wu + wc - 1 {
            let inner = self.circle_monomial(u, n + j, c);
            if !inner.is_zero() {
                let b = generalized_binomial(m + j, j as u32);
                out.add_scaled(&self.mode_action(x.gen, -m - 1 - j, &inner), &LevelScalar::from(b));
            }
            j += 1;
        }
        // (−1)^m Σ_j binom(m+j, j)·u_{(n−m−1−j)}·(x(j) c)
        for j in 0..=wc {
            let xc = self.mode_action(x.gen, j, c);
            if xc.is_zero() {
                continue;
            }
            let mut b = generalized_binomial(m + j, j as u32);
            if m % 2 == 1 {
                b = -b;
            }
            out.add_scaled(&self.circle_monomial(u, n - m - 1 - j, &xc), &LevelScalar::from(b));
        }
        out
    }

    /// The circle product `a∘_n b`, for any integer `n`.
    pub fn circle_product(&self, a: &State, n: i64, b: &State) -> State {
        let mut out = State::zero();
        for (m, c) in &a.terms {
            out.add_scaled(&self.circle_monomial(&m.0, n, b), c);
        }
        out
    }

    /// Wick product `:ab: = a∘_{−1}b`.
    pub fn wick(&self, a: &State, b: &State) -> State {
        self.circle_product(a, -1, b)
    }

    /// Right-nested `:a_1(:a_2(⋯ a_k):):`; the empty chain is the vacuum.
    pub fn wick_chain(&self, states: &[State]) -> State {
        match states.split_last() {
            None => State::vacuum(),
            Some((last, init)) => init
                .iter()
                .rev()
                .fold(last.clone(), |acc, s| self.wick(s, &acc)),
        }
    }

    /// Translation `∂`: raises one mode depth at a time, weighted by depth.
    pub fn derivative(&self, a: &State) -> State {
        let mut out = State::zero();
        for (m, c) in &a.terms {
            for t in 0..m.0.len() {
                let word: Vec<(usize, i64)> = m
                    .0
                    .iter()
                    .enumerate()
                    .map(|(s, f)| {
                        let d = if s == t { f.depth + 1 } else { f.depth };
                        (f.gen, -(d as i64))
                    })
                    .collect();
                let mult = c.scale(&Rational::from_integer(m.0[t].depth.into()));
                out.add_scaled(&self.apply_word(&word), &mult);
            }
        }
        out
    }

    pub fn derivative_n(&self, a: &State, times: u32) -> State {
        (0..times).fold(a.clone(), |s, _| self.derivative(&s))
    }

    /// Singular OPE coefficients `a∘_n b`, `n ≥ 0`, highest pole first.
    pub fn ope(&self, a: &State, b: &State) -> OpeList {
        let top = a.max_weight().unwrap_or(0) + b.max_weight().unwrap_or(0);
        let terms = (0..top)
            .rev()
            .filter_map(|n| {
                let c = self.circle_product(a, n as i64, b);
                (!c.is_zero()).then_some((n, c))
            })
            .collect();
        OpeList { terms }
    }

    /// The least `N` with `a∘_n b = 0` for all `n ≥ N`.
    pub fn locality_order(&self, a: &State, b: &State) -> u32 {
        self.ope(a, b).terms.first().map_or(0, |(n, _)| n + 1)
    }

    /// `L = 1/(2(k+h∨)) Σ_{a,b} (B⁻¹)_{ab} :X^a X^b:`.
    pub fn sugawara(&self, h_dual: &Rational) -> Result<State, VertexError> {
        let inv = self
            .spec
            .form_matrix()
            .inverse()
            .ok_or(VertexError::DegenerateForm)?;
        let shifted = match &self.level {
            Level::Formal => LevelScalar::from(LevelPoly::new(vec![h_dual.clone(), <Rational as Scalar>::one()])),
            Level::Fixed(k0) => LevelScalar::from(k0 + h_dual),
        };
        let prefactor = LevelScalar::from(Rational::from_integer(2.into()))
            .mul(&shifted)
            .inv()
            .ok_or(VertexError::CriticalLevel)?;
        let n = self.dim();
        let mut sum = State::zero();
        for a in 0..n {
            for b in 0..n {
                let c = inv.get(a, b);
                if c.is_zero() {
                    continue;
                }
                let term = self.mode_action(a, -1, &State::generator(b));
                sum.add_scaled(&term, &LevelScalar::from(c.clone()));
            }
        }
        Ok(sum.scale(&prefactor))
    }

    /// Image of `a` under the automorphism induced by `g` on `g`.
    pub fn apply_group_element(&self, g: &Matrix<Rational>, a: &State) -> State {
        let mut out = State::zero();
        for (m, c) in &a.terms {
            let images: Vec<Vec<(usize, Rational)>> = m
                .0
                .iter()
                .map(|f| column_terms(g, f.gen))
                .collect();
            let mut choice = vec![0usize; images.len()];
            if images.iter().any(Vec::is_empty) {
                continue;
            }
            loop {
                let mut coeff = <Rational as Scalar>::one();
                let word: Vec<(usize, i64)> = m
                    .0
                    .iter()
                    .zip(&images)
                    .zip(&choice)
                    .map(|((f, img), &ch)| {
                        coeff *= &img[ch].1;
                        (img[ch].0, -(f.depth as i64))
                    })
                    .collect();
                out.add_scaled(&self.apply_word(&word), &c.scale(&coeff));
                // Odometer over the per-factor choices.
                let mut pos = 0;
                loop {
                    if pos == choice.len() {
                        break;
                    }
                    choice[pos] += 1;
                    if choice[pos] < images[pos].len() {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
                if pos == choice.len() {
                    break;
                }
            }
        }
        out
    }

    /// Infinitesimal action of `rho ∈ Der(g)`: a derivation on PBW factors.
    pub fn lie_act(&self, rho: &Matrix<Rational>, a: &State) -> State {
        let mut out = State::zero();
        for (m, c) in &a.terms {
            for t in 0..m.0.len() {
                for (gen, r) in column_terms(rho, m.0[t].gen) {
                    let word: Vec<(usize, i64)> = m
                        .0
                        .iter()
                        .enumerate()
                        .map(|(s, f)| (if s == t { gen } else { f.gen }, -(f.depth as i64)))
                        .collect();
                    out.add_scaled(&self.apply_word(&word), &c.scale(&r));
                }
            }
        }
        out
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        if m.is_vacuum() {
            return String::from("|0>");
        }
        let mut s = String::new();
        for f in &m.0 {
            let _ = write!(s, "{}(-{})", self.spec.labels()[f.gen], f.depth);
        }
        s
    }

    /// Text rendering such as `k + 2*x(-1)y(-1)`.
    pub fn render_state(&self, state: &State) -> String {
        if state.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        for (idx, (m, c)) in state.terms.iter().enumerate() {
            if idx > 0 {
                s.push_str(" + ");
            }
            let cs = alloc::format!("{}", c);
            if m.is_vacuum() {
                s.push_str(&cs);
                continue;
            }
            let body = &self.render_monomial(m);
            if cs == "1" {
            } else if cs == "-1" {
                s.push('-');
            } else if cs.contains(' ') {
                let _ = write!(s, "({})*", cs);
            } else {
                let _ = write!(s, "{}*", cs);
            }
            s.push_str(body);
        }
        s
    }

    /// `a(z)b(w) ~ C_2 (z-w)^-2 + C_1 (z-w)^-1`.
    pub fn render_ope(&self, a_name: &str, b_name: &str, ope: &OpeList) -> String {
        let mut s = alloc::format!("{}(z){}(w) ~ ", a_name, b_name);
        if ope.is_empty() {
            s.push('0');
            return s;
        }
        for (idx, (n, c)) in ope.terms.iter().enumerate() {
            if idx > 0 {
                s.push_str(" + ");
            }
            let body = self.render_state(c);
            if body.contains(' ') {
                let _ = write!(s, "({})", body);
            } else {
                s.push_str(&body);
            }
            let _ = write!(s, " (z-w)^-{}", n + 1);
        }
        s
    }
}

fn column_terms(m: &Matrix<Rational>, col: usize) -> Vec<(usize, Rational)> {
    (0..m.rows())
        .filter_map(|r| {
            let v = m.get(r, col);
            (!v.is_zero()).then(|| (r, v.clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liedata::ActionSpec;
    use crate::scalars::{int, rat};

    const X: usize = 0;
    const Y: usize = 1;
    const H: usize = 2;

    fn mono(fs: &[(usize, u32)]) -> Monomial {
        Monomial::new(fs.iter().map(|&(g, d)| Factor::new(g, d)).collect())
    }

    fn st(fs: &[(usize, u32)]) -> State {
        State::from_monomial(mono(fs), LevelScalar::one())
    }

    fn sc(r: Rational) -> LevelScalar {
        LevelScalar::from(r)
    }

    #[test]
    fn zero_mode_brackets() {
        let v = VertexAlgebra::new(LieSpec::sl2());
        assert_eq!(v.mode_action(X, 0, &st(&[(Y, 1)])), st(&[(H, 1)]));
    }

    #[test]
    fn positive_mode_contracts() {
        let v = VertexAlgebra::new(LieSpec::sl2());
        assert_eq!(
            v.mode_action(X, 1, &st(&[(Y, 1)])),
            State::vacuum().scale(&LevelScalar::k())
        );
        let heis = VertexAlgebra::heisenberg(1);
        assert!(heis.mode_action(0, 2, &st(&[(0, 1), (0, 1)])).is_zero());
    }

    #[test]
    fn heisenberg_pole_and_locality() {
        let v = VertexAlgebra::heisenberg(1);
        let a = v.generator(0);
        assert_eq!(v.circle_product(&a, 1, &a), State::vacuum().scale(&LevelScalar::k()));
        assert_eq!(v.locality_order(&a, &a), 2);
    }

    #[test]
    fn sl2_first_order_pole() {
        let v = VertexAlgebra::new(LieSpec::sl2());
        assert_eq!(
            v.circle_product(&v.generator(H), 0, &v.generator(X)),
            st(&[(X, 1)]).scale(&sc(int(2)))
        );
        let ope = v.ope(&v.generator(X), &v.generator(Y));
        assert_eq!(
            ope.terms,
            vec![(1, State::vacuum().scale(&LevelScalar::k())), (0, st(&[(H, 1)]))]
        );
        assert_eq!(v.render_ope("x", "y", &ope), "x(z)y(w) ~ k (z-w)^-2 + h(-1) (z-w)^-1");
    }

    #[test]
    fn vacuum_is_identity() {
        let v = VertexAlgebra::new(LieSpec::sl2());
        let a = st(&[(X, 2), (H, 1)]);
        for n in -3..3 {
            let left = v.circle_product(&State::vacuum(), n, &a);
            let right = v.circle_product(&a, n, &State::vacuum());
            if n == -1 {
                assert_eq!(left, a);
                assert_eq!(right, a);
            } else {
                assert!(left.is_zero());
                if n >= 0 {
                    assert!(right.is_zero());
                }
            }
        }
        assert!(v.ope(&a, &State::vacuum()).is_empty());
    }

    #[test]
    fn wick_and_derivative() {
        let v = VertexAlgebra::heisenberg(1);
        let a = v.generator(0);
        assert_eq!(v.wick(&a, &a), st(&[(0, 1), (0, 1)]));
        let s = VertexAlgebra::new(LieSpec::sl2());
        assert_eq!(s.derivative(&s.generator(X)), st(&[(X, 2)]));
        let chain = s.wick_chain(&[s.generator(X), s.generator(Y), s.generator(H)]);
        let nested = s.wick(&s.generator(X), &s.wick(&s.generator(Y), &s.generator(H)));
        assert_eq!(chain, nested);
    }

    #[test]
    fn derivative_matches_circle_minus_two() {
        let v = VertexAlgebra::new(LieSpec::sl2());
        let a = st(&[(Y, 2), (X, 1), (H, 1)]);
        assert_eq!(v.derivative(&a), v.circle_product(&a, -2, &State::vacuum()));
    }

    #[test]
    fn weights_and_degrees() {
        assert_eq!(st(&[(X, 2), (H, 1)]).weight(), StateWeight::Homogeneous(3));
        assert_eq!(st(&[(0, 1), (0, 1), (0, 1), (0, 1)]).degree(), 4);
        let mixed = st(&[(X, 1)]).add(&State::vacuum());
        assert_eq!(mixed.weight(), StateWeight::Mixed);
        assert_eq!(State::zero().weight(), StateWeight::Zero);
    }

    #[test]
    fn leading_symbol_drops_lower_degree() {
        let a = st(&[(X, 1), (Y, 1)]).add(&State::vacuum().scale(&LevelScalar::k()));
        let ls = a.leading_symbol().unwrap();
        let expect = ClassicalPoly::monomial(
            vec![(Var::new(X, 0), 1), (Var::new(Y, 0), 1)],
            LevelScalar::one(),
        );
        assert_eq!(ls, expect);
        assert_eq!(State::zero().leading_symbol(), Err(VertexError::ZeroState));
    }

    #[test]
    fn sugawara_sl2() {
        let v = VertexAlgebra::new(LieSpec::sl2());
        let l = v.sugawara(&int(2)).unwrap();
        let c_half = LevelScalar::new(
            LevelPoly::new(vec![int(0), int(3)]),
            LevelPoly::new(vec![int(4), int(2)]),
        )
        .unwrap();
        assert_eq!(v.circle_product(&l, 3, &l), State::vacuum().scale(&c_half));
        assert!(v.circle_product(&l, 2, &l).is_zero());
        assert_eq!(v.circle_product(&l, 1, &l), l.scale(&sc(int(2))));
        assert_eq!(v.circle_product(&l, 0, &l), v.derivative(&l));
        for g in [X, Y, H] {
            let xg = v.generator(g);
            assert_eq!(v.circle_product(&l, 1, &xg), xg);
            assert_eq!(v.circle_product(&l, 0, &xg), v.derivative(&xg));
            assert!(v.circle_product(&l, 2, &xg).is_zero());
        }
        for (_, c) in l.terms() {
            assert_eq!(c.denom(), &LevelPoly::new(vec![int(2), int(1)]));
        }
    }

    #[test]
    fn sugawara_rejects_critical_level() {
        let v = VertexAlgebra::with_level(LieSpec::sl2(), Level::Fixed(int(-2)));
        assert_eq!(v.sugawara(&int(2)), Err(VertexError::CriticalLevel));
    }

    #[test]
    fn group_and_lie_actions() {
        let heis = VertexAlgebra::heisenberg(1);
        let refl = ActionSpec::orthogonal(1).finite_elements[0].clone();
        let sq = st(&[(0, 1), (0, 1)]);
        assert_eq!(heis.apply_group_element(&refl, &sq), sq);
        assert_eq!(heis.apply_group_element(&refl, &heis.generator(0)), heis.generator(0).neg());

        let v = VertexAlgebra::new(LieSpec::sl2());
        let ad = ActionSpec::adjoint(v.spec());
        let xy = st(&[(X, 1), (Y, 1)]);
        assert!(v.lie_act(&ad.lie_generators[H], &xy).is_zero());
        let a = st(&[(X, 2)]);
        let b = st(&[(Y, 1), (H, 1)]);
        for rho in &ad.lie_generators {
            let lhs = v.lie_act(rho, &v.wick(&a, &b));
            let rhs = v.wick(&v.lie_act(rho, &a), &b).add(&v.wick(&a, &v.lie_act(rho, &b)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(generalized_binomial(5, 2), int(10));
        assert_eq!(generalized_binomial(-1, 3), int(-1));
        assert_eq!(generalized_binomial(1, 2), int(0));
        assert_eq!(generalized_binomial(-2, 2), int(3));
        let _ = rat(1, 2);
    }

    #[test]
    fn basis_counts() {
        // Coloured partition counts: 3 colours, weights 0..6.
        let counts: Vec<usize> = (0..=6).map(|w| Monomial::basis(3, w).len()).collect();
        assert_eq!(counts, vec![1, 3, 9, 22, 51, 108, 221]);
        assert_eq!(Monomial::basis(1, 5).len(), 7);
    }
}
