//! Lie algebra data `(g, B)` and symmetry actions on `g`.
//!
//! A [`LieSpec`] stores dense structure constants `c[i][j][l]` with
//! `[ξ_i, ξ_j] = Σ_l c[i][j][l] ξ_l` and the Gram matrix of the bilinear form.
//! An [`ActionSpec`] gives the symmetry group infinitesimally (matrices of a
//! Lie algebra acting on `g`) together with finitely many group elements for
//! the components the Lie algebra cannot reach. Matrices act on column
//! vectors: column `j` is the image of `ξ_j`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalars::{int, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("dimension must be positive")]
    EmptyAlgebra,
    #[error("expected {expected} entries for {what}, found {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unknown generator label `{0}`")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieSpec {
    labels: Vec<String>,
    structure: Vec<Rational>,
    form: Vec<Rational>,
    dual_coxeter: Option<Rational>,
}

/// One failed identity with the basis indices that witness it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Antisymmetry { i: usize, j: usize, l: usize },
    Jacobi { i: usize, j: usize, k: usize, l: usize },
    FormAsymmetric { i: usize, j: usize },
    FormNotInvariant { i: usize, j: usize, l: usize },
    FormDegenerate,
    ActionDimension { expected: usize, found: usize },
    NotDerivation { generator: usize, i: usize, j: usize },
    NotSkew { generator: usize, i: usize, j: usize },
    BracketNotPreserved { element: usize, i: usize, j: usize },
    FormNotPreserved { element: usize, i: usize, j: usize },
}

/// Failures found by [`LieSpec::validate`] or [`ActionSpec::validate`];
/// empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl LieSpec {
    pub fn new(
        labels: Vec<String>,
        structure: Vec<Rational>,
        form: Vec<Rational>,
    ) -> Result<Self, LieError> {
        let n = labels.len();
        if n == 0 {
            return Err(LieError::EmptyAlgebra);
        }
        if structure.len() != n * n * n {
            return Err(LieError::Shape {
                what: "structure constants",
                expected: n * n * n,
                found: structure.len(),
            });
        }
        if form.len() != n * n {
            return Err(LieError::Shape {
                what: "bilinear form",
                expected: n * n,
                found: form.len(),
            });
        }
        Ok(LieSpec {
            labels,
            structure,
            form,
            dual_coxeter: None,
        })
    }

    /// Abelian algebra of rank `n` with `B` the identity: the Heisenberg case.
    pub fn abelian(n: usize) -> Self {
        assert!(n >= 1, "abelian algebra needs n >= 1");
        let labels = (1..=n).map(|i| format!("a{}", i)).collect();
        let mut form = vec![Rational::zero(); n * n];
        for i in 0..n {
            form[i * n + i] = int(1);
        }
        LieSpec {
            labels,
            structure: vec![Rational::zero(); n * n * n],
            form,
            dual_coxeter: None,
        }
    }

    /// sl₂ in the root basis `(x, y, h)` with `[x,y]=h`, `[h,x]=2x`,
    /// `[h,y]=-2y`, `B(x,y)=1`, `B(h,h)=2`, and `h∨ = 2`.
    pub fn sl2() -> Self {
        let labels = vec!["x".to_string(), "y".to_string(), "h".to_string()];
        let mut spec = LieSpec {
            labels,
            structure: vec![Rational::zero(); 27],
            form: vec![Rational::zero(); 9],
            dual_coxeter: Some(int(2)),
        };
        let (x, y, h) = (0, 1, 2);
        spec.set_bracket(x, y, h, int(1));
        spec.set_bracket(h, x, x, int(2));
        spec.set_bracket(h, y, y, int(-2));
        spec.set_form(x, y, int(1));
        spec.set_form(h, h, int(2));
        spec
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize, LieError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| LieError::UnknownLabel(label.to_string()))
    }

    pub fn dual_coxeter(&self) -> Option<&Rational> {
        self.dual_coxeter.as_ref()
    }

    pub fn with_dual_coxeter(mut self, h: Rational) -> Self {
        self.dual_coxeter = Some(h);
        self
    }

    pub fn structure_constant(&self, i: usize, j: usize, l: usize) -> &Rational {
        let n = self.dim();
        &self.structure[(i * n + j) * n + l]
    }

    /// Raw assignment of `c[i][j][l]`; does not touch `c[j][i][l]`.
    pub fn set_structure_constant(&mut self, i: usize, j: usize, l: usize, c: Rational) {
        let n = self.dim();
        self.structure[(i * n + j) * n + l] = c;
    }

    /// Sets `c[i][j][l] = c` and `c[j][i][l] = -c`.
    pub fn set_bracket(&mut self, i: usize, j: usize, l: usize, c: Rational) {
        self.set_structure_constant(j, i, l, -c.clone());
        self.set_structure_constant(i, j, l, c);
    }

    pub fn form(&self, i: usize, j: usize) -> &Rational {
        &self.form[i * self.dim() + j]
    }

    /// Sets `B(i,j)` and `B(j,i)`.
    pub fn set_form(&mut self, i: usize, j: usize, b: Rational) {
        let n = self.dim();
        self.form[i * n + j] = b.clone();
        self.form[j * n + i] = b;
    }

    pub fn form_matrix(&self) -> Matrix<Rational> {
        let n = self.dim();
        Matrix::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| self.form(i, j).clone()).collect())
                .collect(),
        )
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(|c| c.is_zero())
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let ab = ai * bj;
                for (l, o) in out.iter_mut().enumerate() {
                    let c = self.structure_constant(i, j, l);
                    if !c.is_zero() {
                        *o += &ab * c;
                    }
                }
            }
        }
        out
    }

    pub fn pair(&self, a: &[Rational], b: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                let f = self.form(i, j);
                if !f.is_zero() {
                    acc += ai * bj * f;
                }
            }
        }
        acc
    }

    fn basis(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = int(1);
        v
    }

    fn bracket_basis(&self, i: usize, j: usize) -> Vec<Rational> {
        let n = self.dim();
        (0..n).map(|l| self.structure_constant(i, j, l).clone()).collect()
    }

    /// Checks antisymmetry, Jacobi, symmetry, invariance and nondegeneracy.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let s = self.structure_constant(i, j, l) + self.structure_constant(j, i, l);
                    if !s.is_zero() && i <= j {
                        violations.push(Violation::Antisymmetry { i, j, l });
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (ei, ej, ek) = (self.basis(i), self.basis(j), self.basis(k));
                    let t1 = self.bracket(&ei, &self.bracket(&ej, &ek));
                    let t2 = self.bracket(&ej, &self.bracket(&ek, &ei));
                    let t3 = self.bracket(&ek, &self.bracket(&ei, &ej));
                    for l in 0..n {
                        if !(&t1[l] + &t2[l] + &t3[l]).is_zero() {
                            violations.push(Violation::Jacobi { i, j, k, l });
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.form(i, j) != self.form(j, i) {
                    violations.push(Violation::FormAsymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let lhs = self.pair(&self.bracket_basis(i, j), &self.basis(l));
                    let rhs = self.pair(&self.basis(j), &self.bracket_basis(i, l));
                    if !(lhs + rhs).is_zero() {
                        violations.push(Violation::FormNotInvariant { i, j, l });
                    }
                }
            }
        }
        if self.form_matrix().determinant().is_zero() {
            violations.push(Violation::FormDegenerate);
        }
        ValidationReport { violations }
    }
}

/// Symmetry group data acting on `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpec {
    pub label: String,
    pub lie_generators: Vec<Matrix<Rational>>,
    pub finite_elements: Vec<Matrix<Rational>>,
}

impl ActionSpec {
    /// The adjoint action: one `ad ξ_i` per basis vector.
    pub fn adjoint(spec: &LieSpec) -> Self {
        let n = spec.dim();
        let lie_generators = (0..n)
            .map(|i| {
                let mut m = Matrix::zeros(n, n);
                for j in 0..n {
                    for l in 0..n {
                        m.set(l, j, spec.structure_constant(i, j, l).clone());
                    }
                }
                m
            })
            .collect();
        ActionSpec {
            label: "adjoint".to_string(),
            lie_generators,
            finite_elements: Vec::new(),
        }
    }

    /// O(n) on an orthonormal basis: rotations `E_ab - E_ba` for `a < b`
    /// plus the reflection `diag(-1, 1, ..., 1)`.
    pub fn orthogonal(n: usize) -> Self {
        assert!(n >= 1);
        let mut lie_generators = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let mut m = Matrix::zeros(n, n);
                m.set(a, b, int(1));
                m.set(b, a, int(-1));
                lie_generators.push(m);
            }
        }
        let mut reflection = Matrix::identity(n);
        reflection.set(0, 0, int(-1));
        ActionSpec {
            label: format!("O({})", n),
            lie_generators,
            finite_elements: vec![reflection],
        }
    }

    /// SO(n): rotations only.
    pub fn special_orthogonal(n: usize) -> Self {
        let mut a = Self::orthogonal(n);
        a.finite_elements.clear();
        a.label = format!("SO({})", n);
        a
    }

    pub fn dim(&self) -> Option<usize> {
        self.lie_generators
            .iter()
            .chain(&self.finite_elements)
            .map(Matrix::rows)
            .next()
    }

    /// Checks that Lie generators are skew derivations and that finite
    /// elements are automorphisms preserving `B`, on all basis pairs.
    pub fn validate(&self, spec: &LieSpec) -> ValidationReport {
        let n = spec.dim();
        let mut violations = Vec::new();
        for m in self.lie_generators.iter().chain(&self.finite_elements) {
            if m.rows() != n || m.cols() != n {
                violations.push(Violation::ActionDimension {
                    expected: n,
                    found: m.rows(),
                });
                return ValidationReport { violations };
            }
        }
        let apply = |m: &Matrix<Rational>, v: &[Rational]| -> Vec<Rational> {
            (0..n)
                .map(|r| {
                    (0..n).fold(Rational::zero(), |acc, c| acc + m.get(r, c).mul(&v[c]))
                })
                .collect()
        };
        for (g, rho) in self.lie_generators.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let (ei, ej) = (spec.basis(i), spec.basis(j));
                    let lhs = apply(rho, &spec.bracket(&ei, &ej));
                    let r1 = spec.bracket(&apply(rho, &ei), &ej);
                    let r2 = spec.bracket(&ei, &apply(rho, &ej));
                    if (0..n).any(|l| lhs[l] != &r1[l] + &r2[l]) {
                        violations.push(Violation::NotDerivation { generator: g, i, j });
                    }
                    let skew = spec.pair(&apply(rho, &ei), &ej) + spec.pair(&ei, &apply(rho, &ej));
                    if !skew.is_zero() {
                        violations.push(Violation::NotSkew { generator: g, i, j });
                    }
                }
            }
        }
        for (e, m) in self.finite_elements.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let (ei, ej) = (spec.basis(i), spec.basis(j));
                    let lhs = apply(m, &spec.bracket(&ei, &ej));
                    let rhs = spec.bracket(&apply(m, &ei), &apply(m, &ej));
                    if lhs != rhs {
                        violations.push(Violation::BracketNotPreserved { element: e, i, j });
                    }
                    if spec.pair(&apply(m, &ei), &apply(m, &ej)) != *spec.form(i, j) {
                        violations.push(Violation::FormNotPreserved { element: e, i, j });
                    }
                }
            }
        }
        ValidationReport { violations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_is_valid() {
        assert!(LieSpec::abelian(3).validate().is_valid());
        assert_eq!(LieSpec::abelian(1).form_matrix(), Matrix::identity(1));
    }

    #[test]
    fn sl2_is_valid_with_expected_data() {
        let s = LieSpec::sl2();
        assert!(s.validate().is_valid(), "{:?}", s.validate());
        let (x, y, h) = (0, 1, 2);
        assert_eq!(s.structure_constant(x, y, h), &int(1));
        assert_eq!(s.form(h, h), &int(2));
        assert_eq!(s.form(x, x), &int(0));
        assert_eq!(s.form(y, x), &int(1));
    }

    #[test]
    fn altered_sl2_reports_invariance_witness() {
        let mut s = LieSpec::sl2();
        let (x, y, h) = (0, 1, 2);
        s.set_structure_constant(h, x, x, int(3));
        let report = s.validate();
        assert!(report
            .violations
            .contains(&Violation::FormNotInvariant { i: h, j: x, l: y }));
    }

    #[test]
    fn degenerate_form_is_reported() {
        let mut s = LieSpec::abelian(2);
        s.set_form(1, 1, int(0));
        assert!(s.validate().violations.contains(&Violation::FormDegenerate));
    }

    #[test]
    fn adjoint_h_scales_x_by_two() {
        let s = LieSpec::sl2();
        let ad = ActionSpec::adjoint(&s);
        let ad_h = &ad.lie_generators[2];
        assert_eq!(ad_h.get(0, 0), &int(2));
        assert_eq!(ad_h.get(1, 0), &int(0));
        assert_eq!(ad_h.get(2, 0), &int(0));
    }

    #[test]
    fn adjoint_matrices_satisfy_sl2_relations() {
        let s = LieSpec::sl2();
        let ad = ActionSpec::adjoint(&s);
        let (x, y, h) = (&ad.lie_generators[0], &ad.lie_generators[1], &ad.lie_generators[2]);
        let comm = |a: &Matrix<Rational>, b: &Matrix<Rational>| {
            let ab = a.mul(b).to_rows();
            let ba = b.mul(a).to_rows();
            Matrix::from_rows(
                ab.iter()
                    .zip(&ba)
                    .map(|(r1, r2)| r1.iter().zip(r2).map(|(p, q)| p - q).collect())
                    .collect(),
            )
        };
        let scale = |a: &Matrix<Rational>, c: i64| {
            Matrix::from_rows(
                a.to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(|v| v * int(c)).collect())
                    .collect(),
            )
        };
        assert_eq!(comm(x, y), h.clone());
        assert_eq!(comm(h, x), scale(x, 2));
        assert_eq!(comm(h, y), scale(y, -2));
    }

    #[test]
    fn constructed_actions_validate() {
        let s = LieSpec::sl2();
        assert!(ActionSpec::adjoint(&s).validate(&s).is_valid());
        for n in 1..=4 {
            let a = LieSpec::abelian(n);
            let o = ActionSpec::orthogonal(n);
            assert_eq!(o.lie_generators.len(), n * (n - 1) / 2);
            assert!(o.validate(&a).is_valid());
        }
        let o2 = ActionSpec::orthogonal(2);
        let r = &o2.lie_generators[0];
        assert_eq!(r.get(0, 1), &int(1));
        assert_eq!(r.get(1, 0), &int(-1));
    }

    #[test]
    fn non_skew_generator_is_reported() {
        let a = LieSpec::abelian(2);
        let bad = ActionSpec {
            label: "scaling".into(),
            lie_generators: vec![Matrix::identity(2)],
            finite_elements: vec![],
        };
        assert!(!bad.validate(&a).is_valid());
    }
}
