//! JSON forms of the core values.
//!
//! Rationals are strings `"a"` or `"a/b"`; level scalars are
//! `{"num": [...], "den": [...]}` with ascending powers of `k`. Generator
//! indices in states are 1-based.

use serde::{Deserialize, Serialize};
use voa_core::orbifold::{Decoupling, FormalNop};
use voa_core::{Factor, LevelPoly, LevelScalar, LieSpec, Monomial, OpeList, Rational, Scalar, State};

use crate::config::parse_rational;

pub fn rational(r: &Rational) -> String {
    r.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelScalarJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

impl From<&LevelScalar> for LevelScalarJson {
    fn from(s: &LevelScalar) -> Self {
        LevelScalarJson {
            num: s.numer().coeffs().iter().map(rational).collect(),
            den: s.denom().coeffs().iter().map(rational).collect(),
        }
    }
}

impl LevelScalarJson {
    pub fn to_scalar(&self) -> Option<LevelScalar> {
        let poly = |v: &[String]| -> Option<LevelPoly> {
            Some(LevelPoly::new(v.iter().map(|s| parse_rational(s)).collect::<Option<Vec<_>>>()?))
        };
        LevelScalar::new(poly(&self.num)?, poly(&self.den)?).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    /// `[generator, depth]` pairs, generator 1-based.
    pub monomial: Vec<[usize; 2]>,
    pub coeff: LevelScalarJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateJson {
    pub algebra: String,
    pub terms: Vec<TermJson>,
}

impl StateJson {
    pub fn new(algebra: &str, s: &State) -> Self {
        StateJson {
            algebra: algebra.to_string(),
            terms: s
                .terms()
                .map(|(m, c)| TermJson {
                    monomial: m.factors().iter().map(|f| [f.gen + 1, f.depth as usize]).collect(),
                    coeff: c.into(),
                })
                .collect(),
        }
    }

    pub fn to_state(&self) -> Option<State> {
        let mut s = State::zero();
        for t in &self.terms {
            let factors = t
                .monomial
                .iter()
                .map(|&[g, d]| (g >= 1 && d >= 1).then(|| Factor::new(g - 1, d as u32)))
                .collect::<Option<Vec<_>>>()?;
            s.add_term(Monomial::new(factors), t.coeff.to_scalar()?);
        }
        Some(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OpeTermJson {
    pub n: u32,
    pub state: StateJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct OpeJson {
    pub a: String,
    pub b: String,
    pub terms: Vec<OpeTermJson>,
}

impl OpeJson {
    pub fn new(algebra: &str, a: &str, b: &str, ope: &OpeList) -> Self {
        OpeJson {
            a: a.to_string(),
            b: b.to_string(),
            terms: ope
                .terms
                .iter()
                .map(|(n, s)| OpeTermJson {
                    n: *n,
                    state: StateJson::new(algebra, s),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NopFactorJson {
    pub symbol: String,
    pub derivatives: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct NopTermJson {
    pub factors: Vec<NopFactorJson>,
    pub coeff: LevelScalarJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct NopJson {
    pub text: String,
    pub terms: Vec<NopTermJson>,
}

impl From<&FormalNop> for NopJson {
    fn from(nop: &FormalNop) -> Self {
        NopJson {
            text: nop.to_string(),
            terms: nop
                .terms()
                .map(|(f, c)| NopTermJson {
                    factors: f
                        .iter()
                        .map(|(s, d)| NopFactorJson {
                            symbol: s.to_string(),
                            derivatives: *d,
                        })
                        .collect(),
                    coeff: c.into(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecouplingJson {
    pub relation: Option<NopJson>,
    pub excluded_levels: Vec<String>,
}

impl From<&Decoupling> for DecouplingJson {
    fn from(d: &Decoupling) -> Self {
        DecouplingJson {
            relation: d.relation.as_ref().map(NopJson::from),
            excluded_levels: d.excluded_levels.iter().map(rational).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntryJson {
    pub n: usize,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketEntryJson {
    pub i: String,
    pub j: String,
    pub l: String,
    pub c: String,
}

/// Canonical echo of a Lie algebra: labels, nonzero structure constants
/// with `i < j`, and the form matrix.
#[derive(Debug, Clone, Serialize)]
pub struct LieSpecJson {
    pub labels: Vec<String>,
    pub brackets: Vec<BracketEntryJson>,
    pub form: Vec<Vec<String>>,
    pub dual_coxeter: Option<String>,
}

impl From<&LieSpec> for LieSpecJson {
    fn from(spec: &LieSpec) -> Self {
        let n = spec.dim();
        let labels = spec.labels().to_vec();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for l in 0..n {
                    let c = spec.structure_constant(i, j, l);
                    if !c.is_zero() {
                        brackets.push(BracketEntryJson {
                            i: labels[i].clone(),
                            j: labels[j].clone(),
                            l: labels[l].clone(),
                            c: rational(c),
                        });
                    }
                }
            }
        }
        LieSpecJson {
            brackets,
            form: (0..n).map(|i| (0..n).map(|j| rational(spec.form(i, j))).collect()).collect(),
            dual_coxeter: spec.dual_coxeter().map(rational),
            labels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use voa_core::VertexAlgebra;

    #[test]
    fn scalar_round_trip() {
        let alg = VertexAlgebra::new(LieSpec::sl2());
        let l = alg.sugawara(&voa_core::scalars::int(2)).unwrap();
        let json = StateJson::new("sl2", &l);
        let text = serde_json::to_string(&json).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_state().unwrap(), l);
        let c = LevelScalarJson::from(l.terms().next().unwrap().1);
        assert_eq!(c.den, vec!["2".to_string(), "1".to_string()]);
    }

    #[test]
    fn table_entry_shape() {
        let e = TableEntryJson {
            n: 1,
            value: "5/4".into(),
        };
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"n":1,"value":"5/4"}"#);
    }
}
