//! Algebra description files.
//!
//! A small sectioned key-value format:
//!
//! ```text
//! [algebra]
//! dim = 3
//! labels = x, y, h
//! dual_coxeter = 2
//!
//! [brackets]
//! x y h = 1        # [x, y] = 1·h, antisymmetric partner implied
//! h x x = 2
//! h y y = -2
//!
//! [form]
//! x y = 1          # symmetric partner implied
//! h h = 2
//!
//! [action]
//! label = adjoint
//! preset = adjoint # or orthogonal / special_orthogonal
//! lie = 0 1 0; 0 0 0; 0 0 0
//! finite = -1 0 0; 0 1 0; 0 0 1
//! ```
//!
//! Generators are referred to by label or by 1-based index. Matrix rows are
//! separated by `;`. `#` starts a comment.

use std::path::Path;

use thiserror::Error;
use voa_core::scalars::int;
use voa_core::{ActionSpec, LieSpec, Matrix, Rational};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("invalid Lie algebra data: {0:?}")]
    InvalidSpec(Vec<voa_core::Violation>),
    #[error("invalid action: {0:?}")]
    InvalidAction(Vec<voa_core::Violation>),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// A parsed algebra file.
#[derive(Debug, Clone)]
pub struct AlgebraConfig {
    pub spec: LieSpec,
    pub action: Option<ActionSpec>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Algebra,
    Brackets,
    Form,
    Action,
}

fn syntax(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    s.trim().parse::<Rational>().ok()
}

fn resolve(labels: &[String], token: &str, line: usize) -> Result<usize, ConfigError> {
    if let Some(i) = labels.iter().position(|l| l == token) {
        return Ok(i);
    }
    match token.parse::<usize>() {
        Ok(i) if (1..=labels.len()).contains(&i) => Ok(i - 1),
        _ => Err(syntax(line, format!("unknown generator `{}`", token))),
    }
}

fn parse_matrix(text: &str, n: usize, line: usize) -> Result<Matrix<Rational>, ConfigError> {
    let rows: Vec<Vec<Rational>> = text
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|t| parse_rational(t).ok_or_else(|| syntax(line, format!("bad rational `{}`", t))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(syntax(line, format!("matrix must be {}x{}", n, n)));
    }
    Ok(Matrix::from_rows(rows))
}

pub fn parse(text: &str) -> Result<AlgebraConfig, ConfigError> {
    let mut section = Section::None;
    let mut dim: Option<usize> = None;
    let mut labels: Option<Vec<String>> = None;
    let mut dual_coxeter: Option<Rational> = None;
    let mut brackets: Vec<(usize, String)> = Vec::new();
    let mut forms: Vec<(usize, String)> = Vec::new();
    let mut action_lines: Vec<(usize, String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') && content.ends_with(']') {
            section = match &content[1..content.len() - 1] {
                "algebra" => Section::Algebra,
                "brackets" => Section::Brackets,
                "form" => Section::Form,
                "action" => Section::Action,
                other => return Err(syntax(line, format!("unknown section [{}]", other))),
            };
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(syntax(line, "expected `key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        match section {
            Section::None => return Err(syntax(line, "entry outside of a section")),
            Section::Algebra => match key {
                "dim" => dim = Some(value.parse().map_err(|_| syntax(line, "dim must be a positive integer"))?),
                "labels" => labels = Some(value.split(',').map(|s| s.trim().to_string()).collect()),
                "dual_coxeter" => {
                    dual_coxeter = Some(parse_rational(value).ok_or_else(|| syntax(line, "bad dual Coxeter number"))?)
                }
                other => return Err(syntax(line, format!("unknown key `{}`", other))),
            },
            Section::Brackets => brackets.push((line, content.to_string())),
            Section::Form => forms.push((line, content.to_string())),
            Section::Action => action_lines.push((line, key.to_string(), value.to_string())),
        }
    }

    let n = dim.or(labels.as_ref().map(Vec::len)).ok_or(ConfigError::Missing("[algebra] dim"))?;
    let labels = labels.unwrap_or_else(|| (1..=n).map(|i| format!("a{}", i)).collect());
    if labels.len() != n || n == 0 {
        return Err(syntax(0, format!("expected {} labels, found {}", n, labels.len())));
    }
    let mut spec = LieSpec::new(labels.clone(), vec![int(0); n * n * n], vec![int(0); n * n])
        .map_err(|e| syntax(0, e.to_string()))?;
    if let Some(h) = dual_coxeter {
        spec = spec.with_dual_coxeter(h);
    }
    for (line, entry) in brackets {
        let (lhs, rhs) = entry.split_once('=').expect("checked above");
        let idx: Vec<&str> = lhs.split_whitespace().collect();
        if idx.len() != 3 {
            return Err(syntax(line, "bracket entries read `i j l = c`"));
        }
        let c = parse_rational(rhs).ok_or_else(|| syntax(line, "bad rational"))?;
        let (i, j, l) = (resolve(&labels, idx[0], line)?, resolve(&labels, idx[1], line)?, resolve(&labels, idx[2], line)?);
        spec.set_bracket(i, j, l, c);
    }
    for (line, entry) in forms {
        let (lhs, rhs) = entry.split_once('=').expect("checked above");
        let idx: Vec<&str> = lhs.split_whitespace().collect();
        if idx.len() != 2 {
            return Err(syntax(line, "form entries read `i j = b`"));
        }
        let b = parse_rational(rhs).ok_or_else(|| syntax(line, "bad rational"))?;
        spec.set_form(resolve(&labels, idx[0], line)?, resolve(&labels, idx[1], line)?, b);
    }
    let report = spec.validate();
    if !report.is_valid() {
        return Err(ConfigError::InvalidSpec(report.violations));
    }

    let action = if action_lines.is_empty() {
        None
    } else {
        let mut action = ActionSpec {
            label: String::from("custom"),
            lie_generators: Vec::new(),
            finite_elements: Vec::new(),
        };
        let mut label = None;
        for (line, key, value) in action_lines {
            match key.as_str() {
                "label" => label = Some(value),
                "preset" => {
                    action = match value.as_str() {
                        "adjoint" => ActionSpec::adjoint(&spec),
                        "orthogonal" => ActionSpec::orthogonal(n),
                        "special_orthogonal" => ActionSpec::special_orthogonal(n),
                        other => return Err(syntax(line, format!("unknown preset `{}`", other))),
                    }
                }
                "lie" => action.lie_generators.push(parse_matrix(&value, n, line)?),
                "finite" => action.finite_elements.push(parse_matrix(&value, n, line)?),
                other => return Err(syntax(line, format!("unknown key `{}`", other))),
            }
        }
        if let Some(l) = label {
            action.label = l;
        }
        let report = action.validate(&spec);
        if !report.is_valid() {
            return Err(ConfigError::InvalidAction(report.violations));
        }
        Some(action)
    };
    Ok(AlgebraConfig { spec, action })
}

pub fn load(path: &Path) -> Result<AlgebraConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SL2: &str = "
[algebra]
dim = 3
labels = x, y, h
dual_coxeter = 2

[brackets]
x y h = 1
h x x = 2
h y y = -2

[form]
x y = 1
h h = 2

[action]
preset = adjoint
";

    #[test]
    fn sl2_round_trip() {
        let cfg = parse(SL2).unwrap();
        assert_eq!(cfg.spec, LieSpec::sl2());
        assert_eq!(cfg.action.unwrap().lie_generators.len(), 3);
    }

    #[test]
    fn invariance_failure_is_reported() {
        let broken = SL2.replace("h x x = 2", "h x x = 3");
        assert!(matches!(parse(&broken), Err(ConfigError::InvalidSpec(_))));
    }

    #[test]
    fn numeric_indices_and_matrices() {
        let text = "[algebra]\ndim = 2\n[form]\n1 1 = 1\n2 2 = 1\n[action]\nlie = 0 1; -1 0\nfinite = -1 0; 0 1\n";
        let cfg = parse(text).unwrap();
        assert_eq!(cfg.spec, LieSpec::abelian(2));
        let a = cfg.action.unwrap();
        assert_eq!(a.lie_generators.len(), 1);
        assert_eq!(a.finite_elements.len(), 1);
        assert!(parse("[algebra]\ndim = 2\n[form]\n1 3 = 1\n").is_err());
    }
}
