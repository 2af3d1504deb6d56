//! JSON form of function specifications and angles.
//!
//! Angles are strings `"a/b"` when exact and numbers otherwise. Characters
//! are named by `(modulus, index)` in the enumeration of the core crate.

use std::collections::BTreeMap;

use orbitlab_core::multfunc::{character_by_index, make_pseudocharacter};
use orbitlab_core::{Angle, BaseRule, MultFnSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleDoc {
    Exact(String),
    Real(f64),
}

impl AngleDoc {
    pub fn to_angle(&self, field: &str) -> CliResult<Angle> {
        match self {
            AngleDoc::Real(x) if x.is_finite() => Ok(Angle::real(*x)),
            AngleDoc::Real(_) => Err(CliError::config(field, "angle must be finite")),
            AngleDoc::Exact(s) => parse_angle(s).map_err(|r| CliError::config(field, r)),
        }
    }

    pub fn from_angle(a: Angle) -> Self {
        match a {
            Angle::Rational { num, den } => AngleDoc::Exact(format!("{num}/{den}")),
            Angle::Real(x) => AngleDoc::Real(x),
        }
    }
}

/// `"a/b"` or an integer is exact; anything else parses as a float.
pub fn parse_angle(s: &str) -> Result<Angle, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: i64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let den: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        if den == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Angle::rational(num, den));
    }
    if let Ok(k) = s.parse::<i64>() {
        return Ok(Angle::rational(k, 1));
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(Angle::real(x)),
        _ => Err(format!("`{s}` is not an angle (use a/b or a decimal)")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseDoc {
    Constant(AngleDoc),
    Character { modulus: u64, index: u64 },
    Pseudocharacter { modulus: u64, index: u64, k: u64 },
    RandomPhase { seed: u64 },
    RandomSign { seed: u64 },
    InversePrime,
    Product(Vec<BaseDoc>),
    Power { k: i64, base: Box<BaseDoc> },
}

impl Default for BaseDoc {
    fn default() -> Self {
        BaseDoc::Constant(AngleDoc::Exact("0/1".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnSpecDoc {
    #[serde(default)]
    pub base: BaseDoc,
    #[serde(default)]
    pub exceptions: BTreeMap<u64, AngleDoc>,
    #[serde(default)]
    pub twist: f64,
}

impl BaseDoc {
    fn to_rule(&self, field: &str) -> CliResult<BaseRule> {
        Ok(match self {
            BaseDoc::Constant(a) => BaseRule::Constant(a.to_angle(field)?),
            BaseDoc::Character { modulus, index } => {
                BaseRule::Character(character_by_index(*modulus, *index)?)
            }
            BaseDoc::Pseudocharacter { modulus, index, k } => BaseRule::Pseudocharacter(
                make_pseudocharacter(character_by_index(*modulus, *index)?, *k)?,
            ),
            BaseDoc::RandomPhase { seed } => BaseRule::RandomPhase { seed: *seed },
            BaseDoc::RandomSign { seed } => BaseRule::RandomSign { seed: *seed },
            BaseDoc::InversePrime => BaseRule::InversePrime,
            BaseDoc::Product(rules) => BaseRule::Product(
                rules
                    .iter()
                    .map(|r| r.to_rule(field))
                    .collect::<CliResult<_>>()?,
            ),
            BaseDoc::Power { k, base } => BaseRule::Power(*k, Box::new(base.to_rule(field)?)),
        })
    }

    fn from_rule(rule: &BaseRule) -> Self {
        match rule {
            BaseRule::Constant(a) => BaseDoc::Constant(AngleDoc::from_angle(*a)),
            BaseRule::Character(chi) => BaseDoc::Character {
                modulus: chi.modulus(),
                index: chi.index(),
            },
            BaseRule::Pseudocharacter(h) => BaseDoc::Pseudocharacter {
                modulus: h.chi().modulus(),
                index: h.chi().index(),
                k: h.k(),
            },
            BaseRule::RandomPhase { seed } => BaseDoc::RandomPhase { seed: *seed },
            BaseRule::RandomSign { seed } => BaseDoc::RandomSign { seed: *seed },
            BaseRule::InversePrime => BaseDoc::InversePrime,
            BaseRule::Product(rules) => {
                BaseDoc::Product(rules.iter().map(BaseDoc::from_rule).collect())
            }
            BaseRule::Power(k, rule) => BaseDoc::Power {
                k: *k,
                base: Box::new(BaseDoc::from_rule(rule)),
            },
        }
    }
}

impl FnSpecDoc {
    pub fn to_spec(&self, field: &str) -> CliResult<MultFnSpec> {
        if !self.twist.is_finite() {
            return Err(CliError::config(field, "twist must be finite"));
        }
        let mut f = MultFnSpec::from_base(self.base.to_rule(field)?).with_twist(self.twist);
        for (&p, a) in &self.exceptions {
            f = f.with_exception(p, a.to_angle(field)?);
        }
        Ok(f)
    }

    pub fn from_spec(f: &MultFnSpec) -> Self {
        Self {
            base: BaseDoc::from_rule(&f.base),
            exceptions: f
                .exceptions
                .iter()
                .map(|(&p, &a)| (p, AngleDoc::from_angle(a)))
                .collect(),
            twist: f.twist,
        }
    }
}

/// Reads a spec from inline JSON or, with a leading `@`, from a file.
pub fn load_spec_value(arg: &str) -> Result<serde_json::Value, String> {
    let text = match arg.strip_prefix('@') {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))?
        }
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| format!("not valid JSON: {e}"))
}

pub fn spec_from_value(v: &serde_json::Value, field: &str) -> CliResult<MultFnSpec> {
    let doc: FnSpecDoc =
        serde_json::from_value(v.clone()).map_err(|e| CliError::config(field, e.to_string()))?;
    doc.to_spec(field)
}
