//! JSON operand files: a map from operand names to operator descriptions.
//!
//! ```json
//! {"S": {"kind": "matrix", "entries": [[[1, 0.2], [0, 0]], [[0, 0], [2, 0.5]]]},
//!  "T": {"kind": "dphi", "rho": 0.5, "shift": [0.41, 0]}}
//! ```
//!
//! Complex scalars are `[re, im]` pairs. Unknown keys are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::operators::{
    HarmonicSymbol, OperatorKind, OperatorModel, Polynomial, RankOnePair, WeightRule,
};
use crate::C64;

type Pair = [f64; 2];

fn to_c(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn from_c(z: C64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperandSpec {
    Matrix {
        entries: Vec<Vec<Pair>>,
    },
    Dphi {
        rho: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<Pair>,
    },
    DirichletShift {
        rule: ShiftRuleName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<Pair>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<WeightEntry>>,
    },
    FiniteRank {
        pairs: Vec<PairSpec>,
    },
    Toeplitz {
        alpha: f64,
        #[serde(default)]
        analytic: Vec<Pair>,
        #[serde(default)]
        coanalytic: Vec<Pair>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftRuleName {
    Constant,
    COverN,
    RealList,
    ImaginaryList,
    List,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightEntry {
    Real(f64),
    Complex(Pair),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub g: Vec<Pair>,
    pub h: Vec<Pair>,
}

fn poly(list: &[Pair]) -> Result<Polynomial> {
    Polynomial::new(list.iter().map(to_c).collect())
}

impl OperandSpec {
    pub fn build(&self) -> Result<OperatorModel> {
        match self {
            OperandSpec::Matrix { entries } => {
                let rows = entries
                    .iter()
                    .map(|r| r.iter().map(to_c).collect())
                    .collect();
                OperatorModel::matrix(ComplexMatrix::from_rows(rows)?)
            }
            OperandSpec::Dphi { rho, shift } => {
                let d = OperatorModel::dphi(*rho)?;
                Ok(match shift {
                    Some(s) => d.shift_identity(to_c(s)),
                    None => d,
                })
            }
            OperandSpec::DirichletShift { rule, c, weights } => {
                let need_c = || {
                    c.as_ref().map(to_c).ok_or_else(|| {
                        Error::OperandFile(format!("rule {rule:?} needs the key \"c\""))
                    })
                };
                let need_w = || {
                    weights.as_ref().ok_or_else(|| {
                        Error::OperandFile(format!("rule {rule:?} needs the key \"weights\""))
                    })
                };
                let reals = |w: &Vec<WeightEntry>| -> Result<Vec<f64>> {
                    w.iter()
                        .map(|e| match e {
                            WeightEntry::Real(x) => Ok(*x),
                            WeightEntry::Complex(_) => {
                                Err(Error::OperandFile("expected real weights".into()))
                            }
                        })
                        .collect()
                };
                let stray = match rule {
                    ShiftRuleName::Constant | ShiftRuleName::COverN => weights.is_some(),
                    _ => c.is_some(),
                };
                if stray {
                    return Err(Error::OperandFile(format!(
                        "rule {rule:?} does not take both \"c\" and \"weights\""
                    )));
                }
                let rule = match rule {
                    ShiftRuleName::Constant => WeightRule::Constant { c: need_c()? },
                    ShiftRuleName::COverN => WeightRule::COverN { c: need_c()? },
                    ShiftRuleName::RealList => WeightRule::RealList {
                        weights: reals(need_w()?)?,
                    },
                    ShiftRuleName::ImaginaryList => WeightRule::ImaginaryList {
                        weights: reals(need_w()?)?,
                    },
                    ShiftRuleName::List => WeightRule::List {
                        weights: need_w()?
                            .iter()
                            .map(|e| match e {
                                WeightEntry::Real(x) => C64::new(*x, 0.0),
                                WeightEntry::Complex(p) => to_c(p),
                            })
                            .collect(),
                    },
                };
                OperatorModel::dirichlet_shift(rule)
            }
            OperandSpec::FiniteRank { pairs } => {
                let pairs = pairs
                    .iter()
                    .map(|p| {
                        Ok(RankOnePair {
                            g: poly(&p.g)?,
                            h: poly(&p.h)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                OperatorModel::finite_rank(pairs)
            }
            OperandSpec::Toeplitz {
                alpha,
                analytic,
                coanalytic,
            } => OperatorModel::toeplitz(
                HarmonicSymbol::new(poly(analytic)?, poly(coanalytic)?),
                *alpha,
            ),
        }
    }

    /// Inverse of [`OperandSpec::build`] for models expressible in the format.
    pub fn describe(model: &OperatorModel) -> Result<Self> {
        let unsupported = || {
            Error::OperandFile(format!(
                "operator {} has no operand-file representation",
                model.digest()
            ))
        };
        let pairs = |p: &Polynomial| p.coeffs.iter().copied().map(from_c).collect::<Vec<_>>();
        match model.kind() {
            OperatorKind::Matrix { entries } => Ok(OperandSpec::Matrix {
                entries: entries
                    .to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(from_c).collect())
                    .collect(),
            }),
            OperatorKind::CompositionDifferentiation { rho } => Ok(OperandSpec::Dphi {
                rho: *rho,
                shift: None,
            }),
            OperatorKind::ToeplitzHarmonic { symbol } => {
                let alpha = match model.space() {
                    crate::rkhs::KernelSpace::Bergman { alpha } => alpha,
                    _ => return Err(unsupported()),
                };
                Ok(OperandSpec::Toeplitz {
                    alpha,
                    analytic: pairs(&symbol.analytic),
                    coanalytic: pairs(&symbol.coanalytic),
                })
            }
            OperatorKind::DirichletShift { rule } => {
                let (name, c, weights) = match rule {
                    WeightRule::Constant { c } => (ShiftRuleName::Constant, Some(from_c(*c)), None),
                    WeightRule::COverN { c } => (ShiftRuleName::COverN, Some(from_c(*c)), None),
                    WeightRule::RealList { weights } => (
                        ShiftRuleName::RealList,
                        None,
                        Some(weights.iter().map(|&w| WeightEntry::Real(w)).collect()),
                    ),
                    WeightRule::ImaginaryList { weights } => (
                        ShiftRuleName::ImaginaryList,
                        None,
                        Some(weights.iter().map(|&w| WeightEntry::Real(w)).collect()),
                    ),
                    WeightRule::List { weights } => (
                        ShiftRuleName::List,
                        None,
                        Some(
                            weights
                                .iter()
                                .map(|&w| WeightEntry::Complex(from_c(w)))
                                .collect(),
                        ),
                    ),
                };
                Ok(OperandSpec::DirichletShift {
                    rule: name,
                    c,
                    weights,
                })
            }
            OperatorKind::FiniteRank { pairs: ps } => Ok(OperandSpec::FiniteRank {
                pairs: ps
                    .iter()
                    .map(|p| PairSpec {
                        g: pairs(&p.g),
                        h: pairs(&p.h),
                    })
                    .collect(),
            }),
            OperatorKind::Combination { terms, shift } => match terms.as_slice() {
                [(c, inner)] if *c == C64::new(1.0, 0.0) => match inner.kind() {
                    OperatorKind::CompositionDifferentiation { rho } => Ok(OperandSpec::Dphi {
                        rho: *rho,
                        shift: Some(from_c(*shift)),
                    }),
                    _ => Err(unsupported()),
                },
                _ => Err(unsupported()),
            },
            _ => Err(unsupported()),
        }
    }
}

/// Parses an operand document into named models (sorted by name).
pub fn parse_operands(json: &str) -> Result<BTreeMap<String, OperatorModel>> {
    let specs: BTreeMap<String, OperandSpec> =
        serde_json::from_str(json).map_err(|e| Error::OperandFile(e.to_string()))?;
    if specs.is_empty() {
        return Err(Error::OperandFile("no operands defined".into()));
    }
    specs
        .into_iter()
        .map(|(name, spec)| {
            let model = spec
                .build()
                .map_err(|e| Error::OperandFile(format!("operand {name}: {e}")))?;
            Ok((name, model))
        })
        .collect()
}

/// Serializes named models into an operand document value.
pub fn describe_operands<'a, I>(models: I) -> Result<serde_json::Value>
where
    I: IntoIterator<Item = (&'a str, &'a OperatorModel)>,
{
    let mut map = serde_json::Map::new();
    for (name, model) in models {
        let spec = OperandSpec::describe(model)?;
        map.insert(
            name.to_string(),
            serde_json::to_value(spec).map_err(|e| Error::OperandFile(e.to_string()))?,
        );
    }
    Ok(serde_json::Value::Object(map))
}
