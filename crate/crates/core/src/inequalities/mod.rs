//! Registry of Berezin-number inequalities, an evaluation engine and a seeded
//! falsification harness.
//!
//! Every entry is written as `lhs ⋚ rhs` where `lhs` is the quantity being
//! bounded. [`verify`] checks the hypotheses first, then evaluates both sides
//! with the [`crate::berezin`] primitives. A failed hypothesis makes the report
//! vacuous, never violated.

pub mod falsify;
mod registry;
pub mod vector;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::berezin::DiskGrid;
use crate::error::{Error, Result};
use crate::operators::OperatorModel;

pub use falsify::{falsify, ChainReport, FalsifyConfig, FalsifyReport, Family};
pub use registry::verify;
pub use vector::{last30_sides, verify_vector_lemma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    LemmaMain,
    ThmFirst,
    CorCow,
    ThmKali0,
    CorKali0Square,
    CorKali0Ident,
    CmpKali1,
    CmpSad1,
    CmpPpsskk,
    ThmSad4,
    CmpSad5,
    CorSad4Square,
    LemmaLast30,
    ThmLast31,
    CmpLast32,
    PropIixx,
    LemmaAa,
    ThmAxb,
    CorAbba,
    CmpBlockpintu,
    CorAbbaMin,
    ThmCommuting,
    PropPf1,
}

/// Operand names an entry expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    /// One operand, `T`.
    Single,
    /// One operand, `S`.
    SingleS,
    /// `S` and `T`.
    Pair,
    /// `S`, `T` and optional `X`, `Y`.
    PairWithWeights,
    /// `S1..Sn`, `T1..Tn`.
    Families,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `lhs ≥ rhs`.
    AtLeast,
    /// `lhs ≤ rhs`.
    AtMost,
}

impl Direction {
    pub fn margin(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Direction::AtLeast => lhs - rhs,
            Direction::AtMost => rhs - lhs,
        }
    }
}

impl TheoremId {
    pub const ALL: [TheoremId; 23] = [
        TheoremId::LemmaMain,
        TheoremId::ThmFirst,
        TheoremId::CorCow,
        TheoremId::ThmKali0,
        TheoremId::CorKali0Square,
        TheoremId::CorKali0Ident,
        TheoremId::CmpKali1,
        TheoremId::CmpSad1,
        TheoremId::CmpPpsskk,
        TheoremId::ThmSad4,
        TheoremId::CmpSad5,
        TheoremId::CorSad4Square,
        TheoremId::LemmaLast30,
        TheoremId::ThmLast31,
        TheoremId::CmpLast32,
        TheoremId::PropIixx,
        TheoremId::LemmaAa,
        TheoremId::ThmAxb,
        TheoremId::CorAbba,
        TheoremId::CmpBlockpintu,
        TheoremId::CorAbbaMin,
        TheoremId::ThmCommuting,
        TheoremId::PropPf1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::LemmaMain => "lemma_main",
            TheoremId::ThmFirst => "thm_first",
            TheoremId::CorCow => "cor_cow",
            TheoremId::ThmKali0 => "thm_kali0",
            TheoremId::CorKali0Square => "cor_kali0_square",
            TheoremId::CorKali0Ident => "cor_kali0_ident",
            TheoremId::CmpKali1 => "cmp_kali1",
            TheoremId::CmpSad1 => "cmp_sad1",
            TheoremId::CmpPpsskk => "cmp_ppsskk",
            TheoremId::ThmSad4 => "thm_sad4",
            TheoremId::CmpSad5 => "cmp_sad5",
            TheoremId::CorSad4Square => "cor_sad4_square",
            TheoremId::LemmaLast30 => "lemma_last30",
            TheoremId::ThmLast31 => "thm_last31",
            TheoremId::CmpLast32 => "cmp_last32",
            TheoremId::PropIixx => "prop_iixx",
            TheoremId::LemmaAa => "lemma_aa",
            TheoremId::ThmAxb => "thm_axb",
            TheoremId::CorAbba => "cor_abba",
            TheoremId::CmpBlockpintu => "cmp_blockpintu",
            TheoremId::CorAbbaMin => "cor_abba_min",
            TheoremId::ThmCommuting => "thm_commuting",
            TheoremId::PropPf1 => "prop_pf1",
        }
    }

    pub fn direction(self) -> Direction {
        use TheoremId::*;
        match self {
            LemmaMain | ThmFirst | CorCow | ThmKali0 | CorKali0Square | CorKali0Ident
            | CmpKali1 | CmpSad1 | CmpPpsskk | LemmaAa => Direction::AtLeast,
            _ => Direction::AtMost,
        }
    }

    pub fn signature(self) -> Signature {
        use TheoremId::*;
        match self {
            CorKali0Square | CorKali0Ident => Signature::SingleS,
            ThmKali0 | CmpKali1 | CmpSad1 | CmpPpsskk | ThmSad4 | CmpSad5 | CorAbba
            | CmpBlockpintu | CorAbbaMin => Signature::Pair,
            ThmAxb => Signature::PairWithWeights,
            ThmCommuting => Signature::Families,
            _ => Signature::Single,
        }
    }

    /// Whether the hypotheses use the power class rather than plain Berezin
    /// sectoriality.
    pub fn needs_power_class(self) -> bool {
        use TheoremId::*;
        matches!(
            self,
            LemmaAa | ThmAxb | CorAbba | CorAbbaMin | ThmCommuting | PropPf1
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown theorem '{s}'")))
    }
}

/// Choice of `α` for the `α`-parameterized bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha {
    Fixed(f64),
    /// Maximize over `2^k`, `k = −8..8`, then golden-section polish.
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    /// Semi-angle of the hypothesis sector; sampled from the operand when absent.
    pub theta: Option<f64>,
    pub alpha: Alpha,
    /// Number of nodes of the `t` grid on `[−2‖T‖, 2‖T‖]`.
    pub t_grid: usize,
    /// Power for the power inequalities; every power `2..=n` is checked.
    pub n: u32,
    /// Largest power used by the power-class hypothesis check.
    pub power_n_max: u32,
    pub grid: DiskGrid,
    pub refine: usize,
    /// Grid for the double supremum of disk Berezin norms.
    pub norm_grid: DiskGrid,
    pub truncation: usize,
    pub slack: f64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            theta: None,
            alpha: Alpha::Search,
            t_grid: 41,
            n: 4,
            power_n_max: 4,
            grid: DiskGrid::full(64, 64).expect("valid grid"),
            refine: 3,
            norm_grid: DiskGrid::full(16, 16).expect("valid grid"),
            truncation: 64,
            slack: 1e-9,
        }
    }
}

impl VerifyParams {
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.theta {
            if !(0.0..FRAC_PI_2).contains(&t) {
                return Err(Error::InvalidParameter(format!(
                    "theta must lie in [0, pi/2), got {t}"
                )));
            }
        }
        if let Alpha::Fixed(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "alpha must be positive, got {a}"
                )));
            }
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if self.power_n_max < 2 {
            return Err(Error::InvalidParameter("power_n_max must be >= 2".into()));
        }
        if self.t_grid < 2 {
            return Err(Error::InvalidParameter(
                "t grid needs at least 2 nodes".into(),
            ));
        }
        if self.truncation == 0 {
            return Err(Error::InvalidParameter("truncation must be >= 1".into()));
        }
        if !(self.slack >= 0.0 && self.slack.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "invalid slack {}",
                self.slack
            )));
        }
        self.grid.validate()?;
        self.norm_grid.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub pass: bool,
    pub evidence: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Satisfied,
    Violated,
    /// Some hypothesis failed; the inequality makes no claim.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    pub direction: Direction,
    pub satisfied: bool,
    pub margin: f64,
    pub outcome: Outcome,
    /// Semi-angle used on the right-hand side.
    pub theta: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub params: VerifyParams,
    pub seed: Option<u64>,
    /// Auxiliary quantities (optimal `α`, `t`, companion bounds, ...).
    pub extra: BTreeMap<String, f64>,
}

impl InequalityReport {
    pub(crate) fn new(
        theorem: TheoremId,
        lhs: f64,
        rhs: f64,
        theta: f64,
        hypotheses: Vec<Hypothesis>,
        params: VerifyParams,
        extra: BTreeMap<String, f64>,
    ) -> Self {
        let direction = theorem.direction();
        let margin = direction.margin(lhs, rhs);
        let satisfied = margin >= -params.slack;
        let outcome = if hypotheses.iter().any(|h| !h.pass) {
            Outcome::Vacuous
        } else if satisfied {
            Outcome::Satisfied
        } else {
            Outcome::Violated
        };
        Self {
            theorem,
            lhs,
            rhs,
            direction,
            satisfied,
            margin,
            outcome,
            theta,
            hypotheses,
            params,
            seed: None,
            extra,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.outcome == Outcome::Vacuous
    }

    pub fn is_violation(&self) -> bool {
        self.outcome == Outcome::Violated
    }
}

/// Named operands of one evaluation.
pub type Operands = BTreeMap<String, OperatorModel>;
