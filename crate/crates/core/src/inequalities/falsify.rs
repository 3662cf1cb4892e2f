//! Seeded random search for counterexamples.
//!
//! Each trial draws operands from a family built to satisfy the entry's
//! hypotheses, runs [`verify`](super::verify) and keeps the smallest margin.
//! Trial `k` uses a ChaCha8 stream `k` of the run seed, so results do not
//! depend on scheduling.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    verify, Alpha, InequalityReport, Operands, Outcome, Signature, TheoremId, VerifyParams,
};
use crate::berezin::DiskGrid;
use crate::error::{Error, Result};
use crate::numerics::{inverse, ComplexMatrix};
use crate::operators::file::describe_operands;
use crate::operators::{HarmonicSymbol, OperatorModel, Polynomial};
use crate::par;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Diagonal matrices with entries placed to meet the hypotheses.
    DiagonalSectorial,
    /// The diagonal construction plus a random off-diagonal part; pairs with
    /// a prescribed `T*S = P` use `S = T^{−*}P`.
    ShiftedRandom,
    /// The diagonal construction conjugated by a random unitary.
    Normal,
    /// Toeplitz operators with harmonic polynomial symbols on Bergman spaces,
    /// lifted by a constant where sectoriality is required.
    ToeplitzHarmonic,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::DiagonalSectorial,
        Family::ShiftedRandom,
        Family::Normal,
        Family::ToeplitzHarmonic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::DiagonalSectorial => "diagonal-sectorial",
            Family::ShiftedRandom => "shifted-random",
            Family::Normal => "normal",
            Family::ToeplitzHarmonic => "toeplitz-harmonic",
        }
    }

    /// Evaluation parameters suited to the family; disk families use a
    /// coarser grid and truncation to keep trials cheap.
    pub fn default_params(self) -> VerifyParams {
        let base = VerifyParams {
            alpha: Alpha::Search,
            ..VerifyParams::default()
        };
        match self {
            Family::ToeplitzHarmonic => VerifyParams {
                grid: DiskGrid::full(24, 32).expect("valid grid"),
                refine: 2,
                norm_grid: DiskGrid::full(8, 12).expect("valid grid"),
                truncation: 32,
                t_grid: 17,
                ..base
            },
            _ => base,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FalsifyConfig {
    pub theorem: TheoremId,
    pub family: Family,
    /// Matrix size for the finite families.
    pub dim: usize,
    pub seed: u64,
    pub trials: usize,
    pub params: VerifyParams,
}

impl FalsifyConfig {
    pub fn new(theorem: TheoremId, family: Family, dim: usize, seed: u64, trials: usize) -> Self {
        Self {
            theorem,
            family,
            dim,
            seed,
            trials,
            params: family.default_params(),
        }
    }
}

/// Outcome of a refinement chain between two registry bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub name: String,
    /// Trials on which the chain applied.
    pub checked: usize,
    pub failures: usize,
    /// For the `α = 1` chain: trials where the raw (unclamped) bounds reverse.
    pub raw_reversals: usize,
    pub worst_gap: Option<f64>,
    pub worst_trial: Option<usize>,
    pub worst_operands: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyReport {
    pub theorem: TheoremId,
    pub family: Family,
    pub dim: usize,
    pub seed: u64,
    pub trials: usize,
    pub satisfied: usize,
    pub violations: usize,
    pub vacuous: usize,
    /// Trials whose evaluation failed numerically.
    pub failures: usize,
    /// Smallest margin over non-vacuous trials.
    pub min_margin: Option<f64>,
    pub argmin_trial: Option<usize>,
    pub argmin_operands: Option<serde_json::Value>,
    pub first_violation: Option<usize>,
    pub chains: Vec<ChainReport>,
    /// Trials where the arc bound falls below the symmetric half bound.
    pub below_half_bound: Option<usize>,
}

impl FalsifyReport {
    pub fn genuine_violation(&self) -> bool {
        self.violations > 0
    }

    pub fn chains_hold(&self) -> bool {
        self.chains.iter().all(|c| c.failures == 0)
    }
}

struct Trial {
    report: std::result::Result<InequalityReport, Error>,
    operands: Operands,
    chain: Option<ChainSample>,
}

struct ChainSample {
    applies: bool,
    gap: f64,
    raw_reversal: bool,
}

fn chain_name(id: TheoremId) -> Option<&'static str> {
    match id {
        TheoremId::ThmKali0 | TheoremId::CmpKali1 => Some("kali0_at_alpha_1_dominates_kali1"),
        TheoremId::ThmSad4 | TheoremId::CmpSad5 => Some("sad4_below_sad5"),
        TheoremId::ThmLast31 | TheoremId::CmpLast32 => Some("last31_below_last32_small_theta"),
        _ => None,
    }
}

/// Compares the two bounds of a chain on the same operands; `gap ≥ 0` means
/// the chain holds.
fn chain_sample(
    id: TheoremId,
    ops: &Operands,
    params: &VerifyParams,
) -> Result<Option<ChainSample>> {
    let slack = params.slack;
    match id {
        TheoremId::ThmKali0 | TheoremId::CmpKali1 => {
            let p1 = VerifyParams {
                alpha: Alpha::Fixed(1.0),
                ..*params
            };
            let k0 = verify(TheoremId::ThmKali0, ops, &p1)?;
            if k0.is_vacuous() {
                return Ok(Some(ChainSample {
                    applies: false,
                    gap: 0.0,
                    raw_reversal: false,
                }));
            }
            let k1 = verify(TheoremId::CmpKali1, ops, &p1)?;
            Ok(Some(ChainSample {
                applies: true,
                gap: k0.rhs.max(0.0) - k1.rhs.max(0.0),
                raw_reversal: k0.rhs < k1.rhs - slack,
            }))
        }
        TheoremId::ThmSad4 | TheoremId::CmpSad5 => {
            let a = verify(TheoremId::ThmSad4, ops, params)?;
            let b = verify(TheoremId::CmpSad5, ops, params)?;
            let applies = !a.is_vacuous();
            Ok(Some(ChainSample {
                applies,
                gap: b.rhs - a.rhs,
                raw_reversal: false,
            }))
        }
        TheoremId::ThmLast31 | TheoremId::CmpLast32 => {
            let a = verify(TheoremId::ThmLast31, ops, params)?;
            let b = verify(TheoremId::CmpLast32, ops, params)?;
            let applies = !a.is_vacuous() && a.theta < (2f64.sqrt() - 1.0).asin();
            Ok(Some(ChainSample {
                applies,
                gap: b.rhs - a.rhs,
                raw_reversal: false,
            }))
        }
        _ => Ok(None),
    }
}

/// Runs `config.trials` seeded trials.
pub fn falsify(config: &FalsifyConfig) -> Result<FalsifyReport> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if config.dim == 0 && config.family != Family::ToeplitzHarmonic {
        return Err(Error::InvalidParameter("dim must be >= 1".into()));
    }
    config.params.validate()?;
    let id = config.theorem;
    let trials = par::map_indexed(config.trials, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(k as u64);
        let operands = draw(id, config.family, config.dim, &mut rng);
        let report = verify(id, &operands, &config.params);
        let chain = chain_sample(id, &operands, &config.params).ok().flatten();
        Trial {
            report,
            operands,
            chain,
        }
    });

    let mut out = FalsifyReport {
        theorem: id,
        family: config.family,
        dim: config.dim,
        seed: config.seed,
        trials: config.trials,
        satisfied: 0,
        violations: 0,
        vacuous: 0,
        failures: 0,
        min_margin: None,
        argmin_trial: None,
        argmin_operands: None,
        first_violation: None,
        chains: Vec::new(),
        below_half_bound: (id == TheoremId::CorCow).then_some(0),
    };
    let mut chain = chain_name(id).map(|name| ChainReport {
        name: name.to_string(),
        checked: 0,
        failures: 0,
        raw_reversals: 0,
        worst_gap: None,
        worst_trial: None,
        worst_operands: None,
    });
    for (k, t) in trials.iter().enumerate() {
        let r = match &t.report {
            Ok(r) => r,
            Err(_) => {
                out.failures += 1;
                continue;
            }
        };
        match r.outcome {
            Outcome::Vacuous => {
                out.vacuous += 1;
                continue;
            }
            Outcome::Satisfied => out.satisfied += 1,
            Outcome::Violated => {
                out.violations += 1;
                out.first_violation.get_or_insert(k);
            }
        }
        if out.min_margin.is_none_or(|m| r.margin < m) {
            out.min_margin = Some(r.margin);
            out.argmin_trial = Some(k);
        }
        if let (Some(c), Some(s)) = (chain.as_mut(), t.chain.as_ref()) {
            if s.applies {
                c.checked += 1;
                if s.gap < -config.params.slack {
                    c.failures += 1;
                }
                if s.raw_reversal {
                    c.raw_reversals += 1;
                }
                if c.worst_gap.is_none_or(|g| s.gap < g) {
                    c.worst_gap = Some(s.gap);
                    c.worst_trial = Some(k);
                }
            }
        }
        if let Some(n) = out.below_half_bound.as_mut() {
            if r.extra
                .get("gain_over_half_bound")
                .is_some_and(|g| *g < -config.params.slack)
            {
                *n += 1;
            }
        }
    }
    if let Some(k) = out.argmin_trial {
        let ops = &trials[k].operands;
        out.argmin_operands = Some(describe_operands(ops.iter().map(|(n, m)| (n.as_str(), m)))?);
    }
    if let Some(c) = chain.as_mut() {
        if let Some(k) = c.worst_trial {
            let ops = &trials[k].operands;
            c.worst_operands = Some(describe_operands(ops.iter().map(|(n, m)| (n.as_str(), m)))?);
        }
    }
    out.chains.extend(chain);
    Ok(out)
}

/// What the entry requires of its operands.
#[derive(Clone, Copy)]
enum Shape {
    /// `T ∈ Π_θ` (or the power class).
    Sectorial,
    /// `T²` sectorial, `T` invertible.
    SquareSectorial,
    /// `Ber(T)` in a lower-right quadrant arc.
    Arc,
    /// `T*S` prescribed sectorial.
    Kali,
    /// `S` invertible, `S*T` prescribed sectorial.
    Sad,
    /// `S`, `T` each sectorial, with weights `X`, `Y` for the general entry.
    BothSectorial,
    Commuting,
    /// Plain operand with small symbol.
    Free,
}

fn shape(id: TheoremId) -> Shape {
    use TheoremId::*;
    match id {
        LemmaMain | ThmFirst | LemmaLast30 | ThmLast31 | CmpLast32 | LemmaAa | PropPf1
        | CorKali0Ident => Shape::Sectorial,
        CorSad4Square | CorKali0Square => Shape::SquareSectorial,
        CorCow => Shape::Arc,
        ThmKali0 | CmpKali1 | CmpSad1 | CmpPpsskk => Shape::Kali,
        ThmSad4 | CmpSad5 => Shape::Sad,
        ThmAxb | CorAbba | CmpBlockpintu | CorAbbaMin => Shape::BothSectorial,
        ThmCommuting => Shape::Commuting,
        PropIixx => Shape::Free,
    }
}

fn sectorial_value(rng: &mut ChaCha8Rng, theta: f64) -> C64 {
    C64::from_polar(rng.gen_range(0.2..2.0), rng.gen_range(-theta..=theta))
}

fn nonzero_value(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.3..2.0), rng.gen_range(0.0..2.0 * PI))
}

fn unit_square(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random unitary from Gram–Schmidt on a random matrix.
fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| unit_square(rng)).collect();
        for c in &cols {
            let p: C64 = v.iter().zip(c).map(|(a, b)| a * b.conj()).sum();
            for (a, b) in v.iter_mut().zip(c) {
                *a -= p * b;
            }
        }
        let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if s > 1e-3 {
            cols.push(v.into_iter().map(|z| z / s).collect());
        }
    }
    let mut u = ComplexMatrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        for (i, z) in c.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Embeds a diagonal into a matrix of the family.
struct Embed {
    family: Family,
    unitary: Option<ComplexMatrix>,
}

impl Embed {
    fn new(family: Family, n: usize, rng: &mut ChaCha8Rng) -> Self {
        let unitary = (family == Family::Normal).then(|| random_unitary(rng, n));
        Self { family, unitary }
    }

    fn matrix(&self, d: &[C64], rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::from_diag(d);
        match self.family {
            Family::ShiftedRandom => {
                let n = d.len();
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            m[(i, j)] = unit_square(rng) * 0.5;
                        }
                    }
                }
                m
            }
            Family::Normal => {
                let u = self.unitary.as_ref().expect("normal family has a unitary");
                &(u * &m) * &u.adjoint()
            }
            _ => m,
        }
    }
}

fn op(m: ComplexMatrix) -> OperatorModel {
    OperatorModel::matrix(m).expect("square finite matrix")
}

/// `A^{−*}·P`, falling back to `P` if `A` is numerically singular.
fn solve_adjoint(a: &ComplexMatrix, p: &ComplexMatrix) -> ComplexMatrix {
    match inverse(&a.adjoint()) {
        Ok(inv) => &inv * p,
        Err(_) => p.clone(),
    }
}

fn draw(id: TheoremId, family: Family, dim: usize, rng: &mut ChaCha8Rng) -> Operands {
    if family == Family::ToeplitzHarmonic {
        return draw_toeplitz(id, rng);
    }
    let n = dim;
    let theta = rng.gen_range(0.05..1.45);
    let emb = Embed::new(family, n, rng);
    let sect = |rng: &mut ChaCha8Rng, th: f64| -> Vec<C64> {
        (0..n).map(|_| sectorial_value(rng, th)).collect()
    };
    let mut ops = Operands::new();
    let single_name = if id.signature() == Signature::SingleS {
        "S"
    } else {
        "T"
    };
    match shape(id) {
        Shape::Sectorial => {
            let d = sect(rng, theta);
            ops.insert(single_name.into(), op(emb.matrix(&d, rng)));
        }
        Shape::SquareSectorial => {
            let d = sect(rng, theta / 2.0);
            ops.insert(single_name.into(), op(emb.matrix(&d, rng)));
        }
        Shape::Arc => {
            let t1 = rng.gen_range(0.05..0.7);
            let t2 = rng.gen_range(t1..(FRAC_PI_2 - 0.05));
            let d: Vec<C64> = (0..n)
                .map(|_| C64::from_polar(rng.gen_range(0.2..2.0), -rng.gen_range(t1..=t2)))
                .collect();
            ops.insert("T".into(), op(emb.matrix(&d, rng)));
        }
        Shape::Kali | Shape::Sad => {
            let a_diag: Vec<C64> = (0..n).map(|_| nonzero_value(rng)).collect();
            let a = emb.matrix(&a_diag, rng);
            let p = emb.matrix(&sect(rng, theta), rng);
            let b = solve_adjoint(&a, &p);
            let (s, t) = match shape(id) {
                // T*S = P
                Shape::Kali => (b, a),
                // S*T = P
                _ => (a, b),
            };
            ops.insert("S".into(), op(s));
            ops.insert("T".into(), op(t));
        }
        Shape::BothSectorial => {
            let s = emb.matrix(&sect(rng, theta), rng);
            let t = emb.matrix(&sect(rng, theta), rng);
            ops.insert("S".into(), op(s));
            ops.insert("T".into(), op(t));
            if id == TheoremId::ThmAxb {
                let x: Vec<C64> = (0..n).map(|_| unit_square(rng) * 1.5).collect();
                let y: Vec<C64> = (0..n).map(|_| unit_square(rng) * 1.5).collect();
                ops.insert("X".into(), op(emb.matrix(&x, rng)));
                ops.insert("Y".into(), op(emb.matrix(&y, rng)));
            }
        }
        Shape::Commuting => {
            for j in 1..=2 {
                let s = emb.matrix(&sect(rng, theta), rng);
                // A polynomial in S commutes with S.
                let (a, b) = (rng.gen_range(0.2..1.0), rng.gen_range(0.0..0.3));
                let s2 = &s * &s;
                let mut t = s.scale_real(a);
                t = &t + &s2.scale_real(b);
                ops.insert(format!("S{j}"), op(s));
                ops.insert(format!("T{j}"), op(t));
            }
        }
        Shape::Free => {
            let d: Vec<C64> = (0..n).map(|_| unit_square(rng)).collect();
            ops.insert("T".into(), op(emb.matrix(&d, rng)));
        }
    }
    ops
}

/// Harmonic symbol with `Σ|coef| = total`, analytic degree ≤ 2 (with
/// constant) and coanalytic degree ≤ `co_deg`.
fn random_symbol(rng: &mut ChaCha8Rng, total: f64, co_deg: usize) -> HarmonicSymbol {
    let a: Vec<C64> = (0..3).map(|_| unit_square(rng)).collect();
    let b: Vec<C64> = (0..co_deg).map(|_| unit_square(rng)).collect();
    let l1: f64 = a.iter().chain(&b).map(|z| z.norm()).sum();
    let s = if l1 > 0.0 { total / l1 } else { 0.0 };
    HarmonicSymbol::new(
        Polynomial::new(a.into_iter().map(|z| z * s).collect()).expect("nonempty"),
        Polynomial::new(b.into_iter().map(|z| z * s).collect())
            .unwrap_or_else(|_| Polynomial::zero()),
    )
}

fn toeplitz(symbol: HarmonicSymbol, alpha: f64) -> OperatorModel {
    OperatorModel::toeplitz(symbol, alpha).expect("valid Bergman weight")
}

fn draw_toeplitz(id: TheoremId, rng: &mut ChaCha8Rng) -> Operands {
    let alpha = f64::from(rng.gen_range(0..=2u8));
    let mut ops = Operands::new();
    let lifted = |rng: &mut ChaCha8Rng, co: usize| {
        let m = rng.gen_range(1.0..2.0);
        let total = rng.gen_range(0.1..0.9);
        toeplitz(
            random_symbol(rng, total, co).plus_constant(C64::new(m, 0.0)),
            alpha,
        )
    };
    let single_name = if id.signature() == Signature::SingleS {
        "S"
    } else {
        "T"
    };
    match shape(id) {
        Shape::Sectorial | Shape::SquareSectorial => {
            ops.insert(single_name.into(), lifted(rng, 2));
        }
        Shape::Arc => {
            let centre = rng.gen_range(0.4..1.1);
            let m = C64::from_polar(1.5, -centre);
            let total = rng.gen_range(0.05..0.3);
            ops.insert(
                "T".into(),
                toeplitz(random_symbol(rng, total, 2).plus_constant(m), alpha),
            );
        }
        Shape::Kali | Shape::Sad | Shape::BothSectorial => {
            ops.insert("S".into(), lifted(rng, 2));
            ops.insert("T".into(), lifted(rng, 2));
        }
        Shape::Commuting => {
            // Analytic symbols give commuting multiplication operators.
            for j in 1..=2 {
                ops.insert(format!("S{j}"), lifted(rng, 0));
                ops.insert(format!("T{j}"), lifted(rng, 0));
            }
        }
        Shape::Free => {
            let total = rng.gen_range(0.1..0.95);
            ops.insert("T".into(), toeplitz(random_symbol(rng, total, 2), alpha));
        }
    }
    ops
}
