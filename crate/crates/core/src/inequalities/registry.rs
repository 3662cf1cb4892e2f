use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use super::{
    last30_sides, Alpha, Hypothesis, InequalityReport, Operands, Signature, TheoremId, VerifyParams,
};
use crate::berezin::SECTOR_SLACK;
use crate::berezin::{
    berezin_norm, berezin_number, grid_sup, power_class_check, sample_range, Evaluator,
    SeriesPolicy,
};
use crate::error::{Error, Result};
use crate::numerics::{inverse_norm, operator_norm, ComplexMatrix};
use crate::operators::{OperatorKind, OperatorModel};
use crate::optimize::{grid_then_golden_max, grid_then_golden_min, linspace};
use crate::ranges::{sector_index, SectorReport, SECTOR_TOL};
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const COMMUTE_TOL: f64 = 1e-10;
const THETA_FLOOR: f64 = 1e-12;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn hyp(name: &str, pass: bool, evidence: String) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        pass,
        evidence,
    }
}

/// Evaluation primitives bound to one parameter set.
struct Ctx<'a> {
    p: &'a VerifyParams,
}

impl Ctx<'_> {
    fn policy(&self) -> SeriesPolicy {
        SeriesPolicy::Fixed(self.p.truncation)
    }

    fn ber(&self, op: &OperatorModel) -> Result<f64> {
        Ok(berezin_number(op, &self.p.grid, self.p.refine, self.policy())?.value)
    }

    /// Pair-grid supremum, raised to `ber` (the diagonal pairs) found with
    /// refinement; exact for positive operators.
    fn bnorm(&self, op: &OperatorModel) -> Result<f64> {
        let pairs = berezin_norm(op, &self.p.norm_grid, self.p.truncation)?;
        if op.space().is_disk() {
            Ok(pairs.max(self.ber(op)?))
        } else {
            Ok(pairs)
        }
    }

    /// Sampled sector index; on the disk the largest angle is also searched
    /// with refinement so that it is consistent with [`Ctx::ber`].
    fn sector(&self, op: &OperatorModel) -> Result<SectorReport> {
        let s = sample_range(op, &self.p.grid, self.policy())?;
        let mut report = sector_index(&s.values(), SECTOR_TOL)?;
        if op.space().is_disk() && report.index.is_some() {
            let ev = Evaluator::new(op, self.policy())?;
            let angle = |z: C64| -> Result<f64> {
                let v = ev.eval_disk(z)?;
                Ok(if v.norm() <= SECTOR_TOL {
                    0.0
                } else {
                    v.arg().abs()
                })
            };
            let sup = grid_sup(angle, &self.p.grid, self.p.refine)?;
            if sup.value > report.index.unwrap_or(0.0) {
                let z = sup.argmax.as_complex();
                let v = ev.eval_disk(z)?;
                if sup.value >= FRAC_PI_2 || v.re <= -SECTOR_TOL {
                    report.index = None;
                    report.witness = None;
                    report.violations.push(v);
                } else {
                    report.index = Some(sup.value);
                    report.witness = Some(v);
                }
            }
        }
        Ok(report)
    }

    fn matrix(&self, op: &OperatorModel) -> Result<ComplexMatrix> {
        op.truncate(self.p.truncation).map_err(|e| match e {
            Error::TruncationTooSmall {
                requested,
                required,
            } => Error::HypothesisUncheckable(format!(
                "truncation {requested} below the {required} basis vectors the model needs"
            )),
            other => other,
        })
    }

    fn op_norm(&self, op: &OperatorModel) -> Result<f64> {
        operator_norm(&self.matrix(op)?)
    }

    /// Explicit θ, else the sampled index of `op` (π/2 when it has none).
    fn theta_from(&self, sectors: &[&SectorReport]) -> f64 {
        if let Some(t) = self.p.theta {
            return t;
        }
        let mut theta: f64 = 0.0;
        for s in sectors {
            match s.index {
                Some(t) => theta = theta.max(t),
                None => return FRAC_PI_2,
            }
        }
        theta
    }

    fn sector_hyp(&self, name: &str, s: &SectorReport, theta: f64) -> Hypothesis {
        let pass = s.within(theta, SECTOR_SLACK);
        let evidence = match s.index {
            Some(t) => format!("sampled index {t:.9} vs theta {theta:.9}"),
            None => format!("{} sampled values outside every sector", s.violations.len()),
        };
        hyp(name, pass, evidence)
    }

    fn power_hyp(&self, name: &str, op: &OperatorModel, theta: f64) -> Result<Hypothesis> {
        let r = power_class_check(
            op,
            theta,
            self.p.power_n_max,
            &self.p.grid,
            self.p.refine,
            self.p.truncation,
        )?;
        let worst = r
            .margins
            .iter()
            .map(|m| m.re_margin.min(m.im_margin))
            .fold(f64::INFINITY, f64::min);
        let evidence = format!(
            "sectorial at theta {theta:.9}: {}; worst power margin {worst:.3e} up to n = {}",
            r.sectorial, self.p.power_n_max
        );
        Ok(hyp(name, r.member, evidence))
    }

    fn invertible_hyp(&self, name: &str, op: &OperatorModel) -> Result<(Hypothesis, f64)> {
        match inverse_norm(&self.matrix(op)?) {
            Ok(v) => Ok((hyp(name, true, format!("inverse norm {v:.9e}")), v)),
            Err(Error::Singular { sigma_min }) => Ok((
                hyp(
                    name,
                    false,
                    format!("smallest singular value {sigma_min:.3e}"),
                ),
                f64::INFINITY,
            )),
            Err(e) => Err(e),
        }
    }

    fn commute_hyp(&self, name: &str, a: &OperatorModel, b: &OperatorModel) -> Result<Hypothesis> {
        let ab = self.matrix(&a.compose(b)?)?;
        let ba = self.matrix(&b.compose(a)?)?;
        let d = (&ab - &ba).max_abs();
        Ok(hyp(
            name,
            d <= COMMUTE_TOL,
            format!("max |[S, T]| entry {d:.3e}"),
        ))
    }
}

fn theta_hyp(theta: f64) -> Hypothesis {
    hyp(
        "theta_nonzero",
        theta > THETA_FLOOR,
        format!("theta = {theta:.9}"),
    )
}

fn csc(theta: f64) -> f64 {
    1.0 / theta.sin()
}

fn get<'o>(ops: &'o Operands, name: &str, id: TheoremId) -> Result<&'o OperatorModel> {
    ops.get(name)
        .ok_or_else(|| Error::SignatureMismatch(format!("{id} needs operand '{name}'")))
}

/// The sole operand, accepted under any name, or the one named `name`.
fn single<'o>(ops: &'o Operands, name: &str, id: TheoremId) -> Result<&'o OperatorModel> {
    if let Some(op) = ops.get(name) {
        if ops.len() == 1 {
            return Ok(op);
        }
    } else if ops.len() == 1 {
        return Ok(ops.values().next().expect("one operand"));
    }
    Err(Error::SignatureMismatch(format!(
        "{id} takes exactly one operand '{name}', got {:?}",
        ops.keys().collect::<Vec<_>>()
    )))
}

fn same_space(ops: &[&OperatorModel]) -> Result<()> {
    for w in ops.windows(2) {
        if w[0].space() != w[1].space() {
            return Err(Error::SpaceMismatch(
                w[0].space().to_string(),
                w[1].space().to_string(),
            ));
        }
    }
    Ok(())
}

fn pair<'o>(
    ops: &'o Operands,
    id: TheoremId,
    allowed: &[&str],
) -> Result<(&'o OperatorModel, &'o OperatorModel)> {
    if let Some(k) = ops.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::SignatureMismatch(format!(
            "{id} does not take operand '{k}'"
        )));
    }
    let s = get(ops, "S", id)?;
    let t = get(ops, "T", id)?;
    same_space(&[s, t])?;
    Ok((s, t))
}

/// `(S1..Sn, T1..Tn)`; a plain `S`, `T` pair counts as `n = 1`.
fn families(ops: &Operands, id: TheoremId) -> Result<Vec<(OperatorModel, OperatorModel)>> {
    if ops.contains_key("S") || ops.contains_key("T") {
        let (s, t) = pair(ops, id, &["S", "T"])?;
        return Ok(vec![(s.clone(), t.clone())]);
    }
    let n = ops.len() / 2;
    if n == 0 || ops.len() != 2 * n {
        return Err(Error::SignatureMismatch(format!(
            "{id} needs operands S1..Sn and T1..Tn"
        )));
    }
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        let s = get(ops, &format!("S{j}"), id)?;
        let t = get(ops, &format!("T{j}"), id)?;
        out.push((s.clone(), t.clone()));
    }
    let all: Vec<&OperatorModel> = ops.values().collect();
    same_space(&all)?;
    Ok(out)
}

/// Evaluates one registry entry on named operands.
pub fn verify(id: TheoremId, ops: &Operands, params: &VerifyParams) -> Result<InequalityReport> {
    params.validate()?;
    let ctx = Ctx { p: params };
    let mut extra = BTreeMap::new();
    let mut hyps = Vec::new();
    let (lhs, rhs, theta) = match id.signature() {
        Signature::Single => {
            let t = single(ops, "T", id)?;
            single_entry(&ctx, id, t, &mut hyps, &mut extra)?
        }
        Signature::SingleS => {
            let s = single(ops, "S", id)?;
            let t = match id {
                TheoremId::CorKali0Square => s.adjoint(),
                _ => OperatorModel::scalar_collapsed(s.space(), real(1.0)),
            };
            kali0(&ctx, s, &t, &mut hyps, &mut extra)?
        }
        Signature::Pair => {
            let (s, t) = pair(ops, id, &["S", "T"])?;
            pair_entry(&ctx, id, s, t, &mut hyps, &mut extra)?
        }
        Signature::PairWithWeights => {
            let (s, t) = pair(ops, id, &["S", "T", "X", "Y"])?;
            let id_op = OperatorModel::scalar_collapsed(s.space(), real(1.0));
            let x = ops.get("X").unwrap_or(&id_op);
            let y = ops.get("Y").unwrap_or(&id_op);
            same_space(&[s, x, y])?;
            let ss = ctx.sector(s)?;
            let theta = ctx.theta_from(&[&ss]);
            hyps.push(ctx.power_hyp("S_in_power_class", s, theta)?);
            hyps.push(theta_hyp(theta));
            let lhs = sxt_tys(&ctx, s, t, x, y)?;
            let rhs = axb_rhs(&ctx, s, t, x, y, theta, &mut extra, "")?;
            (lhs, rhs, theta)
        }
        Signature::Families => {
            let fam = families(ops, id)?;
            commuting(&ctx, &fam, &mut hyps, &mut extra)?
        }
    };
    Ok(InequalityReport::new(
        id, lhs, rhs, theta, hyps, *params, extra,
    ))
}

type Sides = (f64, f64, f64);

fn single_entry(
    ctx: &Ctx<'_>,
    id: TheoremId,
    t: &OperatorModel,
    hyps: &mut Vec<Hypothesis>,
    extra: &mut BTreeMap<String, f64>,
) -> Result<Sides> {
    use TheoremId::*;
    let (re, im) = t.cartesian_parts();
    match id {
        LemmaMain => {
            let s = ctx.sector(t)?;
            let theta = ctx.theta_from(&[&s]);
            hyps.push(ctx.sector_hyp("T_berezin_sectorial", &s, theta));
            Ok((theta.sin() * ctx.ber(t)?, ctx.ber(&im)?, theta))
        }
        ThmFirst => {
            let s = ctx.sector(t)?;
            let theta = ctx.theta_from(&[&s]);
            hyps.push(ctx.sector_hyp("T_berezin_sectorial", &s, theta));
            hyps.push(theta_hyp(theta));
            let (b_re, b_im) = (ctx.ber(&re)?, ctx.ber(&im)?);
            let c = csc(theta) / 2.0;
            let plus = c * ctx.ber(&re.add(&im)?)? + c * (b_im - b_re);
            let minus = c * ctx.ber(&re.sub(&im)?)? + c * (b_im - b_re);
            extra.insert("rhs_plus".into(), plus);
            extra.insert("rhs_minus".into(), minus);
            Ok((ctx.ber(t)?, plus.max(minus), theta))
        }
        CorCow => cow(ctx, t, &re, &im, hyps, extra),
        LemmaLast30 => last30_operator(ctx, t, extra).map(|(l, r)| (l, r, f64::NAN)),
        ThmLast31 | CmpLast32 => {
            let s = ctx.sector(t)?;
            let theta = ctx.theta_from(&[&s]);
            let b = ctx.ber(t)?;
            let first = if id == ThmLast31 {
                hyps.push(ctx.sector_hyp("T_berezin_sectorial", &s, theta));
                0.25 * (theta.sin() + 1.0).powi(2) * b * b
            } else {
                0.5 * b * b
            };
            let inf = t_infimum(ctx, t, extra)?;
            Ok((ctx.bnorm(&t.gram())?, first + 0.5 * inf, theta))
        }
        PropIixx => {
            let is_toeplitz = matches!(t.kind(), OperatorKind::ToeplitzHarmonic { .. });
            hyps.push(hyp(
                "toeplitz_harmonic_symbol",
                is_toeplitz,
                format!("operand kind on {}", t.space()),
            ));
            let b = ctx.ber(t)?;
            powers(ctx, t, extra, |k| b.powi(k as i32)).map(|(l, r)| (l, r, f64::NAN))
        }
        PropPf1 => {
            let s = ctx.sector(t)?;
            let theta = ctx.theta_from(&[&s]);
            hyps.push(ctx.power_hyp("T_in_power_class", t, theta)?);
            let b = ctx.ber(t)?;
            let f = 1.0 + theta.sin().powi(2);
            powers(ctx, t, extra, |k| f.powi(k as i32 - 1) * b.powi(k as i32))
                .map(|(l, r)| (l, r, theta))
        }
        LemmaAa => {
            let s = ctx.sector(t)?;
            let theta = ctx.theta_from(&[&s]);
            hyps.push(ctx.power_hyp("T_in_power_class", t, theta)?);
            hyps.push(theta_hyp(theta));
            let c2 = csc(theta).powi(2);
            let n = ctx.bnorm(&t.gram().add(&t.adjoint().gram())?)?;
            let (b_re, b_im) = (ctx.ber(&re)?, ctx.ber(&im)?);
            let b = ctx.ber(t)?;
            Ok((
                b * b,
                c2 / 4.0 * n + c2 / 2.0 * (b_im * b_im - b_re * b_re),
                theta,
            ))
        }
        CorSad4Square => {
            let s = t.adjoint();
            sad4(ctx, &s, t, true, hyps, extra)
        }
        _ => unreachable!("{id} is not a single-operand entry"),
    }
}

fn pair_entry(
    ctx: &Ctx<'_>,
    id: TheoremId,
    s: &OperatorModel,
    t: &OperatorModel,
    hyps: &mut Vec<Hypothesis>,
    extra: &mut BTreeMap<String, f64>,
) -> Result<Sides> {
    use TheoremId::*;
    match id {
        ThmKali0 => kali0(ctx, s, t, hyps, extra),
        CmpKali1 => {
            let lhs = ctx.ber(&t.adjoint().compose(s)?)?;
            let n_plus = ctx.bnorm(&s.add(&t.scale(I))?)?;
            let n_mid = ctx.bnorm(&s.gram().add(&t.gram())?)?;
            Ok((lhs, 0.5 * (n_plus * n_plus - n_mid), f64::NAN))
        }
        CmpSad1 => {
            let lhs = ctx.ber(&t.adjoint().compose(s)?)?;
            let r = ctx.op_norm(&s.sub(&t.scale(I))?)?;
            extra.insert("r".into(), r);
            let b = ctx.ber(&s.gram().add(&t.gram())?)?;
            Ok((lhs, 0.5 * b - 0.5 * r * r, f64::NAN))
        }
        CmpPpsskk => {
            let lhs = ctx.ber(&t.adjoint().compose(s)?)?;
            let n_plus = ctx.bnorm(&s.add(&t.scale(I))?)?;
            let (ns, nt) = (ctx.bnorm(s)?, ctx.bnorm(t)?);
            let cross = ctx.ber(&s.gram())?.sqrt() * ctx.ber(&t.gram())?.sqrt();
            Ok((lhs, n_plus * n_plus - (ns * ns + nt * nt + cross), f64::NAN))
        }
        ThmSad4 => sad4(ctx, s, t, true, hyps, extra),
        CmpSad5 => sad4(ctx, s, t, false, hyps, extra),
        CorAbba => {
            let ss = ctx.sector(s)?;
            let theta = ctx.theta_from(&[&ss]);
            hyps.push(ctx.power_hyp("S_in_power_class", s, theta)?);
            hyps.push(theta_hyp(theta));
            let one = OperatorModel::scalar_collapsed(s.space(), real(1.0));
            let lhs = sxt_tys(ctx, s, t, &one, &one)?;
            let rhs = axb_rhs(ctx, s, t, &one, &one, theta, extra, "")?;
            Ok((lhs, rhs, theta))
        }
        CmpBlockpintu => {
            let one = OperatorModel::scalar_collapsed(s.space(), real(1.0));
            let lhs = sxt_tys(ctx, s, t, &one, &one)?;
            let sum = t
                .gram()
                .add(&s.gram())?
                .add(&t.adjoint().gram())?
                .add(&s.adjoint().gram())?;
            Ok((lhs, 0.5 * ctx.bnorm(&sum)?, f64::NAN))
        }
        CorAbbaMin => {
            let (ss, st) = (ctx.sector(s)?, ctx.sector(t)?);
            let theta = ctx.theta_from(&[&ss, &st]);
            hyps.push(ctx.power_hyp("S_in_power_class", s, theta)?);
            hyps.push(ctx.power_hyp("T_in_power_class", t, theta)?);
            hyps.push(theta_hyp(theta));
            let one = OperatorModel::scalar_collapsed(s.space(), real(1.0));
            let lhs = sxt_tys(ctx, s, t, &one, &one)?;
            let b1 = axb_rhs(ctx, s, t, &one, &one, theta, extra, "st_")?;
            let b2 = axb_rhs(ctx, t, s, &one, &one, theta, extra, "ts_")?;
            extra.insert("beta_st".into(), b1);
            extra.insert("beta_ts".into(), b2);
            Ok((lhs, b1.min(b2), theta))
        }
        _ => unreachable!("{id} is not a pair entry"),
    }
}

/// Both `β` bounds at one `α`.
fn kali_betas(
    ctx: &Ctx<'_>,
    s: &OperatorModel,
    t: &OperatorModel,
    theta: f64,
    alpha: f64,
) -> Result<(f64, f64)> {
    let a = real(alpha);
    let mid = ctx.bnorm(&s.gram().add(&t.gram().scale(a * a))?)?;
    let plus = ctx.bnorm(&s.add(&t.scale(I * a))?.gram())?;
    let minus = ctx.bnorm(&s.sub(&t.scale(I * a))?.gram())?;
    let c = csc(theta) / (2.0 * alpha);
    Ok((c * (plus - mid), c * (mid - minus)))
}

fn kali0(
    ctx: &Ctx<'_>,
    s: &OperatorModel,
    t: &OperatorModel,
    hyps: &mut Vec<Hypothesis>,
    extra: &mut BTreeMap<String, f64>,
) -> Result<Sides> {
    let p = t.adjoint().compose(s)?;
    let sp = ctx.sector(&p)?;
    let theta = ctx.theta_from(&[&sp]);
    hyps.push(ctx.sector_hyp("TstarS_berezin_sectorial", &sp, theta));
    hyps.push(theta_hyp(theta));
    let lhs = ctx.ber(&p)?;
    let (alpha, b1, b2) = match ctx.p.alpha {
        Alpha::Fixed(a) => {
            let (b1, b2) = kali_betas(ctx, s, t, theta, a)?;
            (a, b1, b2)
        }
        Alpha::Search => {
            let err = RefCell::new(None);
            let f = |k: f64| match kali_betas(ctx, s, t, theta, k.exp2()) {
                Ok((b1, b2)) => b1.max(b2),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    f64::NEG_INFINITY
                }
            };
            let ks: Vec<f64> = (-8..=8).map(f64::from).collect();
            let best = grid_then_golden_max(f, &ks, 1e-6);
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            let a = best.x.exp2();
            let (b1, b2) = kali_betas(ctx, s, t, theta, a)?;
            (a, b1, b2)
        }
    };
    extra.insert("alpha".into(), alpha);
    extra.insert("beta1".into(), b1);
    extra.insert("beta2".into(), b2);
    Ok((lhs, b1.max(b2), theta))
}

fn sad4(
    ctx: &Ctx<'_>,
    s: &OperatorModel,
    t: &OperatorModel,
    with_sine: bool,
    hyps: &mut Vec<Hypothesis>,
    extra: &mut BTreeMap<String, f64>,
) -> Result<Sides> {
    let (inv, inv_norm) = ctx.invertible_hyp("S_invertible", s)?;
    hyps.push(inv);
    let p = s.adjoint().compose(t)?;
    let sp = ctx.sector(&p)?;
    let theta = ctx.theta_from(&[&sp]);
    let factor = if with_sine {
        hyps.push(ctx.sector_hyp("SstarT_berezin_sectorial", &sp, theta));
        theta.sin()
    } else {
        1.0
    };
    extra.insert("inverse_norm".into(), inv_norm);
    let lhs = ctx.bnorm(&t.gram())?.sqrt();
    let tail = 0.5 * ctx.bnorm(&t.sub(&s.scale(I))?.gram())?;
    let rhs = inv_norm * (factor * ctx.ber(&p)? + tail);
    Ok((lhs, rhs, theta))
}

fn cow(
    ctx: &Ctx<'_>,
    t: &OperatorModel,
    re: &OperatorModel,
    im: &OperatorModel,
    hyps: &mut Vec<Hypothesis>,
    extra: &mut BTreeMap<String, f64>,
) -> Result<Sides> {
    let values = sample_range(t, &ctx.p.grid, ctx.policy())?.values();
    // Angles θ' with T̃ = r e^{−iθ'}; vertex samples carry no angle.
    let angles: Vec<f64> = values
        .iter()
        .filter(|z| z.norm() > SECTOR_TOL)
        .map(|z| -z.arg())
        .collect();
    let (lo, hi) = angles
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let inside = angles
        .iter()
        .all(|&x| (-SECTOR_SLACK..=FRAC_PI_2 + SECTOR_SLACK).contains(&x));
    let (th1, th2) = if angles.is_empty() {
        (FRAC_PI_2, 0.0)
    } else {
        (lo.max(0.0), hi.min(FRAC_PI_2))
    };
    let derived = th2.max(FRAC_PI_2 - th1);
    let theta = ctx.p.theta.unwrap_or(derived);
    hyps.push(hyp(
        "berezin_range_in_lower_quadrant_arc",
        inside,
        format!("theta1 = {th1:.9}, theta2 = {th2:.9}"),
    ));
    hyps.push(hyp(
        "theta_covers_arc",
        theta >= derived - SECTOR_SLACK,
        format!("theta {theta:.9} vs max(theta2, pi/2 - theta1) = {derived:.9}"),
    ));
    hyps.push(theta_hyp(theta));
    let (b_re, b_im) = (ctx.ber(re)?, ctx.ber(im)?);
    let c = csc(theta) / 2.0;
    let gap = (b_re - b_im).abs();
    let plus = c * ctx.ber(&re.add(im)?)? + c * gap;
    let minus = c * ctx.ber(&re.sub(im)?)? + c * gap;
    let rhs = plus.max(minus);
    // Best sign of the symmetric bound ½(ber ℜT ± ber ℑT) + ½|ber ℜT − ber ℑT|.
    let half = b_re.max(b_im);
    extra.insert("theta1".into(), th1);
    extra.insert("theta2".into(), th2);
    extra.insert("rhs_plus".into(), plus);
    extra.insert("rhs_minus".into(), minus);
    extra.insert("half_bound".into(), half);
    extra.insert("gain_over_half_bound".into(), rhs - half);
    Ok((ctx.ber(t)?, rhs, theta))
}

/// `inf_t (‖|T−t|²‖_ber + ‖|T−it|²‖_ber)` by grid plus golden polish.
fn t_infimum(ctx: &Ctx<'_>, t: &OperatorModel, extra: &mut BTreeMap<String, f64>) -> Result<f64> {
    let norm = ctx.op_norm(t)?;
    let err = RefCell::new(None);
    let g = |x: f64| {
        let a = t.shift_identity(real(-x)).gram();
        let b = t.shift_identity(C64::new(0.0, -x)).gram();
        match (ctx.bnorm(&a), ctx.bnorm(&b)) {
            (Ok(u), Ok(v)) => u + v,
            (Err(e), _) | (_, Err(e)) => {
                err.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let best = if norm > 0.0 {
        let nodes = linspace(-2.0 * norm, 2.0 * norm, ctx.p.t_grid);
        grid_then_golden_min(g, &nodes, 1e-9 * norm.max(1.0))
    } else {
        crate::optimize::Extremum {
            x: 0.0,
            value: g(0.0),
        }
    };
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    extra.insert("t".into(), best.x);
    extra.insert("t_infimum".into(), best.value);
    Ok(best.value)
}

/// Worst power `k = 2..=n` of `ber(Tᵏ) ≤ bound(k)`.
fn powers<F: Fn(u32) -> f64>(
    ctx: &Ctx<'_>,
    t: &OperatorModel,
    extra: &mut BTreeMap<String, f64>,
    bound: F,
) -> Result<(f64, f64)> {
    let mut worst = (ctx.ber(t)?, bound(1), 1u32);
    for k in 2..=ctx.p.n {
        let lhs = ctx.ber(&t.power(k))?;
        let rhs = bound(k);
        extra.insert(format!("margin_n{k}"), rhs - lhs);
        if rhs - lhs < worst.1 - worst.0 {
            worst = (lhs, rhs, k);
        }
    }
    extra.insert("worst_n".into(), worst.2 as f64);
    Ok((worst.0, worst.1))
}

/// `max_± ber(SXT ± TYS)`.
fn sxt_tys(
    ctx: &Ctx<'_>,
    s: &OperatorModel,
    t: &OperatorModel,
    x: &OperatorModel,
    y: &OperatorModel,
) -> Result<f64> {
    let a = s.compose(x)?.compose(t)?;
    let b = t.compose(y)?.compose(s)?;
    Ok(ctx.ber(&a.add(&b)?)?.max(ctx.ber(&a.sub(&b)?)?))
}

#[allow(clippy::too_many_arguments)]
fn axb_rhs(
    ctx: &Ctx<'_>,
    s: &OperatorModel,
    t: &OperatorModel,
    x: &OperatorModel,
    y: &OperatorModel,
    theta: f64,
    extra: &mut BTreeMap<String, f64>,
    prefix: &str,
) -> Result<f64> {
    let x2 = x.gram();
    let y2 = y.adjoint().gram();
    let inner = t
        .adjoint()
        .compose(&x2)?
        .compose(t)?
        .add(&t.compose(&y2)?.compose(&t.adjoint())?)?;
    let n = ctx.bnorm(&inner)?;
    let (re, im) = s.cartesian_parts();
    let (b, b_re, b_im) = (ctx.ber(s)?, ctx.ber(&re)?, ctx.ber(&im)?);
    let q = b * b - csc(theta).powi(2) / 2.0 * (b_im * b_im - b_re * b_re);
    extra.insert(format!("{prefix}radicand"), q);
    Ok(2.0 * theta.sin() * n.sqrt() * q.max(0.0).sqrt())
}

fn commuting(
    ctx: &Ctx<'_>,
    fam: &[(OperatorModel, OperatorModel)],
    hyps: &mut Vec<Hypothesis>,
    extra: &mut BTreeMap<String, f64>,
) -> Result<Sides> {
    let mut sectors = Vec::new();
    for (s, t) in fam {
        sectors.push(ctx.sector(s)?);
        sectors.push(ctx.sector(t)?);
    }
    let refs: Vec<&SectorReport> = sectors.iter().collect();
    let theta = ctx.theta_from(&refs);
    let mut sum = OperatorModel::scalar_collapsed(fam[0].0.space(), real(0.0));
    let (mut bs, mut bt) = (0.0, 0.0);
    for (j, (s, t)) in fam.iter().enumerate() {
        let j = j + 1;
        hyps.push(ctx.power_hyp(&format!("S{j}_in_power_class"), s, theta)?);
        hyps.push(ctx.power_hyp(&format!("T{j}_in_power_class"), t, theta)?);
        hyps.push(ctx.commute_hyp(&format!("S{j}T{j}_commute"), s, t)?);
        sum = sum.add(&s.compose(t)?)?;
        bs += ctx.ber(s)?.powi(2);
        bt += ctx.ber(t)?.powi(2);
    }
    extra.insert("family_size".into(), fam.len() as f64);
    let lhs = ctx.ber(&sum)?.powi(2);
    let rhs = (1.0 + theta.sin().powi(2)).powi(2) * bs * bt;
    Ok((lhs, rhs, theta))
}

/// The vector lemma instantiated at `x = T k̂_λ`, `y = k̂_λ` over the sampling
/// grid and the `t` grid; returns the sides at the smallest margin.
fn last30_operator(
    ctx: &Ctx<'_>,
    t: &OperatorModel,
    extra: &mut BTreeMap<String, f64>,
) -> Result<(f64, f64)> {
    let m = ctx.matrix(t)?;
    let space = t.space();
    let kernels: Vec<Vec<C64>> = match space.dimension() {
        Some(n) => (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| real(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect(),
        None => {
            let mut out = Vec::with_capacity(ctx.p.grid.len());
            for z in ctx.p.grid.points() {
                let u = space.truncated_kernel_vector(z, m.rows())?;
                let s = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                out.push(u.into_iter().map(|c| c / s).collect());
            }
            out
        }
    };
    let norm = operator_norm(&m)?;
    let ts = linspace(-2.0 * norm.max(1.0), 2.0 * norm.max(1.0), ctx.p.t_grid);
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for y in &kernels {
        let x = m.mul_vec(y);
        for &tv in &ts {
            let (l, r) = last30_sides(&x, y, tv)?;
            if r - l < best.2 {
                best = (l, r, r - l);
                extra.insert("t".into(), tv);
            }
        }
    }
    Ok((best.0, best.1))
}
