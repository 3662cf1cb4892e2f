//! Membership test for the power class: Berezin sectorial, with both
//! Cartesian parts satisfying `ber(Hⁿ) ≤ ber(H)ⁿ`.

use serde::{Deserialize, Serialize};

use crate::berezin::{berezin_number, sample_range, DiskGrid, SeriesPolicy};
use crate::error::{Error, Result};
use crate::operators::OperatorModel;
use crate::ranges::{sector_index, SectorReport, SECTOR_TOL};

/// Slack for the power inequalities.
pub const POWER_SLACK: f64 = 1e-8;
/// Slack for sector membership.
pub const SECTOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerMargin {
    pub n: u32,
    /// `ber(ℜ(T))ⁿ − ber(ℜ(T)ⁿ)`.
    pub re_margin: f64,
    /// `ber(ℑ(T))ⁿ − ber(ℑ(T)ⁿ)`.
    pub im_margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerClassReport {
    pub theta: f64,
    pub sector: SectorReport,
    pub sectorial: bool,
    pub margins: Vec<PowerMargin>,
    pub powers_ok: bool,
    pub member: bool,
}

/// Checks membership at semi-angle `theta` for powers `2..=n_max`.
///
/// Disk models are compressed to `truncation` basis vectors for the powers.
pub fn power_class_check(
    op: &OperatorModel,
    theta: f64,
    n_max: u32,
    grid: &DiskGrid,
    refine: usize,
    truncation: usize,
) -> Result<PowerClassReport> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_max must be >= 2, got {n_max}"
        )));
    }
    let policy = SeriesPolicy::Fixed(truncation);
    let sampling = sample_range(op, grid, policy)?;
    let sector = sector_index(&sampling.values(), SECTOR_TOL)?;
    let sectorial = sector.within(theta, SECTOR_SLACK);

    let (re, im) = op.cartesian_parts();
    let ber = |h: &OperatorModel| berezin_number(h, grid, refine, policy).map(|s| s.value);
    let b_re = ber(&re)?;
    let b_im = ber(&im)?;
    let mut margins = Vec::new();
    for n in 2..=n_max {
        let re_margin = b_re.powi(n as i32) - ber(&re.power(n))?;
        let im_margin = b_im.powi(n as i32) - ber(&im.power(n))?;
        margins.push(PowerMargin {
            n,
            re_margin,
            im_margin,
        });
    }
    let powers_ok = margins
        .iter()
        .all(|m| m.re_margin >= -POWER_SLACK && m.im_margin >= -POWER_SLACK);
    Ok(PowerClassReport {
        theta,
        sector,
        sectorial,
        margins,
        powers_ok,
        member: sectorial && powers_ok,
    })
}
