//! Polar sampling grids on the closed sub-disk `|λ| ≤ 1 − 1e−9`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rkhs::R_MAX;
use crate::C64;

/// `R × K` polar grid, uniform in `r` and in `ζ`, enumerated radial-major:
/// point `i·K + k` is `r_i e^{iζ_k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub radial: usize,
    pub angular: usize,
    pub r_lo: f64,
    pub r_hi: f64,
    pub zeta_lo: f64,
    /// Angular extent; a full circle omits the duplicate endpoint.
    pub zeta_span: f64,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self::full(200, 256).expect("valid default grid")
    }
}

impl DiskGrid {
    /// Full disk grid with `radial` radii on `[0, r_max]` and `angular` angles.
    pub fn full(radial: usize, angular: usize) -> Result<Self> {
        let g = Self {
            radial,
            angular,
            r_lo: 0.0,
            r_hi: R_MAX,
            zeta_lo: 0.0,
            zeta_span: 2.0 * PI,
        };
        g.validate()?;
        Ok(g)
    }

    /// Full grid restricted to radii `≤ r_hi`.
    pub fn with_max_radius(mut self, r_hi: f64) -> Result<Self> {
        self.r_hi = r_hi;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial < 2 || self.angular < 4 {
            return Err(Error::InvalidParameter(format!(
                "grid needs R >= 2 and K >= 4, got {}x{}",
                self.radial, self.angular
            )));
        }
        if !(0.0 <= self.r_lo && self.r_lo <= self.r_hi && self.r_hi <= R_MAX) {
            return Err(Error::InvalidParameter(format!(
                "grid radii [{}, {}] outside [0, {R_MAX}]",
                self.r_lo, self.r_hi
            )));
        }
        if !(self.zeta_span > 0.0 && self.zeta_span <= 2.0 * PI && self.zeta_lo.is_finite()) {
            return Err(Error::InvalidParameter("invalid angular window".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.radial * self.angular
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn is_full_circle(&self) -> bool {
        self.zeta_span >= 2.0 * PI
    }

    pub fn radius(&self, i: usize) -> f64 {
        if i + 1 == self.radial {
            self.r_hi
        } else {
            self.r_lo + (self.r_hi - self.r_lo) * i as f64 / (self.radial - 1) as f64
        }
    }

    pub fn angle(&self, k: usize) -> f64 {
        if self.is_full_circle() {
            self.zeta_lo + self.zeta_span * k as f64 / self.angular as f64
        } else {
            self.zeta_lo + self.zeta_span * k as f64 / (self.angular - 1) as f64
        }
    }

    /// Polar coordinates of grid point `idx`.
    pub fn polar(&self, idx: usize) -> (f64, f64) {
        (
            self.radius(idx / self.angular),
            self.angle(idx % self.angular),
        )
    }

    pub fn point(&self, idx: usize) -> C64 {
        let (r, z) = self.polar(idx);
        C64::from_polar(r, z)
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Window with a quarter of the radial and angular extent, centred at
    /// `(r, ζ)` and shifted to stay within `[0, r_max]`.
    pub fn refined_around(&self, r: f64, zeta: f64) -> Self {
        self.refined_within(r, zeta, R_MAX)
    }

    /// As [`DiskGrid::refined_around`] with the outer radius `r_max`.
    pub fn refined_within(&self, r: f64, zeta: f64, r_max: f64) -> Self {
        let width = (self.r_hi - self.r_lo) / 4.0;
        let mut lo = r - width / 2.0;
        let mut hi = r + width / 2.0;
        if lo < 0.0 {
            lo = 0.0;
            hi = width.min(r_max);
        }
        if hi > r_max {
            hi = r_max;
            lo = (r_max - width).max(0.0);
        }
        let span = self.zeta_span / 4.0;
        Self {
            radial: self.radial,
            angular: self.angular,
            r_lo: lo,
            r_hi: hi,
            zeta_lo: zeta - span / 2.0,
            zeta_span: span,
        }
    }
}
