use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_length() -> f64 {
    2.0 * PI
}

fn default_dealias() -> f64 {
    2.0 / 3.0
}

/// Square periodic grid on the torus `[0, L)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points_per_side: usize,
    #[serde(default = "default_length")]
    pub domain_length: f64,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

impl GridSpec {
    /// Grid on the `2π` torus with the 2/3 dealiasing rule.
    pub fn new(points_per_side: usize) -> Result<Self> {
        Self::with_length(points_per_side, default_length())
    }

    pub fn with_length(points_per_side: usize, domain_length: f64) -> Result<Self> {
        let g = GridSpec {
            points_per_side,
            domain_length,
            dealias_fraction: default_dealias(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points_per_side;
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points_per_side must be even and >= 8, got {n}"
            )));
        }
        if !(self.domain_length.is_finite() && self.domain_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain_length must be positive, got {}",
                self.domain_length
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias_fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.points_per_side
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points_per_side * self.points_per_side
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points_per_side == 0
    }

    /// Grid spacing `h = L/N`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.domain_length / self.points_per_side as f64
    }

    /// Quadrature weight of one node, `h^2`.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.domain_length * self.domain_length
    }

    /// `2π/L`, the physical wavenumber of mode 1.
    #[inline]
    pub fn wavenumber_unit(&self) -> f64 {
        2.0 * PI / self.domain_length
    }

    /// Integer mode of array index `i`, in `{-N/2+1, …, N/2}`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.points_per_side;
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Array index of integer mode `m` (taken modulo N).
    #[inline]
    pub fn index_of_mode(&self, m: i64) -> usize {
        m.rem_euclid(self.points_per_side as i64) as usize
    }

    /// Physical wavenumber of array index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.mode(i) as f64 * self.wavenumber_unit()
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.points_per_side / 2
    }

    /// Largest retained integer mode under the dealiasing rule.
    pub fn cutoff_mode(&self) -> i64 {
        (self.dealias_fraction * self.points_per_side as f64 / 2.0 + 1e-9).floor() as i64
    }

    /// Physical dealiasing cutoff `fraction·N/2·(2π/L)`.
    pub fn cutoff_wavenumber(&self) -> f64 {
        self.dealias_fraction * self.points_per_side as f64 / 2.0 * self.wavenumber_unit()
    }

    /// Whether the mode at indices `(i, j)` survives dealiasing.
    #[inline]
    pub fn retained(&self, i: usize, j: usize) -> bool {
        let c = self.cutoff_mode();
        self.mode(i).abs() <= c && self.mode(j).abs() <= c
    }

    /// Physical coordinate of node index `i`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.points_per_side,
                right: other.points_per_side,
            })
        }
    }
}
