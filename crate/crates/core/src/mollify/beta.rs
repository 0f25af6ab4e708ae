use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of `q(s) = 1 + s + Σ_{p=4}^{7} a_p s^p`, the taper on
/// `s ∈ [0, 1]` with `q(0)=1, q'(0)=1, q''(0)=q'''(0)=0` and
/// `q = q' = q'' = q''' = 0` at `s = 1`.
const TAPER: [f64; 4] = [-55.0, 129.0, -106.0, 30.0];

fn taper(s: f64) -> [f64; 4] {
    let mut v = [1.0 + s, 1.0, 0.0, 0.0];
    for (idx, a) in TAPER.iter().enumerate() {
        let p = (idx + 4) as i32;
        let pf = p as f64;
        v[0] += a * s.powi(p);
        v[1] += a * pf * s.powi(p - 1);
        v[2] += a * pf * (pf - 1.0) * s.powi(p - 2);
        v[3] += a * pf * (pf - 1.0) * (pf - 2.0) * s.powi(p - 3);
    }
    v
}

/// Member `β_M` of the renormalization family: `β_M(y) = y` on `|y| ≤ M`,
/// a C³ odd taper to zero on `M ≤ |y| ≤ 2M`, and zero beyond.
///
/// `β'_M` is bounded independently of `M` and `β''_M = O(1/M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormalizerBeta {
    pub family_parameter: f64,
}

impl RenormalizerBeta {
    pub fn new(family_parameter: f64) -> Result<Self> {
        if !(family_parameter.is_finite() && family_parameter > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta family parameter must be positive, got {family_parameter}"
            )));
        }
        Ok(RenormalizerBeta { family_parameter })
    }

    pub fn id(&self) -> String {
        format!("beta_M{}", self.family_parameter)
    }

    pub fn support_radius(&self) -> f64 {
        2.0 * self.family_parameter
    }

    /// `[β, β', β'', β''']` at `y`.
    pub fn eval(&self, y: f64) -> [f64; 4] {
        let m = self.family_parameter;
        let a = y.abs();
        let sign = y.signum();
        if a <= m {
            [y, 1.0, 0.0, 0.0]
        } else if a < 2.0 * m {
            let q = taper((a - m) / m);
            // odd extension: β and β'' flip sign, β' and β''' do not
            [sign * m * q[0], q[1], sign * q[2] / m, q[3] / (m * m)]
        } else {
            [0.0; 4]
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        self.eval(y)[0]
    }

    pub fn derivative(&self, y: f64) -> f64 {
        self.eval(y)[1]
    }

    pub fn second_derivative(&self, y: f64) -> f64 {
        self.eval(y)[2]
    }

    /// `sup |β|`.
    pub fn sup(&self) -> f64 {
        // |β| peaks inside the taper; sample it densely
        let m = self.family_parameter;
        (0..=4000)
            .map(|i| self.value(m + m * i as f64 / 4000.0).abs())
            .fold(m, f64::max)
    }
}
