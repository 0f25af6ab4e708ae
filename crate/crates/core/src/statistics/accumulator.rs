//! Running Cesàro averages `(1/T) ∫_{t₀}^{t₀+T} X(t) dt` by the trapezoid rule.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Snapshot {
    t: f64,
    values: Vec<f64>,
}

/// Accumulates trapezoid integrals of named channels over irregular or
/// regular samples. A second sum over every other sample gives a
/// quadrature error estimate.
#[derive(Clone, Debug)]
pub struct AverageAccumulator {
    names: Vec<String>,
    fine: Vec<f64>,
    coarse: Vec<f64>,
    max_abs: Vec<f64>,
    first: Option<Snapshot>,
    last: Option<Snapshot>,
    anchor: Option<Snapshot>,
    count: usize,
}

impl AverageAccumulator {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let m = names.len();
        AverageAccumulator {
            names,
            fine: vec![0.0; m],
            coarse: vec![0.0; m],
            max_abs: vec![0.0; m],
            first: None,
            last: None,
            anchor: None,
            count: 0,
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn channel(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no channel named {name:?}")))
    }

    /// Add a sample. Times must be strictly increasing.
    pub fn push(&mut self, t: f64, values: &[f64]) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} channel values, got {}",
                self.names.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        for (m, v) in self.max_abs.iter_mut().zip(values) {
            *m = m.max(v.abs());
        }
        let snap = Snapshot {
            t,
            values: values.to_vec(),
        };
        if let Some(prev) = &self.last {
            if t <= prev.t {
                return Err(Error::InvalidParameter(format!(
                    "sample time {t} does not follow {}",
                    prev.t
                )));
            }
            trapezoid(&mut self.fine, prev, &snap);
        } else {
            self.first = Some(snap.clone());
            self.anchor = Some(snap.clone());
        }
        self.count += 1;
        if self.count % 2 == 1 && self.count > 1 {
            let anchor = self.anchor.as_ref().expect("anchor set with first sample");
            trapezoid(&mut self.coarse, anchor, &snap);
            self.anchor = Some(snap.clone());
        }
        self.last = Some(snap);
        Ok(())
    }

    pub fn samples(&self) -> usize {
        self.count
    }

    /// Time of the first sample.
    pub fn start(&self) -> Option<f64> {
        self.first.as_ref().map(|s| s.t)
    }

    /// Length `T` of the averaging window.
    pub fn elapsed(&self) -> f64 {
        match (&self.first, &self.last) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    fn require_window(&self) -> Result<f64> {
        let t = self.elapsed();
        if self.count < 2 || t <= 0.0 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: self.count,
            });
        }
        Ok(t)
    }

    /// `∫ X dt` over the window.
    pub fn integral(&self, channel: usize) -> Result<f64> {
        self.require_window()?;
        Ok(self.fine[channel])
    }

    /// `(1/T) ∫ X dt`.
    pub fn average(&self, channel: usize) -> Result<f64> {
        Ok(self.integral(channel)? / self.elapsed())
    }

    pub fn average_named(&self, name: &str) -> Result<f64> {
        self.average(self.channel(name)?)
    }

    /// Average of `Σ c_i X_i`, computed from the stored channel integrals.
    pub fn average_combination(&self, terms: &[(usize, f64)]) -> Result<f64> {
        let t = self.require_window()?;
        Ok(terms.iter().map(|&(i, c)| c * self.fine[i]).sum::<f64>() / t)
    }

    /// Average over every other sample, closing an odd tail with the last
    /// fine interval.
    fn coarse_integral(&self, channel: usize) -> f64 {
        let mut total = self.coarse[channel];
        if self.count.is_multiple_of(2) {
            if let (Some(a), Some(b)) = (&self.anchor, &self.last) {
                total += 0.5 * (b.t - a.t) * (a.values[channel] + b.values[channel]);
            }
        }
        total
    }

    /// `|I_Δ − I_2Δ| / T` for the channel average, an estimate of its
    /// quadrature error.
    pub fn quadrature_error(&self, channel: usize) -> Result<f64> {
        let t = self.require_window()?;
        Ok((self.fine[channel] - self.coarse_integral(channel)).abs() / t)
    }

    /// Largest `|X|` seen in the channel.
    pub fn max_abs(&self, channel: usize) -> f64 {
        self.max_abs[channel]
    }

    pub fn first_value(&self, channel: usize) -> Option<f64> {
        self.first.as_ref().map(|s| s.values[channel])
    }

    pub fn last_value(&self, channel: usize) -> Option<f64> {
        self.last.as_ref().map(|s| s.values[channel])
    }
}

fn trapezoid(sums: &mut [f64], a: &Snapshot, b: &Snapshot) {
    let half = 0.5 * (b.t - a.t);
    for ((s, x), y) in sums.iter_mut().zip(&a.values).zip(&b.values) {
        *s += half * (x + y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn filled(f: impl Fn(f64) -> f64, n: usize, t_end: f64) -> AverageAccumulator {
        let mut acc = AverageAccumulator::new(["x"]);
        for i in 0..=n {
            let t = t_end * i as f64 / n as f64;
            acc.push(t, &[f(t)]).unwrap();
        }
        acc
    }

    #[test]
    fn constant_average_is_exact() {
        let acc = filled(|_| 2.5, 17, 3.0);
        assert!((acc.average(0).unwrap() - 2.5).abs() < 1e-15);
        assert!(acc.quadrature_error(0).unwrap() < 1e-15);
        assert_eq!(acc.elapsed(), 3.0);
    }

    #[test]
    fn sine_average_converges() {
        let exact = (1.0 - 2.0_f64.cos()) / 2.0;
        let acc = filled(f64::sin, 200, 2.0);
        let err = (acc.average(0).unwrap() - exact).abs();
        let est = acc.quadrature_error(0).unwrap();
        assert!(err < 1e-5);
        // the coarse sum has four times the error of the fine one
        assert!((est / err - 3.0).abs() < 0.1, "{est} vs {err}");
    }

    #[test]
    fn odd_interval_count_still_estimates() {
        let exact = (1.0 - 2.0_f64.cos()) / 2.0;
        let acc = filled(f64::sin, 201, 2.0);
        let err = (acc.average(0).unwrap() - exact).abs();
        assert!(acc.quadrature_error(0).unwrap() >= err);
    }

    #[test]
    fn rejects_bad_input() {
        let mut acc = AverageAccumulator::new(["a", "b"]);
        assert!(acc.push(0.0, &[1.0]).is_err());
        acc.push(0.0, &[1.0, 2.0]).unwrap();
        assert!(acc.push(0.0, &[1.0, 2.0]).is_err());
        assert!(acc.push(1.0, &[f64::NAN, 2.0]).is_err());
        assert!(matches!(
            acc.average(0),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(acc.channel("c").is_err());
    }

    proptest! {
        #[test]
        fn average_is_linear(
            xs in proptest::collection::vec(-10.0..10.0f64, 3..40),
            ys in proptest::collection::vec(-10.0..10.0f64, 3..40),
            a in -3.0..3.0f64,
            b in -3.0..3.0f64,
        ) {
            let n = xs.len().min(ys.len());
            let mut acc = AverageAccumulator::new(["x", "y", "z"]);
            for i in 0..n {
                let t = i as f64 * 0.1 + (i * i) as f64 * 0.01;
                acc.push(t, &[xs[i], ys[i], a * xs[i] + b * ys[i]]).unwrap();
            }
            let combo = acc.average_combination(&[(0, a), (1, b)]).unwrap();
            let direct = acc.average(2).unwrap();
            prop_assert!((combo - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
        }

        #[test]
        fn average_lies_between_extremes(xs in proptest::collection::vec(-5.0..5.0f64, 2..30)) {
            let mut acc = AverageAccumulator::new(["x"]);
            for (i, x) in xs.iter().enumerate() {
                acc.push(i as f64, &[*x]).unwrap();
            }
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let avg = acc.average(0).unwrap();
            prop_assert!(avg >= lo - 1e-12 && avg <= hi + 1e-12);
        }
    }
}
