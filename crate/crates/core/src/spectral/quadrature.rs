//! Deterministic pairwise summation.

const BLOCK: usize = 64;

/// Pairwise (cascade) sum of `f(0) + … + f(n−1)`. The recursion splits at
/// fixed points, so the result is independent of how callers are scheduled.
pub fn pairwise_sum_by(n: usize, f: impl Fn(usize) -> f64 + Copy) -> f64 {
    fn rec(lo: usize, hi: usize, f: impl Fn(usize) -> f64 + Copy) -> f64 {
        if hi - lo <= BLOCK {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            s
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    if n == 0 {
        0.0
    } else {
        rec(0, n, f)
    }
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_sum_by(xs.len(), |i| xs[i])
}
