//! Two-dimensional complex FFTs on square grids.
//!
//! Plans are cached per size and shared between threads. Rows are
//! transformed in blocks, the square array is transposed in place, and the
//! rows are transformed again.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::par;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

const ROWS_PER_TASK: usize = 8;

fn transform_rows(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    par::for_each_chunk_mut(data, n * ROWS_PER_TASK, |_, block| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(block, &mut scratch);
    });
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

fn transform(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    debug_assert_eq!(data.len(), n * n);
    transform_rows(data, n, fft);
    transpose(data, n);
    transform_rows(data, n, fft);
    transpose(data, n);
}

/// Forward transform, normalized by `1/N²` so that a unit harmonic
/// `cos(k·x)` has coefficients `1/2` at `±k`.
pub fn forward(data: &mut [Complex64], n: usize) {
    let p = plans(n);
    transform(data, n, &p.forward);
    let scale = 1.0 / (n * n) as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}

/// Unnormalized inverse transform (synthesis from coefficients).
pub fn inverse(data: &mut [Complex64], n: usize) {
    let p = plans(n);
    transform(data, n, &p.inverse);
}
