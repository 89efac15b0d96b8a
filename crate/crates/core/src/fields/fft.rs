use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::Grid;

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let mut planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new())).lock().unwrap();
    if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    }
}

/// In-place d-dimensional DFT; the inverse is normalized by `1/n^d`.
pub(crate) fn transform(grid: &Grid, data: &mut [Complex64], forward: bool) {
    let n = grid.n();
    let fft = plan(n, forward);
    if grid.dim() == 1 {
        fft.process(data);
    } else {
        rows(&*fft, data, n);
        transpose(data, n);
        rows(&*fft, data, n);
        transpose(data, n);
    }
    if !forward {
        let s = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|c| *c *= s);
    }
}

fn rows(fft: &dyn Fft<f64>, data: &mut [Complex64], n: usize) {
    data.par_chunks_mut(n * 8).for_each(|block| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for row in block.chunks_mut(n) {
            fft.process_with_scratch(row, &mut scratch);
        }
    });
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
