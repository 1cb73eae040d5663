//! Unitary multi-dimensional FFT over a row-major lattice.
//!
//! Each axis is transformed as a batch of independent lines. Lines never share
//! state, so the result is bit-identical for any rayon thread count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::Grid;

struct Plan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan(n: usize) -> Arc<Plan> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plan>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plan {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

/// Lines per rayon task; keeps tiny axes from drowning in scheduling overhead.
const LINES_PER_TASK: usize = 64;

fn transform(grid: &Grid, data: &mut [Complex64], dir: Direction) {
    assert_eq!(data.len(), grid.len());
    let n = grid.n();
    let plan = plan(n);
    let fft = match dir {
        Direction::Forward => &plan.forward,
        Direction::Inverse => &plan.inverse,
    };
    let run_lines = |buf: &mut [Complex64]| {
        buf.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });
    };

    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        if stride == 1 {
            run_lines(data);
            continue;
        }
        let block = n * stride;
        // gather: line (outer, inner) -> contiguous
        lines
            .par_chunks_mut(block)
            .zip(data.par_chunks(block))
            .for_each(|(dst, src)| {
                for inner in 0..stride {
                    for k in 0..n {
                        dst[inner * n + k] = src[k * stride + inner];
                    }
                }
            });
        run_lines(&mut lines);
        data.par_chunks_mut(block)
            .zip(lines.par_chunks(block))
            .for_each(|(dst, src)| {
                for inner in 0..stride {
                    for k in 0..n {
                        dst[k * stride + inner] = src[inner * n + k];
                    }
                }
            });
    }

    let scale = 1.0 / (grid.len() as f64).sqrt();
    data.par_iter_mut().for_each(|z| *z *= scale);
}

/// In-place unitary forward transform: `c_k = N^{-1/2} sum_j f_j e^{-i k x_j}`.
pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, Direction::Forward);
}

/// In-place unitary inverse of [`forward`].
pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, Direction::Inverse);
}
