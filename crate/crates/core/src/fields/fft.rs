//! Multi-dimensional complex FFT plumbing on flat row-major storage.
//!
//! Conventions: forward transform is the unnormalized DFT
//! `f̂_k = Σ_x f(x) e^{-i k·x}`, the inverse carries the `1/n` factor per
//! axis, so `inverse(forward(f)) = f` up to round-off.

use super::Grid;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// In-place transform along every axis of a `dim`-cube of side `n`.
fn transform_all_axes(grid: Grid, buf: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let dim = grid.dim();
    let total = grid.points();
    let fft = plan(n, inverse);

    // Last axis is contiguous: rustfft processes back-to-back lines directly.
    fft.process(buf);

    // Remaining axes via gather/scatter of strided lines.
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in (0..dim.saturating_sub(1)).rev() {
        // stride between consecutive entries along `axis`
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n; // span of one full line set
        let mut base = 0;
        while base < total {
            for off in 0..stride {
                let start = base + off;
                for (j, l) in line.iter_mut().enumerate() {
                    *l = buf[start + j * stride];
                }
                fft.process(&mut line);
                for (j, l) in line.iter().enumerate() {
                    buf[start + j * stride] = *l;
                }
            }
            base += block;
        }
    }

    if inverse {
        let scale = 1.0 / total as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

pub(crate) fn forward(grid: Grid, samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_all_axes(grid, &mut buf, false);
    buf
}

pub(crate) fn inverse_real(grid: Grid, coef: &[Complex64]) -> Vec<f64> {
    let mut buf = coef.to_vec();
    transform_all_axes(grid, &mut buf, true);
    buf.into_iter().map(|c| c.re).collect()
}
