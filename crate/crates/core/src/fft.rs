//! Multidimensional complex FFTs over a [`TorusGrid`], built from 1-D rustfft plans.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

use crate::grid::TorusGrid;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    // the planner caches plans internally, so this is cheap after the first call
    let mut p = planner().lock().unwrap_or_else(|e| e.into_inner());
    if inverse {
        p.plan_fft_inverse(len)
    } else {
        p.plan_fft_forward(len)
    }
}

fn transform(grid: &TorusGrid, data: &mut [Complex64], fft: &dyn Fft<f64>) {
    let n = grid.points_per_axis();
    let total = grid.len();
    debug_assert_eq!(data.len(), total);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut lines = vec![Complex64::default(); total];

    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = n * stride;
        let outer_count = total / block;
        // gather every line along `axis` into a contiguous buffer
        for outer in 0..outer_count {
            for inner in 0..stride {
                let line = (outer * stride + inner) * n;
                let base = outer * block + inner;
                for i in 0..n {
                    lines[line + i] = data[base + i * stride];
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for outer in 0..outer_count {
            for inner in 0..stride {
                let line = (outer * stride + inner) * n;
                let base = outer * block + inner;
                for i in 0..n {
                    data[base + i * stride] = lines[line + i];
                }
            }
        }
    }
}

/// Physical samples to Fourier coefficients with `f(x) = Σ c_k e^{i k·x}`.
pub(crate) fn forward(grid: &TorusGrid, data: &mut [Complex64]) {
    let fft = plan(grid.points_per_axis(), false);
    transform(grid, data, fft.as_ref());
    let scale = 1.0 / grid.len() as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}

/// Fourier coefficients to physical samples.
pub(crate) fn inverse(grid: &TorusGrid, data: &mut [Complex64]) {
    let fft = plan(grid.points_per_axis(), true);
    transform(grid, data, fft.as_ref());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_lands_on_its_index() {
        let g = TorusGrid::new(3, 8).unwrap();
        let mut data: Vec<Complex64> = (0..g.len())
            .map(|flat| {
                let x = g.position(flat);
                Complex64::new(0.0, 2.0 * x[0] - x[2]).exp()
            })
            .collect();
        forward(&g, &mut data);
        let target = g.flat_index([2, 0, -1]);
        for (flat, c) in data.iter().enumerate() {
            let expect = if flat == target { 1.0 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-13 && c.im.abs() < 1e-13, "flat {flat}: {c}");
        }
        inverse(&g, &mut data);
        let x = g.position(5);
        let expect = Complex64::new(0.0, 2.0 * x[0] - x[2]).exp();
        assert!((data[5] - expect).norm() < 1e-13);
    }
}
