//! Multidimensional DFT over a mixed-radix index space (last factor fastest).

use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place forward transform `F(ξ) = Σ_s f(s) exp(-2πi Σ_j ξ_j s_j / n_j)`,
/// or the unnormalized inverse when `inverse` is set.
pub(crate) fn dft_in_place(factors: &[usize], data: &mut [Complex64], inverse: bool) {
    let total: usize = factors.iter().product();
    debug_assert_eq!(total, data.len());
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = total;
    for &n in factors {
        stride /= n;
        if n == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let block = n * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, value) in line.iter().enumerate() {
                    data[base + j * stride] = *value;
                }
            }
        }
    }
}

pub(crate) fn forward(factors: &[usize], values: &[Complex64]) -> Vec<Complex64> {
    let mut out = values.to_vec();
    dft_in_place(factors, &mut out, false);
    out
}

/// Normalized inverse (divides by the group order).
pub(crate) fn inverse(factors: &[usize], values: &[Complex64]) -> Vec<Complex64> {
    let mut out = values.to_vec();
    dft_in_place(factors, &mut out, true);
    let scale = 1.0 / out.len() as f64;
    for v in &mut out {
        *v *= scale;
    }
    out
}
