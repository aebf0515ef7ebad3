use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Normalized forward transform: `c[r] = (1/N) Σ_m x[m] exp(-2πi r m / N)`.
///
/// Any length is accepted; non power-of-two sizes go through the mixed-radix
/// and Bluestein paths of `rustfft`.
pub fn fft_forward(samples: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::Argument("cannot transform an empty sequence".into()));
    }
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Ok(buf)
}

/// Inverse of [`fft_forward`]: `x[m] = Σ_r c[r] exp(2πi r m / N)`.
pub fn fft_inverse(coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coefficients.len();
    if n == 0 {
        return Err(Error::Argument("cannot transform an empty sequence".into()));
    }
    let mut buf = coefficients.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    Ok(buf)
}
