//! Thin 2D FFT layer over rustfft: row-column transforms on row-major
//! buffers, plus signed (centered) frequency indexing helpers.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Forward 2D FFT of a real row-major buffer. Unnormalized.
pub fn fft2(width: usize, height: usize, data: &[f64]) -> Vec<Complex<f64>> {
    assert_eq!(data.len(), width * height);
    let mut buf: Vec<Complex<f64>> = data.iter().map(|&v| Complex::new(v, 0.0)).collect();
    transform(width, height, &mut buf, rustfft::FftDirection::Forward);
    buf
}

/// Inverse 2D FFT; returns the real part normalized by `1/(w*h)`.
pub fn ifft2_real(width: usize, height: usize, mut spec: Vec<Complex<f64>>) -> Vec<f64> {
    assert_eq!(spec.len(), width * height);
    transform(width, height, &mut spec, rustfft::FftDirection::Inverse);
    let norm = 1.0 / (width * height) as f64;
    spec.iter().map(|c| c.re * norm).collect()
}

fn transform(
    width: usize,
    height: usize,
    buf: &mut [Complex<f64>],
    dir: rustfft::FftDirection,
) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(width, dir);
    for row in buf.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    // columns via transpose, row FFTs, transpose back
    let mut t = vec![Complex::new(0.0, 0.0); width * height];
    for y in 0..height {
        for x in 0..width {
            t[x * height + y] = buf[y * width + x];
        }
    }
    let col_fft = planner.plan_fft(height, dir);
    for col in t.chunks_exact_mut(height) {
        col_fft.process(col);
    }
    for y in 0..height {
        for x in 0..width {
            buf[y * width + x] = t[x * height + y];
        }
    }
}

/// Signed frequency of DFT bin `k` for transform size `n`
/// (0, 1, .., n/2, -(n/2-1), .., -1 for even n).
#[inline]
pub fn signed_freq(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}
