//! Orthogonal 2D wavelet engine and bivariate-shrinkage denoiser.
//!
//! The transform is a separable 2-channel orthonormal filter bank applied
//! with circular convolution on power-of-two squares, so analysis followed
//! by synthesis is the exact identity. Denoising shrinks each detail
//! coefficient jointly with its parent at the next coarser scale.

use serde::{Deserialize, Serialize};

use crate::raster::{Colorspace, RasterImage};
use crate::{Error, Result};

/// Analysis filter pair of an orthonormal 2-channel perfect-reconstruction
/// bank. The highpass is derived from the lowpass by the quadrature-mirror
/// rule `h1[n] = (-1)^n h0[L-1-n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    name: &'static str,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl FilterBank {
    /// The Farras nearly symmetric orthogonal 10-tap pair.
    ///
    /// The taps have closed forms: with `a = sqrt(2)/4 - sqrt(30)/16`,
    /// `b = sqrt(2)/16`, `c = sqrt(2)/4 + sqrt(30)/16`, the lowpass is
    /// `[0, 0, a, a, -b, b, c, c, b, -b]`.
    pub fn farras() -> FilterBank {
        let a = std::f64::consts::SQRT_2 / 4.0 - 30f64.sqrt() / 16.0;
        let b = std::f64::consts::SQRT_2 / 16.0;
        let c = std::f64::consts::SQRT_2 / 4.0 + 30f64.sqrt() / 16.0;
        FilterBank::from_lowpass("farras", vec![0.0, 0.0, a, a, -b, b, c, c, b, -b])
            .expect("farras bank is orthonormal")
    }

    /// Build a bank from lowpass taps, verifying perfect reconstruction
    /// (orthonormality of the lowpass at even shifts) to 1e-10.
    pub fn from_lowpass(name: &'static str, lowpass: Vec<f64>) -> Result<FilterBank> {
        let l = lowpass.len();
        if l < 2 || l % 2 != 0 {
            return Err(Error::InvalidParams(
                "filter length must be even and >= 2".into(),
            ));
        }
        for k in 0..l / 2 {
            let ac: f64 = (0..l - 2 * k).map(|n| lowpass[n] * lowpass[n + 2 * k]).sum();
            let target = if k == 0 { 1.0 } else { 0.0 };
            if (ac - target).abs() > 1e-10 {
                return Err(Error::InvalidParams(format!(
                    "filter bank fails perfect reconstruction: autocorrelation at shift {} is {}",
                    2 * k,
                    ac
                )));
            }
        }
        let highpass = (0..l)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * lowpass[l - 1 - n])
            .collect();
        Ok(FilterBank {
            name,
            lowpass,
            highpass,
        })
    }

    pub fn name(&self) -> &str {
        self.name
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }
}

impl Default for FilterBank {
    fn default() -> Self {
        FilterBank::farras()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveletDenoiseParams {
    /// Decomposition depth.
    pub levels: usize,
    /// Half-width of the local variance window; the window covers
    /// `(2*half_width + 1)^2` coefficients.
    pub neighborhood_half_width: usize,
    /// Analysis filter pair (not config-serialized; always a named bank).
    #[serde(skip, default)]
    pub filter_bank: FilterBank,
}

impl Default for WaveletDenoiseParams {
    fn default() -> Self {
        WaveletDenoiseParams {
            levels: 3,
            neighborhood_half_width: 3,
            filter_bank: FilterBank::farras(),
        }
    }
}

/// One square subband of coefficients.
#[derive(Debug, Clone)]
pub struct Subband {
    pub side: usize,
    pub data: Vec<f64>,
}

impl Subband {
    fn zeros(side: usize) -> Subband {
        Subband {
            side,
            data: vec![0.0; side * side],
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.side + x]
    }
}

/// Detail bands of one decomposition level. `lh` is horizontal-detail
/// (highpass along x), `hl` vertical-detail, `hh` diagonal.
#[derive(Debug, Clone)]
pub struct DetailBands {
    pub lh: Subband,
    pub hl: Subband,
    pub hh: Subband,
}

/// Full multiscale decomposition: detail bands from finest (index 0) to
/// coarsest, plus the final lowpass residual.
#[derive(Debug, Clone)]
pub struct WaveletPyramid {
    pub levels: Vec<DetailBands>,
    pub lowpass: Subband,
    pub side: usize,
}

/// Circular-convolution analysis of one row/column into half-length
/// lowpass and highpass sequences: `out[k] = sum_m h[m] x[(m + 2k) % n]`.
fn analyze_1d(bank: &FilterBank, x: &[f64], lo: &mut [f64], hi: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    let taps = bank.lowpass.len();
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for m in 0..taps {
            let v = x[(m + 2 * k) % n];
            a += bank.lowpass[m] * v;
            d += bank.highpass[m] * v;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

/// Adjoint of [`analyze_1d`]: `x[n] += sum_k lo[k] h0[(n - 2k) % n] + ..`.
fn synthesize_1d(bank: &FilterBank, lo: &[f64], hi: &[f64], x: &mut [f64]) {
    let n = x.len();
    let taps = bank.lowpass.len();
    for v in x.iter_mut() {
        *v = 0.0;
    }
    for k in 0..lo.len() {
        for m in 0..taps {
            let idx = (m + 2 * k) % n;
            x[idx] += bank.lowpass[m] * lo[k] + bank.highpass[m] * hi[k];
        }
    }
}

/// One separable analysis step on a `side`-square buffer, producing four
/// half-side subbands (returned as ll, lh, hl, hh).
fn analyze_2d(bank: &FilterBank, side: usize, data: &[f64]) -> (Subband, Subband, Subband, Subband) {
    let half = side / 2;
    // rows: split into x-lowpass and x-highpass halves
    let mut row_lo = vec![0.0; half * side];
    let mut row_hi = vec![0.0; half * side];
    let mut lo = vec![0.0; half];
    let mut hi = vec![0.0; half];
    for y in 0..side {
        analyze_1d(bank, &data[y * side..(y + 1) * side], &mut lo, &mut hi);
        for x in 0..half {
            row_lo[y * half + x] = lo[x];
            row_hi[y * half + x] = hi[x];
        }
    }
    // columns of each half
    let mut ll = Subband::zeros(half);
    let mut lh = Subband::zeros(half);
    let mut hl = Subband::zeros(half);
    let mut hh = Subband::zeros(half);
    let mut col = vec![0.0; side];
    for x in 0..half {
        for y in 0..side {
            col[y] = row_lo[y * half + x];
        }
        analyze_1d(bank, &col, &mut lo, &mut hi);
        for y in 0..half {
            ll.data[y * half + x] = lo[y];
            hl.data[y * half + x] = hi[y];
        }
        for y in 0..side {
            col[y] = row_hi[y * half + x];
        }
        analyze_1d(bank, &col, &mut lo, &mut hi);
        for y in 0..half {
            lh.data[y * half + x] = lo[y];
            hh.data[y * half + x] = hi[y];
        }
    }
    (ll, lh, hl, hh)
}

fn synthesize_2d(
    bank: &FilterBank,
    ll: &Subband,
    lh: &Subband,
    hl: &Subband,
    hh: &Subband,
) -> Vec<f64> {
    let half = ll.side;
    let side = half * 2;
    // columns first (inverse of the analysis order)
    let mut row_lo = vec![0.0; half * side];
    let mut row_hi = vec![0.0; half * side];
    let mut lo = vec![0.0; half];
    let mut hi = vec![0.0; half];
    let mut col = vec![0.0; side];
    for x in 0..half {
        for y in 0..half {
            lo[y] = ll.data[y * half + x];
            hi[y] = hl.data[y * half + x];
        }
        synthesize_1d(bank, &lo, &hi, &mut col);
        for y in 0..side {
            row_lo[y * half + x] = col[y];
        }
        for y in 0..half {
            lo[y] = lh.data[y * half + x];
            hi[y] = hh.data[y * half + x];
        }
        synthesize_1d(bank, &lo, &hi, &mut col);
        for y in 0..side {
            row_hi[y * half + x] = col[y];
        }
    }
    let mut out = vec![0.0; side * side];
    let mut row = vec![0.0; side];
    for y in 0..side {
        let lo_row = &row_lo[y * half..(y + 1) * half];
        let hi_row = &row_hi[y * half..(y + 1) * half];
        synthesize_1d(bank, lo_row, hi_row, &mut row);
        out[y * side..(y + 1) * side].copy_from_slice(&row);
    }
    out
}

/// Multiscale analysis of a square power-of-two gray image.
pub fn dwt2(img: &RasterImage, params: &WaveletDenoiseParams) -> Result<WaveletPyramid> {
    img.expect_gray()?;
    let side = img.width();
    if img.height() != side || !side.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "dwt2 needs a power-of-two square, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    if params.levels == 0 {
        return Err(Error::InvalidParams("levels must be >= 1".into()));
    }
    if side >> params.levels == 0 || side % (1 << params.levels) != 0 {
        return Err(Error::InvalidParams(format!(
            "side {} not divisible by 2^{}",
            side, params.levels
        )));
    }
    let mut levels = Vec::with_capacity(params.levels);
    let mut current = img.data().to_vec();
    let mut cur_side = side;
    let mut ll_final = Subband::zeros(cur_side);
    for _ in 0..params.levels {
        let (ll, lh, hl, hh) = analyze_2d(&params.filter_bank, cur_side, &current);
        levels.push(DetailBands { lh, hl, hh });
        cur_side /= 2;
        current = ll.data.clone();
        ll_final = ll;
    }
    Ok(WaveletPyramid {
        levels,
        lowpass: ll_final,
        side,
    })
}

/// Exact inverse of [`dwt2`].
pub fn idwt2(pyr: &WaveletPyramid, params: &WaveletDenoiseParams) -> Result<RasterImage> {
    let mut current = pyr.lowpass.clone();
    for bands in pyr.levels.iter().rev() {
        if bands.lh.side != current.side {
            return Err(Error::DimensionMismatch(
                "pyramid level sides are inconsistent".into(),
            ));
        }
        let data = synthesize_2d(&params.filter_bank, &current, &bands.lh, &bands.hl, &bands.hh);
        current = Subband {
            side: current.side * 2,
            data,
        };
    }
    RasterImage::from_vec(pyr.side, pyr.side, Colorspace::Gray, current.data)
}

/// Median-absolute-deviation noise estimate from the finest diagonal band:
/// `median(|HH1|) / 0.6745`.
pub fn estimate_noise_sigma(pyr: &WaveletPyramid) -> f64 {
    let hh = &pyr.levels[0].hh;
    let mut mags: Vec<f64> = hh.data.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = mags.len();
    let median = if n % 2 == 1 {
        mags[n / 2]
    } else {
        0.5 * (mags[n / 2 - 1] + mags[n / 2])
    };
    median / 0.6745
}

/// Bivariate shrinkage of one detail band given its parent band (or `None`
/// at the coarsest level, where the parent term vanishes).
fn shrink_band(band: &Subband, parent: Option<&Subband>, sigma_n: f64, half_width: usize) -> Subband {
    let side = band.side;
    let hw = half_width as isize;
    let mut out = Subband::zeros(side);
    for y in 0..side {
        for x in 0..side {
            let y1 = band.at(x, y);
            // local mean square over the truncated neighborhood
            let mut sum2 = 0.0;
            let mut count = 0usize;
            for dy in -hw..=hw {
                let yy = y as isize + dy;
                if yy < 0 || yy >= side as isize {
                    continue;
                }
                for dx in -hw..=hw {
                    let xx = x as isize + dx;
                    if xx < 0 || xx >= side as isize {
                        continue;
                    }
                    let v = band.at(xx as usize, yy as usize);
                    sum2 += v * v;
                    count += 1;
                }
            }
            let sigma_y2 = sum2 / count as f64;
            let sigma = (sigma_y2 - sigma_n * sigma_n).max(0.0).sqrt();
            if sigma == 0.0 {
                continue; // coefficient forced to 0
            }
            let y2 = parent.map_or(0.0, |p| p.at(x / 2, y / 2));
            let r = (y1 * y1 + y2 * y2).sqrt();
            if r == 0.0 {
                continue;
            }
            let shrink = (r - 3f64.sqrt() * sigma_n * sigma_n / sigma).max(0.0) / r;
            out.data[y * side + x] = y1 * shrink;
        }
    }
    out
}

/// Denoise a square power-of-two gray image by bivariate shrinkage of its
/// wavelet detail coefficients (the lowpass residual passes through).
pub fn wavelet_denoise(img: &RasterImage, params: &WaveletDenoiseParams) -> Result<RasterImage> {
    let pyr = dwt2(img, params)?;
    let sigma_n = estimate_noise_sigma(&pyr);
    let mut shrunk = pyr.clone();
    for l in 0..pyr.levels.len() {
        let parent = pyr.levels.get(l + 1);
        shrunk.levels[l].lh = shrink_band(
            &pyr.levels[l].lh,
            parent.map(|p| &p.lh),
            sigma_n,
            params.neighborhood_half_width,
        );
        shrunk.levels[l].hl = shrink_band(
            &pyr.levels[l].hl,
            parent.map(|p| &p.hl),
            sigma_n,
            params.neighborhood_half_width,
        );
        shrunk.levels[l].hh = shrink_band(
            &pyr.levels[l].hh,
            parent.map(|p| &p.hh),
            sigma_n,
            params.neighborhood_half_width,
        );
    }
    idwt2(&shrunk, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_gray(side: usize, seed: u64) -> RasterImage {
        let mut state = seed | 1;
        RasterImage::gray_from_fn(side, side, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        })
    }

    #[test]
    fn farras_bank_passes_construction_check() {
        let bank = FilterBank::farras();
        assert_eq!(bank.lowpass().len(), 10);
        let sum: f64 = bank.lowpass().iter().sum();
        assert!((sum - std::f64::consts::SQRT_2).abs() < 1e-12);
        let hsum: f64 = bank.highpass().iter().sum();
        assert!(hsum.abs() < 1e-12);
    }

    #[test]
    fn transcription_errors_are_caught() {
        let mut taps = FilterBank::farras().lowpass().to_vec();
        taps[4] += 1e-4;
        assert!(FilterBank::from_lowpass("broken", taps).is_err());
    }

    #[test]
    fn constant_image_has_vanishing_details() {
        let img = RasterImage::gray_from_fn(64, 64, |_, _| 0.42);
        let p = WaveletDenoiseParams::default();
        let pyr = dwt2(&img, &p).unwrap();
        for bands in &pyr.levels {
            for band in [&bands.lh, &bands.hl, &bands.hh] {
                for &v in &band.data {
                    assert!(v.abs() <= 1e-10, "detail coefficient {v}");
                }
            }
        }
        let energy_pixels: f64 = img.data().iter().map(|v| v * v).sum();
        let energy_ll: f64 = pyr.lowpass.data.iter().map(|v| v * v).sum();
        assert!((energy_ll - energy_pixels).abs() / energy_pixels < 1e-10);
    }

    #[test]
    fn perfect_reconstruction_on_random_image() {
        let img = random_gray(64, 99);
        let p = WaveletDenoiseParams::default();
        let pyr = dwt2(&img, &p).unwrap();
        let back = idwt2(&pyr, &p).unwrap();
        let max_err = img
            .data()
            .iter()
            .zip(back.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err <= 1e-8, "max reconstruction error {max_err}");
    }

    #[test]
    fn parseval_energy_is_preserved() {
        let img = random_gray(64, 123);
        let p = WaveletDenoiseParams::default();
        let pyr = dwt2(&img, &p).unwrap();
        let mut coeff_energy: f64 = pyr.lowpass.data.iter().map(|v| v * v).sum();
        for bands in &pyr.levels {
            for band in [&bands.lh, &bands.hl, &bands.hh] {
                coeff_energy += band.data.iter().map(|v| v * v).sum::<f64>();
            }
        }
        let pixel_energy: f64 = img.data().iter().map(|v| v * v).sum();
        assert!(
            (coeff_energy - pixel_energy).abs() / pixel_energy < 1e-6,
            "coeff {coeff_energy} vs pixel {pixel_energy}"
        );
    }

    #[test]
    fn rejects_excess_levels() {
        let img = RasterImage::new_gray(8, 8);
        let p = WaveletDenoiseParams {
            levels: 4,
            ..WaveletDenoiseParams::default()
        };
        assert!(dwt2(&img, &p).is_err());
    }

    #[test]
    fn rejects_non_square() {
        let img = RasterImage::new_gray(8, 16);
        assert!(dwt2(&img, &WaveletDenoiseParams::default()).is_err());
    }

    #[test]
    fn noise_sigma_estimator_on_pure_noise() {
        let img = crate::synth::gaussian_noise_image(256, 256, 0.0, 0.1, 5);
        let pyr = dwt2(&img, &WaveletDenoiseParams::default()).unwrap();
        let sigma = estimate_noise_sigma(&pyr);
        assert!(
            (0.08..=0.12).contains(&sigma),
            "sigma estimate {sigma} outside [0.08, 0.12]"
        );
    }

    #[test]
    fn denoise_is_no_op_on_constant_image() {
        let img = RasterImage::gray_from_fn(64, 64, |_, _| 0.3);
        let out = wavelet_denoise(&img, &WaveletDenoiseParams::default()).unwrap();
        for (a, b) in img.data().iter().zip(out.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn denoising_strictly_helps_on_noisy_texture() {
        let clean = crate::synth::value_noise(128, 128, 4, 0.7, 21);
        let noise = crate::synth::gaussian_noise_image(128, 128, 0.0, 0.05, 22);
        let noisy = RasterImage::gray_from_fn(128, 128, |x, y| clean.at(x, y) + noise.at(x, y));
        let out = wavelet_denoise(&noisy, &WaveletDenoiseParams::default()).unwrap();
        let mse = |a: &RasterImage, b: &RasterImage| -> f64 {
            a.data()
                .iter()
                .zip(b.data())
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                / a.data().len() as f64
        };
        let before = mse(&noisy, &clean);
        let after = mse(&out, &clean);
        assert!(after < before, "mse before {before}, after {after}");
    }
}
