//! Moire pattern suppression via spectral peak detection: isolated peaks in
//! the Fourier magnitude (outside a DC guard zone) are knocked down to the
//! local median magnitude.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::fft2::{fft2, ifft2_real, signed_freq};
use crate::raster::RasterImage;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MoireParams {
    /// A bin is a peak when its magnitude exceeds this multiple of the
    /// local median magnitude.
    pub peak_ratio_threshold: f64,
    /// Half-width of the local-median window, in frequency bins.
    pub notch_radius: usize,
    /// Bins within this distance of DC are never touched.
    pub dc_guard_radius: usize,
}

impl Default for MoireParams {
    fn default() -> Self {
        MoireParams {
            peak_ratio_threshold: 8.0,
            notch_radius: 2,
            dc_guard_radius: 8,
        }
    }
}

impl MoireParams {
    fn validate(&self) -> Result<()> {
        if self.peak_ratio_threshold <= 1.0 {
            return Err(Error::InvalidParams(
                "peak_ratio_threshold must be > 1".into(),
            ));
        }
        if self.notch_radius < 1 || self.dc_guard_radius < 1 {
            return Err(Error::InvalidParams("moire radii must be >= 1".into()));
        }
        Ok(())
    }
}

/// Remove periodic (moire-style) interference from a single-channel image.
///
/// If no spectral bin passes the peak test the input is returned unchanged
/// (most frames have no moire and must not pay an FFT round trip error).
pub fn remove_moire(img: &RasterImage, params: &MoireParams) -> Result<RasterImage> {
    img.expect_gray()?;
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    let mut spec = fft2(w, h, img.data());
    let mags: Vec<f64> = spec.iter().map(Complex::norm).collect();

    let guard2 = (params.dc_guard_radius * params.dc_guard_radius) as f64;
    let r = params.notch_radius as isize;
    let mut replacements: Vec<(usize, f64)> = Vec::new();
    for ky in 0..h {
        let fy = signed_freq(ky, h);
        for kx in 0..w {
            let fx = signed_freq(kx, w);
            if fx * fx + fy * fy <= guard2 {
                continue;
            }
            let m = mags[ky * w + kx];
            if m == 0.0 {
                continue;
            }
            let med = local_median(&mags, w, h, kx, ky, r);
            if m > params.peak_ratio_threshold * med {
                replacements.push((ky * w + kx, med));
            }
        }
    }

    if replacements.is_empty() {
        return Ok(img.clone());
    }

    // Conjugate-symmetric bins have equal magnitude, so the scan flags both
    // members of each pair; make that explicit for robustness to ties.
    let mut all = replacements.clone();
    for &(idx, med) in &replacements {
        let kx = idx % w;
        let ky = idx / w;
        let cx = (w - kx) % w;
        let cy = (h - ky) % h;
        all.push((cy * w + cx, med));
    }
    for (idx, med) in all {
        let m = spec[idx].norm();
        if m > 0.0 {
            spec[idx] *= med / m;
        }
    }

    let data = ifft2_real(w, h, spec);
    RasterImage::from_vec(w, h, crate::raster::Colorspace::Gray, data)
}

/// Median magnitude over the `(2r+1)^2` window around a bin, with
/// periodic wrap in frequency space.
fn local_median(mags: &[f64], w: usize, h: usize, kx: usize, ky: usize, r: isize) -> f64 {
    let mut vals = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for dy in -r..=r {
        for dx in -r..=r {
            let x = (kx as isize + dx).rem_euclid(w as isize) as usize;
            let y = (ky as isize + dy).rem_euclid(h as isize) as usize;
            vals.push(mags[y * w + x]);
        }
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals[vals.len() / 2]
}
