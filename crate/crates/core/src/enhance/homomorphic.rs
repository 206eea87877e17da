//! Homomorphic illumination correction: treat the image as the product of a
//! slowly varying illumination field and a reflectance signal, take logs to
//! make the product additive, then reweight the spectrum with an emphasis
//! filter that damps low frequencies and boosts the rest.

use serde::{Deserialize, Serialize};

use crate::fft2::{fft2, ifft2_real, signed_freq};
use crate::raster::RasterImage;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HomomorphicParams {
    /// High-frequency gain (the filter's limit away from DC).
    pub r_high: f64,
    /// Low-frequency gain (the filter's value at DC).
    pub r_low: f64,
    /// Gaussian transition width in frequency bins.
    pub cutoff_sigma: f64,
    /// Floor applied before the logarithm.
    pub epsilon: f64,
}

impl Default for HomomorphicParams {
    fn default() -> Self {
        HomomorphicParams {
            r_high: 2.5,
            r_low: 0.5,
            cutoff_sigma: 32.0,
            epsilon: 1e-4,
        }
    }
}

impl HomomorphicParams {
    fn validate(&self) -> Result<()> {
        if !(self.r_high > self.r_low && self.r_low > 0.0) {
            return Err(Error::InvalidParams("need r_high > r_low > 0".into()));
        }
        if self.cutoff_sigma <= 0.0 || self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(
                "cutoff_sigma and epsilon must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Emphasis filter gain at signed frequency (wx, wy), in bins.
pub fn emphasis_gain(params: &HomomorphicParams, wx: f64, wy: f64) -> f64 {
    let d2 = wx * wx + wy * wy;
    (params.r_high - params.r_low) * (1.0 - (-d2 / (2.0 * params.cutoff_sigma.powi(2))).exp())
        + params.r_low
}

/// Apply the homomorphic filter to a single-channel image.
pub fn homomorphic_filter(img: &RasterImage, params: &HomomorphicParams) -> Result<RasterImage> {
    img.expect_gray()?;
    params.validate()?;
    let (w, h) = (img.width(), img.height());

    let logged: Vec<f64> = img.data().iter().map(|&v| v.max(params.epsilon).ln()).collect();
    let mut spec = fft2(w, h, &logged);
    for ky in 0..h {
        let fy = signed_freq(ky, h);
        for kx in 0..w {
            let fx = signed_freq(kx, w);
            spec[ky * w + kx] *= emphasis_gain(params, fx, fy);
        }
    }
    let filtered = ifft2_real(w, h, spec);
    let data: Vec<f64> = filtered.iter().map(|&v| v.exp()).collect();
    let out = RasterImage::from_vec(w, h, crate::raster::Colorspace::Gray, data)?;
    out.check_finite()?;
    Ok(out)
}
