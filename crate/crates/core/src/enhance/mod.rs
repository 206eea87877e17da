//! Nine-step preprocessing chain turning a degraded underwater-style frame
//! into a contrast-corrected, denoised, color-balanced image: moire removal,
//! symmetric extension, YCbCr conversion, homomorphic filtering, wavelet
//! denoising, anisotropic diffusion, intensity adjustment, color conversion
//! back with cropping, and color-mean equalization.

mod diffusion;
mod homomorphic;
mod intensity;
mod moire;
mod wavelet;

pub use diffusion::{anisotropic_diffuse, DiffusionParams};
pub use homomorphic::{homomorphic_filter, HomomorphicParams};
pub use intensity::{adjust_intensity, equalize_color_means, IntensityAdjustParams};
pub use moire::{remove_moire, MoireParams};
pub use wavelet::{dwt2, idwt2, wavelet_denoise, FilterBank, WaveletDenoiseParams, WaveletPyramid};

use crate::raster::{crop_extension, rgb_to_ycbcr, symmetric_extend, ycbcr_to_rgb, RasterImage};
use crate::Result;
use serde::{Deserialize, Serialize};

/// Parameters for the full preprocessing chain. Defaults follow the
/// pipeline's standard settings; every stage can be overridden.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct EnhanceParams {
    pub moire: MoireParams,
    pub homomorphic: HomomorphicParams,
    pub wavelet: WaveletDenoiseParams,
    pub diffusion: DiffusionParams,
    pub intensity: IntensityAdjustParams,
}

/// Run the whole chain on an RGB image. Output has the input's dimensions.
///
/// The luminance-only stages run on the Y channel of the symmetrically
/// extended image; moire removal runs per RGB channel before extension.
/// On images too small for the configured wavelet depth the decomposition
/// depth is reduced to fit (skipped entirely for 1x1 paddings).
pub fn preprocess(img: &RasterImage, params: &EnhanceParams) -> Result<RasterImage> {
    img.expect_colorspace(crate::raster::Colorspace::Rgb)?;

    // (1) moire removal, channel by channel
    let mut rgb = img.clone();
    for c in 0..3 {
        let filtered = remove_moire(&rgb.channel(c), &params.moire)?;
        rgb.set_channel(c, &filtered)?;
    }

    // (2) symmetric extension to a power-of-two square
    let (extended, record) = symmetric_extend(&rgb);

    // (3) RGB -> YCbCr
    let mut ycc = rgb_to_ycbcr(&extended)?;

    // (4-7) luminance-only stages
    let mut luma = ycc.channel(0);
    luma = homomorphic_filter(&luma, &params.homomorphic)?;
    let side = luma.width();
    let max_levels = side.trailing_zeros() as usize;
    if max_levels >= 1 {
        let mut wp = params.wavelet.clone();
        wp.levels = wp.levels.min(max_levels);
        luma = wavelet_denoise(&luma, &wp)?;
    }
    luma = anisotropic_diffuse(&luma, &params.diffusion)?;
    luma = adjust_intensity(&luma, &params.intensity)?;
    ycc.set_channel(0, &luma)?;

    // (8) back to RGB, cut away the extension
    let rgb_full = ycbcr_to_rgb(&ycc)?;
    let mut cropped = crop_extension(&rgb_full, &record)?;
    cropped.clamp01();

    // (9) equalize channel means
    let out = equalize_color_means(&cropped)?;
    out.check_finite()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Colorspace;

    #[test]
    fn dimensions_preserved_odd_sizes() {
        for (w, h) in [(5, 3), (17, 9), (33, 64), (1, 1), (2, 7)] {
            let img = RasterImage::rgb_from_fn(w, h, |x, y| {
                let v = ((x * 13 + y * 7) % 10) as f64 / 10.0;
                [v, 1.0 - v, 0.5]
            });
            let out = preprocess(&img, &EnhanceParams::default()).unwrap();
            assert_eq!((out.width(), out.height()), (w, h));
            assert_eq!(out.colorspace(), Colorspace::Rgb);
        }
    }

    #[test]
    fn deterministic() {
        let img = RasterImage::rgb_from_fn(24, 18, |x, y| {
            let v = ((x * 31 + y * 17) % 23) as f64 / 23.0;
            [v, v * 0.8, v * 0.6 + 0.1]
        });
        let a = preprocess(&img, &EnhanceParams::default()).unwrap();
        let b = preprocess(&img, &EnhanceParams::default()).unwrap();
        assert_eq!(a, b);
    }
}
