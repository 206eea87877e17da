//! RGB <-> YCbCr conversion (full-range BT.601 analog form: Y in [0,1],
//! Cb/Cr centered at 0.5). Forward and inverse are built from the same
//! luma weights so they are mutual inverses to f64 rounding.

use super::{Colorspace, RasterImage};
use crate::Result;

const KR: f64 = 0.299;
const KG: f64 = 0.587;
const KB: f64 = 0.114;

/// Convert an RGB image to YCbCr. Channel 0 of the result is luminance.
pub fn rgb_to_ycbcr(img: &RasterImage) -> Result<RasterImage> {
    img.expect_colorspace(Colorspace::Rgb)?;
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        let (r, g, b) = (px[0], px[1], px[2]);
        let y = KR * r + KG * g + KB * b;
        let cb = (b - y) / (2.0 * (1.0 - KB)) + 0.5;
        let cr = (r - y) / (2.0 * (1.0 - KR)) + 0.5;
        px[0] = y;
        px[1] = cb;
        px[2] = cr;
    }
    Ok(out.with_colorspace(Colorspace::YCbCr))
}

/// Inverse of [`rgb_to_ycbcr`].
pub fn ycbcr_to_rgb(img: &RasterImage) -> Result<RasterImage> {
    img.expect_colorspace(Colorspace::YCbCr)?;
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        let (y, cb, cr) = (px[0], px[1], px[2]);
        let r = y + 2.0 * (1.0 - KR) * (cr - 0.5);
        let b = y + 2.0 * (1.0 - KB) * (cb - 0.5);
        let g = (y - KR * r - KB * b) / KG;
        px[0] = r;
        px[1] = g;
        px[2] = b;
    }
    Ok(out.with_colorspace(Colorspace::Rgb))
}
