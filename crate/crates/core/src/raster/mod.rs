//! Planar multi-channel float image, the pixel currency of every stage, plus
//! the geometric raster utilities (symmetric extension, cropping) and file I/O.

mod color;
mod extend;
mod io;

pub use color::{rgb_to_ycbcr, ycbcr_to_rgb};
pub use extend::{crop_extension, symmetric_extend, ExtensionRecord};
pub use io::{load_image, load_pfm, save_image, save_pfm, save_pgm16};

use crate::{Error, Result};

/// Color interpretation of a [`RasterImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Colorspace {
    Rgb,
    YCbCr,
    Gray,
}

/// Row-major planar-free (interleaved) float image.
///
/// Samples are nominally in `[0, 1]` but intermediate filter stages may step
/// outside that range; all samples must stay finite at module boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    colorspace: Colorspace,
    data: Vec<f64>,
}

impl RasterImage {
    /// Build an image from raw interleaved samples, checking the type
    /// invariants (length, channel/colorspace agreement, finiteness).
    pub fn from_vec(
        width: usize,
        height: usize,
        colorspace: Colorspace,
        data: Vec<f64>,
    ) -> Result<Self> {
        let channels = match colorspace {
            Colorspace::Gray => 1,
            Colorspace::Rgb | Colorspace::YCbCr => 3,
        };
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("zero-dimension image".into()));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "data length {} != {}x{}x{}",
                data.len(),
                width,
                height,
                channels
            )));
        }
        let img = RasterImage {
            width,
            height,
            channels,
            colorspace,
            data,
        };
        img.check_finite()?;
        Ok(img)
    }

    /// Zero-filled single-channel image.
    pub fn new_gray(width: usize, height: usize) -> Self {
        RasterImage {
            width,
            height,
            channels: 1,
            colorspace: Colorspace::Gray,
            data: vec![0.0; width * height],
        }
    }

    /// Zero-filled 3-channel RGB image.
    pub fn new_rgb(width: usize, height: usize) -> Self {
        RasterImage {
            width,
            height,
            channels: 3,
            colorspace: Colorspace::Rgb,
            data: vec![0.0; width * height * 3],
        }
    }

    /// Single-channel image computed per pixel.
    pub fn gray_from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        RasterImage {
            width,
            height,
            channels: 1,
            colorspace: Colorspace::Gray,
            data,
        }
    }

    /// RGB image computed per pixel; `f` returns `[r, g, b]`.
    pub fn rgb_from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        RasterImage {
            width,
            height,
            channels: 3,
            colorspace: Colorspace::Rgb,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn colorspace(&self) -> Colorspace {
        self.colorspace
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height && c < self.channels);
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        debug_assert!(x < self.width && y < self.height && c < self.channels);
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// Gray sample accessor; panics (debug) on multi-channel images.
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        debug_assert_eq!(self.channels, 1);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn put(&mut self, x: usize, y: usize, v: f64) {
        debug_assert_eq!(self.channels, 1);
        self.data[y * self.width + x] = v;
    }

    /// Bilinear sample of a gray image at a fractional position.
    /// Coordinates are clamped to the image border.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        debug_assert_eq!(self.channels, 1);
        let xc = x.clamp(0.0, (self.width - 1) as f64);
        let yc = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = xc.floor() as usize;
        let y0 = yc.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = xc - x0 as f64;
        let fy = yc - y0 as f64;
        let top = self.at(x0, y0) * (1.0 - fx) + self.at(x1, y0) * fx;
        let bot = self.at(x0, y1) * (1.0 - fx) + self.at(x1, y1) * fx;
        top * (1.0 - fy) + bot * fy
    }

    /// Extract one channel as a gray image.
    pub fn channel(&self, c: usize) -> RasterImage {
        assert!(c < self.channels);
        let mut data = Vec::with_capacity(self.width * self.height);
        for i in 0..self.width * self.height {
            data.push(self.data[i * self.channels + c]);
        }
        RasterImage {
            width: self.width,
            height: self.height,
            channels: 1,
            colorspace: Colorspace::Gray,
            data,
        }
    }

    /// Replace one channel from a gray image of identical dimensions.
    pub fn set_channel(&mut self, c: usize, src: &RasterImage) -> Result<()> {
        if src.width != self.width || src.height != self.height || src.channels != 1 {
            return Err(Error::DimensionMismatch(format!(
                "channel source {}x{}x{} does not fit {}x{}",
                src.width, src.height, src.channels, self.width, self.height
            )));
        }
        for i in 0..self.width * self.height {
            self.data[i * self.channels + c] = src.data[i];
        }
        Ok(())
    }

    /// Luminance-or-gray view: gray images pass through, RGB is averaged.
    pub fn to_gray(&self) -> RasterImage {
        match self.colorspace {
            Colorspace::Gray => self.clone(),
            _ => {
                let mut data = Vec::with_capacity(self.width * self.height);
                for i in 0..self.width * self.height {
                    let base = i * self.channels;
                    data.push(
                        (self.data[base] + self.data[base + 1] + self.data[base + 2]) / 3.0,
                    );
                }
                RasterImage {
                    width: self.width,
                    height: self.height,
                    channels: 1,
                    colorspace: Colorspace::Gray,
                    data,
                }
            }
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// Mean of one channel.
    pub fn channel_mean(&self, c: usize) -> f64 {
        assert!(c < self.channels);
        let n = self.width * self.height;
        let sum: f64 = (0..n).map(|i| self.data[i * self.channels + c]).sum();
        sum / n as f64
    }

    /// Clamp every sample into `[0, 1]`.
    pub fn clamp01(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 1.0);
        }
    }

    pub(crate) fn with_colorspace(mut self, cs: Colorspace) -> Self {
        assert_eq!(
            self.channels,
            match cs {
                Colorspace::Gray => 1,
                _ => 3,
            }
        );
        self.colorspace = cs;
        self
    }

    /// Module-boundary invariant: every sample finite.
    pub fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidImage("non-finite sample".into()))
        }
    }

    pub(crate) fn expect_colorspace(&self, cs: Colorspace) -> Result<()> {
        if self.colorspace == cs {
            Ok(())
        } else {
            Err(Error::WrongColorspace {
                expected: cs,
                got: self.colorspace,
            })
        }
    }

    pub(crate) fn expect_gray(&self) -> Result<()> {
        self.expect_colorspace(Colorspace::Gray)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_rejects_bad_length() {
        assert!(RasterImage::from_vec(2, 2, Colorspace::Gray, vec![0.0; 3]).is_err());
        assert!(RasterImage::from_vec(2, 2, Colorspace::Rgb, vec![0.0; 4]).is_err());
    }

    #[test]
    fn from_vec_rejects_zero_dims() {
        assert!(RasterImage::from_vec(0, 4, Colorspace::Gray, vec![]).is_err());
    }

    #[test]
    fn from_vec_rejects_nan() {
        assert!(RasterImage::from_vec(1, 1, Colorspace::Gray, vec![f64::NAN]).is_err());
    }

    #[test]
    fn channel_roundtrip() {
        let img = RasterImage::rgb_from_fn(3, 2, |x, y| {
            [x as f64, y as f64, (x + y) as f64]
        });
        let g = img.channel(1);
        assert_eq!(g.at(2, 1), 1.0);
        let mut img2 = img.clone();
        img2.set_channel(1, &g).unwrap();
        assert_eq!(img, img2);
    }

    #[test]
    fn bilinear_integer_positions_exact() {
        let img = RasterImage::gray_from_fn(4, 3, |x, y| (x * 10 + y) as f64);
        assert_eq!(img.sample_bilinear(2.0, 1.0), 21.0);
        assert_eq!(img.sample_bilinear(0.5, 0.0), 5.0);
    }
}
