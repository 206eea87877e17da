//! Symmetric extension to a power-of-two square and its exact inverse.
//!
//! Padding uses half-sample symmetric reflection (the boundary handling
//! conventional for even-length wavelet filters): the sequence
//! `x0 x1 .. x(n-1)` continues as `x(n-1) x(n-2) ..`, period `2n`.

use super::RasterImage;
use crate::{Error, Result};

/// Remembers the original dimensions so extension can be undone exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionRecord {
    pub original_width: usize,
    pub original_height: usize,
    /// Side of the padded square; a power of two, >= both original dims.
    pub padded_size: usize,
}

/// Half-sample symmetric reflection of index `i` into `[0, n)`.
#[inline]
fn reflect(i: usize, n: usize) -> usize {
    let m = i % (2 * n);
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Pad an image to the smallest power-of-two square that holds it, anchored
/// at the origin, filling the margin by half-sample mirror reflection.
pub fn symmetric_extend(img: &RasterImage) -> (RasterImage, ExtensionRecord) {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let side = max_pow2_side(w, h);
    let rec = ExtensionRecord {
        original_width: w,
        original_height: h,
        padded_size: side,
    };
    if side == w && side == h {
        return (img.clone(), rec);
    }
    let mut data = Vec::with_capacity(side * side * ch);
    for y in 0..side {
        let sy = reflect(y, h);
        for x in 0..side {
            let sx = reflect(x, w);
            for c in 0..ch {
                data.push(img.get(sx, sy, c));
            }
        }
    }
    let out = RasterImage::from_vec(side, side, img.colorspace(), data)
        .expect("reflection preserves finiteness");
    (out, rec)
}

/// Undo [`symmetric_extend`]: crop the original-size sub-image at the origin.
pub fn crop_extension(img: &RasterImage, rec: &ExtensionRecord) -> Result<RasterImage> {
    if img.width() != rec.padded_size || img.height() != rec.padded_size {
        return Err(Error::DimensionMismatch(format!(
            "expected {0}x{0} padded image, got {1}x{2}",
            rec.padded_size,
            img.width(),
            img.height()
        )));
    }
    let (w, h, ch) = (rec.original_width, rec.original_height, img.channels());
    let mut data = Vec::with_capacity(w * h * ch);
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                data.push(img.get(x, y, c));
            }
        }
    }
    RasterImage::from_vec(w, h, img.colorspace(), data)
}

fn max_pow2_side(w: usize, h: usize) -> usize {
    w.max(h).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Colorspace;

    #[test]
    fn already_pow2_square_is_identity() {
        let img = RasterImage::gray_from_fn(256, 256, |x, y| ((x * y) % 7) as f64 / 7.0);
        let (ext, rec) = symmetric_extend(&img);
        assert_eq!(ext, img);
        assert_eq!(rec.padded_size, 256);
        let back = crop_extension(&ext, &rec).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn three_by_two_reflection_layout() {
        // 3 wide x 2 high -> 4x4. Half-sample reflection:
        // columns map 0,1,2,2 and rows map 0,1,1,0.
        let img =
            RasterImage::from_vec(3, 2, Colorspace::Gray, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
                .unwrap();
        let (ext, rec) = symmetric_extend(&img);
        assert_eq!(rec.padded_size, 4);
        let expect = [
            [1.0, 2.0, 3.0, 3.0],
            [4.0, 5.0, 6.0, 6.0],
            [4.0, 5.0, 6.0, 6.0],
            [1.0, 2.0, 3.0, 3.0],
        ];
        for (y, row) in expect.iter().enumerate() {
            for (x, &v) in row.iter().enumerate() {
                assert_eq!(ext.at(x, y), v, "mismatch at ({x},{y})");
            }
        }
    }

    #[test]
    fn crop_inverts_extend_exactly() {
        let img = RasterImage::gray_from_fn(37, 21, |x, y| {
            ((x * 131 + y * 17) % 255) as f64 / 255.0
        });
        let (ext, rec) = symmetric_extend(&img);
        assert_eq!(ext.width(), 64);
        let back = crop_extension(&ext, &rec).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn no_new_extrema() {
        let img = RasterImage::gray_from_fn(13, 9, |x, y| ((x * 7 + y * 3) % 11) as f64);
        let (ext, _) = symmetric_extend(&img);
        assert_eq!(img.min_max(), ext.min_max());
    }

    #[test]
    fn crop_rejects_wrong_size() {
        let img = RasterImage::new_gray(8, 8);
        let rec = ExtensionRecord {
            original_width: 3,
            original_height: 3,
            padded_size: 4,
        };
        assert!(crop_extension(&img, &rec).is_err());
    }
}
