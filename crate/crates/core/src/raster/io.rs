//! Image file I/O: 8-bit PNG and binary PPM (P6) / PGM (P5) for pictures,
//! PFM (little-endian, scale -1.0) for lossless grayscale float maps, and
//! 16-bit PGM for disparity labels.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use super::{Colorspace, RasterImage};
use crate::{Error, Result};

/// Load a PNG, PPM/PGM or PFM file, detected by magic bytes.
/// 8-bit integer formats are scaled to `[0, 1]`.
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match bytes.as_slice() {
        [0x89, b'P', b'N', b'G', ..] => load_png(path, &bytes),
        [b'P', b'5', ..] | [b'P', b'6', ..] => load_pnm(path, &bytes),
        [b'P', b'f', ..] => parse_pfm(path, &bytes),
        _ => Err(Error::UnsupportedFormat(format!(
            "{}: not a PNG, PPM/PGM or PFM file",
            path.display()
        ))),
    }
}

/// Save to PNG, PPM/PGM or PFM, selected by file extension
/// (`.png`, `.ppm`, `.pgm`, `.pfm`). Integer formats clamp to `[0, 1]`
/// and quantize to 8 bits.
pub fn save_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "png" => save_png(img, path),
        "ppm" => save_ppm(img, path),
        "pgm" => save_pgm8(img, path),
        "pfm" => save_pfm(img, path),
        other => Err(Error::UnsupportedFormat(format!(
            "cannot infer format from extension {other:?}"
        ))),
    }
}

fn load_png(path: &Path, bytes: &[u8]) -> Result<RasterImage> {
    let dynimg = image::load_from_memory(bytes)
        .map_err(|e| Error::InvalidImage(format!("{}: {e}", path.display())))?;
    use image::DynamicImage::*;
    match dynimg {
        ImageLuma8(g) => {
            let (w, h) = (g.width() as usize, g.height() as usize);
            let data = g.as_raw().iter().map(|&v| v as f64 / 255.0).collect();
            RasterImage::from_vec(w, h, Colorspace::Gray, data)
        }
        other => {
            let rgb = other.to_rgb8();
            let (w, h) = (rgb.width() as usize, rgb.height() as usize);
            let data = rgb.as_raw().iter().map(|&v| v as f64 / 255.0).collect();
            RasterImage::from_vec(w, h, Colorspace::Rgb, data)
        }
    }
}

fn save_png(img: &RasterImage, path: &Path) -> Result<()> {
    let w = img.width() as u32;
    let h = img.height() as u32;
    let quant = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    let result = if img.channels() == 1 {
        let buf: Vec<u8> = img.data().iter().map(|&v| quant(v)).collect();
        image::GrayImage::from_raw(w, h, buf)
            .expect("buffer sized from image")
            .save_with_format(path, image::ImageFormat::Png)
    } else {
        let buf: Vec<u8> = img.data().iter().map(|&v| quant(v)).collect();
        image::RgbImage::from_raw(w, h, buf)
            .expect("buffer sized from image")
            .save_with_format(path, image::ImageFormat::Png)
    };
    result.map_err(|e| Error::InvalidImage(format!("{}: {e}", path.display())))
}

/// Parse a binary PNM header, returning (maxval, data offset) after
/// `expect_fields` whitespace-separated fields (width, height, maxval).
fn parse_pnm_header(bytes: &[u8]) -> Option<(usize, usize, usize, usize)> {
    let mut fields = Vec::new();
    let mut i = 2; // skip magic
    while fields.len() < 3 && i < bytes.len() {
        // skip whitespace and comments
        while i < bytes.len() {
            if bytes[i].is_ascii_whitespace() {
                i += 1;
            } else if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                break;
            }
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..i]).ok()?.parse().ok()?);
    }
    if fields.len() < 3 || i >= bytes.len() || !bytes[i].is_ascii_whitespace() {
        return None;
    }
    Some((fields[0], fields[1], fields[2], i + 1))
}

fn load_pnm(path: &Path, bytes: &[u8]) -> Result<RasterImage> {
    let channels = if bytes[1] == b'6' { 3 } else { 1 };
    let (w, h, maxval, offset) = parse_pnm_header(bytes)
        .ok_or_else(|| Error::InvalidImage(format!("{}: bad PNM header", path.display())))?;
    if w == 0 || h == 0 {
        return Err(Error::InvalidImage(format!(
            "{}: zero-dimension image",
            path.display()
        )));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "{}: only maxval 255 PNM supported, got {maxval}",
            path.display()
        )));
    }
    let need = w * h * channels;
    let raw = bytes
        .get(offset..offset + need)
        .ok_or_else(|| Error::InvalidImage(format!("{}: truncated PNM data", path.display())))?;
    let data = raw.iter().map(|&v| v as f64 / 255.0).collect();
    let cs = if channels == 3 {
        Colorspace::Rgb
    } else {
        Colorspace::Gray
    };
    RasterImage::from_vec(w, h, cs, data)
}

fn save_ppm(img: &RasterImage, path: &Path) -> Result<()> {
    let rgb = match img.channels() {
        3 => img.clone(),
        _ => {
            return Err(Error::WrongColorspace {
                expected: Colorspace::Rgb,
                got: img.colorspace(),
            })
        }
    };
    let mut out = format!("P6\n{} {}\n255\n", rgb.width(), rgb.height()).into_bytes();
    out.extend(
        rgb.data()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn save_pgm8(img: &RasterImage, path: &Path) -> Result<()> {
    img.expect_gray()?;
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(
        img.data()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Write a 16-bit binary PGM (maxval 65535, big-endian samples).
/// Values are given directly as integers; callers handle any offset scheme.
pub fn save_pgm16(values: &[u16], width: usize, height: usize, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    assert_eq!(values.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for v in values {
        out.extend_from_slice(&v.to_be_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Write a grayscale float map as PFM (little-endian, scale -1.0).
/// Rows are stored bottom-up per the PFM convention.
pub fn save_pfm(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    img.expect_gray()?;
    let mut out = format!("Pf\n{} {}\n-1.0\n", img.width(), img.height()).into_bytes();
    for y in (0..img.height()).rev() {
        for x in 0..img.width() {
            out.extend_from_slice(&(img.at(x, y) as f32).to_le_bytes());
        }
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}

/// Read a grayscale PFM written by [`save_pfm`] (or any scanline PFM).
pub fn load_pfm(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pfm(path, &bytes)
}

fn parse_pfm(path: &Path, bytes: &[u8]) -> Result<RasterImage> {
    let bad = |m: &str| Error::InvalidImage(format!("{}: {m}", path.display()));
    if !bytes.starts_with(b"Pf") {
        return Err(bad("only grayscale (Pf) PFM supported"));
    }
    // Three whitespace-separated tokens follow the magic: width, height, scale.
    let mut i = 2;
    let mut tokens: Vec<String> = Vec::new();
    while tokens.len() < 3 && i < bytes.len() {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        tokens.push(
            std::str::from_utf8(&bytes[start..i])
                .map_err(|_| bad("bad header"))?
                .to_string(),
        );
    }
    if tokens.len() < 3 || i >= bytes.len() {
        return Err(bad("truncated header"));
    }
    i += 1; // single whitespace byte after the scale
    let w: usize = tokens[0].parse().map_err(|_| bad("bad width"))?;
    let h: usize = tokens[1].parse().map_err(|_| bad("bad height"))?;
    let scale: f64 = tokens[2].parse().map_err(|_| bad("bad scale"))?;
    let little_endian = scale < 0.0;
    let need = w * h * 4;
    let raw = bytes.get(i..i + need).ok_or_else(|| bad("truncated data"))?;
    let mut data = vec![0.0f64; w * h];
    for (k, chunk) in raw.chunks_exact(4).enumerate() {
        let arr = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(arr)
        } else {
            f32::from_be_bytes(arr)
        };
        let y = h - 1 - k / w; // bottom-up rows
        let x = k % w;
        data[y * w + x] = v as f64;
    }
    RasterImage::from_vec(w, h, Colorspace::Gray, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_bytes_scale_to_unit_range() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.pgm");
        fs::write(&p, [b"P5\n2 2\n255\n".as_slice(), &[0, 255, 128, 64]].concat()).unwrap();
        let img = load_image(&p).unwrap();
        assert_eq!(img.colorspace(), Colorspace::Gray);
        assert_eq!(img.data(), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn white_ppm_pixel() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.ppm");
        fs::write(&p, [b"P6\n1 1\n255\n".as_slice(), &[255, 255, 255]].concat()).unwrap();
        let img = load_image(&p).unwrap();
        assert_eq!(img.colorspace(), Colorspace::Rgb);
        assert_eq!(img.data(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn png_roundtrip_within_one_step() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.png");
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 40) as f64 / (1u64 << 24) as f64
        };
        let img = RasterImage::rgb_from_fn(16, 16, |_, _| [next(), next(), next()]);
        save_image(&img, &p).unwrap();
        let back = load_image(&p).unwrap();
        assert_eq!(back.width(), 16);
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 1.0 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn ppm_roundtrip_within_one_step() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.ppm");
        let img = RasterImage::rgb_from_fn(16, 16, |x, y| {
            [
                (x as f64) / 15.0,
                (y as f64) / 15.0,
                ((x + y) as f64) / 30.0,
            ]
        });
        save_image(&img, &p).unwrap();
        let back = load_image(&p).unwrap();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 1.0 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn pfm_roundtrip_is_f32_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.pfm");
        let img = RasterImage::gray_from_fn(7, 5, |x, y| (x as f64 - 2.5) * 0.311 + y as f64);
        save_pfm(&img, &p).unwrap();
        let back = load_pfm(&p).unwrap();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert_eq!(*a as f32, *b as f32);
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_image("/nonexistent/nope.png"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn garbage_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.bin");
        fs::write(&p, b"not an image at all").unwrap();
        assert!(matches!(
            load_image(&p),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn zero_dimension_pnm_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("z.pgm");
        fs::write(&p, b"P5\n0 4\n255\n").unwrap();
        assert!(load_image(&p).is_err());
    }
}
