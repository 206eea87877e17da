//! Seeded synthetic scenes with exact ground truth: procedural textures,
//! stereo pairs generated from known disparity fields or known camera pairs,
//! and the controlled degradations (illumination ramp, noise, color cast)
//! the enhancement chain is meant to undo.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::depth::{CameraRig, DepthMap};
use crate::gcstereo::DisparityMap;
use crate::raster::{Colorspace, RasterImage};
use crate::tiepoints::TiePointSet;
use crate::{Error, Result};

/// Deterministic lattice hash -> [0, 1).
fn lattice(seed: u64, octave: u32, i: i64, j: i64) -> f64 {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(octave as u64 + 1))
        .wrapping_add((i as u64).wrapping_mul(0xBF58476D1CE4E5B9))
        .wrapping_add((j as u64).wrapping_mul(0x94D049BB133111EB));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Multi-octave value noise at a continuous position, in [0, 1].
/// `cell` is the base lattice spacing in pixels.
pub fn value_noise_at(seed: u64, octaves: u32, cell: f64, x: f64, y: f64) -> f64 {
    let mut sum = 0.0;
    let mut amp = 1.0;
    let mut total = 0.0;
    for o in 0..octaves {
        let scale = cell / (1 << o) as f64;
        let u = x / scale;
        let v = y / scale;
        let i = u.floor() as i64;
        let j = v.floor() as i64;
        let fu = smoothstep(u - i as f64);
        let fv = smoothstep(v - j as f64);
        let v00 = lattice(seed, o, i, j);
        let v10 = lattice(seed, o, i + 1, j);
        let v01 = lattice(seed, o, i, j + 1);
        let v11 = lattice(seed, o, i + 1, j + 1);
        let val = v00 * (1.0 - fu) * (1.0 - fv)
            + v10 * fu * (1.0 - fv)
            + v01 * (1.0 - fu) * fv
            + v11 * fu * fv;
        sum += amp * val;
        total += amp;
        amp *= 0.55;
    }
    sum / total
}

/// Seeded procedural texture: gray image with values `0.5 +- contrast/2`.
pub fn value_noise(width: usize, height: usize, octaves: u32, contrast: f64, seed: u64) -> RasterImage {
    RasterImage::gray_from_fn(width, height, |x, y| {
        let v = value_noise_at(seed, octaves, 16.0, x as f64, y as f64);
        (0.5 + contrast * (v - 0.5)).clamp(0.0, 1.0)
    })
}

/// Gray image of seeded Gaussian samples around `mean`.
pub fn gaussian_noise_image(width: usize, height: usize, mean: f64, sigma: f64, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(mean, sigma).expect("finite sigma");
    RasterImage::gray_from_fn(width, height, |_, _| normal.sample(&mut rng))
}

/// Scene families with analytically known geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SceneKind {
    /// Constant integer disparity: the whole texture slides horizontally.
    ShiftedTexture { shift: i32 },
    /// Two fronto-parallel planes split at a vertical boundary;
    /// the right half is the near plane (larger disparity).
    TwoPlane { far_disparity: i32, near_disparity: i32 },
    /// Patch of a sphere seen fronto-parallel; truth is a depth map.
    SpherePatch { radius_m: f64, center_depth_m: f64 },
    /// Textured plane seen by two cameras related by a Y-axis rotation and
    /// a horizontal baseline; truth is a tie-point set and the exact
    /// fundamental matrix.
    RotatedCameraPair {
        rotation_deg: f64,
        baseline_m: f64,
        tie_point_count: usize,
    },
}

/// A scene request: what to render and at what size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticScene {
    #[serde(flatten)]
    pub kind: SceneKind,
    pub width: usize,
    pub height: usize,
}

/// Rendered stereo pair plus every piece of ground truth the scene admits.
#[derive(Debug, Clone)]
pub struct GeneratedScene {
    pub left: RasterImage,
    pub right: RasterImage,
    /// Exact integer disparity of the left image, where defined.
    pub truth_disparity: Option<DisparityMap>,
    /// Exact depth of the left image, where defined.
    pub truth_depth: Option<DepthMap>,
    /// Exact correspondences (rotated_camera_pair only).
    pub tie_points: Option<TiePointSet>,
    /// True fundamental matrix, row-major (rotated_camera_pair only).
    pub fundamental: Option<[[f64; 3]; 3]>,
    /// Camera rig consistent with the rendered geometry.
    pub rig: CameraRig,
}

/// Map a gray texture value to a slightly colored RGB pixel so every channel
/// carries the texture (keeps matching well-posed after color processing).
fn colorize(v: f64) -> [f64; 3] {
    [
        (0.15 + 0.80 * v).clamp(0.0, 1.0),
        (0.10 + 0.85 * v).clamp(0.0, 1.0),
        (0.20 + 0.75 * v).clamp(0.0, 1.0),
    ]
}

const TEXTURE_OCTAVES: u32 = 5;
const TEXTURE_CELL: f64 = 24.0;

fn texture_at(seed: u64, x: f64, y: f64) -> f64 {
    // full-contrast texture for reliable matching
    let v = value_noise_at(seed, TEXTURE_OCTAVES, TEXTURE_CELL, x, y);
    (0.5 + 1.6 * (v - 0.5)).clamp(0.02, 0.98)
}

/// Render a scene. Returns the stereo pair and its ground truth; the
/// construction is exact (the right image is sampled analytically through
/// the true disparity or the true cameras, never resampled from pixels).
pub fn generate_scene(scene: &SyntheticScene, seed: u64) -> Result<GeneratedScene> {
    let (w, h) = (scene.width, scene.height);
    if w == 0 || h == 0 {
        return Err(Error::InvalidParams("zero-size scene".into()));
    }
    match scene.kind {
        SceneKind::ShiftedTexture { shift } => {
            if shift < 0 {
                return Err(Error::InvalidParams("shift must be >= 0".into()));
            }
            let left = RasterImage::rgb_from_fn(w, h, |x, y| {
                colorize(texture_at(seed, x as f64, y as f64))
            });
            // disparity d: left(x, y) corresponds to right(x - d, y),
            // so right(x, y) shows the texture at x + d.
            let right = RasterImage::rgb_from_fn(w, h, |x, y| {
                colorize(texture_at(seed, x as f64 + shift as f64, y as f64))
            });
            let labels = vec![shift; w * h];
            let valid = vec![true; w * h];
            let truth = DisparityMap::new(w, h, labels, valid, 0);
            Ok(GeneratedScene {
                left,
                right,
                truth_disparity: Some(truth),
                truth_depth: None,
                tie_points: None,
                fundamental: None,
                rig: CameraRig::new(1000.0, 0.1)?,
            })
        }
        SceneKind::TwoPlane {
            far_disparity,
            near_disparity,
        } => {
            if far_disparity < 0 || near_disparity <= far_disparity {
                return Err(Error::InvalidParams(
                    "need 0 <= far_disparity < near_disparity".into(),
                ));
            }
            let boundary = (w / 2) as i64;
            let disp_of_left_x = |x: i64| -> i32 {
                if x < boundary {
                    far_disparity
                } else {
                    near_disparity
                }
            };
            let left = RasterImage::rgb_from_fn(w, h, |x, y| {
                colorize(texture_at(seed, x as f64, y as f64))
            });
            // For each right pixel take the farthest-forward (largest
            // disparity) left pixel that maps onto it; the near plane
            // occludes the far one in the overlap band.
            let right = RasterImage::rgb_from_fn(w, h, |x, y| {
                let xr = x as i64;
                let mut best: Option<i32> = None;
                for d in [near_disparity, far_disparity] {
                    let xl = xr + d as i64;
                    if disp_of_left_x(xl) == d {
                        best = Some(d);
                        break;
                    }
                }
                let d = best.unwrap_or(far_disparity);
                colorize(texture_at(seed, (xr + d as i64) as f64, y as f64))
            });
            let mut labels = vec![0i32; w * h];
            let mut valid = vec![true; w * h];
            for y in 0..h {
                for x in 0..w {
                    let d = disp_of_left_x(x as i64);
                    labels[y * w + x] = d;
                    // left pixels whose right-image position is overwritten
                    // by the near plane are occluded
                    let xr = x as i64 - d as i64;
                    let occluded = d == far_disparity
                        && disp_of_left_x(xr + near_disparity as i64) == near_disparity;
                    if occluded || xr < 0 {
                        valid[y * w + x] = false;
                    }
                }
            }
            let truth = DisparityMap::new(w, h, labels, valid, 0);
            Ok(GeneratedScene {
                left,
                right,
                truth_disparity: Some(truth),
                truth_depth: None,
                tie_points: None,
                fundamental: None,
                rig: CameraRig::new(1000.0, 0.1)?,
            })
        }
        SceneKind::SpherePatch {
            radius_m,
            center_depth_m,
        } => {
            if radius_m <= 0.0 || center_depth_m <= radius_m {
                return Err(Error::InvalidParams(
                    "need 0 < radius_m < center_depth_m".into(),
                ));
            }
            let rig = CameraRig::new(1.2 * w as f64, 0.1)?;
            let f = rig.focal_length;
            let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
            let mut depth = vec![0.0f64; w * h];
            let mut valid = vec![false; w * h];
            for y in 0..h {
                for x in 0..w {
                    // ray (dx, dy, 1) against sphere at (0, 0, center_depth_m)
                    let dx = (x as f64 - cx) / f;
                    let dy = (y as f64 - cy) / f;
                    let a = dx * dx + dy * dy + 1.0;
                    let b = -2.0 * center_depth_m;
                    let c = center_depth_m * center_depth_m - radius_m * radius_m;
                    let disc = b * b - 4.0 * a * c;
                    if disc >= 0.0 {
                        let t = (-b - disc.sqrt()) / (2.0 * a);
                        depth[y * w + x] = t;
                        valid[y * w + x] = true;
                    }
                }
            }
            let truth_depth = DepthMap::new(w, h, depth.clone(), valid.clone())?;
            let left = RasterImage::rgb_from_fn(w, h, |x, y| {
                colorize(texture_at(seed, x as f64, y as f64))
            });
            // right image sampled through the continuous disparity field
            let right = RasterImage::rgb_from_fn(w, h, |x, y| {
                let i = y * w + x;
                if valid[i] {
                    let d = f * rig.baseline / depth[i];
                    colorize(texture_at(seed, x as f64 + d, y as f64))
                } else {
                    colorize(texture_at(seed, x as f64, y as f64))
                }
            });
            Ok(GeneratedScene {
                left,
                right,
                truth_disparity: None,
                truth_depth: Some(truth_depth),
                tie_points: None,
                fundamental: None,
                rig,
            })
        }
        SceneKind::RotatedCameraPair {
            rotation_deg,
            baseline_m,
            tie_point_count,
        } => generate_rotated_pair(scene, seed, rotation_deg, baseline_m, tie_point_count),
    }
}

/// Two pinhole cameras with identical intrinsics: the left at the origin
/// looking down +Z, the right displaced by `baseline_m` along X and rotated
/// by `rotation_deg` about Y. The scene is a textured plane at z = z0.
fn generate_rotated_pair(
    scene: &SyntheticScene,
    seed: u64,
    rotation_deg: f64,
    baseline_m: f64,
    tie_point_count: usize,
) -> Result<GeneratedScene> {
    use nalgebra::{Matrix3, Vector3};
    let (w, h) = (scene.width, scene.height);
    let f = 1.2 * (w + h) as f64;
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let k = Matrix3::new(f, 0.0, cx, 0.0, f, cy, 0.0, 0.0, 1.0);
    let theta = rotation_deg.to_radians();
    let r = Matrix3::new(
        theta.cos(),
        0.0,
        theta.sin(),
        0.0,
        1.0,
        0.0,
        -theta.sin(),
        0.0,
        theta.cos(),
    );
    let center = Vector3::new(baseline_m, 0.0, 0.0);
    let z0 = 1.5; // plane depth, meters

    // texture coordinates: plane point (X, Y, z0) -> texture at (X, Y) scaled
    let tex_scale = 600.0;
    let project_left = |p: Vector3<f64>| -> (f64, f64) {
        (f * p.x / p.z + cx, f * p.y / p.z + cy)
    };
    let project_right = |p: Vector3<f64>| -> (f64, f64) {
        let q = r * (p - center);
        (f * q.x / q.z + cx, f * q.y / q.z + cy)
    };
    // left pixel -> plane point (exact: plane is z = z0 in left frame)
    let backproject_left = |x: f64, y: f64| -> Vector3<f64> {
        Vector3::new((x - cx) / f * z0, (y - cy) / f * z0, z0)
    };
    // right pixel -> plane point: ray from right camera center
    let backproject_right = |x: f64, y: f64| -> Vector3<f64> {
        let dir = r.transpose() * Vector3::new((x - cx) / f, (y - cy) / f, 1.0);
        let t = z0 / dir.z;
        center + dir * t
    };

    let left = RasterImage::rgb_from_fn(w, h, |x, y| {
        let p = backproject_left(x as f64, y as f64);
        colorize(texture_at(seed, p.x * tex_scale, p.y * tex_scale))
    });
    let right = RasterImage::rgb_from_fn(w, h, |x, y| {
        let p = backproject_right(x as f64, y as f64);
        colorize(texture_at(seed, p.x * tex_scale, p.y * tex_scale))
    });

    // exact tie points: plane points that project inside both images
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5_5A5A);
    let mut pairs = Vec::new();
    let margin = 8.0;
    let mut guard = 0;
    while pairs.len() < tie_point_count && guard < 100_000 {
        guard += 1;
        let x = rng.random_range(margin..w as f64 - margin);
        let y = rng.random_range(margin..h as f64 - margin);
        let p = backproject_left(x, y);
        let (xr, yr) = project_right(p);
        if xr >= margin && xr < w as f64 - margin && yr >= margin && yr < h as f64 - margin {
            let (xl, yl) = project_left(p);
            pairs.push(((xl, yl), (xr, yr)));
        }
    }
    if pairs.len() < tie_point_count {
        return Err(Error::Degenerate(
            "cameras share too little field of view for the requested tie points".into(),
        ));
    }
    let tie_points = TiePointSet::from_pairs(pairs)?;

    // true fundamental matrix: F = K^-T R [t]x K^-1 maps left points to
    // right epipolar lines, with t = -R*center the right-frame translation.
    let t = -(r * center);
    let tx = Matrix3::new(0.0, -t.z, t.y, t.z, 0.0, -t.x, -t.y, t.x, 0.0);
    let k_inv = k.try_inverse().expect("intrinsics invertible");
    let fmat = k_inv.transpose() * tx * r * k_inv;
    let mut fm = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            fm[i][j] = fmat[(i, j)];
        }
    }

    Ok(GeneratedScene {
        left,
        right,
        truth_disparity: None,
        truth_depth: None,
        tie_points: Some(tie_points),
        fundamental: Some(fm),
        rig: CameraRig::new(f, baseline_m)?,
    })
}

/// Degradations applied to a clean frame, mirroring the model the
/// enhancement chain inverts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Degradation {
    /// Illumination multiplier at the left edge (ramps to 1.0 at the right).
    pub illumination_low: f64,
    /// Additive Gaussian noise sigma (0 disables).
    pub noise_sigma: f64,
    /// Per-channel multiplicative cast (1,1,1 disables).
    pub color_cast: [f64; 3],
}

impl Default for Degradation {
    fn default() -> Self {
        Degradation {
            illumination_low: 1.0,
            noise_sigma: 0.0,
            color_cast: [1.0, 1.0, 1.0],
        }
    }
}

/// Multiply by a smooth illumination ramp, add seeded Gaussian noise and
/// scale channels for a color cast.
pub fn degrade_scene(img: &RasterImage, d: &Degradation, seed: u64) -> Result<RasterImage> {
    img.check_finite()?;
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let mut out = img.clone();
    if d.illumination_low != 1.0 {
        let denom = if w > 1 { (w - 1) as f64 } else { 1.0 };
        for y in 0..h {
            for x in 0..w {
                let ramp = d.illumination_low + (1.0 - d.illumination_low) * x as f64 / denom;
                for c in 0..ch {
                    out.set(x, y, c, out.get(x, y, c) * ramp);
                }
            }
        }
    }
    if ch == 3 && d.color_cast != [1.0, 1.0, 1.0] {
        for px in out.data_mut().chunks_exact_mut(3) {
            for c in 0..3 {
                px[c] *= d.color_cast[c];
            }
        }
    }
    if d.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, d.noise_sigma).expect("finite sigma");
        for v in out.data_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_noise_deterministic_and_bounded() {
        let a = value_noise(32, 32, 4, 0.8, 7);
        let b = value_noise(32, 32, 4, 0.8, 7);
        assert_eq!(a, b);
        let (lo, hi) = a.min_max();
        assert!(lo >= 0.0 && hi <= 1.0);
        assert!(hi - lo > 0.2, "texture has contrast");
    }

    #[test]
    fn shifted_texture_is_exact_shift() {
        let scene = SyntheticScene {
            kind: SceneKind::ShiftedTexture { shift: 5 },
            width: 64,
            height: 32,
        };
        let g = generate_scene(&scene, 3).unwrap();
        for y in 0..32 {
            for x in 5..64 {
                for c in 0..3 {
                    assert_eq!(g.left.get(x, y, c), g.right.get(x - 5, y, c));
                }
            }
        }
        let truth = g.truth_disparity.unwrap();
        assert!(truth.labels().iter().all(|&d| d == 5));
    }

    #[test]
    fn two_plane_truth_has_two_values() {
        let scene = SyntheticScene {
            kind: SceneKind::TwoPlane {
                far_disparity: 3,
                near_disparity: 8,
            },
            width: 64,
            height: 16,
        };
        let g = generate_scene(&scene, 1).unwrap();
        let truth = g.truth_disparity.unwrap();
        let mut vals: Vec<i32> = truth.labels().to_vec();
        vals.sort_unstable();
        vals.dedup();
        assert_eq!(vals, vec![3, 8]);
        // consistency on non-occluded pixels
        for y in 0..16usize {
            for x in 0..64usize {
                let i = y * 64 + x;
                if truth.valid()[i] {
                    let d = truth.labels()[i] as usize;
                    for c in 0..3 {
                        assert_eq!(g.left.get(x, y, c), g.right.get(x - d, y, c));
                    }
                }
            }
        }
    }

    #[test]
    fn rotated_pair_tie_points_satisfy_true_f() {
        let scene = SyntheticScene {
            kind: SceneKind::RotatedCameraPair {
                rotation_deg: 5.0,
                baseline_m: 0.12,
                tie_point_count: 60,
            },
            width: 320,
            height: 240,
        };
        let g = generate_scene(&scene, 9).unwrap();
        let f = g.fundamental.unwrap();
        let pts = g.tie_points.unwrap();
        for pair in pts.pairs() {
            let (ml, mr) = (pair.left, pair.right);
            let fl = [
                f[0][0] * ml.0 + f[0][1] * ml.1 + f[0][2],
                f[1][0] * ml.0 + f[1][1] * ml.1 + f[1][2],
                f[2][0] * ml.0 + f[2][1] * ml.1 + f[2][2],
            ];
            let e = mr.0 * fl[0] + mr.1 * fl[1] + fl[2];
            let scale: f64 = f.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            // algebraic epipolar residual, normalized
            assert!(
                (e / scale).abs() < 1e-6,
                "epipolar residual {e} too large"
            );
        }
    }

    #[test]
    fn degrade_identity_is_identity() {
        let img = value_noise(16, 16, 3, 0.5, 2);
        let out = degrade_scene(&img, &Degradation::default(), 0).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn ramp_only_multiplies() {
        let img = RasterImage::rgb_from_fn(17, 5, |x, y| {
            [0.5, ((x + y) % 3) as f64 * 0.3, 0.9]
        });
        let d = Degradation {
            illumination_low: 0.3,
            ..Degradation::default()
        };
        let out = degrade_scene(&img, &d, 0).unwrap();
        for y in 0..5 {
            for x in 0..17 {
                let ramp = 0.3 + 0.7 * x as f64 / 16.0;
                for c in 0..3 {
                    assert!((out.get(x, y, c) - img.get(x, y, c) * ramp).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn noise_variance_matches_request() {
        let img = RasterImage::gray_from_fn(128, 128, |_, _| 0.5);
        let d = Degradation {
            noise_sigma: 0.05,
            ..Degradation::default()
        };
        let out = degrade_scene(&img, &d, 7).unwrap();
        let n = (128 * 128) as f64;
        let mean: f64 = out
            .data()
            .iter()
            .zip(img.data())
            .map(|(a, b)| a - b)
            .sum::<f64>()
            / n;
        let var: f64 = out
            .data()
            .iter()
            .zip(img.data())
            .map(|(a, b)| (a - b - mean).powi(2))
            .sum::<f64>()
            / n;
        assert!((var - 0.0025).abs() < 0.00025, "variance {var}");
    }
}
