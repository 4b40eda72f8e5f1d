//! Resizing, resolution simulation and tiling.

use super::Image;
use crate::error::{Error, Result};

/// Smallest side accepted for rescale targets and downsampled outputs.
pub const MIN_SIDE: usize = 16;

/// Bilinear resize with pixel-centre alignment; output clamped to `[0, 1]`.
pub fn resize_bilinear(img: &Image, width: usize, height: usize) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "resize target {width}x{height} is empty"
        )));
    }
    let sx = img.width() as f64 / width as f64;
    let sy = img.height() as f64 / height as f64;
    let xs: Vec<(usize, usize, f64)> = (0..width)
        .map(|x| interp_coord((x as f64 + 0.5) * sx - 0.5, img.width()))
        .collect();
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        let (y0, y1, fy) = interp_coord((y as f64 + 0.5) * sy - 0.5, img.height());
        for &(x0, x1, fx) in &xs {
            let top = img.get(x0, y0) * (1.0 - fx) + img.get(x1, y0) * fx;
            let bottom = img.get(x0, y1) * (1.0 - fx) + img.get(x1, y1) * fx;
            data.push((top * (1.0 - fy) + bottom * fy).clamp(0.0, 1.0));
        }
    }
    Ok(Image::from_raw(width, height, data))
}

fn interp_coord(s: f64, n: usize) -> (usize, usize, f64) {
    let s = s.clamp(0.0, (n - 1) as f64);
    let i0 = s.floor() as usize;
    let i1 = (i0 + 1).min(n - 1);
    (i0, i1, s - i0 as f64)
}

/// Rescales so the shorter side equals `target`, preserving the aspect ratio
/// to the nearest pixel.
pub fn rescale_min_side(img: &Image, target: usize) -> Result<Image> {
    if target < MIN_SIDE {
        return Err(Error::InvalidArgument(format!(
            "rescale target {target} is below the minimum of {MIN_SIDE}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    if w.min(h) == target {
        return Ok(img.clone());
    }
    let (nw, nh) = if w <= h {
        (
            target,
            ((h as f64 * target as f64 / w as f64).round() as usize).max(target),
        )
    } else {
        (
            ((w as f64 * target as f64 / h as f64).round() as usize).max(target),
            target,
        )
    };
    resize_bilinear(img, nw, nh)
}

/// Exact 2x bilinear zoom: output sample `(2x, 2y)` equals input `(x, y)`,
/// odd samples are the mean of their neighbours (clamped at the last edge).
pub fn zoom2x(img: &Image) -> Image {
    let (w, h) = (img.width(), img.height());
    let coord = |i: usize, n: usize| -> (usize, usize, f64) {
        let i0 = i / 2;
        if i.is_multiple_of(2) || i0 + 1 >= n {
            (i0, i0, 0.0)
        } else {
            (i0, i0 + 1, 0.5)
        }
    };
    let mut data = Vec::with_capacity(4 * w * h);
    for y in 0..2 * h {
        let (y0, y1, fy) = coord(y, h);
        for x in 0..2 * w {
            let (x0, x1, fx) = coord(x, w);
            let top = img.get(x0, y0) * (1.0 - fx) + img.get(x1, y0) * fx;
            let bottom = img.get(x0, y1) * (1.0 - fx) + img.get(x1, y1) * fx;
            data.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    Image::from_raw(2 * w, 2 * h, data)
}

/// Half-sample symmetric extension of index `i` into `0..n`.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = i.rem_euclid(2 * n);
    (if m < n { m } else { 2 * n - 1 - m }) as usize
}

/// Normalized Gaussian taps for standard deviation `sigma`, radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Simulates a coarser sensor: Gaussian blur with sigma = `factor / 2` and
/// symmetric boundaries, then keeps every `factor`-th sample from index 0.
pub fn gaussian_downsample(img: &Image, factor: usize) -> Result<Image> {
    if factor == 0 {
        return Err(Error::InvalidArgument(
            "downsample factor must be ≥ 1".into(),
        ));
    }
    let (w, h) = (img.width(), img.height());
    let (ow, oh) = (w / factor, h / factor);
    if ow < MIN_SIDE || oh < MIN_SIDE {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            reason: format!("factor {factor} gives {ow}x{oh}, below {MIN_SIDE}x{MIN_SIDE}"),
        });
    }
    let taps = gaussian_kernel(factor as f64 / 2.0);
    let r = (taps.len() / 2) as isize;

    // horizontal pass at the kept columns only
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        for ox in 0..ow {
            let cx = (ox * factor) as isize;
            rows[y * ow + ox] = taps
                .iter()
                .enumerate()
                .map(|(t, &k)| k * img.get(reflect(cx + t as isize - r, w), y))
                .sum();
        }
    }
    let mut data = Vec::with_capacity(ow * oh);
    for oy in 0..oh {
        let cy = (oy * factor) as isize;
        for ox in 0..ow {
            let v: f64 = taps
                .iter()
                .enumerate()
                .map(|(t, &k)| k * rows[reflect(cy + t as isize - r, h) * ow + ox])
                .sum();
            data.push(v.clamp(0.0, 1.0));
        }
    }
    Ok(Image::from_raw(ow, oh, data))
}

/// Non-overlapping `side`x`side` tiles in row-major order; ragged margins
/// are discarded.
pub fn tile(img: &Image, side: usize) -> Result<Vec<Image>> {
    if side == 0 || img.width() < side || img.height() < side {
        return Err(Error::InvalidArgument(format!(
            "cannot cut {side}x{side} tiles from a {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let mut tiles = Vec::new();
    for ty in 0..img.height() / side {
        for tx in 0..img.width() / side {
            tiles.push(img.crop(tx * side, ty * side, side, side)?);
        }
    }
    Ok(tiles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(w, h, |_, _| rng.random::<f64>()).unwrap()
    }

    #[test]
    fn rescale_preserves_aspect() {
        let img = Image::filled(280, 560, 0.2).unwrap();
        let out = rescale_min_side(&img, 140).unwrap();
        assert_eq!((out.width(), out.height()), (140, 280));
    }

    #[test]
    fn rescale_identity_when_already_at_target() {
        let img = noise(140, 200, 1);
        let out = rescale_min_side(&img, 140).unwrap();
        assert_eq!(out, img);
        assert_eq!(rescale_min_side(&out, 140).unwrap(), out);
    }

    #[test]
    fn rescale_keeps_constants() {
        let out = rescale_min_side(&Image::filled(100, 100, 0.5).unwrap(), 140).unwrap();
        assert_eq!((out.width(), out.height()), (140, 140));
        assert!(out.data().iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn rescale_rejects_tiny_target() {
        assert!(rescale_min_side(&noise(32, 32, 0), 15).is_err());
    }

    #[test]
    fn zoom2x_interleaves_exact_samples() {
        let img = noise(5, 4, 3);
        let z = zoom2x(&img);
        assert_eq!((z.width(), z.height()), (10, 8));
        for y in 0..4 {
            for x in 0..5 {
                assert_eq!(z.get(2 * x, 2 * y), img.get(x, y));
            }
        }
        assert!((z.get(1, 0) - 0.5 * (img.get(0, 0) + img.get(1, 0))).abs() < 1e-15);
    }

    #[test]
    fn downsample_factor_one_is_plain_blur() {
        let img = noise(20, 18, 4);
        let out = gaussian_downsample(&img, 1).unwrap();
        assert_eq!((out.width(), out.height()), (20, 18));
        let taps = gaussian_kernel(0.5);
        assert_eq!(taps.len(), 5);
        // direct 2D evaluation at an interior and a border pixel
        for &(x, y) in &[(7usize, 9usize), (0, 17)] {
            let mut acc = 0.0;
            for (ty, ky) in taps.iter().enumerate() {
                for (tx, kx) in taps.iter().enumerate() {
                    let sx = reflect(x as isize + tx as isize - 2, 20);
                    let sy = reflect(y as isize + ty as isize - 2, 18);
                    acc += ky * kx * img.get(sx, sy);
                }
            }
            assert!((out.get(x, y) - acc).abs() < 1e-12);
        }
    }

    #[test]
    fn downsample_constant_stays_constant() {
        let img = Image::filled(64, 48, 0.37).unwrap();
        let out = gaussian_downsample(&img, 2).unwrap();
        assert_eq!((out.width(), out.height()), (32, 24));
        assert!(out.data().iter().all(|&v| (v - 0.37).abs() <= 1e-12));
    }

    #[test]
    fn downsample_reduces_noise_variance() {
        let img = noise(512, 512, 5);
        let out = gaussian_downsample(&img, 2).unwrap();
        assert!(out.variance() < img.variance());
    }

    #[test]
    fn downsample_rejects_small_output() {
        let err = gaussian_downsample(&noise(40, 40, 0), 3).unwrap_err();
        assert!(matches!(err, Error::TooSmall { .. }));
    }

    #[test]
    fn tile_counts() {
        assert_eq!(tile(&noise(512, 512, 0), 128).unwrap().len(), 16);
        let one = noise(128, 128, 1);
        assert_eq!(tile(&one, 128).unwrap(), vec![one]);
        let t = tile(&noise(300, 300, 2), 128).unwrap();
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn reflect_is_half_sample_symmetric() {
        let idx: Vec<usize> = (-3..6).map(|i| reflect(i, 3)).collect();
        assert_eq!(idx, vec![2, 1, 0, 0, 1, 2, 2, 1, 0]);
    }
}
