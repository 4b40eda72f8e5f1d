//! Seeded synthetic images: oriented gratings, two-object scenes and smooth
//! random textures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{gaussian_kernel, Image, Split};

/// Orientations (degrees) of the four grating classes.
pub const GRATING_ANGLES: [u32; 4] = [0, 30, 60, 90];

/// Label used for the grating class at `angle` degrees.
pub fn grating_label(angle: u32) -> String {
    format!("deg{angle:03}")
}

/// Grating parameters; period and phase are drawn per image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingSpec {
    pub angle_deg: f64,
    pub period: f64,
    pub phase: f64,
    pub contrast: f64,
    /// Half-width of the uniform pixel noise.
    pub noise: f64,
}

/// `0.5 + contrast/2 · cos(2π (x cos θ + y sin θ) / period + phase)` plus
/// uniform noise, clamped to `[0, 1]`.
pub fn grating(
    width: usize,
    height: usize,
    spec: &GratingSpec,
    rng: &mut impl Rng,
) -> Result<Image> {
    let theta = spec.angle_deg.to_radians();
    let (c, s) = (theta.cos(), theta.sin());
    let k = std::f64::consts::TAU / spec.period;
    Image::from_fn(width, height, |x, y| {
        let wave = (k * (x as f64 * c + y as f64 * s) + spec.phase).cos();
        let noise = spec.noise * (2.0 * rng.random::<f64>() - 1.0);
        0.5 + 0.5 * spec.contrast * wave + noise
    })
}

/// Distribution of grating parameters within a class.
#[derive(Debug, Clone, PartialEq)]
pub struct GratingStyle {
    pub angles: Vec<u32>,
    pub period_min: f64,
    pub period_max: f64,
    pub contrast: f64,
    pub noise: f64,
}

impl Default for GratingStyle {
    fn default() -> Self {
        GratingStyle {
            angles: GRATING_ANGLES.to_vec(),
            period_min: 9.0,
            period_max: 11.0,
            contrast: 0.6,
            noise: 0.1,
        }
    }
}

impl GratingStyle {
    fn draw(&self, angle: u32, rng: &mut impl Rng) -> GratingSpec {
        GratingSpec {
            angle_deg: angle as f64,
            period: rng.random_range(self.period_min..=self.period_max),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
            contrast: self.contrast,
            noise: self.noise,
        }
    }
}

/// One labelled image of a synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub image: Image,
    pub label: String,
    pub split: Split,
}

/// Four-class oriented-grating corpus with `train` and `test` images per
/// class, each `side x side`. Train samples come first, class by class.
pub fn grating_corpus(side: usize, train: usize, test: usize, seed: u64) -> Result<Vec<Sample>> {
    grating_corpus_with(&GratingStyle::default(), side, train, test, seed)
}

pub fn grating_corpus_with(
    style: &GratingStyle,
    side: usize,
    train: usize,
    test: usize,
    seed: u64,
) -> Result<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(4 * (train + test));
    for (split, count) in [(Split::Train, train), (Split::Test, test)] {
        for &angle in &style.angles {
            for _ in 0..count {
                let spec = style.draw(angle, &mut rng);
                out.push(Sample {
                    image: grating(side, side, &spec, &mut rng)?,
                    label: grating_label(angle),
                    split,
                });
            }
        }
    }
    Ok(out)
}

/// A scene with two grating objects in opposite quadrants of a neutral
/// background.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub image: Image,
    /// Labels of the objects, in the order of `centers`.
    pub labels: [String; 2],
    /// Object centres in pixels.
    pub centers: [[f64; 2]; 2],
}

/// Places gratings of classes `a` and `b` in opposite quadrants. The
/// diagonal (main or anti) and the grating parameters are random.
pub fn two_object_scene(
    style: &GratingStyle,
    side: usize,
    a: u32,
    b: u32,
    rng: &mut impl Rng,
) -> Result<Scene> {
    if side < 2 {
        return Err(Error::InvalidArgument(format!(
            "scene side {side} is too small"
        )));
    }
    let half = side / 2;
    let (sa, sb) = (style.draw(a, rng), style.draw(b, rng));
    let ta = grating(half, half, &sa, rng)?;
    let tb = grating(side - half, side - half, &sb, rng)?;
    let anti = rng.random::<bool>();
    // quadrant origins for object a and object b
    let (oa, ob) = if anti {
        ((half, 0), (0, half))
    } else {
        ((0, 0), (half, half))
    };
    let image = Image::from_fn(side, side, |x, y| {
        if (oa.0..oa.0 + half).contains(&x) && (oa.1..oa.1 + half).contains(&y) {
            ta.get(x - oa.0, y - oa.1)
        } else if x >= ob.0 && y >= ob.1 && x - ob.0 < tb.width() && y - ob.1 < tb.height() {
            tb.get(x - ob.0, y - ob.1)
        } else {
            0.5
        }
    })?;
    let centre =
        |o: (usize, usize), w: usize| [o.0 as f64 + w as f64 / 2.0, o.1 as f64 + w as f64 / 2.0];
    Ok(Scene {
        image,
        labels: [grating_label(a), grating_label(b)],
        centers: [centre(oa, half), centre(ob, side - half)],
    })
}

/// White noise blurred by a periodic Gaussian of width `sigma`, rescaled to
/// `[0.1, 0.9]`.
pub fn smooth_texture(side: usize, sigma: f64, seed: u64) -> Result<Image> {
    if !(sigma > 0.0) || side == 0 {
        return Err(Error::InvalidArgument(format!(
            "need a positive side and sigma, got {side} and {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..side * side).map(|_| rng.random::<f64>()).collect();
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let n = side as isize;
    let blur_rows = |src: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; side * side];
        for y in 0..side {
            for x in 0..side {
                out[y * side + x] = kernel
                    .iter()
                    .enumerate()
                    .map(|(i, k)| {
                        k * src[y * side + (x as isize + i as isize - r).rem_euclid(n) as usize]
                    })
                    .sum();
            }
        }
        out
    };
    let transpose = |src: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; side * side];
        for y in 0..side {
            for x in 0..side {
                out[x * side + y] = src[y * side + x];
            }
        }
        out
    };
    let blurred = transpose(&blur_rows(&transpose(&blur_rows(&noise))));
    let (lo, hi) = blurred
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    Image::new(
        side,
        side,
        blurred
            .iter()
            .map(|v| 0.1 + 0.8 * (v - lo) / span)
            .collect(),
    )
}
