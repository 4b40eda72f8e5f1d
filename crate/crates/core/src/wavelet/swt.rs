use super::filters::{equivalent_norm, Band, Orientation, MAX_LEVELS};
use crate::error::{Error, Result};
use crate::ingest::Image;
use crate::plane::Plane;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletConfig {
    /// Number of dyadic levels J.
    pub levels: usize,
    /// Added to the local-energy denominator of the S1 normalization.
    pub epsilon: f64,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig {
            levels: 3,
            epsilon: 1e-8,
        }
    }
}

impl WaveletConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_LEVELS).contains(&self.levels) {
            return Err(Error::InvalidArgument(format!(
                "wavelet levels must be in 1..={MAX_LEVELS}, got {}",
                self.levels
            )));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be a finite non-negative number, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Smallest image side the transform accepts.
    pub fn min_side(&self) -> usize {
        2 << self.levels
    }
}

/// Raw undecimated transform: `details[j - 1][k]` is Wf at level `j` and
/// orientation `k`, each scaled so its equivalent 2D wavelet has unit L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SwtCoefficients {
    pub details: Vec<[Plane; 3]>,
    pub approx: Plane,
}

impl SwtCoefficients {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn detail(&self, level: usize, orientation: Orientation) -> &Plane {
        &self.details[level - 1][orientation.index()]
    }

    pub fn width(&self) -> usize {
        self.approx.width
    }

    pub fn height(&self) -> usize {
        self.approx.height
    }
}

/// Periodic filtering along x with taps dilated by `dilation`.
fn filter_rows(src: &Plane, taps: &[f64], dilation: usize) -> Plane {
    let (w, h) = (src.width, src.height);
    let c = (taps.len() / 2) as isize;
    let offsets: Vec<usize> = (0..taps.len())
        .map(|t| ((t as isize - c) * dilation as isize).rem_euclid(w as isize) as usize)
        .collect();
    let mut out = Plane::zeros(w, h);
    for y in 0..h {
        let row = src.row(y);
        let dst = &mut out.data[y * w..(y + 1) * w];
        for (&k, &off) in taps.iter().zip(&offsets) {
            // dst[x] += k * row[(x + off) mod w]
            let (head, tail) = dst.split_at_mut(w - off);
            for (d, s) in head.iter_mut().zip(&row[off..]) {
                *d += k * s;
            }
            for (d, s) in tail.iter_mut().zip(&row[..off]) {
                *d += k * s;
            }
        }
    }
    out
}

/// Periodic filtering along y.
fn filter_cols(src: &Plane, taps: &[f64], dilation: usize) -> Plane {
    let (w, h) = (src.width, src.height);
    let c = (taps.len() / 2) as isize;
    let mut out = Plane::zeros(w, h);
    for y in 0..h {
        let dst = &mut out.data[y * w..(y + 1) * w];
        for (t, &k) in taps.iter().enumerate() {
            let sy = (y as isize + (t as isize - c) * dilation as isize).rem_euclid(h as isize);
            for (d, s) in dst.iter_mut().zip(src.row(sy as usize)) {
                *d += k * s;
            }
        }
    }
    out
}

fn scale(mut p: Plane, factor: f64) -> Plane {
    p.data.iter_mut().for_each(|v| *v *= factor);
    p
}

/// Undecimated (à trous) separable CDF 9/7 transform with periodic
/// extension. Every output map has the input's dimensions.
pub fn swt_forward(img: &Image, cfg: &WaveletConfig) -> Result<SwtCoefficients> {
    cfg.validate()?;
    let (w, h) = (img.width(), img.height());
    if w.min(h) < cfg.min_side() {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            reason: format!(
                "{} wavelet levels need both sides ≥ {}",
                cfg.levels,
                cfg.min_side()
            ),
        });
    }
    let mut approx = Plane {
        width: w,
        height: h,
        data: img.data().to_vec(),
    };
    let mut details = Vec::with_capacity(cfg.levels);
    for level in 1..=cfg.levels {
        let d = 1 << (level - 1);
        let lx = filter_rows(&approx, Band::Low.taps(), d);
        let hx = filter_rows(&approx, Band::High.taps(), d);
        let norm = |o: Orientation| {
            let (bx, by) = o.bands();
            1.0 / (equivalent_norm(level, bx) * equivalent_norm(level, by))
        };
        let horizontal = scale(
            filter_cols(&lx, Band::High.taps(), d),
            norm(Orientation::Horizontal),
        );
        let vertical = scale(
            filter_cols(&hx, Band::Low.taps(), d),
            norm(Orientation::Vertical),
        );
        let diagonal = scale(
            filter_cols(&hx, Band::High.taps(), d),
            norm(Orientation::Diagonal),
        );
        approx = filter_cols(&lx, Band::Low.taps(), d);
        details.push([horizontal, vertical, diagonal]);
    }
    Ok(SwtCoefficients { details, approx })
}
