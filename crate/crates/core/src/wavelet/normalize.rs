use super::filters::{support_len, Orientation};
use super::swt::{swt_forward, SwtCoefficients, WaveletConfig};
use crate::error::{Error, Result};
use crate::ingest::Image;
use crate::plane::Plane;

/// Normalized wavelet magnitudes: `maps[j - 1][k]` holds S1 at full
/// resolution; `approx` is the level-J approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct S1Stack {
    pub maps: Vec<[Plane; 3]>,
    pub approx: Plane,
}

impl S1Stack {
    pub fn levels(&self) -> usize {
        self.maps.len()
    }

    pub fn map(&self, level: usize, orientation: Orientation) -> &Plane {
        &self.maps[level - 1][orientation.index()]
    }

    pub fn width(&self) -> usize {
        self.approx.width
    }

    pub fn height(&self) -> usize {
        self.approx.height
    }
}

/// Summed-area table of squared intensities with periodic extension, so any
/// window (even one wider than the image) can be summed in constant time.
pub struct PeriodicEnergy {
    width: usize,
    height: usize,
    /// `(width + 1) x (height + 1)` prefix sums.
    table: Vec<f64>,
}

impl PeriodicEnergy {
    pub fn new(img: &Image) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut table = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0.0;
            for x in 0..w {
                let v = img.get(x, y);
                row += v * v;
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row;
            }
        }
        PeriodicEnergy {
            width: w,
            height: h,
            table,
        }
    }

    #[inline]
    fn prefix(&self, x: usize, y: usize) -> f64 {
        self.table[y * (self.width + 1) + x]
    }

    /// Sum over `[0, x) x [0, y)` of the periodically extended image.
    fn extended_prefix(&self, x: usize, y: usize) -> f64 {
        let (w, h) = (self.width, self.height);
        let (qx, rx) = (x / w, x % w);
        let (qy, ry) = (y / h, y % h);
        (qx * qy) as f64 * self.prefix(w, h)
            + qx as f64 * self.prefix(w, ry)
            + qy as f64 * self.prefix(rx, h)
            + self.prefix(rx, ry)
    }

    /// Sum of squares over the `len_x` x `len_y` window starting at `(x0, y0)`
    /// (coordinates taken modulo the image size).
    pub fn window_sum(&self, x0: isize, y0: isize, len_x: usize, len_y: usize) -> f64 {
        let a = x0.rem_euclid(self.width as isize) as usize;
        let b = y0.rem_euclid(self.height as isize) as usize;
        let s = self.extended_prefix(a + len_x, b + len_y)
            - self.extended_prefix(a, b + len_y)
            - self.extended_prefix(a + len_x, b)
            + self.extended_prefix(a, b);
        s.max(0.0)
    }
}

/// S1 = |Wf| / (E + ε), where E is the L2 norm of the image over the support
/// of the level-j, orientation-k equivalent wavelet centred at each sample.
pub fn s1_normalize(raw: &SwtCoefficients, img: &Image, cfg: &WaveletConfig) -> Result<S1Stack> {
    if (raw.width(), raw.height()) != (img.width(), img.height()) || raw.levels() != cfg.levels {
        return Err(Error::InvalidArgument(format!(
            "coefficients ({}x{}, {} levels) do not belong to a {}x{} image at {} levels",
            raw.width(),
            raw.height(),
            raw.levels(),
            img.width(),
            img.height(),
            cfg.levels
        )));
    }
    let energy = PeriodicEnergy::new(img);
    let (w, h) = (img.width(), img.height());
    let maps = raw
        .details
        .iter()
        .enumerate()
        .map(|(i, level_maps)| {
            let level = i + 1;
            Orientation::ALL.map(|o| {
                let (bx, by) = o.bands();
                let (lx, ly) = (support_len(level, bx), support_len(level, by));
                let (rx, ry) = ((lx / 2) as isize, (ly / 2) as isize);
                let wf = &level_maps[o.index()];
                Plane::from_fn(w, h, |u, v| {
                    let e = energy
                        .window_sum(u as isize - rx, v as isize - ry, lx, ly)
                        .sqrt();
                    wf.get(u, v).abs() / (e + cfg.epsilon)
                })
            })
        })
        .collect();
    Ok(S1Stack {
        maps,
        approx: raw.approx.clone(),
    })
}

/// [`swt_forward`] followed by [`s1_normalize`].
pub fn s1_transform(img: &Image, cfg: &WaveletConfig) -> Result<S1Stack> {
    let raw = swt_forward(img, cfg)?;
    s1_normalize(&raw, img, cfg)
}
