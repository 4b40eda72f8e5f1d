use crate::error::{Error, Result};

/// Dense grayscale image, row-major, intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    /// Builds an image after checking dimensions and that every sample is a
    /// finite value in `[0, 1]`.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} image needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some((i, v)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0 || **v > 1.0)
        {
            return Err(Error::InvalidImage(format!(
                "sample {i} = {v} is outside [0, 1]"
            )));
        }
        Ok(Image {
            width,
            height,
            data,
        })
    }

    /// Builds an image from a generator, clamping every sample into `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                data.push(if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) });
            }
        }
        Image::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Image::new(width, height, vec![value; width * height])
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Image {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64
    }

    /// Multiplies every sample by `alpha`; fails if the result leaves `[0, 1]`.
    pub fn scaled(&self, alpha: f64) -> Result<Image> {
        Image::new(
            self.width,
            self.height,
            self.data.iter().map(|v| v * alpha).collect(),
        )
    }

    /// Cyclic shift: the sample at `(x, y)` moves to `(x + dx, y + dy)` modulo
    /// the image size.
    pub fn cyclic_shift(&self, dx: isize, dy: isize) -> Image {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = vec![0.0; self.data.len()];
        for y in 0..h {
            let ty = (y + dy).rem_euclid(h);
            for x in 0..w {
                let tx = (x + dx).rem_euclid(w);
                out[(ty * w + tx) as usize] = self.data[(y * w + x) as usize];
            }
        }
        Image::from_raw(self.width, self.height, out)
    }

    /// Copies the `w`x`h` rectangle whose top-left corner is `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Image> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(Error::InvalidArgument(format!(
                "crop {w}x{h}+{x0}+{y0} exceeds {}x{} image",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            let row = y * self.width;
            data.extend_from_slice(&self.data[row + x0..row + x0 + w]);
        }
        Ok(Image::from_raw(w, h, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_samples() {
        assert!(Image::new(2, 1, vec![0.0, 1.5]).is_err());
        assert!(Image::new(2, 1, vec![0.0, f64::NAN]).is_err());
        assert!(Image::new(0, 1, vec![]).is_err());
        assert!(Image::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn cyclic_shift_wraps() {
        let img = Image::new(3, 1, vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(img.cyclic_shift(1, 0).data(), &[0.3, 0.1, 0.2]);
        assert_eq!(img.cyclic_shift(-1, 5).data(), &[0.2, 0.3, 0.1]);
    }

    #[test]
    fn crop_copies_subrectangle() {
        let img = Image::from_fn(4, 3, |x, y| (x + 4 * y) as f64 / 12.0).unwrap();
        let c = img.crop(1, 1, 2, 2).unwrap();
        assert_eq!(
            c.data(),
            &[img.get(1, 1), img.get(2, 1), img.get(1, 2), img.get(2, 2)]
        );
        assert!(img.crop(3, 0, 2, 1).is_err());
    }
}
