/// Row-major 2D array of coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn zeros(width: usize, height: usize) -> Self {
        Plane {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Cyclic shift by `(dx, dy)`: value at `(x, y)` moves to `(x+dx, y+dy)`.
    pub fn cyclic_shift(&self, dx: isize, dy: isize) -> Plane {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = Plane::zeros(self.width, self.height);
        for y in 0..h {
            for x in 0..w {
                out.data[((y + dy).rem_euclid(h) * w + (x + dx).rem_euclid(w)) as usize] =
                    self.data[(y * w + x) as usize];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Plane) -> f64 {
        assert_eq!((self.width, self.height), (other.width, other.height));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
