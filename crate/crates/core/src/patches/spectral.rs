//! FFT route for S2/C2: circular cross-correlation in the frequency domain.
//! Two real patches share one complex transform. Patch spectra depend only
//! on the map geometry, so they are computed once per geometry and reused.
//! Near-maximal placements are re-scored with a direct dot product, so the
//! returned values and argmax follow exactly the same rules as the direct
//! route.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::bank::Patch;
use super::extract::BoundaryMode;
use crate::plane::Plane;
use crate::pooling::C1Stack;

/// Slack on approximate responses when collecting candidates for exact
/// re-scoring; far above the transform's rounding error.
const CANDIDATE_SLACK: f64 = 1e-9;

/// 2D transform of one geometry. Spectra are kept transposed (`x`-major),
/// which is all the pointwise products need and saves a transpose each way.
struct Fft2 {
    w: usize,
    h: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(w: usize, h: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            w,
            h,
            row_fwd: planner.plan_fft_forward(w),
            row_inv: planner.plan_fft_inverse(w),
            col_fwd: planner.plan_fft_forward(h),
            col_inv: planner.plan_fft_inverse(h),
        }
    }

    fn scratch(&self) -> Vec<Complex64> {
        let len = [&self.row_fwd, &self.row_inv, &self.col_fwd, &self.col_inv]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        vec![Complex64::default(); len]
    }

    /// Transform of the row-major `src`, of which only the first `rows` rows
    /// may be non-zero, into the transposed spectrum `dst`. With `flip` the
    /// unnormalized inverse is used, which yields the spectrum at `-f`.
    fn forward(
        &self,
        src: &mut [Complex64],
        rows: usize,
        dst: &mut [Complex64],
        flip: bool,
        scratch: &mut [Complex64],
    ) {
        let (w, h) = (self.w, self.h);
        let (row, col) = if flip {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };
        row.process_with_scratch(&mut src[..rows * w], scratch);
        dst.iter_mut().for_each(|c| *c = Complex64::default());
        transpose(src, w, rows, w, dst, h);
        col.process_with_scratch(dst, scratch);
    }

    /// Unnormalized inverse of a transposed spectrum; only the first `rows`
    /// rows of the row-major result `dst` are produced.
    fn inverse(
        &self,
        spec: &mut [Complex64],
        rows: usize,
        dst: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        let (w, h) = (self.w, self.h);
        self.col_inv.process_with_scratch(spec, scratch);
        transpose(spec, h, w, rows, dst, w);
        self.row_inv
            .process_with_scratch(&mut dst[..rows * w], scratch);
    }
}

/// Everything about the patches that depends on one map geometry.
struct Geometry {
    fft: Fft2,
    /// Fitting patches, two per packed transform.
    pairs: Vec<(usize, Option<usize>)>,
    /// Per pair and orientation, the packed patch spectrum at `-f`. For real
    /// `a`, `b` and `z = a + ib` that equals `conj(A) + i conj(B)`, so one
    /// product with a map spectrum correlates both patches at once.
    spectra: Vec<[Vec<Complex64>; 3]>,
}

impl Geometry {
    fn new(patches: &[&Patch], w: usize, h: usize) -> Self {
        let fft = Fft2::new(w, h);
        let fitting: Vec<usize> = (0..patches.len())
            .filter(|&i| patches[i].side <= w && patches[i].side <= h)
            .collect();
        let pairs: Vec<(usize, Option<usize>)> = fitting
            .chunks(2)
            .map(|c| (c[0], c.get(1).copied()))
            .collect();
        let n = w * h;
        let mut scratch = fft.scratch();
        let mut src = vec![Complex64::default(); n];
        let spectra = pairs
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (patches[a], b.map(|b| patches[b]));
                let rows = b.map_or(a.side, |b| a.side.max(b.side));
                [0, 1, 2].map(|k| {
                    src[..rows * w]
                        .iter_mut()
                        .for_each(|c| *c = Complex64::default());
                    for dy in 0..a.side {
                        for dx in 0..a.side {
                            src[dy * w + dx].re = a.at(k, dx, dy);
                        }
                    }
                    if let Some(b) = b {
                        for dy in 0..b.side {
                            for dx in 0..b.side {
                                src[dy * w + dx].im = b.at(k, dx, dy);
                            }
                        }
                    }
                    let mut spec = vec![Complex64::default(); n];
                    fft.forward(&mut src, rows, &mut spec, true, &mut scratch);
                    spec
                })
            })
            .collect();
        Geometry {
            fft,
            pairs,
            spectra,
        }
    }
}

/// Patches routed through the FFT, with their spectra cached per geometry.
pub(super) struct SpectralBank<'a> {
    patches: Vec<&'a Patch>,
    mode: BoundaryMode,
    geometries: Mutex<HashMap<(usize, usize), Arc<Geometry>>>,
}

/// `dst[c * dst_stride + r] = src[r * src_stride + c]` over a `rows` x
/// `cols` block, tiled so both sides stay in cache.
fn transpose(
    src: &[Complex64],
    src_stride: usize,
    rows: usize,
    cols: usize,
    dst: &mut [Complex64],
    dst_stride: usize,
) {
    const TILE: usize = 8;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * dst_stride + r] = src[r * src_stride + c];
                }
            }
        }
    }
}

/// Best placement of one patch: value and `(level, u, v)`.
pub(super) type Found = Option<(f64, usize, usize, usize)>;

fn exact_dot(maps: &[Plane; 3], p: &Patch, u: usize, v: usize) -> f64 {
    let (w, h) = (maps[0].width, maps[0].height);
    let m = p.side;
    let mut s = 0.0;
    for (k, map) in maps.iter().enumerate() {
        for dy in 0..m {
            let row = map.row((v + dy) % h);
            let pr = &p.values[(k * m + dy) * m..(k * m + dy + 1) * m];
            if u + m <= w {
                s += pr
                    .iter()
                    .zip(&row[u..u + m])
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            } else {
                s += pr
                    .iter()
                    .enumerate()
                    .map(|(dx, a)| a * row[(u + dx) % w])
                    .sum::<f64>();
            }
        }
    }
    s
}

impl<'a> SpectralBank<'a> {
    pub(super) fn new(patches: Vec<&'a Patch>, mode: BoundaryMode) -> Self {
        SpectralBank {
            patches,
            mode,
            geometries: Mutex::new(HashMap::new()),
        }
    }

    pub(super) fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    fn geometry(&self, w: usize, h: usize) -> Arc<Geometry> {
        let mut cache = self
            .geometries
            .lock()
            .unwrap_or_else(|poisoned| poisoned.into_inner());
        cache
            .entry((w, h))
            .or_insert_with(|| Arc::new(Geometry::new(&self.patches, w, h)))
            .clone()
    }

    /// C2 of every patch, with the same placement set, tie-breaking and
    /// values as the direct route.
    pub(super) fn c2(&self, c1: &C1Stack) -> Vec<Found> {
        let patches = &self.patches;
        let mut cands: Vec<Candidates> = patches.iter().map(|_| Candidates::new()).collect();

        for level in 1..=c1.levels() {
            let (w, h) = c1.dims(level);
            let geo = self.geometry(w, h);
            if geo.pairs.is_empty() {
                continue;
            }
            let n = w * h;
            let mut scratch = geo.fft.scratch();
            let mut src = vec![Complex64::default(); n];
            let maps: Vec<Vec<Complex64>> = c1.maps[level - 1]
                .iter()
                .map(|map| {
                    for (c, &v) in src.iter_mut().zip(&map.data) {
                        *c = Complex64::new(v, 0.0);
                    }
                    let mut spec = vec![Complex64::default(); n];
                    geo.fft.forward(&mut src, h, &mut spec, false, &mut scratch);
                    spec
                })
                .collect();

            let mut acc = vec![Complex64::default(); n];
            let scale = 1.0 / n as f64;
            for (&(a, b), spectra) in geo.pairs.iter().zip(&geo.spectra) {
                for (f, slot) in acc.iter_mut().enumerate() {
                    *slot = spectra[0][f] * maps[0][f]
                        + spectra[1][f] * maps[1][f]
                        + spectra[2][f] * maps[2][f];
                }
                let (pw_a, ph_a) = placements(w, h, patches[a].side, self.mode);
                let rows = b.map_or(ph_a, |b| {
                    ph_a.max(placements(w, h, patches[b].side, self.mode).1)
                });
                geo.fft.inverse(&mut acc, rows, &mut src, &mut scratch);
                let c = &mut cands[a];
                for v in 0..ph_a {
                    for (u, z) in src[v * w..v * w + pw_a].iter().enumerate() {
                        c.offer(scale * z.re, level, u, v);
                    }
                }
                if let Some(b) = b {
                    let (pw, ph) = placements(w, h, patches[b].side, self.mode);
                    let c = &mut cands[b];
                    for v in 0..ph {
                        for (u, z) in src[v * w..v * w + pw].iter().enumerate() {
                            c.offer(scale * z.im, level, u, v);
                        }
                    }
                }
            }
        }

        patches
            .iter()
            .zip(cands)
            .map(|(p, c)| {
                let floor = c.floor();
                let mut best: Found = None;
                for &(approx, level, u, v) in &c.list {
                    if approx < floor {
                        continue;
                    }
                    let s = exact_dot(&c1.maps[level - 1], p, u, v);
                    if best.is_none_or(|b| s > b.0) {
                        best = Some((s, level, u, v));
                    }
                }
                best
            })
            .collect()
    }
}

fn placements(w: usize, h: usize, side: usize, mode: BoundaryMode) -> (usize, usize) {
    match mode {
        BoundaryMode::Valid => (w + 1 - side, h + 1 - side),
        BoundaryMode::Periodic => (w, h),
    }
}

/// Placements whose approximate response is within [`CANDIDATE_SLACK`] of
/// the running maximum, in scan order.
struct Candidates {
    top: f64,
    floor: f64,
    list: Vec<(f64, usize, usize, usize)>,
}

impl Candidates {
    const PRUNE_AT: usize = 64;

    fn new() -> Self {
        Candidates {
            top: f64::NEG_INFINITY,
            floor: f64::NEG_INFINITY,
            list: Vec::new(),
        }
    }

    fn floor(&self) -> f64 {
        self.floor
    }

    #[inline]
    fn offer(&mut self, value: f64, level: usize, u: usize, v: usize) {
        if value < self.floor {
            return;
        }
        if value > self.top {
            self.top = value;
            self.floor = value - CANDIDATE_SLACK * (1.0 + value.abs());
            if self.list.len() >= Self::PRUNE_AT {
                let floor = self.floor;
                self.list.retain(|c| c.0 >= floor);
            }
        }
        self.list.push((value, level, u, v));
    }
}
