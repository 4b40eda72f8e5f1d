//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wvc_core::ingest::Image;
use wvc_core::patches::{BoundaryMode, Patch, PatchBank, PatchSource};
use wvc_core::plane::Plane;
use wvc_core::pooling::C1Stack;
use wvc_core::wavelet::{Orientation, HIGHPASS, LOWPASS};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(w: usize, h: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Image {
    Image::from_fn(w, h, |_, _| rng.random_range(lo..hi)).unwrap()
}

/// Full linear convolution, written out.
fn conv(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// Inserts `step - 1` zeros between taps.
fn upsample(taps: &[f64], step: usize) -> Vec<f64> {
    let mut out = vec![0.0; (taps.len() - 1) * step + 1];
    for (i, &t) in taps.iter().enumerate() {
        out[i * step] = t;
    }
    out
}

/// Impulse response of the level-`j` analysis cascade along one axis.
pub fn cascade(j: usize, high: bool) -> Vec<f64> {
    let mut h = vec![1.0];
    for i in 0..j - 1 {
        h = conv(&h, &upsample(&LOWPASS, 1 << i));
    }
    let last: &[f64] = if high { &HIGHPASS } else { &LOWPASS };
    conv(&h, &upsample(last, 1 << (j - 1)))
}

fn axes(o: Orientation) -> (bool, bool) {
    // (high along x, high along y)
    match o {
        Orientation::Horizontal => (false, true),
        Orientation::Vertical => (true, false),
        Orientation::Diagonal => (true, true),
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Normalized detail coefficient at one site as an explicit 2D double sum
/// over the periodically extended image.
pub fn wf_double_sum(img: &Image, j: usize, o: Orientation, u: usize, v: usize) -> f64 {
    let (hx, hy) = axes(o);
    let (gx, gy) = (cascade(j, hx), cascade(j, hy));
    let (cx, cy) = ((gx.len() / 2) as isize, (gy.len() / 2) as isize);
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut s = 0.0;
    for (n, &b) in gy.iter().enumerate() {
        for (m, &a) in gx.iter().enumerate() {
            let x = (u as isize + m as isize - cx).rem_euclid(w) as usize;
            let y = (v as isize + n as isize - cy).rem_euclid(h) as usize;
            s += a * b * img.get(x, y);
        }
    }
    s / (l2(&gx) * l2(&gy))
}

/// L2 norm of the image over the filter's support window centred at a site.
pub fn window_energy(img: &Image, j: usize, o: Orientation, u: usize, v: usize) -> f64 {
    let (hx, hy) = axes(o);
    let (lx, ly) = (cascade(j, hx).len() as isize, cascade(j, hy).len() as isize);
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut s = 0.0;
    for dy in 0..ly {
        for dx in 0..lx {
            let x = (u as isize + dx - lx / 2).rem_euclid(w) as usize;
            let y = (v as isize + dy - ly / 2).rem_euclid(h) as usize;
            s += img.get(x, y).powi(2);
        }
    }
    s.sqrt()
}

pub fn s1_site(img: &Image, j: usize, o: Orientation, u: usize, v: usize, eps: f64) -> f64 {
    wf_double_sum(img, j, o, u, v).abs() / (window_energy(img, j, o, u, v) + eps)
}

/// Block maximum with explicit index arithmetic.
pub fn naive_block_max(src: &Plane, block: usize) -> Plane {
    let (ow, oh) = (src.width / block, src.height / block);
    Plane::from_fn(ow, oh, |x, y| {
        let mut m = f64::NEG_INFINITY;
        for dy in 0..block {
            for dx in 0..block {
                m = m.max(src.get(x * block + dx, y * block + dy));
            }
        }
        m
    })
}

/// Patch response at one placement, with wrap-around for periodic mode.
pub fn naive_s2(c1: &C1Stack, p: &Patch, level: usize, u: usize, v: usize) -> f64 {
    let (w, h) = c1.dims(level);
    let mut s = 0.0;
    for (k, o) in Orientation::ALL.into_iter().enumerate() {
        let map = c1.map(level, o);
        for dy in 0..p.side {
            for dx in 0..p.side {
                s +=
                    p.values[(k * p.side + dy) * p.side + dx] * map.get((u + dx) % w, (v + dy) % h);
            }
        }
    }
    s
}

/// (value, level, u, v) of the first strict maximum over levels, rows and
/// columns in that order.
pub fn naive_c2(c1: &C1Stack, p: &Patch, mode: BoundaryMode) -> Option<(f64, usize, usize, usize)> {
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for level in 1..=c1.levels() {
        let (w, h) = c1.dims(level);
        if w < p.side || h < p.side {
            continue;
        }
        let (pw, ph) = match mode {
            BoundaryMode::Valid => (w - p.side + 1, h - p.side + 1),
            BoundaryMode::Periodic => (w, h),
        };
        for v in 0..ph {
            for u in 0..pw {
                let s = naive_s2(c1, p, level, u, v);
                if best.is_none_or(|b| s > b.0) {
                    best = Some((s, level, u, v));
                }
            }
        }
    }
    best
}

/// A random unit-norm patch.
pub fn random_patch(side: usize, rng: &mut impl Rng) -> Patch {
    let mut values: Vec<f64> = (0..3 * side * side).map(|_| rng.random::<f64>()).collect();
    let n = l2(&values);
    values.iter_mut().for_each(|v| *v /= n);
    Patch {
        side,
        values,
        source: PatchSource {
            image: 0,
            level: 1,
            x: 0,
            y: 0,
        },
    }
}

pub fn bank_of(patches: Vec<Patch>) -> PatchBank {
    let n = patches.len();
    PatchBank::new(patches, vec![true; n], 0).unwrap()
}
