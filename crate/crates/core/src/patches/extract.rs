//! S2 (sliding inner products between C1 maps and patches) and C2 (global
//! maximum over positions and scales).

use std::collections::BTreeMap;

use super::bank::{Patch, PatchBank};
use super::spectral::SpectralBank;
use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::pooling::C1Stack;

/// How S2 treats the C1 map borders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// Only placements where the patch lies entirely inside the map.
    #[default]
    Valid,
    /// Every position, wrapping the window around the map edges.
    Periodic,
}

impl BoundaryMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryMode::Valid => "valid",
            BoundaryMode::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "valid" => Ok(BoundaryMode::Valid),
            "periodic" => Ok(BoundaryMode::Periodic),
            other => Err(Error::InvalidArgument(format!(
                "boundary mode must be `valid` or `periodic`, got `{other}`"
            ))),
        }
    }
}

/// Argmax of one C2 feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureLocation {
    /// Placement in the C1 map (0-based column and row of the top-left cell).
    pub u: usize,
    pub v: usize,
    pub level: usize,
    /// Patch centre mapped back to image pixels, clamped into the image.
    pub image_x: f64,
    pub image_y: f64,
}

/// C2 values for the selected patches of a bank, in ascending patch order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    /// `None` when the patch fits at no scale of this image (value is 0).
    pub locations: Vec<Option<FeatureLocation>>,
    /// Bank index of each entry.
    pub patch_indices: Vec<usize>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of features whose patch fit nowhere.
    pub fn unfitted(&self) -> usize {
        self.locations.iter().filter(|l| l.is_none()).count()
    }
}

/// Number of placements per axis, or `None` if the patch does not fit.
fn placements(
    map_w: usize,
    map_h: usize,
    side: usize,
    mode: BoundaryMode,
) -> Option<(usize, usize)> {
    if map_w < side || map_h < side {
        return None;
    }
    Some(match mode {
        BoundaryMode::Valid => (map_w - side + 1, map_h - side + 1),
        BoundaryMode::Periodic => (map_w, map_h),
    })
}

/// The map extended so that every placement is a plain in-bounds window.
fn wrapped(map: &Plane, side: usize) -> Plane {
    let (w, h) = (map.width, map.height);
    Plane::from_fn(w + side - 1, h + side - 1, |x, y| map.get(x % w, y % h))
}

fn level_maps(c1: &C1Stack, level: usize, side: usize, mode: BoundaryMode) -> [Plane; 3] {
    let maps = &c1.maps[level - 1];
    match mode {
        BoundaryMode::Valid => maps.clone(),
        BoundaryMode::Periodic => [0, 1, 2].map(|k| wrapped(&maps[k], side)),
    }
}

fn location(c1: &C1Stack, level: usize, u: usize, v: usize, side: usize) -> FeatureLocation {
    let scale = (1usize << level) as f64;
    let half = side as f64 / 2.0;
    FeatureLocation {
        u,
        v,
        level,
        image_x: (scale * (u as f64 + half)).min((c1.image_width - 1) as f64),
        image_y: (scale * (v as f64 + half)).min((c1.image_height - 1) as f64),
    }
}

/// Placements of one patch size at one level, handled as a matrix product
/// `windows (placements x 3M²) · patchesᵀ (3M² x n)`.
const CHUNK: usize = 128;

struct Best {
    value: f64,
    at: Option<FeatureLocation>,
}

pub fn extract_features(c1: &C1Stack, bank: &PatchBank) -> Result<FeatureVector> {
    extract_features_with(c1, bank, BoundaryMode::Valid)
}

/// C2 for every selected patch: the maximum of S2 over all positions and all
/// levels where the patch fits. Ties go to the smallest (level, row, column).
pub fn extract_features_with(
    c1: &C1Stack,
    bank: &PatchBank,
    mode: BoundaryMode,
) -> Result<FeatureVector> {
    Extractor::new(bank, mode)?.extract(c1)
}

/// Patch side from which correlation goes through the FFT. Measured on
/// 64-pixel C1 maps over a batch: a matrix product wins at side 4, the FFT
/// from side 8 on.
const SPECTRAL_MIN_SIDE: usize = 6;

/// [`extract_features_with`] for one bank over many images. Work that only
/// depends on the bank and the map sizes is done once and reused.
pub struct Extractor<'a> {
    mode: BoundaryMode,
    selected: Vec<usize>,
    sides: Vec<usize>,
    /// Selected patches correlated directly, grouped by side: slots into
    /// `selected` and the patches stacked row-major (n x 3M²).
    groups: BTreeMap<usize, (Vec<usize>, Vec<f64>)>,
    spectral_slots: Vec<usize>,
    spectral: SpectralBank<'a>,
}

impl<'a> Extractor<'a> {
    pub fn new(bank: &'a PatchBank, mode: BoundaryMode) -> Result<Self> {
        Self::routed(bank, mode, SPECTRAL_MIN_SIDE)
    }

    pub(crate) fn routed(
        bank: &'a PatchBank,
        mode: BoundaryMode,
        spectral_min_side: usize,
    ) -> Result<Self> {
        let selected = bank.selected();
        if selected.is_empty() {
            return Err(Error::InvalidArgument("no patch is selected".into()));
        }
        let mut groups: BTreeMap<usize, (Vec<usize>, Vec<f64>)> = BTreeMap::new();
        let mut spectral_slots = Vec::new();
        let mut spectral = Vec::new();
        for (slot, &i) in selected.iter().enumerate() {
            let p = &bank.patches[i];
            if p.side >= spectral_min_side {
                spectral_slots.push(slot);
                spectral.push(p);
                continue;
            }
            let g = groups.entry(p.side).or_default();
            g.0.push(slot);
            g.1.extend_from_slice(&p.values);
        }
        Ok(Extractor {
            mode,
            sides: selected.iter().map(|&i| bank.patches[i].side).collect(),
            selected,
            groups,
            spectral_slots,
            spectral: SpectralBank::new(spectral, mode),
        })
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn extract(&self, c1: &C1Stack) -> Result<FeatureVector> {
        if c1.levels() == 0 {
            return Err(Error::InvalidArgument("empty C1 stack".into()));
        }
        let mut best: Vec<Best> = self
            .selected
            .iter()
            .map(|_| Best {
                value: f64::NEG_INFINITY,
                at: None,
            })
            .collect();

        let mut window = Vec::new();
        let mut scores = Vec::new();
        for level in 1..=c1.levels() {
            let (mw, mh) = c1.dims(level);
            for (&side, (slots, stacked)) in &self.groups {
                let Some((pw, ph)) = placements(mw, mh, side, self.mode) else {
                    continue;
                };
                let maps = level_maps(c1, level, side, self.mode);
                let k = 3 * side * side;
                let n = slots.len();
                let total = pw * ph;
                let mut start = 0;
                while start < total {
                    let m = CHUNK.min(total - start);
                    window.clear();
                    window.reserve(m * k);
                    for p in start..start + m {
                        let (u, v) = (p % pw, p / pw);
                        for map in &maps {
                            for dy in 0..side {
                                window.extend_from_slice(&map.row(v + dy)[u..u + side]);
                            }
                        }
                    }
                    scores.clear();
                    scores.resize(m * n, 0.0);
                    // SAFETY: `window` is m x k, `stacked` is n x k (read as k x n
                    // through its strides), `scores` is m x n; all row-major with
                    // the strides given.
                    unsafe {
                        matrixmultiply::dgemm(
                            m,
                            k,
                            n,
                            1.0,
                            window.as_ptr(),
                            k as isize,
                            1,
                            stacked.as_ptr(),
                            1,
                            k as isize,
                            0.0,
                            scores.as_mut_ptr(),
                            n as isize,
                            1,
                        );
                    }
                    for (row, p) in (start..start + m).enumerate() {
                        let line = &scores[row * n..(row + 1) * n];
                        for (&slot, &s) in slots.iter().zip(line) {
                            let b = &mut best[slot];
                            if s > b.value {
                                b.value = s;
                                b.at = Some(location(c1, level, p % pw, p / pw, side));
                            }
                        }
                    }
                    start += m;
                }
            }
        }

        if !self.spectral.is_empty() {
            let found = self.spectral.c2(c1);
            for (&slot, found) in self.spectral_slots.iter().zip(found) {
                if let Some((value, level, u, v)) = found {
                    best[slot] = Best {
                        value,
                        at: Some(location(c1, level, u, v, self.sides[slot])),
                    };
                }
            }
        }

        let (values, locations) = best
            .into_iter()
            .map(|b| match b.at {
                Some(at) => (b.value, Some(at)),
                None => (0.0, None),
            })
            .unzip();
        Ok(FeatureVector {
            values,
            locations,
            patch_indices: self.selected.clone(),
        })
    }
}

/// S2 responses of every selected patch at every level; the map is empty
/// (0 x 0) where the patch does not fit.
#[derive(Debug, Clone, PartialEq)]
pub struct S2Response {
    /// `maps[i][j - 1]` for the i-th selected patch.
    pub maps: Vec<Vec<Plane>>,
}

/// Sliding inner product of one patch with the C1 maps at `level`.
pub fn s2_map(c1: &C1Stack, patch: &Patch, level: usize, mode: BoundaryMode) -> Plane {
    let (mw, mh) = c1.dims(level);
    let side = patch.side;
    let Some((pw, ph)) = placements(mw, mh, side, mode) else {
        return Plane::zeros(0, 0);
    };
    let maps = level_maps(c1, level, side, mode);
    let mut out = Plane::zeros(pw, ph);
    for v in 0..ph {
        let dst = &mut out.data[v * pw..(v + 1) * pw];
        for (k, map) in maps.iter().enumerate() {
            for dy in 0..side {
                let src = map.row(v + dy);
                for dx in 0..side {
                    let w = patch.at(k, dx, dy);
                    for (d, s) in dst.iter_mut().zip(&src[dx..dx + pw]) {
                        *d += w * s;
                    }
                }
            }
        }
    }
    out
}

pub fn s2_responses(c1: &C1Stack, bank: &PatchBank, mode: BoundaryMode) -> S2Response {
    S2Response {
        maps: bank
            .selected()
            .into_iter()
            .map(|i| {
                (1..=c1.levels())
                    .map(|j| s2_map(c1, &bank.patches[i], j, mode))
                    .collect()
            })
            .collect(),
    }
}
