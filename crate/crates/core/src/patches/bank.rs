use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pooling::C1Stack;

/// Default patch sides and counts: 250 patches each of 4, 8, 12 and 16.
pub const DEFAULT_PATCH_COUNTS: [(usize, usize); 4] = [(4, 250), (8, 250), (12, 250), (16, 250)];

/// Draw attempts allowed per patch before giving up.
pub const MAX_DRAWS: usize = 1000;

/// Where a patch was cut from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchSource {
    pub image: usize,
    pub level: usize,
    /// Top-left corner in the C1 map (0-based column, row).
    pub x: usize,
    pub y: usize,
}

/// An `M x M x 3` template over C1 maps, unit L2 norm.
///
/// `values` is laid out orientation-major: index `(k * M + dy) * M + dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub side: usize,
    pub values: Vec<f64>,
    pub source: PatchSource,
}

impl Patch {
    #[inline]
    pub fn at(&self, k: usize, dx: usize, dy: usize) -> f64 {
        self.values[(k * self.side + dy) * self.side + dx]
    }

    /// Copies the window at `(x, y)` of `c1` level `level` without normalizing.
    pub fn cut(c1: &C1Stack, level: usize, x: usize, y: usize, side: usize) -> Vec<f64> {
        let mut values = Vec::with_capacity(3 * side * side);
        for map in &c1.maps[level - 1] {
            for dy in 0..side {
                values.extend_from_slice(&map.row(y + dy)[x..x + side]);
            }
        }
        values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchBank {
    pub patches: Vec<Patch>,
    /// One flag per patch; only selected patches produce features.
    pub selection: Vec<bool>,
    pub rng_seed: u64,
}

impl PatchBank {
    pub fn new(patches: Vec<Patch>, selection: Vec<bool>, rng_seed: u64) -> Result<Self> {
        let bank = PatchBank {
            patches,
            selection,
            rng_seed,
        };
        bank.validate()?;
        Ok(bank)
    }

    pub fn validate(&self) -> Result<()> {
        if self.selection.len() != self.patches.len() {
            return Err(Error::InvalidArgument(format!(
                "selection mask has {} entries for {} patches",
                self.selection.len(),
                self.patches.len()
            )));
        }
        if !self.selection.iter().any(|&s| s) {
            return Err(Error::InvalidArgument("no patch is selected".into()));
        }
        for (i, p) in self.patches.iter().enumerate() {
            if p.side == 0 || p.values.len() != 3 * p.side * p.side {
                return Err(Error::InvalidArgument(format!(
                    "patch {i} has {} values for side {}",
                    p.values.len(),
                    p.side
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    /// Indices of selected patches, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.patches.len())
            .filter(|&i| self.selection[i])
            .collect()
    }

    pub fn selected_count(&self) -> usize {
        self.selection.iter().filter(|&&s| s).count()
    }

    /// Replaces the selection with exactly the given patch indices.
    pub fn select_only(&mut self, keep: &[usize]) -> Result<()> {
        let mut mask = vec![false; self.patches.len()];
        for &i in keep {
            *mask
                .get_mut(i)
                .ok_or_else(|| Error::InvalidArgument(format!("patch index {i} out of range")))? =
                true;
        }
        let previous = std::mem::replace(&mut self.selection, mask);
        if let Err(e) = self.validate() {
            self.selection = previous;
            return Err(e);
        }
        Ok(())
    }
}

/// Levels of `c1` at which a `side x side` window fits.
pub fn fitting_levels(c1: &C1Stack, side: usize) -> Vec<usize> {
    (1..=c1.levels())
        .filter(|&j| {
            let (w, h) = c1.dims(j);
            w >= side && h >= side
        })
        .collect()
}

/// Samples patches from training C1 stacks: for every patch, a uniformly
/// drawn image, a uniformly drawn level at which the window fits, and a
/// uniformly drawn position. Blocks are L2-normalized; all-zero blocks are
/// redrawn. The same seed and inputs always give the same bank.
pub fn learn_patch_bank(
    training: &[C1Stack],
    counts: &[(usize, usize)],
    seed: u64,
) -> Result<PatchBank> {
    if training.is_empty() {
        return Err(Error::InvalidArgument("no training images".into()));
    }
    for &(side, _) in counts {
        if side == 0
            || training
                .iter()
                .all(|c1| fitting_levels(c1, side).is_empty())
        {
            return Err(Error::PatchNeverFits { side });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut patches = Vec::with_capacity(counts.iter().map(|c| c.1).sum());
    for &(side, count) in counts {
        for _ in 0..count {
            patches.push(draw_patch(training, side, &mut rng)?);
        }
    }
    if patches.is_empty() {
        return Err(Error::InvalidArgument("requested zero patches".into()));
    }
    let n = patches.len();
    PatchBank::new(patches, vec![true; n], seed)
}

fn draw_patch(training: &[C1Stack], side: usize, rng: &mut ChaCha8Rng) -> Result<Patch> {
    for _ in 0..MAX_DRAWS {
        let image = rng.random_range(0..training.len());
        let c1 = &training[image];
        let levels = fitting_levels(c1, side);
        if levels.is_empty() {
            continue;
        }
        let level = levels[rng.random_range(0..levels.len())];
        let (w, h) = c1.dims(level);
        let x = rng.random_range(0..=w - side);
        let y = rng.random_range(0..=h - side);
        let mut values = Patch::cut(c1, level, x, y, side);
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            continue;
        }
        values.iter_mut().for_each(|v| *v /= norm);
        return Ok(Patch {
            side,
            values,
            source: PatchSource { image, level, x, y },
        });
    }
    Err(Error::RetriesExhausted {
        side,
        attempts: MAX_DRAWS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Plane;

    fn stack(dims: &[(usize, usize)], fill: f64) -> C1Stack {
        C1Stack {
            maps: dims
                .iter()
                .map(|&(w, h)| {
                    [0, 1, 2].map(|k| Plane::from_fn(w, h, |x, y| fill * (1 + x + y + k) as f64))
                })
                .collect(),
            image_width: dims[0].0 * 2,
            image_height: dims[0].1 * 2,
        }
    }

    #[test]
    fn single_placement_when_patch_fills_map() {
        let c1 = stack(&[(16, 16)], 0.1);
        let bank = learn_patch_bank(&[c1], &[(16, 5)], 1).unwrap();
        for p in &bank.patches {
            assert_eq!((p.source.level, p.source.x, p.source.y), (1, 0, 0));
            let n: f64 = p.values.iter().map(|v| v * v).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_bank() {
        let stacks = vec![
            stack(&[(40, 30), (20, 15)], 0.01),
            stack(&[(36, 36), (18, 18)], 0.02),
        ];
        let a = learn_patch_bank(&stacks, &[(4, 20), (8, 20)], 42).unwrap();
        let b = learn_patch_bank(&stacks, &[(4, 20), (8, 20)], 42).unwrap();
        assert_eq!(a, b);
        let c = learn_patch_bank(&stacks, &[(4, 20), (8, 20)], 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn impossible_size_is_reported() {
        let c1 = stack(&[(16, 16)], 0.1);
        let err = learn_patch_bank(&[c1], &[(4, 1), (17, 1)], 0).unwrap_err();
        assert!(matches!(err, Error::PatchNeverFits { side: 17 }));
    }

    #[test]
    fn all_zero_maps_exhaust_retries() {
        let c1 = stack(&[(16, 16)], 0.0);
        let err = learn_patch_bank(&[c1], &[(4, 1)], 0).unwrap_err();
        assert!(matches!(err, Error::RetriesExhausted { side: 4, .. }));
    }

    #[test]
    fn select_only_keeps_mask_valid() {
        let c1 = stack(&[(16, 16)], 0.1);
        let mut bank = learn_patch_bank(&[c1], &[(4, 5)], 0).unwrap();
        bank.select_only(&[1, 3]).unwrap();
        assert_eq!(bank.selected(), vec![1, 3]);
        assert!(bank.select_only(&[]).is_err());
        assert_eq!(bank.selected(), vec![1, 3]);
        assert!(bank.select_only(&[9]).is_err());
    }
}
