//! C1: local maximum over non-overlapping `2^j x 2^j` blocks.

use crate::plane::Plane;
use crate::wavelet::{Orientation, S1Stack};

/// `maps[j - 1][k]` has size `floor(W / 2^j) x floor(H / 2^j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct C1Stack {
    pub maps: Vec<[Plane; 3]>,
    /// Dimensions of the source image.
    pub image_width: usize,
    pub image_height: usize,
}

impl C1Stack {
    pub fn levels(&self) -> usize {
        self.maps.len()
    }

    pub fn map(&self, level: usize, orientation: Orientation) -> &Plane {
        &self.maps[level - 1][orientation.index()]
    }

    /// (width, height) of the maps at `level`.
    pub fn dims(&self, level: usize) -> (usize, usize) {
        let m = &self.maps[level - 1][0];
        (m.width, m.height)
    }
}

/// Block maximum of `src` with blocks of `block x block`, anchored at the
/// origin; ragged borders are dropped.
pub fn block_max(src: &Plane, block: usize) -> Plane {
    let (ow, oh) = (src.width / block, src.height / block);
    let mut out = Plane {
        width: ow,
        height: oh,
        data: vec![f64::NEG_INFINITY; ow * oh],
    };
    for y in 0..oh * block {
        let dst = &mut out.data[(y / block) * ow..(y / block + 1) * ow];
        for (d, chunk) in dst.iter_mut().zip(src.row(y).chunks_exact(block)) {
            *d = chunk.iter().copied().fold(*d, f64::max);
        }
    }
    out
}

pub fn c1_pool(s1: &S1Stack) -> C1Stack {
    C1Stack {
        maps: s1
            .maps
            .iter()
            .enumerate()
            .map(|(i, level)| {
                let block = 1 << (i + 1);
                Orientation::ALL.map(|o| block_max(&level[o.index()], block))
            })
            .collect(),
        image_width: s1.width(),
        image_height: s1.height(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_blocks() {
        let src = Plane {
            width: 4,
            height: 4,
            data: vec![
                1., 2., 5., 6., //
                3., 4., 7., 8., //
                9., 10., 13., 14., //
                11., 12., 15., 16.,
            ],
        };
        assert_eq!(block_max(&src, 2).data, vec![4., 8., 12., 16.]);
    }

    #[test]
    fn ragged_border_is_dropped() {
        let src = Plane::from_fn(7, 5, |x, y| (x * 10 + y) as f64);
        let out = block_max(&src, 2);
        assert_eq!((out.width, out.height), (3, 2));
        // the last column (x = 6) and row (y = 4) never contribute
        assert_eq!(out.get(2, 1), 53.0);
    }

    #[test]
    fn constant_map_pools_to_constant() {
        let src = Plane::from_fn(16, 16, |_, _| 0.25);
        assert!(block_max(&src, 4).data.iter().all(|&v| v == 0.25));
    }
}
