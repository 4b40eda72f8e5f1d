//! CDF 9/7 analysis filters and their à trous cascades.

use std::sync::OnceLock;

/// Analysis lowpass (9 taps, JPEG2000 irreversible transform), centred on
/// index 4. Sums to 1.
pub const LOWPASS: [f64; 9] = [
    0.026_748_757_410_809_76,
    -0.016_864_118_442_874_95,
    -0.078_223_266_528_987_85,
    0.266_864_118_442_872_3,
    0.602_949_018_236_357_9,
    0.266_864_118_442_872_3,
    -0.078_223_266_528_987_85,
    -0.016_864_118_442_874_95,
    0.026_748_757_410_809_76,
];

/// Analysis highpass (7 taps), centred on index 3. Sums to 0.
pub const HIGHPASS: [f64; 7] = [
    0.091_271_763_114_249_48,
    -0.057_543_526_228_499_57,
    -0.591_271_763_114_247,
    1.115_087_052_456_994,
    -0.591_271_763_114_247,
    -0.057_543_526_228_499_57,
    0.091_271_763_114_249_48,
];

pub const MAX_LEVELS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Low,
    High,
}

impl Band {
    pub fn taps(self) -> &'static [f64] {
        match self {
            Band::Low => &LOWPASS,
            Band::High => &HIGHPASS,
        }
    }
}

/// Detail orientation. `Horizontal` is lowpass along x and highpass along y
/// (it responds to horizontal edges); `Vertical` is the transpose; `Diagonal`
/// is highpass along both axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Orientation {
    pub const ALL: [Orientation; 3] = [
        Orientation::Horizontal,
        Orientation::Vertical,
        Orientation::Diagonal,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Bands applied along (x, y).
    pub fn bands(self) -> (Band, Band) {
        match self {
            Orientation::Horizontal => (Band::Low, Band::High),
            Orientation::Vertical => (Band::High, Band::Low),
            Orientation::Diagonal => (Band::High, Band::High),
        }
    }
}

/// Inserts `dilation - 1` zeros between taps.
pub fn dilate(taps: &[f64], dilation: usize) -> Vec<f64> {
    let mut out = vec![0.0; (taps.len() - 1) * dilation + 1];
    for (i, &t) in taps.iter().enumerate() {
        out[i * dilation] = t;
    }
    out
}

pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Length of the level-`level` cascade along one axis:
/// `(9-1)(2^(j-1)-1) + (L-1) 2^(j-1) + 1` where `L` is the band's tap count.
pub fn support_len(level: usize, band: Band) -> usize {
    let d = 1usize << (level - 1);
    (LOWPASS.len() - 1) * (d - 1) + (band.taps().len() - 1) * d + 1
}

/// 1D impulse response of the cascade producing `band` at `level`: lowpass at
/// dilations 1, 2, ..., 2^(j-2), then `band` at dilation 2^(j-1). Centred, odd
/// length, symmetric.
pub fn equivalent_filter(level: usize, band: Band) -> Vec<f64> {
    assert!(
        (1..=MAX_LEVELS).contains(&level),
        "level {level} out of range"
    );
    let mut acc = vec![1.0];
    for i in 1..level {
        acc = convolve(&acc, &dilate(&LOWPASS, 1 << (i - 1)));
    }
    convolve(&acc, &dilate(band.taps(), 1 << (level - 1)))
}

struct Calibration {
    /// `norms[j - 1][band]` = L2 norm of the 1D equivalent filter.
    norms: Vec<[f64; 2]>,
}

fn calibration() -> &'static Calibration {
    static CAL: OnceLock<Calibration> = OnceLock::new();
    CAL.get_or_init(|| {
        let low_sum: f64 = LOWPASS.iter().sum();
        let high_sum: f64 = HIGHPASS.iter().sum();
        assert!(
            (low_sum - 1.0).abs() < 1e-9,
            "CDF 9/7 lowpass sums to {low_sum}"
        );
        assert!(high_sum.abs() < 1e-9, "CDF 9/7 highpass sums to {high_sum}");
        let norm = |v: Vec<f64>| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        Calibration {
            norms: (1..=MAX_LEVELS)
                .map(|j| {
                    [
                        norm(equivalent_filter(j, Band::Low)),
                        norm(equivalent_filter(j, Band::High)),
                    ]
                })
                .collect(),
        }
    })
}

/// L2 norm of the 1D equivalent filter at `level`.
pub fn equivalent_norm(level: usize, band: Band) -> f64 {
    calibration().norms[level - 1][band as usize]
}
