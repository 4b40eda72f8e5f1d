//! S1: translation-invariant CDF 9/7 wavelet transform and local-energy
//! normalization.

pub mod filters;
mod histogram;
mod normalize;
mod swt;

pub use filters::{
    convolve, dilate, equivalent_filter, equivalent_norm, support_len, Band, Orientation, HIGHPASS,
    LOWPASS, MAX_LEVELS,
};
pub use histogram::approx_histogram;
pub use normalize::{s1_normalize, s1_transform, PeriodicEnergy, S1Stack};
pub use swt::{swt_forward, SwtCoefficients, WaveletConfig};
