//! Getting pixels in: decoding, resizing, resolution simulation, tiling,
//! spectrograms and dataset manifests.

mod decode;
mod image;
mod manifest;
mod resample;
mod spectrogram;

pub use decode::{decode_bytes, decode_grayscale, encode_pgm, write_pgm, LUMA};
pub use image::Image;
pub use manifest::{DatasetManifest, ManifestEntry, Split};
pub use resample::{
    gaussian_downsample, gaussian_kernel, rescale_min_side, resize_bilinear, tile, zoom2x, MIN_SIDE,
};
pub use spectrogram::{
    hann, read_wav_mono16, samples_to_log_spectrogram, stft_magnitude, wav_to_log_spectrogram,
    SpectrogramParams,
};
