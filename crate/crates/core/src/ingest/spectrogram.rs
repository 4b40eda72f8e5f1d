//! WAV to log-magnitude spectrogram images, so that sounds can be classified
//! as visual textures.

use std::f64::consts::PI;
use std::path::Path;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::Image;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrogramParams {
    /// FFT frame length in samples; a power of two.
    pub frame: usize,
    pub hop: usize,
    pub segment_seconds: f64,
}

impl Default for SpectrogramParams {
    fn default() -> Self {
        SpectrogramParams {
            frame: 1024,
            hop: 512,
            segment_seconds: 5.0,
        }
    }
}

impl SpectrogramParams {
    fn validate(&self) -> Result<()> {
        if !self.frame.is_power_of_two() || self.frame < 2 {
            return Err(Error::InvalidArgument(format!(
                "frame length {} is not a power of two",
                self.frame
            )));
        }
        if self.hop == 0 || self.hop > self.frame {
            return Err(Error::InvalidArgument(format!(
                "hop {} must be in 1..={}",
                self.hop, self.frame
            )));
        }
        if !(self.segment_seconds > 0.0) {
            return Err(Error::InvalidArgument(
                "segment length must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Periodic Hann window of length `n`.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Hann-windowed STFT magnitudes, one row of `frame / 2 + 1` bins per frame.
/// Frames start every `hop` samples and must fit entirely in `samples`.
pub fn stft_magnitude(samples: &[f64], frame: usize, hop: usize) -> Vec<Vec<f64>> {
    if samples.len() < frame {
        return Vec::new();
    }
    let window = hann(frame);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(frame);
    let mut buf = vec![Complex::new(0.0, 0.0); frame];
    (0..=(samples.len() - frame) / hop)
        .map(|f| {
            let chunk = &samples[f * hop..f * hop + frame];
            for ((b, s), w) in buf.iter_mut().zip(chunk).zip(&window) {
                *b = Complex::new(s * w, 0.0);
            }
            fft.process(&mut buf);
            buf[..frame / 2 + 1].iter().map(|c| c.norm()).collect()
        })
        .collect()
}

/// Reads a mono PCM-16 WAV file; samples are scaled to `[-1, 1)`.
pub fn read_wav_mono16(path: impl AsRef<Path>) -> Result<(Vec<f64>, u32)> {
    let path = path.as_ref();
    let bad = |reason: String| Error::Malformed {
        path: path.to_path_buf(),
        reason,
    };
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => bad(other.to_string()),
    })?;
    let spec = reader.spec();
    if spec.channels != 1
        || spec.bits_per_sample != 16
        || spec.sample_format != hound::SampleFormat::Int
    {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            reason: format!(
                "need mono PCM-16, got {} channel(s), {}-bit {:?}",
                spec.channels, spec.bits_per_sample, spec.sample_format
            ),
        });
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| bad(e.to_string()))?;
    Ok((samples, spec.sample_rate))
}

/// Splits `samples` into full segments and renders each as a min-max
/// normalized `log(1 + |X|)` image: frequency bin on the vertical axis (row 0
/// is DC), frame index on the horizontal axis. A trailing partial segment is
/// dropped.
pub fn samples_to_log_spectrogram(
    samples: &[f64],
    sample_rate: u32,
    params: &SpectrogramParams,
) -> Result<Vec<Image>> {
    params.validate()?;
    let seg_len = (params.segment_seconds * sample_rate as f64).round() as usize;
    if seg_len < params.frame {
        return Err(Error::InvalidArgument(format!(
            "segment of {seg_len} samples is shorter than one {}-sample frame",
            params.frame
        )));
    }
    let bins = params.frame / 2 + 1;
    samples
        .chunks_exact(seg_len)
        .map(|segment| {
            let frames = stft_magnitude(segment, params.frame, params.hop);
            let width = frames.len();
            let mut data = vec![0.0; width * bins];
            for (t, mags) in frames.iter().enumerate() {
                for (b, m) in mags.iter().enumerate() {
                    data[b * width + t] = m.ln_1p();
                }
            }
            let (lo, hi) = data
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            let span = hi - lo;
            for v in data.iter_mut() {
                *v = if span > 0.0 {
                    ((*v - lo) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                };
            }
            Image::new(width, bins, data)
        })
        .collect()
}

pub fn wav_to_log_spectrogram(
    path: impl AsRef<Path>,
    params: &SpectrogramParams,
) -> Result<Vec<Image>> {
    let (samples, rate) = read_wav_mono16(path)?;
    samples_to_log_spectrogram(&samples, rate, params)
}
