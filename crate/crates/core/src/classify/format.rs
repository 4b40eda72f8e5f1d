//! Versioned binary model file.
//!
//! ```text
//! "WVC1" | u32 version | section* | u32 crc32
//! section = u64 byte length | payload
//! ```
//!
//! Sections appear in a fixed order: config, bank, mask, features, hists,
//! labels. Integers and floats are little-endian; floats are f64. The CRC32
//! (IEEE) covers every byte before the trailer.

use std::path::Path;

use thiserror::Error;

use super::nn::{ModelConfig, NNModel};
use crate::error::{Error, Result};
use crate::patches::{BoundaryMode, Patch, PatchBank, PatchSource};
use crate::wavelet::WaveletConfig;

pub const MAGIC: [u8; 4] = *b"WVC1";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("not a model file (magic {found:?})")]
    BadMagic { found: Vec<u8> },
    #[error("unsupported model version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error(
        "model file truncated: needed {needed} bytes at offset {offset}, {available} available"
    )]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("model checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("malformed model: {0}")]
    Malformed(String),
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, v: usize) {
        self.u32(v as u32);
    }
    fn f64s(&mut self, vs: &[f64]) {
        vs.iter().for_each(|&v| self.f64(v));
    }
    fn matrix(&mut self, rows: &[Vec<f64>]) {
        self.len(rows.len());
        self.len(rows.first().map_or(0, Vec::len));
        rows.iter().for_each(|r| self.f64s(r));
    }
    fn section(&mut self, body: Writer) {
        self.u64(body.buf.len() as u64);
        self.buf.extend_from_slice(&body.buf);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.buf.len() - self.pos < n {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: n,
                available: self.buf.len() - self.pos,
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self) -> Result<usize, FormatError> {
        Ok(self.u32()? as usize)
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, FormatError> {
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| malformed("length overflow"))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
    fn matrix(&mut self) -> Result<Vec<Vec<f64>>, FormatError> {
        let rows = self.len()?;
        let cols = self.len()?;
        (0..rows).map(|_| self.f64s(cols)).collect()
    }
    fn section(&mut self) -> Result<Reader<'a>, FormatError> {
        let n = usize::try_from(self.u64()?).map_err(|_| malformed("section too large"))?;
        Ok(Reader {
            buf: self.take(n)?,
            pos: 0,
        })
    }
    fn finish(&self, what: &str) -> Result<(), FormatError> {
        if self.pos != self.buf.len() {
            return Err(malformed(&format!(
                "{} trailing bytes in {what} section",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn malformed(msg: &str) -> FormatError {
    FormatError::Malformed(msg.to_string())
}

fn opt(v: Option<usize>) -> u32 {
    v.map_or(0, |v| v as u32)
}

pub fn encode_model(model: &NNModel) -> Vec<u8> {
    let mut out = Writer::default();
    out.buf.extend_from_slice(&MAGIC);
    out.u32(FORMAT_VERSION);

    let cfg = &model.config;
    let mut s = Writer::default();
    s.len(cfg.wavelet.levels);
    s.f64(cfg.wavelet.epsilon);
    s.u8(match cfg.boundary {
        BoundaryMode::Valid => 0,
        BoundaryMode::Periodic => 1,
    });
    s.u32(opt(cfg.hist_bins));
    s.f64(cfg.hist_weight);
    s.u32(opt(cfg.min_side));
    s.len(cfg.min_cluster);
    out.section(s);

    let mut s = Writer::default();
    s.u64(model.bank.rng_seed);
    s.len(model.bank.len());
    for p in &model.bank.patches {
        s.len(p.side);
        s.len(p.source.image);
        s.len(p.source.level);
        s.len(p.source.x);
        s.len(p.source.y);
        s.f64s(&p.values);
    }
    out.section(s);

    let mut s = Writer::default();
    s.len(model.bank.selection.len());
    model.bank.selection.iter().for_each(|&b| s.u8(b as u8));
    s.len(model.variances.len());
    s.f64s(&model.variances);
    out.section(s);

    let mut s = Writer::default();
    s.matrix(&model.train_features);
    out.section(s);

    let mut s = Writer::default();
    match &model.train_hists {
        None => s.u8(0),
        Some(h) => {
            s.u8(1);
            s.matrix(h);
        }
    }
    out.section(s);

    let mut s = Writer::default();
    s.len(model.labels.len());
    for l in &model.labels {
        s.len(l.len());
        s.buf.extend_from_slice(l.as_bytes());
    }
    out.section(s);

    let crc = crc32fast::hash(&out.buf);
    out.u32(crc);
    out.buf
}

pub fn decode_model(bytes: &[u8]) -> Result<NNModel> {
    if bytes.len() < 8 {
        if !MAGIC.starts_with(&bytes[..bytes.len().min(4)]) {
            return Err(FormatError::BadMagic {
                found: bytes[..bytes.len().min(4)].to_vec(),
            }
            .into());
        }
        return Err(FormatError::Truncated {
            offset: 0,
            needed: 8,
            available: bytes.len(),
        }
        .into());
    }
    if bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic {
            found: bytes[..4].to_vec(),
        }
        .into());
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion {
            found: version,
            supported: FORMAT_VERSION,
        }
        .into());
    }
    if bytes.len() < 12 {
        return Err(FormatError::Truncated {
            offset: 8,
            needed: 4,
            available: bytes.len() - 8,
        }
        .into());
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(FormatError::ChecksumMismatch { stored, computed }.into());
    }

    let mut r = Reader { buf: body, pos: 8 };

    let mut s = r.section()?;
    let levels = s.len()?;
    let epsilon = s.f64()?;
    let boundary = match s.u8()? {
        0 => BoundaryMode::Valid,
        1 => BoundaryMode::Periodic,
        b => return Err(FormatError::Malformed(format!("unknown boundary mode {b}")).into()),
    };
    let hist_bins = Some(s.len()?).filter(|&b| b > 0);
    let hist_weight = s.f64()?;
    let min_side = Some(s.len()?).filter(|&m| m > 0);
    let min_cluster = s.len()?;
    s.finish("config")?;
    let config = ModelConfig {
        wavelet: WaveletConfig { levels, epsilon },
        boundary,
        hist_bins,
        hist_weight,
        min_side,
        min_cluster,
    };

    let mut s = r.section()?;
    let rng_seed = s.u64()?;
    let count = s.len()?;
    let mut patches = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let side = s.len()?;
        let source = PatchSource {
            image: s.len()?,
            level: s.len()?,
            x: s.len()?,
            y: s.len()?,
        };
        let values = s.f64s(3 * side * side)?;
        patches.push(Patch {
            side,
            values,
            source,
        });
    }
    s.finish("bank")?;

    let mut s = r.section()?;
    let n = s.len()?;
    let selection = s.take(n)?.iter().map(|&b| b != 0).collect();
    let nv = s.len()?;
    let variances = s.f64s(nv)?;
    s.finish("mask")?;

    let mut s = r.section()?;
    let train_features = s.matrix()?;
    s.finish("features")?;

    let mut s = r.section()?;
    let train_hists = match s.u8()? {
        0 => None,
        1 => Some(s.matrix()?),
        b => return Err(FormatError::Malformed(format!("bad histogram flag {b}")).into()),
    };
    s.finish("hists")?;

    let mut s = r.section()?;
    let n = s.len()?;
    let labels = (0..n)
        .map(|_| {
            let len = s.len()?;
            String::from_utf8(s.take(len)?.to_vec()).map_err(|_| malformed("label is not UTF-8"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    s.finish("labels")?;
    r.finish("file")?;

    let bank = PatchBank::new(patches, selection, rng_seed)
        .map_err(|e| FormatError::Malformed(e.to_string()))?;
    NNModel::new(bank, variances, train_features, train_hists, labels, config)
        .map_err(|e| FormatError::Malformed(e.to_string()).into())
}

pub fn save_model(model: &NNModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<NNModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> NNModel {
        let patches = (0..3)
            .map(|i| Patch {
                side: 2,
                values: (0..12).map(|v| (v + i) as f64 / 10.0).collect(),
                source: PatchSource {
                    image: i,
                    level: 1 + i % 2,
                    x: i,
                    y: 2 * i,
                },
            })
            .collect();
        let bank = PatchBank::new(patches, vec![true, false, true], 99).unwrap();
        NNModel::new(
            bank,
            vec![0.5, 0.1, 0.7],
            vec![vec![1.0, 2.0], vec![3.0, -4.5]],
            Some(vec![vec![0.5, 0.5], vec![1.0, 0.0]]),
            vec!["cat".into(), "chien ü".into()],
            ModelConfig {
                hist_bins: Some(2),
                min_side: Some(140),
                ..Default::default()
            },
        )
        .unwrap()
    }

    fn err(bytes: &[u8]) -> FormatError {
        match decode_model(bytes) {
            Err(Error::Format(e)) => e,
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_canonical() {
        let m = sample();
        let bytes = encode_model(&m);
        let back = decode_model(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(encode_model(&back), bytes);
    }

    #[test]
    fn truncation_is_detected() {
        let bytes = encode_model(&sample());
        for cut in [1, 5, bytes.len() - 9] {
            let e = err(&bytes[..bytes.len() - cut]);
            assert!(
                matches!(
                    e,
                    FormatError::ChecksumMismatch { .. } | FormatError::Truncated { .. }
                ),
                "{e:?}"
            );
        }
        assert!(matches!(err(&bytes[..6]), FormatError::Truncated { .. }));
    }

    #[test]
    fn version_gate_names_both_versions() {
        let mut bytes = encode_model(&sample());
        bytes[4..8].copy_from_slice(&99u32.to_le_bytes());
        let e = err(&bytes);
        assert_eq!(
            e,
            FormatError::UnsupportedVersion {
                found: 99,
                supported: 1
            }
        );
        let msg = e.to_string();
        assert!(msg.contains("99") && msg.contains('1'));
    }

    #[test]
    fn bad_magic_and_flipped_bits() {
        let mut bytes = encode_model(&sample());
        bytes[0] = b'X';
        assert!(matches!(err(&bytes), FormatError::BadMagic { .. }));
        let mut bytes = encode_model(&sample());
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        assert!(matches!(err(&bytes), FormatError::ChecksumMismatch { .. }));
    }
}
