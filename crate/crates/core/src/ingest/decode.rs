//! Raster decoding (PGM P2/P5, PNG) to grayscale and PGM encoding.

use std::io::Cursor;
use std::path::Path;

use super::Image;
use crate::error::{Error, Result};

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

/// Luma weights applied to RGB inputs.
pub const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// Reads a PGM or PNG file and converts it to a grayscale [`Image`].
pub fn decode_grayscale(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_bytes(&bytes, path)
}

/// Like [`decode_grayscale`] but from memory; `path` is only used in errors.
pub fn decode_bytes(bytes: &[u8], path: &Path) -> Result<Image> {
    if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes, path)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        decode_pgm(bytes, path)
    } else {
        Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            reason: "expected a PGM (P2/P5) or PNG file".into(),
        })
    }
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

struct PgmHeader {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_pgm_header(bytes: &[u8], path: &Path) -> Result<PgmHeader> {
    let binary = &bytes[..2] == b"P5";
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(malformed(path, "truncated PGM header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(path, "bad number in PGM header"))?;
    }
    // exactly one whitespace byte separates the header from binary data
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(malformed(path, "missing whitespace after PGM header"));
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(malformed(path, "zero PGM dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            reason: format!("PGM maxval {maxval} not in 1..=65535"),
        });
    }
    Ok(PgmHeader {
        binary,
        width: width as usize,
        height: height as usize,
        maxval,
        data_start: pos + 1,
    })
}

fn decode_pgm(bytes: &[u8], path: &Path) -> Result<Image> {
    let hdr = parse_pgm_header(bytes, path)?;
    let n = hdr.width * hdr.height;
    let maxval = hdr.maxval as f64;
    let body = &bytes[hdr.data_start.min(bytes.len())..];
    let mut data = Vec::with_capacity(n);
    if hdr.binary {
        let wide = hdr.maxval > 255;
        let need = if wide { 2 * n } else { n };
        if body.len() < need {
            return Err(malformed(
                path,
                format!("PGM body has {} bytes, expected {need}", body.len()),
            ));
        }
        if wide {
            for c in body[..need].chunks_exact(2) {
                data.push(u16::from_be_bytes([c[0], c[1]]) as f64 / maxval);
            }
        } else {
            data.extend(body[..n].iter().map(|&b| b as f64 / maxval));
        }
    } else {
        let text = std::str::from_utf8(body).map_err(|_| malformed(path, "non-ASCII PGM body"))?;
        for tok in text.split_ascii_whitespace().take(n) {
            let v: u32 = tok
                .parse()
                .map_err(|_| malformed(path, format!("bad PGM sample {tok:?}")))?;
            data.push(v as f64 / maxval);
        }
        if data.len() < n {
            return Err(malformed(
                path,
                format!("PGM body has {} samples, expected {n}", data.len()),
            ));
        }
    }
    Image::new(hdr.width, hdr.height, data).map_err(|e| malformed(path, e.to_string()))
}

fn decode_png(bytes: &[u8], path: &Path) -> Result<Image> {
    let png_err = |e: png::DecodingError| malformed(path, e.to_string());
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| malformed(path, "PNG too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(png_err)?;

    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                reason: "unexpanded indexed PNG".into(),
            })
        }
    };
    let (bytes_per_sample, maxval) = match info.bit_depth {
        png::BitDepth::Eight => (1, 255.0),
        png::BitDepth::Sixteen => (2, 65535.0),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                reason: format!("PNG bit depth {other:?}"),
            })
        }
    };
    let (w, h) = (info.width as usize, info.height as usize);
    let sample = |row: &[u8], i: usize| -> f64 {
        let v = if bytes_per_sample == 1 {
            row[i] as f64
        } else {
            u16::from_be_bytes([row[2 * i], row[2 * i + 1]]) as f64
        };
        v / maxval
    };
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = &buf[y * info.line_size..(y + 1) * info.line_size];
        for x in 0..w {
            let base = x * channels;
            let v = if channels >= 3 {
                LUMA[0] * sample(row, base)
                    + LUMA[1] * sample(row, base + 1)
                    + LUMA[2] * sample(row, base + 2)
            } else {
                sample(row, base)
            };
            data.push(v.clamp(0.0, 1.0));
        }
    }
    Image::new(w, h, data).map_err(|e| malformed(path, e.to_string()))
}

/// Encodes a binary PGM (P5) at 8 or 16 bits per sample, rounding to nearest.
pub fn encode_pgm(img: &Image, bits: u8) -> Result<Vec<u8>> {
    let maxval: u32 = match bits {
        8 => 255,
        16 => 65535,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "PGM bit depth must be 8 or 16, got {bits}"
            )))
        }
    };
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    for &v in img.data() {
        let q = (v * maxval as f64).round() as u32;
        if bits == 8 {
            out.push(q as u8);
        } else {
            out.extend_from_slice(&(q as u16).to_be_bytes());
        }
    }
    Ok(out)
}

pub fn write_pgm(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(img, 8)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn png_bytes(
        w: u32,
        h: u32,
        color: png::ColorType,
        depth: png::BitDepth,
        data: &[u8],
    ) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, w, h);
            enc.set_color(color);
            enc.set_depth(depth);
            let mut writer = enc.write_header().unwrap();
            writer.write_image_data(data).unwrap();
        }
        out
    }

    #[test]
    fn binary_pgm_endpoint_scaling() {
        let bytes = b"P5\n2 2\n255\n\x00\xff\xff\x00";
        let img = decode_bytes(bytes, Path::new("t.pgm")).unwrap();
        assert_eq!(img.data(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn ascii_pgm_with_comments() {
        let bytes = b"P2\n# comment\n2 1\n# another\n15\n0 15\n";
        let img = decode_bytes(bytes, Path::new("t.pgm")).unwrap();
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn sixteen_bit_pgm() {
        let bytes = b"P5 1 1 65535\n\x80\x00";
        let img = decode_bytes(bytes, Path::new("t.pgm")).unwrap();
        assert_eq!(img.data(), &[32768.0 / 65535.0]);
    }

    #[test]
    fn truncated_pgm_names_path() {
        let err = decode_bytes(b"P5\n4 4\n255\n\x00", Path::new("broken.pgm")).unwrap_err();
        assert!(err.to_string().contains("broken.pgm"), "{err}");
    }

    #[test]
    fn unsupported_format_names_path() {
        let err = decode_bytes(b"GIF89a....", Path::new("x.gif")).unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat { .. }));
        assert!(err.to_string().contains("x.gif"));
    }

    #[test]
    fn solid_white_png() {
        let bytes = png_bytes(
            8,
            8,
            png::ColorType::Grayscale,
            png::BitDepth::Eight,
            &[255; 64],
        );
        let img = decode_bytes(&bytes, Path::new("w.png")).unwrap();
        assert!(img.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn red_rgb_png_uses_luma() {
        let bytes = png_bytes(
            1,
            1,
            png::ColorType::Rgb,
            png::BitDepth::Eight,
            &[255, 0, 0],
        );
        let img = decode_bytes(&bytes, Path::new("r.png")).unwrap();
        assert!((img.data()[0] - 0.299).abs() < 1e-15);
    }

    #[test]
    fn sixteen_bit_gray_png() {
        let bytes = png_bytes(
            2,
            1,
            png::ColorType::Grayscale,
            png::BitDepth::Sixteen,
            &[0, 0, 0xff, 0xff],
        );
        let img = decode_bytes(&bytes, Path::new("g.png")).unwrap();
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn missing_file_reports_path() {
        let err = decode_grayscale("/nonexistent/file.pgm").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/file.pgm"));
    }

    #[test]
    fn pgm_round_trip_at_8_bits() {
        let data: Vec<f64> = (0..=255).map(|k| k as f64 / 255.0).collect();
        let img = Image::new(16, 16, data).unwrap();
        let once = decode_bytes(&encode_pgm(&img, 8).unwrap(), Path::new("a")).unwrap();
        let twice = decode_bytes(&encode_pgm(&once, 8).unwrap(), Path::new("b")).unwrap();
        assert_eq!(once, img);
        assert_eq!(twice, once);
    }
}
