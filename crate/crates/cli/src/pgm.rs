//! Binary PGM (P5) reading and writing.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;

use dualphase::{AmplitudeMap, Grid, PhaseElement, A_MAX};

use crate::error::{CliError, Result};

/// Gray levels of an image normalized to `[0, 1]` (0 → 0.0, maxval → 1.0).
pub fn load_grayscale(path: &Path) -> Result<Grid<f64>> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes, path)
}

pub fn load_amplitude(path: &Path) -> Result<AmplitudeMap> {
    let gray = load_grayscale(path)?;
    Ok(AmplitudeMap::new(gray.map(|g| (g * A_MAX).min(A_MAX)))?)
}

/// Gray `g ∈ [0, 1]` maps to phase `−π + 2π·g`, wrapped into `(−π, π]`.
pub fn load_phase(path: &Path) -> Result<PhaseElement> {
    let gray = load_grayscale(path)?;
    Ok(PhaseElement::from_grid(gray.map(|g| -PI + TAU * g))?)
}

struct Header {
    width: usize,
    height: usize,
    maxval: u64,
    data_start: usize,
}

fn malformed(path: &Path, reason: impl Into<String>) -> CliError {
    CliError::MalformedHeader {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn parse_header(bytes: &[u8], path: &Path) -> Result<Header> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(malformed(path, "missing P5 magic number"));
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for (k, field) in fields.iter_mut().enumerate() {
        // Whitespace and comments may precede each field.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n' && b != b'\r') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(malformed(path, "header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let digits = std::str::from_utf8(&bytes[start..pos]).unwrap_or_default();
        *field = digits
            .parse()
            .map_err(|_| malformed(path, format!("header field {} is not a number", k + 1)))?;
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(malformed(path, "no whitespace after maxval"));
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(malformed(path, format!("degenerate size {width}x{height}")));
    }
    if maxval == 0 || maxval > u64::from(u16::MAX) {
        return Err(CliError::UnsupportedDepth {
            path: path.to_path_buf(),
            maxval,
        });
    }
    Ok(Header {
        width: usize::try_from(width).map_err(|_| malformed(path, "width too large"))?,
        height: usize::try_from(height).map_err(|_| malformed(path, "height too large"))?,
        maxval,
        data_start: pos + 1,
    })
}

fn decode(bytes: &[u8], path: &Path) -> Result<Grid<f64>> {
    let header = parse_header(bytes, path)?;
    let wide = header.maxval > 255;
    let sample_bytes = if wide { 2 } else { 1 };
    let count = header.width * header.height;
    let expected = count * sample_bytes;
    let raster = &bytes[header.data_start..];
    if raster.len() < expected {
        return Err(CliError::Truncated {
            path: path.to_path_buf(),
            got: raster.len(),
            expected,
        });
    }
    let max = header.maxval as f64;
    let values: Vec<f64> = if wide {
        raster[..expected]
            .chunks_exact(2)
            .map(|pair| f64::from(u16::from_be_bytes([pair[0], pair[1]])) / max)
            .collect()
    } else {
        raster[..expected].iter().map(|&g| f64::from(g) / max).collect()
    };
    if values.iter().any(|&v| v > 1.0) {
        return Err(CliError::MalformedData {
            path: path.to_path_buf(),
            reason: format!("sample exceeds maxval {}", header.maxval),
        });
    }
    Ok(Grid::from_vec(header.width, header.height, values).expect("raster length checked"))
}

/// Round-half-up quantization of `x ∈ [0, 1]` to 8 bits.
pub fn quantize(x: f64) -> u8 {
    (x * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Gray level of a phase: `round((α + π) / 2π · 255)`.
pub fn phase_to_gray(alpha: f64) -> u8 {
    quantize((alpha + PI) / TAU)
}

pub fn encode_8bit(width: usize, height: usize, gray: &[u8]) -> Vec<u8> {
    debug_assert_eq!(gray.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(gray);
    out
}

fn write(path: &Path, width: usize, height: usize, gray: &[u8]) -> Result<()> {
    fs::write(path, encode_8bit(width, height, gray)).map_err(|e| CliError::io(path, e))
}

pub fn save_phase_bitmap(alpha: &PhaseElement, path: &Path) -> Result<()> {
    let gray: Vec<u8> = alpha.as_slice().iter().map(|&a| phase_to_gray(a)).collect();
    write(path, alpha.width(), alpha.height(), &gray)
}

/// Amplitudes in `[0, A_max]` scaled to the full 8-bit range; values outside are clipped.
pub fn save_amplitude(amplitude: &Grid<f64>, path: &Path) -> Result<()> {
    let gray: Vec<u8> = amplitude.as_slice().iter().map(|&a| quantize(a / A_MAX)).collect();
    write(path, amplitude.width(), amplitude.height(), &gray)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decode_bytes(bytes: &[u8]) -> Result<Grid<f64>> {
        decode(bytes, Path::new("mem.pgm"))
    }

    #[test]
    fn gray_examples() {
        let mut img = b"P5\n3 1\n255\n".to_vec();
        img.extend_from_slice(&[0, 255, 128]);
        let g = decode_bytes(&img).unwrap();
        assert_eq!(g.as_slice()[0], 0.0);
        assert_eq!(g.as_slice()[1], 1.0);
        assert!((g.as_slice()[2] - 0.50196).abs() < 1e-5);

        let zeros = [b"P5 2 2 255\n".as_slice(), &[0; 4]].concat();
        assert!(decode_bytes(&zeros).unwrap().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sixteen_bit_is_big_endian() {
        let img = [b"P5\n# comment\n2 1\n65535\n".as_slice(), &[0xff, 0xff, 0x80, 0x00]].concat();
        let g = decode_bytes(&img).unwrap();
        assert_eq!(g.as_slice()[0], 1.0);
        assert!((g.as_slice()[1] - 32768.0 / 65535.0).abs() < 1e-12);
    }

    #[test]
    fn phase_gray_examples() {
        assert_eq!(phase_to_gray(-PI + 1e-9), 0);
        assert_eq!(phase_to_gray(PI), 255);
        assert_eq!(phase_to_gray(0.0), 128);
    }

    #[test]
    fn header_errors_are_distinguished() {
        assert!(matches!(
            decode_bytes(b"P2\n1 1\n255\n0"),
            Err(CliError::MalformedHeader { .. })
        ));
        assert!(matches!(
            decode_bytes(b"P5\n1 x\n255\n0"),
            Err(CliError::MalformedHeader { .. })
        ));
        assert!(matches!(
            decode_bytes(b"P5\n0 1\n255\n"),
            Err(CliError::MalformedHeader { .. })
        ));
        assert!(matches!(
            decode_bytes(b"P5\n1 1\n70000\n00"),
            Err(CliError::UnsupportedDepth { .. })
        ));
        assert!(matches!(
            decode_bytes(b"P5\n1 1\n0\n0"),
            Err(CliError::UnsupportedDepth { .. })
        ));
        assert!(matches!(
            decode_bytes(b"P5\n2 2\n255\n\x01"),
            Err(CliError::Truncated { .. })
        ));
        assert!(matches!(
            decode_bytes(b"P5\n1 1\n100\n\xff"),
            Err(CliError::MalformedData { .. })
        ));
    }
}
