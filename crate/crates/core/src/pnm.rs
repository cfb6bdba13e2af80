//! Minimal binary netpbm support: P6 (RGB frames) and P5 (gray glyphs).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, RgbRaster};

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    maxval: usize,
    data_offset: usize,
}

fn parse_header(bytes: &[u8]) -> std::result::Result<Header, String> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err("missing netpbm magic".into());
    }
    let magic = [bytes[0], bytes[1]];
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err("truncated header".into()),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err("expected a decimal header field".into());
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|e| format!("bad header field: {e}"))?;
    }
    // exactly one whitespace byte before the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("missing whitespace after maxval".into());
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err("zero image dimension".into());
    }
    if maxval == 0 || maxval > 255 {
        return Err(format!("unsupported maxval {maxval}"));
    }
    Ok(Header {
        magic,
        width,
        height,
        maxval,
        data_offset: pos + 1,
    })
}

fn scale(v: u8, maxval: usize) -> u8 {
    if maxval == 255 {
        v
    } else {
        ((v as usize * 255 + maxval / 2) / maxval).min(255) as u8
    }
}

fn unreadable(path: &Path, reason: impl Into<String>) -> Error {
    Error::UnreadableImage {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

pub fn decode_ppm(bytes: &[u8]) -> std::result::Result<RgbRaster, String> {
    let h = parse_header(bytes)?;
    if &h.magic != b"P6" {
        return Err("not a binary PPM (P6)".into());
    }
    let need = h.width * h.height * 3;
    let data = bytes
        .get(h.data_offset..h.data_offset + need)
        .ok_or("truncated pixel data")?;
    let pixels = data
        .chunks_exact(3)
        .map(|c| {
            [
                scale(c[0], h.maxval),
                scale(c[1], h.maxval),
                scale(c[2], h.maxval),
            ]
        })
        .collect();
    RgbRaster::new(h.width, h.height, pixels).map_err(|e| e.to_string())
}

/// Decodes a binary PGM (P5) into raw 8-bit intensities.
pub fn decode_pgm(bytes: &[u8]) -> std::result::Result<(usize, usize, Vec<u8>), String> {
    let h = parse_header(bytes)?;
    if &h.magic != b"P5" {
        return Err("not a binary PGM (P5)".into());
    }
    let need = h.width * h.height;
    let data = bytes
        .get(h.data_offset..h.data_offset + need)
        .ok_or("truncated pixel data")?;
    Ok((
        h.width,
        h.height,
        data.iter().map(|&v| scale(v, h.maxval)).collect(),
    ))
}

pub fn encode_ppm(frame: &RgbRaster) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend(frame.to_rgb8());
    out
}

pub fn encode_pgm(width: usize, height: usize, gray: &[u8]) -> Vec<u8> {
    assert_eq!(width * height, gray.len());
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(gray);
    out
}

/// Binary mask as a PGM with lit pixels at 255.
pub fn encode_mask_pgm(mask: &BinaryRaster) -> Vec<u8> {
    let gray: Vec<u8> = mask.pixels().iter().map(|&p| p * 255).collect();
    encode_pgm(mask.width(), mask.height(), &gray)
}

pub fn read_ppm(path: &Path) -> Result<RgbRaster> {
    let bytes = fs::read(path).map_err(|e| unreadable(path, e.to_string()))?;
    decode_ppm(&bytes).map_err(|e| unreadable(path, e))
}

pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| unreadable(path, e.to_string()))?;
    decode_pgm(&bytes).map_err(|e| unreadable(path, e))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Lists `*.ppm` files with numeric stems in ascending numeric order.
pub fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut frames = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if !path.is_file() || path.extension().and_then(|e| e.to_str()) != Some("ppm") {
            continue;
        }
        let Some(index) = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.parse::<u64>().ok())
        else {
            continue;
        };
        frames.push((index, path));
    }
    frames.sort();
    Ok(frames.into_iter().map(|(_, p)| p).collect())
}

pub fn read_frame_dir(dir: &Path) -> Result<Vec<RgbRaster>> {
    frame_paths(dir)?.iter().map(|p| read_ppm(p)).collect()
}

/// Writes frames as `000001.ppm`, `000002.ppm`, ...
pub fn write_frame_dir(dir: &Path, frames: &[RgbRaster]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (i, frame) in frames.iter().enumerate() {
        write_file(&dir.join(format!("{:06}.ppm", i + 1)), &encode_ppm(frame))?;
    }
    Ok(())
}
