//! Text files on disk: fixed-width little-endian symbols, one symbol per
//! byte for alphabets up to 255.

use deltakit::{Error, Text};
use std::path::Path;

/// Smallest width (1, 2, or 4 bytes) that fits every symbol of `text`.
pub fn width_for(text: &Text) -> u8 {
    match text.sigma() {
        0..=0xff => 1,
        0x100..=0xffff => 2,
        _ => 4,
    }
}

pub fn read_text(path: &Path, width: u8) -> Result<Text, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    decode_text(&bytes, width).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn decode_text(bytes: &[u8], width: u8) -> Result<Text, Error> {
    let text = match width {
        1 => Text::from_bytes(bytes)?,
        2 | 4 => {
            let w = width as usize;
            if !bytes.len().is_multiple_of(w) {
                return Err(Error::InvalidInput(format!(
                    "file length {} not a multiple of symbol width {w}",
                    bytes.len()
                )));
            }
            let syms: Vec<u32> = bytes
                .chunks_exact(w)
                .map(|c| {
                    let mut v = 0u32;
                    for (i, &b) in c.iter().enumerate() {
                        v |= u32::from(b) << (8 * i);
                    }
                    v
                })
                .collect();
            if syms.contains(&0) {
                return Err(Error::InvalidInput("symbol 0 is not valid".into()));
            }
            let sigma = syms.iter().copied().max().unwrap_or(1);
            Text::new(syms, sigma)?
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "symbol width must be 1, 2, or 4 (got {other})"
            )))
        }
    };
    Ok(text)
}

pub fn encode_text(text: &Text, width: u8) -> Vec<u8> {
    let w = width as usize;
    let mut out = Vec::with_capacity(text.len() * w);
    for &s in text.symbols() {
        for i in 0..w {
            out.push((s >> (8 * i)) as u8);
        }
    }
    out
}

pub fn write_text(path: &Path, text: &Text) -> Result<u8, String> {
    let width = width_for(text);
    std::fs::write(path, encode_text(text, width))
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(width)
}
