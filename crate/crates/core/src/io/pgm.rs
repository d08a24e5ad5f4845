//! Binary PGM (P5) with maxval 255.
//!
//! The writer emits one canonical form, `P5\n<cols> <rows>\n255\n` followed by
//! the raw pixels, so equal images always encode to equal bytes. The reader
//! accepts any whitespace and `#` comments in the header.

use super::IoError;
use crate::raster::Image;

/// Canonical header for a `rows x cols` image.
pub fn header(rows: usize, cols: usize) -> String {
    format!("P5\n{cols} {rows}\n255\n")
}

pub fn encode(img: &Image) -> Vec<u8> {
    let header = header(img.rows(), img.cols());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.pixels());
    out
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.data.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64, IoError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(IoError::MalformedHeader(format!("expected {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| IoError::MalformedHeader(format!("{what} out of range")))
    }
}

pub fn decode(data: &[u8]) -> Result<Image, IoError> {
    match data.get(..2) {
        Some(b"P5") => {}
        Some([b'P', b'1'..=b'7']) => {
            return Err(IoError::UnsupportedFormat(format!(
                "netpbm variant {} (only binary P5 grayscale is supported)",
                String::from_utf8_lossy(&data[..2])
            )))
        }
        _ => return Err(IoError::MalformedHeader("missing P5 magic".into())),
    }
    let mut cur = HeaderCursor { data, pos: 2 };
    let cols = cur.number("width")?;
    let rows = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(IoError::UnsupportedDepth(format!("PGM maxval {maxval}")));
    }
    if cols == 0 || rows == 0 {
        return Err(IoError::MalformedHeader(format!(
            "zero dimension {cols}x{rows}"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match data.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(IoError::MalformedHeader(
                "missing separator after maxval".into(),
            ))
        }
    }
    let (rows, cols) = (rows as usize, cols as usize);
    let expected = rows
        .checked_mul(cols)
        .ok_or_else(|| IoError::MalformedHeader("dimensions overflow".into()))?;
    let raster = &data[cur.pos..];
    if raster.len() < expected {
        return Err(IoError::Truncated {
            expected,
            actual: raster.len(),
        });
    }
    Image::new(rows, cols, raster[..expected].to_vec())
        .map_err(|e| IoError::MalformedHeader(e.to_string()))
}
