//! Big-endian IDX files: `u32` magic, `u32` dimensions, then unsigned bytes.

use std::fs;
use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt, WriteBytesExt};

use super::Dataset;
use crate::{Error, Result, Scalar};

pub const IDX_IMAGE_MAGIC: u32 = 2051;
pub const IDX_LABEL_MAGIC: u32 = 2049;

fn truncated(what: &str) -> Error {
    Error::format("idx", format!("truncated {what}"))
}

fn check_magic(cursor: &mut Cursor<&[u8]>, expected: u32) -> Result<()> {
    let magic = cursor.read_u32::<BigEndian>().map_err(|_| truncated("header"))?;
    if magic != expected {
        return Err(Error::format("idx", format!("magic {magic}, expected {expected}")));
    }
    Ok(())
}

/// Parses image bytes into `(rows, cols, images)` with pixels scaled by `1/255`,
/// keeping at most `limit` images.
pub fn read_idx_images<T: Scalar>(bytes: &[u8], limit: usize) -> Result<(usize, usize, Vec<Vec<T>>)> {
    let mut c = Cursor::new(bytes);
    check_magic(&mut c, IDX_IMAGE_MAGIC)?;
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = c.read_u32::<BigEndian>().map_err(|_| truncated("header"))? as usize;
    }
    let [count, rows, cols] = dims;
    let size = rows * cols;
    let take = count.min(limit);
    let mut buf = vec![0u8; size];
    let scale = T::lit(255.0);
    let mut images = Vec::with_capacity(take);
    for _ in 0..take {
        c.read_exact(&mut buf).map_err(|_| truncated("image payload"))?;
        images.push(buf.iter().map(|&b| T::from_u8(b).unwrap() / scale).collect());
    }
    if take == count && (c.position() as usize) < bytes.len() {
        return Err(Error::format("idx", "trailing bytes after image payload"));
    }
    if take < count && bytes.len() < 16 + count * size {
        return Err(truncated("image payload"));
    }
    Ok((rows, cols, images))
}

/// Parses label bytes, keeping at most `limit`. Also returns the stored count.
pub fn read_idx_labels(bytes: &[u8], limit: usize) -> Result<(usize, Vec<usize>)> {
    let mut c = Cursor::new(bytes);
    check_magic(&mut c, IDX_LABEL_MAGIC)?;
    let count = c.read_u32::<BigEndian>().map_err(|_| truncated("header"))? as usize;
    if bytes.len() != 8 + count {
        return Err(truncated("label payload"));
    }
    Ok((count, bytes[8..8 + count.min(limit)].iter().map(|&b| b as usize).collect()))
}

/// Loads images only.
pub fn idx_load_images<T: Scalar>(images: impl AsRef<Path>, limit: usize) -> Result<Dataset<T>> {
    let bytes = fs::read(images.as_ref())?;
    let (_, _, samples) = read_idx_images(&bytes, limit)?;
    Dataset::new(samples, None, name_of(images.as_ref()))
}

/// Loads an image file and its label file; the stored counts must agree.
pub fn idx_load<T: Scalar>(images: impl AsRef<Path>, labels: impl AsRef<Path>, limit: usize) -> Result<Dataset<T>> {
    let image_bytes = fs::read(images.as_ref())?;
    let label_bytes = fs::read(labels.as_ref())?;
    let (_, _, samples) = read_idx_images(&image_bytes, limit)?;
    let (count, labels) = read_idx_labels(&label_bytes, limit)?;
    let image_count = u32::from_be_bytes(image_bytes[4..8].try_into().unwrap()) as usize;
    if count != image_count {
        return Err(Error::format(
            "idx",
            format!("{image_count} images but {count} labels"),
        ));
    }
    Dataset::new(samples, Some(labels), name_of(images.as_ref()))
}

fn name_of(path: &Path) -> String {
    path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

fn to_byte<T: Scalar>(v: T) -> u8 {
    (v.to_f64_lossy() * 255.0).round().clamp(0.0, 255.0) as u8
}

impl<T: Scalar> Dataset<T> {
    /// Encodes the samples as an IDX image file of `rows × cols` images, rounding each
    /// value to the nearest multiple of `1/255`.
    pub fn to_idx_images(&self, rows: usize, cols: usize) -> Result<Vec<u8>> {
        if !self.is_empty() && rows * cols != self.dim() {
            return Err(Error::dims("idx image size", self.dim(), rows * cols));
        }
        let mut out = Vec::with_capacity(16 + self.len() * rows * cols);
        out.write_u32::<BigEndian>(IDX_IMAGE_MAGIC)?;
        for d in [self.len(), rows, cols] {
            out.write_u32::<BigEndian>(d as u32)?;
        }
        out.extend(self.samples().iter().flatten().map(|&v| to_byte(v)));
        Ok(out)
    }

    pub fn to_idx_labels(&self) -> Result<Vec<u8>> {
        let labels = self
            .labels()
            .ok_or_else(|| Error::invalid("dataset has no labels"))?;
        let mut out = Vec::with_capacity(8 + labels.len());
        out.write_u32::<BigEndian>(IDX_LABEL_MAGIC)?;
        out.write_u32::<BigEndian>(labels.len() as u32)?;
        for &l in labels {
            out.push(u8::try_from(l).map_err(|_| Error::invalid(format!("label {l} exceeds 255")))?);
        }
        Ok(out)
    }

    /// Writes the images and, when present, the labels.
    pub fn write_idx(&self, rows: usize, cols: usize, images: impl AsRef<Path>, labels: Option<&Path>) -> Result<()> {
        fs::write(images, self.to_idx_images(rows, cols)?)?;
        if let Some(p) = labels {
            fs::write(p, self.to_idx_labels()?)?;
        }
        Ok(())
    }
}
