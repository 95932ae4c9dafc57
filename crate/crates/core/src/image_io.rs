//! PNG/JPEG decoding into rasters and PNG encoding out of them.

use std::io::Cursor;
use std::path::Path;

use image::{ImageError, ImageFormat, ImageReader, RgbImage};

use crate::pipeline::PipelineError;
use crate::raster::{Raster, Rgb8};

/// Reads an 8-bit RGB raster. Alpha is dropped; wider formats are narrowed.
pub fn load_rgb(path: &Path) -> Result<Raster<Rgb8>, PipelineError> {
    let unreadable = |msg: String| PipelineError::InputUnreadable {
        path: path.display().to_string(),
        message: msg,
    };
    let reader = ImageReader::open(path)
        .map_err(|e| unreadable(e.to_string()))?
        .with_guessed_format()
        .map_err(|e| unreadable(e.to_string()))?;
    let img = reader.decode().map_err(|e| match e {
        ImageError::Unsupported(u) => PipelineError::UnsupportedFormat {
            path: path.display().to_string(),
            message: u.to_string(),
        },
        other => unreadable(other.to_string()),
    })?;
    Ok(from_rgb_image(&img.into_rgb8()))
}

pub fn from_rgb_image(img: &RgbImage) -> Raster<Rgb8> {
    Raster::from_fn(img.width() as usize, img.height() as usize, |x, y| {
        img.get_pixel(x as u32, y as u32).0
    })
    .expect("decoded images are non-empty")
}

pub fn to_rgb_image(r: &Raster<Rgb8>) -> RgbImage {
    RgbImage::from_fn(r.width() as u32, r.height() as u32, |x, y| {
        image::Rgb(*r.at(x as usize, y as usize))
    })
}

pub fn encode_png(r: &Raster<Rgb8>) -> Result<Vec<u8>, ImageError> {
    let mut buf = Cursor::new(Vec::new());
    to_rgb_image(r).write_to(&mut buf, ImageFormat::Png)?;
    Ok(buf.into_inner())
}

pub fn save_png(r: &Raster<Rgb8>, path: &Path) -> Result<(), PipelineError> {
    let write_failed = |msg: String| PipelineError::WriteFailed {
        path: path.display().to_string(),
        message: msg,
    };
    let bytes = encode_png(r).map_err(|e| write_failed(e.to_string()))?;
    std::fs::write(path, bytes).map_err(|e| write_failed(e.to_string()))
}
