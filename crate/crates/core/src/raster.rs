//! Raster buffers, color/luma conversion and PNG I/O.
//!
//! All downstream stages operate on [`ImageBuffer`] (row-major RGBA8) and
//! [`LumaBuffer`] (row-major luma in `[0, 1]`). Buffers are immutable once
//! built; every transformation returns a new buffer.

use std::io::BufReader;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};
use crate::util::maybe_par_map;

/// One RGBA sample, 8 bits per channel.
pub type Rgba = [u8; 4];

/// Row-major RGBA8 raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    pixels: Vec<Rgba>,
}

impl ImageBuffer {
    /// Creates a buffer from raw pixels. The pixel count must match the
    /// dimensions and both dimensions must be at least 1.
    pub fn new(width: u32, height: u32, pixels: Vec<Rgba>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::contract("image dimensions must be at least 1x1"));
        }
        if pixels.len() != (width as usize) * (height as usize) {
            return Err(Error::contract(format!(
                "pixel count {} does not match {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            pixels,
        })
    }

    /// Uniformly filled buffer.
    pub fn filled(width: u32, height: u32, color: Rgba) -> Self {
        ImageBuffer {
            width,
            height,
            pixels: vec![color; (width as usize) * (height as usize)],
        }
    }

    /// Builds a buffer by evaluating `f` at every pixel coordinate.
    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> Rgba + Sync) -> Self {
        let rows = maybe_par_map(height as usize, |y| {
            (0..width).map(|x| f(x, y as u32)).collect::<Vec<_>>()
        });
        ImageBuffer {
            width,
            height,
            pixels: rows.concat(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgba {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[(y as usize) * (self.width as usize) + (x as usize)]
    }

    /// Horizontal mirror (left/right flip).
    pub fn mirrored_x(&self) -> Self {
        ImageBuffer::from_fn(self.width, self.height, |x, y| {
            self.get(self.width - 1 - x, y)
        })
    }

    /// Vertical mirror (top/bottom flip).
    pub fn mirrored_y(&self) -> Self {
        ImageBuffer::from_fn(self.width, self.height, |x, y| {
            self.get(x, self.height - 1 - y)
        })
    }

    /// Transpose (swap axes).
    pub fn transposed(&self) -> Self {
        ImageBuffer::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }
}

/// Row-major luma plane with values in `[0.0, 1.0]`, same dimensions as the
/// source image.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaBuffer {
    width: u32,
    height: u32,
    values: Vec<f32>,
}

impl LumaBuffer {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f32 {
        debug_assert!(x < self.width && y < self.height);
        self.values[(y as usize) * (self.width as usize) + (x as usize)]
    }
}

/// Rec. 709 luma weights scaled by 10000, applied to the stored
/// (gamma-encoded) channel values. Integer accumulation keeps the result
/// exact and platform independent; alpha is ignored.
#[inline]
fn luma_of(px: Rgba) -> f32 {
    let acc = 2126u32 * px[0] as u32 + 7152 * px[1] as u32 + 722 * px[2] as u32;
    (acc as f64 / 2_550_000.0) as f32
}

/// Computes the per-pixel luma plane of an image.
pub fn compute_luma(image: &ImageBuffer) -> LumaBuffer {
    compute_luma_with(image, true)
}

pub(crate) fn compute_luma_with(image: &ImageBuffer, par: bool) -> LumaBuffer {
    let width = image.width;
    let rows = crate::util::dispatch_map(image.height as usize, par, |y| {
        let row = &image.pixels[y * width as usize..(y + 1) * width as usize];
        row.iter().map(|&px| luma_of(px)).collect::<Vec<_>>()
    });
    LumaBuffer {
        width,
        height: image.height,
        values: rows.concat(),
    }
}

/// Loads an 8-bit RGB or RGBA PNG. RGB inputs get alpha 255. Other bit
/// depths and color types are rejected with [`Error::UnsupportedFormat`].
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let decoded = image::load(BufReader::new(file), ImageFormat::Png).map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::UnsupportedFormat(u.to_string()),
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::CorruptImage(format!("{}: {}", path.display(), other)),
    })?;

    let (width, height, pixels) = match decoded {
        DynamicImage::ImageRgba8(img) => {
            let (w, h) = img.dimensions();
            let px = img.pixels().map(|p| p.0).collect();
            (w, h, px)
        }
        DynamicImage::ImageRgb8(img) => {
            let (w, h) = img.dimensions();
            let px = img
                .pixels()
                .map(|p| [p.0[0], p.0[1], p.0[2], 255])
                .collect();
            (w, h, px)
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: only 8-bit RGB/RGBA PNG is supported, got {:?}",
                path.display(),
                other.color()
            )))
        }
    };
    ImageBuffer::new(width, height, pixels)
}

/// Writes the buffer as an 8-bit RGBA PNG. Round-trips bit exactly through
/// [`load_image`].
pub fn save_image(buffer: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(buffer.pixels.len() * 4);
    for px in &buffer.pixels {
        bytes.extend_from_slice(px);
    }
    image::save_buffer_with_format(
        path,
        &bytes,
        buffer.width,
        buffer.height,
        image::ExtendedColorType::Rgba8,
        ImageFormat::Png,
    )
    .map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(other.to_string())),
    })
}
