//! Binary greyscale NetPBM (`P5`) rendering of a grid channel.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FieldGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    #[default]
    AbsU,
    ReU,
}

impl Channel {
    fn value(self, grid: &FieldGrid, k: usize) -> f64 {
        match self {
            Channel::AbsU => grid.u[k].norm(),
            Channel::ReU => grid.u[k].re,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PixelRange {
    Linear {
        lo: f64,
        hi: f64,
    },
    /// `lo == hi`; every pixel is mid-grey.
    Degenerate(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub bytes: Vec<u8>,
    pub range: PixelRange,
}

impl PgmImage {
    pub fn degenerate_error(&self) -> Option<Error> {
        match self.range {
            PixelRange::Degenerate(v) => Some(Error::DegenerateRange(v)),
            PixelRange::Linear { .. } => None,
        }
    }
}

/// Width `nx`, height `nt`, top row at `t_max`. Values outside `clamp` are
/// saturated; non-finite samples are black.
pub fn pgm_image(
    grid: &FieldGrid,
    channel: Channel,
    clamp: Option<(f64, f64)>,
) -> Result<PgmImage> {
    grid.validate()?;
    let (nx, nt) = (grid.nx(), grid.nt());
    let (lo, hi) = clamp.unwrap_or_else(|| {
        (0..grid.q.len())
            .map(|k| channel.value(grid, k))
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            })
    });
    let range = if hi > lo {
        PixelRange::Linear { lo, hi }
    } else {
        PixelRange::Degenerate(if lo.is_finite() { lo } else { f64::NAN })
    };
    let mut bytes = format!("P5\n{nx} {nt}\n255\n").into_bytes();
    bytes.reserve(nx * nt);
    for it in (0..nt).rev() {
        for ix in 0..nx {
            let v = channel.value(grid, grid.index(it, ix));
            bytes.push(match range {
                PixelRange::Degenerate(_) => 128,
                PixelRange::Linear { .. } if !v.is_finite() => 0,
                PixelRange::Linear { lo, hi } => {
                    (255.0 * ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).round() as u8
                }
            });
        }
    }
    Ok(PgmImage { bytes, range })
}

pub fn render_pgm(
    grid: &FieldGrid,
    path: impl AsRef<Path>,
    channel: Channel,
    clamp: Option<(f64, f64)>,
) -> Result<PixelRange> {
    let img = pgm_image(grid, channel, clamp)?;
    std::fs::write(path, &img.bytes)?;
    Ok(img.range)
}
