//! Grid serialization: CSV, JSON and a gnuplot script for colour panels.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{FieldGrid, PointFlag};

pub const CSV_HEADER: &str = "x,t,re_u,im_u,abs_u,re_q,im_q,flag";

/// CSV text, t-major rows. Numbers use the shortest representation that
/// round-trips.
pub fn grid_csv_string(grid: &FieldGrid) -> String {
    let mut out = String::with_capacity(64 * grid.q.len() + 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (it, t) in grid.ts.iter().enumerate() {
        for (ix, x) in grid.xs.iter().enumerate() {
            let k = grid.index(it, ix);
            let (u, q) = (grid.u[k], grid.q[k]);
            let _ = writeln!(
                out,
                "{x},{t},{},{},{},{},{},{}",
                u.re,
                u.im,
                u.norm(),
                q.re,
                q.im,
                grid.flags[k].as_str()
            );
        }
    }
    out
}

pub fn write_grid_csv(grid: &FieldGrid, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, grid_csv_string(grid))?;
    Ok(())
}

fn parse_flag(s: &str) -> Option<PointFlag> {
    match s {
        "ok" => Some(PointFlag::Ok),
        "near_singular" => Some(PointFlag::NearSingular),
        "error" => Some(PointFlag::Error),
        _ => None,
    }
}

/// Inverse of [`grid_csv_string`]. The digest is not stored in CSV and comes
/// back empty.
pub fn parse_grid_csv(text: &str) -> Result<FieldGrid> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ts: Vec<f64> = Vec::new();
    let (mut q, mut u, mut flags) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines {
        let bad = |column: usize, message: String| Error::Parse {
            line: i + 1,
            column,
            message,
        };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(bad(1, format!("expected 8 columns, found {}", cols.len())));
        }
        let mut v = [0.0f64; 7];
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = cols[j]
                .parse()
                .map_err(|_| bad(j + 1, format!("not a number: `{}`", cols[j])))?;
        }
        let flag =
            parse_flag(cols[7]).ok_or_else(|| bad(8, format!("unknown flag `{}`", cols[7])))?;
        let [x, t, re_u, im_u, _, re_q, im_q] = v;
        if ts.last().is_none_or(|&l| l.to_bits() != t.to_bits()) {
            ts.push(t);
        }
        if ts.len() == 1 {
            xs.push(x);
        }
        u.push(Complex64::new(re_u, im_u));
        q.push(Complex64::new(re_q, im_q));
        flags.push(flag);
    }
    let grid = FieldGrid {
        xs,
        ts,
        q,
        u,
        flags,
        config_digest: String::new(),
    };
    grid.validate()?;
    Ok(grid)
}

pub fn grid_json_string(grid: &FieldGrid) -> String {
    serde_json::to_string(grid).expect("grid serializes")
}

pub fn write_grid_json(grid: &FieldGrid, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, grid_json_string(grid))?;
    Ok(())
}

pub fn read_grid_json(path: impl AsRef<Path>) -> Result<FieldGrid> {
    let text = std::fs::read_to_string(path)?;
    let grid: FieldGrid = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    grid.validate()?;
    Ok(grid)
}

/// A gnuplot script drawing `|u|` from the CSV written next to it.
pub fn gnuplot_script(csv_name: &str, title: &str, png_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{png_name}'\n\
         set title '{title}'\n\
         set xlabel 'x'\n\
         set ylabel 't'\n\
         set view map\n\
         set pm3d at b\n\
         unset surface\n\
         set palette rgbformulae 33,13,10\n\
         splot '{csv_name}' every ::1 using 1:2:5 with pm3d notitle\n"
    )
}
