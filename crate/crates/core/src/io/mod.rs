//! Configuration files, bundled presets and grid output formats.

pub mod config;
pub mod export;
pub mod pgm;
pub mod presets;

pub use config::{
    load_config, parse_config_str, ConventionSetting, GridSpec, RunConfig, VerificationToggles,
};
pub use export::{
    gnuplot_script, grid_csv_string, grid_json_string, parse_grid_csv, read_grid_json,
    write_grid_csv, write_grid_json, CSV_HEADER,
};
pub use pgm::{pgm_image, render_pgm, Channel, PgmImage, PixelRange};
