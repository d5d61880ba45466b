//! Bit-exact readers and writers for depth frames (16-bit PGM), RGB frames
//! (PPM), the flat key=value config, trajectory log CSVs, and the
//! labeled-sample manifest.

mod config;
mod logcsv;
mod pnm;

pub use config::{parse_config, Config, ConfigError};
pub use logcsv::{
    read_episode_csv, read_manifest_csv, write_episode_csv, write_manifest_csv, CsvError,
};
pub use pnm::{read_depth_pgm, read_rgb_ppm, write_depth_pgm, write_rgb_ppm, PnmError};
