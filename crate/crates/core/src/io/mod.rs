//! File formats: the long-format dataset, result tables and SVG charts.
//!
//! All numeric output uses [`fmt_sig`] (six significant digits) so that
//! identical inputs produce byte-identical files.

mod dataset;
mod format;
mod svg;
mod tables;

pub use dataset::{
    load_experiments, load_panel, read_experiments, read_panel, write_experiments, write_experiments_to, Exclusion,
    LoadReport, Loaded, DATASET_COLUMNS,
};
pub use format::fmt_sig;
pub use svg::{render_curve_svg, render_region_svg, write_curve_svg, write_region_svg};
pub use tables::{
    write_bootstrap, write_bootstrap_to, write_mse, write_mse_to, write_oracle, write_oracle_to,
    write_region_csv_to, write_results, write_results_to, write_theory_curves_to, TheoryRow,
};

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}
