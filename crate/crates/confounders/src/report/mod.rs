//! Output rendering: metric tables, comparison figures, and the
//! reproducibility manifest.

mod figure;
mod manifest;
mod table;

pub use figure::{render_figure_data, FigureData};
pub use manifest::{sha256_file, RunManifest};
pub use table::{render_table, RenderedTable};
