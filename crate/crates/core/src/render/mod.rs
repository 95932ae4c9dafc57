//! Stroke rasterization and compositing.

mod canvas;
mod stamp;
mod template;

pub use canvas::{
    pad_holes, paint, paint_onto, painting_order, Canvas, PaddingReport, PaddingSource,
};
pub use stamp::{Stamp, StampRenderer};
pub use template::StrokeTemplate;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("stroke of length {length} and width {width} rounds to an empty stamp")]
    DegenerateStroke { length: f64, width: f64 },
    #[error("invalid stroke template: {0}")]
    Template(String),
    #[error("cannot read stroke template {path}: {source}")]
    TemplateIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
