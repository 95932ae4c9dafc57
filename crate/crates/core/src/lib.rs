pub mod density;
pub mod dump;
pub mod etf;
pub mod image_io;
pub mod pipeline;
pub mod raster;
pub mod render;
pub mod stroke;
