//! Regenerates the bundled brush at `assets/brush.png`.

use std::path::PathBuf;

use oilbrush::render::StrokeTemplate;

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets/brush.png"));
    StrokeTemplate::procedural(240, 80, 7)
        .save_png(&out)
        .expect("write template");
    println!("wrote {}", out.display());
}
