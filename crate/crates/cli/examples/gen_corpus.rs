//! Regenerates the bundled synthetic test corpus in data/corpus/.
//! Run from the workspace root: cargo run -p i2i-cli --example gen_corpus

use i2i_core::codec::{synthetic_frame, SynthKind};
use std::path::Path;

fn main() {
    let out = Path::new("data/corpus");
    std::fs::create_dir_all(out).expect("create data/corpus");
    let kinds = [
        (SynthKind::Gradient, "01_gradient"),
        (SynthKind::Rectangles, "02_rectangles"),
        (SynthKind::Plaid, "03_plaid"),
        (SynthKind::Blobs, "04_blobs"),
        (SynthKind::Mixed, "05_mixed"),
    ];
    for (kind, name) in kinds {
        let f = synthetic_frame(kind, 128, 128, 2024).expect("synthesize");
        let path = out.join(format!("{name}.pgm"));
        f.write_pgm(&path).expect("write pgm");
        println!("wrote {}", path.display());
    }
}
