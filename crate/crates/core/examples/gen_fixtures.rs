//! Regenerates the world files in `crates/core/fixtures/`.
//!
//! ```text
//! cargo run -p taunav --example gen_fixtures
//! ```

use std::path::Path;

use taunav::fixtures;
use taunav::world::world_to_json;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    for (stem, world, description) in fixtures::all() {
        let path = dir.join(format!("{stem}.json"));
        std::fs::write(&path, world_to_json(&world, Some(description)) + "\n")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
