//! Write every zoo model to `models/<name>.json` (or to the directory given as
//! the first argument).

use std::path::PathBuf;

use algebroid_lab::models::zoo;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models"));
    std::fs::create_dir_all(&dir)?;
    for m in zoo() {
        m.compile()?;
        let path = dir.join(format!("{}.json", m.name));
        std::fs::write(&path, m.to_json()?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
