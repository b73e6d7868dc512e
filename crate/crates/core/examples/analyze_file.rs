//! Load a model file, run its analysis requests and print the JSON report.
//!
//! Usage: `cargo run --example analyze_file -- models/rigid_body.json`

use algebroid_lab::model_file::ModelFile;
use algebroid_lab::report::{analyze, AnalyzeRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/rigid_body.json").into());
    let model = ModelFile::load(path.as_ref())?.compile()?;
    let report = analyze(&model, &AnalyzeRequest::default())?;
    print!("{}", report.to_json()?);
    Ok(())
}
