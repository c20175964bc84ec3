//! Runs every stage over the shipped fixtures and prints the manifest.
//!
//!     cargo run --example pipeline -- /tmp/moh-run

use std::path::PathBuf;

use moh::config::{PipelineConfig, Settings};
use moh::pipeline::run_pipeline;

fn main() -> moh::Result<()> {
    let conf = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/pipeline.conf");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("moh-example-run"));
    let cfg = PipelineConfig::from_settings(&Settings::from_file(conf)?)?;
    let manifest = run_pipeline(&cfg, &out)?;
    for s in &manifest.stages {
        println!("{:<10} {:<6} {} ms", s.name, s.status, s.millis);
    }
    for a in &manifest.artifacts {
        println!("{}  {}", &a.sha256[..12], a.path);
    }
    println!("config {}", manifest.config_hash);
    Ok(())
}
