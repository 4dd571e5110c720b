//! Runs a batch configuration from code, the same way `lrq report` does.
//!
//! cargo run --example run_config -- [config.toml] [out-dir]

use std::path::PathBuf;

use lr_quantum::cli::{run_file, Command, RunOptions, Status};

fn main() -> lr_quantum::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/circle.toml").into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("lrq-example"));
    let summary = run_file(&config, Command::Report, &RunOptions { out: out.clone(), timestamp: false, ..Default::default() })?;
    for o in &summary.outcomes {
        let mark = if o.status == Status::Pass { "ok " } else { "BAD" };
        println!("{mark} {:20} {}", o.name, o.kind);
    }
    println!("outputs in {}", out.display());
    Ok(())
}
