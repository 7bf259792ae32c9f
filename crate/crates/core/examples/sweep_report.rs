//! A small seeded sweep written to CSV and rendered as SVG figure panels.
//!
//! ```text
//! cargo run --release --example sweep_report -- [output_dir]
//! ```

use qaoa_constraints::harness::{emit_csv, emit_report, run_experiment, ExperimentConfig};

fn main() -> qaoa_constraints::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sweep-demo".into());
    let cfg = ExperimentConfig {
        sizes: vec![3, 4],
        layers: vec![1, 2],
        instances: 4,
        restarts: 2,
        seed: 7,
        output_dir: out.into(),
        ..Default::default()
    };
    let records = run_experiment(&cfg)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let csv = cfg.output_dir.join("results.csv");
    emit_csv(&records, &csv)?;
    println!("{} records -> {}", records.len(), csv.display());
    for path in emit_report(&records, &cfg.output_dir)? {
        println!("  {}", path.display());
    }
    Ok(())
}
