//! Averaged prediction against the plain augmentation mean, with metrics and
//! the inclusion-weighted uncertainty, on a held-out half of the rows.
//!
//! cargo run -p baytta --example aggregate_table

use baytta::cli::{evaluate_table, EvalArgs, EvalOptions};
use baytta::predict::{predict_baytta, predict_tta_mean};
use baytta::{run_bma, synthesize, BmaConfig, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = SyntheticConfig::new(400, 4, 11);
    cfg.signal_noise = 0.8;
    cfg.adversarial_columns.insert(3);
    let table = synthesize(&cfg)?;

    // One row by hand.
    let summary = run_bma(&table, &BmaConfig::default())?;
    let row = table.row(0);
    println!("row 0 {row:.3?} label {}", table.labels()[0]);
    println!(
        "  averaged {:.4}",
        predict_baytta(&summary, &row)?.probability
    );
    println!("  mean     {:.4}", predict_tta_mean(&row)?.probability);
    println!();

    // The whole pipeline under the default split protocol.
    let report = evaluate_table(&table, &EvalOptions::from_args(&EvalArgs::default(), 11))?;
    print!("{}", report.render_text());
    Ok(())
}
