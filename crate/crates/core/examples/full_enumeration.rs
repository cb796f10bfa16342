//! Every non-empty subset weighted by exp(-BIC/2), next to the greedy search.
//!
//! cargo run -p baytta --example full_enumeration

use baytta::{run_bma, synthesize, BmaConfig, SearchMode, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = SyntheticConfig::new(200, 3, 42);
    cfg.adversarial_columns.insert(2);
    let table = synthesize(&cfg)?;

    let greedy = run_bma(&table, &BmaConfig::default())?;
    let full = run_bma(
        &table,
        &BmaConfig {
            mode: SearchMode::Full,
            ..BmaConfig::default()
        },
    )?;

    println!("{:<10} {:>8} {:>8}", "subset", "BIC", "weight");
    for (m, w) in full.accepted.iter().zip(full.posterior_weights()) {
        println!("{:<10} {:>8.3} {:>8.4}", m.subset.to_string(), m.bic, w);
    }
    println!();
    println!("{:<8} {:>10} {:>10}", "column", "greedy", "full");
    for j in 0..table.n_columns() {
        println!(
            "pred_{j:<3} {:>10.4} {:>10.4}",
            greedy.inclusion_prob[j], full.inclusion_prob[j]
        );
    }
    Ok(())
}
