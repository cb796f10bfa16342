//! Greedy search over the subset lattice, printing the accepted models.
//!
//! cargo run -p baytta --example greedy_search

use baytta::{run_bma, synthesize, BmaConfig, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = SyntheticConfig::new(200, 4, 42);
    cfg.adversarial_columns.insert(3);
    let table = synthesize(&cfg)?;

    let summary = run_bma(&table, &BmaConfig::default())?;
    println!("accepted models, in processing order:");
    for (m, w) in summary.accepted.iter().zip(summary.posterior_weights()) {
        println!(
            "  {:<12} BIC {:>9.3}  log-lik(model) {:>9.3}  weight {:.4}",
            m.subset.to_string(),
            m.bic,
            m.log_model_likelihood,
            w
        );
    }
    println!("ln L_total  {:.4}", summary.log_l_total);
    for j in 0..table.n_columns() {
        println!(
            "pred_{j}  inclusion {:.4}  E[beta] {:+.4}",
            summary.inclusion_prob[j], summary.expected_coeffs[j]
        );
    }
    println!("E[intercept] {:+.4}", summary.expected_intercept);
    Ok(())
}
