//! Fit a single logistic candidate on two prediction columns and score it.
//!
//! cargo run -p baytta --example fit_candidate

use baytta::logreg::{bic, fit_logistic, DesignMatrix, FitConfig};
use baytta::{synthesize, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = synthesize(&SyntheticConfig::new(200, 3, 42))?;
    let design = DesignMatrix::from_table(&table, &[0, 1])?;
    let model = fit_logistic(&design, &FitConfig::default())?;

    println!("intercept     {:+.4}", model.intercept);
    for (j, b) in [0, 1].iter().zip(&model.coefficients) {
        println!("beta[pred_{j}]  {b:+.4}");
    }
    println!("log-lik       {:.4}", model.max_log_likelihood);
    // Two coefficients plus the intercept.
    println!(
        "BIC           {:.4}",
        bic(model.max_log_likelihood, 3, table.n_rows())
    );
    println!(
        "converged     {} after {} iterations",
        model.converged, model.iterations
    );
    println!("p(y=1 | row 0) = {:.4}", model.probability(design.row(0)));
    Ok(())
}
