//! Repeated synthetic trials with one adversarial column, as `baytta simulate`
//! runs them.
//!
//! cargo run --release -p baytta --example simulate_trials

use baytta::cli::{cmd_simulate, EvalArgs, SimulateArgs};
use baytta::data::{LATENT_LOGIT_MEAN, LATENT_LOGIT_SD};
use baytta::report::Protocol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for protocol in [Protocol::Split, Protocol::Transductive] {
        let args = SimulateArgs {
            trials: 100,
            rows: 200,
            columns: 4,
            signal_noise: 0.5,
            adversarial: vec![3],
            flip_rate: 0.0,
            latent_mean: LATENT_LOGIT_MEAN,
            latent_sd: LATENT_LOGIT_SD,
            seed: 7,
            eval: EvalArgs {
                protocol,
                ..EvalArgs::default()
            },
            json: None,
        };
        print!("{}", cmd_simulate(&args)?.render_text());
        println!();
    }
    Ok(())
}
