//! Verify the hand-derived reverse-mode gradients against central finite
//! differences of the batch loss, coordinate by coordinate.
//!
//! ```bash
//! cargo run --release --example gradient_check
//! ```

use std::collections::BTreeMap;

use stridenet::network::{check_gradients, GradCheckConfig, NetworkConfig};
use stridenet::tensor::SeededRng;

fn main() -> stridenet::Result<()> {
    let net = NetworkConfig::reduced();
    let cfg = GradCheckConfig::default();
    println!(
        "probing {} random coordinates (step {:.0e}, tolerance {:.0e}) on a {}x{} input network",
        cfg.coordinates, cfg.step, cfg.tolerance, net.input_channels, net.input_length
    );

    let report = check_gradients(&net, &cfg, &mut SeededRng::new(2024))?;

    // Worst relative error per tensor.
    let mut per_tensor: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for c in &report.checks {
        let entry = per_tensor.entry(c.tensor).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 = entry.1.max(c.relative_error);
    }
    println!("\n{:<16} {:>7} {:>14}", "tensor", "probes", "worst rel err");
    for (tensor, (count, worst)) in &per_tensor {
        println!("{tensor:<16} {count:>7} {worst:>14.3e}");
    }
    println!("\noverall worst relative error: {:.3e}", report.worst());

    if report.passed() {
        println!("gradient check passed");
        Ok(())
    } else {
        println!("gradient check FAILED");
        std::process::exit(1);
    }
}
