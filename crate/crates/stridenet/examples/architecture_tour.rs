//! Walk through the regression network's architecture: the shape of every
//! stage, where the parameters live, and a single forward pass.
//!
//! ```bash
//! cargo run --release --example architecture_tour
//! ```

use stridenet::network::{forward, Dropout, NetworkConfig, NetworkParams};
use stridenet::tensor::{SeededRng, Signal};

fn main() -> stridenet::Result<()> {
    let cfg = NetworkConfig::default();
    println!("full-size configuration:");
    println!("  input            {} channels x {} samples", cfg.input_channels, cfg.input_length);
    println!("  conv stage 1     {} kernels of length {}", cfg.conv1_kernels, cfg.conv1_kernel_len);
    println!("  conv stage 2     {} kernels of length {}", cfg.conv2_kernels, cfg.conv2_kernel_len);
    println!("  max-pool width   {}", cfg.pool_width);
    println!("  dense hidden     {} units, dropout p = {}", cfg.hidden_units, cfg.p_drop);
    println!();

    // The shape chain: each conv keeps the signal length (same-padding), each
    // pool halves it, and the readout collapses everything to one length.
    println!("shape chain:");
    println!(
        "  {}x{} -> conv/relu -> {}x{} -> pool -> {}x{}",
        cfg.input_channels,
        cfg.input_length,
        cfg.conv1_kernels,
        cfg.input_length,
        cfg.conv1_kernels,
        cfg.pooled1_length()
    );
    println!(
        "  -> conv/relu -> {}x{} -> pool -> {}x{}",
        cfg.conv2_kernels,
        cfg.pooled1_length(),
        cfg.conv2_kernels,
        cfg.pooled2_length()
    );
    println!(
        "  -> flatten -> {} -> dense/relu/dropout -> {} -> affine -> 1",
        cfg.flat_length(),
        cfg.hidden_units
    );
    println!();

    let params = NetworkParams::init(cfg, &mut SeededRng::new(7))?;
    println!("parameter tensors:");
    let mut total = 0;
    for (name, tensor) in NetworkParams::tensor_names().into_iter().zip(params.tensors()) {
        println!("  {name:<16} {:>9}", tensor.len());
        total += tensor.len();
    }
    println!("  {:<16} {total:>9}", "total");
    println!();

    // One forward pass on a synthetic input. Dropout off = inference mode;
    // training passes instead sample a fresh mask per stride.
    let mut rng = SeededRng::new(1);
    let values =
        (0..cfg.input_channels * cfg.input_length).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    let input = Signal::new(cfg.input_channels, cfg.input_length, values)?;
    let cache = forward(&params, &input, Dropout::Off)?;
    println!("forward pass on a random input:");
    println!("  conv1 out  {}x{}", cache.conv1_out.channels(), cache.conv1_out.length());
    println!("  pooled1    {}x{}", cache.pooled1.channels(), cache.pooled1.length());
    println!("  conv2 out  {}x{}", cache.conv2_out.channels(), cache.conv2_out.length());
    println!("  pooled2    {}x{}", cache.pooled2.channels(), cache.pooled2.length());
    println!("  flat       {}", cache.flat.len());
    println!("  hidden     {}", cache.hidden.len());
    println!("  output     {:.4} (stride length estimate, cm)", cache.output);
    Ok(())
}
