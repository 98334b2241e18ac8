//! Preprocessing walkthrough: gait-event detection on one recording, the
//! three stride border definitions, and normalization/zero-padding.
//!
//! ```bash
//! cargo run --release --example event_detection
//! ```

use stridenet::dataset::{generate_synthetic, SynthConfig};
use stridenet::preprocess::{
    detect_heelstrike, detect_midstance, normalize_and_pad, redefine_strides, EventConfig, Foot,
    RawStride, StrideDefinition,
};
use stridenet::tensor::SeededRng;

fn main() -> stridenet::Result<()> {
    // One synthetic patient; we walk the left-foot recording.
    let cfg = SynthConfig { patients: 1, strides_per_patient: 8, ..SynthConfig::default() };
    let table = generate_synthetic(&cfg, &mut SeededRng::new(5))?;
    let recording: Vec<RawStride> =
        table.strides.iter().filter(|s| s.foot == Foot::Left).cloned().collect();
    println!(
        "left-foot recording of patient {}: {} strides as annotated in the dataset",
        recording[0].patient_id,
        recording.len()
    );

    // Event detection per stride. Mid-stance = the quietest gyroscope window
    // (the foot is flat on the ground); heel strike = the sharpest
    // accelerometer-x dip in the later part of the stride.
    let events = EventConfig::default();
    println!("\n{:>7} {:>8} {:>11} {:>12} {:>14}", "stride", "samples", "mid-stance", "heel strike", "reference cm");
    for s in &recording {
        let n = s.num_samples();
        let ms = detect_midstance(s, events.midstance_window)?;
        let hs = detect_heelstrike(s, n / 2..n)?;
        println!(
            "{:>7} {:>8} {:>11} {:>12} {:>14.2}",
            s.stride_id, n, ms, hs, s.reference_length_cm
        );
    }

    // Stride border definitions. The annotated borders are kept as-is for
    // the dataset definition; the other two re-anchor borders on events, so
    // each recording of k strides yields k - 1 event-to-event segments.
    for definition in [StrideDefinition::MsDtw, StrideDefinition::HsToHs, StrideDefinition::MsToMs]
    {
        let redefined = redefine_strides(&recording, definition, &events)?;
        let lengths: Vec<String> =
            redefined.iter().map(|s| format!("{}:{}", s.stride_id, s.num_samples())).collect();
        println!("\n{definition}: {} strides (id:samples) {}", redefined.len(), lengths.join(" "));
    }

    // Normalization maps each channel into [-1, 1] by its sensor range
    // (accelerometer +-6 g, gyroscope +-500 deg/s), then zero-pads to the
    // network input length.
    let stride = &recording[0];
    let prepped =
        normalize_and_pad(stride, StrideDefinition::MsDtw, table.meta.ranges, 256)?;
    let peak = prepped.signal.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    println!(
        "\nnormalized stride {}: {} channels x {} samples ({} real + {} zero padding), peak |value| {:.3}",
        stride.stride_id,
        prepped.signal.channels(),
        prepped.signal.length(),
        prepped.unpadded_length,
        prepped.signal.length() - prepped.unpadded_length,
        peak
    );
    Ok(())
}
