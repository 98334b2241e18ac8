//! Dataset container tour: save a table, hash it, load it back bit-exactly,
//! and see the strict validation reject a doctored file.
//!
//! ```bash
//! cargo run --release --example dataset_roundtrip
//! ```

use std::fs;
use std::path::PathBuf;

use stridenet::dataset::{dataset_hash, generate_synthetic, RawTable, SynthConfig};
use stridenet::tensor::SeededRng;

fn main() -> stridenet::Result<()> {
    let out = PathBuf::from("target/example-artifacts/dataset_roundtrip");
    let _ = fs::remove_dir_all(&out);

    let cfg = SynthConfig { patients: 3, strides_per_patient: 4, ..SynthConfig::default() };
    let table = generate_synthetic(&cfg, &mut SeededRng::new(17))?;
    println!("generated {} strides from {} patients", table.strides.len(), cfg.patients);

    // Layout on disk: meta.txt (key = value), strides.csv (the index), and
    // one samples/<patient>_<foot>.csv per recording.
    let first = out.join("first");
    table.save(&first)?;
    let hash = dataset_hash(&first)?;
    println!("saved to {} (hash {}...)", first.display(), &hash[..16]);

    let (loaded, stats) = RawTable::load(&first)?;
    assert_eq!(loaded, table);
    println!(
        "loaded back: {} strides, {} skipped for missing references, equal to the original",
        loaded.strides.len(),
        stats.skipped_missing_reference
    );

    // Round trip is bit-exact: saving the loaded table reproduces every byte,
    // so the content hash is stable across save/load/save.
    let second = out.join("second");
    loaded.save(&second)?;
    assert_eq!(hash, dataset_hash(&second)?);
    println!("re-saved copy hashes identically");

    // A blank reference length is tolerated: that stride is skipped and
    // counted, because not every stride of the benchmark has a ground-truth
    // measurement.
    let index = second.join("strides.csv");
    let text = fs::read_to_string(&index)?;
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let (head, _) = lines[1].rsplit_once(',').expect("index rows have six fields");
    lines[1] = format!("{head},");
    fs::write(&index, lines.join("\n") + "\n")?;
    let (partial, stats) = RawTable::load(&second)?;
    println!(
        "blanked one reference: loaded {} strides, skipped {}",
        partial.strides.len(),
        stats.skipped_missing_reference
    );

    // Anything structurally wrong is rejected with a file/line diagnostic
    // rather than silently repaired.
    let sample_file = fs::read_dir(second.join("samples"))?
        .next()
        .expect("samples directory is not empty")?
        .path();
    let text = fs::read_to_string(&sample_file)?;
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[3] = lines[3].rsplit_once(',').expect("sample rows have ten fields").0.to_string();
    fs::write(&sample_file, lines.join("\n") + "\n")?;
    match RawTable::load(&second) {
        Err(e) => println!("doctored a sample row, load rejected it:\n  {e}"),
        Ok(_) => println!("unexpected: doctored file loaded"),
    }
    Ok(())
}
