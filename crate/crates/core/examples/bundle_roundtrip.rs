//! Trains a small model bundle, saves it, reloads it and shows that a
//! tampered file is rejected.

use ndae_ids::dataset::{class_counts, encode_records, fit_encoding, synthetic, Taxonomy};
use ndae_ids::forest::train_forest;
use ndae_ids::ndae::train_stacked;
use ndae_ids::pipeline::{Classifier, ModelBundle};
use ndae_ids::{AttackClass, FeatureMode, ForestParams, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let records = synthetic::generate([150, 100, 40, 20, 8], 7);
    let encoding = fit_encoding(&records)?;
    let data = encode_records(&records, &encoding)?;
    let labels: Vec<AttackClass> =
        records.iter().map(|r| Taxonomy::bundled().map_label(&r.label)).collect::<Result<_, _>>()?;

    let cfg = TrainConfig { learning_rate: 0.1, epochs: 3, batch_size: 16, seed: 7 };
    let stacked = train_stacked(&data, &[16], &[8], &cfg, FeatureMode::Deepest)?.model;
    let features = stacked.extract_matrix(&data)?;
    let forest = train_forest(&features, &labels, &ForestParams { n_trees: 10, ..Default::default() }, 7)?;
    let bundle =
        ModelBundle::new(encoding, stacked, Classifier::Forest(forest), class_counts(&labels), Default::default())?;

    let dir = std::env::temp_dir().join(format!("ndae-bundle-{}", std::process::id()));
    bundle.save(&dir)?;
    let loaded = ModelBundle::load(&dir)?;
    println!("round trip equal: {}", loaded == bundle);

    let path = dir.join("classifier");
    let mut text = std::fs::read_to_string(&path)?;
    text.push_str("# edited\n");
    std::fs::write(&path, text)?;
    match ModelBundle::load(&dir) {
        Err(e) => println!("tampered bundle rejected: {e}"),
        Ok(_) => println!("tampered bundle unexpectedly loaded"),
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
