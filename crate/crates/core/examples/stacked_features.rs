//! Stacks two NDAEs and shows the extracted feature width in both feature
//! modes.

use ndae_ids::dataset::{encode_records, fit_encoding, synthetic};
use ndae_ids::ndae::train_stacked;
use ndae_ids::{FeatureMode, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let records = synthetic::generate([200, 150, 60, 30, 10], 4);
    let data = encode_records(&records, &fit_encoding(&records)?)?;
    let cfg = TrainConfig { learning_rate: 0.1, epochs: 8, batch_size: 16, seed: 4 };

    for mode in [FeatureMode::Deepest, FeatureMode::Concat] {
        let run = train_stacked(&data, &[32, 16], &[16, 8], &cfg, mode)?;
        let features = run.model.extract_matrix(&data)?;
        println!(
            "{mode}: {} -> {} features (ndae1 mse {:.5}, ndae2 mse {:.5})",
            data.cols(),
            features.cols(),
            run.first.final_mse,
            run.second.final_mse
        );
    }
    Ok(())
}
