//! Trains a single non-symmetric deep auto-encoder on synthetic records and
//! prints its loss curve.

use ndae_ids::dataset::{encode_records, fit_encoding, synthetic};
use ndae_ids::ndae::train_ndae;
use ndae_ids::TrainConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let records = synthetic::generate([300, 200, 80, 40, 10], 3);
    let encoding = fit_encoding(&records)?;
    let data = encode_records(&records, &encoding)?;
    println!("{} records encoded to {} columns", data.rows(), data.cols());

    let cfg = TrainConfig { learning_rate: 0.1, epochs: 15, batch_size: 16, seed: 3 };
    let run = train_ndae(&data, &[24, 12], &cfg)?;
    for (epoch, loss) in run.loss_curve.iter().enumerate() {
        println!("epoch {:>2}  loss {loss:.6}", epoch + 1);
    }
    println!("reconstruction mse {:.6} -> {:.6}", run.initial_mse, run.final_mse);
    println!("code of first record: {:.3?}", run.model.encode(data.row(0))?);
    Ok(())
}
