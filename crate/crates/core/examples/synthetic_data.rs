//! Writes a synthetic KDD-style train/test pair and a matching pipeline
//! config, for trying the CLI without the real datasets.
//!
//! ```text
//! cargo run --example synthetic_data -- /tmp/ndae-demo
//! cargo run --bin ndae-ids -- prepare --config /tmp/ndae-demo/pipeline.conf --out /tmp/ndae-demo/prepared
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use ndae_ids::dataset::synthetic;
use ndae_ids::RecordFormat;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "ndae-demo".into()));
    std::fs::create_dir_all(&dir)?;

    let train = synthetic::generate([1200, 900, 300, 120, 30], 1);
    let test = synthetic::generate([400, 300, 100, 40, 10], 2);
    synthetic::write_records(&train, RecordFormat::NslKdd, BufWriter::new(File::create(dir.join("train.txt"))?))?;
    synthetic::write_records(&test, RecordFormat::NslKdd, BufWriter::new(File::create(dir.join("test.txt"))?))?;

    std::fs::write(
        dir.join("pipeline.conf"),
        "\
# synthetic demo
train_path = train.txt
test_path = test.txt
format = nslkdd
subsample_fraction = 1.0
subsample_seed = 1

dims1 = 16,16
dims2 = 8
feature_mode = deepest
learning_rate = 0.1
epochs = 5
batch_size = 32
ndae_seed = 1

classifier = forest
n_trees = 25
forest_seed = 1
softmax_seed = 1
",
    )?;
    println!("wrote {} train and {} test records to {}", train.len(), test.len(), dir.display());
    Ok(())
}
