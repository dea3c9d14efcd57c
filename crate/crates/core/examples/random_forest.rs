//! Fits a random forest directly on encoded records and checks that the
//! serial and parallel schedules grow the same trees.

use ndae_ids::dataset::{encode_records, fit_encoding, synthetic, Taxonomy};
use ndae_ids::forest::{train_forest_with, Schedule};
use ndae_ids::metrics::confusion;
use ndae_ids::{AttackClass, ForestParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let taxonomy = Taxonomy::bundled();
    let train = synthetic::generate([500, 400, 120, 60, 15], 5);
    let test = synthetic::generate([200, 150, 50, 25, 6], 6);
    let encoding = fit_encoding(&train)?;
    let labels = |rs: &[ndae_ids::RawRecord]| -> Result<Vec<AttackClass>, _> {
        rs.iter().map(|r| taxonomy.map_label(&r.label)).collect()
    };
    let (x_train, y_train) = (encode_records(&train, &encoding)?, labels(&train)?);
    let (x_test, y_test) = (encode_records(&test, &encoding)?, labels(&test)?);

    let params = ForestParams { n_trees: 30, ..ForestParams::default() };
    let parallel = train_forest_with(&x_train, &y_train, &params, 11, Schedule::Parallel)?;
    let serial = train_forest_with(&x_train, &y_train, &params, 11, Schedule::Serial)?;
    println!("serial == parallel: {}", serial == parallel);
    println!("mtry {} of {} features", parallel.mtry(), parallel.n_features());

    let predictions = parallel.predict_matrix(&x_test)?;
    let cm = confusion(&predictions, &y_test)?;
    println!("test accuracy {:.4}", cm.overall_accuracy().unwrap_or(0.0));
    let vote = parallel.predict(x_test.row(0))?;
    println!("first test row: {} with votes {:?}", vote.class, vote.votes);
    Ok(())
}
