//! Builds a report from a hand-written confusion matrix and renders it
//! beside the bundled S-NDAE reference column.

use ndae_ids::metrics::{ConfusionMatrix, EvaluationReport, ReferenceTable};

const REFERENCE: &str = include_str!("../data/reference_sndae.txt");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // rows are true classes, columns predictions
    let cm = ConfusionMatrix::from_counts([
        [950, 30, 15, 5, 0],
        [20, 2900, 10, 0, 0],
        [12, 8, 380, 0, 0],
        [40, 0, 2, 90, 3],
        [3, 0, 0, 4, 6],
    ]);
    let reference = ReferenceTable::read_from(REFERENCE.as_bytes())?;
    let report = EvaluationReport::build(&cm, &[5000, 12000, 3000, 900, 50])
        .with_provenance("source", "evaluation_report example")
        .with_reference(Some(reference));
    print!("{}", report.render_table());
    println!();
    print!("{}", report.to_machine_string());
    Ok(())
}
