// Training the weighted linear SVM directly on sparse vectors.
//
//     cargo run --example train_svm

use std::collections::BTreeMap;

use medtweet::features::FeatureVector;
use medtweet::svm::{train, TrainParams};

fn main() -> medtweet::Result<()> {
    // Two features; class 1 lives near (1, 0), class 0 near (0, 1).
    let xs: Vec<FeatureVector> = [(1.0, 0.1), (0.9, 0.0), (0.8, 0.2), (0.1, 1.0), (0.0, 0.9), (0.2, 0.7)]
        .iter()
        .map(|&(a, b)| FeatureVector::from_pairs(vec![(0, a), (1, b)]))
        .collect();
    let ys = [1, 1, 1, 0, 0, 0];

    let params = TrainParams {
        c: 1.0,
        class_weights: BTreeMap::from([(1, 2.0)]),
        ..TrainParams::default()
    };
    let model = train(&xs, &ys, 2, &params, &[0, 1])?;
    let report = &model.metadata().convergence[0];
    println!(
        "converged={} after {} sweeps, primal {:.6}, gap {:.2e}",
        report.converged,
        report.sweeps,
        report.primal,
        report.gap()
    );
    println!("weights {:?}, bias {:.4}", model.weights(0), model.bias(0));

    let probe = FeatureVector::from_pairs(vec![(0, 0.6), (1, 0.5)]);
    println!("decision {:?} -> class {}", model.decision_values(&probe)?, model.predict(&probe)?);
    Ok(())
}
