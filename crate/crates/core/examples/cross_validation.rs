// Seeded k-fold and dev-fold augmented cross-validation.
//
//     cargo run --example cross_validation

use medtweet::eval::{augmented_fold_cv, kfold_cv};
use medtweet::{synthetic, FeatureConfig, PipelineConfig, Task};

fn main() -> medtweet::Result<()> {
    let res = synthetic::resources(2);
    let data = synthetic::intake_corpus(300, 0.0, 2);
    let dev = synthetic::intake_corpus(90, 0.0, 3);

    let mut cfg = PipelineConfig::preset("task2-sub1")?;
    cfg.features = FeatureConfig {
        word_ngram_max: 2,
        ..FeatureConfig::default()
    };
    assert_eq!(cfg.task, Task::Intake);

    let cv = kfold_cv(&data, 3, &cfg, &res, 42)?;
    print!("3-fold:\n{}", cv.render());

    let aug = augmented_fold_cv(&data, &dev, 3, &cfg, &res, 42)?;
    println!("augmented mean micro F(1+2) = {:.4}", aug.mean.micro.f);
    Ok(())
}
