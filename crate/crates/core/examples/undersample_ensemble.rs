// Majority-class under-sampling and a majority-vote ensemble.
//
//     cargo run --example undersample_ensemble

use medtweet::imbalance::{train_ensemble, undersample, vote, TiePolicy};
use medtweet::{synthetic, PipelineConfig};

fn main() -> medtweet::Result<()> {
    let data = synthetic::adr_corpus(600, 10, 0.0, 1);
    println!("before: {}", data.class_counts()?);

    let sampled = undersample(&data, 1, 2.0, 42)?;
    println!("after ratio 2: {}", sampled.dataset.class_counts()?);

    println!("vote [1, 0, 1] -> {:?}", vote(&[1, 0, 1], TiePolicy::Favor(1)));
    println!("vote [1, 0]    -> {:?}", vote(&[1, 0], TiePolicy::Favor(1)));

    let res = synthetic::resources(1);
    let cfg = PipelineConfig::preset("task1-sub3")?;
    let (ensemble, space) = train_ensemble(&data, &[2.0, 3.0, 4.0], &cfg.params, &cfg.features, &res, 42)?;
    let sizes: Vec<usize> = ensemble.members().iter().map(|m| m.metadata().instances).collect();
    println!("{} members trained on {sizes:?} tweets over {} features", ensemble.len(), space.len());
    Ok(())
}
