// Mutual-information ranking of n-gram features.
//
//     cargo run --example rank_features

use medtweet::eval::{mi_rank, render_ranking};
use medtweet::{synthetic, FeatureConfig};

fn main() -> medtweet::Result<()> {
    let res = synthetic::resources(4);
    let data = synthetic::adr_corpus(400, 4, 0.0, 4);
    let cfg = FeatureConfig {
        word_ngram_max: 2,
        domain_ngram_max: 3,
        ..FeatureConfig::default()
    };
    let ranked = mi_rank(&data, &cfg, &res, 10)?;
    print!("rank\tfeature\tMI\n{}", render_ranking(&ranked));
    Ok(())
}
