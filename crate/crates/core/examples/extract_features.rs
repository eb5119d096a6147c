// Feature extraction with the shipped ADR preset over synthetic resources.
//
//     cargo run --example extract_features

use medtweet::features::Extractor;
use medtweet::{synthetic, PipelineConfig};

fn main() -> medtweet::Result<()> {
    let res = synthetic::resources(0);
    let cfg = PipelineConfig::preset("task1-sub1")?;
    let extractor = Extractor::new(&cfg.features, &res)?;

    let tweet = "seroquel makes me so dizzy!! never again";
    let features = extractor.named_features(tweet);
    println!("{} features for {tweet:?}", features.len());
    for prefix in ["g:", "gnc:", "adr:", "pro:", "tw:", "pu:", "cl:"] {
        let group: Vec<_> = features.iter().filter(|(n, _)| n.starts_with(prefix)).take(4).collect();
        println!("{prefix:<5} {group:?}");
    }

    let (space, vectors) = extractor.fit_space(&[tweet, "my head hurts"]);
    println!("space size {} (frozen: {})", space.len(), space.is_frozen());
    let unseen = extractor.extract_frozen("xanax makes me sleepy", &space);
    println!("unseen tweet keeps {} known features, first vector had {}", unseen.len(), vectors[0].len());
    Ok(())
}
