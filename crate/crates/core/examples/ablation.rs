// Feature-group ablation on a held-out split.
//
//     cargo run --example ablation

use medtweet::eval::{ablation_run, fold_assignment, Protocol};
use medtweet::{synthetic, PipelineConfig};

fn main() -> medtweet::Result<()> {
    let res = synthetic::resources(3);
    let data = synthetic::adr_corpus(800, 10, 0.01, 5);
    let folds = fold_assignment(data.len(), 4, 5)?;
    let train: Vec<usize> = folds[1..].concat();
    let (train, test) = (data.subset(&train), data.subset(&folds[0]));

    let base = PipelineConfig::preset("task1-sub1")?;
    let groups = ["domain-ngrams", "general-ngrams", "under-sampling"];
    let table = ablation_run(&base, &groups, &Protocol::Holdout { train: &train, test: &test }, &res)?;
    print!("{}", table.render());
    Ok(())
}
