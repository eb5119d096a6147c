// Train a preset pipeline, save it, reload it and score a test split.
//
//     cargo run --example end_to_end

use medtweet::eval::{fold_assignment, MetricReport};
use medtweet::{synthetic, PipelineConfig, TrainedPipeline};

fn main() -> medtweet::Result<()> {
    let res = synthetic::resources(5);
    let data = synthetic::adr_corpus(800, 10, 0.01, 5);
    let folds = fold_assignment(data.len(), 4, 5)?;
    let train: Vec<usize> = folds[1..].concat();
    let (train, test) = (data.subset(&train), data.subset(&folds[0]));

    let cfg = PipelineConfig::preset("task1-sub1")?;
    let (model, report) = TrainedPipeline::fit(&cfg, &train, &res)?;
    for line in report.lines() {
        println!("{line}");
    }

    let json = model.to_json()?;
    let reloaded = TrainedPipeline::from_json(&json)?;
    let pred = reloaded.predict(&test, &res)?;
    let metrics = MetricReport::from_labels(&test.labels()?, &pred, &[0, 1], &[1])?;
    print!("{}", metrics.render());
    println!("model file: {} bytes", json.len());
    Ok(())
}
