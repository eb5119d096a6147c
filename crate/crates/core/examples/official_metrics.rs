// Class-1 F-score for ADR detection and micro-averaged F over classes 1 and 2
// for intake, on the trivial "predict the same class for everything" baselines.
//
//     cargo run --example official_metrics

use medtweet::eval::{micro_prf, prf_class, Confusion, MetricReport, Prf};

fn main() -> medtweet::Result<()> {
    // ADR test set: every tweet predicted as ADR.
    let adr = Prf::from_counts(771, 9190, 0);
    println!("ADR all-positive: P={:.3} R={:.3} F={:.3}", adr.precision, adr.recall, adr.f);

    // Intake test set: every tweet predicted as class 2.
    let gold: Vec<i32> = [(1, 1731), (2, 2697), (3, 3085)]
        .iter()
        .flat_map(|&(c, n)| std::iter::repeat_n(c, n))
        .collect();
    let pred = vec![2; gold.len()];
    let confusion = Confusion::with_classes(&gold, &pred, &[1, 2, 3])?;
    let micro = micro_prf(&confusion, &[1, 2]);
    println!("intake all-class-2: micro P={:.3} R={:.3} F={:.3}", micro.precision, micro.recall, micro.f);
    println!("class 2 alone: {:?}", prf_class(&confusion, 2));

    let report = MetricReport::from_labels(&gold, &pred, &[1, 2, 3], &[1, 2])?;
    print!("{}", report.render());
    Ok(())
}
