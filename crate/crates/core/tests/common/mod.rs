//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// Primal objective of the L2-regularized hinge loss with the bias stored
/// as the last weight, computed on dense rows.
pub fn primal(w: &[f64], rows: &[Vec<f64>], ys: &[f64], costs: &[f64]) -> f64 {
    let reg = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let loss: f64 = rows
        .iter()
        .zip(ys)
        .zip(costs)
        .map(|((x, y), c)| {
            let m: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + w[x.len()];
            c * (1.0 - y * m).max(0.0)
        })
        .sum();
    reg + loss
}

pub struct ReferenceSolution {
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
    pub primal: f64,
    pub dual: f64,
}

/// Solves the box-constrained dual by accelerated projected gradient (FISTA
/// with adaptive restart) and returns the best primal point seen.
pub fn reference_svm(rows: &[Vec<f64>], ys: &[f64], costs: &[f64]) -> ReferenceSolution {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    let aug: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().copied().chain(std::iter::once(1.0)).collect())
        .collect();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ys[i] * ys[j] * aug[i].iter().zip(&aug[j]).map(|(a, b)| a * b).sum::<f64>())
                .collect()
        })
        .collect();
    let qv = |v: &[f64]| -> Vec<f64> { q.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect() };

    // Largest eigenvalue of Q by power iteration, padded for safety.
    let mut v = vec![1.0; n];
    let mut lambda = 1.0;
    for _ in 0..300 {
        let u = qv(&v);
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        lambda = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = u.iter().map(|x| x / norm).collect();
    }
    let step = 1.0 / (lambda * 1.05 + 1e-12);

    let weights = |alpha: &[f64]| -> Vec<f64> {
        let mut w = vec![0.0; d + 1];
        for i in 0..n {
            for (wk, xk) in w.iter_mut().zip(&aug[i]) {
                *wk += alpha[i] * ys[i] * xk;
            }
        }
        w
    };
    let dual_of = |alpha: &[f64]| -> f64 {
        let w = weights(alpha);
        alpha.iter().sum::<f64>() - 0.5 * w.iter().map(|x| x * x).sum::<f64>()
    };

    let mut x = vec![0.0; n];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best_w = weights(&x);
    let mut best_primal = primal(&best_w, rows, ys, costs);
    let mut best_dual = dual_of(&x);
    let mut best_alpha = x.clone();
    for it in 0..2_000_000usize {
        let g: Vec<f64> = qv(&y).iter().map(|v| v - 1.0).collect();
        let next: Vec<f64> = (0..n).map(|i| (y[i] - step * g[i]).clamp(0.0, costs[i])).collect();
        let restart: f64 = (0..n).map(|i| (y[i] - next[i]) * (next[i] - x[i])).sum();
        let t_next = if restart > 0.0 { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
        let momentum = if restart > 0.0 { 0.0 } else { (t - 1.0) / t_next };
        y = (0..n).map(|i| next[i] + momentum * (next[i] - x[i])).collect();
        x = next;
        t = t_next;
        if it % 25 == 0 {
            let w = weights(&x);
            let p = primal(&w, rows, ys, costs);
            let dv = dual_of(&x);
            if p < best_primal {
                best_primal = p;
                best_w = w;
            }
            if dv > best_dual {
                best_dual = dv;
                best_alpha = x.clone();
            }
            if best_primal - best_dual <= 1e-11 * best_primal.abs().max(1e-3) {
                break;
            }
        }
    }
    ReferenceSolution {
        w: best_w,
        alpha: best_alpha,
        primal: best_primal,
        dual: best_dual,
    }
}

fn entropy(counts: impl IntoIterator<Item = usize>, n: f64) -> f64 {
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// MI of every feature with the class as `H(C) - H(C | F)`, counting each
/// (presence, class) cell by scanning the documents.
pub fn brute_force_mi(docs: &[BTreeSet<String>], labels: &[i32]) -> BTreeMap<String, f64> {
    let n = docs.len() as f64;
    let classes: BTreeSet<i32> = labels.iter().copied().collect();
    let h_c = entropy(classes.iter().map(|c| labels.iter().filter(|l| *l == c).count()), n);
    let names: BTreeSet<&String> = docs.iter().flatten().collect();
    names
        .into_iter()
        .map(|name| {
            let mut h_cond = 0.0;
            for present in [true, false] {
                let cell: Vec<i32> = docs
                    .iter()
                    .zip(labels)
                    .filter(|(d, _)| d.contains(name) == present)
                    .map(|(_, &l)| l)
                    .collect();
                if cell.is_empty() {
                    continue;
                }
                let m = cell.len() as f64;
                let h = entropy(classes.iter().map(|c| cell.iter().filter(|l| *l == c).count()), m);
                h_cond += m / n * h;
            }
            (name.clone(), h_c - h_cond)
        })
        .collect()
}

pub fn class_entropy(labels: &[i32]) -> f64 {
    let classes: BTreeSet<i32> = labels.iter().copied().collect();
    entropy(
        classes.iter().map(|c| labels.iter().filter(|l| *l == c).count()),
        labels.len() as f64,
    )
}

/// Majority vote with ties resolved to `favor` when it is among the tied
/// classes, else to the smallest tied class.
pub fn hand_vote(votes: &[i32], favor: Option<i32>) -> i32 {
    let mut counts: BTreeMap<i32, usize> = BTreeMap::new();
    for &v in votes {
        *counts.entry(v).or_default() += 1;
    }
    let top = *counts.values().max().unwrap();
    let tied: Vec<i32> = counts.iter().filter(|(_, &c)| c == top).map(|(&k, _)| k).collect();
    match favor {
        Some(f) if tied.contains(&f) => f,
        _ => tied[0],
    }
}

/// Class-1 F-score computed directly from label lists.
pub fn f_class(gold: &[i32], pred: &[i32], class: i32) -> f64 {
    let tp = gold.iter().zip(pred).filter(|(g, p)| **g == class && **p == class).count() as f64;
    let fp = gold.iter().zip(pred).filter(|(g, p)| **g != class && **p == class).count() as f64;
    let fn_ = gold.iter().zip(pred).filter(|(g, p)| **g == class && **p != class).count() as f64;
    if tp == 0.0 {
        0.0
    } else {
        2.0 * tp / (2.0 * tp + fp + fn_)
    }
}
