//! Regenerates the CLI test fixtures under `tests/fixtures/`.
//!
//! cargo run -p fplogit --example make_fixtures

#[path = "../tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use fplogit::metrics::{confusion_ccr, pairwise_auc};

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

fn curve_csv(ids: &[String], months: &[f64], rows: &[Vec<f64>]) -> String {
    let mut s = String::from("id");
    for m in months {
        s.push_str(&format!(",{m}"));
    }
    s.push('\n');
    for (id, row) in ids.iter().zip(rows) {
        s.push_str(id);
        for v in row {
            s.push(',');
            s.push_str(&fmt(*v));
        }
        s.push('\n');
    }
    s
}

/// Two functional predictors and one scalar with a logit signal through the
/// first harmonic of the temperature curves and the scalar.
fn synthetic(dir: &Path) {
    let mut r = ChaCha8Rng::seed_from_u64(20_180_101);
    let n = 40;
    let months: Vec<f64> = (1..=12).map(f64::from).collect();
    let ids: Vec<String> = (1..=n).map(|i| format!("s{i:02}")).collect();
    let mut temp = Vec::new();
    let mut prec = Vec::new();
    let mut cov = String::from("id,y,altitude\n");
    for id in &ids {
        let level: f64 = r.sample::<f64, _>(StandardNormal) * 2.0;
        let amp: f64 = 6.0 + r.sample::<f64, _>(StandardNormal) * 1.5;
        let wet: f64 = r.sample::<f64, _>(StandardNormal);
        let altitude: f64 = r.random_range(0.0..1.0);
        temp.push(
            months
                .iter()
                .map(|&m| {
                    15.0 + level - amp * (2.0 * PI * (m - 1.0) / 12.0).cos() + 0.3 * r.sample::<f64, _>(StandardNormal)
                })
                .collect::<Vec<f64>>(),
        );
        prec.push(
            months
                .iter()
                .map(|&m| {
                    (3.0 + wet * (PI * m / 12.0).sin() + 0.2 * r.sample::<f64, _>(StandardNormal)).max(0.0)
                })
                .collect::<Vec<f64>>(),
        );
        let eta = -0.6 * level + 1.2 * (altitude - 0.5) + 0.8 * wet;
        let y = if r.random::<f64>() < 1.0 / (1.0 + (-eta).exp()) { 1 } else { 0 };
        cov.push_str(&format!("{id},{y},{}\n", fmt(altitude)));
    }
    fs::create_dir_all(dir).unwrap();
    write(&dir.join("temp.csv"), &curve_csv(&ids, &months, &temp));
    write(&dir.join("prec.csv"), &curve_csv(&ids, &months, &prec));
    write(&dir.join("covariates.csv"), &cov);
}

/// Curves and response drawn independently.
fn noise(dir: &Path) {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let n = 120;
    let months: Vec<f64> = (1..=12).map(f64::from).collect();
    let ids: Vec<String> = (1..=n).map(|i| format!("n{i:03}")).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| months.iter().map(|_| r.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let mut cov = String::from("id,y\n");
    for id in &ids {
        let y = if r.random::<bool>() { 1 } else { 0 };
        cov.push_str(&format!("{id},{y}\n"));
    }
    fs::create_dir_all(dir).unwrap();
    write(&dir.join("curves.csv"), &curve_csv(&ids, &months, &rows));
    write(&dir.join("covariates.csv"), &cov);
}

/// Classification quality of the Bayes rule on the simulated two-class
/// sample, the reference the synthetic classification check is held to.
fn simulation_oracle(path: &Path) {
    let s = common::two_class_sample(common::SIM_N, common::SIM_M, common::SIM_SEED);
    let auc = pairwise_auc(&s.y, &s.oracle_score).unwrap();
    let prob: Vec<f64> = s.oracle_score.iter().map(|&v| common::logistic(v)).collect();
    let (_, ccr) = confusion_ccr(&s.y, &prob, 0.5).unwrap();
    let text = format!(
        "{{\n  \"seed\": {},\n  \"n\": {},\n  \"m\": {},\n  \"amplitude\": {},\n  \"oracle_ccr\": {ccr},\n  \"oracle_auc\": {auc}\n}}\n",
        common::SIM_SEED,
        common::SIM_N,
        common::SIM_M,
        common::SIM_AMPLITUDE
    );
    write(path, &text);
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    synthetic(&root.join("synthetic"));
    noise(&root.join("noise"));
    simulation_oracle(&root.join("simulation_oracle.json"));
    println!("fixtures written to {}", root.display());
}
