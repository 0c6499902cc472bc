use criterion::{black_box, criterion_group, criterion_main, Criterion};
use mipt_core::scaling::{collapse_quality, crossing_estimate, CollapseData};
use mipt_core::EntropyCurve;

/// Exact-scaling curves on the default 21-point grid.
fn synthetic(p_c: f64, nu: f64) -> Vec<EntropyCurve> {
    let p_values: Vec<f64> = (0..=20).map(|i| i as f64 * 0.03).collect();
    [6usize, 8, 10, 12, 14, 16]
        .iter()
        .map(|&l| {
            let lf = l as f64;
            let mean_entropy = p_values
                .iter()
                .map(|p| 0.3 * lf.ln() - 0.8 * ((p - p_c) * lf.powf(1.0 / nu)).tanh())
                .collect();
            EntropyCurve {
                size: l,
                p_values: p_values.clone(),
                mean_entropy,
                std_dev: vec![0.5; 21],
                std_err: vec![0.01; 21],
                n_traj: 1500,
            }
        })
        .collect()
}

fn quality(c: &mut Criterion) {
    let curves = synthetic(0.37, 1.5);
    c.bench_function("collapse_quality", |b| {
        b.iter(|| collapse_quality(black_box(&curves), 0.36, 1.6).unwrap())
    });
    let data = CollapseData::new(&curves).unwrap();
    c.bench_function("collapse_quality_prepared", |b| {
        b.iter(|| data.quality(black_box(0.36), black_box(1.6)).unwrap())
    });
    c.bench_function("crossing_estimate", |b| {
        b.iter(|| crossing_estimate(black_box(&curves)).unwrap())
    });
}

criterion_group!(benches, quality);
criterion_main!(benches);
