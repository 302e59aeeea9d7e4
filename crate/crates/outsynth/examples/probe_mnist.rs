//! Scratch probe: MNIST class-0 latent geometry and selector behavior.
//! Not part of the deliverable; delete before commit.

use outsynth::boundary::{meta_stats, select_outskirts, SelectorRule};
use outsynth::hierarchy::fit_hierarchy;
use outsynth::pipeline::{features_of, load_dataset, run_experiment, PipelineConfig};
use outsynth::rng;

fn main() {
    let ds = load_dataset("mnist:data/mnist,class=0").unwrap();
    let cfg = PipelineConfig::default();
    let feats = features_of(&cfg, &ds, true).unwrap();
    println!(
        "class-0 inliers: {}, feature dims: {:?}",
        ds.n_inliers(),
        feats.iter().map(|m| m.ncols()).collect::<Vec<_>>()
    );

    let t = std::time::Instant::now();
    let fit = fit_hierarchy(&feats, &cfg.hierarchy_spec(), rng::derive_seed(7, "fit")).unwrap();
    println!("hierarchy fit in {:.1}s", t.elapsed().as_secs_f64());
    let catalog = fit.catalog.as_ref().unwrap();
    let stats = meta_stats(catalog).unwrap();

    let mut norms: Vec<f64> = catalog
        .mu
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    norms.sort_by(f64::total_cmp);
    let q = |p: f64| norms[((norms.len() - 1) as f64 * p) as usize];
    println!(
        "norm mean={:.4} sd={:.4}  quantiles: q0={:.4} q50={:.4} q90={:.4} q99={:.4} q100={:.4}",
        stats.mu_bar_l2,
        stats.sigma_bar_l2,
        q(0.0),
        q(0.5),
        q(0.9),
        q(0.99),
        q(1.0)
    );
    println!(
        "max |z| over norms = {:.3}",
        norms
            .iter()
            .map(|&v| (v - stats.mu_bar_l2).abs() / stats.sigma_bar_l2)
            .fold(0.0, f64::max)
    );
    let sig_mean: f64 = catalog.sigma.iter().sum::<f64>() / catalog.sigma.len() as f64;
    println!(
        "sigma_bar_sq={:?} catalog sigma mean={:.4}",
        stats.sigma_bar_sq, sig_mean
    );

    for alpha in [1.0, 1.5, 2.0, 2.5, 3.0] {
        let l2 = select_outskirts(catalog, &stats, SelectorRule::L2, alpha)
            .map(|s| s.indices.len())
            .unwrap_or(0);
        let el = select_outskirts(catalog, &stats, SelectorRule::Ellipsoid, alpha)
            .map(|s| s.indices.len())
            .unwrap_or(0);
        println!("alpha={alpha}: l2 keeps {l2}, ellipsoid keeps {el} of {}", catalog.len());
    }

    for alpha in [1.5, 2.0] {
        let mut cfg = PipelineConfig::default();
        cfg.alpha = alpha;
        cfg.seed = 7;
        let t = std::time::Instant::now();
        match run_experiment(&cfg, &ds) {
            Ok((report, _)) => {
                let folds: Vec<String> =
                    report.per_fold.iter().map(|m| format!("{:.4}", m.auc)).collect();
                println!(
                    "alpha={alpha}: mean AUC={:.4} F1={:.4} folds={:?} in {:.0}s",
                    report.auc,
                    report.f1,
                    folds,
                    t.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("alpha={alpha}: FAILED: {e}"),
        }
    }
}
