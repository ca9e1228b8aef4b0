//! Monte-Carlo calibration on simulated patterns with fixed seeds.

use msdgm_core::pipeline::{analyze, periodogram, prepare, AnalysisOptions};
use msdgm_core::simulate::simulate;
use msdgm_core::smoothing::{smooth_field, SmootherSpec};
use msdgm_core::{Coupling, FrequencyGrid, Kernel, SimulationSpec};

const REPLICATES: u64 = 50;

fn coupled(d: usize, n: usize, seed: u64) -> SimulationSpec {
    SimulationSpec::independent(d, n, seed).with_coupling(Coupling {
        source: 0,
        target: 1,
        rho: 0.9,
        sigma: 0.01,
    })
}

fn statistic(spec: &SimulationSpec) -> f64 {
    let r = analyze(&simulate(spec).unwrap(), &AnalysisOptions::default()).unwrap();
    r.statistics.get(0, 1)
}

#[test]
fn independent_pairs_stay_below_intermediate_threshold() {
    let stats: Vec<f64> = (0..REPLICATES)
        .map(|s| statistic(&SimulationSpec::independent(2, 500, 5000 + s)))
        .collect();
    let below = stats.iter().filter(|&&s| s < 0.6).count();
    let mean = stats.iter().sum::<f64>() / stats.len() as f64;
    println!("independent d=2 n=500: mean stat {mean:.4}, {below}/{REPLICATES} below 0.6");
    assert!(below * 2 > REPLICATES as usize);
}

#[test]
fn coupled_statistic_beats_independent() {
    let mut wins = 0;
    for s in 0..REPLICATES {
        let dep = statistic(&coupled(2, 500, 7000 + s));
        let ind = statistic(&SimulationSpec::independent(2, 500, 7000 + s));
        if dep > ind {
            wins += 1;
        }
    }
    println!("coupled vs independent d=2 n=500: coupled larger in {wins}/{REPLICATES}");
    assert!(wins * 10 >= 9 * REPLICATES as usize);
}

#[test]
fn smoothing_variance_falls_with_bandwidth() {
    // variance of the smoothed auto-spectrum across frequencies, averaged
    let grid = FrequencyGrid::default();
    let mut previous = f64::INFINITY;
    for h in 0..=3 {
        let mut total = 0.0;
        for seed in 0..20 {
            let prepared = prepare(&simulate(&SimulationSpec::independent(2, 300, seed)).unwrap(), 1)
                .unwrap()
                .pattern;
            let raw = periodogram(&prepared, &grid).unwrap();
            let spec = SmootherSpec { kernel: Kernel::Uniform, half_width: h, ridge: 0.0 };
            let smoothed = smooth_field(&raw, &spec);
            let vals: Vec<f64> = (0..grid.len())
                .filter(|&k| k != grid.dc_index())
                .map(|k| smoothed.entry(k, 0, 0).re)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
            total += var / (mean * mean);
        }
        let rel = total / 20.0;
        println!("h={h}: relative variance {rel:.4}");
        assert!(rel < previous);
        previous = rel;
    }
}

#[test]
fn demeaned_marks_track_standard_normal_mean() {
    for seed in 0..10 {
        let n = 500;
        let p = simulate(&SimulationSpec::independent(3, n, seed)).unwrap();
        for t in p.types() {
            assert!(t.mark_mean.abs() <= 3.0 / (n as f64).sqrt(), "{} mean {}", t.name, t.mark_mean);
        }
    }
}

#[test]
fn poisson_patterns_are_never_flagged() {
    for seed in 0..10 {
        let r = analyze(&simulate(&SimulationSpec::independent(5, 200, seed)).unwrap(), &AnalysisOptions::default())
            .unwrap();
        assert_eq!(r.flagged(), 0);
        assert_eq!(r.usable_frequencies, FrequencyGrid::default().len() - 1);
    }
}
