mod common;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use relay_de::oracle::{
    bp_decode, codeword_sampler, compare_ml_bp, enumerate_codewords, monte_carlo_ber, sample_tanner_graph, transmit,
    CodeSampler, McConfig,
};
use relay_de::ChannelParams;

#[test]
fn codeword_draws_are_uniform() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(31);
    let g = sample_tanner_graph(3, 6, 10, &mut rng).unwrap();
    let code = CodeSampler::new(&g);
    let words = enumerate_codewords(&code).unwrap();
    let index: HashMap<Vec<u8>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut counts = vec![0u64; words.len()];
    let draws = 100_000;
    for _ in 0..draws {
        counts[index[&codeword_sampler(&code, &mut rng).z]] += 1;
    }
    assert!(counts.iter().all(|&c| c > 0));
    let expected = draws as f64 / words.len() as f64;
    let chi: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = common::chi_square_p(chi, (words.len() - 1) as f64);
    assert!(p > 1e-3, "dim={} chi2={chi} p={p}", code.dimension());
}

#[test]
fn transmission_matches_virtual_channel() {
    let sigma = 0.8;
    let ch = ChannelParams::new(sigma).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(32);
    let g = sample_tanner_graph(3, 6, 20_000, &mut rng).unwrap();
    let code = CodeSampler::new(&g);
    let mut by_z = [Vec::new(), Vec::new()];
    for _ in 0..10 {
        let p = codeword_sampler(&code, &mut rng);
        let y = transmit(&p, &ch, &mut rng);
        for (&z, &v) in p.z.iter().zip(&y) {
            by_z[z as usize].push(v);
        }
    }
    let total = (by_z[0].len() + by_z[1].len()) as f64;
    let ones = by_z[1].len() as f64;
    // uniform prior on z
    assert!((ones / total - 0.5).abs() <= 4.0 * (0.25 / total).sqrt());
    for (z, ys) in by_z.into_iter().enumerate() {
        let (d, p) = common::ks_one_sample(ys, |y| common::virtual_cdf(y, z as u8, sigma));
        assert!(p > 1e-3, "z={z} D={d} p={p}");
    }
}

#[test]
fn noiseless_limit_of_transmission() {
    let ch = ChannelParams::new(1e-6).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(33);
    let g = sample_tanner_graph(3, 6, 1000, &mut rng).unwrap();
    let p = codeword_sampler(&CodeSampler::new(&g), &mut rng);
    let y = transmit(&p, &ch, &mut rng);
    for (&z, &v) in p.z.iter().zip(&y) {
        if z == 1 {
            assert!(v.abs() < 1e-4);
        } else {
            assert!((v.abs() - 2.0).abs() < 1e-4);
        }
    }
}

#[test]
fn early_stop_only_on_codewords() {
    let ch = ChannelParams::new(0.72).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(34);
    let g = sample_tanner_graph(3, 6, 500, &mut rng).unwrap();
    let code = CodeSampler::new(&g);
    let mut converged = 0;
    for _ in 0..50 {
        let p = codeword_sampler(&code, &mut rng);
        let y = transmit(&p, &ch, &mut rng);
        let t = bp_decode(&g, &y, &ch, 60);
        assert_eq!(t.outcome.converged, g.is_codeword(&t.outcome.estimate));
        converged += t.outcome.converged as usize;
    }
    assert!(converged > 0);
}

#[test]
fn above_threshold_error_floor() {
    let cfg = McConfig {
        n: 10_000,
        trials: 2,
        max_iters: 200,
        ..McConfig::default()
    };
    let r = monte_carlo_ber(&cfg, &ChannelParams::new(0.9).unwrap()).unwrap();
    assert!(r.ber[199] >= 0.005, "{}", r.ber[199]);
}

#[test]
fn noiseless_monte_carlo() {
    let cfg = McConfig {
        n: 1000,
        trials: 100,
        max_iters: 10,
        ..McConfig::default()
    };
    let r = monte_carlo_ber(&cfg, &ChannelParams::new(0.05).unwrap()).unwrap();
    assert!(r.ber.iter().all(|&b| b == 0.0));
}

#[test]
fn standard_error_scales_with_trials() {
    let ch = ChannelParams::new(0.8).unwrap();
    let se = |trials| {
        let cfg = McConfig {
            n: 2000,
            trials,
            max_iters: 3,
            ..McConfig::default()
        };
        monte_carlo_ber(&cfg, &ch).unwrap().std_err[2]
    };
    let (s1, s2, s4) = (se(10), se(20), se(40));
    let r2 = s1 / s2;
    let r4 = s1 / s4;
    assert!((r2 / 2f64.sqrt() - 1.0).abs() < 0.2, "{r2}");
    assert!((r4 / 2.0 - 1.0).abs() < 0.2, "{r4}");
}

#[test]
fn ml_not_worse_than_bp_small() {
    let cfg = McConfig {
        n: 10,
        trials: 2000,
        max_iters: 50,
        fresh_graph: false,
        ..McConfig::default()
    };
    let r = compare_ml_bp(&cfg, &ChannelParams::new(0.8).unwrap()).unwrap();
    let se = (r.ml_std_err.powi(2) + r.bp_std_err.powi(2)).sqrt();
    assert!(r.ml_fer <= r.bp_fer + 3.0 * se, "{r:?}");
}
