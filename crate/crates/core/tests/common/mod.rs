#![allow(dead_code)]

use std::f64::consts::SQRT_2;

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Closed-form CDF of the relay observation given `z`.
pub fn virtual_cdf(y: f64, z: u8, sigma: f64) -> f64 {
    if z == 1 {
        normal_cdf(y / sigma)
    } else {
        0.5 * normal_cdf((y + 2.0) / sigma) + 0.5 * normal_cdf((y - 2.0) / sigma)
    }
}

/// Asymptotic Kolmogorov tail `P(K > lambda)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_q((s + 0.12 + 0.11 / s) * d)
}

/// One-sample KS test; returns `(D, p)`.
pub fn ks_one_sample(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    (d, ks_p(d, n))
}

/// Two-sample KS test; returns `(D, p)`.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> (f64, f64) {
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    (d, ks_p(d, na * nb / (na + nb)))
}

/// Upper tail of the chi-square distribution, Wilson-Hilferty approximation.
pub fn chi_square_p(x: f64, dof: f64) -> f64 {
    let v = 2.0 / (9.0 * dof);
    let z = ((x / dof).powf(1.0 / 3.0) - (1.0 - v)) / v.sqrt();
    1.0 - normal_cdf(z)
}
