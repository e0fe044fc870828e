//! Shared helpers for the integration suites: KS machinery, quadrature
//! oracles, and the published per-class statistics used by the Monte
//! Carlo experiments. Compiled once per integration target, so any
//! single target uses only a subset.
#![allow(dead_code)]

use rcskit_core::dist::{DistributionFamily, FittedModel};
use rcskit_core::numeric::adaptive_simpson;

/// Two-sided Kolmogorov–Smirnov statistic of samples against a CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    d
}

/// Critical KS value at α = 0.01 (Stephens' approximation).
pub fn ks_critical_alpha01(n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    1.62762 / (sqrt_n + 0.12 + 0.11 / sqrt_n)
}

/// Integration bounds covering all but ~1e-10 of a model's mass.
pub fn effective_bounds(model: &FittedModel) -> (f64, f64) {
    let (mut lo, mut hi) = model.support;
    let scale = characteristic_scale(model);
    if !hi.is_finite() {
        hi = if lo.is_finite() { lo + scale } else { scale };
        while model.cdf(hi) < 1.0 - 1e-10 {
            hi = hi.abs().max(scale) * 2.0;
            if hi > 1e12 * scale {
                break;
            }
        }
    }
    if !lo.is_finite() {
        lo = hi - scale;
        while model.cdf(lo) > 1e-10 {
            lo -= (hi - lo).abs().max(scale);
            if lo < -1e12 * scale {
                break;
            }
        }
    }
    (lo, hi)
}

fn characteristic_scale(model: &FittedModel) -> f64 {
    use DistributionFamily::*;
    let p = &model.params;
    let s = match model.family {
        Lognormal => (p[0] + p[1] * p[1] / 2.0).exp(),
        Gev => p[1] + p[0].abs(),
        Gamma => p[0] * p[1],
        Beta => 1.0,
        GeneralizedPareto => p[1],
        Weibull => p[1],
        Nakagami => p[1].sqrt(),
        Rayleigh => p[0],
        Rician => p[0] + p[1],
        Exponential => 1.0 / p[0],
        Normal => p[0].abs() + 4.0 * p[1],
    };
    s.abs().max(1e-12) * model.beta_scale.unwrap_or(1.0)
}

/// Quadrature of exp(logpdf) over the model's effective support.
pub fn pdf_mass(model: &FittedModel) -> f64 {
    let (lo, hi) = effective_bounds(model);
    adaptive_simpson(&|x| model.logpdf(x).exp(), lo, hi, 1e-9)
}

/// KL divergence KL(p ‖ q) by adaptive quadrature over p's mass, with q
/// floored the same way the classifier floors densities.
pub fn kl_divergence(p: &FittedModel, q: &FittedModel) -> f64 {
    let (lo, hi) = effective_bounds(p);
    adaptive_simpson(
        &|x| {
            let lp = p.logpdf(x);
            if lp == f64::NEG_INFINITY {
                return 0.0;
            }
            let lq = q.logpdf(x).max(-700.0);
            lp.exp() * (lp - lq)
        },
        lo,
        hi,
        1e-8,
    )
}

/// Published 15 GHz HH per-class mean/std statistics (dBsm) used by the
/// published-statistics experiments.
pub const UAV_CLASS_STATS_15GHZ_HH: [(&str, f64, f64); 6] = [
    ("dji-matrice-600", -12.71, 2.33),
    ("dji-matrice-100", -14.73, 2.25),
    ("trimble-zx5", -14.06, 2.61),
    ("dji-mavic-pro", -17.29, 1.89),
    ("dji-inspire-1", -14.43, 2.08),
    ("dji-phantom-4-pro", -14.87, 1.78),
];

/// Well-behaved reference parameters for every family (no density poles,
/// shapes inside the comfortable fitting range).
pub fn reference_params(family: DistributionFamily) -> Vec<f64> {
    use DistributionFamily::*;
    match family {
        Lognormal => vec![-2.7, 0.42],
        Gev => vec![0.05, 0.02, 0.1],
        Gamma => vec![2.5, 0.02],
        Beta => vec![2.0, 3.0],
        GeneralizedPareto => vec![0.2, 0.05],
        Weibull => vec![1.8, 0.08],
        Nakagami => vec![1.2, 0.006],
        Rayleigh => vec![0.05],
        Rician => vec![0.1, 0.05],
        Exponential => vec![12.0],
        Normal => vec![0.07, 0.006],
    }
}
