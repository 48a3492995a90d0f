//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use lvfront::{CoefficientSet, Field, Grid1D, PeriodicFn, ReactionPack, System};
use rand::Rng;

pub fn pack(coeffs: &CoefficientSet) -> ReactionPack {
    ReactionPack::new(coeffs, &lvfront::compute_orbits(coeffs, 256).unwrap())
}

pub fn system(coeffs: &CoefficientSet) -> System {
    System::new(pack(coeffs))
}

/// Attracting periodic orbit of `w' = w (r - a w)` by classical RK4, sampled
/// at `m` uniform nodes of one period after `periods` transient periods.
pub fn rk4_logistic_orbit(r: &PeriodicFn, a: &PeriodicFn, m: usize, sub: usize, periods: usize) -> Vec<f64> {
    let period = r.period();
    let dt = period / (m * sub) as f64;
    let rhs = |t: f64, w: f64| w * (r.eval(t) - a.eval(t) * w);
    let mut w = r.mean / a.mean;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(m);
    for p in 0..=periods {
        for k in 0..m * sub {
            if p == periods && k % sub == 0 {
                out.push(w);
            }
            let k1 = rhs(t, w);
            let k2 = rhs(t + dt / 2.0, w + dt / 2.0 * k1);
            let k3 = rhs(t + dt / 2.0, w + dt / 2.0 * k2);
            let k4 = rhs(t + dt, w + dt * k3);
            w += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
        }
        t = 0.0;
    }
    out
}

/// Plain rectangle-rule mean of uniform periodic samples.
pub fn periodic_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// A smooth field in `(0, 1)`: a random sum of Gaussians around a base level.
fn smooth_profile<R: Rng>(rng: &mut R, grid: &Grid1D) -> Vec<f64> {
    let base = rng.gen_range(0.2..0.8);
    let bumps: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(-0.15..0.15),
                rng.gen_range(-grid.l / 2.0..grid.l / 2.0),
                rng.gen_range(0.5..4.0),
            )
        })
        .collect();
    grid.xs()
        .iter()
        .map(|&x| {
            base + bumps
                .iter()
                .map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp())
                .sum::<f64>()
        })
        .collect()
}

/// Smooth `lower ≤ upper` data in `[0, 1]`.
pub fn random_ordered_pair<R: Rng>(rng: &mut R, grid: &Grid1D) -> (Field, Field) {
    let (lu, lv) = (smooth_profile(rng, grid), smooth_profile(rng, grid));
    let (centre, width, amp) = (
        rng.gen_range(-5.0..5.0),
        rng.gen_range(0.5..3.0),
        rng.gen_range(0.0..0.1),
    );
    let bump: Vec<f64> = grid
        .xs()
        .iter()
        .map(|&x| amp * (-((x - centre) / width).powi(2)).exp())
        .collect();
    let lower = Field {
        u: lu.clone(),
        v: lv.clone(),
        t: 0.0,
    };
    let upper = Field {
        u: lu.iter().zip(&bump).map(|(a, b)| a + b).collect(),
        v: lv.iter().zip(&bump).map(|(a, b)| a + 0.5 * b).collect(),
        t: 0.0,
    };
    (lower, upper)
}
