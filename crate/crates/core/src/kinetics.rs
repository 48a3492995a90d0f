//! Periodic coefficients, the standing assumptions, the semi-trivial
//! periodic orbits `p`, `q`, and the normalized reaction terms.
//!
//! The normalized variables are `u = u*/p` and `v = 1 - v*/q`, which turn the
//! competition system into a cooperative one on `[0,1]^2` with equilibria
//! `(0,0)` and `(1,1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periodic::{cumulative_integral, uniform_grid, Sampled};

/// Default number of orbit samples per period.
pub const DEFAULT_ORBIT_SAMPLES: usize = 256;
/// Default number of points used by [`check_assumptions`].
pub const DEFAULT_CHECK_POINTS: usize = 2048;
/// A strict inequality passes only when its slack exceeds this.
pub const STRICT_MARGIN: f64 = 1e-10;

/// `mean + Σ_k (cos_k cos(2πkt/T) + sin_k sin(2πkt/T))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicFn {
    pub mean: f64,
    /// `(k, cos amplitude, sin amplitude)` with `k ≥ 1`.
    pub harmonics: Vec<(u32, f64, f64)>,
    #[serde(skip)]
    period: f64,
}

impl PeriodicFn {
    pub fn constant(value: f64) -> Self {
        PeriodicFn {
            mean: value,
            harmonics: Vec::new(),
            period: 1.0,
        }
    }

    pub fn new(mean: f64, harmonics: Vec<(u32, f64, f64)>) -> Self {
        PeriodicFn {
            mean,
            harmonics,
            period: 1.0,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    fn omega(&self, k: u32) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.period
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = (t / self.period).rem_euclid(1.0) * self.period;
        self.mean
            + self
                .harmonics
                .iter()
                .map(|&(k, a, b)| {
                    let (sn, cs) = (self.omega(k) * s).sin_cos();
                    a * cs + b * sn
                })
                .sum::<f64>()
    }

    /// `∫_0^t (f - mean)`, exact.
    pub fn oscillating_integral(&self, t: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|&(k, a, b)| {
                let w = self.omega(k);
                let (sn, cs) = (w * t).sin_cos();
                (a * sn + b * (1.0 - cs)) / w
            })
            .sum()
    }

    /// `∫_0^t f`, exact.
    pub fn integral(&self, t: f64) -> f64 {
        self.mean * t + self.oscillating_integral(t)
    }

    fn validate(&self, name: &str) -> Result<()> {
        let finite = self.mean.is_finite() && self.harmonics.iter().all(|&(_, a, b)| a.is_finite() && b.is_finite());
        if !finite {
            return Err(Error::InvalidInput(format!("{name}: non-finite amplitude")));
        }
        if self.harmonics.iter().any(|&(k, _, _)| k == 0) {
            return Err(Error::InvalidInput(format!("{name}: harmonic index must be >= 1")));
        }
        Ok(())
    }
}

/// `(1/T)∫_0^T f` for a coefficient: its mean term.
pub fn periodic_average(f: &PeriodicFn) -> f64 {
    f.mean
}

/// `(1/T)∫_0^T f` for uniform periodic samples (composite trapezoid).
pub fn sampled_average(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("empty or non-finite samples".into()));
    }
    Ok(crate::periodic::periodic_mean(samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub period: f64,
    pub d: f64,
    pub r1: PeriodicFn,
    pub r2: PeriodicFn,
    pub a1: PeriodicFn,
    pub a2: PeriodicFn,
    pub b1: PeriodicFn,
    pub b2: PeriodicFn,
}

impl CoefficientSet {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        period: f64,
        d: f64,
        r1: PeriodicFn,
        r2: PeriodicFn,
        a1: PeriodicFn,
        a2: PeriodicFn,
        b1: PeriodicFn,
        b2: PeriodicFn,
    ) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidInput(format!("T must be positive, got {period}")));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidInput(format!("d must be positive, got {d}")));
        }
        let mut set = CoefficientSet {
            period,
            d,
            r1,
            r2,
            a1,
            a2,
            b1,
            b2,
        };
        for (name, f) in set.fns_mut() {
            f.validate(name)?;
            f.period = period;
        }
        Ok(set)
    }

    /// Constant coefficients.
    pub fn constant(period: f64, d: f64, r: [f64; 2], a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        let c = PeriodicFn::constant;
        Self::new(period, d, c(r[0]), c(r[1]), c(a[0]), c(a[1]), c(b[0]), c(b[1]))
    }

    fn fns_mut(&mut self) -> [(&'static str, &mut PeriodicFn); 6] {
        [
            ("r1", &mut self.r1),
            ("r2", &mut self.r2),
            ("a1", &mut self.a1),
            ("a2", &mut self.a2),
            ("b1", &mut self.b1),
            ("b2", &mut self.b2),
        ]
    }

    pub fn fns(&self) -> [(&'static str, &PeriodicFn); 6] {
        [
            ("r1", &self.r1),
            ("r2", &self.r2),
            ("a1", &self.a1),
            ("a2", &self.a2),
            ("b1", &self.b1),
            ("b2", &self.b2),
        ]
    }

    /// Re-establishes the shared period after deserialization.
    pub fn revalidated(self) -> Result<Self> {
        let CoefficientSet {
            period,
            d,
            r1,
            r2,
            a1,
            a2,
            b1,
            b2,
        } = self;
        Self::new(period, d, r1, r2, a1, a2, b1, b2)
    }

    /// Exchanges the roles of the two species. With `x' = x / sqrt(d)` the
    /// swapped problem again has unit diffusion in its first component and
    /// diffusivity `1/d` in the second; speeds scale by `1/sqrt(d)`.
    pub fn species_swapped(&self) -> Self {
        let s = self.clone();
        Self::new(s.period, 1.0 / s.d, s.r2, s.r1, s.b2, s.b1, s.a2, s.a1).expect("swapping preserves validity")
    }

    /// Constants `T=1, d=1, r1=r2=1, a1=b2=1, b1=1.3, a2=1.8`.
    pub fn ps_a() -> Self {
        Self::constant(1.0, 1.0, [1.0, 1.0], [1.0, 1.8], [1.3, 1.0]).expect("valid")
    }

    /// `ps_a` with `r1(t) = 1 + 0.3 sin(2πt)`.
    pub fn ps_b() -> Self {
        let mut s = Self::ps_a();
        s.r1 = PeriodicFn::new(1.0, vec![(1, 0.0, 0.3)]);
        s.revalidated().expect("valid")
    }

    /// Symmetric competition `b1 = a2 = 1.5`; its front does not move.
    pub fn ps_c() -> Self {
        Self::constant(1.0, 1.0, [1.0, 1.0], [1.0, 1.5], [1.5, 1.0]).expect("valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub a1_ok: bool,
    pub a2_ok: bool,
    pub a3_ok: bool,
    /// Smallest sampled value of each of `a1, a2, b1, b2`, then `mean r1`, `mean r2`.
    pub a1_values: [f64; 6],
    /// `min(b1/b2) r̄2 - r̄1` and `min(a2/a1) r̄1 - r̄2`.
    pub a2_margins: [f64; 2],
    /// `r̄1 + r̄2 - max(a2/a1) r̄1` and `r̄1 + r̄2 - max(b1/b2) r̄2`.
    pub a3_margins: [f64; 2],
    /// `mean(b1 q - a1 p)` and `mean(a2 p - b2 q)`; `None` when the orbits do not exist.
    pub extras: Option<[f64; 2]>,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.a1_ok && self.a2_ok && self.a3_ok
    }

    /// Name of the first failing assumption.
    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.a1_ok {
            Some("(A1)")
        } else if !self.a2_ok {
            Some("(A2)")
        } else if !self.a3_ok {
            Some("(A3)")
        } else {
            None
        }
    }
}

pub fn check_assumptions(coeffs: &CoefficientSet, grid_size: usize) -> AssumptionReport {
    let n = grid_size.max(1);
    let grid = uniform_grid(coeffs.period, n);
    let min_of = |f: &PeriodicFn| grid.iter().map(|&t| f.eval(t)).fold(f64::INFINITY, f64::min);
    let ratio = |num: &PeriodicFn, den: &PeriodicFn| {
        grid.iter()
            .map(|&t| num.eval(t) / den.eval(t))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
    };
    let rb1 = coeffs.r1.mean;
    let rb2 = coeffs.r2.mean;
    let a1_values = [
        min_of(&coeffs.a1),
        min_of(&coeffs.a2),
        min_of(&coeffs.b1),
        min_of(&coeffs.b2),
        rb1,
        rb2,
    ];
    let a1_ok = a1_values.iter().all(|&v| v > 0.0);
    let (b_lo, b_hi) = ratio(&coeffs.b1, &coeffs.b2);
    let (a_lo, a_hi) = ratio(&coeffs.a2, &coeffs.a1);
    let a2_margins = [b_lo * rb2 - rb1, a_lo * rb1 - rb2];
    let a3_margins = [rb1 + rb2 - a_hi * rb1, rb1 + rb2 - b_hi * rb2];
    let pass = |m: &[f64; 2]| a1_ok && m.iter().all(|&x| x > STRICT_MARGIN);
    let extras = if a1_ok {
        compute_orbits(coeffs, DEFAULT_ORBIT_SAMPLES).ok().map(|orbit| {
            let pack = ReactionPack::new(coeffs, &orbit);
            [pack.average(|r| r.b1q - r.a1p), pack.average(|r| r.a2p - r.b2q)]
        })
    } else {
        None
    };
    AssumptionReport {
        a1_ok,
        a2_ok: pass(&a2_margins),
        a3_ok: pass(&a3_margins),
        a1_values,
        a2_margins,
        a3_margins,
        extras,
    }
}

/// Sampled semi-trivial periodic orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    pub p: Sampled,
    pub q: Sampled,
    pub p0: f64,
    pub q0: f64,
}

impl PeriodicOrbit {
    pub fn tgrid(&self) -> Vec<f64> {
        self.p.tgrid()
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Positive periodic solution of `w' = w (r - a w)` in closed form.
fn logistic_orbit(r: &PeriodicFn, a: &PeriodicFn, m: usize) -> (f64, Vec<f64>) {
    let period = r.period();
    let mut grid = uniform_grid(period, m);
    grid.push(period);
    let growth = |t: f64| r.integral(t);
    let inner = cumulative_integral(|s| growth(s).exp() * a.eval(s), &grid);
    let w0 = (growth(period).exp() - 1.0) / inner[m];
    let values = grid[..m]
        .iter()
        .zip(&inner)
        .map(|(&t, &i)| {
            let em = (-growth(t)).exp();
            1.0 / (em / w0 + em * i)
        })
        .collect();
    (w0, values)
}

pub fn compute_orbits(coeffs: &CoefficientSet, m: usize) -> Result<PeriodicOrbit> {
    if m < 64 {
        return Err(Error::Precondition(format!("need at least 64 orbit samples, got {m}")));
    }
    for (name, r) in [("r1", &coeffs.r1), ("r2", &coeffs.r2)] {
        if r.mean <= 0.0 {
            return Err(Error::Precondition(format!(
                "mean {name} = {} must be positive",
                r.mean
            )));
        }
    }
    let (p0, p) = logistic_orbit(&coeffs.r1, &coeffs.a1, m);
    let (q0, q) = logistic_orbit(&coeffs.r2, &coeffs.b2, m);
    if p.iter().chain(&q).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Assumption("orbit not strictly positive; check (A1)".into()));
    }
    Ok(PeriodicOrbit {
        p: Sampled::new(coeffs.period, p),
        q: Sampled::new(coeffs.period, q),
        p0,
        q0,
    })
}

/// Max over the grid of the kinetic ODE residuals, using spectral time derivatives.
pub fn orbit_residual(orbit: &PeriodicOrbit, coeffs: &CoefficientSet) -> f64 {
    let grid = orbit.tgrid();
    let dp = orbit.p.deriv_samples();
    let dq = orbit.q.deriv_samples();
    let mut worst: f64 = 0.0;
    for (j, &t) in grid.iter().enumerate() {
        let (p, q) = (orbit.p.values[j], orbit.q.values[j]);
        worst = worst.max((dp[j] - p * (coeffs.r1.eval(t) - coeffs.a1.eval(t) * p)).abs());
        worst = worst.max((dq[j] - q * (coeffs.r2.eval(t) - coeffs.b2.eval(t) * q)).abs());
    }
    worst
}

/// The four products that drive every reaction term, frozen at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub a1p: f64,
    pub b1q: f64,
    pub a2p: f64,
    pub b2q: f64,
}

impl Rates {
    pub fn n1(&self) -> f64 {
        self.b1q / self.a1p
    }
    pub fn n2(&self) -> f64 {
        self.a2p / self.b2q
    }
    pub fn f(&self, u: f64, v: f64) -> f64 {
        u * (self.a1p * (1.0 - u) - self.b1q * (1.0 - v))
    }
    pub fn l(&self, u: f64, v: f64) -> f64 {
        (1.0 - v) * (self.a2p * u - self.b2q * v)
    }
    pub fn f_u(&self, u: f64, v: f64) -> f64 {
        self.a1p * (1.0 - 2.0 * u) - self.b1q * (1.0 - v)
    }
    pub fn f_v(&self, u: f64, _v: f64) -> f64 {
        self.b1q * u
    }
    pub fn l_u(&self, _u: f64, v: f64) -> f64 {
        self.a2p * (1.0 - v)
    }
    pub fn l_v(&self, u: f64, v: f64) -> f64 {
        -self.a2p * u + self.b2q * (2.0 * v - 1.0)
    }
    pub fn g(&self, u: f64, v: f64) -> f64 {
        -(1.0 - u) * (self.a1p * u - self.b1q * v)
    }
    pub fn h(&self, u: f64, v: f64) -> f64 {
        -v * (self.a2p * (1.0 - u) - self.b2q * (1.0 - v))
    }
    pub fn g_u(&self, u: f64, v: f64) -> f64 {
        self.a1p * (2.0 * u - 1.0) - self.b1q * v
    }
    pub fn g_v(&self, u: f64, _v: f64) -> f64 {
        self.b1q * (1.0 - u)
    }
    pub fn h_u(&self, _u: f64, v: f64) -> f64 {
        self.a2p * v
    }
    pub fn h_v(&self, u: f64, v: f64) -> f64 {
        -self.a2p * (1.0 - u) + self.b2q * (1.0 - 2.0 * v)
    }
}

/// Evaluators for the normalized and cooperative reaction terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionPack {
    pub coeffs: CoefficientSet,
    pub orbit: PeriodicOrbit,
}

impl ReactionPack {
    pub fn new(coeffs: &CoefficientSet, orbit: &PeriodicOrbit) -> Self {
        ReactionPack {
            coeffs: coeffs.clone(),
            orbit: orbit.clone(),
        }
    }

    pub fn period(&self) -> f64 {
        self.coeffs.period
    }

    pub fn rates(&self, t: f64) -> Rates {
        let (p, q) = (self.orbit.p.eval(t), self.orbit.q.eval(t));
        self.rates_with(t, p, q)
    }

    fn rates_with(&self, t: f64, p: f64, q: f64) -> Rates {
        let c = &self.coeffs;
        Rates {
            a1p: c.a1.eval(t) * p,
            b1q: c.b1.eval(t) * q,
            a2p: c.a2.eval(t) * p,
            b2q: c.b2.eval(t) * q,
        }
    }

    /// Rates at the orbit nodes, using the stored samples directly.
    pub fn node_rates(&self) -> Vec<Rates> {
        self.orbit
            .tgrid()
            .iter()
            .enumerate()
            .map(|(j, &t)| self.rates_with(t, self.orbit.p.values[j], self.orbit.q.values[j]))
            .collect()
    }

    /// Samples `f(rates(t_j))` on the orbit grid.
    pub fn sampled<F: Fn(&Rates) -> f64>(&self, f: F) -> Sampled {
        Sampled::new(self.period(), self.node_rates().iter().map(f).collect())
    }

    pub fn average<F: Fn(&Rates) -> f64>(&self, f: F) -> f64 {
        self.sampled(f).mean()
    }

    /// Bound on `max(|f_u|+|f_v|, |l_u|+|l_v|)` over `[0,1]^2` and one period.
    pub fn lipschitz_bound(&self) -> f64 {
        let mut lam: f64 = 0.0;
        for r in self.node_rates() {
            for iu in 0..=20 {
                for iv in 0..=20 {
                    let (u, v) = (iu as f64 / 20.0, iv as f64 / 20.0);
                    lam = lam.max(r.f_u(u, v).abs() + r.f_v(u, v).abs());
                    lam = lam.max(r.l_u(u, v).abs() + r.l_v(u, v).abs());
                }
            }
        }
        lam
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rk4_periodic_orbit(r: &PeriodicFn, a: &PeriodicFn, periods: usize, steps: usize) -> Vec<f64> {
        let rhs = |t: f64, w: f64| w * (r.eval(t) - a.eval(t) * w);
        let h = r.period() / steps as f64;
        let mut w = 1.0;
        let mut t = 0.0;
        let mut last = Vec::new();
        for p in 0..periods {
            last.clear();
            for _ in 0..steps {
                if p + 1 == periods {
                    last.push(w);
                }
                let k1 = rhs(t, w);
                let k2 = rhs(t + h / 2.0, w + h / 2.0 * k1);
                let k3 = rhs(t + h / 2.0, w + h / 2.0 * k2);
                let k4 = rhs(t + h, w + h * k3);
                w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
            }
        }
        last
    }

    #[test]
    fn averages_of_coefficients() {
        let b = CoefficientSet::ps_b();
        assert_eq!(periodic_average(&b.r1), 1.0);
        let samples: Vec<f64> = uniform_grid(1.0, 64).iter().map(|&t| b.r1.eval(t)).collect();
        assert!((sampled_average(&samples).unwrap() - 1.0).abs() < 1e-15);
        assert!(sampled_average(&[1.0, f64::NAN]).is_err());
        assert_eq!(sampled_average(&[2.5; 7]).unwrap(), 2.5);
    }

    #[test]
    fn periodic_fn_is_periodic_and_integrates_exactly() {
        let f = PeriodicFn {
            mean: 0.5,
            harmonics: vec![(1, 0.2, -0.1), (3, 0.05, 0.3)],
            period: 2.0,
        };
        for &t in &[0.1, 0.77, 1.9] {
            assert!((f.eval(t) - f.eval(t + 2.0)).abs() < 1e-14);
        }
        let n = 4000;
        let h = 1.3 / n as f64;
        let trap: f64 = (0..n)
            .map(|i| 0.5 * h * (f.eval(i as f64 * h) + f.eval((i + 1) as f64 * h)))
            .sum();
        assert!((f.integral(1.3) - trap).abs() < 1e-7);
    }

    #[test]
    fn assumption_margins_for_reference_sets() {
        let rep = check_assumptions(&CoefficientSet::ps_a(), DEFAULT_CHECK_POINTS);
        assert!(rep.all_ok());
        assert!((rep.a2_margins[0] - 0.3).abs() < 1e-12 && (rep.a2_margins[1] - 0.8).abs() < 1e-12);
        assert!((rep.a3_margins[0] - 0.2).abs() < 1e-12 && (rep.a3_margins[1] - 0.7).abs() < 1e-12);
        let [k3, k2] = rep.extras.unwrap();
        assert!((k3 - 0.3).abs() < 1e-12 && (k2 - 0.8).abs() < 1e-12);

        let mut bad = CoefficientSet::ps_a();
        bad.b1 = PeriodicFn::constant(0.9);
        let rep = check_assumptions(&bad.revalidated().unwrap(), DEFAULT_CHECK_POINTS);
        assert!(!rep.a2_ok);
        assert!((rep.a2_margins[0] + 0.1).abs() < 1e-12);
        assert_eq!(rep.first_failure(), Some("(A2)"));

        assert!(check_assumptions(&CoefficientSet::ps_b(), DEFAULT_CHECK_POINTS).all_ok());

        let mut neg = CoefficientSet::ps_a();
        neg.a1 = PeriodicFn::new(0.5, vec![(1, 0.0, 0.8)]);
        let rep = check_assumptions(&neg.revalidated().unwrap(), DEFAULT_CHECK_POINTS);
        assert!(!rep.a1_ok && rep.extras.is_none());
    }

    #[test]
    fn constant_orbits_reduce_to_ratios() {
        let c = CoefficientSet::constant(1.0, 1.0, [2.0, 0.5], [4.0, 1.0], [1.0, 0.25]).unwrap();
        let o = compute_orbits(&c, 64).unwrap();
        assert!((o.p0 - 0.5).abs() < 1e-14 && (o.q0 - 2.0).abs() < 1e-14);
        assert!(o.p.values.iter().all(|v| (v - 0.5).abs() < 1e-13));
        assert!(o.q.values.iter().all(|v| (v - 2.0).abs() < 1e-13));
        assert!(orbit_residual(&o, &c) < 1e-12);
    }

    #[test]
    fn varying_orbit_matches_rk4_and_averages() {
        let c = CoefficientSet::ps_b();
        let o = compute_orbits(&c, 256).unwrap();
        let oracle = rk4_periodic_orbit(&c.r1, &c.a1, 40, 256 * 16);
        for j in 0..256 {
            assert!((o.p.values[j] - oracle[j * 16]).abs() < 1e-10, "node {j}");
        }
        let pack = ReactionPack::new(&c, &o);
        assert!((pack.average(|r| r.a1p) - 1.0).abs() < 1e-10);
        assert!((pack.average(|r| r.b2q) - 1.0).abs() < 1e-12);
        assert!(orbit_residual(&o, &c) < 1e-8);
        assert!((o.p.values[0] - o.p0).abs() < 1e-14);
    }

    #[test]
    fn residual_flags_corruption() {
        let c = CoefficientSet::ps_b();
        let mut o = compute_orbits(&c, 256).unwrap();
        let mut p = o.p.values.clone();
        p[37] += 0.01;
        o.p = Sampled::new(1.0, p);
        assert!(orbit_residual(&o, &c) >= 1e-3);
    }

    #[test]
    fn orbit_rejects_bad_inputs() {
        let mut c = CoefficientSet::ps_a();
        assert!(matches!(compute_orbits(&c, 32), Err(Error::Precondition(_))));
        c.r2 = PeriodicFn::constant(-0.1);
        let c = c.revalidated().unwrap();
        assert!(matches!(compute_orbits(&c, 64), Err(Error::Precondition(_))));
    }

    #[test]
    fn reaction_pack_constants_and_zeros() {
        let c = CoefficientSet::ps_a();
        let pack = ReactionPack::new(&c, &compute_orbits(&c, 64).unwrap());
        let r = pack.rates(0.3);
        assert!((r.n1() - 1.3).abs() < 1e-13 && (r.n2() - 1.8).abs() < 1e-13);
        for &v in &[0.0, 0.4, 1.0] {
            assert_eq!(r.f(0.0, v), 0.0);
        }
        assert_eq!(r.f(1.0, 1.0), 0.0);
        assert_eq!(r.l(0.0, 0.0), 0.0);
        assert_eq!(r.l(1.0, 1.0), 0.0);
    }

    #[test]
    fn cooperativity_on_unit_square() {
        let c = CoefficientSet::ps_b();
        let pack = ReactionPack::new(&c, &compute_orbits(&c, 64).unwrap());
        for r in pack.node_rates() {
            for iu in 0..50 {
                for iv in 0..50 {
                    let (u, v) = (iu as f64 / 49.0, iv as f64 / 49.0);
                    assert!(r.f_v(u, v) >= 0.0 && r.l_u(u, v) >= 0.0);
                    assert!(r.g_v(u, v) >= 0.0 && r.h_u(u, v) >= 0.0);
                }
            }
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let r = Rates {
            a1p: 1.1,
            b1q: 1.4,
            a2p: 1.7,
            b2q: 0.9,
        };
        let e = 1e-6;
        let (u, v) = (0.3, 0.6);
        let fd = |f: &dyn Fn(f64, f64) -> f64, du: f64, dv: f64| (f(u + du, v + dv) - f(u - du, v - dv)) / (2.0 * e);
        assert!((fd(&|a, b| r.f(a, b), e, 0.0) - r.f_u(u, v)).abs() < 1e-8);
        assert!((fd(&|a, b| r.f(a, b), 0.0, e) - r.f_v(u, v)).abs() < 1e-8);
        assert!((fd(&|a, b| r.l(a, b), e, 0.0) - r.l_u(u, v)).abs() < 1e-8);
        assert!((fd(&|a, b| r.l(a, b), 0.0, e) - r.l_v(u, v)).abs() < 1e-8);
        assert!((fd(&|a, b| r.g(a, b), e, 0.0) - r.g_u(u, v)).abs() < 1e-8);
        assert!((fd(&|a, b| r.g(a, b), 0.0, e) - r.g_v(u, v)).abs() < 1e-8);
        assert!((fd(&|a, b| r.h(a, b), e, 0.0) - r.h_u(u, v)).abs() < 1e-8);
        assert!((fd(&|a, b| r.h(a, b), 0.0, e) - r.h_v(u, v)).abs() < 1e-8);
        assert!((r.g(u, v) + r.f(1.0 - u, 1.0 - v)).abs() < 1e-15);
        assert!((r.h(u, v) + r.l(1.0 - u, 1.0 - v)).abs() < 1e-15);
    }

    #[test]
    fn swap_is_an_involution_when_d_is_one() {
        let b = CoefficientSet::ps_b();
        assert_eq!(b.species_swapped().species_swapped(), b);
        let s = b.species_swapped();
        assert_eq!(s.a1, b.b2);
        assert_eq!(s.b1, b.a2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn orbits_positive_with_averaged_identities(
                r1 in 0.3f64..2.0, s1 in -0.25f64..0.25, a1 in 0.5f64..2.0, ca in -0.3f64..0.3,
                r2 in 0.3f64..2.0, b2 in 0.5f64..2.0,
            ) {
                let c = CoefficientSet::new(
                    1.0, 1.0,
                    PeriodicFn::new(r1, vec![(1, 0.0, s1 * r1)]),
                    PeriodicFn::constant(r2),
                    PeriodicFn::new(a1, vec![(2, ca * a1, 0.0)]),
                    PeriodicFn::constant(1.0),
                    PeriodicFn::constant(1.0),
                    PeriodicFn::constant(b2),
                ).unwrap();
                let o = compute_orbits(&c, 256).unwrap();
                prop_assert!(o.p.min() > 0.0 && o.q.min() > 0.0);
                let pack = ReactionPack::new(&c, &o);
                prop_assert!((pack.average(|r| r.a1p) - r1).abs() < 1e-8);
                prop_assert!((pack.average(|r| r.b2q) - r2).abs() < 1e-8);
                prop_assert!(orbit_residual(&o, &c) < 1e-6);
            }

            #[test]
            fn a2_implies_positive_extras(
                r1 in 0.5f64..1.5, r2 in 0.5f64..1.5, b1 in 0.5f64..3.0, a2 in 0.5f64..3.0, amp in 0.0f64..0.4,
            ) {
                let c = CoefficientSet::new(
                    1.0, 1.0,
                    PeriodicFn::new(r1, vec![(1, amp * r1, 0.0)]),
                    PeriodicFn::constant(r2),
                    PeriodicFn::constant(1.0),
                    PeriodicFn::new(a2, vec![(1, 0.0, 0.2 * amp * a2)]),
                    PeriodicFn::constant(b1),
                    PeriodicFn::constant(1.0),
                ).unwrap();
                let rep = check_assumptions(&c, 512);
                if rep.a2_ok {
                    let [x, y] = rep.extras.unwrap();
                    prop_assert!(x > 0.0 && y > 0.0);
                }
            }
        }
    }
}
