//! Trigonometric interpolation and quadrature on uniform periodic grids.

use std::f64::consts::PI;

/// Trigonometric interpolant of uniformly spaced samples over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct Trig {
    period: f64,
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Trig {
    pub fn from_samples(period: f64, samples: &[f64]) -> Self {
        let m = samples.len();
        let mean = samples.iter().sum::<f64>() / m as f64;
        let kmax = m / 2;
        let mut cos = vec![0.0; kmax];
        let mut sin = vec![0.0; kmax];
        for k in 1..=kmax {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &f) in samples.iter().enumerate() {
                let th = 2.0 * PI * ((k * j) % m) as f64 / m as f64;
                a += f * th.cos();
                b += f * th.sin();
            }
            let nyquist = m.is_multiple_of(2) && k == kmax;
            let w = if nyquist { 1.0 } else { 2.0 } / m as f64;
            cos[k - 1] = a * w;
            sin[k - 1] = if nyquist { 0.0 } else { b * w };
        }
        Trig { period, mean, cos, sin }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    fn sum<F: Fn(usize, f64, f64, f64) -> f64>(&self, t: f64, term: F) -> f64 {
        let th = 2.0 * PI * (t / self.period).rem_euclid(1.0);
        let (s1, c1) = th.sin_cos();
        let (mut c, mut s) = (c1, s1);
        let mut acc = 0.0;
        for k in 0..self.cos.len() {
            acc += term(k + 1, c, s, 2.0 * PI * (k + 1) as f64 / self.period);
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
        }
        acc
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.mean + self.sum(t, |k, c, s, _| self.cos[k - 1] * c + self.sin[k - 1] * s)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.sum(t, |k, c, s, w| w * (self.sin[k - 1] * c - self.cos[k - 1] * s))
    }

    /// `∫_0^t (f - mean)`, which is itself T-periodic.
    pub fn oscillating_integral(&self, t: f64) -> f64 {
        let at = |t: f64| self.sum(t, |k, c, s, w| (self.cos[k - 1] * s - self.sin[k - 1] * c) / w);
        at(t) - at(0.0)
    }
}

/// Uniform samples `t_j = j T / M` of a periodic function with their interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub values: Vec<f64>,
    trig: Trig,
}

impl Sampled {
    pub fn new(period: f64, values: Vec<f64>) -> Self {
        let trig = Trig::from_samples(period, &values);
        Sampled { values, trig }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(period: f64, m: usize, f: F) -> Self {
        Self::new(period, uniform_grid(period, m).into_iter().map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.trig.period
    }

    pub fn tgrid(&self) -> Vec<f64> {
        uniform_grid(self.period(), self.len())
    }

    pub fn mean(&self) -> f64 {
        self.trig.mean
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.trig.eval(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.trig.deriv(t)
    }

    pub fn trig(&self) -> &Trig {
        &self.trig
    }

    /// Spectral derivative at the sample nodes.
    pub fn deriv_samples(&self) -> Vec<f64> {
        self.tgrid().into_iter().map(|t| self.trig.deriv(t)).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn uniform_grid(period: f64, m: usize) -> Vec<f64> {
    (0..m).map(|j| period * j as f64 / m as f64).collect()
}

/// Composite trapezoid average over a uniform periodic grid.
pub fn periodic_mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Trapezoid sums with 4, 8 and 16 panels, twice Richardson-extrapolated.
pub fn romberg<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let trap = |n: usize| {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (0.5 * (f(a) + f(b)) + inner)
    };
    let (t4, t8, t16) = (trap(4), trap(8), trap(16));
    let r1 = (4.0 * t8 - t4) / 3.0;
    let r2 = (4.0 * t16 - t8) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// `out[i] = ∫_{grid[0]}^{grid[i]} f`.
pub fn cumulative_integral<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in grid.windows(2) {
        acc += romberg(&f, w[0], w[1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolant_reproduces_trig_polynomial() {
        let f = |t: f64| 1.0 + 0.3 * (2.0 * PI * t).sin() - 0.2 * (6.0 * PI * t).cos();
        let s = Sampled::from_fn(1.0, 32, f);
        for &t in &[0.013, 0.37, 0.81] {
            assert!((s.eval(t) - f(t)).abs() < 1e-13);
            let df = 0.6 * PI * (2.0 * PI * t).cos() + 1.2 * PI * (6.0 * PI * t).sin();
            assert!((s.deriv(t) - df).abs() < 1e-12);
        }
        assert!((s.mean() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oscillating_integral_matches_closed_form() {
        let s = Sampled::from_fn(2.0, 16, |t| 3.0 + (PI * t).cos());
        let t = 0.7;
        assert!((s.trig().oscillating_integral(t) - (PI * t).sin() / PI).abs() < 1e-14);
        assert!(s.trig().oscillating_integral(2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_integral_of_exponential() {
        let grid = uniform_grid(1.0, 65);
        let c = cumulative_integral(f64::exp, &grid);
        for (t, v) in grid.iter().zip(&c) {
            assert!((v - (t.exp() - 1.0)).abs() < 1e-13);
        }
    }
}
