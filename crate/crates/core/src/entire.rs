//! Entire solutions built from two fronts approaching from both sides.
//!
//! Everything here is in the `c < 0` orientation of the normalized system,
//! where the front `Φ(t, x - ct)` has the state `1` invading `0`. Problems
//! with `c > 0` go through [`reflect_for_positive_c`] first.

use crate::error::{Error, Result};
use crate::front::FrontProfile;
use crate::pde::{BoundaryPolicy, Field, Grid1D, Stepper, System};
use serde::Serialize;

/// `ϖ = -(1/ν3) ln(1 + K/|c|)`.
pub fn shift_domain(k: f64, c: f64, nu3: f64) -> Result<f64> {
    if c >= 0.0 {
        return Err(Error::Domain(format!(
            "shift curves need c < 0, got {c}; reflect first"
        )));
    }
    if !(k > 0.0 && nu3 > 0.0) {
        return Err(Error::Precondition(format!(
            "need K > 0 and nu3 > 0, got K = {k}, nu3 = {nu3}"
        )));
    }
    Ok(-(1.0 + k / c.abs()).ln() / nu3)
}

/// The closed-form solutions of the shift system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftCurves {
    pub omega1: f64,
    pub omega2: f64,
    pub k: f64,
    pub c: f64,
    pub nu3: f64,
    pub varpi: f64,
    /// Root of `ω(ρ) = max(ω1, ω2)`.
    pub rho1: f64,
    /// `ρ` of the curve attached to `min(ω1, ω2)`.
    pub rho2: f64,
}

/// `ω(ρ) = ρ - (1/ν3) ln(1 - (K/c) e^{ν3 ρ})`.
fn omega_of_rho(rho: f64, k: f64, c: f64, nu3: f64) -> f64 {
    rho - (1.0 - k / c * (nu3 * rho).exp()).ln() / nu3
}

fn omega_of_rho_prime(rho: f64, k: f64, c: f64, nu3: f64) -> f64 {
    let e = -k / c * (nu3 * rho).exp();
    1.0 - e / (1.0 + e)
}

pub fn build_shift_curves(omega1: f64, omega2: f64, k: f64, c: f64, nu3: f64) -> Result<ShiftCurves> {
    let varpi = shift_domain(k, c, nu3)?;
    if omega1 > varpi || omega2 > varpi {
        return Err(Error::Domain(format!(
            "omegas ({omega1}, {omega2}) must not exceed varpi = {varpi}"
        )));
    }
    let top = omega1.max(omega2);
    // ω(ρ) ∈ [ρ + ϖ, ρ), so the root lies in [top, top - ϖ] ∩ (-∞, 0].
    let (mut lo, mut hi) = (top, (top - varpi).min(0.0));
    let mut rho = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g = omega_of_rho(rho, k, c, nu3) - top;
        if g.abs() <= 1e-14 {
            break;
        }
        if g > 0.0 {
            hi = rho;
        } else {
            lo = rho;
        }
        let newton = rho - g / omega_of_rho_prime(rho, k, c, nu3);
        rho = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let log_term = (1.0 - k / c * (nu3 * rho).exp()).ln() / nu3;
    let bottom = omega1.min(omega2);
    Ok(ShiftCurves {
        omega1,
        omega2,
        k,
        c,
        nu3,
        varpi,
        rho1: rho,
        rho2: bottom + log_term,
    })
}

impl ShiftCurves {
    /// `-(1/ν3) ln{1 - (K/c) e^{ν3 ρ1} (1 - e^{-c ν3 t})}`.
    fn shared(&self, t: f64) -> f64 {
        let s = self.k / self.c * (self.nu3 * self.rho1).exp();
        -(1.0 - s * (1.0 - (-self.c * self.nu3 * t).exp())).ln() / self.nu3
    }

    fn shared_prime(&self, t: f64) -> f64 {
        let s = self.k / self.c * (self.nu3 * self.rho1).exp();
        let e = (-self.c * self.nu3 * t).exp();
        s * self.c * e / (1.0 - s * (1.0 - e))
    }

    fn upper(&self, t: f64) -> f64 {
        self.rho1 - self.c * t + self.shared(t)
    }

    fn lower(&self, t: f64) -> f64 {
        self.rho2 - self.c * t + self.shared(t)
    }

    /// The curve attached to `ω1` (so that `j1 - (-ct + ω1)` is the shared term).
    pub fn j1(&self, t: f64) -> f64 {
        if self.omega2 <= self.omega1 {
            self.upper(t)
        } else {
            self.lower(t)
        }
    }

    pub fn j2(&self, t: f64) -> f64 {
        if self.omega2 <= self.omega1 {
            self.lower(t)
        } else {
            self.upper(t)
        }
    }

    /// Common derivative `j1' = j2'`.
    pub fn j_prime(&self, t: f64) -> f64 {
        -self.c + self.shared_prime(t)
    }

    /// Residual of `j' = -c + K e^{ν3 max(j1, j2)}`.
    pub fn ode_residual(&self, t: f64) -> f64 {
        self.j_prime(t) - (-self.c + self.k * (self.nu3 * self.upper(t)).exp())
    }

    /// `j1(t) - (-ct + ω1)`.
    pub fn excess(&self, t: f64) -> f64 {
        self.j1(t) + self.c * t - self.omega1
    }

    /// `R0 = ln(1 + ς)/ν3` with `ς = -(K/c) e^{ν3 ρ1}`: the excess times
    /// `e^{c ν3 t}` is largest at `t = 0`.
    pub fn r0(&self) -> f64 {
        let sigma = -self.k / self.c * (self.nu3 * self.rho1).exp();
        (1.0 + sigma).ln() / self.nu3
    }
}

/// `a + b - ab` componentwise.
fn combine(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0 - a.0 * b.0, a.1 + b.1 - a.1 * b.1)
}

/// `W̄ = Φ(t, x + j1) + Φ(t, -x + j2) - Φ(t, x + j1) Φ(t, -x + j2)`.
pub fn supersolution_eval(front: &FrontProfile, curves: &ShiftCurves, t: f64, x: f64) -> (f64, f64) {
    combine(front.eval(t, x + curves.j1(t)), front.eval(t, -x + curves.j2(t)))
}

fn sub_branches(front: &FrontProfile, omegas: (f64, f64), t: f64, x: f64) -> [(f64, f64); 2] {
    let c = front.c;
    [
        front.eval(t, x - c * t + omegas.0),
        front.eval(t, -x - c * t + omegas.1),
    ]
}

/// `w̲ = max{Φ(t, x - ct + ω1), Φ(t, -x - ct + ω2)}` componentwise.
pub fn subsolution_eval(front: &FrontProfile, omegas: (f64, f64), t: f64, x: f64) -> (f64, f64) {
    let [a, b] = sub_branches(front, omegas, t, x);
    (a.0.max(b.0), a.1.max(b.1))
}

/// Operator values at one node with their location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub t: f64,
    pub x: f64,
}

impl Extremum {
    fn min() -> Self {
        Extremum {
            value: f64::INFINITY,
            t: f64::NAN,
            x: f64::NAN,
        }
    }
    fn max() -> Self {
        Extremum {
            value: f64::NEG_INFINITY,
            t: f64::NAN,
            x: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    /// `min F1(W̄)`, `min F2(W̄)`.
    pub super_min: [Extremum; 2],
    /// `max F1(w̲)`, `max F2(w̲)` off the kink band.
    pub sub_max: [Extremum; 2],
    pub tol_env: f64,
    pub kink_excluded: usize,
    pub nodes: usize,
    pub pass: bool,
}

/// Check window: stored phases over `[-periods T, 0]` and `|x| ≤ x_max` at the
/// front's spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeCheck {
    pub periods: usize,
    pub x_max: f64,
    pub tol_env: f64,
}

/// `F = (U_t - U_xx - f, V_t - d V_xx - l)` from a 3-point time and 5-point
/// space stencil of `eval`.
fn operator(
    eval: &dyn Fn(f64, f64) -> (f64, f64),
    system: &System,
    t: f64,
    x: f64,
    dt: f64,
    h: f64,
    centre: (f64, f64),
) -> (f64, f64) {
    let (a, b) = (eval(t + dt, x), eval(t - dt, x));
    let s: Vec<(f64, f64)> = [-2.0, -1.0, 1.0, 2.0].iter().map(|k| eval(t, x + k * h)).collect();
    let xx = |g: &dyn Fn((f64, f64)) -> f64, c: f64| {
        (-g(s[0]) + 16.0 * g(s[1]) - 30.0 * c + 16.0 * g(s[2]) - g(s[3])) / (12.0 * h * h)
    };
    let (u, v) = centre;
    let (f, l) = system.local(t).eval(u, v);
    let f1 = (a.0 - b.0) / (2.0 * dt) - xx(&|p| p.0, u) - f;
    let f2 = (a.1 - b.1) / (2.0 * dt) - system.d() * xx(&|p| p.1, v) - l;
    (f1, f2)
}

pub fn verify_envelope_inequalities(
    system: &System,
    front: &FrontProfile,
    curves: &ShiftCurves,
    check: &EnvelopeCheck,
) -> EnvelopeReport {
    let dt = front.period / front.m_t as f64;
    let h = front.h;
    let nt = check.periods * front.m_t;
    let nx = (check.x_max / h).round() as i64;
    let omegas = (curves.omega1, curves.omega2);
    let mut sup = [Extremum::min(), Extremum::min()];
    let mut sub = [Extremum::max(), Extremum::max()];
    let mut excluded = 0;
    let mut nodes = 0;
    let sup_eval = |t: f64, x: f64| supersolution_eval(front, curves, t, x);
    for k in 0..=nt {
        // Stay one step inside t ≤ 0 so the centred difference never leaves it.
        let t = -((k + 1) as f64) * dt;
        for jx in -nx..=nx {
            let x = jx as f64 * h;
            nodes += 1;
            let centre = sup_eval(t, x);
            let (f1, f2) = operator(&sup_eval, system, t, x, dt, h, centre);
            for (e, v) in sup.iter_mut().zip([f1, f2]) {
                if v < e.value {
                    *e = Extremum { value: v, t, x };
                }
            }
            // Subsolution: one smooth branch per component across the whole stencil.
            let pick = |tt: f64, xx: f64| {
                let [a, b] = sub_branches(front, omegas, tt, xx);
                (a.0 >= b.0, a.1 >= b.1)
            };
            let here = pick(t, x);
            let stencil = [
                (t + dt, x),
                (t - dt, x),
                (t, x - 2.0 * h),
                (t, x - h),
                (t, x + h),
                (t, x + 2.0 * h),
            ];
            if stencil.iter().any(|&(a, b)| pick(a, b) != here) {
                excluded += 1;
                continue;
            }
            let branch = |tt: f64, xx: f64| {
                let [a, b] = sub_branches(front, omegas, tt, xx);
                (if here.0 { a.0 } else { b.0 }, if here.1 { a.1 } else { b.1 })
            };
            let centre = subsolution_eval(front, omegas, t, x);
            let (g1, g2) = operator(&branch, system, t, x, dt, h, centre);
            for (e, v) in sub.iter_mut().zip([g1, g2]) {
                if v > e.value {
                    *e = Extremum { value: v, t, x };
                }
            }
        }
    }
    let pass = sup.iter().all(|e| e.value >= -check.tol_env) && sub.iter().all(|e| e.value <= check.tol_env);
    EnvelopeReport {
        super_min: sup,
        sub_max: sub,
        tol_env: check.tol_env,
        kink_excluded: excluded,
        nodes,
        pass,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntireOptions {
    pub l: f64,
    pub h: f64,
    pub dt: f64,
    pub n_list: Vec<usize>,
    pub t_end: f64,
    pub samples_per_period: usize,
    pub tol: f64,
}

impl Default for EntireOptions {
    fn default() -> Self {
        EntireOptions {
            l: 60.0,
            h: 0.05,
            dt: 1e-3,
            n_list: vec![2, 4, 6, 8],
            t_end: 4.0,
            samples_per_period: 4,
            tol: 5e-4,
        }
    }
}

/// One IVP started from the subsolution at `-nT`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntireSolution {
    pub n: usize,
    /// Index into [`EntireRun::times`] of the first snapshot.
    pub first: usize,
    pub snapshots: Vec<Field>,
}

impl EntireSolution {
    pub fn at(&self, time_index: usize) -> Option<&Field> {
        time_index.checked_sub(self.first).and_then(|k| self.snapshots.get(k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntireDiagnostics {
    /// Per consecutive pair in `n_list`: `min(w^{n'} - w^n)` over shared nodes.
    pub monotone_min: Vec<f64>,
    /// Per consecutive pair: `max |w^{n'} - w^n|`.
    pub cauchy_gaps: Vec<f64>,
    /// `min(w^n - w̲)` over `t ≤ 0`.
    pub sandwich_lower: Extremum,
    /// `min(W̄ - w^n)` over `t ≤ 0`, when shift curves were supplied.
    pub sandwich_upper: Option<Extremum>,
    pub monotone_pass: bool,
    pub sandwich_pass: bool,
    pub cauchy_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntireRun {
    pub omegas: (f64, f64),
    pub grid: Grid1D,
    pub times: Vec<f64>,
    pub solutions: Vec<EntireSolution>,
    pub diagnostics: EntireDiagnostics,
    pub tol: f64,
    pub period: f64,
    pub samples_per_period: usize,
}

impl EntireRun {
    /// The largest-`n` solution, standing in for the limit.
    pub fn proxy(&self) -> &EntireSolution {
        self.solutions.last().expect("non-empty n_list")
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() < 1e-9)
    }
}

fn subsolution_field(front: &FrontProfile, omegas: (f64, f64), grid: &Grid1D, t: f64) -> Field {
    Field::from_fn(grid, t, |x| subsolution_eval(front, omegas, t, x))
}

pub fn build_entire(
    system: &System,
    front: &FrontProfile,
    omegas: (f64, f64),
    curves: Option<&ShiftCurves>,
    opts: &EntireOptions,
) -> Result<EntireRun> {
    if front.c >= 0.0 {
        return Err(Error::Domain(format!(
            "entire runs need c < 0, got {}; reflect first",
            front.c
        )));
    }
    if opts.n_list.is_empty() || opts.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "n_list must be non-empty and strictly increasing".into(),
        ));
    }
    if let Some(cv) = curves {
        if omegas.0 > cv.varpi || omegas.1 > cv.varpi {
            return Err(Error::Domain(format!("omegas {omegas:?} exceed varpi = {}", cv.varpi)));
        }
    }
    let period = system.period();
    let grid = Grid1D::new(opts.l, opts.h, opts.dt)?;
    let n_max = *opts.n_list.last().expect("non-empty");
    let edge = subsolution_field(front, omegas, &grid, -(n_max as f64) * period);
    let last = grid.n_nodes - 1;
    let gap = [(edge.u[0], edge.v[0]), (edge.u[last], edge.v[last])]
        .iter()
        .map(|&(u, v)| u.abs().max(v.abs()).min((1.0 - u).abs().max((1.0 - v).abs())))
        .fold(0.0, f64::max);
    if gap > 1e-8 {
        return Err(Error::Precondition(format!(
            "domain too small: subsolution at the boundary is {gap:e} from an equilibrium at t = -{n_max}T"
        )));
    }
    let spp = opts.samples_per_period.max(1);
    let t0 = -(n_max as f64) * period;
    let total = ((opts.t_end - t0) / period * spp as f64).round() as usize;
    let times: Vec<f64> = (0..=total).map(|k| t0 + k as f64 * period / spp as f64).collect();
    let boundary = |t: f64| {
        let (l, r) = (
            subsolution_eval(front, omegas, t, -grid.l),
            subsolution_eval(front, omegas, t, grid.l),
        );
        BoundaryPolicy::Dirichlet { left: l, right: r }
    };
    let mut solutions = Vec::new();
    for &n in &opts.n_list {
        let start = -(n as f64) * period;
        let first = (n_max - n) * spp;
        let mut field = subsolution_field(front, omegas, &grid, start);
        let mut stepper = Stepper::new(system.clone(), grid, &boundary(start))?;
        let mut snapshots = vec![field.clone()];
        for &t in &times[first + 1..] {
            stepper.evolve(&mut field, t, &boundary, None)?;
            field.t = t;
            snapshots.push(field.clone());
        }
        solutions.push(EntireSolution { n, first, snapshots });
    }
    let diagnostics = diagnose(front, omegas, curves, &grid, &times, &solutions, opts.tol);
    Ok(EntireRun {
        omegas,
        grid,
        times,
        solutions,
        diagnostics,
        tol: opts.tol,
        period,
        samples_per_period: spp,
    })
}

fn diagnose(
    front: &FrontProfile,
    omegas: (f64, f64),
    curves: Option<&ShiftCurves>,
    grid: &Grid1D,
    times: &[f64],
    solutions: &[EntireSolution],
    tol: f64,
) -> EntireDiagnostics {
    let mut monotone_min = Vec::new();
    let mut cauchy_gaps = Vec::new();
    for pair in solutions.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (mut lo, mut gap) = (f64::INFINITY, 0.0f64);
        for (k, fa) in a.snapshots.iter().enumerate() {
            let fb = b.at(a.first + k).expect("larger n starts earlier");
            for j in 0..grid.n_nodes {
                for diff in [fb.u[j] - fa.u[j], fb.v[j] - fa.v[j]] {
                    lo = lo.min(diff);
                    gap = gap.max(diff.abs());
                }
            }
        }
        monotone_min.push(lo);
        cauchy_gaps.push(gap);
    }
    let mut lower = Extremum::min();
    let mut upper = curves.map(|_| Extremum::min());
    let xs = grid.xs();
    for sol in solutions {
        for (k, f) in sol.snapshots.iter().enumerate() {
            let t = times[sol.first + k];
            if t > 1e-12 {
                break;
            }
            for (j, &x) in xs.iter().enumerate() {
                let s = subsolution_eval(front, omegas, t, x);
                let m = (f.u[j] - s.0).min(f.v[j] - s.1);
                if m < lower.value {
                    lower = Extremum { value: m, t, x };
                }
                if let (Some(cv), Some(up)) = (curves, upper.as_mut()) {
                    let w = supersolution_eval(front, cv, t, x);
                    let m = (w.0 - f.u[j]).min(w.1 - f.v[j]);
                    if m < up.value {
                        *up = Extremum { value: m, t, x };
                    }
                }
            }
        }
    }
    let monotone_pass = monotone_min.iter().all(|&m| m >= -tol);
    let sandwich_pass = lower.value >= -tol && upper.is_none_or(|u| u.value >= -tol);
    let cauchy_decreasing = cauchy_gaps.windows(2).all(|w| w[1] <= w[0]);
    EntireDiagnostics {
        monotone_min,
        cauchy_gaps,
        sandwich_lower: lower,
        sandwich_upper: upper,
        monotone_pass,
        sandwich_pass,
        cauchy_decreasing,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    /// `min(W*(t+T) - W*(t))` over shared samples.
    pub period_monotone: f64,
    pub period_monotone_pass: bool,
    /// Sup distances to the right and left fronts two periods after the start.
    pub backward_limit: (f64, f64),
    pub backward_limit_pass: bool,
    /// `min W*` at the last sample.
    pub forward_min: f64,
    pub forward_horizon: f64,
    /// `None` when the run stops before [`forward_horizon`].
    pub forward_pass: Option<bool>,
    /// `max |W*(t,x) - W*(t,-x)|`, only for `ω1 = ω2`.
    pub symmetry: Option<f64>,
    pub symmetry_pass: bool,
    /// `(min, max)` of `W*` over interior nodes.
    pub bounds: (f64, f64),
    pub bounds_pass: bool,
}

pub const PERIOD_MONOTONE_TOL: f64 = 1e-6;
pub const LIMIT_TOL: f64 = 0.05;
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Margin in `z` past the origin that both fronts must reach before the
/// forward limit is tested.
pub const FORWARD_MARGIN: f64 = 15.0;

/// First time at which both fronts have passed `x = 0` by [`FORWARD_MARGIN`].
pub fn forward_horizon(front: &FrontProfile, omegas: (f64, f64)) -> f64 {
    (omegas.0.min(omegas.1) - FORWARD_MARGIN) / front.c
}

pub fn check_properties(run: &EntireRun, front: &FrontProfile) -> PropertyReport {
    let proxy = run.proxy();
    let spp = run.samples_per_period;
    let n = run.grid.n_nodes;
    let xs = run.grid.xs();
    let mut period_monotone = f64::INFINITY;
    for k in 0..proxy.snapshots.len().saturating_sub(spp) {
        let (a, b) = (&proxy.snapshots[k], &proxy.snapshots[k + spp]);
        for j in 0..n {
            period_monotone = period_monotone.min(b.u[j] - a.u[j]).min(b.v[j] - a.v[j]);
        }
    }
    let c = front.c;
    let (w1, w2) = run.omegas;
    let back_k = (2 * spp).min(proxy.snapshots.len() - 1);
    let back = &proxy.snapshots[back_k];
    let tb = run.times[proxy.first + back_k];
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for (j, &x) in xs.iter().enumerate() {
        if x >= 0.0 {
            let (p, q) = front.eval(tb, x - c * tb + w1);
            plus = plus.max((back.u[j] - p).abs()).max((back.v[j] - q).abs());
        }
        if x <= 0.0 {
            let (p, q) = front.eval(tb, -x - c * tb + w2);
            minus = minus.max((back.u[j] - p).abs()).max((back.v[j] - q).abs());
        }
    }
    let last = proxy.snapshots.last().expect("non-empty");
    let forward_min = last.u.iter().chain(&last.v).cloned().fold(f64::INFINITY, f64::min);
    let horizon = forward_horizon(front, run.omegas);
    let t_last = *run.times.last().expect("non-empty");
    let symmetry = (w1 == w2).then(|| {
        proxy
            .snapshots
            .iter()
            .flat_map(|f| (0..n).map(move |j| (f.u[j] - f.u[n - 1 - j]).abs().max((f.v[j] - f.v[n - 1 - j]).abs())))
            .fold(0.0, f64::max)
    });
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for f in &proxy.snapshots {
        for j in 1..n - 1 {
            lo = lo.min(f.u[j]).min(f.v[j]);
            hi = hi.max(f.u[j]).max(f.v[j]);
        }
    }
    PropertyReport {
        period_monotone,
        period_monotone_pass: period_monotone >= -PERIOD_MONOTONE_TOL,
        backward_limit: (plus, minus),
        backward_limit_pass: plus <= LIMIT_TOL && minus <= LIMIT_TOL,
        forward_min,
        forward_horizon: horizon,
        forward_pass: (t_last >= horizon).then_some(forward_min >= 1.0 - LIMIT_TOL),
        symmetry,
        symmetry_pass: symmetry.is_none_or(|s| s <= SYMMETRY_TOL),
        bounds: (lo, hi),
        bounds_pass: lo > 0.0 && hi < 1.0,
    }
}

/// `min(W*_b - W*_a)` over all shared snapshots; nonnegative when `b` was
/// started from larger `ω`s.
pub fn omega_ordering(a: &EntireRun, b: &EntireRun) -> Result<f64> {
    if a.times != b.times || a.grid != b.grid {
        return Err(Error::Consistency("runs use different time sets or grids".into()));
    }
    let (pa, pb) = (a.proxy(), b.proxy());
    let mut lo = f64::INFINITY;
    for (k, fa) in pa.snapshots.iter().enumerate() {
        if let Some(fb) = pb.at(pa.first + k) {
            for j in 0..fa.u.len() {
                lo = lo.min(fb.u[j] - fa.u[j]).min(fb.v[j] - fa.v[j]);
            }
        }
    }
    Ok(lo)
}

/// Shift `(t0, x0)` relating two parameter pairs whose sum differs by a
/// multiple of `-2cT`; `None` if it is not an integer multiple.
pub fn translation_shift(base: (f64, f64), other: (f64, f64), c: f64, period: f64) -> Option<(i64, f64)> {
    let (d1, d2) = (other.0 - base.0, other.1 - base.1);
    let k = (d1 + d2) / (-2.0 * c * period);
    ((k - k.round()).abs() < 1e-9).then(|| (k.round() as i64, (d1 - d2) / 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationReport {
    pub k: i64,
    pub x0: f64,
    pub max_diff: f64,
    pub compared: usize,
    pub pass: bool,
}

pub const TRANSLATION_TOL: f64 = 1e-4;

/// Runs `base` from `-nT` and `other` from `-(n+k)T` and compares
/// `W_other(t, x)` with `W_base(t + kT, x + x0)` on common nodes with
/// `|x| ≤ x_window`. `x0` must be a multiple of `h` and `k ≥ 0`.
pub fn translation_check(
    system: &System,
    front: &FrontProfile,
    base: (f64, f64),
    other: (f64, f64),
    n: usize,
    opts: &EntireOptions,
    x_window: f64,
) -> Result<TranslationReport> {
    let period = system.period();
    let (k, x0) = translation_shift(base, other, front.c, period)
        .ok_or_else(|| Error::Precondition("omega shift is not an integer number of periods".into()))?;
    let shift_nodes = x0 / opts.h;
    if k < 0 || (shift_nodes - shift_nodes.round()).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "need k >= 0 and x0 on the lattice, got k = {k}, x0 = {x0}"
        )));
    }
    let m = shift_nodes.round() as i64;
    let k = k as usize;
    let run_a = build_entire(
        system,
        front,
        base,
        None,
        &EntireOptions {
            n_list: vec![n],
            ..opts.clone()
        },
    )?;
    let run_b = build_entire(
        system,
        front,
        other,
        None,
        &EntireOptions {
            n_list: vec![n + k],
            ..opts.clone()
        },
    )?;
    let (sa, sb) = (run_a.proxy(), run_b.proxy());
    let grid = run_a.grid;
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    // W_b(t, x) at time index i of run_b corresponds to W_a(t + kT) at the same
    // index of run_a (run_a's time set starts kT later).
    for (i, fb) in sb.snapshots.iter().enumerate() {
        let ta = run_b.times[i] + k as f64 * period;
        let Some(fa) = run_a.time_index(ta).and_then(|ia| sa.at(ia)) else {
            continue;
        };
        for j in 0..grid.n_nodes {
            let x = grid.x(j);
            let ja = j as i64 + m;
            if x.abs() > x_window || ja < 0 || ja >= grid.n_nodes as i64 {
                continue;
            }
            let ja = ja as usize;
            compared += 1;
            worst = worst.max((fb.u[j] - fa.u[ja]).abs()).max((fb.v[j] - fa.v[ja]).abs());
        }
    }
    if compared == 0 {
        return Err(Error::Consistency("translation runs share no nodes".into()));
    }
    Ok(TranslationReport {
        k: k as i64,
        x0,
        max_diff: worst,
        compared,
        pass: worst <= TRANSLATION_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub omega2s: Vec<f64>,
    /// Window sup distance per run.
    pub gaps: Vec<f64>,
    pub monotone: bool,
    pub final_gap: f64,
    pub pass: bool,
}

/// Window over the last period up to `t = 0` and `x ∈ [x_lo, x_hi]`.
fn window_sup(run: &EntireRun, x_lo: f64, x_hi: f64, target: &dyn Fn(f64, f64) -> (f64, f64)) -> f64 {
    let proxy = run.proxy();
    let mut worst = 0.0f64;
    let xs = run.grid.xs();
    for (k, f) in proxy.snapshots.iter().enumerate() {
        let t = run.times[proxy.first + k];
        if t < -run.period - 1e-9 {
            continue;
        }
        if t > 1e-9 {
            break;
        }
        for (j, &x) in xs.iter().enumerate() {
            if x < x_lo || x > x_hi {
                continue;
            }
            let (p, q) = target(t, x);
            worst = worst.max((f.u[j] - p).abs()).max((f.v[j] - q).abs());
        }
    }
    worst
}

/// Fixed `ω1`, decreasing `ω2`: the window distance to `Φ(t, x - ct + ω1)`
/// should not increase and should end below 0.05.
pub fn convergence_in_omega(
    system: &System,
    front: &FrontProfile,
    omega1: f64,
    omega2s: &[f64],
    opts: &EntireOptions,
    window: (f64, f64),
) -> Result<ConvergenceReport> {
    let c = front.c;
    let mut gaps = Vec::new();
    for &w2 in omega2s {
        let run = build_entire(system, front, (omega1, w2), None, opts)?;
        gaps.push(window_sup(&run, window.0, window.1, &|t, x| {
            front.eval(t, x - c * t + omega1)
        }));
    }
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    let final_gap = *gaps.last().unwrap_or(&f64::NAN);
    Ok(ConvergenceReport {
        omega2s: omega2s.to_vec(),
        gaps,
        monotone,
        final_gap,
        pass: monotone && final_gap <= LIMIT_TOL,
    })
}

/// Both parameters to `-∞`: the window sup of `W*` itself should decrease.
pub fn decay_in_omega(
    system: &System,
    front: &FrontProfile,
    omegas: &[f64],
    opts: &EntireOptions,
    window: (f64, f64),
) -> Result<ConvergenceReport> {
    let mut gaps = Vec::new();
    for &w in omegas {
        let run = build_entire(system, front, (w, w), None, opts)?;
        gaps.push(window_sup(&run, window.0, window.1, &|_, _| (0.0, 0.0)));
    }
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    let final_gap = *gaps.last().unwrap_or(&f64::NAN);
    Ok(ConvergenceReport {
        omega2s: omegas.to_vec(),
        gaps,
        monotone,
        final_gap,
        pass: monotone,
    })
}

/// For `c > 0` returns the reflected system, whose front `1 - Φ(t, -z)` has
/// speed `-c < 0`; otherwise the system unchanged and `false`.
pub fn reflect_for_positive_c(system: &System, c: f64) -> (System, bool) {
    if c > 0.0 {
        (system.reflect(), true)
    } else {
        (system.clone(), false)
    }
}

/// `(u, v)(x) ↦ (1 - u, 1 - v)(-x)`; the inverse of the reflection on fields.
pub fn reflect_field(field: &Field) -> Field {
    let flip = |w: &[f64]| w.iter().rev().map(|a| 1.0 - a).collect();
    Field {
        u: flip(&field.u),
        v: flip(&field.v),
        t: field.t,
    }
}
