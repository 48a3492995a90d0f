//! Periodic traveling fronts by long-time evolution from step data.
//!
//! The front is tracked in the lab frame. Once the per-period displacement
//! has settled, one more period is recorded and resampled into the
//! co-moving frame `z = x - c t`, with the phase fixed by `P(0, 0) = 1/2`.
//!
//! The speed used for the co-moving frame comes from the displacement of
//! integral position functionals such as `∫(1 - u)`. On a uniform grid
//! these sums are exponentially accurate for smooth translating profiles, so
//! they settle to round-off, while the linearly interpolated level set
//! wobbles at the `h²` scale. The level-set speed is still reported.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};
use crate::kinetics::ReactionPack;
use crate::pde::{BoundaryPolicy, Field, Grid1D, Stepper, System};

/// Values below this are left out of ratios.
pub const RATIO_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct FrontOptions {
    pub l: f64,
    pub h: f64,
    pub dt: f64,
    /// Periods evolved before convergence is tested.
    pub warmup_periods: usize,
    pub max_periods: usize,
    /// Convergence threshold for the per-period change of the displacements.
    pub tol_front: f64,
    /// Level-set positions used in the least-squares speed.
    pub speed_window: usize,
    /// Target number of stored snapshots per period; the stride divides
    /// `round(T/dt)`.
    pub store_samples: usize,
    /// Translate the lattice by whole cells between periods to keep the
    /// front near `x = 0`.
    pub recenter: bool,
}

impl Default for FrontOptions {
    fn default() -> Self {
        FrontOptions {
            l: 150.0,
            h: 0.05,
            dt: 1e-3,
            warmup_periods: 60,
            max_periods: 400,
            tol_front: 1e-9,
            speed_window: 10,
            store_samples: 200,
            recenter: true,
        }
    }
}

/// Speed diagnostics of a front run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SpeedEstimate {
    /// Speed from the integral functionals (used for the co-moving frame).
    pub c: f64,
    /// Least-squares slope of the last level-set positions.
    pub c_level_set: f64,
    pub per_period_displacements: Vec<f64>,
    pub drift_history: Vec<f64>,
    pub drift: f64,
    pub converged: bool,
    pub periods: usize,
}

/// Co-moving samples of a periodic front.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontProfile {
    pub period: f64,
    pub d: f64,
    pub c: f64,
    pub h: f64,
    /// `z_j = (j - (n-1)/2) h`.
    pub n_z: usize,
    /// Stored phases `t_i = i T / m_t`.
    pub m_t: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub pz: Vec<f64>,
    pub qz: Vec<f64>,
    /// Lab position of `P = 1/2` at the start of the recorded period.
    pub phase: f64,
    pub speed: SpeedEstimate,
}

/// Four-point Lagrange interpolation of uniform samples starting at `x0`.
pub fn cubic_interp(values: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let n = values.len();
    let s = (x - x0) / h;
    let j = (s.floor() as isize).clamp(1, n as isize - 3) as usize;
    let t = s - j as f64;
    let (a, b, c, d) = (values[j - 1], values[j], values[j + 1], values[j + 2]);
    let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    w0 * a + w1 * b + w2 * c + w3 * d
}

/// Fourth-order first derivative, one-sided near the ends.
pub fn derivative4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for j in 2..n - 2 {
        out[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h);
    }
    let fwd0 =
        |g: &dyn Fn(usize) -> f64| (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / (12.0 * h);
    let fwd1 = |g: &dyn Fn(usize) -> f64| (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)) / (12.0 * h);
    out[0] = fwd0(&|k| f[k]);
    out[1] = fwd1(&|k| f[k]);
    out[n - 1] = -fwd0(&|k| f[n - 1 - k]);
    out[n - 2] = -fwd1(&|k| f[n - 1 - k]);
    out
}

/// Fourth-order central second derivative at interior node `j` (`2 ≤ j < n-2`).
pub fn second_derivative4(f: &[f64], j: usize, h: f64) -> f64 {
    (-f[j - 2] + 16.0 * f[j - 1] - 30.0 * f[j] + 16.0 * f[j + 1] - f[j + 2]) / (12.0 * h * h)
}

fn level_set(grid: &Grid1D, u: &[f64]) -> Option<f64> {
    (0..u.len() - 1).find(|&j| u[j] < 0.5 && u[j + 1] >= 0.5).map(|j| {
        let th = (0.5 - u[j]) / (u[j + 1] - u[j]);
        grid.x(j) + th * grid.h
    })
}

/// Positions from `∫(1 - F(w))` for `F(w) = u, v, u², v²`.
fn integral_positions(grid: &Grid1D, field: &Field) -> [f64; 4] {
    let trap = |g: &dyn Fn(usize) -> f64| {
        let n = field.u.len();
        grid.h * ((1..n - 1).map(g).sum::<f64>() + 0.5 * (g(0) + g(n - 1))) - grid.l
    };
    let (u, v) = (&field.u, &field.v);
    [
        trap(&|j| 1.0 - u[j]),
        trap(&|j| 1.0 - v[j]),
        trap(&|j| 1.0 - u[j] * u[j]),
        trap(&|j| 1.0 - v[j] * v[j]),
    ]
}

/// Shifts the lattice left by `m` cells (right if negative), filling with the
/// boundary equilibria.
fn translate(field: &mut Field, m: isize) {
    let n = field.u.len() as isize;
    for arr in [&mut field.u, &mut field.v] {
        let old = arr.clone();
        for j in 0..n {
            let src = j + m;
            arr[j as usize] = if src < 0 {
                0.0
            } else if src >= n {
                1.0
            } else {
                old[src as usize]
            };
        }
    }
}

fn least_squares_slope(ts: &[f64], xs: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let (mt, mx) = (ts.iter().sum::<f64>() / n, xs.iter().sum::<f64>() / n);
    let num: f64 = ts.iter().zip(xs).map(|(t, x)| (t - mt) * (x - mx)).sum();
    let den: f64 = ts.iter().map(|t| (t - mt) * (t - mt)).sum();
    num / den
}

/// Largest divisor `s` of `m` with `m / s ≥ target`.
fn store_stride(m: usize, target: usize) -> usize {
    (1..=m)
        .rev()
        .find(|s| m.is_multiple_of(*s) && m / s >= target.max(1))
        .unwrap_or(1)
}

pub fn compute_front(system: &System, opts: &FrontOptions) -> Result<FrontProfile> {
    let period = system.period();
    let grid = Grid1D::new(opts.l, opts.h, opts.dt)?;
    let bc = BoundaryPolicy::front_limits();
    let mut stepper = Stepper::new(system.clone(), grid, &bc)?;
    let mut field = Field::from_fn(&grid, 0.0, |x| {
        let w = 0.5 * (1.0 + (x / 4.0).tanh());
        (w, w)
    });
    let mut offset = 0.0;
    let mut ls_hist: Vec<(f64, f64)> = Vec::new();
    let mut prev_pos = integral_positions(&grid, &field);
    let mut prev_disp: Option<[f64; 4]> = None;
    let mut disp_hist = Vec::new();
    let mut drift_hist = Vec::new();
    let mut drift = f64::INFINITY;
    let mut periods = 0;
    let mut converged = false;
    while periods < opts.max_periods {
        periods += 1;
        stepper.evolve(&mut field, periods as f64 * period, &|_| bc, None)?;
        let pos = integral_positions(&grid, &field);
        let disp = [0, 1, 2, 3].map(|k| pos[k] - prev_pos[k]);
        if let Some(pd) = prev_disp {
            drift = (0..4).map(|k| (disp[k] - pd[k]).abs()).fold(0.0, f64::max);
            drift_hist.push(drift);
        }
        disp_hist.push(disp[0]);
        prev_disp = Some(disp);
        let ls =
            level_set(&grid, &field.u).ok_or_else(|| Error::Consistency("no P = 1/2 crossing on the grid".into()))?;
        ls_hist.push((field.t, ls + offset));
        prev_pos = pos;
        if opts.recenter {
            let m = (ls / grid.h).round() as isize;
            if m.unsigned_abs() as f64 * grid.h > 1.0 {
                translate(&mut field, m);
                offset += m as f64 * grid.h;
                prev_pos = integral_positions(&grid, &field);
            }
        }
        if periods >= opts.warmup_periods.max(opts.speed_window + 1) && drift <= opts.tol_front {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            periods,
            drift,
            history: drift_hist,
        });
    }
    let c = disp_hist[disp_hist.len() - 1] / period;
    let window = &ls_hist[ls_hist.len() - opts.speed_window..];
    let (ts, xs): (Vec<f64>, Vec<f64>) = window.iter().cloned().unzip();
    let c_level_set = least_squares_slope(&ts, &xs);
    let threshold = 1e-6 * 2.0 * opts.l / period;
    if c.abs() <= threshold {
        return Err(Error::ZeroSpeed {
            speed: c.abs(),
            threshold,
        });
    }
    let speed = SpeedEstimate {
        c,
        c_level_set,
        per_period_displacements: disp_hist,
        drift_history: drift_hist,
        drift,
        converged,
        periods,
    };
    record_period(&mut stepper, field, &grid, speed, opts)
}

fn record_period(
    stepper: &mut Stepper,
    mut field: Field,
    grid: &Grid1D,
    speed: SpeedEstimate,
    opts: &FrontOptions,
) -> Result<FrontProfile> {
    let period = stepper.system.period();
    let bc = BoundaryPolicy::front_limits();
    let m_steps = (period / grid.dt).round() as usize;
    let stride = store_stride(m_steps, opts.store_samples);
    let m_t = m_steps / stride;
    let t0 = field.t;
    let dt_rec = period / m_steps as f64;
    let rec_grid = grid.with_dt(dt_rec);
    let mut rec = Stepper::new(stepper.system.clone(), rec_grid, &bc)?;
    let mut snaps = vec![field.clone()];
    for i in 1..m_t {
        rec.evolve(&mut field, t0 + (i * stride) as f64 * dt_rec, &|_| bc, None)?;
        snaps.push(field.clone());
    }
    let c = speed.c;
    let x0 = -grid.l;
    // Phase: root of the cubic interpolant of the first snapshot.
    let first = &snaps[0].u;
    let guess = level_set(grid, first).ok_or_else(|| Error::Consistency("no level set".into()))?;
    let (mut lo, mut hi) = (guess - grid.h, guess + grid.h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cubic_interp(first, x0, grid.h, mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phase = 0.5 * (lo + hi);
    let reach = grid.l - phase.abs() - c.abs() * period - 2.0 * grid.h;
    let half = (reach / grid.h).floor() as usize;
    let n_z = 2 * half + 1;
    let zs: Vec<f64> = (0..n_z).map(|j| (j as f64 - half as f64) * grid.h).collect();
    let mut p = Vec::with_capacity(m_t * n_z);
    let mut q = Vec::with_capacity(m_t * n_z);
    let mut pz = Vec::with_capacity(m_t * n_z);
    let mut qz = Vec::with_capacity(m_t * n_z);
    for (i, snap) in snaps.iter().enumerate() {
        let shift = phase + c * (i * stride) as f64 * dt_rec;
        let row_p: Vec<f64> = zs
            .iter()
            .map(|z| cubic_interp(&snap.u, x0, grid.h, z + shift))
            .collect();
        let row_q: Vec<f64> = zs
            .iter()
            .map(|z| cubic_interp(&snap.v, x0, grid.h, z + shift))
            .collect();
        pz.extend(derivative4(&row_p, grid.h));
        qz.extend(derivative4(&row_q, grid.h));
        p.extend(row_p);
        q.extend(row_q);
    }
    Ok(FrontProfile {
        period,
        d: stepper.system.d(),
        c,
        h: grid.h,
        n_z,
        m_t,
        p,
        q,
        pz,
        qz,
        phase,
        speed,
    })
}

impl FrontProfile {
    pub fn z(&self, j: usize) -> f64 {
        (j as f64 - ((self.n_z - 1) / 2) as f64) * self.h
    }

    pub fn zs(&self) -> Vec<f64> {
        (0..self.n_z).map(|j| self.z(j)).collect()
    }

    pub fn z_max(&self) -> f64 {
        self.z(self.n_z - 1)
    }

    pub fn t(&self, i: usize) -> f64 {
        self.period * i as f64 / self.m_t as f64
    }

    pub fn row<'a>(&self, data: &'a [f64], i: usize) -> &'a [f64] {
        &data[i * self.n_z..(i + 1) * self.n_z]
    }

    pub fn at(&self, i: usize, j: usize) -> (f64, f64) {
        let k = i * self.n_z + j;
        (self.p[k], self.q[k])
    }

    pub fn deriv_at(&self, i: usize, j: usize) -> (f64, f64) {
        let k = i * self.n_z + j;
        (self.pz[k], self.qz[k])
    }

    /// Index of the node `z = 0`.
    pub fn center(&self) -> usize {
        (self.n_z - 1) / 2
    }

    fn interp_row(&self, data: &[f64], i: usize, z: f64, below: f64, above: f64) -> f64 {
        let zmax = self.z_max();
        if z <= -zmax {
            below
        } else if z >= zmax {
            above
        } else {
            cubic_interp(self.row(data, i), -zmax, self.h, z)
        }
    }

    /// `(Pz, Qz)` at stored phase `i`, cubic in `z`, zero outside the sampled range.
    pub fn deriv_row(&self, i: usize, z: f64) -> (f64, f64) {
        (
            self.interp_row(&self.pz, i, z, 0.0, 0.0),
            self.interp_row(&self.qz, i, z, 0.0, 0.0),
        )
    }

    /// `(P, Q)` at stored phase `i`, cubic in `z`, clamped to the limits outside.
    pub fn value_row(&self, i: usize, z: f64) -> (f64, f64) {
        (
            self.interp_row(&self.p, i, z, 0.0, 1.0),
            self.interp_row(&self.q, i, z, 0.0, 1.0),
        )
    }

    /// `Φ(t, z)`: cubic in `z`, linear between stored phases, periodic in `t`.
    /// Outside the sampled range the limits `(0,0)` and `(1,1)` are returned;
    /// [`FrontProfile::tail_magnitude`] bounds the error this makes.
    pub fn eval(&self, t: f64, z: f64) -> (f64, f64) {
        let s = (t / self.period).rem_euclid(1.0) * self.m_t as f64;
        let i = (s.floor() as usize).min(self.m_t - 1);
        let w = s - i as f64;
        let a = self.value_row(i, z);
        if w < 1e-12 {
            return a;
        }
        let b = self.value_row((i + 1) % self.m_t, z);
        (a.0 + w * (b.0 - a.0), a.1 + w * (b.1 - a.1))
    }

    /// Largest deviation from the limits at the ends of the sampled range.
    pub fn tail_magnitude(&self) -> f64 {
        let n = self.n_z;
        (0..self.m_t)
            .map(|i| {
                let (p0, q0) = self.at(i, 0);
                let (p1, q1) = self.at(i, n - 1);
                p0.abs().max(q0.abs()).max((1.0 - p1).abs()).max((1.0 - q1).abs())
            })
            .fold(0.0, f64::max)
    }

    /// The front of the reflected problem: `Φ̃(t, z) = 1 - Φ(t, -z)`, speed `-c`.
    pub fn reflected(&self) -> FrontProfile {
        let n = self.n_z;
        let flip = |data: &[f64], neg: bool| {
            let mut out = Vec::with_capacity(data.len());
            for i in 0..self.m_t {
                let row = self.row(data, i);
                out.extend((0..n).map(|j| if neg { 1.0 - row[n - 1 - j] } else { row[n - 1 - j] }));
            }
            out
        };
        let mut speed = self.speed.clone();
        speed.c = -speed.c;
        speed.c_level_set = -speed.c_level_set;
        FrontProfile {
            c: -self.c,
            p: flip(&self.p, true),
            q: flip(&self.q, true),
            pz: flip(&self.pz, false),
            qz: flip(&self.qz, false),
            phase: -self.phase,
            speed,
            ..self.clone()
        }
    }
}

/// Max over stored phases and interior nodes of the two co-moving residuals.
impl FrontProfile {
    /// Binary layout: `b"LVP1"`, `n_z: u64`, `m_t: u64`, then `T, d, c, h,
    /// phase`, the speed scalars `c, c_level_set, drift, converged, periods`
    /// and the `p, q, pz, qz` arrays, all little-endian `f64`. Displacement
    /// and drift histories are not stored.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(b"LVP1")?;
        w.write_all(&(self.n_z as u64).to_le_bytes())?;
        w.write_all(&(self.m_t as u64).to_le_bytes())?;
        let s = &self.speed;
        let head = [
            self.period,
            self.d,
            self.c,
            self.h,
            self.phase,
            s.c,
            s.c_level_set,
            s.drift,
            if s.converged { 1.0 } else { 0.0 },
            s.periods as f64,
        ];
        for x in head
            .iter()
            .chain(&self.p)
            .chain(&self.q)
            .chain(&self.pz)
            .chain(&self.qz)
        {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut r: R) -> io::Result<FrontProfile> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"LVP1" {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "not a front checkpoint"));
        }
        let mut b8 = [0u8; 8];
        let mut count = || -> io::Result<usize> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8) as usize)
        };
        let (n_z, m_t) = (count()?, count()?);
        let mut next = || -> io::Result<f64> {
            r.read_exact(&mut b8)?;
            Ok(f64::from_le_bytes(b8))
        };
        let mut head = [0.0; 10];
        for x in head.iter_mut() {
            *x = next()?;
        }
        let mut array = || (0..n_z * m_t).map(|_| next()).collect::<io::Result<Vec<_>>>();
        let (p, q, pz, qz) = (array()?, array()?, array()?, array()?);
        let speed = SpeedEstimate {
            c: head[5],
            c_level_set: head[6],
            per_period_displacements: Vec::new(),
            drift_history: Vec::new(),
            drift: head[7],
            converged: head[8] != 0.0,
            periods: head[9] as usize,
        };
        Ok(FrontProfile {
            period: head[0],
            d: head[1],
            c: head[2],
            h: head[3],
            n_z,
            m_t,
            p,
            q,
            pz,
            qz,
            phase: head[4],
            speed,
        })
    }
}

pub fn front_residual(front: &FrontProfile, pack: &ReactionPack) -> f64 {
    let (n, m) = (front.n_z, front.m_t);
    let dt = front.period / m as f64;
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let r = pack.rates(front.t(i));
        let (prev, next) = ((i + m - 1) % m, (i + 1) % m);
        let p = front.row(&front.p, i);
        let q = front.row(&front.q, i);
        let (pp, pn) = (front.row(&front.p, prev), front.row(&front.p, next));
        let (qp, qn) = (front.row(&front.q, prev), front.row(&front.q, next));
        let pz = front.row(&front.pz, i);
        let qz = front.row(&front.qz, i);
        for j in 2..n - 2 {
            let pt = (pn[j] - pp[j]) / (2.0 * dt);
            let qt = (qn[j] - qp[j]) / (2.0 * dt);
            let r1 = pt - second_derivative4(p, j, front.h) - front.c * pz[j] - r.f(p[j], q[j]);
            let r2 = qt - front.d * second_derivative4(q, j, front.h) - front.c * qz[j] - r.l(p[j], q[j]);
            worst = worst.max(r1.abs()).max(r2.abs());
        }
    }
    worst
}

/// Whether `Pz, Qz > 0` wherever `P ∈ [1e-6, 1 - 1e-6]`.
pub fn is_monotone(front: &FrontProfile) -> bool {
    (0..front.m_t).all(|i| {
        (0..front.n_z).all(|j| {
            let (p, _) = front.at(i, j);
            let (pz, qz) = front.deriv_at(i, j);
            !(1e-6..=1.0 - 1e-6).contains(&p) || (pz > 0.0 && qz > 0.0)
        })
    })
}

/// Largest time-oscillation ratio of the decaying tails.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HarnackReport {
    /// `1 - P`, `1 - Q` on `z ≥ 0`.
    pub plus: (f64, f64),
    /// `P`, `Q` on `z ≤ 0`.
    pub minus: (f64, f64),
}

impl HarnackReport {
    pub fn max(&self) -> f64 {
        self.plus.0.max(self.plus.1).max(self.minus.0).max(self.minus.1)
    }
}

pub fn harnack_ratio(front: &FrontProfile) -> HarnackReport {
    harnack_ratio_floored(front, RATIO_FLOOR)
}

/// As [`harnack_ratio`] with a caller-chosen floor. Far tails carry round-off
/// in `1 - P` and slowly decaying transients from the initial data, so a
/// floor near the fit window (`1e-8`) isolates the resolved profile.
pub fn harnack_ratio_floored(front: &FrontProfile, floor: f64) -> HarnackReport {
    let c = front.center();
    let ratio = |js: &mut dyn Iterator<Item = usize>, get: &dyn Fn(usize, usize) -> f64| {
        let mut worst: f64 = 1.0;
        for j in js {
            let vals: Vec<f64> = (0..front.m_t).map(|i| get(i, j)).collect();
            let (lo, hi) = vals
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
            if lo >= floor {
                worst = worst.max(hi / lo);
            }
        }
        worst
    };
    let n = front.n_z;
    HarnackReport {
        plus: (
            ratio(&mut (c..n), &|i, j| 1.0 - front.at(i, j).0),
            ratio(&mut (c..n), &|i, j| 1.0 - front.at(i, j).1),
        ),
        minus: (
            ratio(&mut (0..=c), &|i, j| front.at(i, j).0),
            ratio(&mut (0..=c), &|i, j| front.at(i, j).1),
        ),
    }
}

/// `(min_{z≤0} P/Q, min_{z≥0} (1-Q)/(1-P))` over all stored phases.
pub fn condition_ratios(front: &FrontProfile) -> (f64, f64) {
    let c = front.center();
    let (mut eta0, mut eta1) = (f64::INFINITY, f64::INFINITY);
    for i in 0..front.m_t {
        for j in 0..front.n_z {
            let (p, q) = front.at(i, j);
            if j <= c && p >= RATIO_FLOOR && q >= RATIO_FLOOR {
                eta0 = eta0.min(p / q);
            }
            let (up, uq) = (1.0 - p, 1.0 - q);
            if j >= c && up >= RATIO_FLOOR && uq >= RATIO_FLOOR {
                eta1 = eta1.min(uq / up);
            }
        }
    }
    (eta0, eta1)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::kinetics::{compute_orbits, CoefficientSet};

    pub(crate) fn synthetic(
        m_t: usize,
        half: usize,
        h: f64,
        c: f64,
        f: impl Fn(f64, f64) -> (f64, f64),
    ) -> FrontProfile {
        let n_z = 2 * half + 1;
        let mut p = Vec::new();
        let mut q = Vec::new();
        for i in 0..m_t {
            let t = i as f64 / m_t as f64;
            for j in 0..n_z {
                let (a, b) = f(t, (j as f64 - half as f64) * h);
                p.push(a);
                q.push(b);
            }
        }
        let mut pz = Vec::new();
        let mut qz = Vec::new();
        for i in 0..m_t {
            pz.extend(derivative4(&p[i * n_z..(i + 1) * n_z], h));
            qz.extend(derivative4(&q[i * n_z..(i + 1) * n_z], h));
        }
        FrontProfile {
            period: 1.0,
            d: 1.0,
            c,
            h,
            n_z,
            m_t,
            p,
            q,
            pz,
            qz,
            phase: 0.0,
            speed: SpeedEstimate {
                c,
                c_level_set: c,
                per_period_displacements: vec![],
                drift_history: vec![],
                drift: 0.0,
                converged: true,
                periods: 0,
            },
        }
    }

    #[test]
    fn interpolation_and_derivatives_are_fourth_order() {
        let h = 0.1;
        let f: Vec<f64> = (0..101).map(|j| (j as f64 * h).sin()).collect();
        for &x in &[0.37, 3.21, 9.55] {
            assert!((cubic_interp(&f, 0.0, h, x) - x.sin()).abs() < 1e-5);
        }
        let d = derivative4(&f, h);
        for (j, v) in d.iter().enumerate() {
            assert!((v - (j as f64 * h).cos()).abs() < 5e-5, "node {j}");
        }
        assert!((second_derivative4(&f, 50, h) + (5.0f64).sin()).abs() < 1e-5);
    }

    #[test]
    fn equilibrium_profile_has_zero_residual() {
        let c = CoefficientSet::ps_b();
        let pack = ReactionPack::new(&c, &compute_orbits(&c, 64).unwrap());
        let f = synthetic(8, 20, 0.1, -0.3, |_, _| (0.0, 0.0));
        assert_eq!(front_residual(&f, &pack), 0.0);
        let h = harnack_ratio(&f);
        assert_eq!(h.max(), 1.0);
    }

    #[test]
    fn corrupted_sample_raises_residual() {
        let c = CoefficientSet::ps_a();
        let pack = ReactionPack::new(&c, &compute_orbits(&c, 64).unwrap());
        let mut f = synthetic(8, 20, 0.1, -0.3, |_, _| (1.0, 1.0));
        assert_eq!(front_residual(&f, &pack), 0.0);
        f.p[3 * f.n_z + 20] += 1e-2;
        assert!(front_residual(&f, &pack) >= 1e-1);
    }

    #[test]
    fn condition_ratios_symmetric_data() {
        let f = synthetic(4, 30, 0.2, -0.3, |_, z| {
            let w = 0.5 * (1.0 + (z / 2.0).tanh());
            (w, w)
        });
        let (e0, e1) = condition_ratios(&f);
        assert!((e0 - 1.0).abs() < 1e-12 && (e1 - 1.0).abs() < 1e-12);
        let g = synthetic(4, 30, 0.2, -0.3, |_, z| {
            let w = 0.5 * (1.0 + (z / 2.0).tanh());
            (w, if z < -5.0 { 0.0 } else { w })
        });
        assert!(condition_ratios(&g).0.is_finite());
    }

    #[test]
    fn reflection_of_profile_is_involutive() {
        let f = synthetic(4, 30, 0.2, -0.3, |t, z| {
            (0.5 * (1.0 + (z / 2.0 + t).tanh()), 0.5 * (1.0 + (z / 3.0).tanh()))
        });
        let r = f.reflected();
        assert_eq!(r.c, 0.3);
        let (a, b) = (f.eval(0.25, 1.3), r.eval(0.25, -1.3));
        assert!((a.0 + b.0 - 1.0).abs() < 1e-12 && (a.1 + b.1 - 1.0).abs() < 1e-12);
        let rr = r.reflected();
        assert!(rr.p.iter().zip(&f.p).all(|(a, b)| (a - b).abs() < 1e-15));
        assert_eq!(rr.pz, f.pz);
    }

    #[test]
    fn checkpoint_round_trip() {
        let f = synthetic(4, 30, 0.2, -0.3, |t, z| {
            (0.5 * (1.0 + (z / 2.0 + t).tanh()), 0.5 * (1.0 + (z / 3.0).tanh()))
        });
        let mut buf = Vec::new();
        f.write_checkpoint(&mut buf).unwrap();
        let g = FrontProfile::read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(
            (g.p, g.q, g.pz, g.qz),
            (f.p.clone(), f.q.clone(), f.pz.clone(), f.qz.clone())
        );
        assert_eq!(
            (g.c, g.h, g.n_z, g.m_t, g.period, g.phase),
            (f.c, f.h, f.n_z, f.m_t, f.period, f.phase)
        );
        assert_eq!(g.speed.drift, f.speed.drift);
        assert!(FrontProfile::read_checkpoint(&b"LVF1"[..]).is_err());
    }

    #[test]
    fn eval_clamps_and_interpolates_in_time() {
        let f = synthetic(4, 30, 0.2, -0.3, |t, z| {
            (0.5 * (1.0 + (z / 2.0).tanh()) * (1.0 + 0.0 * t), t)
        });
        assert_eq!(f.eval(0.0, -100.0), (0.0, 0.0));
        assert_eq!(f.eval(0.0, 100.0), (1.0, 1.0));
        let (_, q) = f.eval(0.125, 0.0);
        assert!((q - 0.125).abs() < 1e-12);
        let (_, q) = f.eval(1.25, 0.0);
        assert!((q - 0.25).abs() < 1e-12);
    }

    #[test]
    fn store_stride_divides() {
        assert_eq!(store_stride(1000, 200), 5);
        assert_eq!(store_stride(4000, 200), 20);
        assert_eq!(store_stride(7, 200), 1);
    }
}
