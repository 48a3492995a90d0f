//! IMEX time stepping of the normalized system on `[-L, L]` and the
//! discrete comparison harness.
//!
//! One step is `w ← (I - dt D)⁻¹ (w + dt R(t + dt/2, w))` with `D` the
//! three-point Laplacian (diffusivities 1 and d) and `R` the reaction. The
//! explicit part is monotone when `dt ≤ 0.5/Λ`, and the implicit part is an
//! M-matrix solve, so ordered data stay ordered.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};
use crate::kinetics::{Rates, ReactionPack};

/// Order checks ignore this many length units next to each boundary.
pub const ORDER_MARGIN: f64 = 10.0;
pub const ORDER_TOL: f64 = 1e-12;
const BLOW_UP: f64 = 10.0;

/// Uniform grid on `[-L, L]` with a fixed time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub l: f64,
    pub h: f64,
    pub dt: f64,
    pub n_nodes: usize,
}

impl Grid1D {
    pub fn new(l: f64, h: f64, dt: f64) -> Result<Self> {
        if !(l > 0.0 && h > 0.0 && dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "grid needs L, h, dt > 0 (got {l}, {h}, {dt})"
            )));
        }
        let cells = 2.0 * l / h;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) || cells.round() < 4.0 {
            return Err(Error::InvalidInput(format!("2L/h = {cells} must be an integer >= 4")));
        }
        Ok(Grid1D {
            l,
            h,
            dt,
            n_nodes: cells.round() as usize + 1,
        })
    }

    /// Node coordinates, exactly antisymmetric about 0.
    pub fn x(&self, j: usize) -> f64 {
        (2.0 * j as f64 - (self.n_nodes - 1) as f64) * self.h / 2.0
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|j| self.x(j)).collect()
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Grid1D { dt, ..*self }
    }
}

/// `(u, v)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl Field {
    pub fn constant(n: usize, u: f64, v: f64, t: f64) -> Self {
        Field {
            u: vec![u; n],
            v: vec![v; n],
            t,
        }
    }

    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(grid: &Grid1D, t: f64, f: F) -> Self {
        let (u, v) = grid.xs().into_iter().map(f).unzip();
        Field { u, v, t }
    }

    /// Binary layout: `b"LVF1"`, `n: u64`, then `L, h, dt, t` and the `u`
    /// and `v` arrays, all little-endian `f64`.
    pub fn write_checkpoint<W: Write>(&self, grid: &Grid1D, mut w: W) -> io::Result<()> {
        w.write_all(b"LVF1")?;
        w.write_all(&(self.u.len() as u64).to_le_bytes())?;
        for x in [grid.l, grid.h, grid.dt, self.t].iter().chain(&self.u).chain(&self.v) {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut r: R) -> io::Result<(Grid1D, Field)> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"LVF1" {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "not a field checkpoint"));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut next = || -> io::Result<f64> {
            r.read_exact(&mut b8)?;
            Ok(f64::from_le_bytes(b8))
        };
        let (l, h, dt, t) = (next()?, next()?, next()?, next()?);
        let u = (0..n).map(|_| next()).collect::<io::Result<Vec<_>>>()?;
        let v = (0..n).map(|_| next()).collect::<io::Result<Vec<_>>>()?;
        let grid = Grid1D::new(l, h, dt).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        Ok((grid, Field { u, v, t }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPolicy {
    /// Fixed `(u, v)` at `x = -L` and `x = L`.
    Dirichlet {
        left: (f64, f64),
        right: (f64, f64),
    },
    NeumannZero,
}

impl BoundaryPolicy {
    /// `(0,0)` on the left and `(1,1)` on the right.
    pub fn front_limits() -> Self {
        BoundaryPolicy::Dirichlet {
            left: (0.0, 0.0),
            right: (1.0, 1.0),
        }
    }
}

/// The normalized system, or its image under `(u, v, x) ↦ (1-u, 1-v, -x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub pack: ReactionPack,
    pub reflected: bool,
}

impl System {
    pub fn new(pack: ReactionPack) -> Self {
        System { pack, reflected: false }
    }

    /// The reflected problem; reflecting twice gives back `self` exactly.
    pub fn reflect(&self) -> Self {
        System {
            pack: self.pack.clone(),
            reflected: !self.reflected,
        }
    }

    pub fn d(&self) -> f64 {
        self.pack.coeffs.d
    }

    pub fn period(&self) -> f64 {
        self.pack.period()
    }

    pub fn local(&self, t: f64) -> LocalReaction {
        LocalReaction {
            rates: self.pack.rates(t),
            reflected: self.reflected,
        }
    }
}

/// Reaction terms frozen at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalReaction {
    pub rates: Rates,
    pub reflected: bool,
}

impl LocalReaction {
    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> (f64, f64) {
        if self.reflected {
            (self.rates.g(u, v), self.rates.h(u, v))
        } else {
            (self.rates.f(u, v), self.rates.l(u, v))
        }
    }
}

/// Precomputed Thomas elimination of `I - dt·diff·D`.
#[derive(Debug, Clone)]
struct Tridiag {
    sub: Vec<f64>,
    cp: Vec<f64>,
    inv: Vec<f64>,
}

impl Tridiag {
    fn new(n: usize, r: f64, neumann: bool) -> Self {
        let mut sub = vec![-r; n];
        let mut diag = vec![1.0 + 2.0 * r; n];
        let mut sup = vec![-r; n];
        if neumann {
            sup[0] = -2.0 * r;
            sub[n - 1] = -2.0 * r;
        } else {
            diag[0] = 1.0;
            sup[0] = 0.0;
            diag[n - 1] = 1.0;
            sub[n - 1] = 0.0;
        }
        sub[0] = 0.0;
        let mut cp = vec![0.0; n];
        let mut inv = vec![0.0; n];
        for i in 0..n {
            let m = diag[i] - if i > 0 { sub[i] * cp[i - 1] } else { 0.0 };
            assert!(m > 0.0, "tridiagonal pivot vanished");
            inv[i] = 1.0 / m;
            cp[i] = sup[i] * inv[i];
        }
        Tridiag { sub, cp, inv }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        rhs[0] *= self.inv[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) * self.inv[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.cp[i] * rhs[i + 1];
        }
    }
}

/// Time stepper bound to one system, grid and boundary kind.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub system: System,
    pub grid: Grid1D,
    neumann: bool,
    solvers: (Tridiag, Tridiag),
    du: Vec<f64>,
    dv: Vec<f64>,
}

/// `0.5 / Λ` with `Λ` the sampled Lipschitz bound of the reaction.
pub fn dt_max(system: &System) -> f64 {
    0.5 / system.pack.lipschitz_bound()
}

impl Stepper {
    pub fn new(system: System, grid: Grid1D, boundary: &BoundaryPolicy) -> Result<Self> {
        let limit = dt_max(&system);
        if grid.dt > limit {
            return Err(Error::Precondition(format!(
                "dt = {} exceeds the monotonicity bound {limit}",
                grid.dt
            )));
        }
        let neumann = matches!(boundary, BoundaryPolicy::NeumannZero);
        let solvers = Self::factor(&system, &grid, grid.dt, neumann);
        let n = grid.n_nodes;
        Ok(Stepper {
            system,
            grid,
            neumann,
            solvers,
            du: vec![0.0; n],
            dv: vec![0.0; n],
        })
    }

    fn factor(system: &System, grid: &Grid1D, dt: f64, neumann: bool) -> (Tridiag, Tridiag) {
        let r = dt / (grid.h * grid.h);
        let n = grid.n_nodes;
        (Tridiag::new(n, r, neumann), Tridiag::new(n, r * system.d(), neumann))
    }

    /// One step of length `grid.dt`.
    pub fn step(&mut self, field: &mut Field, boundary: &BoundaryPolicy) -> Result<()> {
        self.step_with(field, boundary, None)
    }

    fn step_with(&mut self, field: &mut Field, boundary: &BoundaryPolicy, dt_override: Option<f64>) -> Result<()> {
        if matches!(boundary, BoundaryPolicy::NeumannZero) != self.neumann {
            return Err(Error::Precondition(
                "boundary kind differs from the factorized one".into(),
            ));
        }
        let dt = dt_override.unwrap_or(self.grid.dt);
        let fresh;
        let (su, sv) = if dt_override.is_some() {
            fresh = Self::factor(&self.system, &self.grid, dt, self.neumann);
            (&fresh.0, &fresh.1)
        } else {
            (&self.solvers.0, &self.solvers.1)
        };
        let n = self.grid.n_nodes;
        let inv_h2 = 1.0 / (self.grid.h * self.grid.h);
        let d = self.system.d();
        let react = self.system.local(field.t + 0.5 * dt);
        let (u, v) = (&field.u, &field.v);
        // Increment form: (I - dt D) δ = dt (D w + R(w)); exact on equilibria.
        for j in 1..n - 1 {
            let (f, l) = react.eval(u[j], v[j]);
            let lu = (u[j - 1] - 2.0 * u[j] + u[j + 1]) * inv_h2;
            let lv = (v[j - 1] - 2.0 * v[j] + v[j + 1]) * inv_h2;
            self.du[j] = dt * (lu + f);
            self.dv[j] = dt * (d * lv + l);
        }
        match *boundary {
            BoundaryPolicy::Dirichlet { left, right } => {
                self.du[0] = left.0 - u[0];
                self.dv[0] = left.1 - v[0];
                self.du[n - 1] = right.0 - u[n - 1];
                self.dv[n - 1] = right.1 - v[n - 1];
            }
            BoundaryPolicy::NeumannZero => {
                for (j, nb) in [(0, 1), (n - 1, n - 2)] {
                    let (f, l) = react.eval(u[j], v[j]);
                    self.du[j] = dt * (2.0 * (u[nb] - u[j]) * inv_h2 + f);
                    self.dv[j] = dt * (d * 2.0 * (v[nb] - v[j]) * inv_h2 + l);
                }
            }
        }
        su.solve(&mut self.du);
        sv.solve(&mut self.dv);
        let mut bad = false;
        for j in 0..n {
            field.u[j] += self.du[j];
            field.v[j] += self.dv[j];
            bad |= !(field.u[j].abs() <= BLOW_UP && field.v[j].abs() <= BLOW_UP);
        }
        field.t += dt;
        if bad {
            return Err(Error::BlowUp { t: field.t });
        }
        Ok(())
    }

    /// Steps to `t_end`, shortening the last step to land on it exactly.
    /// `boundary` is queried before every step with the step's start time;
    /// `observer` sees the field after every step.
    pub fn evolve(
        &mut self,
        field: &mut Field,
        t_end: f64,
        boundary: &dyn Fn(f64) -> BoundaryPolicy,
        mut observer: Option<&mut dyn FnMut(&Field)>,
    ) -> Result<()> {
        let t0 = field.t;
        if t_end < t0 {
            return Err(Error::Precondition(format!("t_end {t_end} precedes t {t0}")));
        }
        let dt = self.grid.dt;
        let steps = ((t_end - t0) / dt - 1e-9).ceil().max(0.0) as usize;
        for i in 0..steps {
            let target = if i + 1 == steps {
                t_end
            } else {
                t0 + (i + 1) as f64 * dt
            };
            let h = target - field.t;
            let over = if (h - dt).abs() <= 1e-12 * dt { None } else { Some(h) };
            self.step_with(field, &boundary(field.t), over)?;
            field.t = target;
            if let Some(obs) = observer.as_mut() {
                obs(field);
            }
        }
        Ok(())
    }
}

/// Outcome of evolving an ordered pair with identical discretization.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OrderReport {
    /// Minimum over time and the interior window of `upper - lower`, per component.
    pub min_gap: (f64, f64),
    pub passed: bool,
}

pub fn comparison_test(
    lower0: &Field,
    upper0: &Field,
    t_end: f64,
    system: &System,
    grid: &Grid1D,
    boundary: &BoundaryPolicy,
) -> Result<OrderReport> {
    let n = grid.n_nodes;
    let ordered = (0..n).all(|j| lower0.u[j] <= upper0.u[j] && lower0.v[j] <= upper0.v[j]);
    if !ordered {
        return Err(Error::Precondition("initial data are not ordered".into()));
    }
    let window: Vec<usize> = (0..n).filter(|&j| grid.x(j).abs() <= grid.l - ORDER_MARGIN).collect();
    let gap = |lo: &Field, up: &Field| {
        window.iter().fold((f64::INFINITY, f64::INFINITY), |(a, b), &j| {
            (a.min(up.u[j] - lo.u[j]), b.min(up.v[j] - lo.v[j]))
        })
    };
    let mut s_lo = Stepper::new(system.clone(), *grid, boundary)?;
    let mut s_up = Stepper::new(system.clone(), *grid, boundary)?;
    let (mut lo, mut up) = (lower0.clone(), upper0.clone());
    let mut worst = gap(&lo, &up);
    let bc = |_: f64| *boundary;
    let dt = grid.dt;
    while lo.t < t_end - 1e-12 {
        let next = (lo.t + dt).min(t_end);
        s_lo.evolve(&mut lo, next, &bc, None)?;
        s_up.evolve(&mut up, next, &bc, None)?;
        let g = gap(&lo, &up);
        worst = (worst.0.min(g.0), worst.1.min(g.1));
    }
    Ok(OrderReport {
        min_gap: worst,
        passed: worst.0 >= -ORDER_TOL && worst.1 >= -ORDER_TOL,
    })
}
