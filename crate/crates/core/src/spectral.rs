//! Decay exponents, periodic eigenfunctions, degenerate-case amplitudes,
//! perturbed exponents and the boundary eigenpairs of the linearizations at
//! `(0,0)` and `(1,1)`.
//!
//! Every periodic function here solves a scalar linear periodic ODE
//! `w' = α(t) w + F(t)`. With `F = 0` and `mean α = 0` the solution is
//! `exp(∫α)`; otherwise the periodic solution is the variation-of-constants
//! expression, which exists when `mean α < 0`.

use crate::error::{Error, Result};
use crate::kinetics::{Rates, ReactionPack};
use crate::periodic::{cumulative_integral, Sampled};

/// `|ν_a - ν_b| ≤ CLASSIFY_TOL · max(|ν_a|, |ν_b|)` counts as equality.
pub const CLASSIFY_TOL: f64 = 0.02;
/// Wave speeds below this magnitude are treated as standing waves.
pub const ZERO_SPEED_TOL: f64 = 1e-6;

/// Which line of the decay case table applies on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Regime {
    /// Plus side `ν1 < ν2`, minus side `ν4 > ν3`: both components share one rate.
    Regular,
    /// Equal exponents: the secondary component picks up a `|z|` factor.
    Degenerate,
    /// Plus side `ν1 > ν2`, minus side `ν4 < ν3`: each component keeps its own rate.
    Reversed,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Regular => "regular",
            Regime::Degenerate => "degenerate",
            Regime::Reversed => "reversed",
        }
    }
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= CLASSIFY_TOL * a.abs().max(b.abs())
}

/// Case for the `z → +∞` tail.
pub fn classify_plus(nus: &[f64; 4]) -> Regime {
    if nearly_equal(nus[0], nus[1]) {
        Regime::Degenerate
    } else if nus[0] < nus[1] {
        Regime::Regular
    } else {
        Regime::Reversed
    }
}

/// Case for the `z → -∞` tail.
pub fn classify_minus(nus: &[f64; 4]) -> Regime {
    if nearly_equal(nus[2], nus[3]) {
        Regime::Degenerate
    } else if nus[3] > nus[2] {
        Regime::Regular
    } else {
        Regime::Reversed
    }
}

/// `(mean a1p, mean(a2p - b2q), mean(b1q - a1p), mean b2q)`.
pub fn compute_kappas(pack: &ReactionPack) -> Result<[f64; 4]> {
    let k = [
        pack.average(|r| r.a1p),
        pack.average(|r| r.a2p - r.b2q),
        pack.average(|r| r.b1q - r.a1p),
        pack.average(|r| r.b2q),
    ];
    if k[1] <= 0.0 || k[2] <= 0.0 {
        return Err(Error::Assumption(format!(
            "kappa2 = {} and kappa3 = {} must be positive",
            k[1], k[2]
        )));
    }
    Ok(k)
}

/// Roots of `ν² + cν - κ1`, `dν² + cν - κ2` (negative) and `ν² + cν - κ3`,
/// `dν² + cν - κ4` (positive).
pub fn compute_nus(kappas: &[f64; 4], c: f64, d: f64) -> Result<[f64; 4]> {
    if c.abs() <= ZERO_SPEED_TOL {
        return Err(Error::ZeroSpeed {
            speed: c.abs(),
            threshold: ZERO_SPEED_TOL,
        });
    }
    if kappas.iter().any(|&k| k <= 0.0) {
        return Err(Error::Precondition("all kappas must be positive".into()));
    }
    Ok([
        negative_root(1.0, c, kappas[0]),
        negative_root(d, c, kappas[1]),
        positive_root(1.0, c, kappas[2]),
        positive_root(d, c, kappas[3]),
    ])
}

pub fn negative_root(d: f64, c: f64, k: f64) -> f64 {
    (-c - (c * c + 4.0 * d * k).sqrt()) / (2.0 * d)
}

pub fn positive_root(d: f64, c: f64, k: f64) -> f64 {
    (-c + (c * c + 4.0 * d * k).sqrt()) / (2.0 * d)
}

/// Residuals of the four characteristic quadratics.
pub fn quadratic_residuals(kappas: &[f64; 4], nus: &[f64; 4], c: f64, d: f64) -> [f64; 4] {
    let q = |a: f64, nu: f64, k: f64| a * nu * nu + c * nu - k;
    [
        q(1.0, nus[0], kappas[0]),
        q(d, nus[1], kappas[1]),
        q(1.0, nus[2], kappas[2]),
        q(d, nus[3], kappas[3]),
    ]
}

/// Periodic solution of `w' = α w` with `w(0) = 1`; `α` must have zero mean.
pub fn exp_periodic(alpha: &Sampled) -> Result<Sampled> {
    let defect = (alpha.mean() * alpha.period()).exp() - 1.0;
    if defect.abs() > 1e-6 {
        return Err(Error::Consistency(format!("periodicity defect {defect:e}")));
    }
    let trig = alpha.trig();
    Ok(Sampled::new(
        alpha.period(),
        alpha
            .tgrid()
            .iter()
            .map(|&t| trig.oscillating_integral(t).exp())
            .collect(),
    ))
}

/// Periodic solution of `w' = α w + F`; requires `mean α < 0`.
pub fn forced_periodic(alpha: &Sampled, forcing: &Sampled) -> Result<Sampled> {
    let period = alpha.period();
    let abar = alpha.mean();
    if abar >= 0.0 {
        return Err(Error::Regime(format!(
            "mean growth {abar} is not negative; 1 - exp(∫α) would not be positive"
        )));
    }
    let trig = alpha.trig();
    let big_a = |t: f64| abar * t + trig.oscillating_integral(t);
    let mut grid = alpha.tgrid();
    grid.push(period);
    let j = cumulative_integral(|s| (-big_a(s)).exp() * forcing.eval(s), &grid);
    let a_t = big_a(period);
    let w0 = a_t.exp() * j[grid.len() - 1] / (1.0 - a_t.exp());
    let values = grid[..grid.len() - 1]
        .iter()
        .zip(&j)
        .map(|(&t, &jt)| big_a(t).exp() * (w0 + jt))
        .collect();
    Ok(Sampled::new(period, values))
}

/// `max_j |w'(t_j) - α w - F|` using spectral derivatives.
pub fn linear_residual(w: &Sampled, alpha: &Sampled, forcing: Option<&Sampled>) -> f64 {
    let dw = w.deriv_samples();
    (0..w.len())
        .map(|j| {
            let f = forcing.map_or(0.0, |s| s.values[j]);
            (dw[j] - alpha.values[j] * w.values[j] - f).abs()
        })
        .fold(0.0, f64::max)
}

/// Max periodic mismatch `|w(T) - w(0)|` via the interpolant.
pub fn periodicity_defect(w: &Sampled) -> f64 {
    (w.eval(w.period()) - w.values[0]).abs()
}

/// `φ1, φ2, ψ1, ψ2` with their growth coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunctions {
    pub phi1: Sampled,
    pub phi2: Sampled,
    pub psi1: Sampled,
    pub psi2: Sampled,
    /// `α` in `w' = α w` for each of the four, in the same order.
    pub alphas: [Sampled; 4],
}

pub fn eigenfunctions(pack: &ReactionPack, kappas: &[f64; 4]) -> Result<Eigenfunctions> {
    let k = *kappas;
    let alphas = [
        pack.sampled(|r| r.g_u(0.0, 0.0) + k[0]),
        pack.sampled(|r| r.h_v(0.0, 0.0) + k[1]),
        pack.sampled(|r| r.f_u(0.0, 0.0) + k[2]),
        pack.sampled(|r| k[3] - r.b2q),
    ];
    Ok(Eigenfunctions {
        phi1: exp_periodic(&alphas[0])?,
        phi2: exp_periodic(&alphas[1])?,
        psi1: exp_periodic(&alphas[2])?,
        psi2: exp_periodic(&alphas[3])?,
        alphas,
    })
}

/// A forced periodic eigenfunction together with the data of its ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedSolution {
    pub w: Sampled,
    pub alpha: Sampled,
    pub forcing: Sampled,
    /// `υ`, the constant part of the growth coefficient.
    pub upsilon: f64,
}

impl ForcedSolution {
    pub fn residual(&self) -> f64 {
        linear_residual(&self.w, &self.alpha, Some(&self.forcing))
    }
}

/// `φ̃1` (plus side, needs `ν1 < ν2`) and `ψ̃2` (minus side, needs `ν4 > ν3`).
#[derive(Debug, Clone, PartialEq)]
pub struct TildeEigenfunctions {
    pub tilde_phi1: std::result::Result<ForcedSolution, String>,
    pub tilde_psi2: std::result::Result<ForcedSolution, String>,
}

pub fn tilde_eigenfunctions(
    pack: &ReactionPack,
    eig: &Eigenfunctions,
    nus: &[f64; 4],
    c: f64,
    d: f64,
) -> TildeEigenfunctions {
    let tilde_phi1 = if nus[0] < nus[1] {
        let upsilon = nus[1] * nus[1] + c * nus[1];
        let alpha = pack.sampled(|r| upsilon - r.a1p);
        let b1q = pack.sampled(|r| r.b1q);
        let forcing = product(&b1q, &eig.phi2);
        forced_periodic(&alpha, &forcing)
            .map(|w| ForcedSolution {
                w,
                alpha,
                forcing,
                upsilon,
            })
            .map_err(|e| e.to_string())
    } else {
        Err(format!("nu1 = {} is not below nu2 = {}", nus[0], nus[1]))
    };
    let tilde_psi2 = if nus[3] > nus[2] {
        // The second component diffuses with rate d, hence the factor d.
        let upsilon = d * nus[2] * nus[2] + c * nus[2];
        let alpha = pack.sampled(|r| upsilon - r.b2q);
        let a2p = pack.sampled(|r| r.a2p);
        let forcing = product(&a2p, &eig.psi1);
        forced_periodic(&alpha, &forcing)
            .map(|w| ForcedSolution {
                w,
                alpha,
                forcing,
                upsilon,
            })
            .map_err(|e| e.to_string())
    } else {
        Err(format!("nu4 = {} is not above nu3 = {}", nus[3], nus[2]))
    };
    TildeEigenfunctions { tilde_phi1, tilde_psi2 }
}

pub fn product(a: &Sampled, b: &Sampled) -> Sampled {
    Sampled::new(a.period(), a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect())
}

/// Amplitude of `|z| e^{ν1 z} φ1` when `ν1 = ν2`, from the fitted `k1`.
pub fn theta1(k1: f64, nus: &[f64; 4], c: f64, pack: &ReactionPack, eig: &Eigenfunctions) -> Result<f64> {
    let denom = 2.0 * nus[0] + c;
    if denom == 0.0 {
        return Err(Error::Precondition("2 nu1 + c vanishes".into()));
    }
    let rho = ratio_mean(pack, |r| r.b1q, &eig.phi2, &eig.phi1);
    Ok(-k1 * rho / denom)
}

/// Amplitude of `|z| e^{ν4 z} ψ2` when `ν3 = ν4`, from the fitted `k3`.
pub fn theta2(k3: f64, nus: &[f64; 4], c: f64, d: f64, pack: &ReactionPack, eig: &Eigenfunctions) -> Result<f64> {
    let denom = 2.0 * d * nus[3] + c;
    if denom == 0.0 {
        return Err(Error::Precondition("2 d nu4 + c vanishes".into()));
    }
    let rho = ratio_mean(pack, |r| r.a2p, &eig.psi1, &eig.psi2);
    Ok(k3 * rho / denom)
}

fn ratio_mean<F: Fn(&Rates) -> f64>(pack: &ReactionPack, coef: F, num: &Sampled, den: &Sampled) -> f64 {
    let rates = pack.node_rates();
    let vals: Vec<f64> = (0..rates.len())
        .map(|j| coef(&rates[j]) * num.values[j] / den.values[j])
        .collect();
    crate::periodic::periodic_mean(&vals)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PerturbedExponents {
    pub epsilon: f64,
    pub nu2_eps_plus: f64,
    pub nu2_eps_minus: f64,
    pub nu3_eps_plus: f64,
    pub nu3_eps_minus: f64,
    pub c1_plus: f64,
    pub c1_minus: f64,
    pub c2_plus: f64,
    pub c2_minus: f64,
}

/// Upper end of the admissible `ε` interval.
pub fn epsilon_bound(pack: &ReactionPack, kappas: &[f64; 4]) -> f64 {
    let c1p = pack.sampled(|r| r.a2p).max();
    let c2p = pack.sampled(|r| r.b1q).max();
    1f64.min(kappas[1] / c1p).min(kappas[2] / c2p)
}

pub fn perturbed_exponents(
    pack: &ReactionPack,
    kappas: &[f64; 4],
    c: f64,
    d: f64,
    eps: f64,
) -> Result<PerturbedExponents> {
    let bound = epsilon_bound(pack, kappas);
    if !(eps > 0.0 && eps < bound) {
        return Err(Error::Precondition(format!("epsilon {eps} outside (0, {bound})")));
    }
    let c1_plus = pack.sampled(|r| r.a2p).max();
    let c1_minus = pack.sampled(|r| r.b2q).max();
    let c2_plus = pack.sampled(|r| r.b1q).max();
    let c2_minus = pack.sampled(|r| r.a1p).max();
    Ok(PerturbedExponents {
        epsilon: eps,
        nu2_eps_plus: negative_root(d, c, kappas[1] - c1_plus * eps),
        nu2_eps_minus: negative_root(d, c, kappas[1] + c1_minus * eps),
        nu3_eps_plus: positive_root(1.0, c, kappas[2] - c2_plus * eps),
        nu3_eps_minus: positive_root(1.0, c, kappas[2] + c2_minus * eps),
        c1_plus,
        c1_minus,
        c2_plus,
        c2_minus,
    })
}

/// Principal periodic eigenpairs of the linearizations at `(0,0)` and `(1,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEigenpairs {
    pub lambda0: f64,
    pub lambda1: f64,
    pub phi0: Sampled,
    pub psi0: ForcedSolution,
    pub psi1b: Sampled,
    pub phi1b: ForcedSolution,
    /// Growth coefficients of `φ0` and `ψ1ᵇ`.
    pub alpha_phi0: Sampled,
    pub alpha_psi1b: Sampled,
}

pub fn boundary_eigenpairs(pack: &ReactionPack) -> Result<BoundaryEigenpairs> {
    let lambda0 = -pack.average(|r| r.f_u(0.0, 0.0));
    let lambda1 = -pack.average(|r| r.l_v(1.0, 1.0));
    if lambda0 <= 0.0 || lambda1 <= 0.0 {
        return Err(Error::Assumption(format!(
            "lambda0 = {lambda0}, lambda1 = {lambda1} must be positive"
        )));
    }
    let alpha_phi0 = pack.sampled(|r| r.f_u(0.0, 0.0) + lambda0);
    let phi0 = exp_periodic(&alpha_phi0)?;
    let alpha = pack.sampled(|r| r.l_v(0.0, 0.0) + lambda0);
    let forcing = product(&pack.sampled(|r| r.l_u(0.0, 0.0)), &phi0);
    let psi0 = forced_periodic(&alpha, &forcing)
        .map_err(|_| Error::Regime("psi0 needs mean(l_v(t,0,0)) + lambda0 < 0".into()))?;
    let psi0 = ForcedSolution {
        w: psi0,
        alpha,
        forcing,
        upsilon: lambda0,
    };

    let alpha_psi1b = pack.sampled(|r| r.l_v(1.0, 1.0) + lambda1);
    let psi1b = exp_periodic(&alpha_psi1b)?;
    let alpha = pack.sampled(|r| r.f_u(1.0, 1.0) + lambda1);
    let forcing = product(&pack.sampled(|r| r.f_v(1.0, 1.0)), &psi1b);
    let phi1b = forced_periodic(&alpha, &forcing)
        .map_err(|_| Error::Regime("phi1b needs mean(f_u(t,1,1)) + lambda1 < 0".into()))?;
    let phi1b = ForcedSolution {
        w: phi1b,
        alpha,
        forcing,
        upsilon: lambda1,
    };
    for (name, s) in [
        ("phi0", &phi0),
        ("psi0", &psi0.w),
        ("psi1b", &psi1b),
        ("phi1b", &phi1b.w),
    ] {
        if s.min() <= 0.0 {
            return Err(Error::Consistency(format!("{name} is not positive")));
        }
    }
    Ok(BoundaryEigenpairs {
        lambda0,
        lambda1,
        phi0,
        psi0,
        psi1b,
        phi1b,
        alpha_phi0,
        alpha_psi1b,
    })
}

/// Everything the tail analysis needs at a given wave speed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPack {
    pub c: f64,
    pub d: f64,
    pub kappas: [f64; 4],
    pub nus: [f64; 4],
    pub eig: Eigenfunctions,
    pub tilde: TildeEigenfunctions,
    pub plus: Regime,
    pub minus: Regime,
}

impl SpectralPack {
    pub fn new(pack: &ReactionPack, c: f64) -> Result<Self> {
        let d = pack.coeffs.d;
        let kappas = compute_kappas(pack)?;
        let nus = compute_nus(&kappas, c, d)?;
        let eig = eigenfunctions(pack, &kappas)?;
        let tilde = tilde_eigenfunctions(pack, &eig, &nus, c, d);
        Ok(SpectralPack {
            c,
            d,
            kappas,
            nus,
            plus: classify_plus(&nus),
            minus: classify_minus(&nus),
            eig,
            tilde,
        })
    }

    pub fn tilde_phi1(&self) -> Option<&Sampled> {
        self.tilde.tilde_phi1.as_ref().ok().map(|s| &s.w)
    }

    pub fn tilde_psi2(&self) -> Option<&Sampled> {
        self.tilde.tilde_psi2.as_ref().ok().map(|s| &s.w)
    }
}
