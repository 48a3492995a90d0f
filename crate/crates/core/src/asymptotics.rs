//! Tail asymptotics of computed fronts and the constants built from them.
//!
//! Rates are reported for the decaying quantity: `1 - P`, `1 - Q` as
//! `z → +∞` (negative rates) and `P`, `Q` as `z → -∞` (positive rates).

use crate::error::{Error, Result};
use crate::front::{compute_front, second_derivative4, FrontOptions, FrontProfile};
use crate::kinetics::ReactionPack;
use crate::pde::System;
use crate::spectral::{epsilon_bound, perturbed_exponents, theta2, PerturbedExponents, Regime, SpectralPack};
use serde::Serialize;

/// Fit window on the demodulated amplitude.
pub const WINDOW_LO: f64 = 1e-8;
pub const WINDOW_HI: f64 = 1e-3;
pub const MIN_WINDOW_NODES: usize = 20;
/// Decaying quantities below this are treated as unresolved when forming
/// grid extrema.
pub const TAIL_FLOOR: f64 = 1e-10;
pub const SAFETY_UP: f64 = 1.05;
pub const SAFETY_DOWN: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    PureExp,
    LinearTimesExp,
}

impl TailModel {
    pub fn label(self) -> &'static str {
        match self {
            TailModel::PureExp => "pure_exp",
            TailModel::LinearTimesExp => "linear_times_exp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub side: Side,
    pub component: Component,
    /// The model of the case table; rate and amplitude below belong to it.
    pub model: TailModel,
    /// The model with the smaller rms residual.
    pub preferred_model: TailModel,
    pub rate: f64,
    /// `k` for the pure model, `ϑ` for the `|z|` model.
    pub amplitude: f64,
    pub rms_residual: f64,
    /// `(rate, amplitude, rms)` of the other model.
    pub alternative: (f64, f64, f64),
    pub window: (f64, f64),
    pub nodes: usize,
    pub predicted_rate: f64,
    pub predicted_model: TailModel,
    pub predicted_eigenfunction: &'static str,
    /// Window average of `w_z / w`, with `1/z` removed under the `|z|` model.
    pub derivative_rate: f64,
}

/// Least-squares line `y = a + b x`; returns `(a, b, rms)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rms = (xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum::<f64>() / n).sqrt();
    (a, b, rms)
}

/// Both regressions of a t-averaged log profile `y(z)` over the nodes whose
/// amplitude lies in the fit window.
#[derive(Debug, Clone, PartialEq)]
pub struct LogFit {
    pub pure: (f64, f64, f64),
    pub linear: (f64, f64, f64),
    pub window: (f64, f64),
    pub indices: Vec<usize>,
}

/// `ys` is `mean_t log(w / eigenfunction)` at `zs`. The window is the
/// longest contiguous run of nodes with `e^y ∈ [1e-8, 1e-3]`.
pub fn fit_log_profile(zs: &[f64], ys: &[f64]) -> Result<LogFit> {
    let inside: Vec<bool> = ys
        .iter()
        .map(|y| (WINDOW_LO.ln()..=WINDOW_HI.ln()).contains(y))
        .collect();
    let (mut best, mut start) = ((0, 0), None);
    for j in 0..=inside.len() {
        let on = j < inside.len() && inside[j] && zs[j] != 0.0;
        match (on, start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                if j - s > best.1 - best.0 {
                    best = (s, j);
                }
                start = None;
            }
            _ => {}
        }
    }
    let indices: Vec<usize> = (best.0..best.1).collect();
    if indices.len() < MIN_WINDOW_NODES {
        return Err(Error::InsufficientTail(format!(
            "{} nodes with amplitude in [{WINDOW_LO:e}, {WINDOW_HI:e}], need {MIN_WINDOW_NODES}; increase L",
            indices.len()
        )));
    }
    let x: Vec<f64> = indices.iter().map(|&j| zs[j]).collect();
    let y: Vec<f64> = indices.iter().map(|&j| ys[j]).collect();
    let yl: Vec<f64> = x.iter().zip(&y).map(|(z, y)| y - z.abs().ln()).collect();
    Ok(LogFit {
        pure: line_fit(&x, &y),
        linear: line_fit(&x, &yl),
        window: (x[0].min(x[x.len() - 1]), x[0].max(x[x.len() - 1])),
        indices,
    })
}

/// The decaying quantity and its z-derivative at phase `i`, node `j`.
fn decaying(front: &FrontProfile, side: Side, comp: Component, i: usize, j: usize) -> (f64, f64) {
    let (p, q) = front.at(i, j);
    let (pz, qz) = front.deriv_at(i, j);
    let (w, wz) = match comp {
        Component::P => (p, pz),
        Component::Q => (q, qz),
    };
    match side {
        Side::Plus => (1.0 - w, -wz),
        Side::Minus => (w, wz),
    }
}

/// Predicted `(rate, model, eigenfunction label)` from the case tables.
pub fn predicted(spec: &SpectralPack, side: Side, comp: Component) -> (f64, TailModel, &'static str) {
    let nus = &spec.nus;
    match (side, comp) {
        (Side::Plus, Component::Q) => (nus[1], TailModel::PureExp, "phi2"),
        (Side::Plus, Component::P) => match spec.plus {
            Regime::Regular => (nus[1], TailModel::PureExp, "tilde_phi1"),
            Regime::Degenerate => (nus[0], TailModel::LinearTimesExp, "phi1"),
            Regime::Reversed => (nus[0], TailModel::PureExp, "phi1"),
        },
        (Side::Minus, Component::P) => (nus[2], TailModel::PureExp, "psi1"),
        (Side::Minus, Component::Q) => match spec.minus {
            Regime::Regular => (nus[2], TailModel::PureExp, "tilde_psi2"),
            Regime::Degenerate => (nus[3], TailModel::LinearTimesExp, "psi2"),
            Regime::Reversed => (nus[3], TailModel::PureExp, "psi2"),
        },
    }
}

fn eigenfunction<'a>(spec: &'a SpectralPack, label: &str) -> Result<&'a crate::periodic::Sampled> {
    let missing = |name: &str| Error::Precondition(format!("{name} unavailable in this regime"));
    Ok(match label {
        "phi1" => &spec.eig.phi1,
        "phi2" => &spec.eig.phi2,
        "psi1" => &spec.eig.psi1,
        "psi2" => &spec.eig.psi2,
        "tilde_phi1" => spec.tilde_phi1().ok_or_else(|| missing(label))?,
        "tilde_psi2" => spec.tilde_psi2().ok_or_else(|| missing(label))?,
        _ => return Err(missing(label)),
    })
}

/// `mean_t log(w / eigenfunction)` per node; `-∞` off the side or where
/// some phase is not positive.
fn demodulated_log(zs: &[f64], w: &[Vec<f64>], eig: &[f64], side: Side) -> Vec<f64> {
    let on_side = |z: f64| match side {
        Side::Plus => z > 0.0,
        Side::Minus => z < 0.0,
    };
    let m = w.len() as f64;
    let mut ys = vec![f64::NEG_INFINITY; zs.len()];
    for (j, &z) in zs.iter().enumerate() {
        if !on_side(z) || w.iter().any(|row| row[j] <= 0.0) {
            continue;
        }
        ys[j] = w.iter().zip(eig).map(|(row, e)| (row[j] / e).ln()).sum::<f64>() / m;
    }
    ys
}

fn tail_samples(front: &FrontProfile, side: Side, comp: Component) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    (0..front.m_t)
        .map(|i| (0..front.n_z).map(|j| decaying(front, side, comp, i, j)).unzip())
        .unzip()
}

/// `(z, mean_t log(w / eigenfunction))` on one side, for plotting against the fit.
pub fn demodulated_tail(
    front: &FrontProfile,
    spec: &SpectralPack,
    side: Side,
    comp: Component,
) -> Result<Vec<(f64, f64)>> {
    let eig = eigenfunction(spec, predicted(spec, side, comp).2)?;
    let zs = front.zs();
    let (w, _) = tail_samples(front, side, comp);
    let eig_vals: Vec<f64> = (0..front.m_t).map(|i| eig.eval(front.t(i))).collect();
    let ys = demodulated_log(&zs, &w, &eig_vals, side);
    Ok(zs.into_iter().zip(ys).filter(|(_, y)| y.is_finite()).collect())
}

/// Fits planted or computed tails given per-phase samples of the decaying
/// quantity `w[i][j]`, its derivative, and the eigenfunction at each phase.
pub fn fit_samples(
    zs: &[f64],
    w: &[Vec<f64>],
    wz: &[Vec<f64>],
    eig: &[f64],
    side: Side,
    model: TailModel,
) -> Result<(LogFit, f64)> {
    let m = w.len() as f64;
    let ys = demodulated_log(zs, w, eig, side);
    let fit = fit_log_profile(zs, &ys)?;
    let mut acc = 0.0;
    for &j in &fit.indices {
        let r = w.iter().zip(wz).map(|(a, b)| b[j] / a[j]).sum::<f64>() / m;
        acc += match model {
            TailModel::PureExp => r,
            TailModel::LinearTimesExp => r - 1.0 / zs[j],
        };
    }
    let deriv = acc / fit.indices.len() as f64;
    Ok((fit, deriv))
}

pub fn fit_tail(front: &FrontProfile, spec: &SpectralPack, side: Side, comp: Component) -> Result<DecayFit> {
    let (predicted_rate, predicted_model, label) = predicted(spec, side, comp);
    let eig = eigenfunction(spec, label)?;
    let zs = front.zs();
    let (w, wz) = tail_samples(front, side, comp);
    let eig_vals: Vec<f64> = (0..front.m_t).map(|i| eig.eval(front.t(i))).collect();
    let (fit, derivative_rate) = fit_samples(&zs, &w, &wz, &eig_vals, side, predicted_model)?;
    let (pure, linear) = (fit.pure, fit.linear);
    let (best, other) = match predicted_model {
        TailModel::PureExp => (pure, linear),
        TailModel::LinearTimesExp => (linear, pure),
    };
    let preferred_model = if pure.2 <= linear.2 {
        TailModel::PureExp
    } else {
        TailModel::LinearTimesExp
    };
    Ok(DecayFit {
        side,
        component: comp,
        model: predicted_model,
        preferred_model,
        rate: best.1,
        amplitude: best.0.exp(),
        rms_residual: best.2,
        alternative: (other.1, other.0.exp(), other.2),
        window: fit.window,
        nodes: fit.indices.len(),
        predicted_rate,
        predicted_model,
        predicted_eigenfunction: label,
        derivative_rate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayEntry {
    pub fit: DecayFit,
    pub case: Regime,
    pub rel_error: f64,
    pub derivative_rel_error: f64,
    /// Whether the smaller-residual model is the predicted one.
    pub model_matches: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub entries: Vec<DecayEntry>,
    pub tol_rel: f64,
    pub failures: Vec<String>,
}

impl DecayReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn get(&self, side: Side, comp: Component) -> Option<&DecayEntry> {
        self.entries
            .iter()
            .find(|e| e.fit.side == side && e.fit.component == comp)
    }
}

/// Derivative rates are compared with a fixed 2% tolerance.
pub const DERIVATIVE_TOL: f64 = 0.02;

pub fn verify_decay_theorems(front: &FrontProfile, spec: &SpectralPack, tol_rel: f64) -> Result<DecayReport> {
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for side in [Side::Plus, Side::Minus] {
        for comp in [Component::P, Component::Q] {
            let fit = fit_tail(front, spec, side, comp)?;
            let case = if side == Side::Plus { spec.plus } else { spec.minus };
            let rel_error = (fit.rate - fit.predicted_rate).abs() / fit.predicted_rate.abs();
            let derivative_rel_error = (fit.derivative_rate - fit.rate).abs() / fit.rate.abs();
            let model_matches = fit.preferred_model == fit.predicted_model;
            let pass = rel_error <= tol_rel && derivative_rel_error <= DERIVATIVE_TOL;
            if !pass {
                failures.push(format!(
                    "{side:?}/{comp:?}: fitted {:.6} vs predicted {:.6} ({}), rel {:.3e}, derivative rel {:.3e}",
                    fit.rate,
                    fit.predicted_rate,
                    fit.model.label(),
                    rel_error,
                    derivative_rel_error
                ));
            }
            entries.push(DecayEntry {
                fit,
                case,
                rel_error,
                derivative_rel_error,
                model_matches,
                pass,
            });
        }
    }
    Ok(DecayReport {
        entries,
        tol_rel,
        failures,
    })
}

/// Compares the fitted `|z|` amplitude of `Q` on the minus side with `ϑ2`
/// built from the fitted `k3`; returns `(fitted, predicted, relative error)`.
pub fn theta2_check(front: &FrontProfile, spec: &SpectralPack, pack: &ReactionPack) -> Result<(f64, f64, f64)> {
    let p = fit_tail(front, spec, Side::Minus, Component::P)?;
    let q = fit_tail(front, spec, Side::Minus, Component::Q)?;
    let fitted = match q.model {
        TailModel::LinearTimesExp => q.amplitude,
        TailModel::PureExp => q.alternative.1,
    };
    let predicted = theta2(p.amplitude, &spec.nus, spec.c, spec.d, pack, &spec.eig)?;
    Ok((fitted, predicted, (fitted - predicted).abs() / predicted.abs()))
}

/// One two-sided exponential bound realized on the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: &'static str,
    pub exponent: f64,
    pub constant: f64,
    pub lower: bool,
    pub nodes: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub perturbed: PerturbedExponents,
    /// `(ν1⁻, ν1⁺, ν4⁻, ν4⁺)`.
    pub chosen: [f64; 4],
    pub entries: Vec<BoundEntry>,
    pub c1: f64,
    pub c2: f64,
    pub pass: bool,
}

/// Exponents used in the a priori tail bounds: `ν1⁺` halfway between
/// `max{ν1, ν2,ε⁺}` and 0, `ν1⁻ = (1+ε) ν1`, `ν4⁻` half of
/// `min{ν4, ν3,ε⁺}`, `ν4⁺ = (1+ε) ν4`.
pub fn chosen_exponents(nus: &[f64; 4], pe: &PerturbedExponents) -> [f64; 4] {
    let eps = pe.epsilon;
    [
        (1.0 + eps) * nus[0],
        0.5 * nus[0].max(pe.nu2_eps_plus),
        0.5 * nus[3].min(pe.nu3_eps_plus),
        (1.0 + eps) * nus[3],
    ]
}

pub fn verify_apriori_bounds(
    front: &FrontProfile,
    spec: &SpectralPack,
    pack: &ReactionPack,
    eps: f64,
) -> Result<BoundReport> {
    let pe = perturbed_exponents(pack, &spec.kappas, spec.c, spec.d, eps)?;
    let chosen = chosen_exponents(&spec.nus, &pe);
    let [nu1m, nu1p, nu4m, nu4p] = chosen;
    let n = front.n_z;
    let center = front.center();
    let mut entries = Vec::new();
    let mut scan = |name, side: Side, comp, exponent: f64, lower: bool| {
        let mut k = if lower { f64::INFINITY } else { 0.0f64 };
        let mut nodes = 0;
        let js: Vec<usize> = match side {
            Side::Plus => (center..n).collect(),
            Side::Minus => (0..=center).collect(),
        };
        for i in 0..front.m_t {
            for &j in &js {
                let (w, _) = decaying(front, side, comp, i, j);
                if w < TAIL_FLOOR {
                    continue;
                }
                nodes += 1;
                let r = w * (-exponent * front.z(j)).exp();
                k = if lower { k.min(r) } else { k.max(r) };
            }
        }
        let holds = k.is_finite() && k > 0.0;
        entries.push(BoundEntry {
            name,
            exponent,
            constant: k,
            lower,
            nodes,
            holds,
        });
    };
    scan("K1", Side::Plus, Component::P, nu1m, true);
    scan("K1'", Side::Plus, Component::P, nu1p, false);
    scan("K2", Side::Plus, Component::Q, pe.nu2_eps_minus, true);
    scan("K2'", Side::Plus, Component::Q, pe.nu2_eps_plus, false);
    scan("K3", Side::Minus, Component::P, pe.nu3_eps_minus, true);
    scan("K3'", Side::Minus, Component::P, pe.nu3_eps_plus, false);
    scan("K4", Side::Minus, Component::Q, nu4p, true);
    scan("K4'", Side::Minus, Component::Q, nu4m, false);
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    for i in 0..front.m_t {
        let (p, q) = (front.row(&front.p, i), front.row(&front.q, i));
        let (pz, qz) = (front.row(&front.pz, i), front.row(&front.qz, i));
        for j in 2..n - 2 {
            let z = front.z(j);
            for (w, wz) in [(p, pz), (q, qz)] {
                let wzz = second_derivative4(w, j, front.h).abs();
                if j <= center && w[j] >= TAIL_FLOOR {
                    c1 = c1.max((w[j].abs() + wz[j].abs() + wzz) * (-nu4m * z).exp());
                }
                if j >= center && 1.0 - w[j] >= TAIL_FLOOR {
                    c2 = c2.max(((w[j] - 1.0).abs() + wz[j].abs() + wzz) * (-nu1p * z).exp());
                }
            }
        }
    }
    let pass = entries.iter().all(|e| e.holds) && c1.is_finite() && c2.is_finite() && c1 > 0.0 && c2 > 0.0;
    Ok(BoundReport {
        perturbed: pe,
        chosen,
        entries,
        c1,
        c2,
        pass,
    })
}

/// `ε` as a fraction of its admissible range.
pub fn epsilon_fraction(spec: &SpectralPack, pack: &ReactionPack, fraction: f64) -> f64 {
    fraction * epsilon_bound(pack, &spec.kappas)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontConstants {
    pub m: f64,
    pub n: f64,
    pub m1_upper: f64,
    pub m1_lower: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub eta0: f64,
    pub eta1: f64,
}

/// Extremal grid ratios over the two half-lines, with the 5% safety factors.
pub fn estimate_front_constants(front: &FrontProfile, nu3: f64) -> Result<FrontConstants> {
    if front.c >= 0.0 {
        return Err(Error::Domain(format!("front constants need c < 0, got {}", front.c)));
    }
    let center = front.center();
    let mut m: f64 = 0.0;
    let mut n: f64 = 0.0;
    let (mut m1u, mut m1l) = (0.0f64, f64::INFINITY);
    let (mut d1, mut d2) = (f64::INFINITY, 0.0f64);
    let (mut g1, mut g2) = (f64::INFINITY, 0.0f64);
    for i in 0..front.m_t {
        for j in 0..front.n_z {
            let z = front.z(j);
            let (p, q) = front.at(i, j);
            let (pz, qz) = front.deriv_at(i, j);
            if j <= center {
                if p >= TAIL_FLOOR {
                    m = m.max(q / p);
                    let e = p * (-nu3 * z).exp();
                    m1u = m1u.max(e);
                    m1l = m1l.min(e);
                    d1 = d1.min(pz / p);
                    d2 = d2.max(pz / p);
                }
                if q >= TAIL_FLOOR {
                    g1 = g1.min(qz / q);
                    g2 = g2.max(qz / q);
                }
            }
            if j >= center {
                let (up, uq) = (1.0 - p, 1.0 - q);
                if up >= TAIL_FLOOR {
                    n = n.max(uq / up);
                    d1 = d1.min(pz / up);
                }
                if uq >= TAIL_FLOOR {
                    g1 = g1.min(qz / uq);
                }
            }
        }
    }
    let check = |name: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::Estimation(format!(
                "{name} not realized as a positive finite ratio ({v})"
            )))
        }
    };
    for (name, v) in [
        ("M", m),
        ("N", n),
        ("M1", m1u),
        ("m1", m1l),
        ("delta1", d1),
        ("delta2", d2),
        ("gamma1", g1),
        ("gamma2", g2),
    ] {
        check(name, v)?;
    }
    let (eta0, eta1) = crate::front::condition_ratios(front);
    Ok(FrontConstants {
        m: m * SAFETY_UP,
        n: n * SAFETY_UP,
        m1_upper: m1u * SAFETY_UP,
        m1_lower: m1l * SAFETY_DOWN,
        delta1: d1 * SAFETY_DOWN,
        delta2: d2 * SAFETY_UP,
        gamma1: g1 * SAFETY_DOWN,
        gamma2: g2 * SAFETY_UP,
        eta0,
        eta1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KBounds {
    pub k1: f64,
    pub k2: f64,
    pub k: f64,
}

/// The closed-form maxima over phases, from samples of `P(t,0)`, `Q(t,0)`;
/// `c2_plus = max b1q`, `c1_minus = max b2q`.
pub fn k_bounds(fc: &FrontConstants, c2_plus: f64, c1_minus: f64, d: f64, p0: &[f64], q0: &[f64]) -> Result<KBounds> {
    if p0.iter().chain(q0).any(|&v| v >= 1.0) {
        return Err(Error::Consistency(
            "1 - P(t,0) or 1 - Q(t,0) is not positive; check phase normalization".into(),
        ));
    }
    let k1 = fc.m1_upper
        * p0.iter()
            .map(|&p| {
                let s = 1.0 - p;
                let a = 2.0 * fc.delta2 / s + 2.0 * c2_plus * fc.m / (s * fc.delta1);
                let b = 2.0 * fc.delta2 / s + c2_plus * (fc.m * fc.n + 1.0) / (s * fc.delta1);
                a.max(b)
            })
            .fold(f64::NEG_INFINITY, f64::max);
    let k2 = fc.m
        * fc.m1_upper
        * q0.iter()
            .map(|&q| 2.0 * d * fc.gamma2 / (1.0 - q) + c1_minus / fc.gamma1)
            .fold(f64::NEG_INFINITY, f64::max);
    Ok(KBounds { k1, k2, k: k1.max(k2) })
}

pub fn k_bounds_for(front: &FrontProfile, fc: &FrontConstants, pack: &ReactionPack) -> Result<KBounds> {
    let c = front.center();
    let (p0, q0): (Vec<f64>, Vec<f64>) = (0..front.m_t).map(|i| front.at(i, c)).unzip();
    let c2_plus = pack.sampled(|r| r.b1q).max();
    let c1_minus = pack.sampled(|r| r.b2q).max();
    k_bounds(fc, c2_plus, c1_minus, front.d, &p0, &q0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub j1: f64,
    pub j2: f64,
    pub max_ratio1: f64,
    pub bound1: f64,
    /// `(t, x)` of the largest `ratio / bound`.
    pub worst1: (f64, f64),
    pub max_ratio2: f64,
    pub bound2: f64,
    pub worst2: (f64, f64),
    pub excluded: usize,
    pub pass: bool,
}

pub const DENOM_FLOOR: f64 = 1e-300;

/// Scans `H/A` and `H̃/B` over stored phases and `x ∈ [-x_max, x_max]`
/// (grid spacing of the front).
pub fn verify_ratio_bounds(
    front: &FrontProfile,
    kb: &KBounds,
    pack: &ReactionPack,
    nu3: f64,
    j1: f64,
    j2: f64,
    x_max: f64,
) -> Result<RatioReport> {
    if !(j2 <= j1 && j1 <= 0.0) {
        return Err(Error::Precondition(format!(
            "shifts need j2 <= j1 <= 0, got ({j1}, {j2})"
        )));
    }
    let d = front.d;
    let bound1 = kb.k1 * (nu3 * j1).exp();
    let bound2 = kb.k2 * (nu3 * j1).exp();
    let nx = (x_max / front.h).round() as i64;
    let (mut r1, mut r2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut w1, mut w2) = ((0.0, 0.0), (0.0, 0.0));
    let mut excluded = 0;
    for i in 0..front.m_t {
        let t = front.t(i);
        let r = pack.rates(t);
        for k in -nx..=nx {
            let x = k as f64 * front.h;
            let (p1, q1) = front.value_row(i, x + j1);
            let (p2, q2) = front.value_row(i, -x + j2);
            let (p1z, q1z) = front.deriv_row(i, x + j1);
            let (p2z, q2z) = front.deriv_row(i, -x + j2);
            let h = 2.0 * p1z * p2z + r.b1q * (p1 * q2 * (1.0 - p2) * (1.0 - q1) + p2 * q1 * (1.0 - p1) * (1.0 - q2));
            let a = (1.0 - p2) * p1z + (1.0 - p1) * p2z;
            let ht = 2.0 * d * q1z * q2z + r.b2q * q1 * q2 * (1.0 - q1) * (1.0 - q2);
            let b = (1.0 - q2) * q1z + (1.0 - q1) * q2z;
            if a > DENOM_FLOOR {
                if h / a > r1 {
                    r1 = h / a;
                    w1 = (t, x);
                }
            } else {
                excluded += 1;
            }
            if b > DENOM_FLOOR {
                if ht / b > r2 {
                    r2 = ht / b;
                    w2 = (t, x);
                }
            } else {
                excluded += 1;
            }
        }
    }
    Ok(RatioReport {
        j1,
        j2,
        max_ratio1: r1,
        bound1,
        worst1: w1,
        max_ratio2: r2,
        bound2,
        worst2: w2,
        excluded,
        pass: r1 <= bound1 && r2 <= bound2,
    })
}

/// Result of driving `ν3 - ν4` to zero by varying `d`.
#[derive(Debug, Clone)]
pub struct TunedDegenerate {
    pub d: f64,
    pub front: FrontProfile,
    pub spectral: SpectralPack,
    pub pack: ReactionPack,
    pub history: Vec<(f64, f64)>,
}

pub const TUNE_TOL: f64 = 0.02;

/// Secant iteration on `d` for `ν3(c(d)) = ν4(c(d), d)`; every iterate
/// recomputes the front. The second iterate is the `d` that would make the
/// exponents equal at the first iterate's speed.
pub fn tune_degenerate(pack: &ReactionPack, opts: &FrontOptions, max_iter: usize) -> Result<TunedDegenerate> {
    let eval = |d: f64| -> Result<(f64, FrontProfile, SpectralPack, ReactionPack)> {
        let mut p = pack.clone();
        p.coeffs.d = d;
        let front = compute_front(&System::new(p.clone()), opts)?;
        let spec = SpectralPack::new(&p, front.c)?;
        let gap = spec.nus[2] - spec.nus[3];
        Ok((gap, front, spec, p))
    };
    let mut history = Vec::new();
    let d0 = pack.coeffs.d;
    let (g0, _, s0, _) = eval(d0)?;
    history.push((d0, g0));
    let k4 = s0.kappas[3];
    let nu3 = s0.nus[2];
    let mut d1 = (k4 - s0.c * nu3) / (nu3 * nu3);
    let (mut da, mut ga) = (d0, g0);
    for _ in 0..max_iter {
        let (g1, front, spec, p) = eval(d1)?;
        history.push((d1, g1));
        if g1.abs() <= TUNE_TOL * spec.nus[3].abs() {
            return Ok(TunedDegenerate {
                d: d1,
                front,
                spectral: spec,
                pack: p,
                history,
            });
        }
        let next = d1 - g1 * (d1 - da) / (g1 - ga);
        if !(next.is_finite() && next > 0.0) {
            break;
        }
        (da, ga) = (d1, g1);
        d1 = next;
    }
    Err(Error::NoConvergence {
        periods: history.len(),
        drift: history.last().map(|h| h.1).unwrap_or(f64::NAN),
        history: history.iter().map(|h| h.1).collect(),
    })
}
