//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! fails at the end if any criterion failed.

mod common;

use std::time::Instant;

use lvfront::asymptotics::{
    epsilon_fraction, estimate_front_constants, fit_tail, k_bounds_for, theta2_check, tune_degenerate,
    verify_apriori_bounds, verify_decay_theorems, verify_ratio_bounds, Component, KBounds, Side, TailModel,
};
use lvfront::entire::{
    build_entire, build_shift_curves, check_properties, convergence_in_omega, omega_ordering, reflect_field,
    reflect_for_positive_c, shift_domain, translation_check, verify_envelope_inequalities, EntireOptions,
    EnvelopeCheck,
};
use lvfront::front::{compute_front, front_residual, is_monotone};
use lvfront::pde::comparison_test;
use lvfront::spectral::{linear_residual, periodicity_defect, quadratic_residuals};
use lvfront::{
    compute_orbits, orbit_residual, BoundaryPolicy, CoefficientSet, Error, FrontOptions, FrontProfile, Grid1D,
    ReactionPack, SpectralPack, System,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Desk-scale half-width; see the README.
const L: f64 = 60.0;

struct Ledger(Vec<(u32, bool)>);

impl Ledger {
    fn record(&mut self, n: u32, pass: bool, detail: String) {
        println!("criterion {n:>2}: {} {detail}", if pass { "PASS" } else { "FAIL" });
        self.0.push((n, pass));
    }
}

struct Base {
    pack: ReactionPack,
    system: System,
    front: FrontProfile,
    spec: SpectralPack,
    kb: KBounds,
    residual: f64,
}

fn base_front(opts: &FrontOptions) -> Base {
    let coeffs = CoefficientSet::ps_a();
    let pack = common::pack(&coeffs);
    let system = System::new(pack.clone());
    let front = compute_front(&system, opts).expect("PS-A front");
    let spec = SpectralPack::new(&pack, front.c).unwrap();
    let fc = estimate_front_constants(&front, spec.nus[2]).unwrap();
    let kb = k_bounds_for(&front, &fc, &pack).unwrap();
    let residual = front_residual(&front, &pack);
    Base {
        pack,
        system,
        front,
        spec,
        kb,
        residual,
    }
}

fn criterion_1(led: &mut Ledger) {
    let coeffs = CoefficientSet::ps_b();
    let start = Instant::now();
    let orbit = compute_orbits(&coeffs, 256).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let residual = orbit_residual(&orbit, &coeffs);
    let p_ref = common::rk4_logistic_orbit(&coeffs.r1, &coeffs.a1, 256, 16, 60);
    let q_ref = common::rk4_logistic_orbit(&coeffs.r2, &coeffs.b2, 256, 16, 60);
    let oracle = orbit
        .p
        .values
        .iter()
        .zip(&p_ref)
        .chain(orbit.q.values.iter().zip(&q_ref))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let tg = orbit.tgrid();
    let a1p: Vec<f64> = tg
        .iter()
        .zip(&orbit.p.values)
        .map(|(&t, p)| coeffs.a1.eval(t) * p)
        .collect();
    let b2q: Vec<f64> = tg
        .iter()
        .zip(&orbit.q.values)
        .map(|(&t, q)| coeffs.b2.eval(t) * q)
        .collect();
    let mean_err = (common::periodic_mean(&a1p) - coeffs.r1.mean)
        .abs()
        .max((common::periodic_mean(&b2q) - coeffs.r2.mean).abs());
    let pass = residual <= 1e-6 && oracle <= 1e-8 && mean_err <= 1e-8 && elapsed < 1.0;
    led.record(
        1,
        pass,
        format!("residual {residual:.2e}, oracle gap {oracle:.2e}, mean identities {mean_err:.2e}, {elapsed:.3}s"),
    );
}

fn spectral_defects(spec: &SpectralPack) -> (f64, f64, f64) {
    let quad = quadratic_residuals(&spec.kappas, &spec.nus, spec.c, spec.d)
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    let e = &spec.eig;
    let mut ode = 0.0f64;
    let mut per = 0.0f64;
    for (w, alpha) in [&e.phi1, &e.phi2, &e.psi1, &e.psi2].into_iter().zip(&e.alphas) {
        ode = ode.max(linear_residual(w, alpha, None));
        per = per.max(periodicity_defect(w));
    }
    for forced in [&spec.tilde.tilde_phi1, &spec.tilde.tilde_psi2].into_iter().flatten() {
        ode = ode.max(forced.residual());
        per = per.max(periodicity_defect(&forced.w));
    }
    (quad, ode, per)
}

fn criterion_2(led: &mut Ledger) {
    let start = Instant::now();
    let pb = SpectralPack::new(&common::pack(&CoefficientSet::ps_b()), -0.5).unwrap();
    let pa = SpectralPack::new(&common::pack(&CoefficientSet::ps_a()), -0.5).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let (qb, ob, pbd) = spectral_defects(&pb);
    let (qa, oa, pad) = spectral_defects(&pa);
    let e = &pa.eig;
    let ones = [&e.phi1, &e.phi2, &e.psi1, &e.psi2]
        .iter()
        .flat_map(|w| w.values.iter())
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max);
    let dev = |w: Option<&lvfront::periodic::Sampled>, target: f64| {
        w.map_or(f64::INFINITY, |w| {
            w.values.iter().map(|v| (v - target).abs()).fold(0.0, f64::max)
        })
    };
    let phi1 = dev(pa.tilde_phi1(), 6.5);
    let psi2 = dev(pa.tilde_psi2(), 18.0 / 7.0);
    let quad = qa.max(qb);
    let ode = oa.max(ob);
    let per = pad.max(pbd);
    let pass = quad <= 1e-12
        && ode <= 1e-8
        && per <= 1e-10
        && ones <= 1e-12
        && phi1 <= 1e-12
        && psi2 <= 1e-12
        && elapsed < 1.0;
    led.record(
        2,
        pass,
        format!(
            "quadratics {quad:.1e}, ODEs {ode:.1e}, periodicity {per:.1e}, constant eigenfunctions {ones:.1e}, \
             phi1~ - 6.5 {phi1:.1e}, psi2~ - 18/7 {psi2:.1e}, {elapsed:.3}s"
        ),
    );
}

fn criterion_3(led: &mut Ledger, base: &Base, fine: &Base) {
    let speed = &base.front.speed;
    let ratio = base.residual / fine.residual;
    let ps_c = compute_front(
        &common::system(&CoefficientSet::ps_c()),
        &FrontOptions {
            l: L,
            ..Default::default()
        },
    );
    let zero = matches!(ps_c, Err(Error::ZeroSpeed { .. }));
    let monotone = is_monotone(&base.front);
    let pass = speed.converged && speed.drift <= 1e-9 && monotone && base.residual <= 5e-4 && ratio >= 4.0 && zero;
    led.record(
        3,
        pass,
        format!(
            "c = {:.8}, drift {:.1e}, monotone {monotone}, residual {:.3e} -> {:.3e} ({ratio:.3}x), PS-C zero-speed {zero}",
            base.front.c, speed.drift, base.residual, fine.residual
        ),
    );
}

fn criterion_4(led: &mut Ledger, base: &Base) {
    let report = verify_decay_theorems(&base.front, &base.spec, 0.05).unwrap();
    let worst_rate = report.entries.iter().map(|e| e.rel_error).fold(0.0, f64::max);
    let worst_deriv = report
        .entries
        .iter()
        .map(|e| e.derivative_rel_error)
        .fold(0.0, f64::max);
    let tuned = tune_degenerate(
        &base.pack,
        &FrontOptions {
            l: L,
            ..Default::default()
        },
        8,
    )
    .unwrap();
    let nus = tuned.spectral.nus;
    let gap = (nus[2] - nus[3]).abs() / nus[3].abs();
    let q = fit_tail(&tuned.front, &tuned.spectral, Side::Minus, Component::Q).unwrap();
    let (lin_rms, pure_rms) = match q.model {
        TailModel::LinearTimesExp => (q.rms_residual, q.alternative.2),
        TailModel::PureExp => (q.alternative.2, q.rms_residual),
    };
    let factor = pure_rms / lin_rms;
    let (theta_fit, theta_pred, theta_rel) = theta2_check(&tuned.front, &tuned.spectral, &tuned.pack).unwrap();
    let pass = report.all_pass()
        && gap <= 0.02
        && q.preferred_model == TailModel::LinearTimesExp
        && factor >= 5.0
        && theta_rel <= 0.2;
    led.record(
        4,
        pass,
        format!(
            "rates within {:.2}% (max), derivative tails within {:.2}%; degenerate d = {:.4}, |nu3-nu4|/|nu4| = {gap:.1e}, \
             |z| model {factor:.1}x better, theta {theta_fit:.4} vs {theta_pred:.4} ({:.1}%)",
            100.0 * worst_rate,
            100.0 * worst_deriv,
            tuned.d,
            100.0 * theta_rel
        ),
    );
}

fn criterion_5(led: &mut Ledger, base: &Base) {
    let eps = epsilon_fraction(&base.spec, &base.pack, 0.1);
    let r = verify_apriori_bounds(&base.front, &base.spec, &base.pack, eps).unwrap();
    let finite = r.entries.iter().all(|e| e.constant.is_finite()) && r.c1.is_finite() && r.c2.is_finite();
    let violations = r.entries.iter().filter(|e| !e.holds).count();
    let pass = r.pass && r.entries.len() == 8 && finite && violations == 0;
    led.record(
        5,
        pass,
        format!(
            "eps = {eps:.4}, {} tail constants finite {finite}, C1 = {:.3}, C2 = {:.3}, violations {violations}",
            r.entries.len(),
            r.c1,
            r.c2
        ),
    );
}

fn criterion_6(led: &mut Ledger, base: &Base) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pass = true;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let j1 = rand::Rng::gen_range(&mut rng, -8.0..0.0);
        let j2 = j1 - rand::Rng::gen_range(&mut rng, 0.0..8.0);
        let r = verify_ratio_bounds(&base.front, &base.kb, &base.pack, base.spec.nus[2], j1, j2, 30.0).unwrap();
        pass &= r.pass;
        worst = worst.max(r.max_ratio1 / r.bound1).max(r.max_ratio2 / r.bound2);
    }
    led.record(
        6,
        pass,
        format!(
            "K1 = {:.3}, K2 = {:.3}, worst ratio/bound {worst:.3e} over 20 shifts",
            base.kb.k1, base.kb.k2
        ),
    );
}

fn envelope(b: &Base, omega: f64) -> lvfront::entire::EnvelopeReport {
    let nu3 = b.spec.nus[2];
    let curves = build_shift_curves(omega, omega, b.kb.k, b.front.c, nu3).unwrap();
    let check = EnvelopeCheck {
        periods: 5,
        x_max: 40.0,
        tol_env: 2.0 * b.residual,
    };
    verify_envelope_inequalities(&b.system, &b.front, &curves, &check)
}

fn criterion_7(led: &mut Ledger, base: &Base, fine: &Base, omega: f64) {
    let coarse = envelope(base, omega);
    let refined = envelope(fine, omega);
    let shrink = coarse.tol_env / refined.tol_env;
    let sub = |r: &lvfront::entire::EnvelopeReport| r.sub_max[0].value.max(r.sub_max[1].value);
    let sup = |r: &lvfront::entire::EnvelopeReport| r.super_min[0].value.min(r.super_min[1].value);
    let pass = coarse.pass && refined.pass && shrink >= 3.5;
    led.record(
        7,
        pass,
        format!(
            "min F(super) {:.1e} / {:.1e}, max F(sub) {:.1e} / {:.1e}, tol_env {:.2e} -> {:.2e} ({shrink:.2}x)",
            sup(&coarse),
            sup(&refined),
            sub(&coarse),
            sub(&refined),
            coarse.tol_env,
            refined.tol_env
        ),
    );
}

fn criterion_8(led: &mut Ledger, base: &Base, varpi: f64) {
    let opts = EntireOptions {
        l: L,
        ..Default::default()
    };
    let (sys, front) = (&base.system, &base.front);
    let om = (varpi - 1.0, varpi - 1.0);
    let curves = build_shift_curves(om.0, om.1, base.kb.k, front.c, base.spec.nus[2]).unwrap();
    let run = build_entire(sys, front, om, Some(&curves), &opts).unwrap();
    let d = &run.diagnostics;
    let props = check_properties(&run, front);
    let lower = build_entire(sys, front, (varpi - 2.0, varpi - 2.0), None, &opts).unwrap();
    let order = omega_ordering(&lower, &run).unwrap();
    let s = front.c.abs() * front.period;
    let b = (varpi - 2.0, varpi - 2.0);
    let tr = translation_check(sys, front, b, (b.0 + s + 0.5, b.1 + s - 0.5), 6, &opts, 20.0).unwrap();
    let conv = convergence_in_omega(
        sys,
        front,
        varpi - 1.0,
        &[varpi - 1.0, varpi - 4.0, varpi - 8.0],
        &opts,
        (-5.0, 15.0),
    )
    .unwrap();
    let sym = props.symmetry.unwrap_or(f64::INFINITY);
    let pass = d.sandwich_pass
        && d.monotone_pass
        && d.cauchy_decreasing
        && props.symmetry_pass
        && tr.pass
        && order >= -run.tol
        && conv.pass
        && props.bounds_pass;
    led.record(
        8,
        pass,
        format!(
            "sandwich margins {:.1e}/{:.1e}, monotone-in-n {:.1e}, Cauchy gaps {:?}, symmetry {sym:.1e}, translation {:.1e}, \
             omega order {order:.1e}, window gaps {:?}, bounds ({:.1e}, 1 - {:.1e})",
            d.sandwich_lower.value,
            d.sandwich_upper.map_or(f64::NAN, |u| u.value),
            d.monotone_min.iter().cloned().fold(f64::INFINITY, f64::min),
            d.cauchy_gaps.iter().map(|g| format!("{g:.1e}")).collect::<Vec<_>>(),
            tr.max_diff,
            conv.gaps.iter().map(|g| format!("{g:.1e}")).collect::<Vec<_>>(),
            props.bounds.0,
            1.0 - props.bounds.1
        ),
    );
}

fn criterion_9(led: &mut Ledger) {
    let sys = common::system(&CoefficientSet::ps_b());
    let grid = Grid1D::new(20.0, 0.1, 1e-3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    let mut all = true;
    for _ in 0..100 {
        let (lo, up) = common::random_ordered_pair(&mut rng, &grid);
        let r = comparison_test(&lo, &up, 2.0 * sys.period(), &sys, &grid, &BoundaryPolicy::NeumannZero).unwrap();
        all &= r.passed && r.min_gap.0 >= -1e-12 && r.min_gap.1 >= -1e-12;
        worst = worst.min(r.min_gap.0).min(r.min_gap.1);
    }
    led.record(9, all, format!("100 pairs over 2T, smallest gap {worst:.2e}"));
}

fn criterion_10(led: &mut Ledger, base: &Base, varpi: f64) {
    let twice = base.system.reflect().reflect() == base.system;
    let ff = base.front.reflected().reflected();
    let front_round =
        ff.p.iter()
            .zip(&base.front.p)
            .chain(ff.q.iter().zip(&base.front.q))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
    let opts = EntireOptions {
        l: L,
        ..Default::default()
    };
    let om = (varpi - 1.0, varpi - 1.0);
    let direct = build_entire(&base.system, &base.front, om, None, &opts).unwrap();

    let swapped = common::system(&CoefficientSet::ps_a().species_swapped());
    let fs = compute_front(
        &swapped,
        &FrontOptions {
            l: L,
            ..Default::default()
        },
    )
    .unwrap();
    let (refl, applied) = reflect_for_positive_c(&swapped, fs.c);
    let fr = fs.reflected();
    // The reflected front is pinned on its first component, which is the original Q.
    let (mut lo, mut hi) = (-20.0, 20.0);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if base.front.eval(0.0, m).1 < 0.5 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let sigma = 0.5 * (lo + hi);
    let routed = build_entire(&refl, &fr, (om.0 - sigma, om.1 - sigma), None, &opts).unwrap();
    let mut worst = 0.0f64;
    for (fa, fb) in direct.proxy().snapshots.iter().zip(&routed.proxy().snapshots) {
        let back = reflect_field(fb);
        let n = fa.u.len();
        for j in 0..n {
            worst = worst
                .max((back.u[j] - (1.0 - fa.v[n - 1 - j])).abs())
                .max((back.v[j] - (1.0 - fa.u[n - 1 - j])).abs());
        }
    }
    let pass = twice && front_round <= 1e-15 && applied && fs.c > 0.0 && worst <= 1e-4;
    led.record(
        10,
        pass,
        format!(
            "double reflection exact {twice} (front {front_round:.1e}), swapped c = {:.8}, route gap {worst:.2e}",
            fs.c
        ),
    );
}

#[test]
fn acceptance() {
    let mut led = Ledger(Vec::new());
    criterion_1(&mut led);
    criterion_2(&mut led);
    let base = base_front(&FrontOptions {
        l: L,
        ..Default::default()
    });
    let fine = base_front(&FrontOptions {
        l: L,
        h: 0.025,
        dt: 2.5e-4,
        ..Default::default()
    });
    let varpi = shift_domain(base.kb.k, base.front.c, base.spec.nus[2]).unwrap();
    criterion_3(&mut led, &base, &fine);
    criterion_4(&mut led, &base);
    criterion_5(&mut led, &base);
    criterion_6(&mut led, &base);
    criterion_7(&mut led, &base, &fine, varpi - 1.0);
    criterion_8(&mut led, &base, varpi);
    criterion_9(&mut led);
    criterion_10(&mut led, &base, varpi);
    let failed: Vec<u32> = led.0.iter().filter(|(_, p)| !p).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
