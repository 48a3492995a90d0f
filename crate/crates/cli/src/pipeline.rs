//! Stage runner: check → orbits → front → spectral → decay → entire.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use lvfront::asymptotics::{
    demodulated_tail, epsilon_fraction, estimate_front_constants, k_bounds_for, verify_apriori_bounds,
    verify_decay_theorems, verify_ratio_bounds, Component, KBounds, Side, TailModel,
};
use lvfront::entire::{
    build_entire, build_shift_curves, check_properties, reflect_field, shift_domain, subsolution_eval,
    supersolution_eval, verify_envelope_inequalities, EntireOptions, EnvelopeCheck, ShiftCurves,
};
use lvfront::front::{compute_front, front_residual, harnack_ratio_floored, is_monotone};
use lvfront::kinetics::DEFAULT_CHECK_POINTS;
use lvfront::spectral::{linear_residual, quadratic_residuals};
use lvfront::{
    check_assumptions, compute_orbits, orbit_residual, CoefficientSet, FrontProfile, ReactionPack, SpectralPack, System,
};

use crate::config::ScenarioConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Check,
    Orbits,
    Front,
    Spectral,
    Decay,
    Entire,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Check => "check",
            Stage::Orbits => "orbits",
            Stage::Front => "front",
            Stage::Spectral => "spectral",
            Stage::Decay => "decay",
            Stage::Entire => "entire",
        }
    }
}

/// Which stages to run: a stage with its prerequisites, or every stage
/// enabled in the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Upto(Stage),
    All,
}

/// Harnack ratios are measured above this level; deeper tails are round-off.
const HARNACK_FLOOR: f64 = 1e-8;

/// Fixed 17-significant-digit formatting for CSV values.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Out {
    dir: PathBuf,
}

impl Out {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, content: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, content).map_err(|e| CliError::io(&p, e))
    }

    fn csv<I: IntoIterator<Item = Vec<String>>>(
        &self,
        name: &str,
        head: &str,
        columns: &str,
        rows: I,
    ) -> Result<(), CliError> {
        let mut s = String::from(head);
        s.push_str(columns);
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.write(name, &s)
    }
}

/// `key = value` lines.
#[derive(Default)]
struct Report(String);

impl Report {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        writeln!(self.0, "{key} = {value}").expect("string write");
        self
    }

    fn line(&mut self, text: &str) -> &mut Self {
        self.0.push_str(text);
        self.0.push('\n');
        self
    }
}

struct FrontStage {
    front: FrontProfile,
    residual: f64,
}

/// Runs the selected stages, writing artifacts into `out_dir`. Returns one
/// summary line per completed stage.
pub fn run(target: Target, cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let out = Out {
        dir: out_dir.to_path_buf(),
    };
    let wanted = |s: Stage| match target {
        Target::Upto(last) => s <= last,
        Target::All => {
            let p = &cfg.pipeline;
            match s {
                Stage::Check => p.check,
                Stage::Orbits => p.orbits,
                Stage::Front => p.front,
                Stage::Spectral => p.spectral,
                Stage::Decay => p.decay,
                Stage::Entire => p.entire,
            }
        }
    };
    let mut log = Vec::new();
    let coeffs = cfg.coefficient_set()?;
    if !wanted(Stage::Check) {
        return Ok(log);
    }
    log.push(stage_check(&out, &coeffs)?);
    if !wanted(Stage::Orbits) {
        return Ok(log);
    }
    let (pack, line) = stage_orbits(&out, cfg, &coeffs)?;
    log.push(line);
    if !wanted(Stage::Front) {
        return Ok(log);
    }
    let system = System::new(pack.clone());
    let (fs, line) = stage_front(&out, cfg, &system)?;
    log.push(line);
    if !wanted(Stage::Spectral) {
        return Ok(log);
    }
    let (spec, line) = stage_spectral(&out, &pack, &fs.front)?;
    log.push(line);
    if !wanted(Stage::Decay) {
        return Ok(log);
    }
    let (kb, line) = stage_decay(&out, cfg, &pack, &fs.front, &spec)?;
    log.push(line);
    if !wanted(Stage::Entire) {
        return Ok(log);
    }
    log.push(stage_entire(&out, cfg, &system, &fs, &spec, kb.as_ref())?);
    Ok(log)
}

fn stage_check(out: &Out, coeffs: &CoefficientSet) -> Result<String, CliError> {
    let r = check_assumptions(coeffs, DEFAULT_CHECK_POINTS);
    let mut rep = Report::default();
    rep.kv("A1", if r.a1_ok { "pass" } else { "fail" })
        .kv("A1.min_a1_a2_b1_b2_mean_r1_r2", fmt_list(&r.a1_values))
        .kv("A2", if r.a2_ok { "pass" } else { "fail" })
        .kv("A2.margins", fmt_list(&r.a2_margins))
        .kv("A3", if r.a3_ok { "pass" } else { "fail" })
        .kv("A3.margins", fmt_list(&r.a3_margins));
    if let Some(x) = r.extras {
        rep.kv("mean_b1q_minus_a1p", num(x[0]))
            .kv("mean_a2p_minus_b2q", num(x[1]));
    }
    out.write("assumptions.txt", &rep.0)?;
    match r.first_failure() {
        Some(name) => Err(CliError::Assumption(format!("check: assumption {name} does not hold"))),
        None => Ok("check: (A1)-(A3) hold".into()),
    }
}

fn stage_orbits(out: &Out, cfg: &ScenarioConfig, coeffs: &CoefficientSet) -> Result<(ReactionPack, String), CliError> {
    let orbit = compute_orbits(coeffs, cfg.grid.m).map_err(|e| CliError::from_lib("orbits", e))?;
    let residual = orbit_residual(&orbit, coeffs);
    let rows = orbit
        .tgrid()
        .into_iter()
        .enumerate()
        .map(|(j, t)| vec![num(t), num(orbit.p.values[j]), num(orbit.q.values[j])]);
    out.csv("orbits.csv", "", "t,p,q", rows)?;
    let mut rep = Report::default();
    rep.kv("p0", num(orbit.p0))
        .kv("q0", num(orbit.q0))
        .kv("samples", orbit.len())
        .kv("residual", num(residual));
    out.write("orbits.txt", &rep.0)?;
    if residual > cfg.tolerances.orbit_residual {
        return Err(CliError::Numerical(format!(
            "orbits: kinetic residual {residual:e} exceeds {:e}",
            cfg.tolerances.orbit_residual
        )));
    }
    Ok((
        ReactionPack::new(coeffs, &orbit),
        format!("orbits: residual {residual:.2e}"),
    ))
}

fn load_checkpoint(out: &Out, key: &str) -> Option<FrontProfile> {
    let stored = fs::read_to_string(out.path("front.key")).ok()?;
    if stored != key {
        return None;
    }
    let file = fs::File::open(out.path("front.bin")).ok()?;
    FrontProfile::read_checkpoint(std::io::BufReader::new(file)).ok()
}

fn stage_front(out: &Out, cfg: &ScenarioConfig, system: &System) -> Result<(FrontStage, String), CliError> {
    let key = cfg.front_key();
    let (front, reused) = match load_checkpoint(out, &key) {
        Some(f) => (f, true),
        None => {
            let f = compute_front(system, &cfg.front_options()).map_err(|e| CliError::from_lib("front", e))?;
            let p = out.path("front.bin");
            let file = fs::File::create(&p).map_err(|e| CliError::io(&p, e))?;
            f.write_checkpoint(std::io::BufWriter::new(file))
                .map_err(|e| CliError::io(&p, e))?;
            out.write("front.key", &key)?;
            (f, false)
        }
    };
    let residual = front_residual(&front, &system.pack);
    let monotone = is_monotone(&front);
    let harnack = harnack_ratio_floored(&front, HARNACK_FLOOR);
    let s = &front.speed;
    let head = format!(
        "# c = {}\n# L = {}\n# h = {}\n# dt = {}\n# drift = {}\n",
        num(front.c),
        num(cfg.grid.l),
        num(front.h),
        num(cfg.grid.dt),
        num(s.drift)
    );
    let stride = (front.m_t / cfg.grid.csv_phases.min(front.m_t)).max(1);
    let rows = (0..front.m_t).step_by(stride).flat_map(|i| {
        let f = &front;
        (0..f.n_z).map(move |j| {
            let (p, q) = f.at(i, j);
            let (pz, qz) = f.deriv_at(i, j);
            vec![
                i.to_string(),
                num(f.t(i)),
                num(f.z(j)),
                num(p),
                num(q),
                num(pz),
                num(qz),
            ]
        })
    });
    out.csv("front.csv", &head, "t_index,t,z,P,Q,Pz,Qz", rows)?;
    let mut rep = Report::default();
    rep.kv("c", num(front.c))
        .kv("c_level_set", num(s.c_level_set))
        .kv("drift", num(s.drift))
        .kv("converged", s.converged)
        .kv("periods", s.periods)
        .kv("residual", num(residual))
        .kv("monotone", monotone)
        .kv("harnack_plus", fmt_list(&[harnack.plus.0, harnack.plus.1]))
        .kv("harnack_minus", fmt_list(&[harnack.minus.0, harnack.minus.1]))
        .kv("tail_magnitude", num(front.tail_magnitude()))
        .kv("stored_phases", front.m_t)
        .kv("from_checkpoint", reused);
    out.write("front.txt", &rep.0)?;
    if !monotone {
        return Err(CliError::Numerical("front: monotonicity check failed".into()));
    }
    if residual > cfg.tolerances.front_residual {
        return Err(CliError::Numerical(format!(
            "front: PDE residual {residual:e} exceeds {:e}",
            cfg.tolerances.front_residual
        )));
    }
    let line = format!(
        "front: c = {:.8}, residual {residual:.2e}{}",
        front.c,
        if reused { " (checkpoint)" } else { "" }
    );
    Ok((FrontStage { front, residual }, line))
}

fn stage_spectral(out: &Out, pack: &ReactionPack, front: &FrontProfile) -> Result<(SpectralPack, String), CliError> {
    let spec = SpectralPack::new(pack, front.c).map_err(|e| CliError::from_lib("spectral", e))?;
    let e = &spec.eig;
    let quad = quadratic_residuals(&spec.kappas, &spec.nus, spec.c, spec.d);
    let ode = [&e.phi1, &e.phi2, &e.psi1, &e.psi2]
        .iter()
        .zip(&e.alphas)
        .map(|(w, a)| linear_residual(w, a, None))
        .fold(0.0, f64::max);
    let mut rep = Report::default();
    rep.kv("c", num(spec.c))
        .kv("d", num(spec.d))
        .kv("kappa", fmt_list(&spec.kappas))
        .kv("nu", fmt_list(&spec.nus))
        .kv("plus_regime", spec.plus.label())
        .kv("minus_regime", spec.minus.label())
        .kv("quadratic_residuals", fmt_list(&quad))
        .kv("eigenfunction_residual", num(ode));
    for (name, t) in [
        ("tilde_phi1", &spec.tilde.tilde_phi1),
        ("tilde_psi2", &spec.tilde.tilde_psi2),
    ] {
        match t {
            Ok(f) => rep.kv(&format!("{name}_residual"), num(f.residual())),
            Err(why) => rep.kv(name, format!("unavailable ({why})")),
        };
    }
    out.write("spectral.txt", &rep.0)?;
    let opt = |s: Option<&lvfront::periodic::Sampled>, j: usize| s.map_or(String::new(), |w| num(w.values[j]));
    let rows = e.phi1.tgrid().into_iter().enumerate().map(|(j, t)| {
        vec![
            num(t),
            num(e.phi1.values[j]),
            num(e.phi2.values[j]),
            num(e.psi1.values[j]),
            num(e.psi2.values[j]),
            opt(spec.tilde_phi1(), j),
            opt(spec.tilde_psi2(), j),
        ]
    });
    out.csv("spectral.csv", "", "t,phi1,phi2,psi1,psi2,tilde_phi1,tilde_psi2", rows)?;
    let line = format!(
        "spectral: nu = [{}], regimes {}/{}",
        fmt_short(&spec.nus),
        spec.plus.label(),
        spec.minus.label()
    );
    Ok((spec, line))
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Plus => "plus",
        Side::Minus => "minus",
    }
}

fn comp_name(c: Component) -> &'static str {
    match c {
        Component::P => "P",
        Component::Q => "Q",
    }
}

fn stage_decay(
    out: &Out,
    cfg: &ScenarioConfig,
    pack: &ReactionPack,
    front: &FrontProfile,
    spec: &SpectralPack,
) -> Result<(Option<KBounds>, String), CliError> {
    let lib = |e| CliError::from_lib("decay", e);
    let report = verify_decay_theorems(front, spec, cfg.tolerances.decay_rel).map_err(lib)?;
    let mut rep = Report::default();
    rep.kv("tol_rel", num(report.tol_rel));
    rep.line("side component case predicted_nu fitted_nu rel_error derivative_rel_error model preferred_model amplitude rms pass");
    let mut tails = Vec::new();
    for e in &report.entries {
        let f = &e.fit;
        rep.line(&format!(
            "{} {} {} {} {} {} {} {} {} {} {} {}",
            side_name(f.side),
            comp_name(f.component),
            e.case.label(),
            num(f.predicted_rate),
            num(f.rate),
            num(e.rel_error),
            num(e.derivative_rel_error),
            f.model.label(),
            f.preferred_model.label(),
            num(f.amplitude),
            num(f.rms_residual),
            e.pass
        ));
        for (z, y) in demodulated_tail(front, spec, f.side, f.component).map_err(lib)? {
            let fitted = match f.model {
                TailModel::PureExp => f.amplitude.ln() + f.rate * z,
                TailModel::LinearTimesExp => f.amplitude.ln() + z.abs().ln() + f.rate * z,
            };
            let inside = z >= f.window.0 && z <= f.window.1;
            tails.push(vec![
                side_name(f.side).to_string(),
                comp_name(f.component).to_string(),
                num(z),
                num(y),
                num(fitted),
                u8::from(inside).to_string(),
            ]);
        }
    }
    let eps = epsilon_fraction(spec, pack, cfg.tolerances.epsilon_fraction);
    let bounds = verify_apriori_bounds(front, spec, pack, eps).map_err(lib)?;
    rep.kv("epsilon", num(eps))
        .kv("C1", num(bounds.c1))
        .kv("C2", num(bounds.c2));
    rep.line("bound exponent constant lower nodes holds");
    for b in &bounds.entries {
        rep.line(&format!(
            "{} {} {} {} {} {}",
            b.name,
            num(b.exponent),
            num(b.constant),
            b.lower,
            b.nodes,
            b.holds
        ));
    }
    out.write("decay.txt", &rep.0)?;
    out.csv(
        "decay_tails.csv",
        "",
        "side,component,z,log_demodulated,fitted,in_window",
        tails,
    )?;

    let mut failed = Vec::new();
    if !report.all_pass() {
        failed.push(format!("decay law ({})", report.failures.join("; ")));
    }
    if !bounds.pass {
        failed.push("a priori bounds".to_string());
    }
    let mut ratio = Report::default();
    let kb = if front.c < 0.0 {
        let fc = estimate_front_constants(front, spec.nus[2]).map_err(lib)?;
        let kb = k_bounds_for(front, &fc, pack).map_err(lib)?;
        ratio.kv("K1", num(kb.k1)).kv("K2", num(kb.k2)).kv("K", num(kb.k));
        ratio
            .kv("M", num(fc.m))
            .kv("N", num(fc.n))
            .kv("M1", num(fc.m1_upper))
            .kv("m1", num(fc.m1_lower));
        ratio.line("j1 j2 max_ratio1 bound1 worst1_t worst1_x max_ratio2 bound2 worst2_t worst2_x pass");
        for &[j1, j2] in &cfg.ratio.shifts {
            let r = verify_ratio_bounds(front, &kb, pack, spec.nus[2], j1, j2, cfg.ratio.x_max).map_err(lib)?;
            ratio.line(&format!(
                "{} {} {} {} {} {} {} {} {} {} {}",
                num(j1),
                num(j2),
                num(r.max_ratio1),
                num(r.bound1),
                num(r.worst1.0),
                num(r.worst1.1),
                num(r.max_ratio2),
                num(r.bound2),
                num(r.worst2.0),
                num(r.worst2.1),
                r.pass
            ));
            if !r.pass {
                failed.push(format!("ratio bound at (j1, j2) = ({j1}, {j2})"));
            }
        }
        Some(kb)
    } else {
        ratio
            .line("skipped: the ratio bounds are stated for c < 0 and the reflected kinetics are not of the same form");
        None
    };
    out.write("ratio.txt", &ratio.0)?;
    if !failed.is_empty() {
        return Err(CliError::Numerical(format!(
            "decay: failed checks: {}",
            failed.join(", ")
        )));
    }
    let worst = report.entries.iter().map(|e| e.rel_error).fold(0.0, f64::max);
    let k = kb.map_or(String::new(), |k| format!(", K = {:.3}", k.k));
    Ok((kb, format!("decay: max rate error {:.2}%{k}", 100.0 * worst)))
}

fn stage_entire(
    out: &Out,
    cfg: &ScenarioConfig,
    system: &System,
    fs: &FrontStage,
    spec: &SpectralPack,
    kb: Option<&KBounds>,
) -> Result<String, CliError> {
    let lib = |e| CliError::from_lib("entire", e);
    let reflected = fs.front.c > 0.0;
    let (sys, front) = if reflected {
        (system.reflect(), fs.front.reflected())
    } else {
        (system.clone(), fs.front.clone())
    };
    let period = sys.period();
    let e = &cfg.entire;
    let mut rep = Report::default();
    rep.kv("reflected", reflected);
    let varpi = match kb {
        Some(kb) if !reflected => Some(shift_domain(kb.k, front.c, spec.nus[2]).map_err(lib)?),
        _ => None,
    };
    let default_omega = varpi.map_or(-10.0, |v| v - 1.0);
    let omegas = (e.omega1.unwrap_or(default_omega), e.omega2.unwrap_or(default_omega));
    rep.kv("omega1", num(omegas.0)).kv("omega2", num(omegas.1));
    let curves: Option<ShiftCurves> = match (varpi, kb) {
        (Some(v), Some(kb)) => {
            rep.kv("K", num(kb.k)).kv("varpi", num(v));
            Some(build_shift_curves(omegas.0, omegas.1, kb.k, front.c, spec.nus[2]).map_err(lib)?)
        }
        _ => {
            rep.line("supersolution: unavailable without K for these kinetics; envelope and upper sandwich skipped");
            None
        }
    };
    let mut failed: Vec<String> = Vec::new();
    if let Some(cv) = &curves {
        rep.kv("rho1", num(cv.rho1)).kv("R0", num(cv.r0()));
        let check = EnvelopeCheck {
            periods: e.envelope_periods,
            x_max: e.envelope_x_max,
            tol_env: cfg.tolerances.envelope_factor * fs.residual,
        };
        let env = verify_envelope_inequalities(&sys, &front, cv, &check);
        rep.kv("tol_env", num(env.tol_env));
        for (k, x) in env.super_min.iter().enumerate() {
            rep.kv(
                &format!("super_min_F{}", k + 1),
                format!("{} at t = {} x = {}", num(x.value), num(x.t), num(x.x)),
            );
        }
        for (k, x) in env.sub_max.iter().enumerate() {
            rep.kv(
                &format!("sub_max_F{}", k + 1),
                format!("{} at t = {} x = {}", num(x.value), num(x.t), num(x.x)),
            );
        }
        rep.kv("kink_excluded", env.kink_excluded).kv("envelope_pass", env.pass);
        if !env.pass {
            failed.push("envelope inequalities".into());
        }
    }
    let opts = EntireOptions {
        l: cfg.grid.l,
        h: cfg.grid.h,
        dt: cfg.grid.dt,
        n_list: e.n_list.clone(),
        t_end: e.t_end.unwrap_or(4.0 * period),
        samples_per_period: e.samples_per_period,
        tol: cfg.tolerances.entire,
    };
    let run = build_entire(&sys, &front, omegas, curves.as_ref(), &opts).map_err(lib)?;
    let d = &run.diagnostics;
    rep.kv("n_list", format!("{:?}", e.n_list))
        .kv("monotone_in_n_min", fmt_list(&d.monotone_min))
        .kv("cauchy_gaps", fmt_list(&d.cauchy_gaps))
        .kv(
            "sandwich_lower",
            format!(
                "{} at t = {} x = {}",
                num(d.sandwich_lower.value),
                num(d.sandwich_lower.t),
                num(d.sandwich_lower.x)
            ),
        );
    if let Some(u) = d.sandwich_upper {
        rep.kv(
            "sandwich_upper",
            format!("{} at t = {} x = {}", num(u.value), num(u.t), num(u.x)),
        );
    }
    rep.kv("monotone_pass", d.monotone_pass)
        .kv("sandwich_pass", d.sandwich_pass)
        .kv("cauchy_decreasing", d.cauchy_decreasing);
    for (ok, name) in [
        (d.monotone_pass, "monotone in n"),
        (d.sandwich_pass, "sandwich"),
        (d.cauchy_decreasing, "Cauchy gaps decreasing"),
    ] {
        if !ok {
            failed.push(name.into());
        }
    }
    let props = check_properties(&run, &front);
    rep.kv("period_monotone", num(props.period_monotone))
        .kv("period_monotone_pass", props.period_monotone_pass)
        .kv(
            "backward_limit",
            fmt_list(&[props.backward_limit.0, props.backward_limit.1]),
        )
        .kv("backward_limit_pass", props.backward_limit_pass)
        .kv("forward_min", num(props.forward_min))
        .kv("forward_horizon", num(props.forward_horizon))
        .kv(
            "forward_pass",
            props.forward_pass.map_or("not reached".to_string(), |p| p.to_string()),
        )
        .kv("symmetry", props.symmetry.map_or("n/a".to_string(), num))
        .kv("symmetry_pass", props.symmetry_pass)
        .kv("bounds", fmt_list(&[props.bounds.0, props.bounds.1]))
        .kv("bounds_pass", props.bounds_pass);
    for (ok, name) in [
        (props.period_monotone_pass, "period monotonicity"),
        (props.backward_limit_pass, "backward limit"),
        (props.forward_pass.unwrap_or(true), "forward limit"),
        (props.symmetry_pass, "symmetry"),
        (props.bounds_pass, "strict bounds"),
    ] {
        if !ok {
            failed.push(name.into());
        }
    }
    out.write("entire.txt", &rep.0)?;
    let t_end = *run.times.last().expect("non-empty");
    let times = e
        .snapshot_times
        .clone()
        .unwrap_or_else(|| vec![-2.0 * period, -period, 0.0, t_end]);
    let proxy = run.proxy();
    for (k, &t) in times.iter().enumerate() {
        let idx = (0..run.times.len())
            .min_by(|&a, &b| (run.times[a] - t).abs().total_cmp(&(run.times[b] - t).abs()))
            .expect("non-empty");
        let Some(field) = proxy.at(idx) else { continue };
        let ts = run.times[idx];
        let field = if reflected { reflect_field(field) } else { field.clone() };
        // Envelopes are evaluated in the frame the run used and mapped back like the field.
        let sub = |x: f64| {
            if reflected {
                let (a, b) = subsolution_eval(&front, omegas, ts, -x);
                (1.0 - a, 1.0 - b)
            } else {
                subsolution_eval(&front, omegas, ts, x)
            }
        };
        let sup = |x: f64| {
            curves.as_ref().map(|cv| {
                if reflected {
                    let (a, b) = supersolution_eval(&front, cv, ts, -x);
                    (1.0 - a, 1.0 - b)
                } else {
                    supersolution_eval(&front, cv, ts, x)
                }
            })
        };
        let rows = run.grid.xs().into_iter().enumerate().map(|(j, x)| {
            let (su, sv) = sub(x);
            let (pu, pv) = sup(x).map_or((String::new(), String::new()), |(a, b)| (num(a), num(b)));
            vec![num(x), num(field.u[j]), num(field.v[j]), num(su), num(sv), pu, pv]
        });
        let head = format!("# t = {}\n", num(ts));
        out.csv(
            &format!("entire_snapshot_{k}.csv"),
            &head,
            "x,u,v,u_sub,v_sub,U_sup,V_sup",
            rows,
        )?;
    }
    if !failed.is_empty() {
        return Err(CliError::Numerical(format!(
            "entire: failed checks: {}",
            failed.join(", ")
        )));
    }
    Ok(format!(
        "entire: omegas ({:.4}, {:.4}), Cauchy gaps [{}]",
        omegas.0,
        omegas.1,
        fmt_short(&d.cauchy_gaps)
    ))
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}

fn fmt_short(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ")
}
