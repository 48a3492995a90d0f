use criterion::{black_box, criterion_group, criterion_main, Criterion};
use lvfront::front::cubic_interp;
use lvfront::kinetics::DEFAULT_CHECK_POINTS;
use lvfront::{
    check_assumptions, compute_orbits, BoundaryPolicy, CoefficientSet, Field, Grid1D, ReactionPack, SpectralPack,
    Stepper, System,
};

fn ps_b_pack() -> ReactionPack {
    let coeffs = CoefficientSet::ps_b();
    let orbit = compute_orbits(&coeffs, 256).unwrap();
    ReactionPack::new(&coeffs, &orbit)
}

fn kinetics(c: &mut Criterion) {
    let coeffs = CoefficientSet::ps_b();
    c.bench_function("check_assumptions", |b| {
        b.iter(|| check_assumptions(black_box(&coeffs), DEFAULT_CHECK_POINTS))
    });
    c.bench_function("compute_orbits M=256", |b| {
        b.iter(|| compute_orbits(black_box(&coeffs), 256).unwrap())
    });
}

fn spectral(c: &mut Criterion) {
    let pack = ps_b_pack();
    c.bench_function("spectral pack", |b| {
        b.iter(|| SpectralPack::new(black_box(&pack), -0.5).unwrap())
    });
}

fn stepper(c: &mut Criterion) {
    let system = System::new(ps_b_pack());
    let grid = Grid1D::new(60.0, 0.05, 1e-3).unwrap();
    let boundary = BoundaryPolicy::front_limits();
    let mut stepper = Stepper::new(system, grid, &boundary).unwrap();
    let start = Field::from_fn(&grid, 0.0, |x| {
        let s = 0.5 * (1.0 + x.tanh());
        (s, s)
    });
    c.bench_function("stepper step L=60 h=0.05", |b| {
        b.iter_batched_ref(
            || start.clone(),
            |f| stepper.step(f, &boundary).unwrap(),
            criterion::BatchSize::SmallInput,
        )
    });
}

fn interpolation(c: &mut Criterion) {
    let values: Vec<f64> = (0..2400).map(|j| (j as f64 * 0.05).sin()).collect();
    c.bench_function("cubic_interp", |b| {
        b.iter(|| {
            let mut s = 0.0;
            for k in 0..1000 {
                s += cubic_interp(black_box(&values), 0.0, 0.05, 0.1173 * k as f64);
            }
            s
        })
    });
}

criterion_group!(benches, kinetics, spectral, stepper, interpolation);
criterion_main!(benches);
