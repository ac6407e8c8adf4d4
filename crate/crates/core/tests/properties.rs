use piezostab::dynamics::{energy, Integrator};
use piezostab::generator::{assemble, random_state, resolvent_norm, resolvent_solve, GeneratorMatrix, ResolventOptions};
use piezostab::grid::SpatialGrid;
use piezostab::kernel::{build_quadrature, MemoryKernel};
use piezostab::params::PhysicalParams;
use piezostab::Complex64;
use proptest::prelude::*;

fn generator(m: f64, b: f64, c: f64, a: f64, delta: f64, n: usize) -> GeneratorMatrix<f64> {
    let mut p = PhysicalParams::unit().with_memory(m).with_damping(b, c);
    p.a = a;
    let k = MemoryKernel::exponential(1.0, delta).unwrap();
    let q = build_quadrature(&k, 10, 10.0 / delta).unwrap();
    assemble(&p, &SpatialGrid::new(1.0, n).unwrap(), &q)
}

fn config() -> impl Strategy<Value = (f64, f64, f64, f64, f64, usize, u64)> {
    (
        prop_oneof![Just(0.0), 0.05f64..0.95, Just(1.0)],
        prop_oneof![Just(0.0), 0.1f64..3.0],
        prop_oneof![Just(0.0), 0.1f64..3.0],
        0.1f64..3.0,
        0.5f64..4.0,
        6usize..24,
        any::<u64>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_power_equals_dissipation((m, b, c, a, delta, n, seed) in config()) {
        let gen = generator(m, b, c, a, delta, n);
        let u = random_state(&gen, seed);
        let au = gen.apply(&u).unwrap();
        let power = gen.inner(&au, &u).unwrap();
        let d = gen.dissipation(&u);
        prop_assert!(d <= 0.0);
        let scale = gen.norm(&u).unwrap() * gen.norm(&au).unwrap();
        prop_assert!((power - d).abs() <= 1e-10 * scale, "power {power} dissipation {d}");
    }

    #[test]
    fn midpoint_steps_never_gain_energy((m, b, c, a, delta, n, seed) in config(), dt in 1e-3f64..0.5) {
        let gen = generator(m, b, c, a, delta, n);
        let stepper = Integrator::new(&gen, dt).unwrap();
        let mut u = random_state(&gen, seed);
        let e0 = energy(&gen, &u).total();
        let mut prev = e0;
        for _ in 0..5 {
            u = stepper.step(&u).unwrap();
            let e = energy(&gen, &u).total();
            prop_assert!(e - prev <= 1e-12 * e0);
            prev = e;
        }
    }

    #[test]
    fn resolvent_inverts_the_shifted_operator((m, b, c, a, delta, n, seed) in config(), lambda in -50.0f64..50.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let gen = generator(m, b, c, a, delta, n);
        let f = random_state(&gen, seed).to_complex();
        let u = resolvent_solve(&gen, lambda, &f).unwrap();
        let mut r = gen.apply(&u).unwrap();
        r.scale(Complex64::new(-1.0, 0.0));
        r.axpy(Complex64::new(0.0, lambda), &u);
        r.axpy(Complex64::new(-1.0, 0.0), &f);
        prop_assert!(r.max_abs() <= 1e-8 * f.max_abs().max(u.max_abs()));
    }

    #[test]
    fn resolvent_norm_is_conjugate_symmetric((m, b, c, a, delta, n, _s) in config(), lambda in 0.5f64..30.0) {
        let gen = generator(m, b, c, a, delta, n);
        let opts = ResolventOptions::default();
        let plus = resolvent_norm(&gen, lambda, &opts).unwrap();
        let minus = resolvent_norm(&gen, -lambda, &opts).unwrap();
        prop_assert!((plus.norm - minus.norm).abs() <= 1e-6 * plus.norm);
        prop_assert!(plus.norm > 0.0);
    }
}
