//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `DOCUMENTED_GAPS` are known to fail at desk scale for
//! the reasons recorded in the README; they are still evaluated with their
//! full thresholds and printed as FAIL. Any other failure makes this target
//! exit nonzero.

use std::collections::BTreeMap;
use std::time::Instant;

use piezostab::analysis::{
    boundedness_proxy, default_window, effective_loglog_slope, fit_exponential, fit_polynomial, resolvent_sweep,
    scaled_proxy, LambdaRange,
};
use piezostab::cli::{oracle_table, Config};
use piezostab::dynamics::{relative_distance, simulate, simulate_from, InitialData, Scenario, Trajectory};
use piezostab::generator::{
    dense_resolvent_norm, expm_propagate, lemma_constants, random_state, resolvent_norm, resolvent_solve,
    verify_lemma_bounds, ResolventOptions,
};
use piezostab::kernel::{build_quadrature, check_admissibility, default_s_max, MemoryKernel};

const DOCUMENTED_GAPS: [u8; 3] = [4, 6, 7];

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn cell(m: f64, b: f64, c: f64) -> Scenario {
    let mut s = Scenario::default_scenario();
    s.params = s.params.with_memory(m).with_damping(b, c);
    s
}

const DAMPINGS: [(f64, f64); 4] = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];

fn key(m: f64, b: f64, c: f64) -> String {
    format!("m={m} b={b} c={c}")
}

fn criterion_1(runs: &mut BTreeMap<String, Trajectory>) -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for m in [0.0, 0.5, 1.0] {
        for (b, c) in DAMPINGS {
            let t0 = Instant::now();
            let traj = simulate(&cell(m, b, c)).expect("default scenario runs");
            let secs = t0.elapsed().as_secs_f64();
            let ok = traj.max_increase <= 1e-12 && secs < 60.0;
            pass &= ok;
            lines.push(format!("{}: max step increase/E0 {:.2e}, {:.1} s", key(m, b, c), traj.max_increase, secs));
            runs.insert(key(m, b, c), traj);
        }
    }
    Outcome { id: 1, title: "dissipativity and monotonicity", pass, detail: lines.join("; ") }
}

fn criterion_2(runs: &BTreeMap<String, Trajectory>) -> Outcome {
    let coarse = runs[&key(0.5, 1.0, 1.0)].max_residual;
    let mut s = cell(0.5, 1.0, 1.0);
    s.dt = 5e-4;
    s.record_every = 100;
    let fine = simulate(&s).expect("runs").max_residual;
    let ratio = coarse / fine;
    Outcome {
        id: 2,
        title: "energy-balance order",
        pass: (3.0..=5.0).contains(&ratio),
        detail: format!("max residual {coarse:.3e} -> {fine:.3e}, ratio {ratio:.3}"),
    }
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for (case, (b, c)) in [(1u8, (0.0, 0.0)), (2, (0.0, 1.0)), (3, (1.0, 0.0)), (4, (1.0, 1.0))] {
        let mut cfg = Config::default();
        cfg.params.insert("b".into(), b);
        cfg.params.insert("c".into(), c);
        let t0 = Instant::now();
        let rows = oracle_table(&cfg, case, &[50, 100, 200]).expect("oracle table");
        let secs = t0.elapsed().as_secs_f64();
        let orders: Vec<f64> = rows.iter().filter_map(|r| r.order).collect();
        let ok = orders.len() == 2 && orders.iter().all(|o| (1.8..=2.2).contains(o)) && secs < 30.0;
        pass &= ok;
        lines.push(format!("case {case}: orders {:.3?}, {:.1} s", orders, secs));
    }
    Outcome { id: 3, title: "oracle equivalence", pass, detail: lines.join("; ") }
}

fn criterion_4(runs: &BTreeMap<String, Trajectory>) -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for m in [0.0, 0.5] {
        for (b, c) in DAMPINGS {
            let t = &runs[&key(m, b, c)];
            let fit = fit_exponential(&t.times, &t.totals(), default_window(&t.times)).expect("fit");
            let ok = fit.rate > 0.0 && fit.r_squared >= 0.99;
            pass &= ok;
            lines.push(format!(
                "{}: rate {:.4} R2 {:.4}{}",
                key(m, b, c),
                fit.rate,
                fit.r_squared,
                if ok { "" } else { " (below threshold)" }
            ));
        }
    }
    Outcome { id: 4, title: "exponential regime fits", pass, detail: lines.join("; ") }
}

fn criterion_5(runs: &BTreeMap<String, Trajectory>) -> Outcome {
    let gp = &runs[&key(1.0, 1.0, 1.0)];
    let poly = fit_polynomial(&gp.times, &gp.totals(), (5.0, 20.0)).expect("fit");
    let cg = &runs[&key(0.5, 1.0, 1.0)];
    let exp = fit_exponential(&cg.times, &cg.totals(), default_window(&cg.times)).expect("fit");
    let reference = effective_loglog_slope(&exp);
    Outcome {
        id: 5,
        title: "polynomial regime",
        pass: poly.rate <= -0.8 && poly.rate > reference,
        detail: format!(
            "m=1 log-log slope on [5,20] {:.3} (R2 {:.3}); m=1/2 effective slope at t=20 {:.3}",
            poly.rate, poly.r_squared, reference
        ),
    }
}

fn criterion_6() -> Outcome {
    let lambdas = "log:1:1000:30".parse::<LambdaRange>().expect("range").values();
    let opts = ResolventOptions::default();
    let half = cell(0.5, 1.0, 1.0).generator().expect("generator");
    let sweep = resolvent_sweep(&half, &lambdas, &opts).expect("sweep");
    let bounded = boundedness_proxy(&sweep).expect("two decades");
    let gp = cell(1.0, 1.0, 1.0).generator().expect("generator");
    let sweep = resolvent_sweep(&gp, &lambdas, &opts).expect("sweep");
    let scaled = scaled_proxy(&sweep).expect("top decade");

    let small = Scenario { n: 40, n_ages: 16, ..cell(0.5, 1.0, 1.0) }.generator().expect("generator");
    let mut worst: f64 = 0.0;
    for lambda in [1.0, 3.0, 10.0, 30.0, 100.0] {
        let it = resolvent_norm(&small, lambda, &opts).expect("estimate").norm;
        let dense = dense_resolvent_norm(&small, lambda).expect("dense");
        worst = worst.max((it - dense).abs() / dense);
    }
    let dense_ok = worst <= 0.05;
    Outcome {
        id: 6,
        title: "resolvent proxies",
        pass: bounded.bounded && scaled.nonincreasing && dense_ok,
        detail: format!(
            "m=1/2 top/previous decade max {:.4} ({}); m=1 scaled worst step-up {:+.4} ({}); dense vs iterative worst {:.2e} ({})",
            bounded.ratio,
            verdict(bounded.bounded),
            scaled.worst_increase,
            verdict(scaled.nonincreasing),
            worst,
            verdict(dense_ok)
        ),
    }
}

fn criterion_7() -> Outcome {
    let s = cell(0.5, 1.0, 1.0);
    let gen = s.generator().expect("generator");
    let constants = lemma_constants(&s.params, &s.kernel).expect("constants");
    let mut worst: BTreeMap<&'static str, f64> = BTreeMap::new();
    for lambda in [1.0, 10.0, 100.0] {
        for seed in 0..20 {
            let f = random_state(&gen, seed).to_complex();
            let u = resolvent_solve(&gen, lambda, &f).expect("solve");
            for b in verify_lemma_bounds(&gen, &u, &f, &constants, 1e-2).expect("bounds") {
                let w = worst.entry(b.name).or_insert(0.0);
                *w = w.max(b.margin);
            }
        }
    }
    let pass = worst.len() == 7 && worst.values().all(|m| *m <= 1.0 + 1e-2);
    let detail = worst.iter().map(|(k, v)| format!("{k} {v:.3e}")).collect::<Vec<_>>().join(", ");
    Outcome { id: 7, title: "lemma bounds", pass, detail: format!("worst margins: {detail}") }
}

fn criterion_8() -> Outcome {
    let exp = MemoryKernel::exponential(1.0, 2.0).expect("kernel");
    let r_exp = check_admissibility(&exp, &build_quadrature(&exp, 64, default_s_max(&exp)).expect("probe"));
    let alg = MemoryKernel::<f64>::algebraic();
    let r_alg = check_admissibility(&alg, &build_quadrature(&alg, 64, default_s_max(&alg)).expect("probe"));
    let pass = r_exp.passed() && r_alg.mass_ok && r_alg.monotone_ok && !r_alg.dafermos_ok;
    Outcome {
        id: 8,
        title: "kernel hypothesis",
        pass,
        detail: format!(
            "exponential (mass {}, monotone {}, dafermos {}); 1/(1+s)^2 (mass {}, monotone {}, dafermos {})",
            r_exp.mass_ok, r_exp.monotone_ok, r_exp.dafermos_ok, r_alg.mass_ok, r_alg.monotone_ok, r_alg.dafermos_ok
        ),
    }
}

fn criterion_9() -> Outcome {
    let gen = Scenario { n: 40, n_ages: 16, ..cell(0.5, 1.0, 1.0) }.generator().expect("generator");
    let u0 = InitialData::default().to_state(&gen);
    let exact = expm_propagate(&gen, &u0, 1.0).expect("expm");
    // Asymptotic range: larger steps leave the stiff diffusion modes
    // (eigenvalues up to 4d(1−m)/h² ≈ 3.4e3 at N = 40) unresolved.
    let dts = [1e-3, 5e-4, 2.5e-4];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let t = simulate_from(&gen, u0.clone(), dt, 1.0, usize::MAX, None).expect("run");
            relative_distance(&gen, t.final_state.as_ref().expect("final state"), &exact)
        })
        .collect();
    let orders: Vec<f64> = errs.windows(2).zip(dts.windows(2)).map(|(e, d)| (e[0] / e[1]).ln() / (d[0] / d[1]).ln()).collect();
    let c = errs.iter().zip(dts).map(|(e, d)| e / (d * d)).fold(0.0, f64::max);
    Outcome {
        id: 9,
        title: "propagator vs matrix exponential",
        pass: orders.iter().all(|o| (1.8..=2.2).contains(o)),
        detail: format!(
            "errors [{}] at dt {dts:?}, orders {orders:.3?}, C = max err/dt^2 = {c:.1}",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "fails"
    }
}

fn main() {
    let start = Instant::now();
    let mut runs = BTreeMap::new();
    let outcomes = vec![
        criterion_1(&mut runs),
        criterion_2(&runs),
        criterion_3(),
        criterion_4(&runs),
        criterion_5(&runs),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    let mut unexpected = 0;
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, DOCUMENTED_GAPS.contains(&o.id)) {
            (false, true) => " [documented gap]",
            (false, false) => {
                unexpected += 1;
                ""
            }
            (true, true) => " [documented gap now passes]",
            (true, false) => "",
        };
        println!("{tag} criterion {} ({}){note}: {}", o.id, o.title, o.detail);
    }
    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        eprintln!("{unexpected} criterion(s) failed outside the documented gaps");
        std::process::exit(1);
    }
}
