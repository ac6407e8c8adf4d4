//! Time integration with exact energy bookkeeping.
//!
//! The evolution runs on the first-order energy variables with the
//! generator `A_h`. Implicit midpoint,
//! `(2/dt − A_h) U_{n+1} = (2/dt + A_h) U_n`, gives
//! `E_{n+1} − E_n = dt · D(U_{n+½})`, so the discrete energy can only
//! decrease, and the balance residual against the trapezoid average of `D`
//! is `O(dt²)`.

mod initial;
mod primal;

pub use initial::{InitialData, Profile};
pub use primal::{rhs, PrimalState};

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{assemble, compatibility_residual, GeneratorError, GeneratorMatrix, ShiftedSolver};
use crate::grid::{GridError, SpatialGrid};
use crate::history::history_energy;
use crate::kernel::{build_quadrature, build_quadrature_graded, default_s_max, KernelError, MemoryKernel};
use crate::params::PhysicalParams;
use crate::scalar::{lit, to_f64, Real};
use crate::state::FirstOrderState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("singular step matrix for {config}")]
    SolverSingular { config: String },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Energy components and the instantaneous dissipation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnergyBreakdown<T> {
    pub ek: T,
    pub ep: T,
    pub eb: T,
    pub eelec: T,
    pub em: T,
    pub d: T,
}

impl<T: Real> EnergyBreakdown<T> {
    pub fn total(&self) -> T {
        self.ek + self.ep + self.eb + self.eelec + self.em
    }
}

/// `E_k = ρ/2‖z‖²`, `E_p = α/2‖v_x‖²`, `E_B = μ/2‖u¹‖²`,
/// `E_elec = ½(ξε₃‖u²‖² + ε₃‖u³‖²)`, `E_m = ½‖w‖² + (md/2)∬σ|κ_x|²`,
/// and `D = Re⟨A_h U, U⟩_H`.
pub fn energy<T: Real>(gen: &GeneratorMatrix<T>, u: &FirstOrderState<T>) -> EnergyBreakdown<T> {
    let g = &gen.grid;
    let p = &gen.params;
    let n = g.n;
    let half: T = lit(0.5);
    let mut dv = vec![T::zero(); n + 1];
    g.node_to_cell(T::zero(), &u.v, u.v[n], &mut dv);
    let hist = gen.quad.as_ref().map_or(T::zero(), |q| history_energy(&u.kappa, q, g, p));
    EnergyBreakdown {
        ek: half * p.rho * g.dot_nodes_right(&u.z, &u.z),
        ep: half * p.alpha * g.dot_uniform(&dv, &dv),
        eb: half * p.mu * g.dot_uniform(&u.u1, &u.u1),
        eelec: half * (p.xi * p.eps3 * g.dot_uniform(&u.u2, &u.u2) + p.eps3 * g.dot_uniform(&u.u3, &u.u3)),
        em: half * g.dot_uniform(&u.w, &u.w) + hist,
        d: gen.dissipation(u),
    }
}

/// Implicit-midpoint stepper; the step matrix is factored once.
#[derive(Debug, Clone)]
pub struct Integrator<'a, T: Real> {
    gen: &'a GeneratorMatrix<T>,
    solver: ShiftedSolver<T>,
    shift: T,
    pub dt: T,
}

impl<'a, T: Real> Integrator<'a, T> {
    pub fn new(gen: &'a GeneratorMatrix<T>, dt: T) -> Result<Self, DynamicsError> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(DynamicsError::InvalidScenario(format!("dt must be positive, got {dt}")));
        }
        let shift = lit::<T>(2.0) / dt;
        let solver = ShiftedSolver::new(gen, shift, false).map_err(|e| match e {
            GeneratorError::SingularAt { .. } | GeneratorError::Solve(_) => DynamicsError::SolverSingular {
                config: format!("N={}, ages={}, dt={dt}, regime={}", gen.grid.n, gen.n_ages(), gen.regime),
            },
            other => other.into(),
        })?;
        Ok(Self { gen, solver, shift, dt })
    }

    /// `U_{n+1}` from `U_n`; history transport is part of the same solve.
    pub fn step(&self, u: &FirstOrderState<T>) -> Result<FirstOrderState<T>, DynamicsError> {
        let mut rhs = self.gen.apply(u)?;
        rhs.axpy(self.shift, u);
        Ok(self.solver.solve(&rhs)?)
    }
}

/// Everything a run needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: PhysicalParams<f64>,
    pub kernel: MemoryKernel<f64>,
    /// Interior nodes.
    pub n: usize,
    /// Age nodes including `s = 0`.
    pub n_ages: usize,
    pub s_max: Option<f64>,
    /// Age-grid cell ratio; `None` uses the default grading.
    pub grading: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub initial: InitialData,
    /// Keep every `record_every`-th step (the balance residual is still
    /// checked at every step).
    pub record_every: usize,
    /// Snapshot stride in steps; `None` stores no snapshots.
    pub snapshot_every: Option<usize>,
}

impl Scenario {
    /// All parameters 1, `m = ½`, exponential kernel `g₀ = 1`, `δ = 2`,
    /// `N = 200`, 64 age nodes, `dt = 10⁻³`, `T = 20`.
    pub fn default_scenario() -> Self {
        Self {
            params: PhysicalParams::unit().with_memory(0.5),
            kernel: MemoryKernel::exponential(1.0, 2.0).expect("valid kernel"),
            n: 200,
            n_ages: 64,
            s_max: None,
            grading: None,
            dt: 1e-3,
            t_end: 20.0,
            initial: InitialData::default(),
            record_every: 1,
            snapshot_every: None,
        }
    }

    pub fn generator(&self) -> Result<GeneratorMatrix<f64>, DynamicsError> {
        if self.n_ages < 2 {
            return Err(DynamicsError::InvalidScenario("at least two age nodes are needed".into()));
        }
        let s_max = self.s_max.unwrap_or_else(|| default_s_max(&self.kernel));
        let quad = match self.grading {
            Some(r) => build_quadrature_graded(&self.kernel, self.n_ages, s_max, r)?,
            None => build_quadrature(&self.kernel, self.n_ages, s_max)?,
        };
        let grid = SpatialGrid::new(self.params.length, self.n)?;
        Ok(assemble(&self.params, &grid, &quad))
    }
}

/// Per-record energy series of a run.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub energies: Vec<EnergyBreakdown<f64>>,
    /// `(E_{n+1} − E_n)/dt − (D_n + D_{n+1})/2` for the step that ended at
    /// the record; zero for the first record.
    pub residuals: Vec<f64>,
    /// Compatibility residual at each record.
    pub compatibility: Vec<f64>,
    /// Largest `(E_{n+1} − E_n)/E_0` over every step (not only records).
    pub max_increase: f64,
    /// Largest `|r_n|` over every step.
    pub max_residual: f64,
    pub snapshots: Vec<(f64, FirstOrderState<f64>)>,
    pub final_state: Option<FirstOrderState<f64>>,
}

impl Trajectory {
    pub fn totals(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e.total()).collect()
    }

    /// Writes the energy series; `comment` becomes the first `#` line.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: &str) -> io::Result<()> {
        writeln!(out, "# {comment}")?;
        writeln!(out, "t,Ek,Ep,EB,Eelec,Em,E,D,residual")?;
        for ((t, e), r) in self.times.iter().zip(&self.energies).zip(&self.residuals) {
            writeln!(
                out,
                "{t:.9e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e}",
                e.ek,
                e.ep,
                e.eb,
                e.eelec,
                e.em,
                e.total(),
                e.d,
                r
            )?;
        }
        Ok(())
    }
}

/// Runs `scenario` from its initial data.
pub fn simulate(scenario: &Scenario) -> Result<Trajectory, DynamicsError> {
    if !(scenario.t_end >= 0.0) || !scenario.t_end.is_finite() {
        return Err(DynamicsError::InvalidScenario(format!("T_end must be >= 0, got {}", scenario.t_end)));
    }
    let gen = scenario.generator()?;
    let u0 = scenario.initial.to_state(&gen);
    simulate_from(&gen, u0, scenario.dt, scenario.t_end, scenario.record_every, scenario.snapshot_every)
}

/// Runs from an explicit initial state on an assembled generator.
pub fn simulate_from(
    gen: &GeneratorMatrix<f64>,
    u0: FirstOrderState<f64>,
    dt: f64,
    t_end: f64,
    record_every: usize,
    snapshot_every: Option<usize>,
) -> Result<Trajectory, DynamicsError> {
    u0.check_conforms(&gen.grid)?;
    let stepper = Integrator::new(gen, dt)?;
    let steps = (t_end / dt).round() as usize;
    let record_every = record_every.max(1);
    let mut traj = Trajectory::default();
    let mut e_prev = energy(gen, &u0);
    let e0 = e_prev.total();
    let compat = |u: &FirstOrderState<f64>| compatibility_residual(u, &gen.params, &gen.grid);
    traj.times.push(0.0);
    traj.energies.push(e_prev);
    traj.residuals.push(0.0);
    traj.compatibility.push(compat(&u0));
    if snapshot_every.is_some() {
        traj.snapshots.push((0.0, u0.clone()));
    }
    let mut u = u0;
    for step in 1..=steps {
        let next = stepper.step(&u)?;
        let e = energy(gen, &next);
        let de = e.total() - e_prev.total();
        let r = de / dt - 0.5 * (e.d + e_prev.d);
        if !r.is_finite() {
            return Err(DynamicsError::SolverSingular { config: format!("non-finite state at step {step}") });
        }
        traj.max_residual = traj.max_residual.max(r.abs());
        if e0 > 0.0 {
            traj.max_increase = traj.max_increase.max(de / e0);
        }
        let t = step as f64 * dt;
        if step % record_every == 0 || step == steps {
            traj.times.push(t);
            traj.energies.push(e);
            traj.residuals.push(r);
            traj.compatibility.push(compat(&next));
        }
        if let Some(k) = snapshot_every {
            if k > 0 && step % k == 0 {
                traj.snapshots.push((t, next.clone()));
            }
        }
        e_prev = e;
        u = next;
    }
    traj.final_state = Some(u);
    Ok(traj)
}

/// Writes one CSV per field for a snapshot: `x,value` rows (history as
/// `x,s,re,im`).
pub fn write_snapshot(
    dir: &std::path::Path,
    index: usize,
    t: f64,
    u: &FirstOrderState<f64>,
    gen: &GeneratorMatrix<f64>,
    comment: &str,
) -> io::Result<()> {
    let g = &gen.grid;
    let nodes: Vec<f64> = (1..=g.n + 1).map(|i| g.node(i)).collect();
    let cells = g.cells();
    let fields: [(&str, &Vec<f64>, &[f64]); 6] = [
        ("v", &u.v, &nodes),
        ("z", &u.z, &nodes),
        ("u1", &u.u1, &nodes[..g.n]),
        ("u2", &u.u2, &nodes[..g.n]),
        ("u3", &u.u3, &cells),
        ("w", &u.w, &cells),
    ];
    for (name, vals, xs) in fields {
        let mut f = io::BufWriter::new(std::fs::File::create(dir.join(format!("snap_{index:04}_{name}.csv")))?);
        writeln!(f, "# {comment} t={t:e}")?;
        writeln!(f, "x,{name}")?;
        for (x, v) in xs.iter().zip(vals.iter()) {
            writeln!(f, "{x:e},{v:e}")?;
        }
    }
    if let Some(q) = &gen.quad {
        let mut f = io::BufWriter::new(std::fs::File::create(dir.join(format!("snap_{index:04}_kappa.csv")))?);
        writeln!(f, "# {comment} t={t:e}")?;
        u.kappa.write_csv(&mut f, g, q)?;
    }
    Ok(())
}

/// Serializable summary of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub e0: f64,
    pub e_final: f64,
    pub max_increase: f64,
    pub max_residual: f64,
    pub max_compatibility: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn summary(&self) -> RunSummary {
        let totals = self.totals();
        RunSummary {
            e0: totals.first().copied().unwrap_or(0.0),
            e_final: totals.last().copied().unwrap_or(0.0),
            max_increase: self.max_increase,
            max_residual: self.max_residual,
            max_compatibility: self.compatibility.iter().copied().fold(0.0, f64::max),
            steps: self.times.len().saturating_sub(1),
        }
    }
}

/// Relative energy-norm distance of two states.
pub fn relative_distance<T: Real>(gen: &GeneratorMatrix<T>, a: &FirstOrderState<T>, b: &FirstOrderState<T>) -> f64 {
    let mut d = a.clone();
    d.axpy(-T::one(), b);
    let num = gen.norm(&d).map(to_f64).unwrap_or(f64::NAN);
    let den = gen.norm(b).map(to_f64).unwrap_or(f64::NAN);
    num / den
}
