//! Direct solver for `(ζI − A_h) x = g` and its transpose.
//!
//! Age transport acts pointwise in `x`, so the history block is eliminated
//! exactly: `κ = Y + p ⊗ w` (or `p ⊗ Lw` for the transpose), where `p`
//! solves a bidiagonal system in the age index. What remains is the field
//! block with `−βL` added to the `w–w` coupling, factored once by a banded
//! LU in an interleaved ordering that keeps every stencil within a few
//! diagonals.

use num_traits::One;

use crate::grid::SpatialGrid;
use crate::linalg::{BandLu, SolveError};
use crate::scalar::Scalar;
use crate::state::{FirstOrderState, Layout};

use super::{laplacian_row, GeneratorError, GeneratorMatrix};

#[derive(Debug, Clone)]
pub struct ShiftedSolver<S: Scalar> {
    lu: BandLu<S>,
    /// Field index to band position.
    pos: Vec<usize>,
    layout: Layout,
    grid: SpatialGrid<S::Real>,
    shift: S,
    transpose: bool,
    /// `1/Δ_j`.
    inv_spacing: Vec<S::Real>,
    /// `dm W_j`.
    weights: Vec<S::Real>,
    p: Vec<S>,
}

fn interleaved_positions(lay: &Layout) -> Vec<usize> {
    let n = lay.n;
    let mut pos = vec![0; lay.field_len()];
    let mut next = 0;
    let mut put = |idx: usize| {
        pos[idx] = next;
        next += 1;
    };
    for p in 0..=n {
        put(lay.v() + p);
        put(lay.z() + p);
        put(lay.u3() + p);
        put(lay.w() + p);
        if p < n {
            put(lay.u1() + p);
            put(lay.u2() + p);
        }
    }
    pos
}

impl<S: Scalar> ShiftedSolver<S> {
    /// Factors `ζI − A_h`, or `ζI − A_hᵀ` when `transpose` is set.
    pub fn new(gen: &GeneratorMatrix<S::Real>, shift: S, transpose: bool) -> Result<Self, GeneratorError> {
        Self::build(gen, shift, transpose, false)
    }

    /// Factors `ζI − A_h` with every `u³` row replaced by the discrete
    /// compatibility row `ξ Du² − u³ + (γ/ε₃) Dv = g_{u³}`.
    pub fn constrained(gen: &GeneratorMatrix<S::Real>, shift: S) -> Result<Self, GeneratorError> {
        Self::build(gen, shift, false, true)
    }

    fn build(
        gen: &GeneratorMatrix<S::Real>,
        shift: S,
        transpose: bool,
        constrained: bool,
    ) -> Result<Self, GeneratorError> {
        let lay = gen.layout;
        let n = lay.n;
        let prm = &gen.params;
        let (inv_spacing, weights): (Vec<S::Real>, Vec<S::Real>) = match &gen.quad {
            Some(q) => (0..q.n_ages())
                .map(|j| (S::Real::one() / q.spacing(j), prm.d * prm.m * q.w(j)))
                .unzip(),
            None => (Vec::new(), Vec::new()),
        };
        let na = inv_spacing.len();
        let mut p = vec![S::zero(); na];
        let mut beta = S::zero();
        if transpose {
            for j in (0..na).rev() {
                let next = if j + 1 < na { p[j + 1].scale(inv_spacing[j + 1]) } else { S::zero() };
                p[j] = (S::from_real(weights[j]) + next) / (shift + S::from_real(inv_spacing[j]));
                beta += p[j];
            }
        } else {
            for j in 0..na {
                let prev = if j > 0 { p[j - 1].scale(inv_spacing[j]) } else { S::zero() };
                p[j] = (S::one() + prev) / (shift + S::from_real(inv_spacing[j]));
                beta += p[j].scale(weights[j]);
            }
        }

        let mut trip: Vec<(usize, usize, S)> = Vec::with_capacity(gen.field_matrix().nnz() + 6 * (n + 1));
        let skip_u3 = |r: usize| constrained && r >= lay.u3() && r < lay.w();
        for (r, c, v) in gen.field_matrix().triplets() {
            let (r, c) = if transpose { (c, r) } else { (r, c) };
            if !skip_u3(r) {
                trip.push((r, c, S::from_real(-v)));
            }
        }
        for r in 0..lay.field_len() {
            if !skip_u3(r) {
                trip.push((r, r, shift));
            }
        }
        if na > 0 {
            for k in 0..=n {
                for (c, v) in laplacian_row(&gen.grid, k) {
                    trip.push((lay.w() + k, lay.w() + c, -beta.scale(v)));
                }
            }
        }
        if constrained {
            let inv_h = S::Real::one() / gen.grid.h;
            let ge = prm.gamma / prm.eps3 * inv_h;
            let xh = prm.xi * inv_h;
            for k in 0..=n {
                let r = lay.u3() + k;
                trip.push((r, r, -S::one()));
                trip.push((r, lay.v() + k, S::from_real(ge)));
                if k >= 1 {
                    trip.push((r, lay.v() + k - 1, S::from_real(-ge)));
                    trip.push((r, lay.u2() + k - 1, S::from_real(-xh)));
                }
                if k < n {
                    trip.push((r, lay.u2() + k, S::from_real(xh)));
                }
            }
        }

        let pos = interleaved_positions(&lay);
        let (mut kl, mut ku) = (0, 0);
        for &(r, c, _) in &trip {
            let (pr, pc) = (pos[r], pos[c]);
            kl = kl.max(pr.saturating_sub(pc));
            ku = ku.max(pc.saturating_sub(pr));
        }
        let mut lu = BandLu::zeros(lay.field_len(), kl, ku);
        for (r, c, v) in trip {
            lu.add(pos[r], pos[c], v)?;
        }
        let lu = lu.factor().map_err(|e| match e {
            SolveError::Singular { .. } => GeneratorError::SingularAt {
                lambda: crate::scalar::to_f64(shift.im()),
            },
            other => GeneratorError::Solve(other),
        })?;
        Ok(Self { lu, pos, layout: lay, grid: gen.grid, shift, transpose, inv_spacing, weights, p })
    }

    pub fn shift(&self) -> S {
        self.shift
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn solve(&self, g: &FirstOrderState<S>) -> Result<FirstOrderState<S>, GeneratorError> {
        g.check_conforms(&self.grid)?;
        let lay = self.layout;
        let n = lay.n;
        let na = self.inv_spacing.len();
        if g.kappa.n_ages() != na {
            return Err(GeneratorError::AgeMismatch { expected: na, got: g.kappa.n_ages() });
        }
        let nc = n + 1;
        let mut y = g.kappa.clone();
        let mut extra = vec![S::zero(); nc];
        let vals = y.values_mut();
        if self.transpose {
            for j in (0..na).rev() {
                let den = self.shift + S::from_real(self.inv_spacing[j]);
                for k in 0..nc {
                    let next = if j + 1 < na { vals[(j + 1) * nc + k].scale(self.inv_spacing[j + 1]) } else { S::zero() };
                    vals[j * nc + k] = (vals[j * nc + k] + next) / den;
                    extra[k] += vals[j * nc + k];
                }
            }
        } else {
            let mut acc = vec![S::zero(); nc];
            for j in 0..na {
                let den = self.shift + S::from_real(self.inv_spacing[j]);
                for k in 0..nc {
                    let prev = if j > 0 { vals[(j - 1) * nc + k].scale(self.inv_spacing[j]) } else { S::zero() };
                    vals[j * nc + k] = (vals[j * nc + k] + prev) / den;
                    acc[k] += vals[j * nc + k].scale(self.weights[j]);
                }
            }
            if na > 0 {
                let mut scratch = vec![S::zero(); n + 2];
                self.grid.cell_laplacian(&acc, &mut scratch, &mut extra);
            }
        }

        let flat = g.flatten();
        let mut b = vec![S::zero(); lay.field_len()];
        for (i, v) in flat[..lay.field_len()].iter().enumerate() {
            b[self.pos[i]] = *v;
        }
        if na > 0 {
            for k in 0..nc {
                b[self.pos[lay.w() + k]] += extra[k];
            }
        }
        self.lu.solve(&mut b)?;
        let mut out = flat;
        for i in 0..lay.field_len() {
            out[i] = b[self.pos[i]];
        }
        let w = &out[lay.w()..lay.w() + nc];
        let drive = if self.transpose && na > 0 {
            let mut scratch = vec![S::zero(); n + 2];
            let mut lw = vec![S::zero(); nc];
            self.grid.cell_laplacian(w, &mut scratch, &mut lw);
            lw
        } else {
            w.to_vec()
        };
        let kv = y.values();
        for j in 0..na {
            for k in 0..nc {
                out[lay.kappa() + j * nc + k] = kv[j * nc + k] + self.p[j] * drive[k];
            }
        }
        Ok(FirstOrderState::from_flat(lay, &out)?)
    }
}
