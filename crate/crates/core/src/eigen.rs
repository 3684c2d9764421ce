//! Symmetric tridiagonal eigensolver specialised to the low end of the
//! spectrum: Sturm counts, bisection, and inverse iteration for the ground
//! state. Also the closed-form path-graph spectra used as oracles.

use std::f64::consts::PI;

use crate::graph::TridiagonalOperator;
use crate::{Error, Result};

/// Default relative width of a bisection bracket.
pub const DEFAULT_REL_TOL: f64 = 1e-14;

/// Absolute floor for the bracket width criterion near zero.
const LAMBDA_FLOOR: f64 = 1e-300;

const MAX_SWEEPS: usize = 50;

/// Largest entrywise change between the last two inverse-iteration sweeps.
const STAGNATION: f64 = 1e-13;

/// Gaps below this many ulps of the spectral bound are not trusted.
const GAP_ULP_FACTOR: f64 = 1e3;

/// Distance from `x` to the next larger float.
pub fn ulp(x: f64) -> f64 {
    let x = x.abs();
    f64::from_bits(x.to_bits() + 1) - x
}

fn pivot_scale(op: &TridiagonalOperator) -> f64 {
    op.diag().iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0
}

fn sturm_count_raw(diag: &[f64], offdiag: &[f64], mu: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        d = if i == 0 { a - mu } else { (a - mu) - offdiag[i - 1] * offdiag[i - 1] / d };
        // An exact zero pivot means `mu` is an eigenvalue of the leading
        // block; a positive substitute keeps the count strict.
        if d == 0.0 {
            d = pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Number of eigenvalues of `op` strictly below `mu`.
pub fn sturm_count(op: &TridiagonalOperator, mu: f64) -> usize {
    sturm_count_raw(op.diag(), op.offdiag(), mu, f64::EPSILON * pivot_scale(op))
}

/// Certified bisection bracket: `count(lower) ≤ index < count(upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn gershgorin(op: &TridiagonalOperator) -> (f64, f64) {
    let (diag, off) = (op.diag(), op.offdiag());
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// Bisection bracket around the `index`-th smallest eigenvalue.
///
/// Stops once the width is at most `rel_tol · max(|λ|, 1e-300)` or the
/// bracket can no longer be split in floating point.
pub fn eigenvalue_bracket(op: &TridiagonalOperator, index: usize, rel_tol: f64) -> Result<Bracket> {
    let n = op.len();
    if index >= n {
        return Err(Error::IndexOutOfRange { index, n });
    }
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::InvalidTolerance(rel_tol));
    }
    let scale = pivot_scale(op);
    let pivmin = f64::EPSILON * scale;
    let count = |mu: f64| sturm_count_raw(op.diag(), op.offdiag(), mu, pivmin);

    let (mut lo, mut hi) = gershgorin(op);
    let mut step = 4.0 * pivmin;
    while count(lo) > index {
        lo -= step;
        step *= 2.0;
    }
    let mut step = 4.0 * pivmin;
    hi += step;
    while count(hi) <= index {
        step *= 2.0;
        hi += step;
    }

    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * mid.abs().max(LAMBDA_FLOOR) {
            break;
        }
        if count(mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Bracket { lower: lo, upper: hi })
}

/// The `index`-th smallest eigenvalue (midpoint of the final bracket).
pub fn eigenvalue(op: &TridiagonalOperator, index: usize, rel_tol: f64) -> Result<f64> {
    eigenvalue_bracket(op, index, rel_tol).map(|b| b.midpoint())
}

/// Positive normalized ground state with its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub bracket: Bracket,
    /// Entries in site order `-k..=k`.
    pub vector: Vec<f64>,
    /// `‖H φ − λ₀ φ‖₂`.
    pub residual: f64,
    pub sweeps: usize,
}

/// Residual tolerance used when none is given: `1e-11 · (4 + max α_j)`.
pub fn default_residual_tol(op: &TridiagonalOperator) -> f64 {
    1e-11 * op.norm_bound()
}

/// LDLᵀ pivots of `op − σ`, or `None` if any pivot is not safely positive.
fn positive_pivots(op: &TridiagonalOperator, sigma: f64) -> Option<Vec<f64>> {
    let (diag, off) = (op.diag(), op.offdiag());
    let floor = f64::MIN_POSITIVE.sqrt();
    let mut pivots = Vec::with_capacity(diag.len());
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        d = if i == 0 { a - sigma } else { (a - sigma) - off[i - 1] * off[i - 1] / d };
        if d.is_nan() || d <= floor {
            return None;
        }
        pivots.push(d);
    }
    Some(pivots)
}

/// Solves `(op − σ) x = b` from precomputed pivots.
fn ldl_solve(off: &[f64], pivots: &[f64], b: &[f64]) -> Vec<f64> {
    let n = pivots.len();
    let mut y = b.to_vec();
    for i in 1..n {
        y[i] -= off[i - 1] / pivots[i - 1] * y[i - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = y[n - 1] / pivots[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (y[i] - off[i] * x[i + 1]) / pivots[i];
    }
    x
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    norm
}

fn residual(op: &TridiagonalOperator, v: &[f64], lambda: f64) -> f64 {
    let hv = op.apply(v).expect("length checked");
    hv.iter().zip(v).map(|(h, x)| (h - lambda * x).powi(2)).sum::<f64>().sqrt()
}

/// Ground state by inverse iteration.
///
/// The shift is the lower end of the bisection bracket for `λ₀`, where the
/// Sturm count is zero, so `H − σ` is positive definite and its inverse is
/// entrywise positive. If a pivot is not safely positive the shift is moved
/// down by a growing multiple of `ε · scale`. Starting from the all-ones
/// vector, sweeps continue until the residual is below `tol` and the
/// iterate has stopped moving.
pub fn ground_state(op: &TridiagonalOperator, tol: f64) -> Result<GroundState> {
    ground_state_with(op, tol, DEFAULT_REL_TOL)
}

pub fn ground_state_with(op: &TridiagonalOperator, tol: f64, rel_tol: f64) -> Result<GroundState> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let bracket = eigenvalue_bracket(op, 0, rel_tol)?;
    let energy = bracket.midpoint();
    let scale = pivot_scale(op);

    let mut sigma = bracket.lower;
    let mut nudge = 2.0 * f64::EPSILON * scale;
    let pivots = loop {
        if let Some(p) = positive_pivots(op, sigma) {
            break p;
        }
        sigma -= nudge;
        nudge *= 2.0;
    };

    let n = op.len();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut last_residual = f64::INFINITY;
    for sweep in 1..=MAX_SWEEPS {
        let mut next = ldl_solve(op.offdiag(), &pivots, &v);
        normalize(&mut next);
        if next.iter().sum::<f64>() < 0.0 {
            next.iter_mut().for_each(|x| *x = -*x);
        }
        let change = next.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        v = next;
        last_residual = residual(op, &v, energy);
        if last_residual <= tol && change <= STAGNATION && sweep >= 2 {
            for (i, &x) in v.iter().enumerate() {
                if x < -1e-14 {
                    return Err(Error::PositivityViolated { site: op.graph().site_of(i), value: x });
                }
            }
            return Ok(GroundState { energy, bracket, vector: v, residual: last_residual, sweeps: sweep });
        }
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS, residual: last_residual })
}

/// The two lowest eigenvalues, the gap and the ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub lambda0: f64,
    pub lambda1: f64,
    pub gap: f64,
    pub ground_state: Vec<f64>,
    /// Residual of the ground state.
    pub residual: f64,
    /// Set when the gap is too small to be resolved in double precision.
    pub precision_limited: bool,
}

pub fn spectrum_low(op: &TridiagonalOperator) -> Result<SpectralResult> {
    spectrum_low_with(op, DEFAULT_REL_TOL, default_residual_tol(op))
}

pub fn spectrum_low_with(op: &TridiagonalOperator, rel_tol: f64, tol: f64) -> Result<SpectralResult> {
    let gs = ground_state_with(op, tol, rel_tol)?;
    let b1 = eigenvalue_bracket(op, 1, rel_tol)?;
    let lambda0 = gs.energy;
    let lambda1 = b1.midpoint();
    let gap = lambda1 - lambda0;
    let precision_limited = gap < GAP_ULP_FACTOR * ulp(op.norm_bound()) || gs.bracket.upper >= b1.lower;
    Ok(SpectralResult { lambda0, lambda1, gap, ground_state: gs.vector, residual: gs.residual, precision_limited })
}

/// `2 − 2 cos(π / |V_m|)`, the lowest eigenvalue of `L_m` with a Dirichlet
/// condition at the origin. Evaluated as `4 sin²(π / (2|V_m|))`.
pub fn dirichlet_ground_energy(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidDirichletSize(m));
    }
    let s = (PI / (2.0 * (2 * m + 1) as f64)).sin();
    Ok(4.0 * s * s)
}

/// Full spectrum of the free Laplacian on `V_k`, ascending:
/// `2 − 2 cos(π j / |V_k|)`, `j = 0, …, 2k`.
pub fn free_spectrum(k: usize) -> Vec<f64> {
    let n = 2 * k + 1;
    (0..n)
        .map(|j| {
            let s = (PI * j as f64 / (2 * n) as f64).sin();
            4.0 * s * s
        })
        .collect()
}
