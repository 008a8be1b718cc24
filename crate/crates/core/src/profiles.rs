//! Contractive-function scans, Markovian mimicry of monotone profiles by
//! depolarizing steps, and negativity-monotonicity trials.

use rand::Rng;

use crate::divisibility::{DecomposableMap, LinearMap};
use crate::dynamics::{enm_channel, EnmParams, PauliChannel};
use crate::error::{Error, Result};
use crate::numerics::{trace_norm, ComplexMatrix};
use crate::random::{random_pauli_channel, random_state};
use crate::states::{negativity, ContractiveFunction, DensityMatrix, HermitianUnitTrace, Operator};
use crate::witness::{TripartiteState, TRIPARTITE_DIMS};

/// Per-step tolerance when asserting monotone behaviour.
pub const MONOTONE_TOL: f64 = 1e-10;
/// Largest accepted gap between a matched value and its target.
pub const MATCH_TOL: f64 = 1e-8;
const BISECTION_WIDTH: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 80;
/// Targets this close to the current value or the floor take the endpoint
/// rate exactly, so roundoff between formulas does not perturb `a_i`.
const SNAP_TOL: f64 = 1e-12;

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidArgument("grid times must be finite and >= 0".into()));
    }
    if let Some(k) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("grid not strictly ascending at index {}", k + 1)));
    }
    Ok(())
}

/// `f` on two Hermitian unit-trace operators. Only the trace distance is
/// defined when the inputs fail to be states.
fn evaluate_operators(f: ContractiveFunction, a: ComplexMatrix, b: ComplexMatrix) -> Result<f64> {
    if f == ContractiveFunction::TraceDistance {
        return Ok(0.5 * trace_norm(&(&a - &b))?);
    }
    f.evaluate(&DensityMatrix::from_matrix(a)?, &DensityMatrix::from_matrix(b)?)
}

/// `f(Λ_t[ρ], Λ_t[σ])` along `grid` for the family `t -> Λ_t`.
pub fn contractive_scan_family(
    f: ContractiveFunction,
    channel_at: impl Fn(f64) -> Result<PauliChannel>,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    grid: &[f64],
) -> Result<Vec<f64>> {
    check_grid(grid)?;
    grid.iter()
        .map(|&t| {
            let ch = channel_at(t)?;
            evaluate_operators(f, ch.apply(rho.matrix())?, ch.apply(sigma.matrix())?)
        })
        .collect()
}

/// `f(Λ_t[ρ], Λ_t[σ])` along `grid` for ENM dynamics.
pub fn contractive_scan(
    f: ContractiveFunction,
    p: EnmParams,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    grid: &[f64],
) -> Result<Vec<f64>> {
    contractive_scan_family(f, |t| enm_channel(p, t), rho, sigma, grid)
}

/// Largest step-to-step increase of `series` (0 when it never increases).
/// Equal infinities count as no change.
pub fn max_increase(series: &[f64]) -> f64 {
    series
        .windows(2)
        .map(|w| if w[0] == w[1] { 0.0 } else { w[1] - w[0] })
        .fold(0.0, f64::max)
}

/// `W[ρ] = a^{dt} ρ + (1 - a^{dt}) Tr(ρ) 1/d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepolarizingStep {
    pub a: f64,
    pub dt: f64,
    pub d: usize,
}

impl DepolarizingStep {
    pub fn new(a: f64, dt: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidArgument(format!("a = {a} outside [0, 1]")));
        }
        if !(dt >= 0.0 && dt.is_finite()) || d == 0 {
            return Err(Error::InvalidArgument(format!("invalid step dt = {dt}, d = {d}")));
        }
        Ok(Self { a, dt, d })
    }

    /// Weight `a^{dt}` kept on the input.
    pub fn q(&self) -> f64 {
        self.a.powf(self.dt)
    }
}

pub fn depolarizing_step(a: f64, dt: f64, d: usize) -> Result<DepolarizingStep> {
    DepolarizingStep::new(a, dt, d)
}

fn depolarize(m: &ComplexMatrix, q: f64) -> ComplexMatrix {
    let d = m.rows();
    let tr = m.trace();
    let mut out = m.scale(q);
    for i in 0..d {
        out[(i, i)] += tr * ((1.0 - q) / d as f64);
    }
    out
}

impl LinearMap for DepolarizingStep {
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.d || m.cols() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "depolarizing step on dimension {} applied to {}x{}",
                self.d,
                m.rows(),
                m.cols()
            )));
        }
        Ok(depolarize(m, self.q()))
    }
}

/// A depolarizing family reproducing a monotone profile on a time grid.
///
/// Entry `i` of `a` is the rate of the step `t_{i-1} -> t_i`; `a[0] = 1`
/// since nothing happens before the first grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileMatch {
    pub times: Vec<f64>,
    pub targets: Vec<f64>,
    pub a: Vec<f64>,
    pub achieved: Vec<f64>,
    /// Points whose target lies outside the reachable range.
    pub infeasible: Vec<bool>,
}

impl ProfileMatch {
    pub fn max_error(&self) -> f64 {
        self.achieved
            .iter()
            .zip(&self.targets)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_matched(&self) -> bool {
        !self.infeasible.iter().any(|&b| b) && self.max_error() <= MATCH_TOL
    }

    pub fn first_infeasible(&self) -> Option<usize> {
        self.infeasible.iter().position(|&b| b)
    }
}

fn check_profile(times: &[f64], targets: &[f64]) -> Result<()> {
    check_grid(times)?;
    if times.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} times but {} targets",
            times.len(),
            targets.len()
        )));
    }
    if let Some(k) = targets.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("target {k} is not finite")));
    }
    if let Some(k) = targets.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::NonMonotoneProfile { index: k + 1 });
    }
    Ok(())
}

/// Shared driver: `value(state, q)` is non-decreasing in `q` and
/// `value(state, 1)` is the current value; `advance(state, q)` applies the step.
fn match_generic<S>(
    times: &[f64],
    targets: &[f64],
    initial: S,
    value: impl Fn(&S, f64) -> Result<f64>,
    advance: impl Fn(&S, f64) -> Result<S>,
) -> Result<ProfileMatch> {
    check_profile(times, targets)?;
    let start = value(&initial, 1.0)?;
    if (start - targets[0]).abs() > MATCH_TOL {
        return Err(Error::InvalidArgument(format!(
            "first target {} differs from the initial value {start}",
            targets[0]
        )));
    }
    let n = times.len();
    let mut a = vec![1.0; n];
    let mut achieved = vec![start; n];
    let mut infeasible = vec![false; n];
    let mut state = initial;
    for i in 1..n {
        let target = targets[i];
        let top = value(&state, 1.0)?;
        let floor = value(&state, 0.0)?;
        let q = if target >= top - SNAP_TOL {
            infeasible[i] = target - top > MATCH_TOL;
            1.0
        } else if target <= floor + SNAP_TOL {
            infeasible[i] = floor - target > MATCH_TOL;
            0.0
        } else {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..BISECTION_MAX_ITER {
                if hi - lo <= BISECTION_WIDTH {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if value(&state, mid)? < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        a[i] = q.powf(1.0 / (times[i] - times[i - 1]));
        state = advance(&state, q)?;
        achieved[i] = value(&state, 1.0)?;
    }
    Ok(ProfileMatch {
        times: times.to_vec(),
        targets: targets.to_vec(),
        a,
        achieved,
        infeasible,
    })
}

/// Finds depolarizing rates `a_i` so that `f(W[ρ0], W[σ0])` follows `targets`.
pub fn match_profile(
    times: &[f64],
    targets: &[f64],
    f: ContractiveFunction,
    rho0: &DensityMatrix,
    sigma0: &DensityMatrix,
) -> Result<ProfileMatch> {
    if rho0.dim() != sigma0.dim() {
        return Err(Error::DimensionMismatch("initial states differ in dimension".into()));
    }
    let initial = (rho0.matrix().clone(), sigma0.matrix().clone());
    match_generic(
        times,
        targets,
        initial,
        |(r, s), q| evaluate_operators(f, depolarize(r, q), depolarize(s, q)),
        |(r, s), q| Ok((depolarize(r, q), depolarize(s, q))),
    )
}

/// Finds rates of a local depolarizing family on `A` so that `E^{AB|C}`
/// follows `targets`.
pub fn match_entanglement_profile(times: &[f64], targets: &[f64], rho0: &TripartiteState) -> Result<ProfileMatch> {
    let on_a = |m: &ComplexMatrix, q: f64| crate::numerics::apply_local(m, &TRIPARTITE_DIMS, 0, |b| Ok(depolarize(b, q)));
    let neg = |m: ComplexMatrix| negativity(&HermitianUnitTrace::new(m, TRIPARTITE_DIMS.to_vec())?, 3);
    match_generic(
        times,
        targets,
        rho0.matrix().clone(),
        |m, q| neg(on_a(m, q)?),
        |m, q| on_a(m, q),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub trials: usize,
    /// Largest observed `E(after) - E(before)`; non-positive means no increase.
    pub max_violation: f64,
}

impl MonotonicityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

fn two_qubit_negativity(m: ComplexMatrix) -> Result<f64> {
    negativity(&HermitianUnitTrace::new(m, vec![2, 2])?, 1)
}

/// Random two-qubit state; the ancilla size cycles so pure and mixed states both appear.
fn trial_state<R: Rng + ?Sized>(rng: &mut R, k: usize) -> DensityMatrix {
    random_state(rng, &[2, 2], 1 + k % 4)
}

/// `E^{A|B}` before and after `p (E1⊗1)[ρ] + (1-p)(E2⊗1)[ρ^{T_A}]` for random
/// states, probabilities and Pauli channels.
pub fn positive_map_monotonicity_trial<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Result<MonotonicityReport> {
    let mut max_violation = f64::NEG_INFINITY;
    for k in 0..count {
        let rho = trial_state(rng, k);
        let p: f64 = rng.gen();
        let map = DecomposableMap::new(p, random_pauli_channel(rng), random_pauli_channel(rng))?;
        let before = negativity(&rho, 1)?;
        let after = two_qubit_negativity(map.apply_local(rho.matrix(), &[2, 2], 0)?)?;
        max_violation = max_violation.max(after - before);
    }
    Ok(MonotonicityReport { trials: count, max_violation })
}

/// Largest step-to-step increase of `E^{A|B}(Λ_t ⊗ 1 [ρ])` along `grid` for
/// random two-qubit states under ENM dynamics.
pub fn enm_monotonicity_trial<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    p: EnmParams,
    grid: &[f64],
) -> Result<MonotonicityReport> {
    check_grid(grid)?;
    let channels: Vec<PauliChannel> = grid.iter().map(|&t| enm_channel(p, t)).collect::<Result<_>>()?;
    let mut max_violation = f64::NEG_INFINITY;
    for k in 0..count {
        let rho = trial_state(rng, k);
        let series: Vec<f64> = channels
            .iter()
            .map(|ch| two_qubit_negativity(ch.apply_local(rho.matrix(), &[2, 2], 0)?))
            .collect::<Result<_>>()?;
        let worst = series.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        max_violation = max_violation.max(worst);
    }
    Ok(MonotonicityReport { trials: count, max_violation })
}
