//! The negativity witness for ENM dynamics.
//!
//! Two qubit–qutrit states `ρ1`, `ρ2` are pulled back through `Λ_{t*}^{-1}`
//! so that they become distinguishable exactly when CP-divisibility fails at
//! `t*`. They are then hidden in the tripartite state
//! `ρ^{ABC} = ½(ρ1 ⊗ Ψ+ + ρ2 ⊗ Ψ-)` whose `AB|C` negativity
//! is `¼ ||Λ_t ⊗ 1 [ρ1 - ρ2]||_1`.
//!
//! Tensor factors are ordered `(A, B1, B2, C)` with dimensions `(2, 3, 2, 2)`.

use crate::dynamics::{enm_channel, enm_inverse, EnmParams};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, kron, partial_trace, re, trace_norm, ComplexMatrix};
use crate::states::{binary_entropy, negativity, von_neumann_entropy, BellState, DensityMatrix, Operator};

/// Dimensions of `A ⊗ B1`.
pub const PAIR_DIMS: [usize; 2] = [2, 3];
/// Dimensions of `A ⊗ B1 ⊗ B2 ⊗ C`.
pub const TRIPARTITE_DIMS: [usize; 4] = [2, 3, 2, 2];

/// Step for one-sided finite differences at the kink.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone, Debug)]
pub struct WitnessScenario {
    pub params: EnmParams,
    pub t_star: f64,
    pub lambda_star: f64,
    /// `Λ_{t*}^{-1} ⊗ 1 [(1-λ*) 1/6 + λ* Φ+]`.
    pub rho1: DensityMatrix,
    /// `Λ_{t*}^{-1} ⊗ 1 [(1-λ*) 1/6 + λ* |0><0| ⊗ |2><2|]`.
    pub rho2: DensityMatrix,
    /// Off-diagonal scale of `ρ1`: its `(0, 4)` entry is `(1 + 2λ*) / (2χ^α)`.
    pub chi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegativityMethod {
    /// Partial transpose of the full 24x24 state over `C`.
    Full,
    /// `½ ||Λ_t ⊗ 1 [(ρ1 - ρ2)/2]||_1` on 6x6 matrices.
    Shortcut,
}

/// `λ* = 1 / (3 e^{2αct*} - 2)`.
pub fn lambda_star(p: EnmParams, t_star: f64) -> f64 {
    1.0 / (3.0 * (2.0 * p.alpha * p.c * t_star).exp() - 2.0)
}

/// `χ = ½ [((1 + 2λ)/λ)^{1/α} + 3^{1/α}]`.
pub fn chi(alpha: f64, lambda: f64) -> f64 {
    0.5 * (((1.0 + 2.0 * lambda) / lambda).powf(1.0 / alpha) + 3f64.powf(1.0 / alpha))
}

fn target_terms() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let noise = ComplexMatrix::identity(6).scale(1.0 / 6.0);
    let mut phi = ComplexMatrix::zeros(6, 6);
    for &i in &[0, 4] {
        for &j in &[0, 4] {
            phi[(i, j)] = re(0.5);
        }
    }
    let mut zero_two = ComplexMatrix::zeros(6, 6);
    zero_two[(2, 2)] = re(1.0);
    (noise, phi, zero_two)
}

/// The target pair `(ρ1'(λ), ρ2'(λ))` on qubit ⊗ qutrit.
pub fn target_pair(lambda: f64) -> (ComplexMatrix, ComplexMatrix) {
    let (noise, phi, zero_two) = target_terms();
    let noise = noise.scale(1.0 - lambda);
    (&noise + &phi.scale(lambda), &noise + &zero_two.scale(lambda))
}

/// `(Λ_{t*}^{-1} ⊗ 1)` applied to both target operators.
///
/// The noise and signal terms are pulled back separately: `λ*` can be far
/// below the resolution of the mixed entries, and `Λ^{-1}` amplifies their
/// differences by `e^{2αct*}`.
pub fn pulled_back_pair(p: EnmParams, t_star: f64, lambda: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let inv = enm_inverse(p, t_star)?;
    let pull = |m: &ComplexMatrix| inv.apply_local(m, &PAIR_DIMS, 0);
    let (noise, phi, zero_two) = target_terms();
    let noise = pull(&noise)?.scale(1.0 - lambda);
    Ok((
        &noise + &pull(&phi)?.scale(lambda),
        &noise + &pull(&zero_two)?.scale(lambda),
    ))
}

/// Smallest eigenvalue over both pulled-back operators.
pub fn pullback_min_eigenvalue(p: EnmParams, t_star: f64, lambda: f64) -> Result<f64> {
    let (a, b) = pulled_back_pair(p, t_star, lambda)?;
    let ma = hermitian_eigenvalues(&a)?[0];
    let mb = hermitian_eigenvalues(&b)?[0];
    Ok(ma.min(mb))
}

/// Largest `λ ∈ (0, 1]` whose pull-backs are positive, by bisection on the
/// eigenvalue predicate. Independent of the closed form for `λ*`.
pub fn lambda_star_scan(p: EnmParams, t_star: f64, iterations: usize) -> Result<f64> {
    let ok = |l: f64| pullback_min_eigenvalue(p, t_star, l).map(|m| m >= 0.0);
    if ok(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

pub fn build_scenario(p: EnmParams, t_star: f64) -> Result<WitnessScenario> {
    if !(t_star > 0.0 && t_star.is_finite()) {
        return Err(Error::InvalidArgument(format!("t* = {t_star} must be positive")));
    }
    let lambda_star = lambda_star(p, t_star);
    if !(lambda_star > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "λ* underflows at α = {}, c = {}, t* = {t_star}",
            p.alpha, p.c
        )));
    }
    let (a, b) = pulled_back_pair(p, t_star, lambda_star)?;
    Ok(WitnessScenario {
        params: p,
        t_star,
        lambda_star,
        rho1: DensityMatrix::new(a, PAIR_DIMS.to_vec())?,
        rho2: DensityMatrix::new(b, PAIR_DIMS.to_vec())?,
        chi: chi(p.alpha, lambda_star),
    })
}

impl WitnessScenario {
    /// `(Λ_t ⊗ 1)[ρ1 - ρ2]`.
    pub fn evolved_difference(&self, t: f64) -> Result<ComplexMatrix> {
        let diff = self.rho1.matrix() - self.rho2.matrix();
        enm_channel(self.params, t)?.apply_local(&diff, &PAIR_DIMS, 0)
    }

    /// `||Λ_t ⊗ 1 [ρ1 - ρ2]||_1`, computed numerically.
    pub fn trace_norm_difference(&self, t: f64) -> Result<f64> {
        trace_norm(&self.evolved_difference(t)?)
    }
}

/// Tripartite state on `(A, B1, B2, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteState {
    state: DensityMatrix,
}

impl TripartiteState {
    /// `p1 ρ1 ⊗ Ψ+ + (1 - p1) ρ2 ⊗ Ψ-`.
    pub fn from_components(rho1: &DensityMatrix, rho2: &DensityMatrix, p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::InvalidArgument(format!("p1 = {p1} is not a probability")));
        }
        for r in [rho1, rho2] {
            if r.dims() != PAIR_DIMS {
                return Err(Error::DimensionMismatch(format!(
                    "components must live on {PAIR_DIMS:?}, got {:?}",
                    r.dims()
                )));
            }
        }
        let m = &kron(rho1.matrix(), &BellState::PsiPlus.projector()).scale(p1)
            + &kron(rho2.matrix(), &BellState::PsiMinus.projector()).scale(1.0 - p1);
        Ok(Self {
            state: DensityMatrix::new(m, TRIPARTITE_DIMS.to_vec())?,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// `E^{AB|C}`: `C` is the last factor.
    pub fn negativity_ab_c(&self) -> Result<f64> {
        negativity(&self.state, 3)
    }
}

impl Operator for TripartiteState {
    fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    fn dims(&self) -> &[usize] {
        self.state.dims()
    }
}

pub fn tripartite_initial(s: &WitnessScenario) -> TripartiteState {
    TripartiteState::from_components(&s.rho1, &s.rho2, 0.5).expect("scenario states are valid")
}

/// `τ_t = Λ_t^A ⊗ 1^{BC} [ρ^{ABC}]`.
pub fn evolve(s: &WitnessScenario, t: f64) -> Result<TripartiteState> {
    let initial = tripartite_initial(s);
    let m = enm_channel(s.params, t)?.apply_local(initial.matrix(), &TRIPARTITE_DIMS, 0)?;
    Ok(TripartiteState {
        state: DensityMatrix::new(m, TRIPARTITE_DIMS.to_vec())?,
    })
}

pub fn witness_negativity(s: &WitnessScenario, t: f64, method: NegativityMethod) -> Result<f64> {
    match method {
        NegativityMethod::Full => evolve(s, t)?.negativity_ab_c(),
        NegativityMethod::Shortcut => Ok(0.25 * s.trace_norm_difference(t)?),
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `R(t, t*) = (cosh(ct)/cosh(ct*))^α / cosh(αc(t - t*))`, evaluated in log space.
pub fn r_function(p: EnmParams, t: f64, t_star: f64) -> f64 {
    let c = p.c;
    (p.alpha * (ln_cosh(c * t) - ln_cosh(c * t_star)) - ln_cosh(p.alpha * c * (t - t_star))).exp()
}

/// The root `t↑ > t*` of `R(t, t*) = 1` in `(t*, 50/c]`, if any.
pub fn t_up(p: EnmParams, t_star: f64) -> Option<f64> {
    let t_max = 50.0 / p.c;
    if t_max <= t_star {
        return None;
    }
    let span = t_max - t_star;
    let g = |t: f64| r_function(p, t, t_star) - 1.0;
    let mut offsets: Vec<f64> = (0..=120).map(|k| span * 10f64.powf(-12.0 + 12.0 * k as f64 / 120.0)).collect();
    offsets.extend((1..=4000).map(|k| span * k as f64 / 4000.0));
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();

    let mut prev: Option<f64> = None;
    for h in offsets {
        let t = t_star + h;
        if g(t) <= 0.0 {
            let mut lo = prev?;
            let mut hi = t;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = Some(t);
    }
    None
}

/// Closed-form `||ρ1(t) - ρ2(t)||_1` (three branches, split at `t*` and `t↑`).
pub fn analytic_trace_distance(s: &WitnessScenario, t: f64) -> f64 {
    analytic_trace_norm_with(s, t, t_up(s.params, s.t_star))
}

/// As [`analytic_trace_distance`] with a precomputed `t↑`.
pub fn analytic_trace_norm_with(s: &WitnessScenario, t: f64, t_up: Option<f64>) -> f64 {
    let p = s.params;
    let decay = (-2.0 * p.alpha * p.c * (t - s.t_star)).exp();
    let shape = if t <= s.t_star {
        decay
    } else if t_up.is_none_or(|tu| t <= tu) {
        let r = r_function(p, t, s.t_star);
        0.25 * (3.0 + decay * (r - 1.0) + r)
    } else {
        1.0
    };
    2.0 * s.lambda_star * shape
}

/// Closed-form `d/dt E^{AB|C}` at `t*+`: `¼ αcλ* tanh(ct*)`.
pub fn right_derivative(s: &WitnessScenario) -> f64 {
    0.25 * trace_norm_right_derivative(s)
}

/// Closed-form right derivative of `||ρ1(t) - ρ2(t)||_1` at `t*`.
pub fn trace_norm_right_derivative(s: &WitnessScenario) -> f64 {
    s.params.alpha * s.params.c * s.lambda_star * (s.params.c * s.t_star).tanh()
}

/// Second-order one-sided difference `(-3f(t) + 4f(t+δ) - f(t+2δ)) / 2δ`.
pub fn one_sided_derivative(f: impl Fn(f64) -> Result<f64>, t: f64, delta: f64) -> Result<f64> {
    Ok((-3.0 * f(t)? + 4.0 * f(t + delta)? - f(t + 2.0 * delta)?) / (2.0 * delta))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistillabilityReport {
    pub s_ab: f64,
    pub s_abc: f64,
    /// `S(ρ^{AB}) - S(ρ^{ABC})`; positive margins certify distillability across `AB|C`.
    pub margin: f64,
}

pub fn distillability_check(state: &TripartiteState) -> Result<DistillabilityReport> {
    let ab = partial_trace(state.matrix(), &TRIPARTITE_DIMS, &[0, 1, 2])?;
    let s_ab = von_neumann_entropy(&DensityMatrix::new(ab, vec![2, 3, 2])?);
    let s_abc = von_neumann_entropy(state.state());
    Ok(DistillabilityReport {
        s_ab,
        s_abc,
        margin: s_ab - s_abc,
    })
}

/// `h(p1) + p1 S(ρ1) + (1 - p1) S(ρ2)`, the entropy of an orthogonally flagged mixture.
pub fn flagged_mixture_entropy(rho1: &DensityMatrix, rho2: &DensityMatrix, p1: f64) -> f64 {
    binary_entropy(p1) + p1 * von_neumann_entropy(rho1) + (1.0 - p1) * von_neumann_entropy(rho2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference() -> WitnessScenario {
        build_scenario(EnmParams::new(2.0, 0.5).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn lambda_star_reference() {
        let s = reference();
        let e2 = 1f64.exp().powi(2);
        assert_abs_diff_eq!(s.lambda_star, 1.0 / (3.0 * e2 - 2.0), epsilon = 1e-15);
        assert_abs_diff_eq!(s.lambda_star, 0.049585, epsilon = 1e-6);
        assert!(build_scenario(s.params, 0.0).is_err());
        assert!(build_scenario(s.params, -1.0).is_err());
    }

    #[test]
    fn pulled_back_states_match_explicit_forms() {
        let s = reference();
        let l = s.lambda_star;
        let diag = [1.0 - l, 1.0 - l, 2.0 + 4.0 * l, 1.0 - l, 1.0 - l, 0.0].map(|x| x / 6.0);
        assert!(s.rho2.matrix().max_abs_diff(&ComplexMatrix::from_real_diag(&diag)) < 1e-12);

        let off = (1.0 + 2.0 * l) / s.chi.powf(2.0);
        let mut printed = ComplexMatrix::from_real_diag(&[
            (1.0 + l) / 2.0,
            (1.0 - l) / 6.0,
            (1.0 - l) / 3.0,
            (1.0 - l) / 6.0,
            (1.0 + l) / 2.0,
            (1.0 - l) / 3.0,
        ]);
        printed[(0, 4)] = re(off);
        printed[(4, 0)] = re(off);
        assert!(s.rho1.matrix().max_abs_diff(&printed.scale(0.5)) < 1e-10);
    }

    #[test]
    fn forward_map_recovers_targets() {
        let s = reference();
        let fwd = enm_channel(s.params, s.t_star).unwrap();
        let (a, b) = target_pair(s.lambda_star);
        let r1 = fwd.apply_local(s.rho1.matrix(), &PAIR_DIMS, 0).unwrap();
        let r2 = fwd.apply_local(s.rho2.matrix(), &PAIR_DIMS, 0).unwrap();
        assert!(r1.max_abs_diff(&a) < 1e-10);
        assert!(r2.max_abs_diff(&b) < 1e-10);
        assert_abs_diff_eq!(trace_norm(&(&a - &b)).unwrap(), 2.0 * s.lambda_star, epsilon = 1e-14);
    }

    #[test]
    fn lambda_star_is_maximal() {
        let s = reference();
        let at = pullback_min_eigenvalue(s.params, 1.0, s.lambda_star).unwrap();
        assert!(at.abs() < 1e-14);
        assert!(pullback_min_eigenvalue(s.params, 1.0, 1.01 * s.lambda_star).unwrap() < 0.0);
        let scanned = lambda_star_scan(s.params, 1.0, 100).unwrap();
        assert_abs_diff_eq!(scanned, s.lambda_star, epsilon = 1e-12);
    }

    #[test]
    fn tripartite_initial_structure() {
        let s = reference();
        let init = tripartite_initial(&s);
        assert_abs_diff_eq!(init.matrix().trace().re, 1.0, epsilon = 1e-14);
        let b2c = partial_trace(init.matrix(), &TRIPARTITE_DIMS, &[2, 3]).unwrap();
        assert!(b2c.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.0, 0.5, 0.5, 0.0])) < 1e-14);
        let ab1 = partial_trace(init.matrix(), &TRIPARTITE_DIMS, &[0, 1]).unwrap();
        let mean = (s.rho1.matrix() + s.rho2.matrix()).scale(0.5);
        assert!(ab1.max_abs_diff(&mean) < 1e-14);
        assert!(evolve(&s, 0.0).unwrap().matrix().max_abs_diff(init.matrix()) < 1e-12);
        assert!(evolve(&s, -0.1).is_err());
    }

    #[test]
    fn negativity_reference_values() {
        let s = reference();
        let l = s.lambda_star;
        let e2 = 1f64.exp().powi(2);
        for method in [NegativityMethod::Full, NegativityMethod::Shortcut] {
            assert_abs_diff_eq!(witness_negativity(&s, 0.0, method).unwrap(), l * e2 / 2.0, epsilon = 1e-10);
            assert_abs_diff_eq!(witness_negativity(&s, 1.0, method).unwrap(), l / 2.0, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(witness_negativity(&s, 0.0, NegativityMethod::Full).unwrap(), 0.1831952, epsilon = 1e-7);
        let full = witness_negativity(&s, 1.5, NegativityMethod::Full).unwrap();
        let short = witness_negativity(&s, 1.5, NegativityMethod::Shortcut).unwrap();
        assert_abs_diff_eq!(full, short, epsilon = 1e-9);
    }

    #[test]
    fn analytic_curve_reference_values() {
        let s = reference();
        let l = s.lambda_star;
        assert_abs_diff_eq!(analytic_trace_distance(&s, 0.0), 2.0 * l * 1f64.exp().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(analytic_trace_distance(&s, 0.0), 0.73278, epsilon = 1e-5);
        assert_abs_diff_eq!(analytic_trace_distance(&s, 1.0), 0.0991711, epsilon = 1e-7);
        assert_abs_diff_eq!(r_function(s.params, 1.0, 1.0), 1.0, epsilon = 1e-15);
        for t in [0.3, 1.0, 1.2, 3.0, 5.0] {
            let numeric = s.trace_norm_difference(t).unwrap();
            assert_abs_diff_eq!(analytic_trace_distance(&s, t), numeric, epsilon = 1e-10);
        }
    }

    #[test]
    fn t_up_existence() {
        let p = EnmParams::new(2.0, 0.5).unwrap();
        assert!(t_up(p, 1.0).is_none());
        let tu = t_up(p, 0.01).unwrap();
        assert_abs_diff_eq!(r_function(p, tu, 0.01), 1.0, epsilon = 1e-12);
        assert!(tu > 0.03 && tu < 0.04, "t_up = {tu}");
        let s = build_scenario(p, 0.01).unwrap();
        assert_abs_diff_eq!(analytic_trace_distance(&s, 3.0), 2.0 * s.lambda_star, epsilon = 1e-15);
        assert_abs_diff_eq!(s.trace_norm_difference(3.0).unwrap(), 2.0 * s.lambda_star, epsilon = 1e-10);
    }

    #[test]
    fn right_derivative_examples() {
        let s = reference();
        let closed = right_derivative(&s);
        assert_abs_diff_eq!(closed, 0.25 * 2.0 * 0.5 * s.lambda_star * 0.5f64.tanh(), epsilon = 1e-16);
        assert_abs_diff_eq!(closed, 0.0057286, epsilon = 1e-7);
        let fd = one_sided_derivative(|t| witness_negativity(&s, t, NegativityMethod::Shortcut), 1.0, FD_STEP).unwrap();
        assert!(((fd - closed) / closed).abs() < 1e-4, "fd {fd} vs {closed}");

        let early = build_scenario(s.params, 1e-4).unwrap();
        assert!(right_derivative(&early) < 1e-5 * right_derivative(&s) * 1e4);
        assert!(right_derivative(&early) > 0.0);
    }

    #[test]
    fn distillability_examples() {
        let s = reference();
        let init = tripartite_initial(&s);
        let rep = distillability_check(&init).unwrap();
        assert!(rep.margin > 0.0);
        assert_abs_diff_eq!(rep.s_abc, flagged_mixture_entropy(&s.rho1, &s.rho2, 0.5), epsilon = 1e-10);
        let mean = DensityMatrix::new((s.rho1.matrix() + s.rho2.matrix()).scale(0.5), PAIR_DIMS.to_vec()).unwrap();
        assert_abs_diff_eq!(rep.s_ab, 1.0 + von_neumann_entropy(&mean), epsilon = 1e-10);

        let equal = TripartiteState::from_components(&s.rho1, &s.rho1, 0.5).unwrap();
        assert!(distillability_check(&equal).unwrap().margin.abs() < 1e-9);
    }
}
