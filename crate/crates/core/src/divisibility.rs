//! Choi–Jamiołkowski matrices, CP verdicts, the ENM intermediate maps
//! `V_{t,s} = Λ_t ∘ Λ_s^{-1}` and decomposable positive maps.
//!
//! Choi matrices use the trace-`d` normalization
//! `Ω_Λ = Σ_ij Λ[|i><j|] ⊗ |i><j|`, with the map acting on the first factor.

use crate::dynamics::{enm_pauli_eigenvalues, EnmParams, PauliChannel};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, kron, partial_trace, partial_transpose, re, ComplexMatrix};
use crate::states::BellState;

/// Default tolerance on the minimum Choi eigenvalue.
pub const CP_TOL: f64 = 1e-10;
const CHOI_HERMITIAN_TOL: f64 = 1e-10;
const CHOI_TP_TOL: f64 = 1e-9;

/// A linear map on `d x d` operators, described by its action.
pub trait LinearMap {
    fn dim(&self) -> usize;

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix>;

    /// The map on factor `subsystem` of a composite operator, identity elsewhere.
    fn apply_local(&self, m: &ComplexMatrix, dims: &[usize], subsystem: usize) -> Result<ComplexMatrix> {
        if dims.get(subsystem) != Some(&self.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "map on dimension {} cannot act on factor {subsystem} of {dims:?}",
                self.dim()
            )));
        }
        crate::numerics::apply_local(m, dims, subsystem, |b| self.apply(b))
    }
}

fn check_input(dim: usize, m: &ComplexMatrix) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "map on {dim}x{dim} operators applied to {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

impl LinearMap for PauliChannel {
    fn dim(&self) -> usize {
        2
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        PauliChannel::apply(self, m)
    }
}

impl<M: LinearMap + ?Sized> LinearMap for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        (**self).apply(m)
    }
}

impl<M: LinearMap + ?Sized> LinearMap for Box<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        (**self).apply(m)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityMap(pub usize);

impl LinearMap for IdentityMap {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_input(self.0, m)?;
        Ok(m.clone())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TransposeMap(pub usize);

impl LinearMap for TransposeMap {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_input(self.0, m)?;
        Ok(m.transpose())
    }
}

/// `rho -> Σ K rho K†`.
#[derive(Clone, Debug)]
pub struct KrausMap {
    kraus: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let d = kraus.first().map(|k| k.rows()).unwrap_or(0);
        if d == 0 || kraus.iter().any(|k| k.rows() != d || k.cols() != d) {
            return Err(Error::DimensionMismatch("Kraus operators must share one square shape".into()));
        }
        Ok(Self { kraus })
    }
}

impl LinearMap for KrausMap {
    fn dim(&self) -> usize {
        self.kraus[0].rows()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_input(self.dim(), m)?;
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        for k in &self.kraus {
            out += &m.conjugate_by(k);
        }
        Ok(out)
    }
}

/// Wraps a closure as a [`LinearMap`].
pub struct FnMap<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>> FnMap<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>> LinearMap for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_input(self.dim, m)?;
        (self.f)(m)
    }
}

/// Choi matrix of a trace-preserving, Hermiticity-preserving map.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    d: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Validates Hermiticity, trace `d` and `Tr_A Ω = 1_d`.
    pub fn new(d: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != d * d || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for d = {d} must be {0}x{0}",
                d * d
            )));
        }
        let asymmetry = matrix.hermitian_asymmetry();
        if asymmetry > CHOI_HERMITIAN_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { asymmetry });
        }
        let matrix = matrix.symmetrized();
        let reduced = partial_trace(&matrix, &[d, d], &[1])?;
        let residual = reduced.max_abs_diff(&ComplexMatrix::identity(d));
        if residual > CHOI_TP_TOL {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Self { d, matrix })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix).map(|e| e.eigenvalues).unwrap_or_default()
    }
}

impl LinearMap for ChoiMatrix {
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_via_choi(self, m)
    }
}

/// `Ω_Λ = Λ ⊗ 1 [d |Φ+><Φ+|]`.
pub fn choi_of<M: LinearMap + ?Sized>(map: &M, d: usize) -> Result<ChoiMatrix> {
    if map.dim() != d {
        return Err(Error::DimensionMismatch(format!("map acts on dimension {}, not {d}", map.dim())));
    }
    let mut omega = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit[(i, j)] = re(1.0);
            let image = map.apply(&unit)?;
            omega += &kron(&image, &unit);
        }
    }
    ChoiMatrix::new(d, omega)
}

/// `Λ[ρ] = Tr_B{Ω (1 ⊗ ρ^T)}`.
pub fn apply_via_choi(omega: &ChoiMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_input(omega.d, rho)?;
    let d = omega.d;
    let lifted = kron(&ComplexMatrix::identity(d), &rho.transpose());
    partial_trace(&omega.matrix.matmul(&lifted), &[d, d], &[0])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpVerdict {
    pub cp: bool,
    pub min_eigenvalue: f64,
}

pub fn is_cp(omega: &ChoiMatrix, tol: f64) -> CpVerdict {
    let min_eigenvalue = omega.eigenvalues().first().copied().unwrap_or(0.0);
    CpVerdict {
        cp: min_eigenvalue >= -tol,
        min_eigenvalue,
    }
}

fn check_interval(s: f64, t: f64) -> Result<()> {
    if !(s >= 0.0 && t.is_finite() && s <= t) {
        return Err(Error::InvalidArgument(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
    }
    Ok(())
}

/// `(λ_{t-s}^{2α}, Γ_{t,s}^α)` for the ENM intermediate map.
fn enm_intermediate_weights(p: EnmParams, s: f64, t: f64) -> (f64, f64) {
    let c = p.c;
    let l2a = (-2.0 * p.alpha * c * (t - s)).exp();
    // Γ = e^{-c(t-s)} cosh(ct) / cosh(cs) = (1 + e^{-2ct}) / (1 + e^{-2cs})
    let gamma = (1.0 + (-2.0 * c * t).exp()) / (1.0 + (-2.0 * c * s).exp());
    (l2a, gamma.powf(p.alpha))
}

/// Closed-form Choi matrix of `V_{t,s} = Λ_t ∘ Λ_s^{-1}` for the ENM model.
pub fn enm_intermediate_choi(p: EnmParams, s: f64, t: f64) -> Result<ChoiMatrix> {
    check_interval(s, t)?;
    let (l, g) = enm_intermediate_weights(p, s, t);
    #[rustfmt::skip]
    let m = ComplexMatrix::from_real(4, 4, &[
        0.5 * (1.0 + l), 0.0, 0.0, g,
        0.0, 0.5 * (1.0 - l), 0.0, 0.0,
        0.0, 0.0, 0.5 * (1.0 - l), 0.0,
        g, 0.0, 0.0, 0.5 * (1.0 + l),
    ])?;
    ChoiMatrix::new(2, m)
}

/// `V_{t,s} = Λ_t ∘ Λ_s^{-1}` as a Pauli map.
///
/// Built from the ratios `λ_i(t) / λ_i(s)` of the map eigenvalues. Composing
/// the coefficient forms instead loses about `e^{2αcs}` ulps to cancellation.
pub fn enm_intermediate_map(p: EnmParams, s: f64, t: f64) -> Result<PauliChannel> {
    check_interval(s, t)?;
    let (lt, ls) = (enm_pauli_eigenvalues(p, t), enm_pauli_eigenvalues(p, s));
    let l3 = (-2.0 * p.alpha * p.c * (t - s)).exp();
    PauliChannel::from_eigenvalues([lt[0] / ls[0], lt[1] / ls[1], l3])
}

/// Weights of `Ω_V = p1 P_{Φ+} + p2 P_{Φ-} + (1 - p1 - p2) P_{Ψ+}^{T_B}`
/// with `P_ψ = 2|ψ><ψ|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecompositionWitness {
    pub p1: f64,
    pub p2: f64,
    /// Max-entry distance between the Choi matrix of `Λ_t ∘ Λ_s^{-1}` and the
    /// recombined decomposition.
    pub residual: f64,
}

impl DecompositionWitness {
    pub fn p3(&self) -> f64 {
        1.0 - self.p1 - self.p2
    }

    pub fn is_valid(&self) -> bool {
        self.p1 >= -1e-12 && self.p2 >= -1e-12 && self.p1 + self.p2 <= 1.0 + 1e-12 && self.residual <= 1e-10
    }

    /// The decomposable map `p E1[ρ] + (1 - p) E2[ρ^T]` with
    /// `E1 = (p1 id + p2 σz·σz) / (p1 + p2)` and `E2 = σx·σx`.
    pub fn rebuild(&self) -> Result<DecomposableMap<PauliChannel, PauliChannel>> {
        let p = self.p1 + self.p2;
        let e1 = PauliChannel::new([self.p1 / p, 0.0, 0.0, self.p2 / p])?;
        let e2 = PauliChannel::new([0.0, 1.0, 0.0, 0.0])?;
        DecomposableMap::new(p.min(1.0), e1, e2)
    }
}

/// Recombines the three weighted Bell-type terms.
pub fn decomposition_matrix(p1: f64, p2: f64) -> ComplexMatrix {
    let p_phi_plus = BellState::PhiPlus.projector().scale(2.0);
    let p_phi_minus = BellState::PhiMinus.projector().scale(2.0);
    let p_psi_plus_tb =
        partial_transpose(&BellState::PsiPlus.projector().scale(2.0), &[2, 2], 1).expect("4x4 on [2, 2]");
    &(&p_phi_plus.scale(p1) + &p_phi_minus.scale(p2)) + &p_psi_plus_tb.scale(1.0 - p1 - p2)
}

pub fn enm_decomposition(p: EnmParams, s: f64, t: f64) -> Result<DecompositionWitness> {
    check_interval(s, t)?;
    let (l, g) = enm_intermediate_weights(p, s, t);
    let p1 = 0.5 * (l + g);
    let p2 = 0.5 * (1.0 - g);
    let omega = choi_of(&enm_intermediate_map(p, s, t)?, 2)?;
    let residual = omega.matrix().max_abs_diff(&decomposition_matrix(p1, p2));
    Ok(DecompositionWitness { p1, p2, residual })
}

/// `P[ρ] = p E1[ρ] + (1 - p) E2[ρ^T]` for CPTP `E1`, `E2`.
///
/// Positive and trace preserving but in general not completely positive.
/// [`LinearMap::apply_local`] gives `p (E1 ⊗ 1)[ρ] + (1 - p)(E2 ⊗ 1)[ρ^{T_A}]`.
#[derive(Clone, Debug)]
pub struct DecomposableMap<E1, E2> {
    p: f64,
    e1: E1,
    e2: E2,
}

impl<E1: LinearMap, E2: LinearMap> DecomposableMap<E1, E2> {
    pub fn new(p: f64, e1: E1, e2: E2) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p = {p} is not a probability")));
        }
        if e1.dim() != e2.dim() {
            return Err(Error::DimensionMismatch(format!(
                "E1 acts on dimension {}, E2 on {}",
                e1.dim(),
                e2.dim()
            )));
        }
        Ok(Self { p, e1, e2 })
    }
}

impl<E1: LinearMap, E2: LinearMap> LinearMap for DecomposableMap<E1, E2> {
    fn dim(&self) -> usize {
        self.e1.dim()
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_input(self.dim(), m)?;
        let a = self.e1.apply(m)?.scale(self.p);
        let b = self.e2.apply(&m.transpose())?.scale(1.0 - self.p);
        Ok(&a + &b)
    }
}

pub fn decomposable_positive_apply<E1: LinearMap, E2: LinearMap>(
    p: f64,
    e1: E1,
    e2: E2,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    DecomposableMap::new(p, e1, e2)?.apply(rho)
}

/// Choi's positive, non-decomposable, trace-preserving map on 3x3 matrices.
#[derive(Clone, Copy, Debug, Default)]
pub struct ChoiMap3;

impl LinearMap for ChoiMap3 {
    fn dim(&self) -> usize {
        3
    }

    fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        choi_map_3(m)
    }
}

pub fn choi_map_3(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_input(3, a)?;
    Ok(ComplexMatrix::from_fn(3, 3, |i, j| {
        if i == j {
            (a[(i, i)] + a[((i + 1) % 3, (i + 1) % 3)] * 2.0) / 3.0
        } else {
            -a[(i, j)] / 3.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{enm_channel, enm_inverse};
    use crate::numerics::{c, pauli};
    use approx::assert_abs_diff_eq;

    fn enm(a: f64, c: f64) -> EnmParams {
        EnmParams::new(a, c).unwrap()
    }

    fn phi_plus_unnormalized(d: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(d * d, d * d, |r, s| {
            if r / d == r % d && s / d == s % d {
                re(1.0)
            } else {
                re(0.0)
            }
        })
    }

    #[test]
    fn identity_choi_is_scaled_bell_projector() {
        let omega = choi_of(&IdentityMap(2), 2).unwrap();
        assert!(omega.matrix().max_abs_diff(&BellState::PhiPlus.projector().scale(2.0)) < 1e-15);
        assert!(omega.matrix().max_abs_diff(&phi_plus_unnormalized(2)) < 1e-15);
        let v = is_cp(&omega, CP_TOL);
        assert!(v.cp);
        assert_abs_diff_eq!(v.min_eigenvalue, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn transposition_choi_is_swap() {
        let omega = choi_of(&TransposeMap(2), 2).unwrap();
        #[rustfmt::skip]
        let swap = ComplexMatrix::from_real(4, 4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        ]).unwrap();
        assert_eq!(omega.matrix(), &swap);
        let v = is_cp(&omega, CP_TOL);
        assert!(!v.cp);
        assert_abs_diff_eq!(v.min_eigenvalue, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let half = FnMap::new(2, |m: &ComplexMatrix| Ok(m.scale(0.5)));
        assert!(matches!(choi_of(&half, 2), Err(Error::NotTracePreserving { .. })));
        assert!(choi_of(&IdentityMap(3), 2).is_err());
    }

    #[test]
    fn apply_via_choi_examples() {
        let rho = ComplexMatrix::from_vec(2, 2, vec![re(0.6), c(0.2, 0.1), c(0.2, -0.1), re(0.4)]).unwrap();
        let id = ChoiMatrix::new(2, BellState::PhiPlus.projector().scale(2.0)).unwrap();
        assert!(apply_via_choi(&id, &rho).unwrap().max_abs_diff(&rho) < 1e-15);
        let dep = choi_of(&PauliChannel::fully_depolarizing(), 2).unwrap();
        assert!(apply_via_choi(&dep, &rho).unwrap().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);

        let ch = enm_channel(enm(2.0, 0.5), 1.0).unwrap();
        let z0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let via = apply_via_choi(&choi_of(&ch, 2).unwrap(), &z0).unwrap();
        assert!(via.max_abs_diff(&ch.apply(&z0).unwrap()) < 1e-15);
        assert_abs_diff_eq!(via[(0, 0)].re, 0.5676676, epsilon = 1e-7);
        assert!(apply_via_choi(&dep, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn enm_intermediate_closed_form_matches_composition() {
        let p = enm(2.0, 0.5);
        for &(s, t) in &[(0.0, 0.0), (0.0, 1.3), (0.4, 0.9), (1.0, 2.0), (2.0, 5.5)] {
            let closed = enm_intermediate_choi(p, s, t).unwrap();
            let numeric = choi_of(&enm_intermediate_map(p, s, t).unwrap(), 2).unwrap();
            assert!(closed.matrix().max_abs_diff(numeric.matrix()) < 1e-10, "(s,t)=({s},{t})");
            let composed = enm_channel(p, t).unwrap().compose(&enm_inverse(p, s).unwrap());
            let direct = enm_intermediate_map(p, s, t).unwrap().probabilities();
            for (a, b) in composed.probabilities().iter().zip(direct) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
            }
        }
        let same = enm_intermediate_choi(p, 1.7, 1.7).unwrap();
        assert!(same.matrix().max_abs_diff(&BellState::PhiPlus.projector().scale(2.0)) < 1e-15);
        assert!(enm_intermediate_choi(p, 2.0, 1.0).is_err());
    }

    #[test]
    fn enm_intermediate_reference_point() {
        let p = enm(2.0, 0.5);
        let omega = enm_intermediate_choi(p, 1.0, 2.0).unwrap();
        let lam = (-0.5f64).exp();
        let gamma = lam * 1.0f64.cosh() / 0.5f64.cosh();
        let oracle = (1.0 + lam.powi(4) - 2.0 * gamma.powi(2)) / 2.0;
        let v = is_cp(&omega, CP_TOL);
        assert!(!v.cp);
        assert_abs_diff_eq!(v.min_eigenvalue, oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(v.min_eigenvalue, -0.12121, epsilon = 1e-4);
        for t in [0.1, 1.0, 3.0, 10.0] {
            assert!(is_cp(&enm_intermediate_choi(p, 0.0, t).unwrap(), CP_TOL).cp);
        }
    }

    #[test]
    fn decomposition_examples() {
        let p = enm(2.0, 0.5);
        let w = enm_decomposition(p, 1.5, 1.5).unwrap();
        assert_abs_diff_eq!(w.p1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.p2, 0.0, epsilon = 1e-15);

        let w = enm_decomposition(p, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(w.p1, 0.41211, epsilon = 1e-5);
        assert_abs_diff_eq!(w.p2, 0.15556, epsilon = 1e-5);
        assert_abs_diff_eq!(w.p3(), 0.43233, epsilon = 1e-5);
        assert!(w.is_valid());

        for t in [0.2, 1.0, 5.0] {
            let w = enm_decomposition(p, 0.0, t).unwrap();
            let gamma0 = 0.5 * (1.0 + (-2.0 * p.c * t).exp());
            assert_abs_diff_eq!(w.p2, 0.5 * (1.0 - gamma0.powf(p.alpha)), epsilon = 1e-14);
            assert!(w.p2 >= 0.0);
        }
        assert!(enm_decomposition(p, 3.0, 1.0).is_err());
    }

    #[test]
    fn decomposable_map_examples() {
        let rho = ComplexMatrix::from_vec(2, 2, vec![re(0.6), c(0.2, 0.1), c(0.2, -0.1), re(0.4)]).unwrap();
        let e1 = PauliChannel::new([0.7, 0.1, 0.1, 0.1]).unwrap();
        let out = decomposable_positive_apply(1.0, e1, IdentityMap(2), &rho).unwrap();
        assert!(out.max_abs_diff(&e1.apply(&rho).unwrap()) < 1e-16);
        let out = decomposable_positive_apply(0.0, e1, IdentityMap(2), &rho).unwrap();
        assert_eq!(out, rho.transpose());
        assert!(DecomposableMap::new(1.5, e1, IdentityMap(2)).is_err());
        assert!(DecomposableMap::new(0.5, e1, IdentityMap(3)).is_err());
    }

    #[test]
    fn local_decomposable_map_uses_partial_transpose_on_a() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64));
        let map = DecomposableMap::new(0.0, IdentityMap(2), IdentityMap(2)).unwrap();
        let out = map.apply_local(&m, &[2, 2], 0).unwrap();
        assert_eq!(out, partial_transpose(&m, &[2, 2], 0).unwrap());
    }

    #[test]
    fn choi_map_examples() {
        let mixed = ComplexMatrix::identity(3).scale(1.0 / 3.0);
        assert!(choi_map_3(&mixed).unwrap().max_abs_diff(&mixed) < 1e-16);
        let out = choi_map_3(&ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0])).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::from_real_diag(&[1.0 / 3.0, 0.0, 2.0 / 3.0])) < 1e-16);
        assert!(choi_map_3(&pauli(1)).is_err());
        let omega = choi_of(&ChoiMap3, 3).unwrap();
        assert!(!is_cp(&omega, CP_TOL).cp);
    }
}
