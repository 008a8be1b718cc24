//! Quantum states, Bell states, Bloch vectors, and the distance and
//! entanglement quantifiers evaluated on them.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::numerics::{
    c, hermitian_eig, hermitian_function, partial_transpose_many, pauli, re, trace_norm, ComplexMatrix, C64,
};

const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as zero when deciding supports.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Weight of `rho` outside `supp(sigma)` above which divergences are infinite.
const SUPPORT_LEAK_TOL: f64 = 1e-10;

/// An operator living on a tensor product with known factor dimensions.
pub trait Operator {
    fn matrix(&self) -> &ComplexMatrix;
    fn dims(&self) -> &[usize];
}

fn check_unit_trace_hermitian(matrix: &ComplexMatrix, dims: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !matrix.is_square() || matrix.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} do not fit a {}x{} matrix",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let sym = matrix.checked_hermitian()?;
    let tr = sym.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    Ok(sym)
}

/// Positive semi-definite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let matrix = check_unit_trace_hermitian(&matrix, &dims)?;
        let min = hermitian_eig(&matrix)?.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, dims })
    }

    /// Single-system state.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, vec![d])
    }

    pub fn pure(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    /// Computational basis projector `|k><k|` on a single system of dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut diag = vec![0.0; d];
        diag[k] = 1.0;
        Self {
            matrix: ComplexMatrix::from_real_diag(&diag),
            dims: vec![d],
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix).map(|e| e.eigenvalues).unwrap_or_default()
    }
}

impl Operator for DensityMatrix {
    fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    fn dims(&self) -> &[usize] {
        &self.dims
    }
}

/// Unit-trace Hermitian operator that may fail to be positive, e.g. the
/// image of a state under a positive but not completely positive map.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianUnitTrace {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl HermitianUnitTrace {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let matrix = check_unit_trace_hermitian(&matrix, &dims)?;
        Ok(Self { matrix, dims })
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

impl Operator for HermitianUnitTrace {
    fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    fn dims(&self) -> &[usize] {
        &self.dims
    }
}

impl From<DensityMatrix> for HermitianUnitTrace {
    fn from(d: DensityMatrix) -> Self {
        Self {
            matrix: d.matrix,
            dims: d.dims,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub fn vector(self) -> [C64; 4] {
        let h = re(FRAC_1_SQRT_2);
        let z = re(0.0);
        match self {
            BellState::PhiPlus => [h, z, z, h],
            BellState::PhiMinus => [h, z, z, -h],
            BellState::PsiPlus => [z, h, h, z],
            BellState::PsiMinus => [z, h, -h, z],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector())
    }
}

pub fn bell_state(kind: BellState) -> DensityMatrix {
    DensityMatrix {
        matrix: kind.projector(),
        dims: vec![2, 2],
    }
}

/// Negativity `(||h^{T_B}||_1 - 1) / 2` across the cut that places factors
/// `split..` on the transposed side B.
pub fn negativity<O: Operator + ?Sized>(h: &O, split: usize) -> Result<f64> {
    let dims = h.dims();
    if split == 0 || split >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "cut at {split} does not split dims {dims:?} into two non-empty groups"
        )));
    }
    let b_side: Vec<usize> = (split..dims.len()).collect();
    let pt = partial_transpose_many(h.matrix(), dims, &b_side)?;
    Ok((trace_norm(&pt)? - 1.0) / 2.0)
}

fn same_shape(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// `||rho - sigma||_1 / 2`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_shape(rho, sigma)?;
    Ok(0.5 * trace_norm(&(&rho.matrix - &sigma.matrix))?)
}

/// `F = ||sqrt(rho) sqrt(sigma)||_1 = Tr sqrt(sqrt(rho) sigma sqrt(rho))`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_shape(rho, sigma)?;
    let sqrt_rho = hermitian_function(&rho.matrix, |x| x.max(0.0).sqrt())?;
    let inner = sqrt_rho.matmul(&sigma.matrix).matmul(&sqrt_rho);
    Ok(hermitian_eig(&inner.symmetrized())?
        .eigenvalues
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum())
}

/// Base-2 Umegaki relative entropy. Returns `f64::INFINITY` when `rho` has
/// weight outside the support of `sigma`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_shape(rho, sigma)?;
    let es = hermitian_eig(&sigma.matrix)?;
    let n = rho.dim();
    let mut cross = 0.0;
    let mut leak = 0.0;
    for k in 0..n {
        let b = es.eigenvector(k);
        // <b|rho|b>
        let w: f64 = (0..n)
            .map(|i| (0..n).map(|j| b[i].conj() * rho.matrix[(i, j)] * b[j]).sum::<C64>())
            .sum::<C64>()
            .re;
        let q = es.eigenvalues[k];
        if q > SUPPORT_TOL {
            cross += w * q.log2();
        } else {
            leak += w;
        }
    }
    if leak > SUPPORT_LEAK_TOL {
        return Ok(f64::INFINITY);
    }
    Ok(-von_neumann_entropy(rho) - cross)
}

fn leaks_out_of_support(rho: &DensityMatrix, sigma_eig: &crate::numerics::EigenSystem) -> bool {
    let n = rho.dim();
    let mut leak = 0.0;
    for k in 0..n {
        if sigma_eig.eigenvalues[k] > SUPPORT_TOL {
            continue;
        }
        let b = sigma_eig.eigenvector(k);
        leak += (0..n)
            .map(|i| (0..n).map(|j| b[i].conj() * rho.matrix[(i, j)] * b[j]).sum::<C64>())
            .sum::<C64>()
            .re;
    }
    leak > SUPPORT_LEAK_TOL
}

/// Sandwiched Rényi divergence
/// `1/(a-1) log2 Tr[(sigma^{(1-a)/2a} rho sigma^{(1-a)/2a})^a]` for `a >= 1/2`, `a != 1`.
pub fn renyi_relative(rho: &DensityMatrix, sigma: &DensityMatrix, order: f64) -> Result<f64> {
    same_shape(rho, sigma)?;
    if !(order >= 0.5) {
        return Err(Error::InvalidArgument(format!("Rényi order {order} below 1/2")));
    }
    if order == 1.0 {
        return Err(Error::InvalidArgument(
            "Rényi order 1 is the relative entropy; use relative_entropy".into(),
        ));
    }
    let es = hermitian_eig(&sigma.matrix)?;
    if order > 1.0 && leaks_out_of_support(rho, &es) {
        return Ok(f64::INFINITY);
    }
    let expo = (1.0 - order) / (2.0 * order);
    let s_pow = es.map_eigenvalues(|q| if q > SUPPORT_TOL { q.powf(expo) } else { 0.0 });
    let inner = s_pow.matmul(&rho.matrix).matmul(&s_pow).symmetrized();
    let q: f64 = hermitian_eig(&inner)?
        .eigenvalues
        .iter()
        .map(|&x| x.max(0.0).powf(order))
        .sum();
    Ok(q.log2() / (order - 1.0))
}

/// Base-2 von Neumann entropy.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&x| x > SUPPORT_TOL)
        .map(|&x| -x * x.log2())
        .sum()
}

pub fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x]
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// The two-state functionals that contract under CPTP maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContractiveFunction {
    TraceDistance,
    Infidelity,
    RelativeEntropy,
    /// Sandwiched Rényi divergence of the given order.
    Renyi(f64),
}

impl ContractiveFunction {
    pub fn evaluate(&self, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
        match *self {
            ContractiveFunction::TraceDistance => trace_distance(rho, sigma),
            ContractiveFunction::Infidelity => Ok(1.0 - fidelity(rho, sigma)?),
            ContractiveFunction::RelativeEntropy => relative_entropy(rho, sigma),
            ContractiveFunction::Renyi(a) => renyi_relative(rho, sigma, a),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ContractiveFunction::TraceDistance => "trace-distance".into(),
            ContractiveFunction::Infidelity => "infidelity".into(),
            ContractiveFunction::RelativeEntropy => "relative-entropy".into(),
            ContractiveFunction::Renyi(a) => format!("renyi-{a}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        dot(&self.as_array(), &self.as_array()).sqrt()
    }

    /// Bloch vector of the transposed state: reflection through the x-z plane.
    pub fn transposed(&self) -> Self {
        Self::new(self.x, -self.y, self.z)
    }

    /// `(1 + r.sigma) / 2`; fails if `|r| > 1`.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_matrix(self.to_matrix())
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(
            2,
            2,
            vec![
                re(0.5 * (1.0 + self.z)),
                c(0.5 * self.x, -0.5 * self.y),
                c(0.5 * self.x, 0.5 * self.y),
                re(0.5 * (1.0 - self.z)),
            ],
        )
        .expect("2x2")
    }
}

pub fn bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Bloch vector needs a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let m = &rho.matrix;
    Ok(BlochVector::new(
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        (m[(0, 0)] - m[(1, 1)]).re,
    ))
}

type Vec3 = [f64; 3];
type Mat3 = [[f64; 3]; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scaled(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn reflect_y(a: &Vec3) -> Vec3 {
    [a[0], -a[1], a[2]]
}

fn norm3(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Rotation by `angle` about the unit vector `n` (Rodrigues).
fn axis_angle(n: &Vec3, angle: f64) -> Mat3 {
    let (s, co) = angle.sin_cos();
    let t = 1.0 - co;
    let [x, y, z] = *n;
    [
        [co + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, co + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, co + z * z * t],
    ]
}

const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Smallest-angle rotation taking direction `u` to its x-z reflection.
fn rotation_to_reflection(u: &Vec3) -> Mat3 {
    let u = scaled(u, 1.0 / norm3(u));
    let target = reflect_y(&u);
    let axis = cross(&u, &target);
    let s = norm3(&axis);
    let co = dot(&u, &target);
    if s < 1e-15 {
        if co > 0.0 {
            IDENTITY3
        } else {
            // u along ±y: half turn about x
            axis_angle(&[1.0, 0.0, 0.0], std::f64::consts::PI)
        }
    } else {
        axis_angle(&scaled(&axis, 1.0 / s), s.atan2(co))
    }
}

/// SO(3) rotation → SU(2) element `U` with `U (r.σ) U† = (R r).σ`.
fn lift_to_su2(r: &Mat3) -> ComplexMatrix {
    let tr = r[0][0] + r[1][1] + r[2][2];
    let (w, x, y, z);
    if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (r[2][1] - r[1][2]) / s;
        y = (r[0][2] - r[2][0]) / s;
        z = (r[1][0] - r[0][1]) / s;
    } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
        let s = (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt() * 2.0;
        w = (r[2][1] - r[1][2]) / s;
        x = 0.25 * s;
        y = (r[0][1] + r[1][0]) / s;
        z = (r[0][2] + r[2][0]) / s;
    } else if r[1][1] > r[2][2] {
        let s = (1.0 + r[1][1] - r[0][0] - r[2][2]).sqrt() * 2.0;
        w = (r[0][2] - r[2][0]) / s;
        x = (r[0][1] + r[1][0]) / s;
        y = 0.25 * s;
        z = (r[1][2] + r[2][1]) / s;
    } else {
        let s = (1.0 + r[2][2] - r[0][0] - r[1][1]).sqrt() * 2.0;
        w = (r[1][0] - r[0][1]) / s;
        x = (r[0][2] + r[2][0]) / s;
        y = (r[1][2] + r[2][1]) / s;
        z = 0.25 * s;
    }
    let minus_i = c(0.0, -1.0);
    &(&(&ComplexMatrix::identity(2).scale(w) + &pauli(1).scale_c(minus_i * x))
        + &pauli(2).scale_c(minus_i * y))
        + &pauli(3).scale_c(minus_i * z)
}

/// A qubit unitary `U` with `U rho U† = rho^T` and `U sigma U† = sigma^T`.
///
/// Transposition reflects Bloch vectors through the x-z plane, which keeps
/// their lengths and mutual angle, so a proper rotation realizing it on the
/// pair always exists. Degenerate pairs (a zero or two parallel vectors) use
/// the smallest rotation angle; two zero vectors give the identity.
pub fn transpose_unitary(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ComplexMatrix> {
    let r = bloch(rho)?.as_array();
    let s = bloch(sigma)?.as_array();
    let (nr, ns) = (norm3(&r), norm3(&s));
    let tiny = 1e-14;

    let rot = if nr < tiny && ns < tiny {
        IDENTITY3
    } else {
        let (long, short, nlong) = if nr >= ns { (r, s, nr) } else { (s, r, ns) };
        let e1 = scaled(&long, 1.0 / nlong);
        let perp = {
            let p = dot(&short, &e1);
            [short[0] - p * e1[0], short[1] - p * e1[1], short[2] - p * e1[2]]
        };
        let np = norm3(&perp);
        if np < 1e-12 {
            rotation_to_reflection(&long)
        } else {
            let e2 = scaled(&perp, 1.0 / np);
            let e3 = cross(&e1, &e2);
            let f1 = reflect_y(&e1);
            let f2 = reflect_y(&e2);
            let f3 = cross(&f1, &f2);
            // R = [f1 f2 f3] [e1 e2 e3]^T
            let mut m = [[0.0; 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, entry) in row.iter_mut().enumerate() {
                    *entry = f1[i] * e1[j] + f2[i] * e2[j] + f3[i] * e3[j];
                }
            }
            m
        }
    };
    Ok(lift_to_su2(&rot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{kron, partial_trace};
    use approx::assert_abs_diff_eq;

    fn inner(a: &[C64; 4], b: &[C64; 4]) -> C64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    #[test]
    fn bell_marginals_and_orthogonality() {
        for kind in [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus] {
            let b = bell_state(kind);
            let marg = partial_trace(b.matrix(), &[2, 2], &[0]).unwrap();
            assert!(marg.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
            let ev = b.eigenvalues();
            assert_abs_diff_eq!(ev[3], 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(ev[2], 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(inner(&BellState::PhiPlus.vector(), &BellState::PhiMinus.vector()).norm(), 0.0);
    }

    #[test]
    fn sigma_x_on_first_factor_maps_phi_plus_to_psi_plus() {
        let x1 = kron(&pauli(1), &ComplexMatrix::identity(2));
        let mapped = BellState::PhiPlus.projector().conjugate_by(&x1);
        assert!(mapped.max_abs_diff(&BellState::PsiPlus.projector()) < 1e-15);
    }

    #[test]
    fn negativity_examples() {
        assert_abs_diff_eq!(negativity(&bell_state(BellState::PhiPlus), 1).unwrap(), 0.5, epsilon = 1e-14);
        let a = BlochVector::new(0.3, -0.2, 0.5).to_matrix();
        let b = BlochVector::new(0.0, 0.6, -0.7).to_matrix();
        let prod = DensityMatrix::new(kron(&a, &b), vec![2, 2]).unwrap();
        assert_abs_diff_eq!(negativity(&prod, 1).unwrap(), 0.0, epsilon = 1e-14);
        assert!(matches!(negativity(&prod, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(negativity(&prod, 2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn negativity_symmetric_in_transposed_side() {
        let psi = [c(0.3, 0.1), c(-0.5, 0.2), c(0.1, 0.7), c(0.2, -0.2)];
        let rho = DensityMatrix::pure(&psi, vec![2, 2]).unwrap();
        let pt_a = crate::numerics::partial_transpose(rho.matrix(), &[2, 2], 0).unwrap();
        let via_a = (trace_norm(&pt_a).unwrap() - 1.0) / 2.0;
        assert_abs_diff_eq!(negativity(&rho, 1).unwrap(), via_a, epsilon = 1e-13);
    }

    #[test]
    fn trace_distance_examples() {
        let z0 = DensityMatrix::basis(2, 0);
        let z1 = DensityMatrix::basis(2, 1);
        assert_abs_diff_eq!(trace_distance(&z0, &z1).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(trace_distance(&z0, &z0).unwrap(), 0.0);
        assert!(trace_distance(&z0, &DensityMatrix::basis(3, 0)).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let rho = BlochVector::new(0.1, 0.4, -0.3).to_state().unwrap();
        assert_abs_diff_eq!(fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-12);
        let z0 = DensityMatrix::basis(2, 0);
        let z1 = DensityMatrix::basis(2, 1);
        assert_abs_diff_eq!(fidelity(&z0, &z1).unwrap(), 0.0, epsilon = 1e-15);
        let p = DensityMatrix::from_matrix(ComplexMatrix::from_real_diag(&[0.75, 0.25])).unwrap();
        let q = DensityMatrix::from_matrix(ComplexMatrix::from_real_diag(&[0.25, 0.75])).unwrap();
        // classical fidelity sum_i sqrt(p_i q_i)
        let oracle = 2.0 * (0.75f64 * 0.25).sqrt();
        assert_abs_diff_eq!(fidelity(&p, &q).unwrap(), oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(oracle, 0.8660254037844386, epsilon = 1e-15);
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = BlochVector::new(0.1, 0.4, -0.3).to_state().unwrap();
        assert_abs_diff_eq!(relative_entropy(&rho, &rho).unwrap(), 0.0, epsilon = 1e-12);
        let z0 = DensityMatrix::basis(2, 0);
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        // KL(1,0 || 1/2,1/2) = log2 2
        assert_abs_diff_eq!(relative_entropy(&z0, &mixed).unwrap(), 1.0, epsilon = 1e-14);
        let z1 = DensityMatrix::basis(2, 1);
        assert_eq!(relative_entropy(&z0, &z1).unwrap(), f64::INFINITY);
        // pure sigma, rho inside its support
        assert_abs_diff_eq!(relative_entropy(&z0, &z0).unwrap(), 0.0, epsilon = 1e-14);
    }

    fn classical_renyi(p: &[f64], q: &[f64], a: f64) -> f64 {
        let s: f64 = p.iter().zip(q).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum();
        s.log2() / (a - 1.0)
    }

    #[test]
    fn renyi_examples() {
        let p = [0.7, 0.3];
        let q = [0.2, 0.8];
        let rho = DensityMatrix::from_matrix(ComplexMatrix::from_real_diag(&p)).unwrap();
        let sigma = DensityMatrix::from_matrix(ComplexMatrix::from_real_diag(&q)).unwrap();
        for a in [0.5, 0.75, 1.5, 2.0, 3.0] {
            assert_abs_diff_eq!(
                renyi_relative(&rho, &sigma, a).unwrap(),
                classical_renyi(&p, &q, a),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(renyi_relative(&rho, &rho, a).unwrap(), 0.0, epsilon = 1e-12);
        }
        assert!(renyi_relative(&rho, &sigma, 0.4).is_err());
        assert!(renyi_relative(&rho, &sigma, 1.0).is_err());
        let z0 = DensityMatrix::basis(2, 0);
        let z1 = DensityMatrix::basis(2, 1);
        assert_eq!(renyi_relative(&z0, &z1, 2.0).unwrap(), f64::INFINITY);
        assert_eq!(renyi_relative(&z0, &z1, 0.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn renyi_half_is_log_fidelity() {
        let rho = BlochVector::new(0.2, -0.5, 0.3).to_state().unwrap();
        let sigma = BlochVector::new(-0.6, 0.1, 0.4).to_state().unwrap();
        let d = renyi_relative(&rho, &sigma, 0.5).unwrap();
        assert_abs_diff_eq!(d, -2.0 * fidelity(&rho, &sigma).unwrap().log2(), epsilon = 1e-12);
    }

    #[test]
    fn renyi_near_one_brackets_relative_entropy() {
        let rho = BlochVector::new(0.2, -0.5, 0.3).to_state().unwrap();
        let sigma = BlochVector::new(-0.6, 0.1, 0.4).to_state().unwrap();
        let s = relative_entropy(&rho, &sigma).unwrap();
        let h = 1e-4;
        let up = renyi_relative(&rho, &sigma, 1.0 + h).unwrap();
        let down = renyi_relative(&rho, &sigma, 1.0 - h).unwrap();
        assert!((up - s).abs() < 1e-3 && (down - s).abs() < 1e-3);
        assert!(down <= s && s <= up, "sandwiched Rényi is monotone in its order");
        assert_abs_diff_eq!(0.5 * (up + down), s, epsilon = 1e-6);
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&DensityMatrix::basis(2, 1)), 0.0);
        assert_abs_diff_eq!(von_neumann_entropy(&DensityMatrix::maximally_mixed(vec![2])), 1.0, epsilon = 1e-14);
        let r = DensityMatrix::from_matrix(ComplexMatrix::from_real_diag(&[0.75, 0.25])).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&r), binary_entropy(0.75), epsilon = 1e-14);
        assert_abs_diff_eq!(binary_entropy(0.75), 0.8112781244591328, epsilon = 1e-15);
    }

    #[test]
    fn bloch_examples() {
        let b = bloch(&DensityMatrix::maximally_mixed(vec![2])).unwrap();
        assert_eq!(b.as_array(), [0.0, 0.0, 0.0]);
        let b = bloch(&DensityMatrix::basis(2, 0)).unwrap();
        assert_eq!(b.as_array(), [0.0, 0.0, 1.0]);
        let plus_y = BlochVector::new(0.0, 1.0, 0.0).to_state().unwrap();
        let t = DensityMatrix::from_matrix(plus_y.matrix().transpose()).unwrap();
        let bt = bloch(&t).unwrap();
        assert_abs_diff_eq!(bt.y, -1.0, epsilon = 1e-15);
        assert!(bloch(&DensityMatrix::maximally_mixed(vec![3])).is_err());
        let r = BlochVector::new(0.3, -0.4, 0.5);
        let back = bloch(&r.to_state().unwrap()).unwrap();
        assert_abs_diff_eq!(norm3(&[back.x - r.x, back.y - r.y, back.z - r.z]), 0.0, epsilon = 1e-15);
    }

    fn check_transpose_unitary(r: BlochVector, s: BlochVector) -> ComplexMatrix {
        let rho = r.to_state().unwrap();
        let sigma = s.to_state().unwrap();
        let u = transpose_unitary(&rho, &sigma).unwrap();
        assert!(u.dagger().matmul(&u).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(rho.matrix().conjugate_by(&u).max_abs_diff(&rho.matrix().transpose()) < 1e-12);
        assert!(sigma.matrix().conjugate_by(&u).max_abs_diff(&sigma.matrix().transpose()) < 1e-12);
        u
    }

    #[test]
    fn transpose_unitary_xz_plane_is_identity() {
        let u = check_transpose_unitary(BlochVector::new(0.3, 0.0, 0.5), BlochVector::new(-0.7, 0.0, 0.1));
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn transpose_unitary_y_axis_uses_half_turn_about_x() {
        let r = BlochVector::new(0.0, 1.0, 0.0);
        let u = check_transpose_unitary(r, r);
        // equal to sigma_x up to a global phase
        let ph = u[(0, 1)];
        assert!(u.max_abs_diff(&pauli(1).scale_c(ph)) < 1e-12);
    }

    #[test]
    fn transpose_unitary_degenerate_pairs() {
        check_transpose_unitary(BlochVector::new(0.0, 0.0, 0.0), BlochVector::new(0.0, 0.0, 0.0));
        check_transpose_unitary(BlochVector::new(0.0, 0.0, 0.0), BlochVector::new(0.2, 0.5, -0.1));
        check_transpose_unitary(BlochVector::new(0.1, 0.2, 0.3), BlochVector::new(-0.2, -0.4, -0.6));
        check_transpose_unitary(BlochVector::new(0.1, 0.2, 0.3), BlochVector::new(0.2, 0.4, 0.6));
        let u = check_transpose_unitary(BlochVector::new(0.0, 0.0, 0.0), BlochVector::new(0.0, 0.0, 0.0));
        assert_eq!(u, ComplexMatrix::identity(2));
    }
}
