//! Random sampling of states, Hermitian matrices, unitaries and channels.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dynamics::PauliChannel;
use crate::numerics::{c, hermitian_eig, partial_trace, ComplexMatrix, C64};
use crate::states::DensityMatrix;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Mixed state on `dims`, obtained by tracing a Gaussian pure state on
/// `dims ⊗ C^ancilla` over the ancilla. `ancilla = 1` gives pure states.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], ancilla: usize) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let psi: Vec<C64> = (0..d * ancilla).map(|_| gaussian(rng)).collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
    let full = ComplexMatrix::outer(&psi);
    let rho = partial_trace(&full, &[d, ancilla], &[0]).expect("dims are consistent");
    DensityMatrix::new(rho, dims.to_vec()).expect("partial trace of a pure state is a state")
}

/// Full-rank random state (ancilla as large as the system).
pub fn random_mixed_state<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> DensityMatrix {
    let d: usize = dims.iter().product();
    random_state(rng, dims, d)
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng));
    (&g + &g.dagger()).scale(0.5)
}

/// Unitary built from the eigenvectors of a random Hermitian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    hermitian_eig(&random_hermitian(rng, n))
        .expect("random_hermitian is Hermitian")
        .eigenvectors
}

/// Pauli channel with probabilities uniform on the simplex.
pub fn random_pauli_channel<R: Rng + ?Sized>(rng: &mut R) -> PauliChannel {
    let w: Vec<f64> = (0..4).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let total: f64 = w.iter().sum();
    PauliChannel::new([w[0] / total, w[1] / total, w[2] / total, w[3] / total])
        .expect("normalized weights form a channel")
}

/// Random CPTP map on `d x d` operators given by `k` Kraus operators
/// (a random isometry sliced into blocks).
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> Vec<ComplexMatrix> {
    let u = random_unitary(rng, d * k);
    (0..k)
        .map(|b| ComplexMatrix::from_fn(d, d, |i, j| u[(b * d + i, j)]))
        .collect()
}
