//! Random-unitary qubit dynamics: Pauli channels, decay rates, the eternally
//! non-Markovian (ENM) model and a quadrature integrator from rates to
//! channels.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{apply_local, ComplexMatrix};

const PROB_TOL: f64 = 1e-12;
const RATE_TOL: f64 = 1e-12;

/// `rho -> sum_mu p_mu sigma_mu rho sigma_mu`.
///
/// Inverse maps are represented by the same type with coefficients that sum
/// to one but may be negative (a quasi-channel). The Pauli eigenvalues are
/// kept alongside the coefficients and drive `apply` and `compose`: for
/// inverse maps the coefficients are huge and nearly cancel, while the
/// eigenvalues carry the map without loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliChannel {
    p: [f64; 4],
    l: [f64; 3],
}

fn eigenvalues_of(p: [f64; 4]) -> [f64; 3] {
    let [p0, p1, p2, p3] = p;
    [p0 + p1 - p2 - p3, p0 - p1 + p2 - p3, p0 - p1 - p2 + p3]
}

impl PauliChannel {
    /// A physical channel: non-negative probabilities summing to one.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        Self::quasi(p)?.checked_physical()
    }

    /// Coefficients summing to one, signs unrestricted.
    pub fn quasi(p: [f64; 4]) -> Result<Self> {
        let scale = p.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let sum: f64 = p.iter().sum();
        if !p.iter().all(|x| x.is_finite()) || (sum - 1.0).abs() > PROB_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "Pauli coefficients {p:?} sum to {sum}, not 1"
            )));
        }
        Ok(Self { p, l: eigenvalues_of(p) })
    }

    fn checked_physical(self) -> Result<Self> {
        if !self.is_channel() {
            return Err(Error::InvalidArgument(format!("negative Pauli probability in {:?}", self.p)));
        }
        Ok(self)
    }

    pub fn identity() -> Self {
        Self {
            p: [1.0, 0.0, 0.0, 0.0],
            l: [1.0; 3],
        }
    }

    pub fn fully_depolarizing() -> Self {
        Self { p: [0.25; 4], l: [0.0; 3] }
    }

    /// Depolarizing channel `rho -> q rho + (1 - q) 1/2`.
    pub fn depolarizing(q: f64) -> Result<Self> {
        Self::from_eigenvalues([q, q, q])
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.p
    }

    pub fn is_channel(&self) -> bool {
        self.p.iter().all(|&x| x >= -PROB_TOL)
    }

    /// `Λ[σ_i] = λ_i σ_i` with `λ_i = p_0 + p_i - p_j - p_k`.
    pub fn eigenvalues(&self) -> [f64; 3] {
        self.l
    }

    /// Inverse of [`eigenvalues`](Self::eigenvalues) via the 4x4 ±1 transform.
    pub fn from_eigenvalues(l: [f64; 3]) -> Result<Self> {
        if !l.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite Pauli eigenvalues {l:?}")));
        }
        let [l1, l2, l3] = l;
        let p = [
            0.25 * (1.0 + l1 + l2 + l3),
            0.25 * (1.0 + l1 - l2 - l3),
            0.25 * (1.0 - l1 + l2 - l3),
            0.25 * (1.0 - l1 - l2 + l3),
        ];
        Ok(Self { p, l })
    }

    /// `self ∘ other`; Pauli maps commute and their eigenvalues multiply.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (self.l, other.l);
        Self::from_eigenvalues([a[0] * b[0], a[1] * b[1], a[2] * b[2]])
            .expect("products of finite eigenvalues are finite")
    }

    /// Acts on the Pauli components: `x_0 -> x_0`, `x_i -> λ_i x_i`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != 2 || rho.cols() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "Pauli channel acts on 2x2 operators, got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        let [l1, l2, l3] = self.l;
        let (a, b, c, d) = (rho[(0, 0)], rho[(0, 1)], rho[(1, 0)], rho[(1, 1)]);
        let (sum, diff) = ((a + d) * 0.5, (a - d) * (0.5 * l3));
        let (even, odd) = ((b + c) * (0.5 * l1), (b - c) * (0.5 * l2));
        ComplexMatrix::from_vec(2, 2, vec![sum + diff, even + odd, even - odd, sum - diff])
    }

    /// `(Λ ⊗ 1)` with Λ on tensor factor `subsystem`.
    pub fn apply_local(&self, m: &ComplexMatrix, dims: &[usize], subsystem: usize) -> Result<ComplexMatrix> {
        apply_local(m, dims, subsystem, |b| self.apply(b))
    }
}

/// Parameters of the ENM rates `γ1 = γ2 = αc/2`, `γ3(t) = -(αc/2) tanh(ct)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnmParams {
    pub alpha: f64,
    pub c: f64,
}

impl EnmParams {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must be >= 1")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("c = {c} must be > 0")));
        }
        Ok(Self { alpha, c })
    }
}

type RateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Time-dependent decay rates `γ1, γ2, γ3` of a random-unitary master
/// equation `dρ/dt = Σ γ_i(t) (σ_i ρ σ_i - ρ)`.
#[derive(Clone)]
pub struct RateFunctions {
    gammas: [RateFn; 3],
}

impl fmt::Debug for RateFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateFunctions")
            .field("gammas(0)", &self.eval(0.0))
            .finish()
    }
}

impl RateFunctions {
    pub fn new(
        g1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g3: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            gammas: [Arc::new(g1), Arc::new(g2), Arc::new(g3)],
        }
    }

    pub fn constant(g1: f64, g2: f64, g3: f64) -> Self {
        Self::new(move |_| g1, move |_| g2, move |_| g3)
    }

    pub fn eval(&self, t: f64) -> [f64; 3] {
        [(self.gammas[0])(t), (self.gammas[1])(t), (self.gammas[2])(t)]
    }
}

pub fn enm_rates(p: EnmParams) -> RateFunctions {
    let half = 0.5 * p.alpha * p.c;
    let c = p.c;
    RateFunctions::new(move |_| half, move |_| half, move |t| -half * (c * t).tanh())
}

/// Pauli eigenvalues of the ENM map for a signed exponent; `-alpha` gives
/// the inverse map.
fn enm_eigenvalues(signed_alpha: f64, c: f64, t: f64) -> [f64; 3] {
    // e^{-αct} cosh^α(ct) = ((1 + e^{-2ct}) / 2)^α
    let l12 = (0.5 * (1.0 + (-2.0 * c * t).exp())).powf(signed_alpha);
    let l3 = (-2.0 * signed_alpha * c * t).exp();
    [l12, l12, l3]
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and >= 0")));
    }
    Ok(())
}

/// The ENM dynamical map `Λ_t` as a Pauli channel.
pub fn enm_channel(p: EnmParams, t: f64) -> Result<PauliChannel> {
    check_time(t)?;
    PauliChannel::from_eigenvalues(enm_eigenvalues(p.alpha, p.c, t))?.checked_physical()
}

/// `Λ_t^{-1}`: the ENM map with `α → -α`.
pub fn enm_inverse(p: EnmParams, t: f64) -> Result<PauliChannel> {
    check_time(t)?;
    PauliChannel::from_eigenvalues(enm_eigenvalues(-p.alpha, p.c, t))
}

/// Closed-form Pauli eigenvalues `(λ1, λ2, λ3)` of the ENM map.
pub fn enm_pauli_eigenvalues(p: EnmParams, t: f64) -> [f64; 3] {
    enm_eigenvalues(p.alpha, p.c, t)
}

/// Composite Simpson integral of `f` over `[0, t]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, t: f64, n: usize) -> f64 {
    let h = t / n as f64;
    let mut s = f(0.0) + f(t);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    s * h / 3.0
}

/// Solves the commuting master equation: `λ_i(t) = exp(-2 ∫_0^t (γ_j + γ_k))`.
///
/// `steps` is the number of Simpson intervals (rounded up to even). The
/// result is a quasi-channel when the rates are not P-divisible.
pub fn integrate_rates(r: &RateFunctions, t: f64, steps: usize) -> Result<PauliChannel> {
    check_time(t)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    let n = steps + steps % 2;
    let ints: Vec<f64> = (0..3)
        .map(|k| {
            let g = &r.gammas[k];
            simpson(|s| g(s), t, n)
        })
        .collect();
    PauliChannel::from_eigenvalues([
        (-2.0 * (ints[1] + ints[2])).exp(),
        (-2.0 * (ints[0] + ints[2])).exp(),
        (-2.0 * (ints[0] + ints[1])).exp(),
    ])
}

/// CP- and P-divisibility of random-unitary rates at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateDivisibility {
    pub t: f64,
    /// All `γ_i(t) >= 0`.
    pub cp: bool,
    /// All pairwise sums `γ_i(t) + γ_j(t) >= 0`.
    pub p: bool,
}

pub fn rate_divisibility_report(r: &RateFunctions, grid: &[f64]) -> Vec<RateDivisibility> {
    grid.iter()
        .map(|&t| {
            let g = r.eval(t);
            RateDivisibility {
                t,
                cp: g.iter().all(|&x| x >= -RATE_TOL),
                p: [(0, 1), (0, 2), (1, 2)]
                    .iter()
                    .all(|&(i, j)| g[i] + g[j] >= -RATE_TOL),
            }
        })
        .collect()
}
