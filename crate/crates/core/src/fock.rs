//! Brute-force oracle in a truncated Fock basis.
//!
//! Everything here is built from matrices: the hybrid state as an explicit
//! density matrix, the displacement as the exponential of the truncated
//! generator, and the lossy detectors as binomial POVM sums. None of it shares
//! code with the closed forms in [`crate::closed_form`], which it exists to
//! cross-check.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{BellError, Result};
use crate::scalar::Scalar;
use crate::types::{
    DisplacementSetting, EfficiencyPair, MeasurementSettings, QubitSetting, Scheme,
};

type CMat<S> = Array2<Complex<S>>;

/// Fock-space cutoff plus the admissible truncated probability mass.
///
/// The underlying sums run to infinity; `dim` is where this artifact cuts them
/// off. `admits` checks the Poisson tail of a displaced coherent state against
/// `tail_tol` (tail bookkeeping is done in `f64` regardless of the scalar the
/// operators use).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    dim: usize,
    tail_tol: f64,
}

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

impl TruncationConfig {
    pub fn new(dim: usize, tail_tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(BellError::InvalidArgument(format!("dim = {dim} < 2")));
        }
        if !(tail_tol > 0.0) {
            return Err(BellError::InvalidArgument(format!(
                "tail_tol = {tail_tol} must be positive"
            )));
        }
        Ok(Self { dim, tail_tol })
    }

    /// Truncation rule: `dim = max(32, smallest N)` such that the Poisson tail
    /// of mean `(amplitude_sum + 2)^2` above `N - 1` is below 1e-12.
    /// `amplitude_sum` is `|alpha| + |beta|` for the states in play.
    pub fn for_amplitude_sum(amplitude_sum: f64) -> Self {
        let mu = (amplitude_sum.abs() + 2.0) * (amplitude_sum.abs() + 2.0);
        let mut dim = 32;
        while poisson_tail(mu, dim) >= DEFAULT_TAIL_TOL && dim < 4096 {
            dim += 1;
        }
        Self {
            dim,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Does this cutoff admit states of total coherent amplitude `amplitude_sum`?
    pub fn admits(&self, amplitude_sum: f64) -> bool {
        let mu = (amplitude_sum.abs() + 2.0) * (amplitude_sum.abs() + 2.0);
        poisson_tail(mu, self.dim) < self.tail_tol
    }

    fn check_admits(&self, amplitude_sum: f64) -> Result<()> {
        let mu = (amplitude_sum.abs() + 2.0) * (amplitude_sum.abs() + 2.0);
        let tail = poisson_tail(mu, self.dim);
        if tail < self.tail_tol {
            Ok(())
        } else {
            Err(BellError::TruncationTooSmall {
                dim: self.dim,
                amplitude: amplitude_sum,
                diagnostic: tail,
                tolerance: self.tail_tol,
            })
        }
    }
}

/// P[X >= n] for X ~ Poisson(mu).
pub fn poisson_tail(mu: f64, n: usize) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    // Sum the pmf from k = n upward in log space until terms stop mattering.
    let mut log_term = n as f64 * mu.ln() - mu - ln_factorial(n);
    let mut tail = 0.0f64;
    let mut k = n;
    loop {
        tail += log_term.exp();
        k += 1;
        log_term += mu.ln() - (k as f64).ln();
        if log_term < tail.max(1e-300).ln() - 40.0 && k > n + (2.0 * mu) as usize {
            break;
        }
        if k > n + 10_000 {
            break;
        }
    }
    tail
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Property flags an operator claims; checkable via [`FockOperator::verify_flags`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OperatorFlags {
    pub hermitian: bool,
    pub diagonal: bool,
    pub unitary: bool,
}

/// Dense complex operator on the truncated number basis.
#[derive(Debug, Clone)]
pub struct FockOperator<S> {
    dim: usize,
    entries: CMat<S>,
    flags: OperatorFlags,
}

impl<S: Scalar> FockOperator<S> {
    pub fn from_matrix(entries: CMat<S>, flags: OperatorFlags) -> Self {
        let dim = entries.nrows();
        assert_eq!(dim, entries.ncols(), "operator must be square");
        Self { dim, entries, flags }
    }

    pub fn from_real_diagonal(diag: &[S], flags: OperatorFlags) -> Self {
        let dim = diag.len();
        let mut entries = CMat::<S>::zeros((dim, dim));
        for (i, &d) in diag.iter().enumerate() {
            entries[(i, i)] = Complex::new(d, S::zero());
        }
        Self { dim, entries, flags }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(
            &vec![S::one(); dim],
            OperatorFlags {
                hermitian: true,
                diagonal: true,
                unitary: true,
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &CMat<S> {
        &self.entries
    }

    pub fn flags(&self) -> OperatorFlags {
        self.flags
    }

    pub fn dagger(&self) -> Self {
        let mut out = CMat::<S>::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self.entries[(j, i)].conj();
            }
        }
        Self::from_matrix(out, self.flags)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_matrix(self.entries.dot(&other.entries), OperatorFlags::default())
    }

    /// Conjugation U * self * U^dagger.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        let m = u.entries.dot(&self.entries).dot(&u.dagger().entries);
        Self::from_matrix(
            m,
            OperatorFlags {
                hermitian: self.flags.hermitian,
                diagonal: false,
                unitary: self.flags.unitary,
            },
        )
    }

    /// Max-norm defect of each claimed flag; hermitian/diagonal checked at
    /// 1e-10, unitarity at 1e-8.
    pub fn verify_flags(&self) -> Result<()> {
        let herm_tol = S::of(1e-10);
        if self.flags.hermitian {
            let d = max_abs_diff(&self.entries, &self.dagger().entries);
            if d > herm_tol {
                return Err(BellError::InvalidArgument(format!(
                    "hermitian flag violated: defect {d:e}"
                )));
            }
        }
        if self.flags.diagonal {
            let mut worst = S::zero();
            for i in 0..self.dim {
                for j in 0..self.dim {
                    if i != j {
                        worst = worst.max(self.entries[(i, j)].norm());
                    }
                }
            }
            if worst > herm_tol {
                return Err(BellError::InvalidArgument(format!(
                    "diagonal flag violated: defect {worst:e}"
                )));
            }
        }
        if self.flags.unitary {
            let prod = self.entries.dot(&self.dagger().entries);
            let d = unitary_defect(&prod);
            if d > S::of(1e-8) {
                return Err(BellError::InvalidArgument(format!(
                    "unitary flag violated: defect {d:e}"
                )));
            }
        }
        Ok(())
    }
}

fn max_abs_diff<S: Scalar>(a: &CMat<S>, b: &CMat<S>) -> S {
    let mut worst = S::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        worst = worst.max((*x - *y).norm());
    }
    worst
}

fn unitary_defect<S: Scalar>(prod: &CMat<S>) -> S {
    let n = prod.nrows();
    let mut worst = S::zero();
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { S::one() } else { S::zero() };
            worst = worst.max((prod[(i, j)] - Complex::new(expect, S::zero())).norm());
        }
    }
    worst
}

/// Matrix exponential by scaling-and-squaring with a Taylor series.
pub(crate) fn expm<S: Scalar>(a: &CMat<S>) -> CMat<S> {
    let n = a.nrows();
    // 1-norm controls the scaling step
    let mut norm1 = S::zero();
    for j in 0..n {
        let col: S = (0..n).map(|i| a[(i, j)].norm()).sum();
        norm1 = norm1.max(col);
    }
    let s = if norm1 > S::of(0.5) {
        (norm1 / S::of(0.5)).log2().ceil().to_f64_lossy() as usize
    } else {
        0
    };
    let scale = Complex::new(S::of(0.5).powi(s as i32), S::zero());
    let b = a.mapv(|x| x * scale);

    let mut result = CMat::<S>::eye(n);
    let mut term = CMat::<S>::eye(n);
    let eps = S::of(1e-20);
    for k in 1..=40 {
        term = term.dot(&b);
        let inv_k = Complex::new(S::one() / S::of(k as f64), S::zero());
        term.mapv_inplace(|x| x * inv_k);
        result = result + &term;
        let worst = term.iter().map(|x| x.norm()).fold(S::zero(), S::max);
        if worst < eps {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// Truncated displacement D(beta) = exp(beta a^dag - beta* a).
///
/// Built by exponentiating the truncated generator; the unitarity defect is
/// the truncation diagnostic.
pub fn displacement_operator<S: Scalar>(
    beta: Complex<S>,
    trunc: &TruncationConfig,
) -> Result<FockOperator<S>> {
    trunc.check_admits(beta.norm().to_f64_lossy())?;
    let dim = trunc.dim();
    let mut gen = CMat::<S>::zeros((dim, dim));
    for n in 0..dim - 1 {
        let root = S::of((n + 1) as f64).sqrt();
        gen[(n + 1, n)] = beta * root; // beta a^dag
        gen[(n, n + 1)] = -beta.conj() * root; // -beta* a
    }
    let entries = expm(&gen);
    let op = FockOperator::from_matrix(
        entries,
        OperatorFlags {
            hermitian: false,
            diagonal: false,
            unitary: true,
        },
    );
    let prod = op.entries.dot(&op.dagger().entries);
    let defect = unitary_defect(&prod);
    if defect > S::of(1e-8) {
        return Err(BellError::TruncationTooSmall {
            dim,
            amplitude: beta.norm().to_f64_lossy(),
            diagnostic: defect.to_f64_lossy(),
            tolerance: 1e-8,
        });
    }
    Ok(op)
}

/// POVM element of an efficiency-`p` photodetector reporting `n` counts:
/// diagonal C(n+m, n) p^n (1-p)^m at Fock index n+m.
pub fn lossy_povm_element<S: Scalar>(
    n: usize,
    p: S,
    trunc: &TruncationConfig,
) -> Result<FockOperator<S>> {
    if n >= trunc.dim() {
        return Err(BellError::InvalidArgument(format!(
            "photon count n = {n} outside truncated dimension {}",
            trunc.dim()
        )));
    }
    if !(p >= S::zero() && p <= S::one()) {
        return Err(BellError::InvalidArgument(format!(
            "efficiency p = {p} outside [0, 1]"
        )));
    }
    let dim = trunc.dim();
    let mut diag = vec![S::zero(); dim];
    // entry(k) = C(k, n) p^n (1-p)^(k-n), built by the stable recurrence
    // entry(k+1) = entry(k) (1-p) (k+1)/(k+1-n)
    let mut entry = p.powi(n as i32);
    let q = S::one() - p;
    for k in n..dim {
        diag[k] = entry;
        entry = entry * q * S::of((k + 1) as f64) / S::of((k + 1 - n) as f64);
    }
    Ok(FockOperator::from_real_diagonal(
        &diag,
        OperatorFlags {
            hermitian: true,
            diagonal: true,
            unitary: false,
        },
    ))
}

/// Effective dichotomic field measurement at efficiency `eta`, assembled by
/// direct summation of the POVM elements with +/-1 outcome weights.
pub fn effective_measurement<S: Scalar>(
    scheme: Scheme,
    eta: S,
    trunc: &TruncationConfig,
) -> Result<FockOperator<S>> {
    let dim = trunc.dim();
    let mut diag = vec![S::zero(); dim];
    for n in 0..dim {
        let weight = match scheme {
            // no-click (n = 0) reports +1, any click -1
            Scheme::OnOff => {
                if n == 0 {
                    S::one()
                } else {
                    -S::one()
                }
            }
            // even counts report +1, odd -1
            Scheme::Parity => {
                if n % 2 == 0 {
                    S::one()
                } else {
                    -S::one()
                }
            }
        };
        let element = lossy_povm_element(n, eta, trunc)?;
        for m in 0..dim {
            diag[m] = diag[m] + weight * element.entries()[(m, m)].re;
        }
    }
    Ok(FockOperator::from_real_diagonal(
        &diag,
        OperatorFlags {
            hermitian: true,
            diagonal: true,
            unitary: false,
        },
    ))
}

/// Hybrid state (|H>|alpha> + |V>|-alpha>)/sqrt(2) as an explicit density
/// matrix. Index layout: qubit slow, Fock fast — row q*dim + n.
#[derive(Debug, Clone)]
pub struct HybridState<S> {
    alpha: Complex<S>,
    dim: usize,
    matrix: CMat<S>,
}

impl<S: Scalar> HybridState<S> {
    /// Build from a (generally complex) coherent amplitude. The usual
    /// constructor for real alpha is [`HybridState::from_real`].
    pub fn new(alpha: Complex<S>, trunc: &TruncationConfig) -> Result<Self> {
        trunc.check_admits(alpha.norm().to_f64_lossy())?;
        let dim = trunc.dim();
        let plus = coherent_vector(alpha, dim);
        let minus = coherent_vector(-alpha, dim);
        let inv_sqrt2 = S::of(1.0 / std::f64::consts::SQRT_2);
        let mut psi = vec![Complex::new(S::zero(), S::zero()); 2 * dim];
        for n in 0..dim {
            psi[n] = plus[n] * inv_sqrt2; // |H> component
            psi[dim + n] = minus[n] * inv_sqrt2; // |V> component
        }
        let mut matrix = CMat::<S>::zeros((2 * dim, 2 * dim));
        for i in 0..2 * dim {
            for j in 0..2 * dim {
                matrix[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Ok(Self { alpha, dim, matrix })
    }

    pub fn from_real(alpha: S, trunc: &TruncationConfig) -> Result<Self> {
        if !(alpha >= S::zero()) {
            return Err(BellError::InvalidArgument(format!(
                "alpha = {alpha} must be nonnegative"
            )));
        }
        Self::new(Complex::new(alpha, S::zero()), trunc)
    }

    pub fn alpha(&self) -> Complex<S> {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat<S> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex<S> {
        let mut t = Complex::new(S::zero(), S::zero());
        for i in 0..2 * self.dim {
            t += self.matrix[(i, i)];
        }
        t
    }

    /// Field marginal rho_B = Tr_A(rho).
    pub fn reduced_field(&self) -> CMat<S> {
        let d = self.dim;
        let mut out = CMat::<S>::zeros((d, d));
        for n in 0..d {
            for m in 0..d {
                out[(n, m)] = self.matrix[(n, m)] + self.matrix[(d + n, d + m)];
            }
        }
        out
    }
}

fn coherent_vector<S: Scalar>(alpha: Complex<S>, dim: usize) -> Vec<Complex<S>> {
    // entries e^{-|alpha|^2/2} alpha^n / sqrt(n!)
    let mut v = vec![Complex::new(S::zero(), S::zero()); dim];
    let norm = (-alpha.norm_sqr() / S::of(2.0)).exp();
    v[0] = Complex::new(norm, S::zero());
    for n in 1..dim {
        let scale = Complex::new(S::one() / S::of(n as f64).sqrt(), S::zero());
        v[n] = v[n - 1] * alpha * scale;
    }
    v
}

/// Qubit observable U(xi) Pi_A U(xi)^dagger with Pi_A = |H><H| - |V><V|.
fn qubit_observable<S: Scalar>(xi: &QubitSetting<S>) -> [[Complex<S>; 2]; 2] {
    let (theta, phi) = (xi.theta(), xi.phi());
    let ct = theta.cos();
    let st = theta.sin();
    // entries derived from U = [[cos(t/2), -e^{-i phi} sin(t/2)],
    //                           [e^{i phi} sin(t/2), cos(t/2)]]
    [
        [
            Complex::new(ct, S::zero()),
            Complex::new(st * phi.cos(), -st * phi.sin()),
        ],
        [
            Complex::new(st * phi.cos(), st * phi.sin()),
            Complex::new(-ct, S::zero()),
        ],
    ]
}

fn field_observable<S: Scalar>(
    scheme: Scheme,
    beta: &DisplacementSetting<S>,
    eta_b: S,
    trunc: &TruncationConfig,
) -> Result<FockOperator<S>> {
    let pi_eff = effective_measurement(scheme, eta_b, trunc)?;
    let b = Complex::new(
        beta.magnitude() * beta.phase().cos(),
        beta.magnitude() * beta.phase().sin(),
    );
    let d = displacement_operator(b, trunc)?;
    Ok(pi_eff.conjugate_by(&d))
}

fn expectation_with_state<S: Scalar>(
    state: &HybridState<S>,
    xi: &QubitSetting<S>,
    field_obs: &FockOperator<S>,
    eta_a: S,
) -> S {
    let d = state.dim();
    let o_a = qubit_observable(xi);
    let o_b = field_obs.entries();
    let rho = state.matrix();

    // joint term: Tr[rho (O_A x O_B)] with qubit index slow
    let mut joint = Complex::new(S::zero(), S::zero());
    for q in 0..2 {
        for r in 0..2 {
            let oa = o_a[r][q];
            if oa.norm() == S::zero() {
                continue;
            }
            for n in 0..d {
                for m in 0..d {
                    joint += rho[(q * d + n, r * d + m)] * oa * o_b[(m, n)];
                }
            }
        }
    }

    // marginal term: Tr_B[O_B rho_B]
    let rho_b = state.reduced_field();
    let mut marg = Complex::new(S::zero(), S::zero());
    for n in 0..d {
        for m in 0..d {
            marg += o_b[(n, m)] * rho_b[(m, n)];
        }
    }

    let value = eta_a * joint.re + (S::one() - eta_a) * marg.re;
    debug_assert!(
        (eta_a * joint.im + (S::one() - eta_a) * marg.im).abs() < S::of(1e-9),
        "expectation should be real"
    );
    value
}

/// Brute-force expectation value of the joint measurement: the oracle
/// counterpart of [`crate::closed_form::expectation_effective`].
pub fn joint_expectation_oracle<S: Scalar>(
    alpha: S,
    xi: &QubitSetting<S>,
    beta: &DisplacementSetting<S>,
    scheme: Scheme,
    effs: &EfficiencyPair<S>,
    trunc: &TruncationConfig,
) -> Result<S> {
    trunc.check_admits(alpha.abs().to_f64_lossy() + beta.magnitude().to_f64_lossy())?;
    let state = HybridState::from_real(alpha, trunc)?;
    let obs = field_observable(scheme, beta, effs.eta_b(), trunc)?;
    Ok(expectation_with_state(&state, xi, &obs, effs.eta_a()))
}

/// Brute-force CHSH value. Shares one state and one effective POVM across the
/// four correlators but nothing with the closed forms.
pub fn bell_oracle<S: Scalar>(
    alpha: S,
    settings: &MeasurementSettings<S>,
    effs: &EfficiencyPair<S>,
    trunc: &TruncationConfig,
) -> Result<S> {
    let state = HybridState::from_real(alpha, trunc)?;
    bell_oracle_with_state(&state, settings, effs, trunc)
}

/// CHSH oracle on a prebuilt state; the state may carry a complex amplitude,
/// which is how the phase-covariance property is exercised.
pub fn bell_oracle_with_state<S: Scalar>(
    state: &HybridState<S>,
    settings: &MeasurementSettings<S>,
    effs: &EfficiencyPair<S>,
    trunc: &TruncationConfig,
) -> Result<S> {
    let max_mag = settings
        .beta1
        .magnitude()
        .max(settings.beta2.magnitude())
        .to_f64_lossy();
    trunc.check_admits(state.alpha().norm().to_f64_lossy() + max_mag)?;
    let obs1 = field_observable(settings.scheme, &settings.beta1, effs.eta_b(), trunc)?;
    let obs2 = field_observable(settings.scheme, &settings.beta2, effs.eta_b(), trunc)?;
    let e = |xi: &QubitSetting<S>, obs: &FockOperator<S>| {
        expectation_with_state(state, xi, obs, effs.eta_a())
    };
    Ok(e(&settings.xi1, &obs1) + e(&settings.xi1, &obs2) + e(&settings.xi2, &obs2)
        - e(&settings.xi2, &obs1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn trunc(dim: usize) -> TruncationConfig {
        // loose tail budget: these tests pick dims directly
        TruncationConfig::new(dim, 1e-3).unwrap()
    }

    #[test]
    fn truncation_rule_grows_with_amplitude() {
        let small = TruncationConfig::for_amplitude_sum(0.0);
        assert_eq!(small.dim(), 32);
        let big = TruncationConfig::for_amplitude_sum(3.0);
        assert!(big.dim() > 32);
        assert!(big.admits(3.0));
        assert!(!small.admits(6.0));
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let op = displacement_operator(num_complex::Complex64::new(0.0, 0.0), &trunc(16)).unwrap();
        let defect = max_abs_diff(op.entries(), FockOperator::<f64>::identity(16).entries());
        assert!(defect < 1e-14);
    }

    #[test]
    fn vacuum_overlap_matches_coherent_identity() {
        let op = displacement_operator(num_complex::Complex64::new(1.0, 0.0), &trunc(48)).unwrap();
        let got = op.entries()[(0, 0)].re;
        assert!((got - (-0.5f64).exp()).abs() < 1e-10, "got {got}");
    }

    #[test]
    fn displacement_inverse_composes_to_identity() {
        let beta = num_complex::Complex64::new(0.7, 0.3);
        let t = trunc(64);
        let d = displacement_operator(beta, &t).unwrap();
        let dinv = displacement_operator(-beta, &t).unwrap();
        let prod = d.mul(&dinv);
        let defect = max_abs_diff(prod.entries(), FockOperator::<f64>::identity(64).entries());
        assert!(defect < 1e-8, "defect {defect:e}");
    }

    #[test]
    fn displacement_flags_verify() {
        let op =
            displacement_operator(num_complex::Complex64::new(0.4, -0.9), &trunc(64)).unwrap();
        op.verify_flags().unwrap();
    }

    #[test]
    fn perfect_detector_povm_is_projector() {
        let t = trunc(16);
        for n in [0usize, 3, 7] {
            let e = lossy_povm_element(n, 1.0f64, &t).unwrap();
            for m in 0..16 {
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((e.entries()[(m, m)].re - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_count_povm_is_geometric() {
        let t = trunc(16);
        let p = 0.35f64;
        let e = lossy_povm_element(0, p, &t).unwrap();
        for m in 0..16 {
            assert!((e.entries()[(m, m)].re - (1.0 - p).powi(m as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn povm_completeness_by_direct_summation() {
        let t = trunc(32);
        let p = 0.6f64;
        let mut sum = vec![0.0f64; 32];
        for n in 0..32 {
            let e = lossy_povm_element(n, p, &t).unwrap();
            for m in 0..32 {
                sum[m] += e.entries()[(m, m)].re;
            }
        }
        for (m, s) in sum.iter().enumerate() {
            assert!((s - 1.0).abs() < 1e-12, "index {m}: {s}");
        }
    }

    #[test]
    fn effective_onoff_limits() {
        let t = trunc(16);
        let ideal = effective_measurement(Scheme::OnOff, 1.0f64, &t).unwrap();
        assert!((ideal.entries()[(0, 0)].re - 1.0).abs() < 1e-14);
        for m in 1..16 {
            assert!((ideal.entries()[(m, m)].re + 1.0).abs() < 1e-14);
        }
        let blind = effective_measurement(Scheme::OnOff, 0.0f64, &t).unwrap();
        for m in 0..16 {
            assert!((blind.entries()[(m, m)].re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn effective_parity_half_efficiency() {
        let t = trunc(16);
        let op = effective_measurement(Scheme::Parity, 0.5f64, &t).unwrap();
        assert!((op.entries()[(0, 0)].re - 1.0).abs() < 1e-14);
        for m in 1..16 {
            assert!(op.entries()[(m, m)].re.abs() < 1e-14);
        }
    }

    #[test]
    fn effective_diagonals_match_closed_identities() {
        let t = trunc(64);
        for k in 0..=10 {
            let eta = k as f64 / 10.0;
            let onoff = effective_measurement(Scheme::OnOff, eta, &t).unwrap();
            let parity = effective_measurement(Scheme::Parity, eta, &t).unwrap();
            for m in 0..64 {
                let on_expected = 2.0 * (1.0 - eta).powi(m as i32) - 1.0;
                let par_expected = (1.0 - 2.0 * eta).powi(m as i32);
                assert!(
                    (onoff.entries()[(m, m)].re - on_expected).abs() < 1e-10,
                    "onoff eta={eta} m={m}"
                );
                assert!(
                    (parity.entries()[(m, m)].re - par_expected).abs() < 1e-10,
                    "parity eta={eta} m={m}"
                );
            }
        }
    }

    #[test]
    fn hybrid_state_is_a_valid_pure_density_matrix() {
        let t = TruncationConfig::for_amplitude_sum(0.8);
        let state = HybridState::from_real(0.8f64, &t).unwrap();
        let tr = state.trace();
        assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-12);
        // hermitian
        let rho = state.matrix();
        for i in 0..2 * state.dim() {
            for j in 0..2 * state.dim() {
                assert!((rho[(i, j)] - rho[(j, i)].conj()).norm() < 1e-12);
            }
        }
        // purity => positive semidefinite for a hermitian matrix
        let rho2 = rho.dot(rho);
        let mut tr2 = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..2 * state.dim() {
            tr2 += rho2[(i, i)];
        }
        assert!((tr2.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn vacuum_field_onoff_reports_unity() {
        let t = trunc(32);
        let e = joint_expectation_oracle(
            0.0f64,
            &QubitSetting::new(FRAC_PI_2, 0.0),
            &DisplacementSetting::new(0.0, 0.0),
            Scheme::OnOff,
            &EfficiencyPair::perfect(),
            &t,
        )
        .unwrap();
        assert!((e - 1.0).abs() < 1e-10);
    }

    #[test]
    fn parity_maps_minus_alpha_to_alpha() {
        let t = TruncationConfig::for_amplitude_sum(0.8);
        let e = joint_expectation_oracle(
            0.8f64,
            &QubitSetting::new(FRAC_PI_2, 0.0),
            &DisplacementSetting::new(0.0, 1.3),
            Scheme::Parity,
            &EfficiencyPair::perfect(),
            &t,
        )
        .unwrap();
        assert!((e - 1.0).abs() < 1e-10, "E = {e}");
    }

    #[test]
    fn degenerate_settings_keep_bell_at_most_two() {
        let t = TruncationConfig::for_amplitude_sum(1.1);
        let xi = QubitSetting::new(1.0, 0.3);
        let beta = DisplacementSetting::new(0.6, 2.0);
        let settings = MeasurementSettings {
            xi1: xi,
            xi2: xi,
            beta1: beta,
            beta2: beta,
            scheme: Scheme::OnOff,
        };
        let b = bell_oracle(
            0.5f64,
            &settings,
            &EfficiencyPair::new(0.8, 0.7).unwrap(),
            &t,
        )
        .unwrap();
        assert!(b.abs() <= 2.0 + 1e-10);
    }

    #[test]
    fn truncation_failure_is_reported() {
        let t = trunc(8);
        let err = joint_expectation_oracle(
            2.0f64,
            &QubitSetting::new(1.0, 0.0),
            &DisplacementSetting::new(1.0, 0.0),
            Scheme::OnOff,
            &EfficiencyPair::perfect(),
            &t,
        );
        assert!(matches!(err, Err(BellError::TruncationTooSmall { .. })));
    }

    #[test]
    fn oracle_is_affine_in_eta_a() {
        let t = trunc(32);
        let xi = QubitSetting::new(1.1, 0.4);
        let beta = DisplacementSetting::new(0.5, 2.0);
        for scheme in [Scheme::OnOff, Scheme::Parity] {
            let at = |eta_a: f64| {
                joint_expectation_oracle(
                    0.6,
                    &xi,
                    &beta,
                    scheme,
                    &EfficiencyPair::new(eta_a, 0.75).unwrap(),
                    &t,
                )
                .unwrap()
            };
            let eta_a = 0.37;
            let lhs = at(eta_a);
            let rhs = eta_a * at(1.0) + (1.0 - eta_a) * at(0.0);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
