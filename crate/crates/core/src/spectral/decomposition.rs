use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, MatRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, VolspecError};
use crate::C64;

/// Relative residual bound for `A U = U diag(lambda)` and `U U^-1 = I`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Eigenvector condition estimate above which the perturbation retry kicks in.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Relative size of the off-diagonal perturbation used by the retry.
pub const PERTURBATION: f64 = 1e-12;
/// Kernels whose imaginary part exceeds this are rejected.
pub const RESIDUE_ERROR: f64 = 1e-6;
/// Negative kernel entries down to this size are rounding noise.
pub const KERNEL_NEGATIVE_TOL: f64 = 1e-10;

/// Eigendecomposition `A = U diag(lambda) U^-1` of a dense square matrix.
///
/// Columns of `U` are right eigenvectors `u_n`; rows of `U^-1` are the dual
/// vectors `v_n`, so `phi(A) = sum_n phi(lambda_n) u_n v_n`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<C64>,
    right: Mat<C64>,
    inverse: Mat<C64>,
    condition: f64,
    perturbed: bool,
}

/// Health of a reconstructed transition kernel.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KernelDiagnostics {
    /// max over rows of |row sum - 1|
    pub max_row_sum_error: f64,
    /// smallest entry before clamping
    pub min_entry: f64,
    /// largest |imaginary part| before truncation
    pub imaginary_residue: f64,
}

impl Default for KernelDiagnostics {
    fn default() -> Self {
        Self {
            max_row_sum_error: 0.0,
            min_entry: 0.0,
            imaginary_residue: 0.0,
        }
    }
}

impl KernelDiagnostics {
    /// Worst-case combination of two reports.
    pub fn merge(self, other: Self) -> Self {
        Self {
            max_row_sum_error: self.max_row_sum_error.max(other.max_row_sum_error),
            min_entry: self.min_entry.min(other.min_entry),
            imaginary_residue: self.imaginary_residue.max(other.imaginary_residue),
        }
    }

    /// Row sums within 1e-8, entries above -1e-10, residue below 1e-8.
    pub fn is_valid(&self) -> bool {
        self.max_row_sum_error <= 1e-8
            && self.min_entry >= -KERNEL_NEGATIVE_TOL
            && self.imaginary_residue <= 1e-8
    }
}

/// Real stochastic matrix `exp(dt A)` with its diagnostics.
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    pub matrix: Mat<f64>,
    pub diagnostics: KernelDiagnostics,
}

pub(crate) fn inf_norm(a: MatRef<'_, C64>) -> f64 {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn to_complex(a: MatRef<'_, f64>) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(a[(i, j)], 0.0))
}

struct Attempt {
    eigenvalues: Vec<C64>,
    right: Mat<C64>,
    inverse: Mat<C64>,
    condition: f64,
    residual: f64,
    identity_residual: f64,
}

fn attempt(target: MatRef<'_, C64>, check_against: MatRef<'_, C64>) -> Result<Attempt> {
    let n = target.nrows();
    let evd = target
        .eigen()
        .map_err(|e| VolspecError::Diagonalization {
            condition: f64::INFINITY,
            detail: format!("eigensolver did not converge: {e:?}"),
        })?;
    let eigenvalues: Vec<C64> = evd.S().column_vector().iter().copied().collect();
    let mut right = evd.U().to_owned();
    for j in 0..n {
        let norm = (0..n).map(|i| right[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                right[(i, j)] /= norm;
            }
        }
    }
    let mut inverse = right.partial_piv_lu().inverse();
    // One Newton-Schulz step, X <- X (2I - U X), squares the inverse error.
    let mut correction = &right * &inverse;
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 2.0 } else { 0.0 };
            correction[(i, j)] = C64::new(id, 0.0) - correction[(i, j)];
        }
    }
    inverse = &inverse * &correction;
    let condition = inf_norm(right.as_ref()) * inf_norm(inverse.as_ref());

    let scale = inf_norm(check_against).max(f64::MIN_POSITIVE);
    let au = check_against * &right;
    let mut residual: f64 = 0.0;
    for i in 0..n {
        let row: f64 = (0..n)
            .map(|j| (au[(i, j)] - right[(i, j)] * eigenvalues[j]).norm())
            .sum();
        residual = residual.max(row);
    }
    let residual = residual / scale;

    let uu = &right * &inverse;
    let mut identity_residual: f64 = 0.0;
    for i in 0..n {
        let row: f64 = (0..n)
            .map(|j| {
                let target = if i == j { 1.0 } else { 0.0 };
                (uu[(i, j)] - C64::new(target, 0.0)).norm()
            })
            .sum();
        identity_residual = identity_residual.max(row);
    }

    Ok(Attempt {
        eigenvalues,
        right,
        inverse,
        condition,
        residual,
        identity_residual,
    })
}

impl Attempt {
    fn acceptable(&self) -> bool {
        self.condition.is_finite()
            && self.condition <= CONDITION_LIMIT
            && self.residual <= RESIDUAL_TOL
            && self.identity_residual <= RESIDUAL_TOL
    }
}

/// Diagonalizes a square complex matrix.
///
/// If the eigenvector matrix comes back numerically singular the off-diagonal
/// entries are perturbed once by i.i.d. noise of size `1e-12 * ||A||_inf` (the
/// residuals are still measured against the unperturbed `A`).
pub fn diagonalize(a: MatRef<'_, C64>) -> Result<SpectralDecomposition> {
    if a.nrows() != a.ncols() {
        return Err(VolspecError::Domain(format!(
            "cannot diagonalize a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if (0..a.nrows()).any(|i| (0..a.ncols()).any(|j| !a[(i, j)].is_finite())) {
        return Err(VolspecError::Domain("matrix has non-finite entries".into()));
    }
    let first = attempt(a, a)?;
    if first.acceptable() {
        return Ok(SpectralDecomposition::from_attempt(first, false));
    }

    let n = a.nrows();
    let magnitude = PERTURBATION * inf_norm(a);
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57_ab1e);
    let perturbed = Mat::from_fn(n, n, |i, j| {
        if i == j {
            a[(i, j)]
        } else {
            a[(i, j)] + C64::new(magnitude * rng.gen_range(-1.0..1.0), 0.0)
        }
    });
    let second = attempt(perturbed.as_ref(), a)?;
    if second.acceptable() {
        return Ok(SpectralDecomposition::from_attempt(second, true));
    }
    Err(VolspecError::Diagonalization {
        condition: second.condition,
        detail: format!(
            "eigen residual {:.2e}, U*U^-1 residual {:.2e} after perturbation retry",
            second.residual, second.identity_residual
        ),
    })
}

pub fn diagonalize_real(a: MatRef<'_, f64>) -> Result<SpectralDecomposition> {
    diagonalize(to_complex(a).as_ref())
}

impl SpectralDecomposition {
    fn from_attempt(a: Attempt, perturbed: bool) -> Self {
        Self {
            eigenvalues: a.eigenvalues,
            right: a.right,
            inverse: a.inverse,
            condition: a.condition,
            perturbed,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn right_vectors(&self) -> MatRef<'_, C64> {
        self.right.as_ref()
    }

    pub fn inverse_rows(&self) -> MatRef<'_, C64> {
        self.inverse.as_ref()
    }

    /// `||U||_inf * ||U^-1||_inf`
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Whether the perturbation retry was needed.
    pub fn was_perturbed(&self) -> bool {
        self.perturbed
    }

    /// Complex conjugate decomposition, i.e. that of `conj(A)`.
    pub fn conjugate(&self) -> Self {
        let n = self.dim();
        Self {
            eigenvalues: self.eigenvalues.iter().map(|l| l.conj()).collect(),
            right: Mat::from_fn(n, n, |i, j| self.right[(i, j)].conj()),
            inverse: Mat::from_fn(n, n, |i, j| self.inverse[(i, j)].conj()),
            condition: self.condition,
            perturbed: self.perturbed,
        }
    }

    /// `U diag(values) U^-1`.
    pub fn apply_function(&self, values: &[C64]) -> Result<Mat<C64>> {
        let n = self.dim();
        if values.len() != n {
            return Err(VolspecError::Domain(format!(
                "expected {n} spectral values, got {}",
                values.len()
            )));
        }
        let scaled = Mat::from_fn(n, n, |i, j| self.right[(i, j)] * values[j]);
        Ok(&scaled * &self.inverse)
    }

    /// `U phi(Lambda) U^-1` for a scalar function of the eigenvalues.
    pub fn apply(&self, phi: impl Fn(C64) -> C64) -> Mat<C64> {
        let values: Vec<C64> = self.eigenvalues.iter().map(|&l| phi(l)).collect();
        self.apply_function(&values).expect("dimension matches")
    }

    /// Row `i` of `exp(dt A)` in complex arithmetic.
    pub fn exp_row(&self, i: usize, dt: f64) -> Vec<C64> {
        let n = self.dim();
        let weights: Vec<C64> = (0..n)
            .map(|m| self.right[(i, m)] * (self.eigenvalues[m] * dt).exp())
            .collect();
        (0..n)
            .map(|j| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(m, w)| w * self.inverse[(m, j)])
                    .sum()
            })
            .collect()
    }

    /// Full `exp(dt A)` in complex arithmetic.
    pub fn exp_matrix(&self, dt: f64) -> Mat<C64> {
        self.apply(|l| (l * dt).exp())
    }

    /// `exp(dt A)` for a generator `A`, truncated to a real stochastic matrix.
    pub fn transition_kernel(&self, dt: f64) -> Result<TransitionKernel> {
        if dt < 0.0 || !dt.is_finite() {
            return Err(VolspecError::Domain(format!("kernel horizon {dt} is not >= 0")));
        }
        let n = self.dim();
        if dt == 0.0 {
            return Ok(TransitionKernel {
                matrix: Mat::identity(n, n),
                diagnostics: KernelDiagnostics::default(),
            });
        }
        let full = self.exp_matrix(dt);
        let mut diagnostics = KernelDiagnostics::default();
        let mut matrix = Mat::zeros(n, n);
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                let z = full[(i, j)];
                diagnostics.imaginary_residue = diagnostics.imaginary_residue.max(z.im.abs());
                diagnostics.min_entry = diagnostics.min_entry.min(z.re);
                row_sum += z.re;
                matrix[(i, j)] = z.re.max(0.0);
            }
            diagnostics.max_row_sum_error = diagnostics.max_row_sum_error.max((row_sum - 1.0).abs());
        }
        check_residue(diagnostics.imaginary_residue)?;
        Ok(TransitionKernel {
            matrix,
            diagnostics,
        })
    }

    /// Row `i` of the transition kernel over `dt`, truncated to real.
    pub fn kernel_row(&self, i: usize, dt: f64) -> Result<(Vec<f64>, KernelDiagnostics)> {
        if dt < 0.0 || !dt.is_finite() {
            return Err(VolspecError::Domain(format!("kernel horizon {dt} is not >= 0")));
        }
        let n = self.dim();
        if dt == 0.0 {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            return Ok((row, KernelDiagnostics::default()));
        }
        let complex = self.exp_row(i, dt);
        let mut diagnostics = KernelDiagnostics::default();
        let mut sum = 0.0;
        let row = complex
            .iter()
            .map(|z| {
                diagnostics.imaginary_residue = diagnostics.imaginary_residue.max(z.im.abs());
                diagnostics.min_entry = diagnostics.min_entry.min(z.re);
                sum += z.re;
                z.re.max(0.0)
            })
            .collect();
        diagnostics.max_row_sum_error = (sum - 1.0).abs();
        check_residue(diagnostics.imaginary_residue)?;
        Ok((row, diagnostics))
    }
}

fn check_residue(residue: f64) -> Result<()> {
    if residue > RESIDUE_ERROR {
        return Err(VolspecError::Numerical(format!(
            "kernel imaginary residue {residue:.3e} exceeds {RESIDUE_ERROR:.0e}"
        )));
    }
    Ok(())
}

/// Free-function form of [`SpectralDecomposition::apply_function`].
pub fn apply_function(dec: &SpectralDecomposition, values: &[C64]) -> Result<Mat<C64>> {
    dec.apply_function(values)
}

/// Free-function form of [`SpectralDecomposition::transition_kernel`].
pub fn transition_kernel(dec: &SpectralDecomposition, dt_financial: f64) -> Result<TransitionKernel> {
    dec.transition_kernel(dt_financial)
}
