//! Circulant matrices and their DFT eigenstructure.
//!
//! A circulant is fixed by its first row `(c_0, ..., c_{n-1})`; each row is the
//! row above shifted one place to the right, so `C[i][j] = c[(j - i) mod n]`.
//! With that layout the vectors `y_j = z^j / sqrt(n)`, `z = exp(-2 pi i r / n)`,
//! are eigenvectors for every circulant of size `n`, with eigenvalue
//! `sum_k c_k z^k`, which is the DFT of the first row.

use num_complex::Complex;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CirculantRow<T> {
    first_row: Vec<Complex<T>>,
}

/// `exp(-2 pi i m / n)` with `m` reduced modulo `n` before scaling, which keeps
/// the phase accurate for large index products.
pub(crate) fn root_of_unity<T: Real>(m: usize, n: usize) -> Complex<T> {
    let m = m % n;
    let angle = -T::lit(2.0) * T::PI() * T::from_usize(m) / T::from_usize(n);
    Complex::new(angle.cos(), angle.sin())
}

impl<T: Real> CirculantRow<T> {
    pub fn new(first_row: Vec<Complex<T>>) -> Self {
        assert!(!first_row.is_empty(), "circulant needs at least one entry");
        Self { first_row }
    }

    pub fn from_real(first_row: &[T]) -> Self {
        Self::new(
            first_row
                .iter()
                .map(|&c| Complex::new(c, T::zero()))
                .collect(),
        )
    }

    /// Row `(-q, q, 0, ..., 0)` of a counting chain that steps `c -> c + 1`
    /// at rate `q` on a ring of `n` sites.
    pub fn shift_generator(q: T, n: usize) -> Self {
        let mut row = vec![Complex::new(T::zero(), T::zero()); n];
        if n == 1 {
            // The up-step wraps onto itself.
            return Self::new(row);
        }
        row[0] = Complex::new(-q, T::zero());
        row[1] = Complex::new(q, T::zero());
        Self::new(row)
    }

    pub fn len(&self) -> usize {
        self.first_row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first_row.is_empty()
    }

    pub fn first_row(&self) -> &[Complex<T>] {
        &self.first_row
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        let n = self.len();
        self.first_row[(j + n - i % n) % n]
    }

    /// Eigenvalues `lambda_r = sum_k c_k exp(-2 pi i r k / n)` for `r = 0..n`.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        let n = self.len();
        (0..n).map(|r| self.eigenvalue(r)).collect()
    }

    pub fn eigenvalue(&self, r: usize) -> Complex<T> {
        let n = self.len();
        self.first_row
            .iter()
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (k, &c)| {
                acc + c * root_of_unity::<T>(r * k, n)
            })
    }

    /// Recovers the first row from a spectrum by the inverse DFT.
    pub fn from_spectrum(spectrum: &[Complex<T>]) -> Self {
        let n = spectrum.len();
        let scale = T::one() / T::from_usize(n);
        let row = (0..n)
            .map(|l| {
                let sum = spectrum
                    .iter()
                    .enumerate()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (r, &lam)| {
                        // exp(+2 pi i r l / n) = exp(-2 pi i (n - r l mod n) / n)
                        acc + lam * root_of_unity::<T>(n - (r * l) % n, n)
                    });
                sum * scale
            })
            .collect();
        Self::new(row)
    }

    /// Dense row-major materialization.
    pub fn to_dense(&self) -> Vec<Vec<Complex<T>>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// Coordinate `j` of the `r`-th shared circulant eigenvector,
/// `exp(-2 pi i r j / n) / sqrt(n)`.
pub fn eigenvector_entry<T: Real>(n: usize, r: usize, j: usize) -> Complex<T> {
    root_of_unity::<T>(r * j, n) * (T::one() / T::from_usize(n).sqrt())
}

/// The full shared eigenvector `y^(r)` of size `n`.
pub fn eigenvector<T: Real>(n: usize, r: usize) -> Vec<Complex<T>> {
    (0..n).map(|j| eigenvector_entry(n, r, j)).collect()
}

/// Free-function form of [`CirculantRow::spectrum`].
pub fn circulant_spectrum<T: Real>(row: &CirculantRow<T>) -> Vec<Complex<T>> {
    row.spectrum()
}
