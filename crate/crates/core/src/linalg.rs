//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], CMatrix::zeros(0, 0));
    }
    let herm = (m + m.adjoint()) * c(0.5);
    let mut eig = SymmetricEigen::new(herm.clone());
    if !eigen_is_finite(&eig) {
        // the complex Householder step can divide 0/0 on sparse input;
        // a fixed random unitary change of basis removes the zero pivots
        let q = scrambling_unitary(n);
        let rotated = q.adjoint() * &herm * &q;
        let inner = SymmetricEigen::new((&rotated + rotated.adjoint()) * c(0.5));
        eig = SymmetricEigen { eigenvectors: q * inner.eigenvectors, eigenvalues: inner.eigenvalues };
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

fn eigen_is_finite(eig: &SymmetricEigen<Complex64, nalgebra::Dyn>) -> bool {
    eig.eigenvalues.iter().all(|v| v.is_finite())
        && eig.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn scrambling_unitary(n: usize) -> CMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_u64 ^ n as u64);
    let raw = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    raw.qr().q()
}

/// Null space of `m` by singular-value thresholding at `rel_tol` times the
/// largest singular value. Returns orthonormal basis columns and the
/// singular values sorted descending (padded with zeros to `ncols`).
pub fn null_space(m: &CMatrix, rel_tol: f64) -> (CMatrix, Vec<f64>) {
    let cols = m.ncols();
    if cols == 0 {
        return (CMatrix::zeros(0, 0), vec![]);
    }
    // pad so that the SVD returns a full set of right singular vectors
    let rows = m.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let cutoff = rel_tol * sigma[0].max(f64::MIN_POSITIVE);
    let null: Vec<usize> = order.iter().copied().filter(|&i| svd.singular_values[i] <= cutoff).collect();
    let basis = CMatrix::from_fn(cols, null.len(), |r, k| v_t[(null[k], r)].conj());
    (basis, sigma)
}

/// Factorization of a Hermitian positive semidefinite Gram matrix
/// `M ≈ Qᴴ Q` with `Q = Λ^{1/2} Uᴴ` restricted to the kept eigenvalues.
#[derive(Debug, Clone)]
pub struct PsdFactor {
    /// `r × N`: coordinates in the quotient from spanning-family coefficients.
    pub coords: CMatrix,
    /// `N × r`: a coefficient representative of each quotient basis vector.
    pub lift: CMatrix,
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// `N × (N - r)`: orthonormal basis of the numerical null space.
    pub null_vectors: CMatrix,
}

impl PsdFactor {
    pub fn new(gram: &CMatrix, rel_tol: f64) -> Self {
        let n = gram.nrows();
        let (values, vectors) = hermitian_eigen(gram);
        let largest = values.last().copied().unwrap_or(0.0).max(0.0);
        let cutoff = rel_tol * largest;
        let keep: Vec<usize> = (0..n).filter(|&i| largest > 0.0 && values[i] > cutoff).collect();
        let drop: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
        let coords = CMatrix::from_fn(keep.len(), n, |k, j| vectors[(j, keep[k])].conj() * values[keep[k]].sqrt());
        let lift = CMatrix::from_fn(n, keep.len(), |j, k| vectors[(j, keep[k])] / values[keep[k]].sqrt());
        let null_vectors = CMatrix::from_fn(n, drop.len(), |j, k| vectors[(j, drop[k])]);
        Self { coords, lift, eigenvalues: values, null_vectors }
    }

    pub fn rank(&self) -> usize {
        self.coords.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Matrix in the quotient basis of an operator given on the spanning family.
    pub fn descend(&self, op: &CMatrix) -> CMatrix {
        &self.coords * op * &self.lift
    }
}

/// `A ⊗ I_d` with index `(i, a) ↦ i * d + a`.
pub fn kron_identity(a: &CMatrix, d: usize) -> CMatrix {
    CMatrix::from_fn(a.nrows() * d, a.ncols() * d, |r, col| if r % d == col % d { a[(r / d, col / d)] } else { ZERO })
}

/// Block-diagonal sum.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}
