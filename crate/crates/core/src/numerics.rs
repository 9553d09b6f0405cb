//! Dense complex linear algebra used by the beamformers: Hermitian
//! eigenvectors, null-space bases, whitening filters and the generalized
//! Rayleigh-quotient maximizer.
//!
//! Every returned vector is unit-norm with canonical phase: its
//! largest-magnitude entry (lowest index on ties) is real and positive.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Entrywise Hermitian tolerance, relative to `max(1, max |a_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Singular values at or below `RANK_TOL * sigma_max` count as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Eigenvalues within this (relative) gap of the maximum are treated as tied.
pub const TIE_TOL: f64 = 1e-10;
/// Positive-definiteness threshold factor: `eps_pd = PD_TOL * trace / n`.
pub const PD_TOL: f64 = 1e-12;
/// Above this 2-norm condition number the generalized solve switches to the
/// Cholesky-symmetrized route.
pub const COND_FALLBACK: f64 = 1e10;

/// Square complex matrix equal to its own conjugate transpose.
///
/// Construction symmetrizes the input so downstream eigen-solvers see an
/// exactly Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let n = m.nrows();
        let mut asym = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::symmetrized(m))
    }

    /// `X X^H`.
    pub fn gram(x: &CMatrix) -> Self {
        Self::symmetrized(x * x.adjoint())
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let v = CVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0)));
        Self(CMatrix::from_diagonal(&v))
    }

    fn symmetrized(m: CMatrix) -> Self {
        let h = (&m + m.adjoint()).scale(0.5);
        Self(h)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// `v^H A v`, which is real for Hermitian `A`.
    pub fn quad_form(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.0 * v)).re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn plus_identity(&self, s: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += C64::new(s, 0.0);
        }
        Self(m)
    }

    /// Eigenvalues in decomposition order with matching eigenvector columns.
    fn eigen(&self) -> (DVector<f64>, CMatrix) {
        let eig = self.0.clone().symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors)
    }

    fn pd_threshold(&self) -> f64 {
        PD_TOL * self.trace().abs() / self.dim() as f64
    }
}

/// Columns with orthonormal complex entries. May have zero columns, which
/// callers treat as "no feasible direction".
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    columns: CMatrix,
}

impl OrthonormalBasis {
    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn into_columns(self) -> CMatrix {
        self.columns
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn width(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.width() == 0
    }
}

/// Null-space basis together with the numerical rank that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSpace {
    pub basis: OrthonormalBasis,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub vector: CVector,
    pub value: f64,
}

/// Which route `gen_max_eigvec` took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenEigenRoute {
    /// Dominant eigenvector of `Den^{-1} Num`.
    Direct,
    /// Dominant eigenvector of `L^{-1} Num L^{-H}` with `Den = L L^H`.
    Symmetrized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedPair {
    pub vector: CVector,
    /// The maximal quotient `v^H Num v / v^H Den v`.
    pub ratio: f64,
    pub route: GenEigenRoute,
}

pub fn norm(v: &CVector) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Scales `v` to unit norm and rotates it so the first entry of (relatively)
/// maximal magnitude is real and positive. A zero vector is left unchanged.
pub fn canonicalize(mut v: CVector) -> CVector {
    let n = norm(&v);
    if n == 0.0 {
        return v;
    }
    v.unscale_mut(n);
    let peak = v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let pivot = v
        .iter()
        .position(|z| z.norm() >= peak * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    v *= phase;
    v[pivot] = C64::new(v[pivot].re, 0.0);
    // renormalize after the rotation so the unit-norm invariant holds to
    // the last ulp
    let n = norm(&v);
    v.unscale_mut(n);
    v
}

/// Index of the largest eigenvalue; near-ties resolve to the lowest index.
fn dominant_index(values: &DVector<f64>) -> usize {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * max.abs().max(1.0);
    values.iter().position(|&l| l >= max - tol).unwrap_or(0)
}

/// Dominant eigenpair of a Hermitian matrix.
pub fn max_eigvec_hermitian(a: &HermitianMatrix) -> EigenPair {
    let (values, vectors) = a.eigen();
    let k = dominant_index(&values);
    EigenPair {
        vector: canonicalize(vectors.column(k).into_owned()),
        value: values[k],
    }
}

/// Orthonormal basis of the orthogonal complement of `span(B)` in `C^n`.
pub fn null_space_basis(b: &CMatrix) -> Result<NullSpace> {
    let n = b.nrows();
    if n == 0 {
        return Err(Error::Empty);
    }
    if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let identity = || NullSpace {
        basis: OrthonormalBasis {
            columns: CMatrix::identity(n, n),
        },
        rank: 0,
    };
    if b.ncols() == 0 || b.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(identity());
    }

    let svd = b.clone().svd(true, false);
    let u = svd.u.ok_or(Error::NoConvergence)?;
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let kept: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_TOL * sigma_max)
        .map(|(i, _)| i)
        .collect();
    let rank = kept.len();
    if rank == n {
        return Ok(NullSpace {
            basis: OrthonormalBasis {
                columns: CMatrix::zeros(n, 0),
            },
            rank,
        });
    }

    // The complement projector I - U_r U_r^H has eigenvalues exactly 0 or 1,
    // so its eigenvectors separate cleanly even when B is nearly rank
    // deficient.
    let u_range = u.select_columns(kept.iter());
    let projector =
        HermitianMatrix::symmetrized(CMatrix::identity(n, n) - &u_range * u_range.adjoint());
    let (values, vectors) = projector.eigen();
    let mut cols: Vec<usize> = (0..n).filter(|&i| values[i] > 0.5).collect();
    cols.truncate(n - rank);
    if cols.len() != n - rank {
        return Err(Error::NoConvergence);
    }
    let mut columns = vectors.select_columns(cols.iter());
    for mut c in columns.column_iter_mut() {
        let v = canonicalize(c.clone_owned());
        c.copy_from(&v);
    }
    Ok(NullSpace {
        basis: OrthonormalBasis { columns },
        rank,
    })
}

fn check_pd(r: &HermitianMatrix) -> Result<(DVector<f64>, CMatrix)> {
    let (values, vectors) = r.eigen();
    let threshold = r.pd_threshold();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min.is_nan() || min <= threshold {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
            threshold,
        });
    }
    Ok((values, vectors))
}

/// `W = Lambda^{-1/2} U^H` for `R = U Lambda U^H`, so that `W R W^H = I`.
pub fn whitening_matrix(r: &HermitianMatrix) -> Result<CMatrix> {
    let (values, vectors) = check_pd(r)?;
    let mut w = vectors.adjoint();
    for (i, mut row) in w.row_iter_mut().enumerate() {
        row.unscale_mut(libm::sqrt(values[i]));
    }
    Ok(w)
}

/// Maximizes `v^H Num v / v^H Den v` over nonzero `v`.
pub fn gen_max_eigvec(num: &HermitianMatrix, den: &HermitianMatrix) -> Result<GeneralizedPair> {
    if num.dim() != den.dim() {
        return Err(Error::DimensionMismatch {
            context: "gen_max_eigvec",
            expected: den.dim(),
            found: num.dim(),
        });
    }
    let (den_values, _) = check_pd(den)?;
    let max = den_values.iter().cloned().fold(0.0_f64, f64::max);
    let min = den_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = max / min;

    let direct = if condition <= COND_FALLBACK {
        direct_route(num, den)
    } else {
        None
    };
    let (vector, route) = match direct {
        Some(v) => (v, GenEigenRoute::Direct),
        None => (symmetrized_route(num, den)?, GenEigenRoute::Symmetrized),
    };
    let vector = canonicalize(vector);
    let ratio = num.quad_form(&vector) / den.quad_form(&vector);
    Ok(GeneralizedPair {
        vector,
        ratio,
        route,
    })
}

/// Dominant eigenvector of `C = Den^{-1} Num`: eigenvalues from a complex
/// Schur form, the vector by shifted inverse iteration.
fn direct_route(num: &HermitianMatrix, den: &HermitianMatrix) -> Option<CVector> {
    let n = num.dim();
    let c = den.as_matrix().clone().lu().solve(num.as_matrix())?;
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    let schur = c.clone().try_schur(f64::EPSILON, 10_000)?;
    let (_, t) = schur.unpack();
    // Den^{-1} Num is similar to a PSD matrix: its spectrum is real.
    let lambda = (0..n)
        .map(|i| t[(i, i)].re)
        .fold(f64::NEG_INFINITY, f64::max);
    let scale = c
        .iter()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let shift = lambda + 1e-10 * scale;

    let mut shifted = c;
    for i in 0..n {
        shifted[(i, i)] -= C64::new(shift, 0.0);
    }
    let lu = shifted.lu();
    // deterministic start vector with no special alignment to any axis
    let mut x = CVector::from_fn(n, |i, _| {
        C64::new(1.0 + 0.37 * i as f64, 0.11 * (i as f64 + 1.0))
    });
    for _ in 0..4 {
        let y = lu.solve(&x)?;
        let ny = norm(&y);
        if !(ny.is_finite() && ny > 0.0) {
            return None;
        }
        x = y.unscale(ny);
    }
    Some(x)
}

fn symmetrized_route(num: &HermitianMatrix, den: &HermitianMatrix) -> Result<CVector> {
    let chol = den
        .as_matrix()
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: 0.0,
            threshold: den.pd_threshold(),
        })?;
    let l = chol.l();
    let a = l
        .solve_lower_triangular(num.as_matrix())
        .ok_or(Error::NoConvergence)?;
    // K = L^{-1} Num L^{-H} = (L^{-1} (L^{-1} Num)^H)^H
    let k = l
        .solve_lower_triangular(&a.adjoint())
        .ok_or(Error::NoConvergence)?
        .adjoint();
    let w = max_eigvec_hermitian(&HermitianMatrix::symmetrized(k)).vector;
    l.adjoint()
        .solve_upper_triangular(&w)
        .ok_or(Error::NoConvergence)
}
