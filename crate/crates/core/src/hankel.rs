//! One-dimensional Hankel matrices, PSD classification and kernels.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sequence::MomentSequence;

pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// `H = (s_{i+j})_{0 ≤ i,j ≤ d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    order: usize,
    matrix: DMatrix<f64>,
}

impl HankelMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Determinant by LU, for diagnostics only.
    pub fn determinant(&self) -> f64 {
        self.matrix.clone().lu().determinant()
    }

    /// `D H D` with `D_ii = 1/√H_ii` (rows with `H_ii ≤ 0` are left
    /// unscaled). Congruent to `H`, so the inertia is the same, but the
    /// eigenvalues are on a unit scale.
    pub fn jacobi_scaled(&self) -> (DMatrix<f64>, DVector<f64>) {
        let d = DVector::from_iterator(
            self.order + 1,
            (0..=self.order).map(|i| {
                let h = self.matrix[(i, i)];
                if h > 0.0 {
                    1.0 / h.sqrt()
                } else {
                    1.0
                }
            }),
        );
        let scaled = DMatrix::from_fn(self.order + 1, self.order + 1, |i, j| {
            d[i] * self.matrix[(i, j)] * d[j]
        });
        (scaled, d)
    }

    /// Rows as CSV, for debugging.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..=self.order {
            let row: Vec<String> = (0..=self.order)
                .map(|j| format!("{}", self.matrix[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn build_hankel(s: &MomentSequence, order: usize) -> Result<HankelMatrix> {
    if s.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: s.n(),
        });
    }
    if (s.degree() as usize) < 2 * order {
        return Err(Error::InsufficientDegree {
            needed: 2 * order as u32,
            have: s.degree(),
        });
    }
    let matrix = DMatrix::from_fn(order + 1, order + 1, |i, j| s.at(i + j));
    Ok(HankelMatrix { order, matrix })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdStatus {
    PositiveDefinite,
    PsdSingular,
    Indefinite,
}

impl PsdStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PsdStatus::PositiveDefinite => "positive_definite",
            PsdStatus::PsdSingular => "psd_singular",
            PsdStatus::Indefinite => "indefinite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdReport {
    pub status: PsdStatus,
    pub min_eigenvalue: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors with `|λ| ≤ tol · scale`, in ascending `|λ|`.
    /// Empty unless the status is `PsdSingular`.
    pub kernel_basis: Vec<Vec<f64>>,
    pub scale: f64,
}

impl PsdReport {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }

    /// True when the kernel has more than one dimension, so the kernel
    /// polynomial is a choice rather than determined up to scale.
    pub fn is_degenerate(&self) -> bool {
        self.kernel_basis.len() > 1
    }
}

/// Ascending eigenpairs of a symmetric matrix.
pub(crate) fn sorted_eigen(m: &DMatrix<f64>) -> Vec<(f64, Vec<f64>)> {
    let eig = SymmetricEigen::new(m.clone());
    let mut pairs: Vec<(f64, Vec<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).iter().copied().collect()))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs
}

/// Classifies `H` from its full symmetric eigendecomposition.
///
/// With `scale = max(1, max|λ|)`: indefinite if `λ_min < −tol·scale`,
/// singular if `|λ_min| ≤ tol·scale`, positive definite otherwise.
pub fn classify_psd(h: &HankelMatrix, tol: f64) -> PsdReport {
    classify_symmetric(h.matrix(), tol)
}

pub(crate) fn classify_symmetric(m: &DMatrix<f64>, tol: f64) -> PsdReport {
    let pairs = sorted_eigen(m);
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let min_eigenvalue = eigenvalues[0];
    let scale = eigenvalues.iter().map(|l| l.abs()).fold(1.0, f64::max);
    let thr = tol * scale;
    let status = if min_eigenvalue < -thr {
        PsdStatus::Indefinite
    } else if min_eigenvalue.abs() <= thr {
        PsdStatus::PsdSingular
    } else {
        PsdStatus::PositiveDefinite
    };
    let kernel_basis = if status == PsdStatus::PsdSingular {
        let mut ker: Vec<(f64, Vec<f64>)> =
            pairs.into_iter().filter(|p| p.0.abs() <= thr).collect();
        ker.sort_by(|x, y| x.0.abs().total_cmp(&y.0.abs()));
        ker.into_iter().map(|p| p.1).collect()
    } else {
        vec![]
    };
    PsdReport {
        status,
        min_eigenvalue,
        eigenvalues,
        kernel_basis,
        scale,
    }
}

/// Coefficients `v_0 … v_k` of the kernel polynomial `f(x) = Σ v_i x^i`,
/// normalized so the leading coefficient is 1.
///
/// The kernel element of lowest degree is returned: the basis is reduced by
/// elimination from the top coordinate down until one vector remains. This
/// choice is independent of the particular eigenvector basis.
pub fn kernel_polynomial(report: &PsdReport) -> Result<Vec<f64>> {
    check_kernel(report)?;
    minimal_degree_kernel(&report.kernel_basis)
}

/// The alternate choice used when the kernel is degenerate: the basis vector
/// whose top coefficient has the largest magnitude.
pub fn kernel_polynomial_max_trailing(report: &PsdReport) -> Result<Vec<f64>> {
    check_kernel(report)?;
    let v = report
        .kernel_basis
        .iter()
        .max_by(|x, y| x.last().unwrap().abs().total_cmp(&y.last().unwrap().abs()))
        .expect("non-empty kernel");
    normalize_leading(v.clone())
}

fn check_kernel(report: &PsdReport) -> Result<()> {
    if report.status != PsdStatus::PsdSingular || report.kernel_basis.is_empty() {
        return Err(Error::NoKernel(report.status.as_str().into()));
    }
    Ok(())
}

pub(crate) fn minimal_degree_kernel(basis: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = basis.to_vec();
    let len = cols[0].len();
    let norm = cols
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let thr = 1e-9 * norm;
    for coord in (0..len).rev() {
        if cols.len() == 1 {
            break;
        }
        let (p, pv) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c[coord]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .unwrap();
        if pv.abs() <= thr {
            continue;
        }
        let pivot = cols.remove(p);
        for c in cols.iter_mut() {
            let f = c[coord] / pv;
            for (x, y) in c.iter_mut().zip(&pivot) {
                *x -= f * y;
            }
            c[coord] = 0.0;
        }
    }
    normalize_leading(cols.swap_remove(0))
}

/// Drops negligible top coefficients (below `1e-9 ‖v‖∞`) and scales the
/// remaining leading one to 1.
pub(crate) fn normalize_leading(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let norm = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if norm == 0.0 {
        return Err(Error::NoKernel("zero kernel vector".into()));
    }
    let thr = 1e-9 * norm;
    while v.last().is_some_and(|x| x.abs() <= thr) {
        v.pop();
    }
    let lead = *v.last().unwrap();
    Ok(v.into_iter().map(|x| x / lead).collect())
}
