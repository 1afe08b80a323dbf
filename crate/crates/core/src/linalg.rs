//! Thin SVD with a deterministic ordering and sign convention.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default relative tolerance for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// `d × m`, `m = min(d, n)`.
    pub u: DMatrix<f64>,
    /// Nonincreasing.
    pub singular_values: Vec<f64>,
    /// `n × m` (not transposed).
    pub v: DMatrix<f64>,
}

impl ThinSvd {
    /// Number of singular values above `rel_tol · σ₁`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let Some(&top) = self.singular_values.first() else {
            return 0;
        };
        if top <= 0.0 {
            return 0;
        }
        self.singular_values.iter().take_while(|&&s| s > rel_tol * top).count()
    }
}

/// Thin SVD, sorted by decreasing singular value (stable among ties), with
/// each left singular vector flipped so that its largest-magnitude entry is
/// positive. The matching right singular vector is flipped with it.
pub fn thin_svd(m: &DMatrix<f64>) -> Result<ThinSvd> {
    let (d, n) = m.shape();
    let k = d.min(n);
    if k == 0 {
        return Ok(ThinSvd {
            u: DMatrix::zeros(d, 0),
            singular_values: Vec::new(),
            v: DMatrix::zeros(n, 0),
        });
    }
    let a = faer::Mat::<f64>::from_fn(d, n, |i, j| m[(i, j)]);
    let svd = a.thin_svd().map_err(|e| {
        Error::Numerical(format!(
            "SVD of a {d}x{n} matrix did not converge ({e:?}, ‖X‖_F = {:e})",
            m.norm()
        ))
    })?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let values: Vec<f64> = (0..k).map(|i| s[i]).collect();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut out_u = DMatrix::zeros(d, k);
    let mut out_v = DMatrix::zeros(n, k);
    let mut out_s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let mut uc = DVector::from_fn(d, |i, _| u[(i, src)]);
        let mut vc = DVector::from_fn(n, |j, _| v[(j, src)]);
        if sign_flip_needed(&uc) {
            uc.neg_mut();
            vc.neg_mut();
        }
        out_u.set_column(dst, &uc);
        out_v.set_column(dst, &vc);
        out_s.push(values[src].max(0.0));
    }
    Ok(ThinSvd {
        u: out_u,
        singular_values: out_s,
        v: out_v,
    })
}

/// True when the first largest-magnitude entry is negative.
pub(crate) fn sign_flip_needed(v: &DVector<f64>) -> bool {
    let mut best = 0.0_f64;
    let mut best_val = 0.0_f64;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            best_val = x;
        }
    }
    best_val < 0.0
}

/// `|cos ∠(a, b)|`; zero if either vector is zero.
pub fn abs_cosine(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.dot(b) / (na * nb)).abs().min(1.0)
}
