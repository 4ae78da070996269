//! Spectral calculus for symmetric functions of matrix eigenvalues.
//!
//! Implements the eigendecomposition of dense symmetric matrices and the
//! closed-form first/second derivatives of F(A) = f(eigenvalues of A) at
//! diagonal base points, together with a finite-difference oracle used to
//! cross-check the closed forms.
//!
//! The key second-derivative structure at a diagonal base point A0:
//! coordinates a_ij (i <= j) are independent, the gradient lives on the
//! diagonal, the pure off-diagonal second derivatives are divided
//! differences of grad f (with a dedicated branch for tied eigenvalues),
//! and every mixed derivative across distinct coordinate pairs vanishes
//! except the diagonal-diagonal block which is the Hessian of f.

use crate::error::{Error, Result};
use crate::matrix::{SquareMat, SymMatrix, MAX_DIM};

/// Relative threshold below which two eigenvalues are treated as tied
/// when selecting the divided-difference branch.
pub const DEFAULT_TIE_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 50;
const JACOBI_REL_TOL: f64 = 1e-13;

/// Eigendecomposition of a symmetric matrix: `values` are the eigenvalues
/// and the columns of `rotation` the corresponding orthonormal eigenvectors.
///
/// Decompositions produced by [`jacobi_eigh`] carry descending eigenvalues.
/// A spectrum can also represent a diagonal base point directly via
/// [`Spectrum::diagonal`], in which case the values stay in position order
/// and the rotation is the identity; the derivative formulas below require
/// that form.
#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<f64>,
    rotation: SquareMat,
}

impl Spectrum {
    /// Spectrum of the diagonal matrix diag(values), in position order.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Dimension(n));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(i, i));
            }
        }
        Ok(Self {
            values: values.to_vec(),
            rotation: SquareMat::identity(n),
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rotation(&self) -> &SquareMat {
        &self.rotation
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn require_identity_rotation(&self) -> Result<()> {
        let d = self.rotation.distance_from_identity();
        if d > 1e-12 {
            return Err(Error::NonDiagonalBase(d));
        }
        Ok(())
    }
}

/// Full spectral decomposition by cyclic Jacobi sweeps (row-major order,
/// deterministic). Converges when the off-diagonal Frobenius norm drops
/// below `1e-13 * ||A||_F`; fails after 50 sweeps.
pub fn jacobi_eigh(a: &SymMatrix) -> Result<Spectrum> {
    let n = a.dim();
    let norm_a = a.frobenius_norm();
    let mut w = a.to_square();
    let mut v = SquareMat::identity(n);
    let threshold = JACOBI_REL_TOL * norm_a;

    let off_norm = |w: &SquareMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * w.get(i, j) * w.get(i, j);
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&w) > threshold {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off_norm(&w),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (w.get(q, q) - w.get(p, p)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // W <- J^T W J with the Givens rotation J in the (p, q) plane
                for k in 0..n {
                    let wkp = w.get(k, p);
                    let wkq = w.get(k, q);
                    w.set(k, p, c * wkp - s * wkq);
                    w.set(k, q, s * wkp + c * wkq);
                }
                for k in 0..n {
                    let wpk = w.get(p, k);
                    let wqk = w.get(q, k);
                    w.set(p, k, c * wpk - s * wqk);
                    w.set(q, k, s * wpk + c * wqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
        sweeps += 1;
    }

    // sort descending, permuting eigenvector columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(j, j).partial_cmp(&w.get(i, i)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| w.get(i, i)).collect();
    let mut rotation = SquareMat::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            rotation.set(r, new_col, v.get(r, old_col));
        }
    }
    Ok(Spectrum { values, rotation })
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type HessFn = Box<dyn Fn(&[f64]) -> SymMatrix + Send + Sync>;

/// A symmetric function f of n eigenvalues with analytic gradient and
/// Hessian, plus homogeneity/convexity metadata used by the inequality
/// chains.
pub struct SymmetricFn {
    name: String,
    arity: usize,
    homogeneity_degree: Option<f64>,
    convex: bool,
    value: ValueFn,
    grad: GradFn,
    hess: HessFn,
}

impl std::fmt::Debug for SymmetricFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymmetricFn")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("homogeneity_degree", &self.homogeneity_degree)
            .field("convex", &self.convex)
            .finish()
    }
}

impl SymmetricFn {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn homogeneity_degree(&self) -> Option<f64> {
        self.homogeneity_degree
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn value(&self, lam: &[f64]) -> f64 {
        debug_assert_eq!(lam.len(), self.arity);
        (self.value)(lam)
    }

    pub fn grad(&self, lam: &[f64]) -> Vec<f64> {
        debug_assert_eq!(lam.len(), self.arity);
        (self.grad)(lam)
    }

    pub fn hess(&self, lam: &[f64]) -> SymMatrix {
        debug_assert_eq!(lam.len(), self.arity);
        (self.hess)(lam)
    }

    /// Sum of the eigenvalues; F(A) = tr A.
    pub fn trace(n: usize) -> Self {
        Self {
            name: "trace".into(),
            arity: n,
            homogeneity_degree: Some(1.0),
            convex: true,
            value: Box::new(|l| l.iter().sum()),
            grad: Box::new(|l| vec![1.0; l.len()]),
            hess: Box::new(|l| SymMatrix::zeros(l.len()).unwrap()),
        }
    }

    /// (sum of squares)^(1/2); F(A) = ||A||_F. Smooth away from 0; at the
    /// origin the gradient/Hessian are reported as zero (regularized limit).
    pub fn frobenius(n: usize) -> Self {
        Self::split_quadratic_named(n, 1.0, "frobenius".into())
    }

    /// Sum of squared eigenvalues (2-homogeneous).
    pub fn sum_of_squares(n: usize) -> Self {
        Self {
            name: "sum_of_squares".into(),
            arity: n,
            homogeneity_degree: Some(2.0),
            convex: true,
            value: Box::new(|l| l.iter().map(|x| x * x).sum()),
            grad: Box::new(|l| l.iter().map(|x| 2.0 * x).collect()),
            hess: Box::new(|l| {
                let n = l.len();
                let mut h = SymMatrix::zeros(n).unwrap();
                for i in 0..n {
                    h.set(i, i, 2.0);
                }
                h
            }),
        }
    }

    /// Sum of cubed eigenvalues (3-homogeneous, not convex).
    pub fn power_sum_cubes(n: usize) -> Self {
        Self {
            name: "power_sum_cubes".into(),
            arity: n,
            homogeneity_degree: Some(3.0),
            convex: false,
            value: Box::new(|l| l.iter().map(|x| x * x * x).sum()),
            grad: Box::new(|l| l.iter().map(|x| 3.0 * x * x).collect()),
            hess: Box::new(|l| {
                let n = l.len();
                let mut h = SymMatrix::zeros(n).unwrap();
                for (i, &x) in l.iter().enumerate() {
                    h.set(i, i, 6.0 * x);
                }
                h
            }),
        }
    }

    /// Square root of a sign-split quadratic: non-negative eigenvalues enter
    /// with weight 1, negative ones with weight `a`. One-homogeneous, convex,
    /// C^{1,1} but not C^2 across a sign change. Zero counts as non-negative.
    pub fn split_quadratic(n: usize, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidCompetitor(format!(
                "split-quadratic weight must be positive, got {a}"
            )));
        }
        Ok(Self::split_quadratic_named(
            n,
            a,
            format!("split_quadratic(a={a})"),
        ))
    }

    fn split_quadratic_named(n: usize, a: f64, name: String) -> Self {
        let weight = move |x: f64| if x >= 0.0 { 1.0 } else { a };
        let val = move |l: &[f64]| -> f64 {
            l.iter().map(|&x| weight(x) * x * x).sum::<f64>().sqrt()
        };
        Self {
            name,
            arity: n,
            homogeneity_degree: Some(1.0),
            convex: true,
            value: Box::new(val),
            grad: Box::new(move |l| {
                let c = val(l);
                if c == 0.0 {
                    return vec![0.0; l.len()];
                }
                l.iter().map(|&x| weight(x) * x / c).collect()
            }),
            hess: Box::new(move |l| {
                let n = l.len();
                let mut h = SymMatrix::zeros(n).unwrap();
                let c = val(l);
                if c == 0.0 {
                    return h;
                }
                let c3 = c * c * c;
                for i in 0..n {
                    for j in i..n {
                        let wi = weight(l[i]);
                        let wj = weight(l[j]);
                        let mut v = -wi * wj * l[i] * l[j] / c3;
                        if i == j {
                            v += wi / c;
                        }
                        h.set(i, j, v);
                    }
                }
                h
            }),
        }
    }

    /// Largest eigenvalue. Non-smooth at tied leading eigenvalues; the
    /// reported gradient picks the first maximizer.
    pub fn lambda_max(n: usize) -> Self {
        let argmax = |l: &[f64]| -> usize {
            let mut k = 0;
            for (i, &x) in l.iter().enumerate() {
                if x > l[k] {
                    k = i;
                }
            }
            k
        };
        Self {
            name: "lambda_max".into(),
            arity: n,
            homogeneity_degree: Some(1.0),
            convex: true,
            value: Box::new(|l| l.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
            grad: Box::new(move |l| {
                let mut g = vec![0.0; l.len()];
                g[argmax(l)] = 1.0;
                g
            }),
            hess: Box::new(|l| SymMatrix::zeros(l.len()).unwrap()),
        }
    }

    /// User-supplied symmetric function; callers should run
    /// [`SymmetricFn::validate`] on it before use.
    pub fn custom(
        name: impl Into<String>,
        arity: usize,
        homogeneity_degree: Option<f64>,
        convex: bool,
        value: ValueFn,
        grad: GradFn,
        hess: HessFn,
    ) -> Self {
        Self {
            name: name.into(),
            arity,
            homogeneity_degree,
            convex,
            value,
            grad,
            hess,
        }
    }

    /// Checks permutation symmetry, the Euler identity (when a homogeneity
    /// degree is declared) and agreement of grad/hess with central finite
    /// differences on the given sample points.
    pub fn validate(&self, samples: &[Vec<f64>]) -> Result<()> {
        for lam in samples {
            if lam.len() != self.arity {
                return Err(Error::ArityMismatch {
                    expected: self.arity,
                    got: lam.len(),
                });
            }
            let v = self.value(lam);
            // adjacent-transposition generators are enough for full symmetry
            for k in 0..self.arity - 1 {
                let mut p = lam.clone();
                p.swap(k, k + 1);
                let vp = self.value(&p);
                if (v - vp).abs() > 1e-12 * (1.0 + v.abs()) {
                    return Err(Error::InvalidArgument(format!(
                        "{}: not permutation symmetric at {:?}",
                        self.name, lam
                    )));
                }
            }
            if let Some(d) = self.homogeneity_degree {
                let g = self.grad(lam);
                let euler: f64 = lam.iter().zip(&g).map(|(x, gi)| x * gi).sum();
                if (euler - d * v).abs() > 1e-10 * (1.0 + v.abs()) {
                    return Err(Error::InvalidArgument(format!(
                        "{}: Euler identity fails at {:?}",
                        self.name, lam
                    )));
                }
            }
            let g = self.grad(lam);
            let h = self.hess(lam);
            let step = 1e-5;
            for i in 0..self.arity {
                let mut lp = lam.clone();
                let mut lm = lam.clone();
                lp[i] += step;
                lm[i] -= step;
                let fd = (self.value(&lp) - self.value(&lm)) / (2.0 * step);
                if (fd - g[i]).abs() > 1e-6 * (1.0 + g[i].abs()) {
                    return Err(Error::InvalidArgument(format!(
                        "{}: gradient component {i} disagrees with finite differences",
                        self.name
                    )));
                }
                let gp = self.grad(&lp);
                let gm = self.grad(&lm);
                for j in 0..self.arity {
                    let fd2 = (gp[j] - gm[j]) / (2.0 * step);
                    if (fd2 - h.get(i, j)).abs() > 1e-5 * (1.0 + h.get(i, j).abs()) {
                        return Err(Error::InvalidArgument(format!(
                            "{}: Hessian entry ({i},{j}) disagrees with finite differences",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Second derivatives of F(A) = f(eigenvalues) at a diagonal base point.
#[derive(Debug, Clone)]
pub struct SpectralHessian {
    /// d2F / (da_ii da_jj) = Hessian of f at the eigenvalue vector.
    pub diag_block: SymMatrix,
    /// d2F / da_ij^2 for i < j (divided difference or tied branch);
    /// the diagonal slots of this matrix are unused and left zero.
    pub offdiag: SymMatrix,
    /// Index pairs (i, j) where the tied-eigenvalue branch was taken.
    pub degenerate_pairs: Vec<(usize, usize)>,
}

fn check_arity(f: &SymmetricFn, spectrum: &Spectrum) -> Result<()> {
    if f.arity() != spectrum.dim() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: spectrum.dim(),
        });
    }
    Ok(())
}

/// Gradient of F(A) at a diagonal base point: grad f on the diagonal and
/// zero on every off-diagonal coordinate.
pub fn grad_f_at_diagonal(f: &SymmetricFn, spectrum: &Spectrum) -> Result<SymMatrix> {
    check_arity(f, spectrum)?;
    spectrum.require_identity_rotation()?;
    let g = f.grad(spectrum.values());
    SymMatrix::diagonal(&g)
}

/// Second-derivative tables of F(A) at a diagonal base point. Eigenvalue
/// pairs closer than `tie_tol * (1 + max |eigenvalue|)` take the tied
/// branch `2 f_ii - 2 f_ij` instead of the divided difference.
pub fn hess_f_at_diagonal(
    f: &SymmetricFn,
    spectrum: &Spectrum,
    tie_tol: f64,
) -> Result<SpectralHessian> {
    if tie_tol < 0.0 {
        return Err(Error::NegativeTieTol(tie_tol));
    }
    check_arity(f, spectrum)?;
    spectrum.require_identity_rotation()?;
    let lam = spectrum.values();
    let n = lam.len();
    let g = f.grad(lam);
    let h = f.hess(lam);
    let scale = tie_tol * (1.0 + spectrum.max_abs());
    let mut offdiag = SymMatrix::zeros(n)?;
    let mut degenerate_pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = if (lam[i] - lam[j]).abs() > scale {
                2.0 * (g[j] - g[i]) / (lam[j] - lam[i])
            } else {
                degenerate_pairs.push((i, j));
                2.0 * h.get(i, i) - 2.0 * h.get(i, j)
            };
            offdiag.set(i, j, v);
        }
    }
    Ok(SpectralHessian {
        diag_block: h,
        offdiag,
        degenerate_pairs,
    })
}

/// Second-order jet of a symmetric-matrix field A(x) at a point where the
/// value is diagonal: entry values, first and second spatial derivatives.
#[derive(Debug, Clone)]
pub struct MatrixFieldJet {
    value: SymMatrix,
    d1: Vec<SymMatrix>,
    d2: Vec<SymMatrix>, // (k, h) with k <= h, row-major pairs
    space_dim: usize,
}

impl MatrixFieldJet {
    pub fn new(value: SymMatrix, d1: Vec<SymMatrix>, d2: Vec<SymMatrix>) -> Result<Self> {
        let m = d1.len();
        if d2.len() != m * (m + 1) / 2 {
            return Err(Error::InvalidArgument(format!(
                "need {} second-derivative matrices for {} spatial dims, got {}",
                m * (m + 1) / 2,
                m,
                d2.len()
            )));
        }
        for mat in d1.iter().chain(d2.iter()) {
            if mat.dim() != value.dim() {
                return Err(Error::InvalidArgument(
                    "jet matrices must share the value's dimension".into(),
                ));
            }
        }
        Ok(Self {
            value,
            d1,
            d2,
            space_dim: m,
        })
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn value(&self) -> &SymMatrix {
        &self.value
    }

    pub fn d1(&self, k: usize) -> &SymMatrix {
        &self.d1[k]
    }

    pub fn d2(&self, k: usize, h: usize) -> &SymMatrix {
        let (a, b) = if k <= h { (k, h) } else { (h, k) };
        &self.d2[a * self.space_dim - a * a.saturating_sub(1) / 2 + (b - a)]
    }
}

/// Gradient and Hessian of x -> F(A(x)) at a point where A is diagonal,
/// assembled from the three second-derivative contributions: pure entry
/// second derivatives, squared off-diagonal first derivatives weighted by
/// the spectral off-diagonal table, and the f-Hessian contraction of the
/// diagonal first derivatives.
pub fn composite_derivatives(
    f: &SymmetricFn,
    jet: &MatrixFieldJet,
    tie_tol: f64,
) -> Result<(Vec<f64>, SymMatrix)> {
    let a0 = jet.value();
    let n = a0.dim();
    let off = a0.max_offdiag();
    if off > 1e-12 * (1.0 + a0.frobenius_norm()) {
        return Err(Error::NonDiagonalBase(off));
    }
    let lam: Vec<f64> = (0..n).map(|i| a0.get(i, i)).collect();
    let spectrum = Spectrum::diagonal(&lam)?;
    check_arity(f, &spectrum)?;
    let g = f.grad(&lam);
    let spectral = hess_f_at_diagonal(f, &spectrum, tie_tol)?;

    let m = jet.space_dim();
    let grad: Vec<f64> = (0..m)
        .map(|k| (0..n).map(|i| g[i] * jet.d1(k).get(i, i)).sum())
        .collect();

    // hessian may be built for any spatial dimension >= 1; SymMatrix wants
    // >= 2 so a 1-d jet is padded implicitly by the caller
    let mut hess = SymMatrix::zeros(m.max(2))?;
    for k in 0..m {
        for h in k..m {
            let mut v = 0.0;
            for i in 0..n {
                v += g[i] * jet.d2(k, h).get(i, i);
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    v += spectral.offdiag.get(i, j) * jet.d1(k).get(i, j) * jet.d1(h).get(i, j);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    v += spectral.diag_block.get(i, j)
                        * jet.d1(h).get(i, i)
                        * jet.d1(k).get(j, j);
                }
            }
            hess.set(k, h, v);
        }
    }
    Ok((grad, hess))
}

/// Finite-difference gradient/Hessian of A -> f(spectrum(A)) in the matrix
/// coordinates a_ij (i <= j), with one-sided-disagreement kink detection.
/// Verification oracle; production paths never call it.
#[derive(Debug, Clone)]
pub struct FdOracleReport {
    pub grad: SymMatrix,
    /// d2F / (da_ii da_jj), mixed diagonal block.
    pub hess_diag_block: SymMatrix,
    /// d2F / da_ij^2 on coordinates i < j (diagonal slots unused).
    pub hess_offdiag: SymMatrix,
    /// Coordinates where forward and backward differences disagree, i.e.
    /// where f failed to look differentiable.
    pub kinks: Vec<(usize, usize)>,
}

fn perturbed(a: &SymMatrix, i: usize, j: usize, delta: f64) -> SymMatrix {
    let mut b = a.clone();
    b.set(i, j, a.get(i, j) + delta);
    b
}

pub fn fd_oracle(f: &SymmetricFn, a: &SymMatrix, h: f64) -> Result<FdOracleReport> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {h} outside [1e-7, 1e-3]"
        )));
    }
    let n = a.dim();
    if f.arity() != n {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: n,
        });
    }
    let eval = |m: &SymMatrix| -> Result<f64> { Ok(f.value(jacobi_eigh(m)?.values())) };
    let f0 = eval(a)?;

    let mut grad = SymMatrix::zeros(n)?;
    let mut hess_offdiag = SymMatrix::zeros(n)?;
    let mut kinks = Vec::new();
    for i in 0..n {
        for j in i..n {
            let fp = eval(&perturbed(a, i, j, h))?;
            let fm = eval(&perturbed(a, i, j, -h))?;
            grad.set(i, j, (fp - fm) / (2.0 * h));
            let fwd = (fp - f0) / h;
            let bwd = (f0 - fm) / h;
            if (fwd - bwd).abs() > 0.05 * (1.0 + fwd.abs().max(bwd.abs())) {
                kinks.push((i, j));
            }
            if i < j {
                hess_offdiag.set(i, j, (fp - 2.0 * f0 + fm) / (h * h));
            }
        }
    }

    let mut hess_diag_block = SymMatrix::zeros(n)?;
    for i in 0..n {
        for j in i..n {
            let v = if i == j {
                let fp = eval(&perturbed(a, i, i, h))?;
                let fm = eval(&perturbed(a, i, i, -h))?;
                (fp - 2.0 * f0 + fm) / (h * h)
            } else {
                let fpp = eval(&perturbed(&perturbed(a, i, i, h), j, j, h))?;
                let fpm = eval(&perturbed(&perturbed(a, i, i, h), j, j, -h))?;
                let fmp = eval(&perturbed(&perturbed(a, i, i, -h), j, j, h))?;
                let fmm = eval(&perturbed(&perturbed(a, i, i, -h), j, j, -h))?;
                (fpp - fpm - fmp + fmm) / (4.0 * h * h)
            };
            hess_diag_block.set(i, j, v);
        }
    }

    Ok(FdOracleReport {
        grad,
        hess_diag_block,
        hess_offdiag,
        kinks,
    })
}

/// Mixed coordinate second derivative d2F / (da_ij da_kl) by finite
/// differences; used in tests to confirm the vanishing cases.
pub fn fd_mixed_coord(
    f: &SymmetricFn,
    a: &SymMatrix,
    first: (usize, usize),
    second: (usize, usize),
    h: f64,
) -> Result<f64> {
    let eval = |m: &SymMatrix| -> Result<f64> { Ok(f.value(jacobi_eigh(m)?.values())) };
    let (i, j) = first;
    let (k, l) = second;
    let fpp = eval(&perturbed(&perturbed(a, i, j, h), k, l, h))?;
    let fpm = eval(&perturbed(&perturbed(a, i, j, h), k, l, -h))?;
    let fmp = eval(&perturbed(&perturbed(a, i, j, -h), k, l, h))?;
    let fmm = eval(&perturbed(&perturbed(a, i, j, -h), k, l, -h))?;
    Ok((fpp - fpm - fmp + fmm) / (4.0 * h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol,
            "expected {a} close to {b} (tol {tol})"
        );
    }

    #[test]
    fn jacobi_diagonal_matrix_is_fixed_point() {
        let a = SymMatrix::diagonal(&[3.0, 1.0]).unwrap();
        let s = jacobi_eigh(&a).unwrap();
        assert_eq!(s.values(), &[3.0, 1.0]);
        assert_eq!(s.rotation().distance_from_identity(), 0.0);
    }

    #[test]
    fn jacobi_symmetric_swap_matrix() {
        let a = SymMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let s = jacobi_eigh(&a).unwrap();
        assert_close(s.values()[0], 1.0, 1e-14);
        assert_close(s.values()[1], -1.0, 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_input() {
        // deterministic pseudo-random symmetric 6x6
        let mut x = 0.5f64;
        let a = SymMatrix::from_fn(6, |_, _| {
            x = (x * 997.0 + 0.123).fract();
            2.0 * x - 1.0
        })
        .unwrap();
        let s = jacobi_eigh(&a).unwrap();
        let v = s.rotation();
        // V^T V = I
        assert!(v.transpose().matmul(v).distance_from_identity() < 1e-12);
        // V^T A V = diag
        let d = v.transpose().matmul(&a.to_square()).matmul(v);
        let scale = 1e-10 * (1.0 + a.frobenius_norm());
        for i in 0..6 {
            assert!((d.get(i, i) - s.values()[i]).abs() < scale);
            for j in 0..6 {
                if i != j {
                    assert!(d.get(i, j).abs() < scale);
                }
            }
        }
        // descending
        for w in s.values().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn grad_frobenius_at_3_4() {
        let f = SymmetricFn::frobenius(2);
        let s = Spectrum::diagonal(&[3.0, 4.0]).unwrap();
        let g = grad_f_at_diagonal(&f, &s).unwrap();
        assert_close(g.get(0, 0), 3.0 / 5.0, 1e-15);
        assert_close(g.get(1, 1), 4.0 / 5.0, 1e-15);
        assert_eq!(g.get(0, 1), 0.0);
    }

    #[test]
    fn grad_trace_is_identity() {
        let f = SymmetricFn::trace(4);
        let s = Spectrum::diagonal(&[0.3, -1.2, 5.0, 2.2]).unwrap();
        let g = grad_f_at_diagonal(&f, &s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn grad_sum_of_squares_matches_norm_gradient() {
        let f = SymmetricFn::sum_of_squares(2);
        let s = Spectrum::diagonal(&[1.0, 3.0]).unwrap();
        let g = grad_f_at_diagonal(&f, &s).unwrap();
        assert_eq!(g.get(0, 0), 2.0);
        assert_eq!(g.get(1, 1), 6.0);
    }

    #[test]
    fn grad_rejects_arity_mismatch() {
        let f = SymmetricFn::trace(3);
        let s = Spectrum::diagonal(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            grad_f_at_diagonal(&f, &s),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn hess_sum_of_squares_offdiag_both_branches() {
        let f = SymmetricFn::sum_of_squares(2);
        let distinct = Spectrum::diagonal(&[1.0, 3.0]).unwrap();
        let h = hess_f_at_diagonal(&f, &distinct, DEFAULT_TIE_TOL).unwrap();
        assert_close(h.offdiag.get(0, 1), 4.0, 1e-14);
        assert!(h.degenerate_pairs.is_empty());

        let tied = Spectrum::diagonal(&[2.0, 2.0]).unwrap();
        let h = hess_f_at_diagonal(&f, &tied, DEFAULT_TIE_TOL).unwrap();
        assert_close(h.offdiag.get(0, 1), 4.0, 1e-14);
        assert_eq!(h.degenerate_pairs, vec![(0, 1)]);
    }

    #[test]
    fn hess_rejects_negative_tie_tol() {
        let f = SymmetricFn::sum_of_squares(2);
        let s = Spectrum::diagonal(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            hess_f_at_diagonal(&f, &s, -1.0),
            Err(Error::NegativeTieTol(_))
        ));
    }

    #[test]
    fn tied_branch_is_continuous_for_smooth_f() {
        // C^2 function: divided difference at gap 1e-6 vs tied formula
        for f in [SymmetricFn::frobenius(3), SymmetricFn::power_sum_cubes(3)] {
            let gap = 1e-6;
            let lam = [1.3, 1.3 + gap, -0.7];
            let s = Spectrum::diagonal(&lam).unwrap();
            let divided = hess_f_at_diagonal(&f, &s, 0.0).unwrap();
            let tied = hess_f_at_diagonal(&f, &s, 1e-5).unwrap();
            assert!(tied.degenerate_pairs.contains(&(0, 1)));
            assert!(
                (divided.offdiag.get(0, 1) - tied.offdiag.get(0, 1)).abs() < 1e-4,
                "branch mismatch for {}",
                f.name()
            );
        }
    }

    #[test]
    fn composite_constant_field_has_zero_derivatives() {
        let f = SymmetricFn::frobenius(2);
        let value = SymMatrix::diagonal(&[1.0, 2.0]).unwrap();
        let zero = SymMatrix::zeros(2).unwrap();
        let jet = MatrixFieldJet::new(
            value,
            vec![zero.clone(), zero.clone()],
            vec![zero.clone(), zero.clone(), zero.clone()],
        )
        .unwrap();
        let (g, h) = composite_derivatives(&f, &jet, DEFAULT_TIE_TOL).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
        assert_eq!(h.frobenius_norm(), 0.0);
    }

    #[test]
    fn composite_trace_is_linear_in_the_jet() {
        let f = SymmetricFn::trace(2);
        let value = SymMatrix::diagonal(&[1.0, -1.0]).unwrap();
        let d1a = SymMatrix::from_upper(2, &[0.5, 2.0, -0.25]).unwrap();
        let d1b = SymMatrix::from_upper(2, &[1.5, -1.0, 0.75]).unwrap();
        let d2aa = SymMatrix::from_upper(2, &[0.1, 0.2, 0.3]).unwrap();
        let d2ab = SymMatrix::from_upper(2, &[-0.4, 0.5, 0.6]).unwrap();
        let d2bb = SymMatrix::from_upper(2, &[0.7, -0.8, 0.9]).unwrap();
        let jet = MatrixFieldJet::new(
            value,
            vec![d1a.clone(), d1b.clone()],
            vec![d2aa.clone(), d2ab.clone(), d2bb.clone()],
        )
        .unwrap();
        let (g, h) = composite_derivatives(&f, &jet, DEFAULT_TIE_TOL).unwrap();
        assert_close(g[0], d1a.get(0, 0) + d1a.get(1, 1), 1e-15);
        assert_close(g[1], d1b.get(0, 0) + d1b.get(1, 1), 1e-15);
        assert_close(h.get(0, 0), d2aa.get(0, 0) + d2aa.get(1, 1), 1e-15);
        assert_close(h.get(0, 1), d2ab.get(0, 0) + d2ab.get(1, 1), 1e-15);
        assert_close(h.get(1, 1), d2bb.get(0, 0) + d2bb.get(1, 1), 1e-15);
    }

    #[test]
    fn composite_frobenius_offdiag_direction() {
        // A(x) = diag(1,2) + x_0 * (symmetric E_01): second derivative along
        // x_0 equals 2 (f_2 - f_1) / (lam_2 - lam_1) = 2/sqrt(5)
        let f = SymmetricFn::frobenius(2);
        let value = SymMatrix::diagonal(&[1.0, 2.0]).unwrap();
        let mut e01 = SymMatrix::zeros(2).unwrap();
        e01.set(0, 1, 1.0);
        let zero = SymMatrix::zeros(2).unwrap();
        let jet = MatrixFieldJet::new(value, vec![e01], vec![zero]).unwrap();
        let (g, h) = composite_derivatives(&f, &jet, DEFAULT_TIE_TOL).unwrap();
        assert_close(g[0], 0.0, 1e-15);
        assert_close(h.get(0, 0), 2.0 / 5.0f64.sqrt(), 1e-14);
    }

    #[test]
    fn fd_oracle_trace_gradient_is_identity_pattern() {
        let f = SymmetricFn::trace(3);
        let a = SymMatrix::from_upper(3, &[0.4, 0.1, -0.2, 1.4, 0.3, -0.9]).unwrap();
        let r = fd_oracle(&f, &a, 1e-5).unwrap();
        for i in 0..3 {
            for j in i..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_close(r.grad.get(i, j), expected, 1e-9);
            }
        }
        assert!(r.kinks.is_empty());
    }

    #[test]
    fn fd_oracle_matches_closed_form_gradient_at_diagonal() {
        let f = SymmetricFn::frobenius(2);
        let a = SymMatrix::diagonal(&[3.0, 4.0]).unwrap();
        let r = fd_oracle(&f, &a, 1e-6).unwrap();
        let s = Spectrum::diagonal(&[3.0, 4.0]).unwrap();
        let g = grad_f_at_diagonal(&f, &s).unwrap();
        for i in 0..2 {
            for j in i..2 {
                assert_close(r.grad.get(i, j), g.get(i, j), 1e-7);
            }
        }
    }

    #[test]
    fn fd_oracle_detects_lambda_max_kink() {
        let f = SymmetricFn::lambda_max(2);
        let a = SymMatrix::diagonal(&[1.0, 1.0]).unwrap();
        let r = fd_oracle(&f, &a, 1e-5).unwrap();
        // the tied leading eigenvalue makes the off-diagonal direction kinked
        assert!(r.kinks.contains(&(0, 1)), "kinks: {:?}", r.kinks);
    }

    #[test]
    fn builtins_pass_their_own_validation() {
        let samples = vec![vec![1.2, -0.7, 0.4], vec![2.0, 2.0, -3.0], vec![0.3, 0.9, 1.5]];
        for f in [
            SymmetricFn::trace(3),
            SymmetricFn::frobenius(3),
            SymmetricFn::sum_of_squares(3),
            SymmetricFn::power_sum_cubes(3),
            SymmetricFn::split_quadratic(3, 4.0).unwrap(),
        ] {
            f.validate(&samples).unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn split_quadratic_rejects_nonpositive_weight() {
        assert!(SymmetricFn::split_quadratic(3, 0.0).is_err());
        assert!(SymmetricFn::split_quadratic(3, -2.0).is_err());
    }

    #[test]
    fn composite_rejects_non_diagonal_base() {
        let f = SymmetricFn::trace(2);
        let mut value = SymMatrix::diagonal(&[1.0, 2.0]).unwrap();
        value.set(0, 1, 0.5);
        let zero = SymMatrix::zeros(2).unwrap();
        let jet = MatrixFieldJet::new(value, vec![zero.clone()], vec![zero]).unwrap();
        assert!(matches!(
            composite_derivatives(&f, &jet, DEFAULT_TIE_TOL),
            Err(Error::NonDiagonalBase(_))
        ));
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<SymmetricFn>();
        assert_send_sync::<Spectrum>();
        assert_send_sync::<SpectralHessian>();
    }
}
