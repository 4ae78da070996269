//! Independent oracles for the spectral calculus: eigenvalues from inertia
//! bisection on the characteristic problem, and finite differences for the
//! closed-form derivative tables.

use capcone::matrix::{SymMatrix, SquareMat};
use capcone::spectral::{
    composite_derivatives, fd_mixed_coord, fd_oracle, grad_f_at_diagonal, hess_f_at_diagonal,
    jacobi_eigh, MatrixFieldJet, Spectrum, SymmetricFn, DEFAULT_TIE_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of eigenvalues of `a` strictly below `x`, by counting negative
/// pivots of the symmetric elimination of A - xI (Sylvester inertia).
fn count_below(a: &SymMatrix, x: f64) -> usize {
    let n = a.dim();
    let mut w = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            w[i][j] = a.get(i, j) - if i == j { x } else { 0.0 };
        }
    }
    let mut neg = 0;
    for k in 0..n {
        let mut piv = w[k][k];
        if piv.abs() < 1e-300 {
            piv = 1e-300;
        }
        if piv < 0.0 {
            neg += 1;
        }
        for i in (k + 1)..n {
            let f = w[i][k] / piv;
            for j in k..n {
                w[i][j] -= f * w[k][j];
            }
        }
    }
    neg
}

/// All eigenvalues in ascending order by bisection on the inertia count.
fn eigenvalues_by_bisection(a: &SymMatrix) -> Vec<f64> {
    let n = a.dim();
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        for j in 0..n {
            if j != i {
                radius += a.get(i, j).abs();
            }
        }
        lo = lo.min(a.get(i, i) - radius);
        hi = hi.max(a.get(i, i) + radius);
    }
    lo -= 1.0;
    hi += 1.0;
    let scale = 1.0 + lo.abs().max(hi.abs());
    (1..=n)
        .map(|m| {
            let (mut l, mut h) = (lo, hi);
            while h - l > 1e-13 * scale {
                let mid = 0.5 * (l + h);
                if count_below(a, mid) >= m {
                    h = mid;
                } else {
                    l = mid;
                }
            }
            0.5 * (l + h)
        })
        .collect()
}

fn random_sym(n: usize, rng: &mut impl Rng) -> SymMatrix {
    SymMatrix::from_fn(n, |_, _| rng.gen_range(-2.0..2.0)).unwrap()
}

#[test]
fn jacobi_matches_inertia_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let a = random_sym(5, &mut rng);
        let spectrum = jacobi_eigh(&a).unwrap();
        let mut oracle = eigenvalues_by_bisection(&a);
        oracle.reverse();
        for (x, y) in spectrum.values().iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }
}

#[test]
fn jacobi_invariants_across_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in [2usize, 3, 7, 12, 16] {
        let a = random_sym(n, &mut rng);
        let s = jacobi_eigh(&a).unwrap();
        let v: &SquareMat = s.rotation();
        assert!(v.transpose().matmul(v).distance_from_identity() < 1e-12);
        let d = v.transpose().matmul(&a.to_square()).matmul(v);
        let tol = 1e-10 * (1.0 + a.frobenius_norm());
        for i in 0..n {
            assert!((d.get(i, i) - s.values()[i]).abs() < tol);
        }
    }
}

fn builtin_family(n: usize) -> Vec<SymmetricFn> {
    vec![
        SymmetricFn::trace(n),
        SymmetricFn::frobenius(n),
        SymmetricFn::sum_of_squares(n),
        SymmetricFn::power_sum_cubes(n),
        SymmetricFn::split_quadratic(n, 4.0).unwrap(),
        SymmetricFn::split_quadratic(n, 2.0).unwrap(),
    ]
}

/// Whether the family member is C^2 at this spectrum (the split
/// quadratics kink where an eigenvalue changes sign, the square roots at
/// the origin).
fn smooth_at(f: &SymmetricFn, lam: &[f64]) -> bool {
    let norm: f64 = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
    if f.name().starts_with("split_quadratic") {
        lam.iter().all(|x| x.abs() > 0.3)
    } else if f.name() == "frobenius" {
        norm > 0.3
    } else {
        true
    }
}

/// Pairwise separation keeps the divided-difference oracle well
/// conditioned (truncation error scales like (h/gap)^2).
fn well_separated(lam: &[f64]) -> bool {
    for i in 0..lam.len() {
        for j in (i + 1)..lam.len() {
            if (lam[i] - lam[j]).abs() < 0.3 {
                return false;
            }
        }
    }
    true
}

#[test]
fn closed_form_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 60 {
        let n = rng.gen_range(2..=5);
        let lam: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let fs = builtin_family(n);
        let f = &fs[checked % fs.len()];
        if !smooth_at(f, &lam) || !well_separated(&lam) {
            continue;
        }
        checked += 1;
        let spectrum = Spectrum::diagonal(&lam).unwrap();
        let base = SymMatrix::diagonal(&lam).unwrap();

        let grad = grad_f_at_diagonal(f, &spectrum).unwrap();
        let fd_g = fd_oracle(f, &base, 1e-6).unwrap();
        for i in 0..n {
            for j in i..n {
                let a = grad.get(i, j);
                let b = fd_g.grad.get(i, j);
                assert!(
                    (a - b).abs() <= 1e-6 * (1.0 + a.abs()),
                    "{} grad ({i},{j}): {a} vs {b}",
                    f.name()
                );
            }
        }

        let hess = hess_f_at_diagonal(f, &spectrum, DEFAULT_TIE_TOL).unwrap();
        let fd_h = fd_oracle(f, &base, 1e-4).unwrap();
        for i in 0..n {
            for j in i..n {
                let a = hess.diag_block.get(i, j);
                let b = fd_h.hess_diag_block.get(i, j);
                assert!(
                    (a - b).abs() <= 1e-6 * (1.0 + a.abs()),
                    "{} diag block ({i},{j}): {a} vs {b}",
                    f.name()
                );
                if i < j {
                    let a = hess.offdiag.get(i, j);
                    let b = fd_h.hess_offdiag.get(i, j);
                    assert!(
                        (a - b).abs() <= 1e-6 * (1.0 + a.abs()),
                        "{} offdiag ({i},{j}): {a} vs {b}",
                        f.name()
                    );
                }
            }
        }
    }
}

#[test]
fn mixed_coordinate_derivatives_vanish() {
    // every mixed pair with distinct coordinate supports and not both
    // diagonal has zero second derivative
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let lam: Vec<f64> = (0..4).map(|_| rng.gen_range(0.5..2.5)).collect();
    let base = SymMatrix::diagonal(&lam).unwrap();
    for f in builtin_family(4) {
        for (first, second) in [
            ((0, 1), (0, 2)),
            ((0, 1), (2, 3)),
            ((0, 0), (1, 2)),
            ((1, 2), (3, 3)),
        ] {
            let v = fd_mixed_coord(&f, &base, first, second, 1e-4).unwrap();
            assert!(
                v.abs() < 1e-5,
                "{}: mixed {:?}/{:?} = {v}",
                f.name(),
                first,
                second
            );
        }
    }
}

struct QuadraticField {
    base: Vec<f64>,
    d1: Vec<SymMatrix>,
    d2: Vec<SymMatrix>,
    m: usize,
}

impl QuadraticField {
    fn random(n: usize, m: usize, rng: &mut impl Rng) -> Self {
        // keep the base spectrum separated so eigenvalue paths stay smooth
        let mut base: Vec<f64> = (0..n).map(|i| i as f64 + rng.gen_range(-0.2..0.2)).collect();
        base.reverse();
        let d1 = (0..m)
            .map(|_| SymMatrix::from_fn(n, |_, _| rng.gen_range(-0.5..0.5)).unwrap())
            .collect();
        let d2 = (0..m * (m + 1) / 2)
            .map(|_| SymMatrix::from_fn(n, |_, _| rng.gen_range(-0.5..0.5)).unwrap())
            .collect();
        Self { base, d1, d2, m }
    }

    fn jet(&self) -> MatrixFieldJet {
        MatrixFieldJet::new(
            SymMatrix::diagonal(&self.base).unwrap(),
            self.d1.clone(),
            self.d2.clone(),
        )
        .unwrap()
    }

    fn d2_at(&self, k: usize, h: usize) -> &SymMatrix {
        let (a, b) = if k <= h { (k, h) } else { (h, k) };
        &self.d2[a * self.m - a * a.saturating_sub(1) / 2 + (b - a)]
    }

    fn matrix_at(&self, x: &[f64]) -> SymMatrix {
        let n = self.base.len();
        SymMatrix::from_fn(n, |i, j| {
            let mut v = if i == j { self.base[i] } else { 0.0 };
            for k in 0..self.m {
                v += x[k] * self.d1[k].get(i, j);
            }
            for k in 0..self.m {
                for h in 0..self.m {
                    v += 0.5 * x[k] * x[h] * self.d2_at(k, h).get(i, j);
                }
            }
            v
        })
        .unwrap()
    }
}

#[test]
fn composite_derivatives_match_spatial_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let n = rng.gen_range(3..=5);
        let m = rng.gen_range(2..=3);
        let field = QuadraticField::random(n, m, &mut rng);
        let f = SymmetricFn::frobenius(n);
        let (grad, hess) = composite_derivatives(&f, &field.jet(), DEFAULT_TIE_TOL).unwrap();

        let eval = |x: &[f64]| -> f64 { f.value(jacobi_eigh(&field.matrix_at(x)).unwrap().values()) };
        let h1 = 1e-6;
        let h2 = 5e-4;
        for k in 0..m {
            let mut xp = vec![0.0; m];
            let mut xm = vec![0.0; m];
            xp[k] = h1;
            xm[k] = -h1;
            let fd = (eval(&xp) - eval(&xm)) / (2.0 * h1);
            assert!(
                (grad[k] - fd).abs() <= 1e-6 * (1.0 + grad[k].abs()),
                "grad[{k}]: {} vs {fd}",
                grad[k]
            );
        }
        let f0 = eval(&vec![0.0; m]);
        for k in 0..m {
            for l in k..m {
                let fd = if k == l {
                    let mut xp = vec![0.0; m];
                    let mut xm = vec![0.0; m];
                    xp[k] = h2;
                    xm[k] = -h2;
                    (eval(&xp) - 2.0 * f0 + eval(&xm)) / (h2 * h2)
                } else {
                    let mut xpp = vec![0.0; m];
                    let mut xpm = vec![0.0; m];
                    let mut xmp = vec![0.0; m];
                    let mut xmm = vec![0.0; m];
                    xpp[k] = h2;
                    xpp[l] = h2;
                    xpm[k] = h2;
                    xpm[l] = -h2;
                    xmp[k] = -h2;
                    xmp[l] = h2;
                    xmm[k] = -h2;
                    xmm[l] = -h2;
                    (eval(&xpp) - eval(&xpm) - eval(&xmp) + eval(&xmm)) / (4.0 * h2 * h2)
                };
                let a = hess.get(k, l);
                assert!(
                    (a - fd).abs() <= 1e-5 * (1.0 + a.abs()),
                    "hess ({k},{l}): {a} vs {fd}"
                );
            }
        }
    }
}
