//! Third-order jets of graph parametrizations at capillary free-boundary
//! points.
//!
//! Coordinates follow the wall chart: the surface is the graph of u over
//! the hyperplane, the free boundary passes through the base point, the
//! first n-1 chart directions are tangential to it and direction n is the
//! inward conormal. At the base point the contact-angle condition pins
//! u_n = -tan(theta); minimality and the differentiated boundary
//! conditions then determine every remaining derivative that is not a
//! free parameter. Free parameters are the tangential diagonal second
//! derivatives and the fully tangential third derivatives; in cone mode
//! the radial direction (index 1) additionally satisfies the homogeneity
//! relations u_11 = 0 and u_ij1 = -u_ij / |x0|.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{SymMatrix, SymTensor3};
use crate::spectral::Spectrum;

/// Cone geometry: surface dimension and contact angle.
///
/// Angles in (pi/2, pi) are mapped to pi - theta at construction (the
/// functional is symmetric under that reflection); the flag records when
/// this happened. The right angle itself is rejected.
#[derive(Debug, Clone, Copy)]
pub struct ConeSpec {
    n: usize,
    theta: f64,
    sigma: f64,
    normalized: bool,
}

impl ConeSpec {
    pub fn new(n: usize, theta: f64) -> Result<Self> {
        if !(2..=crate::matrix::MAX_DIM).contains(&n) {
            return Err(Error::Dimension(n));
        }
        if !theta.is_finite() || theta <= 0.0 || theta >= std::f64::consts::PI {
            return Err(Error::InvalidAngle(theta));
        }
        let half = std::f64::consts::FRAC_PI_2;
        let (theta, normalized) = if theta > half {
            (std::f64::consts::PI - theta, true)
        } else {
            (theta, false)
        };
        if theta == half {
            return Err(Error::InvalidAngle(theta));
        }
        Ok(Self {
            n,
            theta,
            sigma: theta.cos(),
            normalized,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// sigma = cos(theta).
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn was_normalized(&self) -> bool {
        self.normalized
    }

    pub fn sin_theta(&self) -> f64 {
        self.theta.sin()
    }

    pub fn cos_theta(&self) -> f64 {
        self.sigma
    }

    pub fn tan_theta(&self) -> f64 {
        self.theta.tan()
    }

    pub fn cot_theta(&self) -> f64 {
        1.0 / self.theta.tan()
    }
}

/// Orthonormal frame at a free-boundary point, in ambient (n+1)-vector
/// coordinates: `nu` the outward surface normal, `eta` the outward conormal
/// of the boundary inside the surface, `nubar` the outward conormal inside
/// the wall.
#[derive(Debug, Clone)]
pub struct Frame {
    pub nu: Vec<f64>,
    pub eta: Vec<f64>,
    pub nubar: Vec<f64>,
}

/// Frame at the base point: nubar = e_n, nu = sin(theta) e_n +
/// cos(theta) e_{n+1}, eta = cos(theta) e_n - sin(theta) e_{n+1}.
pub fn boundary_frame(spec: &ConeSpec) -> Frame {
    let n = spec.dim();
    let mut nu = vec![0.0; n + 1];
    let mut eta = vec![0.0; n + 1];
    let mut nubar = vec![0.0; n + 1];
    nubar[n - 1] = 1.0;
    nu[n - 1] = spec.sin_theta();
    nu[n] = spec.cos_theta();
    eta[n - 1] = spec.cos_theta();
    eta[n] = -spec.sin_theta();
    Frame { nu, eta, nubar }
}

/// Free parameters of a boundary jet. `d2_tangential` lists the diagonal
/// second derivatives u_11..u_{n-1,n-1}; `d3_tangential` the free third
/// derivatives u_ijk for i <= j <= k over the tangential indices, in
/// lexicographic order of the sorted triples. In cone mode the radial
/// tangential index is excluded from `d3_tangential` (its triples are
/// derived) and `d2_tangential[0]` must be zero.
#[derive(Debug, Clone)]
pub struct JetParams {
    pub d2_tangential: Vec<f64>,
    pub d3_tangential: Vec<f64>,
    pub radius: Option<f64>,
}

fn sorted_triples(lo: usize, hi: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in lo..hi {
        for j in i..hi {
            for k in j..hi {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Third-order jet at a capillary free-boundary point with the constraint
/// system resolved. Indices are zero-based: 0..n-2 tangential, n-1 normal.
#[derive(Debug, Clone)]
pub struct BoundaryJet {
    spec: ConeSpec,
    u_n: f64,
    d2: Vec<f64>,
    u_nn: f64,
    thirds: SymTensor3,
    radius: Option<f64>,
}

pub fn make_boundary_jet(spec: &ConeSpec, params: &JetParams) -> Result<BoundaryJet> {
    let n = spec.dim();
    let nt = n - 1; // tangential count
    if params.d2_tangential.len() != nt {
        return Err(Error::InvalidArgument(format!(
            "d2_tangential needs {nt} entries, got {}",
            params.d2_tangential.len()
        )));
    }
    let cone_mode = params.radius.is_some();
    if let Some(r) = params.radius {
        if !(r > 0.0) {
            return Err(Error::JetConstraint(format!("radius must be positive, got {r}")));
        }
        if params.d2_tangential[0] != 0.0 {
            return Err(Error::JetConstraint(
                "cone mode requires a vanishing radial second derivative (u_11 = 0)".into(),
            ));
        }
    }
    let free_triples = if cone_mode {
        sorted_triples(1, nt)
    } else {
        sorted_triples(0, nt)
    };
    if params.d3_tangential.len() != free_triples.len() {
        return Err(Error::InvalidArgument(format!(
            "d3_tangential needs {} entries, got {}",
            free_triples.len(),
            params.d3_tangential.len()
        )));
    }

    let u_n = -spec.tan_theta();
    let q = 1.0 + u_n * u_n;
    let d2 = params.d2_tangential.clone();
    let sum_d2: f64 = d2.iter().sum();
    let u_nn = -q * sum_d2;

    let nn = n - 1; // normal index
    let mut t = SymTensor3::zeros(n);
    // fully tangential triples: free, plus the radial-homogeneity family
    for (&(i, j, k), &v) in free_triples.iter().zip(&params.d3_tangential) {
        t.set(i, j, k, v);
    }
    if let Some(r) = params.radius {
        for j in 0..nt {
            for k in j..nt {
                let v = if j == k { -d2[j] / r } else { 0.0 };
                t.set(0, j, k, v);
            }
        }
    }
    // u_iin from the differentiated contact-angle condition
    for i in 0..nt {
        t.set(i, i, nn, (u_nn * d2[i] - d2[i] * d2[i]) / u_n);
        // u_ijn = 0 for distinct tangential pairs is already the default
    }
    // u_inn from the tangentially differentiated minimal-surface equation
    for i in 0..nt {
        let s: f64 = (0..nt).map(|j| t.get(i, j, j)).sum();
        t.set(i, nn, nn, -q * s);
    }
    // u_nnn from the normally differentiated minimal-surface equation
    let sum_sq: f64 = d2.iter().map(|x| x * x).sum();
    let u_nnn = q / u_n * sum_sq + (1.0 + 3.0 * u_n * u_n) / (u_n * q) * u_nn * u_nn;
    t.set(nn, nn, nn, u_nnn);

    Ok(BoundaryJet {
        spec: *spec,
        u_n,
        d2,
        u_nn,
        thirds: t,
        radius: params.radius,
    })
}

/// Draws the free jet parameters uniformly from [-2, 2].
pub fn random_jet(
    spec: &ConeSpec,
    radius: Option<f64>,
    rng: &mut impl Rng,
) -> Result<BoundaryJet> {
    let n = spec.dim();
    let nt = n - 1;
    let cone_mode = radius.is_some();
    let mut d2: Vec<f64> = (0..nt).map(|_| rng.gen_range(-2.0..2.0)).collect();
    if cone_mode {
        d2[0] = 0.0;
    }
    let count = if cone_mode {
        sorted_triples(1, nt).len()
    } else {
        sorted_triples(0, nt).len()
    };
    let d3: Vec<f64> = (0..count).map(|_| rng.gen_range(-2.0..2.0)).collect();
    make_boundary_jet(
        spec,
        &JetParams {
            d2_tangential: d2,
            d3_tangential: d3,
            radius,
        },
    )
}

impl BoundaryJet {
    pub fn spec(&self) -> &ConeSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn is_cone_mode(&self) -> bool {
        self.radius.is_some()
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// u_n = -tan(theta), the only nonzero first derivative.
    pub fn u_normal(&self) -> f64 {
        self.u_n
    }

    pub fn u_nn(&self) -> f64 {
        self.u_nn
    }

    /// Diagonal tangential second derivatives u_11..u_{n-1,n-1}.
    pub fn d2_tangential(&self) -> &[f64] {
        &self.d2
    }

    /// Full gradient vector of u at the base point.
    pub fn gradient(&self) -> Vec<f64> {
        let n = self.dim();
        let mut g = vec![0.0; n];
        g[n - 1] = self.u_n;
        g
    }

    /// Full (diagonal) Hessian of u at the base point.
    pub fn hessian(&self) -> SymMatrix {
        let n = self.dim();
        let mut vals = vec![0.0; n];
        vals[..n - 1].copy_from_slice(&self.d2);
        vals[n - 1] = self.u_nn;
        SymMatrix::diagonal(&vals).expect("jet dimension validated at construction")
    }

    /// Third derivative u_ijk (zero-based indices, any order).
    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        self.thirds.get(i, j, k)
    }

    pub fn thirds(&self) -> &SymTensor3 {
        &self.thirds
    }

    /// Re-substitutes the jet into every constraint family and returns the
    /// largest absolute residual.
    pub fn constraint_residuals(&self) -> f64 {
        let n = self.dim();
        let nn = n - 1;
        let u_n = self.u_n;
        let q = 1.0 + u_n * u_n;
        let mut worst = 0.0f64;
        let mut push = |r: f64| worst = worst.max(r.abs());

        // minimality
        let sum_d2: f64 = self.d2.iter().sum();
        push(sum_d2 + self.u_nn / q);
        for i in 0..nn {
            // u_iin
            push(self.third(i, i, nn) - (self.u_nn * self.d2[i] - self.d2[i] * self.d2[i]) / u_n);
            // u_inn against the tangential divergence relation
            let s: f64 = (0..nn).map(|j| self.third(i, j, j)).sum();
            push(s + self.third(i, nn, nn) / q);
            // u_ijn vanishes for distinct tangential pairs
            for j in 0..nn {
                if i != j {
                    push(self.third(i, j, nn));
                }
            }
        }
        // u_nnn
        let sum_sq: f64 = self.d2.iter().map(|x| x * x).sum();
        push(
            self.third(nn, nn, nn)
                - (q / u_n * sum_sq + (1.0 + 3.0 * u_n * u_n) / (u_n * q) * self.u_nn * self.u_nn),
        );
        // cone-mode homogeneity: u_ij1 = -u_ij / radius for every pair
        if let Some(r) = self.radius {
            let hess = self.hessian();
            for i in 0..n {
                for j in i..n {
                    push(self.third(i, j, 0) + hess.get(i, j) / r);
                }
            }
        }
        worst
    }
}

/// First and second fundamental forms of the graph at the base point.
#[derive(Debug, Clone)]
pub struct FundamentalForms {
    pub g: SymMatrix,
    pub g_inv: SymMatrix,
    /// Second fundamental form induced by the outward normal; diagonal at
    /// the base point, with entries equal to the principal curvatures.
    pub a: SymMatrix,
    /// Squared Frobenius norm of `a`, evaluated through its own closed
    /// form rather than from the matrix.
    pub norm_a2: f64,
}

/// Evaluates g = Id + grad u (x) grad u, its inverse, the symmetrized
/// second fundamental form and |A|^2, all through the generic graph
/// formulas (not the diagonal shortcuts).
pub fn fundamental_forms(jet: &BoundaryJet) -> FundamentalForms {
    let n = jet.dim();
    let p = jet.gradient();
    let hess = jet.hessian();
    let q = 1.0 + p.iter().map(|x| x * x).sum::<f64>();
    let sq = q.sqrt();

    let g = SymMatrix::from_fn(n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id + p[i] * p[j]
    })
    .expect("dimension validated");
    let g_inv = SymMatrix::from_fn(n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - p[i] * p[j] / q
    })
    .expect("dimension validated");

    let hp = hess.matvec(&p);
    let a = SymMatrix::from_fn(n, |i, j| {
        (hess.get(i, j) - 0.5 * (p[i] * hp[j] + hp[i] * p[j]) / q) / sq
    })
    .expect("dimension validated");

    let hess_sq: f64 = {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += hess.get(i, j) * hess.get(i, j);
            }
        }
        s
    };
    let hp_sq: f64 = hp.iter().map(|x| x * x).sum();
    let p_sq = q - 1.0;
    let norm_a2 = (hess_sq + p_sq * hp_sq / (q * q) - 2.0 * hp_sq / q) / q;

    FundamentalForms { g, g_inv, a, norm_a2 }
}

/// Principal curvatures in coordinate order: u_jj / (1+u_n^2)^{1/2} on the
/// tangential directions and u_nn / (1+u_n^2)^{3/2} on the conormal one.
pub fn principal_curvatures(jet: &BoundaryJet) -> Spectrum {
    let n = jet.dim();
    let q = 1.0 + jet.u_n * jet.u_n;
    let mut lam = vec![0.0; n];
    for i in 0..n - 1 {
        lam[i] = jet.d2[i] / q.sqrt();
    }
    lam[n - 1] = jet.u_nn / (q * q.sqrt());
    Spectrum::diagonal(&lam).expect("jet dimension validated at construction")
}

/// Mean curvature of the free boundary inside the wall, pointing towards
/// the complement of the wetted region: u_nn / (u_n (1 + u_n^2)).
pub fn mean_curvature_fb(jet: &BoundaryJet) -> f64 {
    let u_n = jet.u_n;
    jet.u_nn / (u_n * (1.0 + u_n * u_n))
}

/// Same quantity computed from the tangential trace, -sum u_ii / u_n;
/// agrees with [`mean_curvature_fb`] by minimality.
pub fn mean_curvature_fb_tangential(jet: &BoundaryJet) -> f64 {
    -jet.d2.iter().sum::<f64>() / jet.u_n
}

/// Residuals of the free-boundary curvature identity: the pair
/// |cot(theta) (A eta . eta) + cos(theta) H| and |lambda_n + sin(theta) H|.
pub fn check_lemma_fb_identity(jet: &BoundaryJet) -> (f64, f64) {
    let spec = jet.spec();
    let n = jet.dim();
    let forms = fundamental_forms(jet);
    let a_eta_eta = forms.a.get(n - 1, n - 1);
    let h = mean_curvature_fb(jet);
    let lam_n = principal_curvatures(jet).values()[n - 1];
    let r1 = (spec.cot_theta() * a_eta_eta + spec.cos_theta() * h).abs();
    let r2 = (lam_n + spec.sin_theta() * h).abs();
    (r1, r2)
}

/// Converts a coordinate normal derivative d_n(phi) into the intrinsic
/// conormal derivative (grad_M phi . eta): the conormal tangent vector is
/// the normalized e_n + u_n e_{n+1}, so the factor is cos(theta).
pub fn eta_derivative(jet: &BoundaryJet, phi_normal_derivative: f64) -> f64 {
    jet.spec().cos_theta() * phi_normal_derivative
}
