//! Competitor functions and the interior/boundary inequality chains.
//!
//! The interior chain evaluates, on a finite-dimensional cone
//! configuration (eigenvalues plus a third-derivative tensor constrained
//! by homogeneity and minimality), every step used to bound
//! (1/2) Lap c^2 - |grad c|^2 + |A|^2 c^2 from below for a convex
//! one-homogeneous symmetric function c = f(eigenvalues): the exact
//! remainder identity, the per-direction Cauchy-Schwarz steps, the radial
//! gradient identity, the pair-sum identity and the final display. The
//! boundary side checks the conormal derivative of the competitor two
//! ways: direct third-order differentiation of the coordinate expression
//! against the closed forms in the mean curvature and the curvature
//! cubics.
//!
//! Sign conventions for the split quadratic: eigenvalues >= 0 carry
//! weight 1 (zero counts as non-negative), negative ones carry weight a.

use rand::Rng;

use crate::error::{Error, Result};
use crate::jet::{eta_derivative, fundamental_forms, mean_curvature_fb, principal_curvatures, BoundaryJet};
use crate::matrix::SymTensor3;
use crate::spectral::{hess_f_at_diagonal, Spectrum, SymmetricFn, DEFAULT_TIE_TOL};

/// Competitor family: plain powers of |A|, or the sign-split quadratic
/// with weight `a` on the negative principal curvatures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompetitorFamily {
    PowerOfNormA,
    SplitQuadratic { a: f64 },
}

impl CompetitorFamily {
    pub fn weight(&self, lambda: f64) -> f64 {
        match self {
            CompetitorFamily::PowerOfNormA => 1.0,
            CompetitorFamily::SplitQuadratic { a } => {
                if lambda >= 0.0 {
                    1.0
                } else {
                    *a
                }
            }
        }
    }

    /// c^2 = sum of weighted squared eigenvalues.
    pub fn c_squared(&self, lambdas: &[f64]) -> f64 {
        lambdas.iter().map(|&l| self.weight(l) * l * l).sum()
    }

    pub fn c_value(&self, lambdas: &[f64]) -> f64 {
        self.c_squared(lambdas).sqrt()
    }

    /// Weighted cubic sum: cubes of non-negative eigenvalues plus `a`
    /// times the cubes of the negative ones.
    pub fn cubic(&self, lambdas: &[f64]) -> f64 {
        lambdas.iter().map(|&l| self.weight(l) * l * l * l).sum()
    }

    /// The underlying one-homogeneous symmetric function.
    pub fn symmetric_fn(&self, n: usize) -> Result<SymmetricFn> {
        match self {
            CompetitorFamily::PowerOfNormA => Ok(SymmetricFn::frobenius(n)),
            CompetitorFamily::SplitQuadratic { a } => SymmetricFn::split_quadratic(n, *a),
        }
    }
}

/// A competitor w = (c^2 + epsilon)^(alpha/2) built from a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompetitorSpec {
    pub family: CompetitorFamily,
    pub alpha: f64,
    pub epsilon: f64,
}

impl CompetitorSpec {
    pub fn new(family: CompetitorFamily, alpha: f64, epsilon: f64) -> Result<Self> {
        if let CompetitorFamily::SplitQuadratic { a } = family {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidCompetitor(format!(
                    "split weight must be positive, got {a}"
                )));
            }
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidCompetitor(format!(
                "exponent alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidCompetitor(format!(
                "regularization epsilon must be non-negative, got {epsilon}"
            )));
        }
        Ok(Self {
            family,
            alpha,
            epsilon,
        })
    }

    pub fn c_value(&self, lambdas: &[f64]) -> f64 {
        self.family.c_value(lambdas)
    }

    /// w = (c^2 + epsilon)^(alpha/2).
    pub fn w_value(&self, lambdas: &[f64]) -> f64 {
        (self.family.c_squared(lambdas) + self.epsilon).powf(self.alpha / 2.0)
    }
}

/// Which display an inequality/identity evaluation belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LedgerContext {
    /// Exact remainder identity: lhs is the full interior expression, rhs
    /// the off-diagonal third-derivative sum; the gap is the convexity term.
    Remainder,
    /// Per-direction Cauchy-Schwarz bound on c_k^2.
    CauchySchwarz { k: usize },
    /// Radial gradient identity c_1 = -c/|x|.
    RadialIdentity,
    /// Sum over non-radial pairs of (lambda_i - lambda_j)(f_i - f_j)
    /// equals (n-1) f.
    PairSumIdentity,
    /// Final interior display against (2/(n-1))|grad c|^2 + 2(n-2)/(n-1) c^2/|x|^2.
    InteriorFinal,
    /// Interior coefficient for powers of |A| at the given gradient ratio.
    PowerCoefficient,
    /// Simplified bound alpha(alpha+1)/|x|^2.
    PowerSimplified,
    /// Conormal derivative of |A|^2 (direct vs closed form).
    BoundaryNormA2,
    /// Conormal derivative of the split-quadratic c^2 (direct vs closed form).
    BoundarySplit,
    /// d_n a_jj intermediate identity for a tangential direction.
    SplitDiagDerivative { j: usize },
    /// d_n a_nn intermediate identity.
    SplitNormalDerivative,
}

impl std::fmt::Display for LedgerContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LedgerContext::Remainder => write!(f, "remainder"),
            LedgerContext::CauchySchwarz { k } => write!(f, "cauchy_schwarz_k{k}"),
            LedgerContext::RadialIdentity => write!(f, "radial_identity"),
            LedgerContext::PairSumIdentity => write!(f, "pair_sum_identity"),
            LedgerContext::InteriorFinal => write!(f, "interior_final"),
            LedgerContext::PowerCoefficient => write!(f, "power_coefficient"),
            LedgerContext::PowerSimplified => write!(f, "power_simplified"),
            LedgerContext::BoundaryNormA2 => write!(f, "boundary_norm_a2"),
            LedgerContext::BoundarySplit => write!(f, "boundary_split"),
            LedgerContext::SplitDiagDerivative { j } => write!(f, "split_diag_derivative_{j}"),
            LedgerContext::SplitNormalDerivative => write!(f, "split_normal_derivative"),
        }
    }
}

/// One evaluated display: for inequalities the claim is lhs >= rhs, for
/// identities the gap should vanish.
#[derive(Debug, Clone)]
pub struct LedgerEntry {
    pub context: LedgerContext,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

impl LedgerEntry {
    fn new(context: LedgerContext, lhs: f64, rhs: f64) -> Self {
        Self {
            context,
            lhs,
            rhs,
            gap: lhs - rhs,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(
            self.context,
            LedgerContext::RadialIdentity
                | LedgerContext::PairSumIdentity
                | LedgerContext::SplitDiagDerivative { .. }
                | LedgerContext::SplitNormalDerivative
                | LedgerContext::BoundaryNormA2
                | LedgerContext::BoundarySplit
        )
    }
}

/// A cone point in the interior chart: eigenvalues of the second
/// fundamental form (radial entry first, value zero, trace zero) and the
/// full third-derivative tensor, constrained by homogeneity
/// (u_ij1 = -u_ij/|x|, u_11k = 0) and constant mean curvature
/// (sum_i u_iik = 0 for every k).
#[derive(Debug, Clone)]
pub struct ConeConfiguration {
    pub lambdas: Vec<f64>,
    pub thirds: SymTensor3,
    pub radius: f64,
}

impl ConeConfiguration {
    /// Draws eigenvalues and free third derivatives uniformly from [-2, 2],
    /// then resolves the trace, homogeneity and closure constraints.
    pub fn random(n: usize, radius: f64, rng: &mut impl Rng) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension(n));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let mut lambdas = vec![0.0; n];
        for l in lambdas.iter_mut().take(n - 1).skip(1) {
            *l = rng.gen_range(-2.0..2.0);
        }
        lambdas[n - 1] = -lambdas[1..n - 1].iter().sum::<f64>();

        let mut thirds = SymTensor3::zeros(n);
        for i in 1..n {
            for j in i..n {
                for k in j..n {
                    thirds.set(i, j, k, rng.gen_range(-2.0..2.0));
                }
            }
        }
        // radial homogeneity: u_ij1 = -u_ij / |x| with u_ij = diag(lambda)
        for j in 0..n {
            for k in j..n {
                let v = if j == k { -lambdas[j] / radius } else { 0.0 };
                thirds.set(0, j, k, v);
            }
        }
        // constant mean curvature: sum_i u_iik = 0, resolved on the cubes
        for k in 1..n {
            let s: f64 = (1..n).filter(|&i| i != k).map(|i| thirds.get(i, i, k)).sum();
            thirds.set(k, k, k, -s);
        }
        let cfg = Self {
            lambdas,
            thirds,
            radius,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n < 3 {
            return Err(Error::Dimension(n));
        }
        if !(self.radius > 0.0) {
            return Err(Error::JetConstraint("non-positive radius".into()));
        }
        let scale = 1e-12 * (1.0 + self.max_abs());
        if self.lambdas[0] != 0.0 {
            return Err(Error::JetConstraint("radial eigenvalue must vanish".into()));
        }
        if self.lambdas.iter().sum::<f64>().abs() > scale {
            return Err(Error::JetConstraint("eigenvalues must sum to zero".into()));
        }
        for j in 0..n {
            for k in j..n {
                let expected = if j == k { -self.lambdas[j] / self.radius } else { 0.0 };
                if (self.thirds.get(0, j, k) - expected).abs() > scale {
                    return Err(Error::JetConstraint(format!(
                        "radial homogeneity fails at (1,{},{})",
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        for k in 0..n {
            let s: f64 = (0..n).map(|i| self.thirds.get(i, i, k)).sum();
            if s.abs() > scale {
                return Err(Error::JetConstraint(format!(
                    "mean-curvature closure fails in direction {}",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.lambdas
            .iter()
            .fold(self.thirds.max_abs(), |m, v| m.max(v.abs()))
    }
}

/// Full evaluation of the interior chain on one configuration.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub entries: Vec<LedgerEntry>,
    /// Cubic curvature scale (1 + max |input|)^3 for tolerance scaling.
    pub scale: f64,
    pub c_value: f64,
    pub norm_a2: f64,
    pub grad_c_sq: f64,
    /// (1/2) Lap c^2 after substituting Lap a_ii = -lambda_i |A|^2.
    pub half_lap_c_sq: f64,
    pub witness: ConeConfiguration,
}

impl ChainReport {
    /// Most negative inequality gap (identities excluded).
    pub fn min_inequality_gap(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| !e.is_identity())
            .map(|e| e.gap)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest absolute identity gap.
    pub fn max_identity_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.is_identity())
            .map(|e| e.gap.abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates the generalized interior inequality chain for a convex,
/// one-homogeneous symmetric f on a cone configuration.
///
/// The divided differences used in the Cauchy-Schwarz steps are
/// (f_i - f_k)/(lambda_i - lambda_k), i.e. half the off-diagonal
/// second-derivative table, which is the sharp constant.
pub fn simons_interior_chain(f: &SymmetricFn, cfg: &ConeConfiguration) -> Result<ChainReport> {
    if f.homogeneity_degree() != Some(1.0) {
        return Err(Error::InvalidArgument(format!(
            "{} is not flagged one-homogeneous",
            f.name()
        )));
    }
    if !f.is_convex() {
        return Err(Error::InvalidArgument(format!(
            "{} is not flagged convex",
            f.name()
        )));
    }
    cfg.validate()?;
    let n = cfg.dim();
    if f.arity() != n {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: n,
        });
    }
    let lam = &cfg.lambdas;
    let t = &cfg.thirds;
    let c = f.value(lam);
    let g = f.grad(lam);
    let hess = f.hess(lam);
    let spectral = hess_f_at_diagonal(f, &Spectrum::diagonal(lam)?, DEFAULT_TIE_TOL)?;
    let norm_a2: f64 = lam.iter().map(|x| x * x).sum();

    // gradient components c_k = sum_i f_i u_iik
    let c_k: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|i| g[i] * t.get(i, i, k)).sum())
        .collect();
    let grad_c_sq: f64 = c_k.iter().map(|x| x * x).sum();

    // remainder sum: (1/2) sum_{i<j} sum_k u_ijk^2 d2_{a_ij} F^2, with
    // d2_{a_ij} F^2 = 2 c d2_{a_ij} F
    let mut remainder_rhs = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let coeff = 2.0 * c * spectral.offdiag.get(i, j);
            let mut s = 0.0;
            for k in 0..n {
                let u = t.get(i, j, k);
                s += u * u;
            }
            remainder_rhs += 0.5 * coeff * s;
        }
    }

    // (1/2) Lap c^2 with the Simons substitution Lap a_ii = -lambda_i |A|^2
    let mut half_lap = 0.0;
    for i in 0..n {
        half_lap += c * g[i] * (-lam[i] * norm_a2);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                half_lap +=
                    (hess.get(i, j) * c + g[i] * g[j]) * t.get(i, i, k) * t.get(j, j, k);
            }
        }
    }
    half_lap += remainder_rhs;

    let lhs_exact = half_lap - grad_c_sq + norm_a2 * c * c;

    let mut entries = Vec::with_capacity(n + 4);
    entries.push(LedgerEntry::new(
        LedgerContext::Remainder,
        lhs_exact,
        remainder_rhs,
    ));

    // per-direction Cauchy-Schwarz with the sharp divided differences
    for k in 0..n {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for i in 0..n {
            if i == k {
                continue;
            }
            let d = 0.5 * spectral.offdiag.get(i, k);
            let u = t.get(i, i, k);
            s1 += d * u * u;
            s2 += (lam[i] - lam[k]) * (g[i] - g[k]);
        }
        entries.push(LedgerEntry::new(
            LedgerContext::CauchySchwarz { k },
            s1 * s2,
            c_k[k] * c_k[k],
        ));
    }

    entries.push(LedgerEntry::new(
        LedgerContext::RadialIdentity,
        c_k[0],
        -c / cfg.radius,
    ));

    let mut pair_sum = 0.0;
    for i in 1..n {
        for j in (i + 1)..n {
            pair_sum += (lam[i] - lam[j]) * (g[i] - g[j]);
        }
    }
    entries.push(LedgerEntry::new(
        LedgerContext::PairSumIdentity,
        pair_sum,
        (n as f64 - 1.0) * c,
    ));

    let nf = n as f64;
    let final_rhs = 2.0 / (nf - 1.0) * grad_c_sq
        + 2.0 * (nf - 2.0) / (nf - 1.0) * c * c / (cfg.radius * cfg.radius);
    entries.push(LedgerEntry::new(
        LedgerContext::InteriorFinal,
        lhs_exact,
        final_rhs,
    ));

    let m = 1.0 + cfg.max_abs();
    Ok(ChainReport {
        entries,
        scale: m * m * m,
        c_value: c,
        norm_a2,
        grad_c_sq,
        half_lap_c_sq: half_lap,
        witness: cfg.clone(),
    })
}

/// Interior coefficient of the power competitor w = c^alpha: the full
/// constant at the given gradient ratio and the simplified bound
/// alpha(alpha+1)/|x|^2 valid for alpha >= 1 - 2/(n-1).
pub fn power_interior_bound(
    alpha: f64,
    norm_a: f64,
    grad_norm_a: f64,
    radius: f64,
    n: usize,
) -> Result<Vec<LedgerEntry>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidCompetitor(format!("alpha {alpha} not in (0,1)")));
    }
    if !(norm_a > 0.0) {
        return Err(Error::Degenerate("vanishing |A| has no gradient ratio".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let floor = norm_a / radius;
    if grad_norm_a < floor * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "gradient magnitude {grad_norm_a} below the homogeneity floor {floor}"
        )));
    }
    let nf = n as f64;
    let ratio = grad_norm_a / norm_a;
    let full = 2.0 * alpha * (nf - 2.0) / (nf - 1.0) / (radius * radius)
        + alpha * (alpha - 1.0 + 2.0 / (nf - 1.0)) * ratio * ratio;
    let simplified = alpha * (alpha + 1.0) / (radius * radius);
    Ok(vec![
        LedgerEntry::new(LedgerContext::PowerCoefficient, full, 0.0),
        LedgerEntry::new(LedgerContext::PowerSimplified, full, simplified),
    ])
}

/// Two-route check of a boundary identity: the direct third-order jet
/// differentiation against the closed form.
#[derive(Debug, Clone)]
pub struct BoundaryCheck {
    pub direct: f64,
    pub closed: f64,
    pub residual: f64,
    pub tolerance: f64,
    /// Set if the identity closes only without the conormal cos factor;
    /// always false when the convention is right.
    pub convention_flipped: bool,
}

/// d_n |A|^2 / 2 by differentiating the coordinate expression
/// |A|^2 = Phi(grad u, Hess u) along the conormal direction, using the
/// chain rule with the jet's second and third derivatives.
fn half_dn_norm_a2(jet: &BoundaryJet) -> f64 {
    let n = jet.dim();
    let nn = n - 1;
    let p = jet.gradient();
    let hm = jet.hessian();
    let q = 1.0 + p.iter().map(|x| x * x).sum::<f64>();
    let p_sq = q - 1.0;
    let hp = hm.matvec(&p);
    let hhp = hm.matvec(&hp);
    let t_val: f64 = hp.iter().map(|x| x * x).sum();
    let hnorm2: f64 = {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += hm.get(i, j) * hm.get(i, j);
            }
        }
        s
    };

    // dPhi/dp
    let q2 = q * q;
    let q3 = q2 * q;
    let q4 = q3 * q;
    let mut dphi_dp = vec![0.0; n];
    for i in 0..n {
        dphi_dp[i] = -2.0 * hnorm2 * p[i] / q2 + 2.0 * t_val * p[i] / q3
            + 2.0 * p_sq * hhp[i] / q3
            - 6.0 * p_sq * t_val * p[i] / q4
            - 4.0 * hhp[i] / q2
            + 8.0 * t_val * p[i] / q3;
    }
    // dPhi/dH (contracted against a symmetric direction)
    let coeff = p_sq / q3 - 2.0 / q2;
    let mut acc = 0.0;
    for i in 0..n {
        // d_n of grad u is the conormal column of the Hessian
        acc += dphi_dp[i] * hm.get(i, nn);
    }
    for i in 0..n {
        for j in 0..n {
            let dphi_dh = 2.0 * hm.get(i, j) / q + coeff * (hp[i] * p[j] + p[i] * hp[j]);
            // d_n of Hess u is the third-derivative slice
            acc += dphi_dh * jet.third(i, j, nn);
        }
    }
    0.5 * acc
}

/// Checks the conormal derivative of |A|^2 against the closed form
/// 2 cos(theta) H |A|^2 + cot(theta) sum lambda^3.
pub fn boundary_identity_norm_a2(jet: &BoundaryJet) -> BoundaryCheck {
    let spec = jet.spec();
    let forms = fundamental_forms(jet);
    let lam = principal_curvatures(jet);
    let h = mean_curvature_fb(jet);
    let cubic: f64 = lam.values().iter().map(|x| x * x * x).sum();
    let direct = eta_derivative(jet, half_dn_norm_a2(jet));
    let closed = 2.0 * spec.cos_theta() * h * forms.norm_a2 + spec.cot_theta() * cubic;
    let residual = (direct - closed).abs();
    let tolerance = 1e-10 * (1.0 + forms.norm_a2.powf(1.5));
    let convention_flipped = if residual > tolerance {
        (half_dn_norm_a2(jet) - closed).abs() <= tolerance
    } else {
        false
    };
    BoundaryCheck {
        direct,
        closed,
        residual,
        tolerance,
        convention_flipped,
    }
}

/// Result of the split-quadratic boundary evaluation: the intermediate
/// entry-derivative identities and the final closure.
#[derive(Debug, Clone)]
pub struct SplitBoundaryCheck {
    pub entries: Vec<LedgerEntry>,
    pub max_residual: f64,
    pub tolerance: f64,
}

/// Evaluates the boundary identity for the split-quadratic competitor:
/// d_n a_jj and d_n a_nn against their closed forms, then
/// (1/2)(grad c^2 . eta) against the branch of the final display selected
/// by the sign of the boundary mean curvature (weight a on |A|^2 when
/// H >= 0, weight 1 when H <= 0).
pub fn boundary_identity_split(jet: &BoundaryJet, a: f64) -> Result<SplitBoundaryCheck> {
    if !(a > 0.0) {
        return Err(Error::InvalidCompetitor(format!(
            "split weight must be positive, got {a}"
        )));
    }
    let spec = jet.spec();
    let n = jet.dim();
    let nn = n - 1;
    let u_n = jet.u_normal();
    let q = 1.0 + u_n * u_n;
    let sq = q.sqrt();
    let lam = principal_curvatures(jet);
    let lv = lam.values();
    let h = mean_curvature_fb(jet);
    if lv[nn] == 0.0 && h != 0.0 {
        return Err(Error::Degenerate(
            "lambda_n = 0 with nonzero boundary mean curvature; inconsistent jet".into(),
        ));
    }
    let family = CompetitorFamily::SplitQuadratic { a };

    let mut entries = Vec::with_capacity(n + 1);
    let mut dn_a = vec![0.0; n];
    for j in 0..nn {
        let direct = jet.third(j, j, nn) / sq - jet.d2_tangential()[j] * u_n * jet.u_nn() / (q * sq);
        let closed = spec.cot_theta() * sq * lv[j] * lv[j] + h * lv[j];
        dn_a[j] = direct;
        entries.push(LedgerEntry::new(
            LedgerContext::SplitDiagDerivative { j },
            direct,
            closed,
        ));
    }
    let direct_nn =
        jet.third(nn, nn, nn) / (q * sq) - 3.0 * u_n * jet.u_nn() * jet.u_nn() / (q * q * sq);
    // (H / lambda_n) sum lambda^2 in the form valid also at lambda_n = 0
    let closed_nn = -lv.iter().map(|x| x * x).sum::<f64>() / spec.sin_theta();
    dn_a[nn] = direct_nn;
    entries.push(LedgerEntry::new(
        LedgerContext::SplitNormalDerivative,
        direct_nn,
        closed_nn,
    ));

    // (1/2) d_n c^2 = sum_j w_j lambda_j d_n a_jj, converted to the conormal
    let half_dn_c2: f64 = (0..n).map(|j| family.weight(lv[j]) * lv[j] * dn_a[j]).sum();
    let direct_total = eta_derivative(jet, half_dn_c2);

    let c2 = family.c_squared(lv);
    let norm_a2: f64 = lv.iter().map(|x| x * x).sum();
    let cubic = family.cubic(lv);
    let weight_on_norm = if h >= 0.0 { a } else { 1.0 };
    let closed_total = spec.cos_theta() * h * (c2 + weight_on_norm * norm_a2)
        + spec.cot_theta() * cubic;
    entries.push(LedgerEntry::new(
        LedgerContext::BoundarySplit,
        direct_total,
        closed_total,
    ));

    let max_residual = entries.iter().map(|e| e.gap.abs()).fold(0.0, f64::max);
    let tolerance = 1e-10 * (1.0 + norm_a2.powf(1.5));
    Ok(SplitBoundaryCheck {
        entries,
        max_residual,
        tolerance,
    })
}

/// The dimensionless boundary ratio L whose bound controls admissible
/// exponents. Requires a nonzero mean curvature; at H = 0 the zero-H
/// cubic condition applies instead.
pub fn l_function(
    family: &CompetitorFamily,
    lambdas: &[f64],
    theta: f64,
    h: f64,
) -> Result<f64> {
    if h == 0.0 {
        return Err(Error::Degenerate(
            "L is undefined at H = 0; use the zero-H cubic condition".into(),
        ));
    }
    let sin_t = theta.sin();
    let norm_a2: f64 = lambdas.iter().map(|x| x * x).sum();
    match family {
        CompetitorFamily::PowerOfNormA => {
            if norm_a2 == 0.0 {
                return Err(Error::Degenerate("L is undefined at |A| = 0".into()));
            }
            let cubic: f64 = lambdas.iter().map(|x| x * x * x).sum();
            Ok(2.0 + cubic / (sin_t * h * norm_a2))
        }
        CompetitorFamily::SplitQuadratic { .. } => {
            let c2 = family.c_squared(lambdas);
            if c2 == 0.0 {
                return Err(Error::Degenerate("L is undefined at c = 0".into()));
            }
            let cubic = family.cubic(lambdas);
            let quadratic_weight = if h > 0.0 {
                match family {
                    CompetitorFamily::SplitQuadratic { a } => *a,
                    CompetitorFamily::PowerOfNormA => 1.0,
                }
            } else {
                1.0
            };
            Ok(1.0 + quadratic_weight * norm_a2 / c2 + cubic / (sin_t * h * c2))
        }
    }
}

/// Feasible exponent range from intersecting H (1 - alpha L) >= 0 over the
/// samples, plus the zero-H cubic condition where H vanishes.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaWindow {
    /// Alphas in (0,1) with lo <= alpha <= hi are admissible.
    Interval { lo: f64, hi: f64 },
    Infeasible,
}

pub fn admissible_alpha(
    family: &CompetitorFamily,
    samples: &[(Vec<f64>, f64)],
    theta: f64,
) -> Result<AlphaWindow> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for (lambdas, h) in samples {
        if *h == 0.0 {
            // the boundary inequality at H = 0 reduces to -cubic >= 0
            if -family.cubic(lambdas) < 0.0 {
                return Ok(AlphaWindow::Infeasible);
            }
            continue;
        }
        let l = l_function(family, lambdas, theta, *h)?;
        if *h > 0.0 {
            if l > 0.0 {
                hi = hi.min(1.0 / l);
            }
        } else if l > 0.0 {
            lo = lo.max(1.0 / l);
        } else {
            // H < 0 needs 1 - alpha L <= 0, impossible for L <= 0
            return Ok(AlphaWindow::Infeasible);
        }
    }
    if lo > hi || hi <= 0.0 || lo >= 1.0 {
        return Ok(AlphaWindow::Infeasible);
    }
    Ok(AlphaWindow::Interval { lo, hi })
}

/// Boundary expression cos(theta) H w_eps^2 - (1/2)(grad w_eps^2 . eta) for
/// the regularized competitor w_eps = (c^2 + eps)^(alpha/2), evaluated on a
/// jet for each epsilon together with the eps = 0 limit.
pub fn boundary_regularized(
    jet: &BoundaryJet,
    spec: &CompetitorSpec,
    epsilons: &[f64],
) -> Result<(Vec<(f64, f64)>, f64)> {
    let lam = principal_curvatures(jet);
    let lv = lam.values();
    let h = mean_curvature_fb(jet);
    let cos_t = jet.spec().cos_theta();
    let c2 = spec.family.c_squared(lv);
    // (1/2)(grad c^2 . eta) by direct differentiation
    let half_eta_c2 = match spec.family {
        CompetitorFamily::PowerOfNormA => {
            let check = boundary_identity_norm_a2(jet);
            check.direct
        }
        CompetitorFamily::SplitQuadratic { a } => {
            let check = boundary_identity_split(jet, a)?;
            check
                .entries
                .last()
                .map(|e| e.lhs)
                .expect("split check always carries the final entry")
        }
    };
    let eval = |eps: f64| -> f64 {
        let w2 = (c2 + eps).powf(spec.alpha);
        w2 * (cos_t * h - spec.alpha * half_eta_c2 / (c2 + eps))
    };
    let values: Vec<(f64, f64)> = epsilons.iter().map(|&e| (e, eval(e))).collect();
    let limit = if c2 > 0.0 {
        eval(0.0)
    } else {
        0.0
    };
    Ok((values, limit))
}

/// Interior expression for the regularized power competitor on a cone
/// configuration whose chain was evaluated with c = |A| (Frobenius).
/// Returns (eps, lhs - rhs) pairs; each equals alpha (c^2+eps)^(alpha-1)
/// times the final-display gap, so non-negativity is inherited.
pub fn interior_regularized(
    chain: &ChainReport,
    alpha: f64,
    epsilons: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidCompetitor(format!("alpha {alpha} not in (0,1)")));
    }
    let n = chain.witness.dim() as f64;
    let r2 = chain.radius_squared();
    let c2 = chain.c_value * chain.c_value;
    let g = chain.grad_c_sq;
    let k = chain.half_lap_c_sq;
    let a2 = chain.norm_a2;
    let out = epsilons
        .iter()
        .map(|&eps| {
            let q = c2 + eps;
            let lhs = alpha * q.powf(alpha - 1.0) * k
                + alpha * (alpha - 2.0) * q.powf(alpha - 2.0) * c2 * g
                + a2 * q.powf(alpha);
            let rhs = ((1.0 - alpha * c2 / q) * a2
                + 2.0 * alpha * (n - 2.0) / (n - 1.0) / r2 * (c2 / q)
                + alpha * (g / q) * ((n + 1.0) / (n - 1.0) - (2.0 - alpha) * c2 / q))
                * q.powf(alpha);
            (eps, lhs - rhs)
        })
        .collect();
    Ok(out)
}

impl ChainReport {
    fn radius_squared(&self) -> f64 {
        self.witness.radius * self.witness.radius
    }

    /// Gap of the final interior display.
    pub fn final_gap(&self) -> f64 {
        self.entries
            .iter()
            .find(|e| e.context == LedgerContext::InteriorFinal)
            .map(|e| e.gap)
            .expect("chain always carries the final entry")
    }
}
