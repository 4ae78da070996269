//! Brute-force reproduction of the rigidity constants and case analyses.
//!
//! Every closed-form constant in the dimension-window arguments is
//! recomputed here by independent grid search with golden-section
//! refinement, and cross-checked against the production L-function on
//! constructed spectra. The boundary-limit discrepancy of the second
//! lower constant is reported, never asserted away.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{axisym_interior_constant_exact, axisym_threshold_exact};
use crate::jet::{fundamental_forms, principal_curvatures, BoundaryJet};
use crate::simons::{l_function, CompetitorFamily};
use crate::spectral::SymmetricFn;
use crate::stability::{assemble_verdict, criterion_threshold, Conclusion};

/// Truncation point for the unbounded t-ranges; the optimizers sit at
/// O(1) and the tail certificate makes the cutoff sound.
pub const T_MAX: f64 = 50.0;

/// One reproduced constant.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub name: String,
    pub value: f64,
    pub argopt: f64,
    pub grid: usize,
    pub refined: bool,
    pub reference: Option<f64>,
    /// None marks a documented discrepancy: the comparison is reported
    /// but must not be asserted.
    pub matches_reference: Option<bool>,
    pub note: Option<String>,
}

impl ScanResult {
    fn new(name: &str, value: f64, argopt: f64, grid: usize) -> Self {
        Self {
            name: name.into(),
            value,
            argopt,
            grid,
            refined: true,
            reference: None,
            matches_reference: None,
            note: None,
        }
    }

    fn with_reference(mut self, reference: f64, tol: f64) -> Self {
        self.reference = Some(reference);
        self.matches_reference = Some((self.value - reference).abs() < tol);
        self
    }
}

/// Ratio display maximized by the first upper constant on t in [0, 1]
/// (both xi entries non-negative).
pub fn upper_inner_display(t: f64) -> f64 {
    let s = t * t + (1.0 - t) * (1.0 - t);
    1.0 + (4.0 * s + t.powi(3) + (1.0 - t).powi(3)) / (s + 4.0)
}

/// Ratio display maximized by the second upper constant on t > 1
/// (second xi entry negative).
pub fn upper_outer_display(t: f64) -> f64 {
    let s = t * t + (1.0 - t) * (1.0 - t);
    1.0 + (4.0 * s + t.powi(3) + 4.0 * (1.0 - t).powi(3)) / (t * t + 4.0 * (1.0 - t) * (1.0 - t) + 4.0)
}

/// Ratio display minimized by the first lower constant on t in [0, 1].
pub fn lower_inner_display(t: f64) -> f64 {
    let s = t * t + (1.0 - t) * (1.0 - t);
    1.0 + (s + 4.0 * t.powi(3) + 4.0 * (1.0 - t).powi(3)) / (1.0 + 4.0 * t * t + 4.0 * (1.0 - t) * (1.0 - t))
}

/// Ratio display minimized by the second lower constant on t > 1.
pub fn lower_outer_display(t: f64) -> f64 {
    let s = t * t + (1.0 - t) * (1.0 - t);
    1.0 + (s + 4.0 * t.powi(3) + (1.0 - t).powi(3)) / (1.0 + 4.0 * t * t + (1.0 - t) * (1.0 - t))
}

fn golden_minimize(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Coarse grid scan followed by golden-section refinement around the best
/// grid point. Ties keep the lowest t.
fn scan_extremum(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    resolution: usize,
    refine_iters: usize,
    maximize: bool,
) -> (f64, f64) {
    let step = (hi - lo) / resolution as f64;
    let mut best_t = lo;
    let mut best_v = f(lo);
    for i in 1..=resolution {
        let t = lo + step * i as f64;
        let v = f(t);
        let better = if maximize { v > best_v } else { v < best_v };
        if better {
            best_t = t;
            best_v = v;
        }
    }
    let a = (best_t - step).max(lo);
    let b = (best_t + step).min(hi);
    let (t, v) = if maximize {
        let neg = |t: f64| -f(t);
        let (t, v) = golden_minimize(&neg, a, b, refine_iters);
        (t, -v)
    } else {
        golden_minimize(f, a, b, refine_iters)
    };
    if (maximize && v >= best_v) || (!maximize && v <= best_v) {
        (t, v)
    } else {
        (best_t, best_v)
    }
}

/// Certificate that a cubic numerator stays negative beyond the cutoff:
/// value, first and second derivative all negative at T with a constant
/// negative third derivative.
fn tail_certificate() -> Result<String> {
    let t = T_MAX;
    let n0 = 4.0 * (t * t + (1.0 - t) * (1.0 - t)) + t.powi(3) + 4.0 * (1.0 - t).powi(3);
    let n1 = 8.0 * t - 8.0 * (1.0 - t) + 3.0 * t * t - 12.0 * (1.0 - t) * (1.0 - t);
    let n2 = 16.0 + 6.0 * t + 24.0 * (1.0 - t);
    // leading cubic coefficient 1 - 4 = -3
    if n0 < 0.0 && n1 < 0.0 && n2 < 0.0 {
        Ok(format!(
            "tail certificate at T={T_MAX}: numerator {n0:.3e} < 0, decreasing (N'={n1:.3e}, N''={n2:.3e}, N'''=-18); leading cubic coefficient -3"
        ))
    } else {
        Err(Error::InvalidArgument(
            "tail certificate failed; increase the cutoff".into(),
        ))
    }
}

/// Reproduces the four extremal constants of the n = 4, a = 4 boundary
/// analysis. The fourth (minimum over t > 1) is reported together with its
/// boundary-limit behavior instead of being matched against the stated
/// value; evaluation of its display at t = 2 is included in the note.
pub fn scan_k_constants(resolution: usize, refine_iters: usize) -> Result<[ScanResult; 4]> {
    if resolution < 1000 {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} below the required 1000"
        )));
    }
    let eps_left = 1e-9;

    let (t1, v1) = scan_extremum(&upper_inner_display, 0.0, 1.0, resolution, refine_iters, true);
    let k_upper_inner = ScanResult::new("K1", v1, t1, resolution).with_reference(2.0, 1e-6);

    let (t2, v2) = scan_extremum(
        &upper_outer_display,
        1.0 + eps_left,
        T_MAX,
        resolution,
        refine_iters,
        true,
    );
    let mut k_upper_outer = ScanResult::new("K2", v2, t2, resolution).with_reference(3.0, 1e-6);
    k_upper_outer.note = Some(tail_certificate()?);

    let (t3, v3) = scan_extremum(&lower_inner_display, 0.0, 1.0, resolution, refine_iters, false);
    let k_lower_inner = ScanResult::new("k1", v3, t3, resolution).with_reference(1.5, 1e-6);

    let (t4, v4) = scan_extremum(
        &lower_outer_display,
        1.0 + eps_left,
        T_MAX,
        resolution,
        refine_iters,
        false,
    );
    let mut k_lower_outer = ScanResult::new("k2", v4, t4, resolution);
    k_lower_outer.reference = Some(3.0);
    k_lower_outer.matches_reference = None;
    k_lower_outer.note = Some(format!(
        "documented discrepancy: the display's infimum over (1, T] is the boundary limit {:.9} as t -> 1+ (not attained); its value at t = 2 is {:.9}, which is the stated constant; reported without asserting",
        lower_outer_display(1.0 + 1e-12),
        lower_outer_display(2.0),
    ));

    Ok([k_upper_inner, k_upper_outer, k_lower_inner, k_lower_outer])
}

/// Sup/inf of the boundary ratio over the trace-constrained eigenvalue
/// set, evaluated through the production L-function on spectra built from
/// the one-parameter family (0, t, 1-t) - the independent route against
/// the closed displays.
pub fn scan_l_over_constraint(resolution: usize, refine_iters: usize) -> Result<(ScanResult, ScanResult)> {
    scan_l_for_weight(4.0, resolution, refine_iters)
}

/// Same scan for an arbitrary split weight; exploratory for weights other
/// than 4 (no rigidity claim attaches there).
pub fn scan_l_for_weight(
    a: f64,
    resolution: usize,
    refine_iters: usize,
) -> Result<(ScanResult, ScanResult)> {
    if !(a > 0.0) {
        return Err(Error::InvalidCompetitor(format!("weight {a} must be positive")));
    }
    let family = CompetitorFamily::SplitQuadratic { a };
    let theta = std::f64::consts::FRAC_PI_4;
    let sup_branch = move |t: f64| -> f64 {
        // lambda_4 = -1, positive boundary mean curvature
        let lam = [0.0, t, 1.0 - t, -1.0];
        let h = 1.0 / theta.sin();
        l_function(&family, &lam, theta, h).expect("nonzero curvature by construction")
    };
    let inf_branch = move |t: f64| -> f64 {
        // lambda_4 = +1, negative boundary mean curvature
        let lam = [0.0, -t, t - 1.0, 1.0];
        let h = -1.0 / theta.sin();
        l_function(&family, &lam, theta, h).expect("nonzero curvature by construction")
    };
    let (ts, vs) = scan_extremum(&sup_branch, -T_MAX, T_MAX, resolution, refine_iters, true);
    let (ti, vi) = scan_extremum(&inf_branch, -T_MAX, T_MAX, resolution, refine_iters, false);
    Ok((
        ScanResult::new("supL", vs, ts, resolution),
        ScanResult::new("infL", vi, ti, resolution),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisymVerdict {
    FlatStrict,
    EqualityWithImprovement,
    Inconclusive,
}

/// Closed-form constants and verdict of the axially symmetric analysis.
#[derive(Debug, Clone)]
pub struct AxisymReport {
    pub n: usize,
    /// Boundary ratio (n-1)/(n-2), constant over the configurations.
    pub l_value: f64,
    /// Competitor exponent (n-2)/(n-1).
    pub alpha: f64,
    /// Interior constant (n-2)(2n-3)/(n-1)^2.
    pub interior_constant: f64,
    /// Criterion threshold at k = -alpha.
    pub threshold: f64,
    pub verdict: AxisymVerdict,
    /// Exact rational comparison of constant and threshold (-1, 0, +1).
    pub exact_ordering: std::cmp::Ordering,
    /// The upgraded interior constant available at the equality dimension
    /// from the gradient term.
    pub improvement_constant: Option<f64>,
}

/// Axially symmetric cones: all non-radial boundary curvatures equal.
/// Flat (strict) for n in {3, 4, 5}, exact equality with the gradient
/// improvement at n = 6, inconclusive beyond.
pub fn axisym_analysis(n: usize) -> Result<AxisymReport> {
    if !(3..=12).contains(&n) {
        return Err(Error::Dimension(n));
    }
    let nf = n as f64;
    let l_value = (nf - 1.0) / (nf - 2.0);
    let alpha = (nf - 2.0) / (nf - 1.0);
    let interior_constant = (nf - 2.0) * (2.0 * nf - 3.0) / ((nf - 1.0) * (nf - 1.0));
    let threshold = criterion_threshold(n, -alpha);

    let exact_ordering = axisym_interior_constant_exact(n as i64)
        .cmp(&axisym_threshold_exact(n as i64));
    let verdict = match exact_ordering {
        std::cmp::Ordering::Greater => AxisymVerdict::FlatStrict,
        std::cmp::Ordering::Equal => AxisymVerdict::EqualityWithImprovement,
        std::cmp::Ordering::Less => AxisymVerdict::Inconclusive,
    };
    // the criterion verdict must agree with the exact ordering
    let stability = assemble_verdict(n, -alpha, interior_constant, false, false)?;
    match verdict {
        AxisymVerdict::FlatStrict => {
            debug_assert_eq!(stability.conclusion, Conclusion::WMustVanish)
        }
        _ => debug_assert_eq!(stability.conclusion, Conclusion::Inconclusive),
    }
    let improvement_constant = if verdict == AxisymVerdict::EqualityWithImprovement {
        // alpha = 4/5 > 3/5 allows trading the gradient term for an extra
        // 4/25 / |x|^2, lifting 32/25 to 36/25 with strictness near the
        // free boundary
        Some(rat_to_f64(axisym_threshold_exact(n as i64)))
    } else {
        None
    };
    Ok(AxisymReport {
        n,
        l_value,
        alpha,
        interior_constant,
        threshold,
        verdict,
        exact_ordering,
        improvement_constant,
    })
}

fn rat_to_f64(r: crate::exact::Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Report of the dimension-3 reduction over a sample of cone-mode jets.
#[derive(Debug, Clone)]
pub struct N3Report {
    pub samples: usize,
    pub max_radial_residual: f64,
    /// Largest |lambda_2 + lambda_3| over the sample (zero by trace).
    pub max_pair_residual: f64,
    pub axisym: AxisymReport,
}

/// At n = 3 the radial eigenvalue vanishes and the trace constraint makes
/// the remaining two curvatures opposite, so the boundary is axially
/// symmetric and the n = 3 axisym verdict applies.
pub fn n3_reduction(theta: f64, samples: usize, rng: &mut impl Rng) -> Result<N3Report> {
    let spec = crate::jet::ConeSpec::new(3, theta)?;
    let mut max_radial = 0.0f64;
    let mut max_pair = 0.0f64;
    for _ in 0..samples {
        let jet = crate::jet::random_jet(&spec, Some(1.0), rng)?;
        let lam = principal_curvatures(&jet);
        let v = lam.values();
        max_radial = max_radial.max(v[0].abs());
        max_pair = max_pair.max((v[1] + v[2]).abs());
    }
    Ok(N3Report {
        samples,
        max_radial_residual: max_radial,
        max_pair_residual: max_pair,
        axisym: axisym_analysis(3)?,
    })
}

/// The zero-mean-curvature boundary quantity for the n = 4 competitor with
/// weight 4 on the configuration (0, l2, -l2, 0); equals 3 l2^3.
pub fn zero_h_boundary_check(lambda2: f64) -> Result<f64> {
    if lambda2 < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "the configuration takes lambda2 >= 0, got {lambda2}"
        )));
    }
    let family = CompetitorFamily::SplitQuadratic { a: 4.0 };
    let lam = [0.0, lambda2, -lambda2, 0.0];
    let value = -family.cubic(&lam);
    let closed = 3.0 * lambda2 * lambda2 * lambda2;
    if (value - closed).abs() > 1e-12 * (1.0 + closed.abs()) {
        return Err(Error::InvalidArgument(format!(
            "zero-H identity failed: {value} vs {closed}"
        )));
    }
    Ok(value)
}

/// Exact Cauchy-Schwarz pair-sum constant for direction k (zero-based):
/// sum over i outside {radial, k} of (lambda_i - lambda_k)(f_i - f_k),
/// divided by c. Bounded by n - 1, with equality in the axially symmetric
/// configuration.
pub fn cs_sharpness_ratio(f: &SymmetricFn, lambdas: &[f64], k: usize) -> Result<f64> {
    let n = lambdas.len();
    if k >= n {
        return Err(Error::InvalidArgument(format!("direction {k} out of range")));
    }
    if lambdas[0] != 0.0 {
        return Err(Error::JetConstraint("radial eigenvalue must vanish".into()));
    }
    let trace: f64 = lambdas.iter().sum();
    if trace.abs() > 1e-10 * (1.0 + lambdas.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
        return Err(Error::JetConstraint("eigenvalues must sum to zero".into()));
    }
    let c = f.value(lambdas);
    if c == 0.0 {
        return Err(Error::Degenerate("vanishing competitor".into()));
    }
    let g = f.grad(lambdas);
    let mut s = 0.0;
    for i in 0..n {
        if i == 0 || i == k {
            continue;
        }
        s += (lambdas[i] - lambdas[k]) * (g[i] - g[k]);
    }
    Ok(s / c)
}

/// Scans the pair-sum constant for the last direction on configurations
/// (0, t, 1-t, -1) around the extremal one at t = 2, returning the ratio
/// at the reference point and the largest ratio seen in the neighborhood.
/// Strictly below 3 throughout, which is the room the improvement step
/// exploits.
pub fn cs_improvement_scan(half_width: f64, steps: usize) -> Result<(f64, f64)> {
    let f = SymmetricFn::split_quadratic(4, 4.0)?;
    let at_reference = cs_sharpness_ratio(&f, &[0.0, 2.0, -1.0, -1.0], 3)?;
    let mut max_ratio = f64::NEG_INFINITY;
    for i in 0..=steps {
        let t = 2.0 - half_width + 2.0 * half_width * i as f64 / steps as f64;
        let lam = [0.0, t, 1.0 - t, -1.0];
        let r = cs_sharpness_ratio(&f, &lam, 3)?;
        max_ratio = max_ratio.max(r);
    }
    Ok((at_reference, max_ratio))
}

/// Residuals of the graphical-direction identities on a jet.
#[derive(Debug, Clone)]
pub struct GraphicalVReport {
    pub v: f64,
    /// |v^2 - (1 - (e_{n+1} . nu)^2)|.
    pub residual_v_sq: f64,
    /// Two routes to |grad_M v|^2: chart differentiation against the
    /// closed form in |A e_{n+1}|.
    pub residual_grad_v: f64,
    /// |A|^2 v^2 - |A e_{n+1}|^2, non-negative by Cauchy-Schwarz.
    pub cs_gap: f64,
    /// |v - sin(theta)| at the free boundary.
    pub boundary_residual: f64,
}

/// Checks the identities for v = |grad_M x_{n+1}| on a graphical jet:
/// v^2 = 1 - (e_{n+1} . nu)^2, the gradient identity, the Cauchy-Schwarz
/// bound and the boundary value v = sin(theta).
pub fn graphical_v_identities(jet: &BoundaryJet) -> Result<GraphicalVReport> {
    let n = jet.dim();
    let p = jet.gradient();
    let q = 1.0 + p.iter().map(|x| x * x).sum::<f64>();
    let p_sq = q - 1.0;
    // outward normal nu = (-grad u, 1)/sqrt(q); e_{n+1} . nu = 1/sqrt(q)
    let e_dot_nu = 1.0 / q.sqrt();
    let v_sq_chart = p_sq / q;
    let v_sq_frame = 1.0 - e_dot_nu * e_dot_nu;
    let v = v_sq_chart.sqrt();
    if v == 0.0 {
        return Err(Error::Degenerate(
            "normal parallel to the vertical direction; gradient formula singular".into(),
        ));
    }
    let residual_v_sq = (v_sq_chart - v_sq_frame).abs();

    // |A w|^2 with w the tangential projection of e_{n+1}: frame
    // components of w are p_i / sqrt(1 + p_i^2) in the orthonormal basis
    // diagonalizing A at the base point
    let forms = fundamental_forms(jet);
    let lam = principal_curvatures(jet);
    let mut a_w_sq = 0.0;
    for i in 0..n {
        let w_i = p[i] / (1.0 + p[i] * p[i]).sqrt();
        let aw = lam.values()[i] * w_i;
        a_w_sq += aw * aw;
    }

    // chart route to |grad_M v|^2 = |grad_M v^2|^2 / (4 v^2), with
    // d_k v^2 = 2 sum_j p_j u_jk / q^2
    let hess = jet.hessian();
    let dv2: Vec<f64> = (0..n)
        .map(|k| {
            let s: f64 = (0..n).map(|j| p[j] * hess.get(j, k)).sum();
            2.0 * s / (q * q)
        })
        .collect();
    let mut grad_v2_sq = 0.0;
    for k in 0..n {
        for l in 0..n {
            grad_v2_sq += forms.g_inv.get(k, l) * dv2[k] * dv2[l];
        }
    }
    let grad_v_chart = grad_v2_sq / (4.0 * v_sq_chart);
    let grad_v_closed = a_w_sq / v_sq_chart - a_w_sq;
    let residual_grad_v = (grad_v_chart - grad_v_closed).abs();

    let cs_gap = forms.norm_a2 * v_sq_chart - a_w_sq;
    let boundary_residual = (v - jet.spec().sin_theta()).abs();

    Ok(GraphicalVReport {
        v,
        residual_v_sq,
        residual_grad_v,
        cs_gap,
        boundary_residual,
    })
}
