//! Stability criterion for k-homogeneous competitors on cones: threshold
//! computation, test-exponent windows and verdict assembly.
//!
//! A k-homogeneous non-negative competitor satisfying the interior
//! inequality with constant Lambda and the boundary inequality must vanish
//! once Lambda >= (n/2 + k - 1)^2 and at least one of the three
//! inequalities (interior, boundary, threshold) is strict. Curvature
//! powers c^alpha on a cone are (-alpha)-homogeneous, so k = -alpha.

use crate::error::{Error, Result};

/// (n/2 + k - 1)^2.
pub fn criterion_threshold(n: usize, k: f64) -> f64 {
    let b = n as f64 / 2.0 + k - 1.0;
    b * b
}

/// An open exponent range (lo, hi); empty when hi <= lo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentRange {
    pub lo: f64,
    pub hi: f64,
}

impl ExponentRange {
    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }
}

/// Constraints on the radial test exponents: beta < 1 - k - n/2 < alpha
/// together with |alpha| < n/2 + k - 1 and |beta| < n/2 + k - 1.
///
/// Since the pivot 1 - k - n/2 equals minus the bound n/2 + k - 1
/// identically, the alpha window is (-b, b) and the beta window is the
/// degenerate (-b, -b): the literal constraint set never leaves room for
/// beta, which is exactly the borderline the equality cases run into.
/// Both windows are empty when n/2 + k - 1 <= 0.
pub fn exponent_window(n: usize, k: f64) -> (ExponentRange, ExponentRange) {
    let b = n as f64 / 2.0 + k - 1.0;
    let pivot = 1.0 - k - n as f64 / 2.0;
    if b <= 0.0 {
        let empty = ExponentRange { lo: 0.0, hi: 0.0 };
        return (empty, empty);
    }
    (
        ExponentRange {
            lo: pivot.max(-b),
            hi: b,
        },
        ExponentRange {
            lo: -b,
            hi: pivot.min(b),
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conclusion {
    WMustVanish,
    Inconclusive,
}

/// Verdict of the stability criterion for one competitor.
#[derive(Debug, Clone)]
pub struct StabilityVerdict {
    pub n: usize,
    pub k: f64,
    pub lambda: f64,
    pub threshold: f64,
    pub strict_interior: bool,
    pub strict_boundary: bool,
    /// Whether Lambda exceeds the threshold strictly (the third strict
    /// inequality of the criterion).
    pub strict_threshold: bool,
    pub conclusion: Conclusion,
}

/// Assembles the verdict: the competitor must vanish when Lambda meets the
/// threshold and one of the three inequalities is strict.
pub fn assemble_verdict(
    n: usize,
    k: f64,
    lambda: f64,
    strict_interior: bool,
    strict_boundary: bool,
) -> Result<StabilityVerdict> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "interior constant must be non-negative, got {lambda}"
        )));
    }
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    let threshold = criterion_threshold(n, k);
    let strict_threshold = lambda > threshold;
    let conclusion = if lambda >= threshold
        && (strict_interior || strict_boundary || strict_threshold)
    {
        Conclusion::WMustVanish
    } else {
        Conclusion::Inconclusive
    };
    Ok(StabilityVerdict {
        n,
        k,
        lambda,
        threshold,
        strict_interior,
        strict_boundary,
        strict_threshold,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_reference_values() {
        assert!((criterion_threshold(4, -1.0 / 3.0) - 4.0 / 9.0).abs() < 1e-15);
        assert!((criterion_threshold(6, -0.8) - 36.0 / 25.0).abs() < 1e-15);
        assert_eq!(criterion_threshold(2, 0.0), 0.0);
    }

    #[test]
    fn window_borderline_case() {
        // n = 4, k = -1/3: bound 2/3, alpha window (-2/3, 2/3), beta window
        // degenerate
        let (a, b) = exponent_window(4, -1.0 / 3.0);
        assert!((a.lo + 2.0 / 3.0).abs() < 1e-15 && (a.hi - 2.0 / 3.0).abs() < 1e-15);
        assert!(!a.is_empty());
        assert!(b.is_empty());
        assert!((b.lo - b.hi).abs() < 1e-15);
    }

    #[test]
    fn window_empty_iff_bound_nonpositive() {
        let (a, b) = exponent_window(2, 0.0);
        assert!(a.is_empty() && b.is_empty());
        // grid over (n, k)
        for n in 2..=12 {
            for i in 0..20 {
                let k = -2.0 + 4.0 * (i as f64) / 19.0;
                let bound = n as f64 / 2.0 + k - 1.0;
                let (a, _) = exponent_window(n, k);
                assert_eq!(!a.is_empty(), bound > 0.0, "n={n}, k={k}");
            }
        }
    }

    #[test]
    fn verdict_reference_cases() {
        // equality with a strict interior flag concludes; the equality is
        // constructed bit-identically (exact 4/9 lives in the rational path)
        let threshold = criterion_threshold(4, -1.0 / 3.0);
        let v = assemble_verdict(4, -1.0 / 3.0, threshold, true, false).unwrap();
        assert!((threshold - 4.0 / 9.0).abs() < 1e-15);
        assert_eq!(v.conclusion, Conclusion::WMustVanish);
        // equality with no strictness anywhere stays inconclusive
        let v = assemble_verdict(6, -0.8, criterion_threshold(6, -0.8), false, false).unwrap();
        assert_eq!(v.conclusion, Conclusion::Inconclusive);
        assert!(!v.strict_threshold);
        // strict threshold alone concludes
        let v = assemble_verdict(4, -2.0 / 3.0, 1.0, false, false).unwrap();
        assert!(v.strict_threshold);
        assert_eq!(v.conclusion, Conclusion::WMustVanish);
        // Lambda = 0: threshold met only in the degenerate n=2, k=0 corner,
        // and never with strictness
        let v = assemble_verdict(2, 0.0, 0.0, false, false).unwrap();
        assert_eq!(v.conclusion, Conclusion::Inconclusive);
        let v = assemble_verdict(5, 0.0, 0.0, false, false).unwrap();
        assert_eq!(v.conclusion, Conclusion::Inconclusive);
    }

    #[test]
    fn verdict_rejects_negative_lambda() {
        assert!(assemble_verdict(4, 0.0, -1.0, true, true).is_err());
    }
}
