//! Exact rational evaluation of the closed-form constants.
//!
//! The equality cases of the dimension windows (n = 4 with alpha = 1/3,
//! axially symmetric n = 6) must be decided exactly, not within a float
//! tolerance; this module mirrors the relevant closed forms over i64
//! rationals.

use num_rational::Ratio;

pub type Rat = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rat {
    Ratio::new(num, den)
}

/// (n/2 + k - 1)^2 over the rationals.
pub fn criterion_threshold_exact(n: i64, k: Rat) -> Rat {
    let b = rat(n, 2) + k - rat(1, 1);
    b * b
}

/// Interior constant of the axially symmetric analysis,
/// (n-2)(2n-3)/(n-1)^2.
pub fn axisym_interior_constant_exact(n: i64) -> Rat {
    rat((n - 2) * (2 * n - 3), (n - 1) * (n - 1))
}

/// Competitor exponent of the axially symmetric analysis, alpha = (n-2)/(n-1).
pub fn axisym_alpha_exact(n: i64) -> Rat {
    rat(n - 2, n - 1)
}

/// Threshold of the axially symmetric analysis with k = -alpha.
pub fn axisym_threshold_exact(n: i64) -> Rat {
    criterion_threshold_exact(n, -axisym_alpha_exact(n))
}

/// The zero-mean-curvature boundary quantity for the n = 4 split
/// competitor with a = 4 on the configuration (0, l2, -l2, 0):
/// -(sum of cubes of non-negative entries + 4 sum of cubes of negative
/// entries), which collapses to 3 l2^3 for l2 >= 0.
pub fn zero_h_condition_exact(l2: i64) -> (Rat, Rat) {
    let lam = [rat(0, 1), rat(l2, 1), rat(-l2, 1), rat(0, 1)];
    let mut cubic = rat(0, 1);
    for x in lam {
        let w = if x >= rat(0, 1) { rat(1, 1) } else { rat(4, 1) };
        cubic += w * x * x * x;
    }
    (-cubic, rat(3 * l2 * l2 * l2, 1))
}
