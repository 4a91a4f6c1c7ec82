use alloc::format;

use crate::error::{Error, Result};
use crate::math;

/// Heavy-tailed radius law with survival function
/// `P(R > x) = min(1, 1 / (x ln^p x))` on `x >= 1`.
///
/// The law has an atom-free support starting at `x_star`, the root of
/// `x ln^p x = 1` above 1. For `p > 1` the mean is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusLaw {
    p: f64,
    x_star: f64,
}

const REL_TOL: f64 = 1e-10;

fn x_log_p(x: f64, p: f64) -> f64 {
    x * math::powf(math::ln(x), p)
}

/// Bisection for `x_log_p(x) = target` on a bracket where it is increasing.
fn solve_increasing(p: f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    while x_log_p(hi, p) < target {
        lo = hi;
        hi *= 2.0;
    }
    // x ln^p x is increasing on (1, inf), so the bracket stays valid
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if x_log_p(mid, p) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= REL_TOL * 0.5 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

impl RadiusLaw {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius tail exponent must be > 1, got {p}")));
        }
        // x ln^p x = e > 1 at x = e, so [1, e] brackets the root
        let x_star = solve_increasing(p, 1.0, 1.0 + 1e-12, core::f64::consts::E);
        Ok(RadiusLaw { p, x_star })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn x_star(&self) -> f64 {
        self.x_star
    }

    /// `P(R > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= self.x_star {
            1.0
        } else {
            (1.0 / x_log_p(x, self.p)).min(1.0)
        }
    }

    /// `P(max of n i.i.d. radii <= x) = (1 - P(R > x))^n`.
    pub fn max_cdf(&self, n: usize, x: f64) -> f64 {
        let s = self.survival(x);
        if s >= 1.0 {
            return 0.0;
        }
        math::exp(n as f64 * libm::log1p(-s))
    }
}

/// Inverse survival function: the `x >= x_star` with `x ln^p x = 1/u`.
///
/// `u` must lie in `(0, 1]`; `u = 1` gives `x_star`.
pub fn sample_radius(law: &RadiusLaw, u: f64) -> f64 {
    debug_assert!(u > 0.0 && u <= 1.0);
    if u >= 1.0 {
        return law.x_star;
    }
    solve_increasing(law.p, 1.0 / u, law.x_star, 2.0 * law.x_star)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_star_for_p_one_and_a_half() {
        // independent root: brentq on x ln^1.5 x - 1 over (1, 10)
        let law = RadiusLaw::new(1.5).unwrap();
        assert!((law.x_star() - 1.913_327_998_268_373_7).abs() < 1e-8);
        assert_eq!(sample_radius(&law, 1.0), law.x_star());
        assert_eq!(law.survival(1.5), 1.0);
    }

    #[test]
    fn inverse_identity_and_monotonicity() {
        let law = RadiusLaw::new(1.5).unwrap();
        let mut prev = sample_radius(&law, 1.0);
        for i in 1..200 {
            let u = 1.0 - i as f64 / 200.0;
            let x = sample_radius(&law, u);
            assert!(x > prev);
            assert!((law.survival(x) - u).abs() < 1e-8, "u={u}");
            prev = x;
        }
        let tiny = sample_radius(&law, 1e-15);
        assert!((law.survival(tiny) / 1e-15 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_light_tails() {
        assert!(RadiusLaw::new(1.0).is_err());
        assert!(RadiusLaw::new(f64::NAN).is_err());
    }
}
