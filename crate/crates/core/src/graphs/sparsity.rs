use super::Graph;
use crate::math;

/// `N^{-1}` times the sum of the `floor(eps N)` largest degrees, i.e. the
/// maximum of `N^{-1} sum_{v in I} deg(v)` over vertex sets with
/// `|I| <= floor(eps N)`.
pub fn top_eps_degree_sum(g: &Graph, eps: f64) -> f64 {
    debug_assert!(eps > 0.0 && eps <= 1.0);
    let n = g.n();
    if n == 0 {
        return 0.0;
    }
    // the nudge keeps decimal inputs such as 0.013 * 1000 from flooring to 12
    let take = (math::floor(eps * n as f64 + 1e-9) as usize).min(n);
    let mut degrees = g.degrees();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    degrees[..take].iter().sum::<usize>() as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_random_regular, generate_star};

    #[test]
    fn star_and_regular() {
        let s = generate_star(99);
        assert!((top_eps_degree_sum(&s, 0.02) - 1.0).abs() < 1e-15);
        let g = generate_random_regular(1000, 4, 1).unwrap();
        assert!((top_eps_degree_sum(&g, 0.013) - 4.0 * 13.0 / 1000.0).abs() < 1e-15);
        assert!((top_eps_degree_sum(&g, 1.0) - g.mean_degree()).abs() < 1e-12);
    }
}
