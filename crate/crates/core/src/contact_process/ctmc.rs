//! Exact expected extinction time on small graphs.
//!
//! States are infected sets encoded as bitmasks. For every non-empty `S`,
//! `q(S) E[S] - sum_{S'} r(S, S') E[S'] = 1` with `E[{}] = 0`, where the
//! rates are 1 for each recovery and `lambda * |N(v) ∩ S|` for infecting a
//! susceptible `v`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphs::Graph;

/// Largest graph the exact solver accepts.
pub const CTMC_MAX_VERTICES: usize = 20;
/// Up to this many vertices the system is solved by dense elimination.
const DENSE_MAX_VERTICES: usize = 10;
const RESIDUAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 2_000_000;

fn neighbor_masks(g: &Graph) -> Vec<u32> {
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w))).collect()
}

/// Transitions out of `s`: `(target, rate)`.
fn transitions(s: u32, n: usize, nbr: &[u32], lambda: f64, out: &mut Vec<(u32, f64)>) {
    out.clear();
    for (v, &nb) in nbr.iter().enumerate().take(n) {
        let bit = 1u32 << v;
        if s & bit != 0 {
            out.push((s & !bit, 1.0));
        } else if lambda > 0.0 {
            let k = (nb & s).count_ones();
            if k > 0 {
                out.push((s | bit, lambda * k as f64));
            }
        }
    }
}

/// Expected extinction time of the contact process on `g` started from
/// `initial`, solved exactly. Graphs with more than
/// [`CTMC_MAX_VERTICES`] vertices are rejected.
pub fn ctmc_exact_expected_extinction(g: &Graph, lambda: f64, initial: &[usize]) -> Result<f64> {
    let n = g.n();
    if n > CTMC_MAX_VERTICES {
        return Err(Error::TooLarge { n, cap: CTMC_MAX_VERTICES });
    }
    let start = initial.iter().fold(0u32, |m, &v| m | (1 << v));
    if start == 0 {
        return Ok(0.0);
    }
    let values = if n <= DENSE_MAX_VERTICES { solve_dense(g, lambda) } else { solve_gauss_seidel(g, lambda)? };
    Ok(values[start as usize])
}

/// Expected extinction time from every state (index = bitmask).
fn solve_dense(g: &Graph, lambda: f64) -> Vec<f64> {
    let n = g.n();
    let nbr = neighbor_masks(g);
    let size = (1usize << n) - 1; // unknowns for states 1..2^n
    let mut a = vec![0.0f64; size * size];
    let mut b = vec![1.0f64; size];
    let mut out = Vec::new();
    for s in 1..=size as u32 {
        let row = (s - 1) as usize;
        transitions(s, n, &nbr, lambda, &mut out);
        let q: f64 = out.iter().map(|t| t.1).sum();
        a[row * size + row] += q;
        for &(t, r) in &out {
            if t != 0 {
                a[row * size + (t - 1) as usize] -= r;
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..size {
        let pivot = (col..size).max_by(|&i, &j| a[i * size + col].abs().total_cmp(&a[j * size + col].abs())).unwrap();
        if pivot != col {
            for k in 0..size {
                a.swap(col * size + k, pivot * size + k);
            }
            b.swap(col, pivot);
        }
        let p = a[col * size + col];
        for row in col + 1..size {
            let f = a[row * size + col] / p;
            if f != 0.0 {
                for k in col..size {
                    a[row * size + k] -= f * a[col * size + k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; size];
    for row in (0..size).rev() {
        let mut acc = b[row];
        for k in row + 1..size {
            acc -= a[row * size + k] * x[k];
        }
        x[row] = acc / a[row * size + row];
    }
    let mut values = vec![0.0];
    values.extend(x);
    values
}

/// Symmetric Gauss–Seidel until the scaled residual
/// `max_S |1 + sum r E[S'] - q E[S]| / max(1, max_S q E[S])` drops below 1e-12.
fn solve_gauss_seidel(g: &Graph, lambda: f64) -> Result<Vec<f64>> {
    let n = g.n();
    let nbr = neighbor_masks(g);
    let size = 1usize << n;
    let mut offsets = vec![0usize; size + 1];
    let mut targets: Vec<(u32, f64)> = Vec::new();
    let mut q = vec![0.0; size];
    let mut out = Vec::new();
    for s in 0..size {
        if s > 0 {
            transitions(s as u32, n, &nbr, lambda, &mut out);
            q[s] = out.iter().map(|t| t.1).sum();
            targets.extend_from_slice(&out);
        }
        offsets[s + 1] = targets.len();
    }
    let mut x = vec![0.0; size];
    let update = |s: usize, x: &mut Vec<f64>| {
        let acc: f64 = targets[offsets[s]..offsets[s + 1]].iter().map(|&(t, r)| r * x[t as usize]).sum();
        x[s] = (1.0 + acc) / q[s];
    };
    for sweep in 0..MAX_SWEEPS {
        for s in (1..size).rev() {
            update(s, &mut x);
        }
        for s in 1..size {
            update(s, &mut x);
        }
        if sweep % 8 == 7 {
            let mut worst = 0.0f64;
            let mut scale = 1.0f64;
            for s in 1..size {
                let acc: f64 = targets[offsets[s]..offsets[s + 1]].iter().map(|&(t, r)| r * x[t as usize]).sum();
                worst = worst.max((1.0 + acc - q[s] * x[s]).abs());
                scale = scale.max(q[s] * x[s]);
            }
            if worst <= RESIDUAL_TOL * scale {
                return Ok(x);
            }
        }
    }
    Err(Error::NotConverged { sweeps: MAX_SWEEPS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_cycle, generate_empty, generate_erdos_renyi, generate_star};
    use crate::math::harmonic;

    #[test]
    fn single_vertex_and_edge() {
        assert_eq!(ctmc_exact_expected_extinction(&generate_empty(1), 2.0, &[0]).unwrap(), 1.0);
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        // from {0,1}: E2 = 1/2 + E1; from {v}: E1 = (1 + lambda E2) / (1 + lambda)
        // => E2 = (3 + lambda) / 2
        for lambda in [0.0, 0.5, 1.0, 3.0] {
            let e = ctmc_exact_expected_extinction(&edge, lambda, &[0, 1]).unwrap();
            assert!((e - (3.0 + lambda) / 2.0).abs() < 1e-12, "lambda {lambda}: {e}");
        }
    }

    #[test]
    fn zero_rate_gives_harmonic_numbers() {
        let g = generate_cycle(7).unwrap();
        for m in 1..=7 {
            let a: Vec<usize> = (0..m).collect();
            let e = ctmc_exact_expected_extinction(&g, 0.0, &a).unwrap();
            assert!((e - harmonic(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_and_iterative_agree() {
        for seed in 0..4 {
            let g = generate_erdos_renyi(8, 0.35, seed).unwrap();
            let dense = solve_dense(&g, 0.8);
            let gs = solve_gauss_seidel(&g, 0.8).unwrap();
            for s in 1..dense.len() {
                assert!((dense[s] - gs[s]).abs() <= 1e-8 * dense[s], "state {s}: {} vs {}", dense[s], gs[s]);
            }
        }
    }

    #[test]
    fn larger_graphs_use_iteration() {
        let g = generate_star(11);
        let all: Vec<usize> = (0..12).collect();
        let e = ctmc_exact_expected_extinction(&g, 0.0, &all).unwrap();
        assert!((e - harmonic(12)).abs() < 1e-9);
        assert_eq!(
            ctmc_exact_expected_extinction(&generate_empty(21), 1.0, &[0]),
            Err(Error::TooLarge { n: 21, cap: 20 })
        );
    }
}
