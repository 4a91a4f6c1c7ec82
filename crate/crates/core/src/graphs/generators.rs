use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{DegreeDistribution, Graph};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// `n` isolated vertices.
pub fn generate_empty(n: usize) -> Graph {
    Graph::from_adjacency(vec![Vec::new(); n])
}

/// Star with centre 0 and leaves `1..=k`.
pub fn generate_star(k: usize) -> Graph {
    Graph::from_edges(k + 1, (1..=k).map(|v| (0, v))).expect("star edges in range")
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn generate_path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path edges in range")
}

/// Cycle `C_n`, `n >= 3`.
pub fn generate_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Infeasible(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
}

/// Box `{0..side}^dim` of `Z^dim` with nearest-neighbour edges and no
/// wrap-around.
pub fn generate_lattice_box(dim: usize, side: usize) -> Result<Graph> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Infeasible(format!("lattice dimension must be 1, 2 or 3, got {dim}")));
    }
    let n = side.pow(dim as u32);
    let mut edges = Vec::new();
    for v in 0..n {
        let mut stride = 1;
        for _ in 0..dim {
            let coord = (v / stride) % side;
            if coord + 1 < side {
                edges.push((v, v + stride));
            }
            stride *= side;
        }
    }
    Graph::from_edges(n, edges)
}

/// Erdős–Rényi `G(n, p)`.
pub fn generate_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p}")));
    }
    let mut rng = seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Uniform perfect matching of half-edges; returns the (multi)edge list.
fn match_half_edges<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Vec<(usize, usize)> {
    let mut stubs: Vec<usize> = degrees.iter().enumerate().flat_map(|(v, &d)| core::iter::repeat_n(v, d)).collect();
    stubs.shuffle(rng);
    stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Configuration model with i.i.d. degrees from `mu`, simplified by erasing
/// self-loops and collapsing parallel edges.
///
/// An odd degree total is fixed by adding one to a uniformly chosen vertex.
pub fn generate_configuration_model(n: usize, mu: &DegreeDistribution, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rng = seeded(seed);
    let mut degrees: Vec<usize> = (0..n).map(|_| mu.sample(&mut rng)).collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let v = rng.gen_range(0..n);
        degrees[v] += 1;
    }
    let edges = match_half_edges(&degrees, &mut rng);
    Graph::from_edges(n, edges)
}

/// Uniform simple `d`-regular graph by half-edge pairing with rejection.
pub fn generate_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(Error::Infeasible(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let mut rng = seeded(seed);
    let degrees = vec![d; n];
    loop {
        let edges = match_half_edges(&degrees, &mut rng);
        let simple = {
            let mut seen: Vec<(usize, usize)> =
                edges.iter().map(|&(u, v)| if u < v { (u, v) } else { (v, u) }).collect();
            seen.sort_unstable();
            seen.iter().all(|&(u, v)| u != v) && seen.windows(2).all(|w| w[0] != w[1])
        };
        if simple {
            return Graph::from_edges(n, edges);
        }
    }
}

/// Largest connected component relabelled `0..n'` in increasing order of
/// original id, together with the map old id -> new id (`None` outside the
/// component). Ties go to the component with the smallest minimum id.
pub fn giant_component(g: &Graph) -> Result<(Graph, Vec<Option<usize>>)> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (labels, count) = g.component_labels();
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    // labels are numbered by smallest member, so the first maximum wins ties
    let best = (0..count).fold(0, |b, l| if sizes[l] > sizes[b] { l } else { b });
    let keep: Vec<usize> = (0..g.n()).filter(|&v| labels[v] == best).collect();
    let mut map = vec![None; g.n()];
    for (i, &v) in keep.iter().enumerate() {
        map[v] = Some(i);
    }
    Ok((g.induced(&keep), map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_shapes() {
        let s = generate_star(3);
        assert_eq!((s.n(), s.m(), s.degree(0)), (4, 3, 3));
        assert_eq!(generate_star(0).n(), 1);
        let mut d = generate_star(100).degrees();
        d.sort_unstable();
        let mut expect = vec![1; 100];
        expect.push(100);
        assert_eq!(d, expect);
    }

    #[test]
    fn cycle_and_lattice() {
        let c = generate_cycle(4).unwrap();
        assert_eq!(c.m(), 4);
        assert!(c.degrees().iter().all(|&d| d == 2));
        assert!(generate_cycle(2).is_err());
        let l = generate_lattice_box(2, 3).unwrap();
        assert_eq!((l.n(), l.m()), (9, 12));
        let l3 = generate_lattice_box(3, 3).unwrap();
        assert_eq!((l3.n(), l3.m()), (27, 54));
        assert_eq!(generate_lattice_box(1, 5).unwrap(), generate_path(5));
        assert!(generate_lattice_box(4, 2).is_err());
    }

    #[test]
    fn config_model_degenerate_laws() {
        let g = generate_configuration_model(5, &DegreeDistribution::point_mass(0), 1).unwrap();
        assert_eq!((g.n(), g.m()), (5, 0));
        let g = generate_configuration_model(10, &DegreeDistribution::point_mass(2), 3).unwrap();
        assert!(g.degrees().iter().all(|&d| d <= 2));
        g.validate().unwrap();
        assert!(generate_configuration_model(0, &DegreeDistribution::point_mass(2), 3).is_err());
    }

    #[test]
    fn regular_contract() {
        let g = generate_random_regular(10_000, 3, 5).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3));
        g.validate().unwrap();
        assert!(generate_random_regular(5, 3, 1).is_err());
        assert!(generate_random_regular(3, 3, 1).is_err());
    }

    #[test]
    fn giant_component_cases() {
        let c = generate_cycle(6).unwrap();
        let (g, map) = giant_component(&c).unwrap();
        assert_eq!(g, c);
        assert!(map.iter().enumerate().all(|(i, m)| *m == Some(i)));

        let tri_plus = Graph::from_edges(4, [(1, 2), (2, 3), (1, 3)]).unwrap();
        let (g, map) = giant_component(&tri_plus).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(map, vec![None, Some(0), Some(1), Some(2)]);

        // two equal components: the one containing vertex 0 wins
        let two = Graph::from_edges(4, [(2, 3), (0, 1)]).unwrap();
        let (_, map) = giant_component(&two).unwrap();
        assert_eq!(map[0], Some(0));
        assert_eq!(map[2], None);

        assert_eq!(giant_component(&generate_empty(0)), Err(Error::EmptyGraph));
    }

    #[test]
    fn deterministic_in_seed() {
        let mu = DegreeDistribution::poisson(3.0, 20).unwrap();
        let a = generate_configuration_model(500, &mu, 42).unwrap();
        let b = generate_configuration_model(500, &mu, 42).unwrap();
        let c = generate_configuration_model(500, &mu, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
