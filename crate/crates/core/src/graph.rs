//! Graph ingestion and certification of distance-regularity.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, RegularityWitness, Result};
use crate::linalg::RMat;

/// A certified distance-regular graph with its intersection numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct DRGraph {
    pub n: usize,
    /// Sorted neighbour lists.
    pub adj: Vec<Vec<usize>>,
    pub dist: Vec<Vec<usize>>,
    pub diameter: usize,
    /// `p[h][i][j] = |Γ_i(y) ∩ Γ_j(z)|` for `dist(y,z) = h`.
    pub p: Vec<Vec<Vec<u64>>>,
    pub k: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub a: Vec<u64>,
}

/// Compact summary used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edges: usize,
    pub diameter: usize,
    pub k: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub a: Vec<u64>,
}

impl DRGraph {
    pub fn valency(&self) -> u64 {
        self.k[1]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nb) in self.adj.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_adjacent(&self, y: usize, z: usize) -> bool {
        self.dist[y][z] == 1
    }

    /// Vertices at distance `i` from `x`, ascending.
    pub fn shell(&self, x: usize, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.dist[x][y] == i).collect()
    }

    pub fn adjacency_matrix(&self) -> RMat {
        self.distance_matrix(1)
    }

    /// The `i`-th distance matrix `A_i`.
    pub fn distance_matrix(&self, i: usize) -> RMat {
        RMat::from_fn(self.n, self.n, |y, z| if self.dist[y][z] == i { 1.0 } else { 0.0 })
    }

    pub fn distance_matrices(&self) -> Vec<RMat> {
        (0..=self.diameter).map(|i| self.distance_matrix(i)).collect()
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            n: self.n,
            edges: self.edge_count(),
            diameter: self.diameter,
            k: self.k.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            a: self.a.clone(),
        }
    }

    /// Edge-list text in the format accepted by [`parse_graph`].
    pub fn to_edge_list(&self) -> String {
        let edges = self.edges();
        let mut s = format!("{} {}\n", self.n, edges.len());
        for (u, v) in edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

pub fn cycle_graph(n: usize) -> Result<DRGraph> {
    if n < 7 {
        return Err(Error::DiameterTooSmall(format!("cycle length {n} < 7 gives diameter < 3")));
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
    analyze_drg(n, &edges)
}

pub fn hypercube_graph(d: usize) -> Result<DRGraph> {
    if d < 3 {
        return Err(Error::DiameterTooSmall(format!("hypercube dimension {d} < 3")));
    }
    let n = 1usize << d;
    let mut edges = Vec::new();
    for u in 0..n {
        for bit in 0..d {
            let v = u ^ (1 << bit);
            if u < v {
                edges.push((u, v));
            }
        }
    }
    analyze_drg(n, &edges)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<DRGraph> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(e.to_string()))?;
    let (n, edges) = parse_graph(&text)?;
    analyze_drg(n, &edges)
}

/// Parse the edge-list format: a header `n m`, then `m` lines `u v` with `u < v`.
pub fn parse_graph(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse_pair = |line: usize, l: &str| -> Result<(usize, usize)> {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse { line, msg: format!("expected two integers, got {l:?}") });
        }
        let p = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse { line, msg: format!("not a nonnegative integer: {t:?}") })
        };
        Ok((p(toks[0])?, p(toks[1])?))
    };
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty input".into() })?;
    let (n, m) = parse_pair(hline, header)?;
    if n == 0 {
        return Err(Error::Parse { line: hline, msg: "vertex count must be positive".into() });
    }
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let (u, v) = parse_pair(line, l)?;
        if u == v {
            return Err(Error::Parse { line, msg: format!("self-loop at {u}") });
        }
        if u > v {
            return Err(Error::Parse { line, msg: format!("edge {u} {v} must satisfy u < v") });
        }
        if v >= n {
            return Err(Error::Parse { line, msg: format!("vertex {v} out of range 0..{n}") });
        }
        if !seen.insert((u, v)) {
            return Err(Error::Parse { line, msg: format!("duplicate edge {u} {v}") });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Ok((n, edges))
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if d[v] == usize::MAX {
                d[v] = d[u] + 1;
                queue.push_back(v);
            }
        }
    }
    d
}

/// Compute distances and intersection numbers, certifying distance-regularity.
pub fn analyze_drg(n: usize, edges: &[(usize, usize)]) -> Result<DRGraph> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for nb in &mut adj {
        nb.sort_unstable();
    }
    let dist: Vec<Vec<usize>> = (0..n).into_par_iter().map(|s| bfs(&adj, s)).collect();
    if dist[0].contains(&usize::MAX) {
        return Err(Error::NotConnected);
    }
    let diameter = dist.iter().flatten().copied().max().unwrap_or(0);
    let dd = diameter + 1;

    // Per ordered pair, the (D+1)×(D+1) table of |Γ_i(y) ∩ Γ_j(z)|.
    let table = |y: usize, z: usize| -> Vec<u64> {
        let mut t = vec![0u64; dd * dd];
        for w in 0..n {
            t[dist[y][w] * dd + dist[z][w]] += 1;
        }
        t
    };
    let mut reference: Vec<Option<(usize, usize)>> = vec![None; dd];
    for y in 0..n {
        for z in 0..n {
            reference[dist[y][z]].get_or_insert((y, z));
        }
    }
    let refs: Vec<(usize, usize)> = reference.iter().map(|r| r.expect("every distance is realised")).collect();
    let ref_tables: Vec<Vec<u64>> = refs.iter().map(|&(y, z)| table(y, z)).collect();
    let witness = (0..n)
        .into_par_iter()
        .map(|y| {
            (0..n).find_map(|z| {
                let h = dist[y][z];
                let t = table(y, z);
                let t0 = &ref_tables[h];
                (0..dd * dd).find(|&idx| t0[idx] != t[idx]).map(|idx| RegularityWitness {
                    h,
                    i: idx / dd,
                    j: idx % dd,
                    y: refs[h].0,
                    z: refs[h].1,
                    y2: y,
                    z2: z,
                    count: t0[idx],
                    count2: t[idx],
                })
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next();
    if let Some(w) = witness {
        return Err(Error::NotDistanceRegular(w));
    }
    let p: Vec<Vec<Vec<u64>>> = ref_tables
        .iter()
        .map(|t| (0..dd).map(|i| (0..dd).map(|j| t[i * dd + j]).collect()).collect())
        .collect();
    let k: Vec<u64> = (0..dd).map(|i| p[0][i][i]).collect();
    let c: Vec<u64> = (0..dd).map(|i| if i == 0 { 0 } else { p[i][1][i - 1] }).collect();
    let a: Vec<u64> = (0..dd).map(|i| p[i][1][i]).collect();
    let b: Vec<u64> = (0..dd).map(|i| if i == diameter { 0 } else { p[i][1][i + 1] }).collect();
    Ok(DRGraph { n, adj, dist, diameter, p, k, b, c, a })
}

/// Exact integer consistency checks: valency products, `k = c_i + a_i + b_i`,
/// `Σ k_i = n`, symmetry and the triangle pattern of `p`.
pub fn integer_defects(g: &DRGraph) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let d = g.diameter;
    let kk = g.k[1];
    if g.a[0] != 0 || g.c[1] != 1 {
        out.push(("graph.initial".into(), "a_0 = 0 and c_1 = 1 fail".into()));
    }
    for i in 0..=d {
        if g.c[i] + g.a[i] + g.b[i] != kk {
            out.push(("graph.row_sum".into(), format!("k != c_{i} + a_{i} + b_{i}")));
        }
    }
    let (mut num, mut den) = (1u128, 1u128);
    for i in 1..=d {
        num *= g.b[i - 1] as u128;
        den *= g.c[i] as u128;
        if num != g.k[i] as u128 * den {
            out.push(("graph.valency_product".into(), format!("k_{i} != b_0..b_{}/c_1..c_{i}", i - 1)));
        }
    }
    if g.k.iter().sum::<u64>() as usize != g.n {
        out.push(("graph.valency_sum".into(), "sum of k_i != n".into()));
    }
    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                let v = g.p[h][i][j];
                if v != g.p[h][j][i] {
                    out.push(("graph.p_symmetry".into(), format!("p[{h}][{i}][{j}] != p[{h}][{j}][{i}]")));
                }
                let m = h.max(i).max(j);
                let rest = h + i + j - m;
                if m > rest && v != 0 {
                    out.push(("graph.p_triangle".into(), format!("p[{h}][{i}][{j}] should vanish")));
                }
                if m == rest && v == 0 {
                    out.push(("graph.p_triangle".into(), format!("p[{h}][{i}][{j}] should be nonzero")));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c7_arrays() {
        let g = cycle_graph(7).unwrap();
        assert_eq!(g.diameter, 3);
        assert_eq!(g.k, vec![1, 2, 2, 2]);
        assert_eq!(g.b, vec![2, 1, 1, 0]);
        assert_eq!(g.c, vec![0, 1, 1, 1]);
        assert_eq!(g.a, vec![0, 0, 0, 1]);
        assert_eq!(g.p[1][1][1], 0);
        assert!(integer_defects(&g).is_empty());
    }

    #[test]
    fn c8_arrays() {
        let g = cycle_graph(8).unwrap();
        assert_eq!(g.diameter, 4);
        assert_eq!(g.k, vec![1, 2, 2, 2, 1]);
        assert_eq!(g.c[4], 2);
        assert!(g.a.iter().all(|&x| x == 0));
    }

    #[test]
    fn hypercube_arrays() {
        let g = hypercube_graph(3).unwrap();
        assert_eq!(g.n, 8);
        assert_eq!(g.k, vec![1, 3, 3, 1]);
        assert_eq!(&g.c[1..], &[1, 2, 3]);
        let g4 = hypercube_graph(4).unwrap();
        assert_eq!(g4.p[2][1][1], 2);
    }

    #[test]
    fn small_inputs_rejected() {
        assert!(matches!(cycle_graph(6), Err(Error::DiameterTooSmall(_))));
        assert!(matches!(hypercube_graph(2), Err(Error::DiameterTooSmall(_))));
    }

    #[test]
    fn path_is_not_distance_regular() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4)];
        match analyze_drg(5, &edges) {
            Err(Error::NotDistanceRegular(w)) => {
                assert_ne!(w.count, w.count2);
                assert_eq!((w.h, w.y, w.z, w.y2, w.z2), (1, 0, 1, 1, 0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn disconnected_rejected() {
        assert_eq!(analyze_drg(4, &[(0, 1), (2, 3)]), Err(Error::NotConnected));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_graph("3 2\n0 1\n0 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_graph("3 1\n1 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("3 1\n2 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("3 2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("# only comments\n"), Err(Error::Parse { .. })));
        let (n, e) = parse_graph("# c3\n\n3 3\n0 1\n# mid\n1 2\n0 2\n").unwrap();
        assert_eq!((n, e.len()), (3, 3));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = cycle_graph(9).unwrap();
        let (n, e) = parse_graph(&g.to_edge_list()).unwrap();
        assert_eq!(analyze_drg(n, &e).unwrap(), g);
    }
}
