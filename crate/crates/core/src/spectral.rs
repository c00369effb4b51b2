//! Primitive idempotents, eigenmatrices, Krein parameters and Q-polynomial orderings.

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::CheckSet;
use crate::error::{Error, Result};
use crate::graph::DRGraph;
use crate::linalg::{fro_r, lin_comb_r, rel_mat_r, RMat};

/// Relative gap below which sorted eigenvalues are merged into one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;
/// Relative magnitude below which a Krein parameter counts as zero.
pub const KREIN_ZERO_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SpectralData {
    pub n: usize,
    pub diameter: usize,
    /// Eigenvalues in the current ordering (natural order: `θ_0 = k`, then descending).
    pub theta: Vec<f64>,
    /// Primitive idempotents, each a polynomial in `A`.
    pub e: Vec<RMat>,
    /// Multiplicities from eigenvalue clustering.
    pub mult: Vec<usize>,
    /// `A_j = Σ_i P[i][j] E_i`; empty until filled.
    pub p: RMat,
    /// `E_j = n⁻¹ Σ_i Q[i][j] A_i`; empty until filled.
    pub q: RMat,
    /// `krein[h][i][j] = q^h_{ij}`; empty until filled.
    pub krein: Vec<Vec<Vec<f64>>>,
    /// `k*_i = q^0_{ii}`.
    pub kstar: Vec<f64>,
    /// Frobenius distance between the polynomial idempotents and eigenvector projectors.
    pub projector_residual: f64,
    /// `max(1, max |q^h_{ij}|)`, the scale for zero tests.
    pub krein_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPolyOrdering {
    pub perm: Vec<usize>,
    pub is_qpoly: bool,
    pub is_formally_self_dual: bool,
    /// `max |P − Q|` under the ordering.
    pub self_dual_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub theta: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub orderings: Vec<QPolyOrdering>,
}

impl SpectralData {
    pub fn is_filled(&self) -> bool {
        !self.krein.is_empty()
    }

    /// Relabel idempotents so that new index `i` is old index `perm[i]`.
    pub fn reorder(&self, perm: &[usize]) -> SpectralData {
        let d = self.diameter;
        let mut out = self.clone();
        out.theta = perm.iter().map(|&i| self.theta[i]).collect();
        out.e = perm.iter().map(|&i| self.e[i].clone()).collect();
        out.mult = perm.iter().map(|&i| self.mult[i]).collect();
        if self.is_filled() {
            out.p = RMat::from_fn(d + 1, d + 1, |i, j| self.p[(perm[i], j)]);
            out.q = RMat::from_fn(d + 1, d + 1, |i, j| self.q[(i, perm[j])]);
            out.krein = (0..=d)
                .map(|h| {
                    (0..=d)
                        .map(|i| (0..=d).map(|j| self.krein[perm[h]][perm[i]][perm[j]]).collect())
                        .collect()
                })
                .collect();
            out.kstar = perm.iter().map(|&i| self.kstar[i]).collect();
        }
        out
    }

    /// Dual eigenvalues `θ*_i = Q[i][1]`.
    pub fn theta_star(&self) -> Vec<f64> {
        (0..=self.diameter).map(|i| self.q[(i, 1)]).collect()
    }

    pub fn krein_is_zero(&self, h: usize, i: usize, j: usize) -> bool {
        self.krein[h][i][j].abs() < KREIN_ZERO_TOL * self.krein_scale
    }
}

/// Cluster the spectrum of `A` and build each `E_i` as a Lagrange polynomial in `A`.
pub fn eigendecompose(g: &DRGraph) -> Result<SpectralData> {
    let n = g.n;
    let d = g.diameter;
    let a = g.adjacency_matrix();
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let rho = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        let v = eig.eigenvalues[idx];
        match clusters.last_mut() {
            Some(cl) if (eig.eigenvalues[*cl.last().unwrap()] - v).abs() < CLUSTER_TOL * rho => cl.push(idx),
            _ => clusters.push(vec![idx]),
        }
    }
    if clusters.len() != d + 1 {
        return Err(Error::EigCountMismatch { found: clusters.len(), expected: d + 1 });
    }
    let theta: Vec<f64> = clusters
        .iter()
        .map(|cl| cl.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cl.len() as f64)
        .collect();
    let mult: Vec<usize> = clusters.iter().map(Vec::len).collect();

    let id = RMat::identity(n, n);
    let e: Vec<RMat> = (0..=d)
        .into_par_iter()
        .map(|i| {
            let mut m = id.clone();
            for j in (0..=d).filter(|&j| j != i) {
                m *= (&a - &id * theta[j]) / (theta[i] - theta[j]);
            }
            m
        })
        .collect();

    let projector_residual = clusters
        .iter()
        .zip(&e)
        .map(|(cl, ei)| {
            let mut proj = RMat::zeros(n, n);
            for &c in cl {
                let v = eig.eigenvectors.column(c);
                proj += v * v.transpose();
            }
            rel_mat_r(ei, &proj)
        })
        .fold(0.0, f64::max);

    Ok(SpectralData {
        n,
        diameter: d,
        theta,
        e,
        mult,
        p: RMat::zeros(0, 0),
        q: RMat::zeros(0, 0),
        krein: Vec::new(),
        kstar: Vec::new(),
        projector_residual,
        krein_scale: 1.0,
    })
}

/// Fill `P`, `Q = nP⁻¹` and the Krein tensor.
pub fn krein_and_eigenmatrices(g: &DRGraph, s: SpectralData) -> Result<SpectralData> {
    let n = s.n;
    let d = s.diameter;
    let nf = n as f64;
    let ad = g.distance_matrices();
    let traces: Vec<f64> = s.e.iter().map(|e| e.trace()).collect();
    let p = RMat::from_fn(d + 1, d + 1, |i, j| (&ad[j] * &s.e[i]).trace() / traces[i]);
    let pinv = p.clone().try_inverse().ok_or(Error::SingularP)?;
    let q = pinv * nf;
    if !q.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularP);
    }
    let krein: Vec<Vec<Vec<f64>>> = (0..=d)
        .into_par_iter()
        .map(|h| {
            (0..=d)
                .map(|i| {
                    (0..=d)
                        .map(|j| {
                            let t: f64 = (0..n * n).map(|x| s.e[h][x] * s.e[i][x] * s.e[j][x]).sum();
                            nf * t / traces[h]
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let kstar = (0..=d).map(|i| krein[0][i][i]).collect();
    let krein_scale = krein.iter().flatten().flatten().fold(1.0f64, |m: f64, v: &f64| m.max(v.abs()));
    Ok(SpectralData { p, q, krein, kstar, krein_scale, ..s })
}

pub fn spectral_data(g: &DRGraph) -> Result<SpectralData> {
    krein_and_eigenmatrices(g, eigendecompose(g)?)
}

fn qpoly_pattern_holds(s: &SpectralData, perm: &[usize]) -> bool {
    let d = s.diameter;
    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                let m = h.max(i).max(j);
                let rest = h + i + j - m;
                let zero = s.krein_is_zero(perm[h], perm[i], perm[j]);
                if (m > rest && !zero) || (m == rest && zero) {
                    return false;
                }
            }
        }
    }
    true
}

/// All orderings fixing index 0 whose Krein tensor has the Q-polynomial pattern,
/// in lexicographic order of the permutation.
pub fn find_qpoly_orderings(s: &SpectralData) -> Vec<QPolyOrdering> {
    let d = s.diameter;
    let mut found = Vec::new();
    let mut perm = vec![0usize];
    let mut used = vec![false; d + 1];
    used[0] = true;

    fn dfs(s: &SpectralData, perm: &mut Vec<usize>, used: &mut Vec<bool>, found: &mut Vec<Vec<usize>>) {
        let d = s.diameter;
        let pos = perm.len();
        if pos == d + 1 {
            if qpoly_pattern_holds(s, perm) {
                found.push(perm.clone());
            }
            return;
        }
        for cand in 1..=d {
            if used[cand] {
                continue;
            }
            // E_1 ∘ E_{i−1} must meet E_i and miss every earlier E_j with j < i−1.
            if pos >= 2 {
                let e1 = perm[1];
                if s.krein_is_zero(cand, e1, perm[pos - 1]) {
                    continue;
                }
                if (0..pos - 1).any(|j| !s.krein_is_zero(cand, e1, perm[j])) {
                    continue;
                }
            }
            used[cand] = true;
            perm.push(cand);
            dfs(s, perm, used, found);
            perm.pop();
            used[cand] = false;
        }
    }

    let mut perms = Vec::new();
    dfs(s, &mut perm, &mut used, &mut perms);
    for p in perms {
        let (fsd, res) = check_self_dual(s, &p);
        found.push(QPolyOrdering { perm: p, is_qpoly: true, is_formally_self_dual: fsd, self_dual_residual: res });
    }
    found
}

/// `max |P − Q|` under `perm`, and whether it is below tolerance.
pub fn check_self_dual(s: &SpectralData, perm: &[usize]) -> (bool, f64) {
    let r = s.reorder(perm);
    let res = (&r.p - &r.q).amax();
    let scale = r.p.amax().max(1.0);
    (res < 1e-8 * scale, res)
}

/// Residual checks on a filled spectral decomposition, prefixed `spectral.`.
pub fn spectral_checks(g: &DRGraph, s: &SpectralData) -> CheckSet {
    let mut out = CheckSet::new();
    let n = s.n;
    let d = s.diameter;
    let nf = n as f64;
    let id = RMat::identity(n, n);
    let jm = RMat::from_element(n, n, 1.0);
    let ad = g.distance_matrices();

    let mut idem = 0.0f64;
    for i in 0..=d {
        for j in 0..=d {
            let prod = &s.e[i] * &s.e[j];
            let target = if i == j { s.e[i].clone() } else { RMat::zeros(n, n) };
            idem = idem.max(rel_mat_r(&prod, &target));
        }
    }
    out.residual("spectral.idempotent", idem);
    out.residual("spectral.sum_e", rel_mat_r(&s.e.iter().fold(RMat::zeros(n, n), |acc, e| acc + e), &id));
    out.residual("spectral.e0_all_ones", rel_mat_r(&s.e[0], &(&jm / nf)));
    out.residual("spectral.projector_cross_check", s.projector_residual);
    let a1 = &ad[1];
    out.residual(
        "spectral.eigenvalue",
        (0..=d).map(|i| rel_mat_r(&(a1 * &s.e[i]), &(&s.e[i] * s.theta[i]))).fold(0.0, f64::max),
    );
    if !s.is_filled() {
        return out;
    }
    out.residual("spectral.pq", rel_mat_r(&(&s.p * &s.q), &(RMat::identity(d + 1, d + 1) * nf)));
    let mut a_exp = 0.0f64;
    let mut e_exp = 0.0f64;
    for j in 0..=d {
        let pw: Vec<f64> = (0..=d).map(|i| s.p[(i, j)]).collect();
        a_exp = a_exp.max(rel_mat_r(&ad[j], &lin_comb_r(&pw, &s.e)));
        let qw: Vec<f64> = (0..=d).map(|i| s.q[(i, j)] / nf).collect();
        e_exp = e_exp.max(rel_mat_r(&s.e[j], &lin_comb_r(&qw, &ad)));
    }
    out.residual("spectral.a_expansion", a_exp);
    out.residual("spectral.e_expansion", e_exp);
    out.residual("spectral.q_column0", (0..=d).map(|i| (s.q[(i, 0)] - 1.0).abs()).fold(0.0, f64::max));

    let mut had = 0.0f64;
    let mut neg = 0.0f64;
    for i in 0..=d {
        for j in 0..=d {
            let lhs = s.e[i].component_mul(&s.e[j]);
            let w: Vec<f64> = (0..=d).map(|h| s.krein[h][i][j] / nf).collect();
            had = had.max(rel_mat_r(&lhs, &lin_comb_r(&w, &s.e)));
            for h in 0..=d {
                neg = neg.max(-s.krein[h][i][j]);
            }
        }
    }
    out.residual("spectral.krein_hadamard", had);
    out.residual_at("spectral.krein_nonnegative", neg, 1e-9);
    out.residual(
        "spectral.rank_multiplicity",
        (0..=d)
            .map(|i| (s.kstar[i] - s.e[i].trace()).abs().max((s.kstar[i] - s.mult[i] as f64).abs()))
            .fold(0.0, f64::max),
    );
    out.residual("spectral.multiplicity_sum", (s.kstar.iter().sum::<f64>() - nf).abs() / nf);
    out.residual("spectral.e_norm", (0..=d).map(|i| (fro_r(&s.e[i]).powi(2) - s.e[i].trace()).abs()).fold(0.0, f64::max));
    out
}

/// Checks attached to one Q-polynomial ordering, prefixed `spectral.ordering`.
pub fn ordering_checks(g: &DRGraph, s: &SpectralData, o: &QPolyOrdering) -> CheckSet {
    let mut out = CheckSet::new();
    let r = s.reorder(&o.perm);
    let d = s.diameter;
    out.residual("spectral.ordering.p_equals_q", o.self_dual_residual / r.p.amax().max(1.0));
    let ts = r.theta_star();
    out.residual(
        "spectral.ordering.theta_equals_theta_star",
        (0..=d).map(|i| (r.theta[i] - ts[i]).abs()).fold(0.0, f64::max) / r.theta[0].abs().max(1.0),
    );
    out.residual(
        "spectral.ordering.kstar_equals_k",
        (0..=d).map(|i| (r.kstar[i] - g.k[i] as f64).abs()).fold(0.0, f64::max),
    );
    out.residual(
        "spectral.ordering.krein_equals_p",
        (0..=d)
            .flat_map(|h| (0..=d).flat_map(move |i| (0..=d).map(move |j| (h, i, j))))
            .map(|(h, i, j)| (r.krein[h][i][j] - g.p[h][i][j] as f64).abs())
            .fold(0.0, f64::max),
    );
    let kst = r.krein[0][1][1];
    let row = (0..=d)
        .map(|i| {
            let cs = if i == 0 { 0.0 } else { r.krein[i][1][i - 1] };
            let bs = if i == d { 0.0 } else { r.krein[i][1][i + 1] };
            (cs + r.krein[i][1][i] + bs - kst).abs()
        })
        .fold(0.0, f64::max);
    out.residual("spectral.ordering.dual_row_sum", row / kst.max(1.0));
    out
}

pub fn summary(s: &SpectralData, orderings: &[QPolyOrdering]) -> SpectralSummary {
    SpectralSummary { theta: s.theta.clone(), multiplicities: s.mult.clone(), orderings: orderings.to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, hypercube_graph};

    #[test]
    fn c7_spectrum() {
        let g = cycle_graph(7).unwrap();
        let s = spectral_data(&g).unwrap();
        let tau = std::f64::consts::TAU;
        let want = [2.0, 2.0 * (tau / 7.0).cos(), 2.0 * (2.0 * tau / 7.0).cos(), 2.0 * (3.0 * tau / 7.0).cos()];
        for (t, w) in s.theta.iter().zip(want) {
            assert!((t - w).abs() < 1e-12);
        }
        assert!(spectral_checks(&g, &s).all_pass(1e-9));
    }

    #[test]
    fn q4_spectrum_and_ordering() {
        let g = hypercube_graph(4).unwrap();
        let s = spectral_data(&g).unwrap();
        for (t, w) in s.theta.iter().zip([4.0, 2.0, 0.0, -2.0, -4.0]) {
            assert!((t - w).abs() < 1e-10);
        }
        let o = find_qpoly_orderings(&s);
        assert!(o.iter().any(|o| o.perm == vec![0, 1, 2, 3, 4] && o.is_formally_self_dual));
    }

    #[test]
    fn c7_self_dual_and_swapped() {
        let g = cycle_graph(7).unwrap();
        let s = spectral_data(&g).unwrap();
        let o = find_qpoly_orderings(&s);
        assert!(o.iter().any(|o| o.perm == vec![0, 1, 2, 3] && o.is_formally_self_dual));
        let (ok, res) = check_self_dual(&s, &[0, 2, 1, 3]);
        assert!(!ok && res > 0.1);
        let r = s.reorder(&[0, 1, 2, 3]);
        for h in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    assert!((r.krein[h][i][j] - g.p[h][i][j] as f64).abs() < 1e-9);
                }
            }
        }
    }
}
