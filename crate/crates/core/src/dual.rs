//! Dual idempotents and dual distance matrices at a base vertex, and the identities tying `M` to `M*`.

use crate::check::CheckSet;
use crate::error::{Error, Result};
use crate::graph::DRGraph;
use crate::linalg::{c, comm, diag_r, fro_r, numerical_rank, rel_mat, rel_mat_r, to_complex, CMat, RMat};
use crate::qracah::QRacahParams;
use crate::spectral::SpectralData;

/// Agreement required between the two constructions of `A*_i`.
pub const DUAL_AGREEMENT_TOL: f64 = 1e-8;
/// Threshold for "nonzero" triple products and kill tests, relative to the operand norm.
pub const NONZERO_TOL: f64 = 1e-6;
/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// `E*_i`, `A*_i` and `A* = A*_1` with respect to a base vertex.
#[derive(Debug, Clone)]
pub struct DualStructure {
    pub x: usize,
    pub n: usize,
    pub diameter: usize,
    /// `∂(x, y)` for every `y`.
    pub shell: Vec<usize>,
    /// Diagonal of `A*_i`, from `(A*_i)_{yy} = n (E_i)_{xy}`.
    pub astar_diag: Vec<Vec<f64>>,
    /// Largest disagreement with `A*_j = Σ_i Q_{ij} E*_i`.
    pub agreement_residual: f64,
}

impl DualStructure {
    pub fn estar(&self, i: usize) -> RMat {
        let d: Vec<f64> = self.shell.iter().map(|&s| if s == i { 1.0 } else { 0.0 }).collect();
        diag_r(&d)
    }

    pub fn estars(&self) -> Vec<RMat> {
        (0..=self.diameter).map(|i| self.estar(i)).collect()
    }

    pub fn astar(&self, i: usize) -> RMat {
        diag_r(&self.astar_diag[i])
    }

    pub fn astars(&self) -> Vec<RMat> {
        (0..=self.diameter).map(|i| self.astar(i)).collect()
    }

    /// The dual adjacency matrix `A* = A*_1`.
    pub fn astar_mat(&self) -> RMat {
        self.astar(1)
    }

    /// `θ*_i` read off as the eigenvalue of `A*` on `E*_i`.
    pub fn theta_star(&self) -> Vec<f64> {
        (0..=self.diameter)
            .map(|i| {
                let idx = self.shell.iter().position(|&s| s == i).expect("nonempty shell");
                self.astar_diag[1][idx]
            })
            .collect()
    }
}

/// Build the dual structure at `x` from an ordered spectral decomposition.
pub fn dual_structure(g: &DRGraph, s: &SpectralData, x: usize) -> Result<DualStructure> {
    let n = g.n;
    let d = g.diameter;
    if x >= n {
        return Err(Error::Degenerate(format!("base vertex {x} out of range 0..{n}")));
    }
    let shell = g.dist[x].clone();
    let nf = n as f64;
    let astar_diag: Vec<Vec<f64>> = (0..=d).map(|i| (0..n).map(|y| nf * s.e[i][(x, y)]).collect()).collect();
    let scale = s.q.amax().max(1.0);
    let mut worst = 0.0f64;
    for (j, row) in astar_diag.iter().enumerate() {
        for (y, v) in row.iter().enumerate() {
            worst = worst.max((v - s.q[(shell[y], j)]).abs() / scale);
        }
    }
    if worst > DUAL_AGREEMENT_TOL {
        return Err(Error::ToleranceExceeded { name: "dual.construction_agreement".into(), residual: worst });
    }
    Ok(DualStructure { x, n, diameter: d, shell, astar_diag, agreement_residual: worst })
}

fn vectorize(m: &RMat) -> Vec<f64> {
    m.iter().copied().collect()
}

/// Structural identities between `M` and `M*(x)`, prefixed `dual.`.
pub fn verify_dual_identities(g: &DRGraph, s: &SpectralData, ds: &DualStructure, p: &QRacahParams) -> CheckSet {
    let mut out = CheckSet::new();
    let n = ds.n;
    let d = ds.diameter;
    let nf = n as f64;
    let es = ds.estars();
    let ast = ds.astars();
    let ad = g.distance_matrices();
    let id = RMat::identity(n, n);

    out.residual("dual.construction_agreement", ds.agreement_residual);
    out.residual("dual.astar0_identity", rel_mat_r(&ast[0], &id));
    out.residual(
        "dual.astar_sum",
        rel_mat_r(&ast.iter().fold(RMat::zeros(n, n), |acc, m| acc + m), &(&es[0] * nf)),
    );
    out.residual(
        "dual.estar_sum",
        rel_mat_r(&es.iter().fold(RMat::zeros(n, n), |acc, m| acc + m), &id),
    );
    out.residual(
        "dual.estar_trace",
        (0..=d).map(|i| (es[i].trace() - g.k[i] as f64).abs()).fold(0.0, f64::max),
    );
    let mut exp = 0.0f64;
    for j in 0..=d {
        let w: Vec<f64> = (0..=d).map(|i| s.p[(i, j)] / nf).collect();
        exp = exp.max(rel_mat_r(&es[j], &crate::linalg::lin_comb_r(&w, &ast)));
    }
    out.residual("dual.estar_expansion", exp);

    let mut krein = 0.0f64;
    for i in 0..=d {
        for j in 0..=d {
            let lhs: Vec<f64> = (0..n).map(|y| ds.astar_diag[i][y] * ds.astar_diag[j][y]).collect();
            let rhs: Vec<f64> =
                (0..n).map(|y| (0..=d).map(|h| s.krein[h][i][j] * ds.astar_diag[h][y]).sum()).collect();
            krein = krein.max(rel_mat_r(&diag_r(&lhs), &diag_r(&rhs)));
        }
    }
    out.residual("dual.krein_expansion", krein);

    // Vanishing pattern and independence of E*_h A_i E*_j.
    let mut zero_m = 0.0f64;
    let mut min_nonzero_m = f64::INFINITY;
    let mut vecs_m = Vec::new();
    for h in 0..=d {
        for i in 0..=d {
            let left = &es[h] * &ad[i];
            for j in 0..=d {
                let t = &left * &es[j];
                let norm = fro_r(&t);
                if g.p[h][i][j] == 0 {
                    zero_m = zero_m.max(norm);
                } else {
                    min_nonzero_m = min_nonzero_m.min(norm);
                    vecs_m.push(vectorize(&t));
                }
            }
        }
    }
    out.residual("dual.vanishing_m.zero", zero_m);
    out.nonzero("dual.vanishing_m.nonzero", min_nonzero_m, NONZERO_TOL);
    out.residual_at(
        "dual.independence_m",
        (vecs_m.len() - numerical_rank(&vecs_m, RANK_TOL)) as f64,
        0.5,
    );

    // Vanishing pattern and independence of E_h A*_i E_j.
    let mut zero_ms = 0.0f64;
    let mut min_nonzero_ms = f64::INFINITY;
    let mut vecs_ms = Vec::new();
    for h in 0..=d {
        for i in 0..=d {
            let left = &s.e[h] * &ast[i];
            for j in 0..=d {
                let t = &left * &s.e[j];
                let norm = fro_r(&t);
                if s.krein_is_zero(h, i, j) {
                    zero_ms = zero_ms.max(norm);
                } else {
                    min_nonzero_ms = min_nonzero_ms.min(norm);
                    vecs_ms.push(vectorize(&t));
                }
            }
        }
    }
    out.residual("dual.vanishing_mstar.zero", zero_ms);
    out.nonzero("dual.vanishing_mstar.nonzero", min_nonzero_ms, NONZERO_TOL);
    out.residual_at(
        "dual.independence_mstar",
        (vecs_ms.len() - numerical_rank(&vecs_ms, RANK_TOL)) as f64,
        0.5,
    );

    // Reduction identities.
    let e0 = &s.e[0];
    let es0 = &es[0];
    let mut red_m = 0.0f64;
    let mut red_ms = 0.0f64;
    for i in 0..=d {
        red_m = red_m
            .max(rel_mat_r(&(e0 * es0 * &ad[i]), &(e0 * &es[i])))
            .max(rel_mat_r(&(es0 * e0 * &es[i]), &(es0 * &ad[i] / nf)))
            .max(rel_mat_r(&(&ad[i] * es0 * e0), &(&es[i] * e0)))
            .max(rel_mat_r(&(&es[i] * e0 * es0), &(&ad[i] * es0 / nf)));
        red_ms = red_ms
            .max(rel_mat_r(&(es0 * e0 * &ast[i]), &(es0 * &s.e[i])))
            .max(rel_mat_r(&(e0 * es0 * &s.e[i]), &(e0 * &ast[i] / nf)))
            .max(rel_mat_r(&(&ast[i] * e0 * es0), &(&s.e[i] * es0)))
            .max(rel_mat_r(&(&s.e[i] * es0 * e0), &(&ast[i] * e0 / nf)));
    }
    out.residual("dual.reduction_m", red_m);
    out.residual("dual.reduction_mstar", red_ms);

    let mut sandwich = 0.0f64;
    for i in 0..=d {
        sandwich = sandwich
            .max(rel_mat_r(&(e0 * &es[i] * e0), &(e0 * (g.k[i] as f64 / nf))))
            .max(rel_mat_r(&(es0 * &s.e[i] * es0), &(es0 * (s.kstar[i] / nf))));
    }
    out.residual("dual.sandwich_k", sandwich);
    out.residual("dual.sandwich_e0", rel_mat_r(&(e0 * es0 * e0), &(e0 / nf)));
    out.residual("dual.sandwich_estar0", rel_mat_r(&(es0 * e0 * es0), &(es0 / nf)));

    // Nonzero elements of M and M* survive multiplication by E*_0 and E_0.
    let mut kill_m = f64::INFINITY;
    let mut kill_ms = f64::INFINITY;
    for i in 0..=d {
        let na = fro_r(&ad[i]);
        kill_m = kill_m.min(fro_r(&(&ad[i] * es0)) / na).min(fro_r(&(es0 * &ad[i])) / na);
        let nas = fro_r(&ast[i]);
        kill_ms = kill_ms.min(fro_r(&(&ast[i] * e0)) / nas).min(fro_r(&(e0 * &ast[i])) / nas);
    }
    out.nonzero("dual.kill_m", kill_m, NONZERO_TOL);
    out.nonzero("dual.kill_mstar", kill_ms, NONZERO_TOL);

    // A* generates M*.
    let astar_d = &ds.astar_diag[1];
    let powers: Vec<Vec<f64>> = (0..=d as i32).map(|j| astar_d.iter().map(|v| v.powi(j)).collect()).collect();
    out.residual_at("dual.astar_generates", (d + 1 - numerical_rank(&powers, RANK_TOL)) as f64, 0.5);

    let ts = ds.theta_star();
    out.residual(
        "dual.theta_star_equals_theta",
        (0..=d).map(|i| (ts[i] - s.theta[i]).abs()).fold(0.0, f64::max) / s.theta[0].abs().max(1.0),
    );

    // Tridiagonal relations with the q-Racah scalars.
    let a = to_complex(&ad[1]);
    let asd = to_complex(&ds.astar_mat());
    let (beta, gamma, varrho) = (p.beta, p.gamma, p.varrho);
    let tri = |x: &CMat, y: &CMat| -> f64 {
        let x2 = x * x;
        let inner = &x2 * y - x * y * x * beta + y * &x2 - (x * y + y * x) * gamma - y * varrho;
        let lhs = comm(x, &inner);
        rel_mat(&lhs, &CMat::zeros(n, n))
    };
    out.residual("dual.tridiagonal", tri(&a, &asd));
    out.residual("dual.tridiagonal_dual", tri(&asd, &a));

    let th: Vec<_> = s.theta.iter().map(|&t| c(t)).collect();
    let mut r_beta = 0.0f64;
    for i in 2..d {
        let r = (th[i - 2] - th[i + 1]) / (th[i - 1] - th[i]);
        r_beta = r_beta.max(crate::linalg::rel(r, beta + 1.0));
    }
    let mut r_gamma = 0.0f64;
    for i in 1..d {
        r_gamma = r_gamma.max(crate::linalg::rel(th[i - 1] - beta * th[i] + th[i + 1], gamma));
    }
    let mut r_varrho = 0.0f64;
    for i in 1..=d {
        let v = th[i - 1] * th[i - 1] - beta * th[i - 1] * th[i] + th[i] * th[i] - gamma * (th[i - 1] + th[i]);
        r_varrho = r_varrho.max(crate::linalg::rel(v, varrho));
    }
    out.residual("dual.scalar_beta", r_beta);
    out.residual("dual.scalar_gamma", r_gamma);
    out.residual("dual.scalar_varrho", r_varrho);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle_graph;
    use crate::qracah::fit_qracah;
    use crate::spectral::{find_qpoly_orderings, spectral_data};

    fn c7() -> (DRGraph, SpectralData) {
        let g = cycle_graph(7).unwrap();
        let s = spectral_data(&g).unwrap();
        let o = find_qpoly_orderings(&s);
        let perm = o.iter().find(|o| o.perm == vec![0, 1, 2, 3]).unwrap().perm.clone();
        (g, s.reorder(&perm))
    }

    #[test]
    fn c7_structure() {
        let (g, s) = c7();
        let ds = dual_structure(&g, &s, 0).unwrap();
        let e0 = ds.estar(0);
        assert_eq!(e0[(0, 0)], 1.0);
        assert_eq!(e0.trace(), 1.0);
        for i in 0..=3 {
            assert_eq!(ds.estar(i).trace(), g.k[i] as f64);
        }
        assert!(rel_mat_r(&ds.astar(0), &RMat::identity(7, 7)) < 1e-12);
    }

    #[test]
    fn c7_identities() {
        let (g, s) = c7();
        let ds = dual_structure(&g, &s, 2).unwrap();
        let p = fit_qracah(&s.theta).unwrap().remove(0);
        let checks = verify_dual_identities(&g, &s, &ds, &p);
        for ch in &checks.checks {
            assert_eq!(ch.evaluate(1e-8), crate::check::Status::Pass, "{ch:?}");
        }
        assert!(checks.value("dual.sandwich_estar0").unwrap() < 1e-9);
    }

    #[test]
    fn bad_vertex() {
        let (g, s) = c7();
        assert!(dual_structure(&g, &s, 7).is_err());
    }
}
