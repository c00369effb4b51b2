//! The Boltzmann pair `(W, W*)`, the spin-model conditions and Nomura-algebra membership.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::central::AbcTriple;
use crate::check::CheckSet;
use crate::dual::DualStructure;
use crate::error::{Error, Result};
use crate::graph::DRGraph;
use crate::linalg::{c, diag, identity, lin_comb, rel, rel_mat, to_complex, CMat, C64};
use crate::qracah::QRacahParams;
use crate::spectral::SpectralData;

/// Largest `n` for which the O(n⁴) star-triangle check runs by default.
pub const TYPE3_BRUTEFORCE_MAX_N: usize = 64;
/// Entries below this magnitude count as zero.
pub const ENTRY_ZERO_TOL: f64 = 1e-12;

/// How the scalar `f` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FMode {
    /// Principal root of `f² = n^{1/2} Σ τ_i⁻¹ k_i`.
    Theorem,
    Explicit(C64),
}

#[derive(Debug, Clone)]
pub struct BoltzmannPair {
    pub f: C64,
    pub tau: Vec<C64>,
    /// `Σ τ_i⁻¹ k_i`.
    pub sum_inv: C64,
    /// `Σ τ_i k_i`.
    pub sum_fwd: C64,
    pub w: CMat,
    pub w_inv: CMat,
    /// Diagonals of `W*` and `(W*)⁻¹`.
    pub wstar: Vec<C64>,
    pub wstar_inv: Vec<C64>,
}

impl BoltzmannPair {
    pub fn wstar_mat(&self) -> CMat {
        diag(&self.wstar)
    }

    pub fn wstar_inv_mat(&self) -> CMat {
        diag(&self.wstar_inv)
    }

    /// `f²/Σ τ_i⁻¹ k_i`, the factor in the scaled star-triangle identity.
    pub fn star_factor(&self) -> C64 {
        self.f * self.f / self.sum_inv
    }
}

/// `f² = n^{1/2} Σ τ_i⁻¹ k_i`, principal root.
pub fn theorem_f(g: &DRGraph, tau: &[C64]) -> Result<C64> {
    let s: C64 = tau.iter().zip(&g.k).map(|(t, &k)| t.inv() * k as f64).sum();
    let scale: f64 = g.k.iter().map(|&k| k as f64).sum();
    if s.norm() < 1e-9 * scale {
        return Err(Error::ZeroSum(s.norm()));
    }
    Ok(((g.n as f64).sqrt() * s).sqrt())
}

/// `W = f Σ τ_i E_i` and `W* = f Σ τ_i E*_i` from the parameters.
pub fn boltzmann_pair(g: &DRGraph, s: &SpectralData, ds: &DualStructure, p: &QRacahParams, mode: FMode) -> Result<BoltzmannPair> {
    pair_from_tau(g, s, ds, &p.tau, mode)
}

/// The same construction with an arbitrary coefficient sequence.
pub fn pair_from_tau(g: &DRGraph, s: &SpectralData, ds: &DualStructure, tau: &[C64], mode: FMode) -> Result<BoltzmannPair> {
    let sum_inv: C64 = tau.iter().zip(&g.k).map(|(t, &k)| t.inv() * k as f64).sum();
    let sum_fwd: C64 = tau.iter().zip(&g.k).map(|(t, &k)| t * k as f64).sum();
    let f = match mode {
        FMode::Theorem => theorem_f(g, tau)?,
        FMode::Explicit(f) => f,
    };
    let e: Vec<CMat> = s.e.iter().map(to_complex).collect();
    let fw: Vec<C64> = tau.iter().map(|t| f * t).collect();
    let fwi: Vec<C64> = tau.iter().map(|t| (f * t).inv()).collect();
    let w = lin_comb(&fw, &e);
    let w_inv = lin_comb(&fwi, &e);
    let wstar = ds.shell.iter().map(|&l| fw[l]).collect();
    let wstar_inv = ds.shell.iter().map(|&l| fwi[l]).collect();
    Ok(BoltzmannPair { f, tau: tau.to_vec(), sum_inv, sum_fwd, w, w_inv, wstar, wstar_inv })
}

/// Intertwining relations and coefficient ratios, prefixed `spin.`.
pub fn verify_intertwiners(bp: &BoltzmannPair, t: &AbcTriple, p: &QRacahParams) -> CheckSet {
    let mut out = CheckSet::new();
    let ws = bp.wstar_mat();
    let wsi = bp.wstar_inv_mat();
    out.residual("spin.intertwiner_w", rel_mat(&(&bp.w_inv * &t.b * &bp.w), &t.c));
    out.residual("spin.intertwiner_wstar", rel_mat(&(&ws * &t.a * &wsi), &t.c));
    out.residual(
        "spin.commutes",
        rel_mat(&(&bp.w * &t.a), &(&t.a * &bp.w)).max(rel_mat(&(&ws * &t.b), &(&t.b * &ws))),
    );
    out.residual("spin.inverse", rel_mat(&(&bp.w * &bp.w_inv), &identity(bp.w.nrows())));
    let d = p.di();
    let ratio = (1..=d)
        .map(|i| {
            let want = -p.qp(d - 2 * i + 1) / p.a;
            rel(bp.tau[i as usize] / bp.tau[i as usize - 1], want)
        })
        .fold(0.0, f64::max);
    out.residual("spin.coefficient_ratio", ratio);
    out
}

/// `ρ(S) = (W*W)⁻¹ S (W*W)`.
fn rho(bp: &BoltzmannPair, m: &CMat) -> CMat {
    &bp.w_inv * bp.wstar_inv_mat() * m * bp.wstar_mat() * &bp.w
}

/// Braid relation, the automorphism `ρ` and the conjugation identities, prefixed `spin.`.
pub fn verify_braid_and_rho(bp: &BoltzmannPair, t: &AbcTriple, s: &SpectralData, ds: &DualStructure) -> CheckSet {
    let mut out = CheckSet::new();
    let ws = bp.wstar_mat();
    let wsi = bp.wstar_inv_mat();
    let w = &bp.w;
    out.residual("spin.braid", rel_mat(&(w * &ws * w), &(&ws * w * &ws)));
    out.residual("spin.rho_a", rel_mat(&rho(bp, &t.a), &t.b));
    out.residual("spin.rho_b", rel_mat(&rho(bp, &t.b), &t.c));
    out.residual("spin.rho_c", rel_mat(&rho(bp, &t.c), &t.a));
    let es: Vec<CMat> = ds.estars().iter().map(to_complex).collect();
    let e: Vec<CMat> = s.e.iter().map(to_complex).collect();
    let rho_e = (0..e.len()).map(|i| rel_mat(&rho(bp, &e[i]), &es[i])).fold(0.0, f64::max);
    out.residual("spin.rho_e", rho_e);
    out.residual("spin.rho_w", rel_mat(&rho(bp, w), &ws));
    let mut conj1 = 0.0f64;
    let mut conj2 = 0.0f64;
    for i in 0..e.len() {
        conj1 = conj1.max(rel_mat(&(w * &es[i] * &bp.w_inv), &(&wsi * &e[i] * &ws)));
        conj2 = conj2.max(rel_mat(&(&bp.w_inv * &es[i] * w), &(&ws * &e[i] * &wsi)));
    }
    out.residual("spin.conjugation_w", conj1);
    out.residual("spin.conjugation_w_inv", conj2);
    out
}

/// Hadamard inverse `W^{(−)}`, with `(W^{(−)})_{ab} = 1/W_{ba}`.
pub fn hadamard_inverse(w: &CMat) -> Result<CMat> {
    let n = w.nrows();
    for r in 0..n {
        for col in 0..n {
            if w[(r, col)].norm() < ENTRY_ZERO_TOL {
                return Err(Error::EntryZero { row: r, col });
            }
        }
    }
    Ok(CMat::from_fn(n, n, |a, b| w[(b, a)].inv()))
}

/// `‖W W^{(−)} − nI‖` relative.
pub fn type2_residual(w: &CMat) -> Result<f64> {
    let n = w.nrows();
    let wm = hadamard_inverse(w)?;
    Ok(rel_mat(&(w * &wm), &(identity(n) * c(n as f64))))
}

pub fn symmetry_residual(w: &CMat) -> f64 {
    rel_mat(w, &w.transpose())
}

/// Max over `(a, b, c)` of the relative residual of
/// `Σ_e W_{eb} W_{ec}/W_{ea} = factor · W_{bc}/(W_{ab} W_{ca})`.
pub fn star_triangle_residual(w: &CMat, factor: C64) -> Result<f64> {
    let n = w.nrows();
    let inv = hadamard_inverse(w)?.transpose();
    let wt = w.transpose();
    let worst = (0..n)
        .into_par_iter()
        .map(|a| {
            let col: Vec<C64> = (0..n).map(|e| inv[(e, a)]).collect();
            let lhs = &wt * diag(&col) * w;
            let mut m = 0.0f64;
            for b in 0..n {
                for cc in 0..n {
                    let rhs = factor * w[(b, cc)] * inv[(a, b)] * inv[(cc, a)];
                    m = m.max(rel(lhs[(b, cc)], rhs));
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// The star-triangle condition with factor `n^{1/2}`.
pub fn verify_type3_bruteforce(w: &CMat) -> Result<f64> {
    star_triangle_residual(w, c((w.nrows() as f64).sqrt()))
}

/// Symmetry, type II and star-triangle verdict for a standalone matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinVerdict {
    pub checks: CheckSet,
    pub is_spin_model: bool,
}

pub fn spin_verdict(w: &CMat, prefix: &str, tol: f64, bruteforce: bool) -> SpinVerdict {
    let mut checks = CheckSet::new();
    checks.residual(format!("{prefix}.symmetric"), symmetry_residual(w));
    match type2_residual(w) {
        Ok(r) => checks.residual(format!("{prefix}.type2"), r),
        Err(e) => {
            checks.residual(format!("{prefix}.type2"), f64::INFINITY);
            checks.note(e.to_string());
        }
    }
    if bruteforce {
        match verify_type3_bruteforce(w) {
            Ok(r) => checks.residual(format!("{prefix}.type3"), r),
            Err(e) => {
                checks.residual(format!("{prefix}.type3"), f64::INFINITY);
                checks.note(e.to_string());
            }
        }
    } else {
        checks.skip(format!("{prefix}.type3"), "brute-force star-triangle disabled");
    }
    let is_spin_model = checks.all_pass(tol) && checks.skipped().next().is_none();
    SpinVerdict { checks, is_spin_model }
}

/// Spin verdict for `W^{(−)}`.
pub fn verify_wminus(w: &CMat, tol: f64, bruteforce: bool) -> Result<SpinVerdict> {
    let wm = hadamard_inverse(w)?;
    Ok(spin_verdict(&wm, "spin.wminus", tol, bruteforce))
}

/// Type II, Hadamard-product, expansion and entry checks, prefixed `spin.`.
pub fn verify_type2_and_expansions(bp: &BoltzmannPair, g: &DRGraph, ds: &DualStructure) -> CheckSet {
    let mut out = CheckSet::new();
    let n = g.n;
    let nf = n as f64;
    let w = &bp.w;
    let min_entry = w.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    out.nonzero("spin.entries_nonzero", min_entry, ENTRY_ZERO_TOL);
    out.residual("spin.symmetric", symmetry_residual(w));
    let had = w.component_mul(&bp.w_inv);
    out.residual("spin.hadamard", rel_mat(&had, &CMat::from_element(n, n, c(1.0 / nf))));
    let crit = w.transpose().component_mul(&bp.w_inv);
    out.residual("spin.type2_criterion", rel_mat(&crit, &CMat::from_element(n, n, c(1.0 / nf))));
    match type2_residual(w) {
        Ok(r) => out.residual("spin.type2", r),
        Err(e) => out.skip("spin.type2", e.to_string()),
    }
    out.residual("spin.xprod", rel(bp.sum_fwd * bp.sum_inv, c(nf)));

    let ad: Vec<CMat> = g.distance_matrices().iter().map(to_complex).collect();
    let ast: Vec<CMat> = ds.astars().iter().map(to_complex).collect();
    let inv_tau: Vec<C64> = bp.tau.iter().map(|t| t.inv()).collect();
    let f = bp.f;
    let wexp = lin_comb(&inv_tau, &ad) * (f / bp.sum_inv);
    let wiexp = lin_comb(&bp.tau, &ad) / (f * bp.sum_fwd);
    out.residual("spin.expansion_w", rel_mat(w, &wexp));
    out.residual("spin.expansion_w_inv", rel_mat(&bp.w_inv, &wiexp));
    let wsexp = lin_comb(&inv_tau, &ast) * (f / bp.sum_inv);
    let wsiexp = lin_comb(&bp.tau, &ast) / (f * bp.sum_fwd);
    out.residual("spin.expansion_wstar", rel_mat(&bp.wstar_mat(), &wsexp));
    out.residual("spin.expansion_wstar_inv", rel_mat(&bp.wstar_inv_mat(), &wsiexp));

    let x = ds.x;
    let mut entry = 0.0f64;
    let mut prod = 0.0f64;
    for y in 0..n {
        let l = ds.shell[y];
        entry = entry
            .max(rel(w[(x, y)], f * bp.tau[l].inv() / bp.sum_inv))
            .max(rel(bp.wstar[y], f * bp.tau[l]));
        prod = prod.max(rel(w[(x, y)] * bp.wstar[y], bp.star_factor()));
    }
    out.residual("spin.entry_formula", entry);
    out.residual("spin.entry_product", prod);
    let es0 = to_complex(&ds.estar(0));
    out.residual("spin.corner", rel_mat(&(&es0 * w * &es0), &(&es0 * (f * bp.sum_fwd / nf))));
    out
}

/// Max eigenvector residual of the ratio vectors `u_y = W_{yb}/W_{yc}` under every `A_i`.
pub fn nomura_membership(w: &CMat, g: &DRGraph) -> Result<f64> {
    let n = g.n;
    let d = g.diameter;
    let inv = hadamard_inverse(w)?.transpose();
    let worst = (0..n)
        .into_par_iter()
        .map(|b| {
            let mut m = 0.0f64;
            let mut acc = vec![vec![C64::new(0.0, 0.0); n]; d + 1];
            for cc in 0..n {
                let u: Vec<C64> = (0..n).map(|y| w[(y, b)] * inv[(y, cc)]).collect();
                let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
                for row in acc.iter_mut() {
                    row.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                }
                for y in 0..n {
                    for z in 0..n {
                        acc[g.dist[y][z]][y] += u[z];
                    }
                }
                for au in &acc {
                    let lam: C64 = au.iter().zip(&u).map(|(x, y)| y.conj() * x).sum::<C64>() / uu;
                    let r: f64 = au.iter().zip(&u).map(|(x, y)| (x - lam * y).norm_sqr()).sum::<f64>().sqrt();
                    m = m.max(r / uu.sqrt());
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// `P W Pᵀ` for a seeded random vertex permutation that is not an automorphism of the graph.
pub fn permuted_control(w: &CMat, g: &DRGraph, seed: u64) -> CMat {
    let n = g.n;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..64 {
        perm.shuffle(&mut rng);
        let auto = (0..n).all(|y| g.adj[y].iter().all(|&z| g.is_adjacent(perm[y], perm[z])));
        if !auto {
            break;
        }
    }
    CMat::from_fn(n, n, |a, b| w[(perm[a], perm[b])])
}

/// Scaled star-triangle and theorem normalization, prefixed `spin.`.
pub fn normalization_checks(bp: &BoltzmannPair, n: usize, bruteforce: bool) -> CheckSet {
    let mut out = CheckSet::new();
    let target = (n as f64).sqrt() * bp.sum_inv;
    out.residual("spin.normalization", rel(bp.f * bp.f, target));
    if bruteforce {
        match star_triangle_residual(&bp.w, bp.star_factor()) {
            Ok(r) => out.residual("spin.type3_scaled", r),
            Err(e) => out.skip("spin.type3_scaled", e.to_string()),
        }
    } else {
        out.skip("spin.type3_scaled", "brute-force star-triangle disabled");
    }
    out
}

/// The 2×2 matrix `((r, s), (t, u))`.
pub fn two_by_two(r: C64, s: C64, t: C64, u: C64) -> CMat {
    CMat::from_row_slice(2, 2, &[r, s, t, u])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::{build_abc, build_z};
    use crate::dual::dual_structure;
    use crate::graph::cycle_graph;
    use crate::qracah::fit_qracah;
    use crate::spectral::spectral_data;
    use std::f64::consts::PI;

    struct Fx {
        g: DRGraph,
        s: SpectralData,
        ds: DualStructure,
        p: QRacahParams,
    }

    fn setup(n: usize, x: usize) -> Fx {
        let g = cycle_graph(n).unwrap();
        let s = spectral_data(&g).unwrap();
        let perm: Vec<usize> = (0..=g.diameter).collect();
        let s = s.reorder(&perm);
        let ds = dual_structure(&g, &s, x).unwrap();
        let q = C64::from_polar(1.0, PI / n as f64);
        let p = fit_qracah(&s.theta)
            .unwrap()
            .into_iter()
            .find(|p| (p.q - q).norm() < 1e-9 && (p.a - q.powi(g.diameter as i32)).norm() < 1e-9)
            .unwrap();
        Fx { g, s, ds, p }
    }

    #[test]
    fn c7_tau() {
        let fx = setup(7, 0);
        let q = fx.p.q;
        assert!((fx.p.tau[0] - 1.0).norm() < 1e-12);
        assert!((fx.p.tau[1] - q.powi(6)).norm() < 1e-12);
        assert!((fx.p.tau[1] + q.inv()).norm() < 1e-12);
    }

    #[test]
    fn c7_spin_model() {
        let fx = setup(7, 0);
        let bp = boltzmann_pair(&fx.g, &fx.s, &fx.ds, &fx.p, FMode::Theorem).unwrap();
        let ce = build_z(&fx.g, &fx.s, &fx.ds, &fx.p, 1e-8).unwrap();
        let (t, _) = build_abc(&fx.g, &fx.s, &fx.ds, &fx.p, &ce);
        for set in [
            verify_intertwiners(&bp, &t, &fx.p),
            verify_braid_and_rho(&bp, &t, &fx.s, &fx.ds),
            verify_type2_and_expansions(&bp, &fx.g, &fx.ds),
            normalization_checks(&bp, 7, true),
        ] {
            for ch in &set.checks {
                assert_eq!(ch.evaluate(1e-8), crate::check::Status::Pass, "{ch:?}");
            }
        }
        assert!(verify_type3_bruteforce(&bp.w).unwrap() < 1e-8);
        assert!(verify_type3_bruteforce(&(-&bp.w)).unwrap() < 1e-8);
        assert!(nomura_membership(&bp.w, &fx.g).unwrap() < 1e-8);
        let wm = verify_wminus(&bp.w, 1e-8, true).unwrap();
        assert!(wm.is_spin_model);
        let wmm = hadamard_inverse(&hadamard_inverse(&bp.w).unwrap()).unwrap();
        assert!(rel_mat(&wmm, &bp.w) < 1e-15);
    }

    #[test]
    fn c7_controls() {
        let fx = setup(7, 3);
        let ce = build_z(&fx.g, &fx.s, &fx.ds, &fx.p, 1e-8).unwrap();
        let (t, _) = build_abc(&fx.g, &fx.s, &fx.ds, &fx.p, &ce);
        let one = boltzmann_pair(&fx.g, &fx.s, &fx.ds, &fx.p, FMode::Explicit(c(1.0))).unwrap();
        assert!(rel_mat(&(&one.w * &one.w_inv), &identity(7)) < 1e-9);
        assert!(verify_type3_bruteforce(&one.w).unwrap() > 1e-3);
        assert!(star_triangle_residual(&one.w, one.star_factor()).unwrap() < 1e-8);

        let mut tau = fx.p.tau.clone();
        tau[2] = -tau[2];
        let neg = pair_from_tau(&fx.g, &fx.s, &fx.ds, &tau, FMode::Theorem).unwrap();
        assert!(verify_intertwiners(&neg, &t, &fx.p).value("spin.intertwiner_w").unwrap() > 1e-3);

        let good = boltzmann_pair(&fx.g, &fx.s, &fx.ds, &fx.p, FMode::Theorem).unwrap();
        let mut rev = good.clone();
        let rt: Vec<C64> = fx.p.tau.iter().rev().cloned().collect();
        rev.wstar = fx.ds.shell.iter().map(|&l| good.f * rt[l]).collect();
        rev.wstar_inv = rev.wstar.iter().map(|z| z.inv()).collect();
        assert!(verify_braid_and_rho(&rev, &t, &fx.s, &fx.ds).value("spin.braid").unwrap() > 1e-3);

        let perm = permuted_control(&good.w, &fx.g, 5);
        assert!(type2_residual(&perm).unwrap() < 1e-9);
        assert!(nomura_membership(&perm, &fx.g).unwrap() > 1e-3);
    }

    #[test]
    fn two_by_two_type2() {
        let (r, s, t) = (c(2.0), c(3.0), c(-1.5));
        let u = -s * t / r;
        assert!(type2_residual(&two_by_two(r, s, t, u)).unwrap() < 1e-12);
        assert!(type2_residual(&two_by_two(r, s, t, u + 1.0)).unwrap() > 1e-3);
    }

    #[test]
    fn base_vertex_independent_w() {
        let a = setup(7, 0);
        let b = setup(7, 4);
        let pa = boltzmann_pair(&a.g, &a.s, &a.ds, &a.p, FMode::Theorem).unwrap();
        let pb = boltzmann_pair(&b.g, &b.s, &b.ds, &b.p, FMode::Theorem).unwrap();
        assert_eq!(pa.w, pb.w);
    }

    #[test]
    fn nomura_trivial_pair() {
        let fx = setup(8, 0);
        let bp = boltzmann_pair(&fx.g, &fx.s, &fx.ds, &fx.p, FMode::Theorem).unwrap();
        assert!(nomura_membership(&bp.w, &fx.g).unwrap() < 1e-8);
    }
}
