//! The central element `Z`, the triple `𝖠, 𝖡, 𝖢`, the Askey–Wilson relations and the spectrum of `Z`.

use nalgebra::Schur;
use serde::{Deserialize, Serialize};

use crate::check::CheckSet;
use crate::dual::DualStructure;
use crate::error::{Error, Result};
use crate::graph::DRGraph;
use crate::linalg::{comm, fro, identity, lin_comb, rel, rel_mat, to_complex, CMat, C64};
use crate::qracah::QRacahParams;
use crate::spectral::SpectralData;

/// Matching tolerance for eigenvalues of `Z`, scaled by `max(1, |ζ|)`.
pub const Z_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CentralElement {
    pub z: CMat,
    /// `‖L − R‖_F / (1 + ‖L‖_F + ‖R‖_F)` for the two sums defining `Z`.
    pub lhs_rhs_residual: f64,
    /// Residual of `Z E_i = E_i 𝖡 E_i (1 + ϑ_i/Q)` per `i`.
    pub z_on_e: Vec<f64>,
    /// Residual of `Z E*_i = E*_i 𝖠 E*_i (1 + ϑ_i/Q)` per `i`.
    pub z_on_estar: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AbcTriple {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
}

/// An eigenvalue of `Z` and the `(r, d)` pairs whose displayed scalar it matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZEigen {
    pub value: C64,
    pub multiplicity: usize,
    pub matches: Vec<(usize, usize)>,
}

fn weights(p: &QRacahParams) -> Vec<C64> {
    let qs = p.qsum();
    p.vartheta.iter().map(|t| 1.0 + t / qs).collect()
}

/// `𝖠 = (A − εI)/α` and `𝖡 = (A* − εI)/α`.
pub fn normalized_pair(g: &DRGraph, ds: &DualStructure, p: &QRacahParams) -> (CMat, CMat) {
    let id = identity(g.n);
    let a = (to_complex(&g.adjacency_matrix()) - &id * p.epsilon) / p.alpha;
    let b = (to_complex(&ds.astar_mat()) - &id * p.epsilon) / p.alpha;
    (a, b)
}

/// Both sums defining `Z`; fails when they disagree beyond `tol`.
pub fn build_z(g: &DRGraph, s: &SpectralData, ds: &DualStructure, p: &QRacahParams, tol: f64) -> Result<CentralElement> {
    let d = g.diameter;
    let (a, b) = normalized_pair(g, ds, p);
    let w = weights(p);
    let es: Vec<CMat> = ds.estars().iter().map(to_complex).collect();
    let e: Vec<CMat> = s.e.iter().map(to_complex).collect();
    let n = g.n;
    let mut lhs = CMat::zeros(n, n);
    let mut rhs = CMat::zeros(n, n);
    for i in 0..=d {
        lhs += &es[i] * &a * &es[i] * w[i];
        rhs += &e[i] * &b * &e[i] * w[i];
    }
    let residual = rel_mat(&lhs, &rhs);
    if !(residual <= tol) {
        let dominant = if fro(&lhs) >= fro(&rhs) { "dual-idempotent" } else { "primitive-idempotent" };
        return Err(Error::AssumptionFails { residual, dominant: dominant.into() });
    }
    let z = (&lhs + &rhs) * C64::new(0.5, 0.0);
    let z_on_e = (0..=d).map(|i| rel_mat(&(&z * &e[i]), &(&e[i] * &b * &e[i] * w[i]))).collect();
    let z_on_estar = (0..=d).map(|i| rel_mat(&(&z * &es[i]), &(&es[i] * &a * &es[i] * w[i]))).collect();
    Ok(CentralElement { z, lhs_rhs_residual: residual, z_on_e, z_on_estar })
}

fn centrality(z: &CMat, s: &CMat) -> f64 {
    fro(&comm(z, s)) / (1.0 + fro(z) * fro(s))
}

/// Centrality and projected-action checks, prefixed `z.`.
pub fn z_checks(g: &DRGraph, s: &SpectralData, ds: &DualStructure, ce: &CentralElement) -> CheckSet {
    let mut out = CheckSet::new();
    let d = g.diameter;
    out.residual("z.gate", ce.lhs_rhs_residual);
    let mut span: Vec<CMat> = vec![to_complex(&g.adjacency_matrix()), to_complex(&ds.astar_mat())];
    span.extend(s.e.iter().map(to_complex));
    span.extend(ds.estars().iter().map(to_complex));
    out.residual("z.central", span.iter().map(|m| centrality(&ce.z, m)).fold(0.0, f64::max));
    out.residual("z.action_e", ce.z_on_e.iter().cloned().fold(0.0, f64::max));
    out.residual("z.action_estar", ce.z_on_estar.iter().cloned().fold(0.0, f64::max));
    let sym = (0..=d)
        .map(|i| {
            let e = to_complex(&s.e[i]);
            rel_mat(&(&e * &ce.z), &(&ce.z * &e))
        })
        .fold(0.0, f64::max);
    out.residual("z.commutes_e", sym);
    out
}

/// `𝖠`, `𝖡` and `𝖢 = Z − (q𝖠𝖡 − q⁻¹𝖡𝖠)/(q² − q⁻²)`, with expansion checks prefixed `abc.`.
pub fn build_abc(g: &DRGraph, s: &SpectralData, ds: &DualStructure, p: &QRacahParams, ce: &CentralElement) -> (AbcTriple, CheckSet) {
    let (a, b) = normalized_pair(g, ds, p);
    let e: Vec<CMat> = s.e.iter().map(to_complex).collect();
    let es: Vec<CMat> = ds.estars().iter().map(to_complex).collect();
    let mut out = CheckSet::new();
    out.residual("abc.a_expansion", rel_mat(&lin_comb(&p.vartheta, &e), &a));
    out.residual("abc.b_expansion", rel_mat(&lin_comb(&p.vartheta, &es), &b));
    let q = p.q;
    let q2m = q * q - (q * q).inv();
    let c = &ce.z - (&a * &b * q - &b * &a / q) / q2m;
    (AbcTriple { a, b, c }, out)
}

/// The three cyclic relations and the two relations with `Z` on the right, prefixed `aw.`.
pub fn verify_askey_wilson(t: &AbcTriple, z: &CMat, p: &QRacahParams) -> CheckSet {
    let mut out = CheckSet::new();
    let q = p.q;
    let q2m = q * q - (q * q).inv();
    let qm = q - q.inv();
    let cyc = |x: &CMat, y: &CMat, w: &CMat| -> f64 {
        let lhs = x + (y * w * q - w * y / q) / q2m;
        rel_mat(&lhs, z)
    };
    out.residual("aw.cyclic_a", cyc(&t.a, &t.b, &t.c));
    out.residual("aw.cyclic_b", cyc(&t.b, &t.c, &t.a));
    out.residual("aw.cyclic_c", cyc(&t.c, &t.a, &t.b));
    let beta = p.beta;
    let uni = |x: &CMat, y: &CMat| -> f64 {
        let x2 = x * x;
        let lhs = &x2 * y - x * y * x * beta + y * &x2 + y * (q2m * q2m);
        let rhs = z * (q2m * q2m) - z * x * (qm * q2m);
        rel_mat(&lhs, &rhs)
    };
    out.residual("aw.relation_ab", uni(&t.a, &t.b));
    out.residual("aw.relation_ba", uni(&t.b, &t.a));
    out
}

/// Displayed scalar for the pair `(r, d)`, divided by `q + q⁻¹`.
pub fn z_scalar(p: &QRacahParams, r: usize, dd: usize) -> C64 {
    let big_d = p.di();
    let (r, dd) = (r as i64, dd as i64);
    let th = p.a * p.qp(2 * r + dd - big_d) + p.qp(big_d - dd - 2 * r) / p.a;
    (th * (p.qp(dd + 1) + p.qp(-dd - 1)) + th * th) / p.qsum()
}

fn eigenvalues(m: &CMat) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if fro(m) == 0.0 {
        return vec![C64::new(0.0, 0.0); m.nrows()];
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..m.nrows()).map(|i| t[(i, i)]).collect()
}

/// Distinct eigenvalues of `Z` (computed per shell of the base vertex) and their `(r, d)` matches.
pub fn z_spectrum_check(z: &CMat, ds: &DualStructure, p: &QRacahParams) -> Vec<ZEigen> {
    let mut all = Vec::new();
    for i in 0..=ds.diameter {
        let idx: Vec<usize> = (0..ds.n).filter(|&y| ds.shell[y] == i).collect();
        let block = CMat::from_fn(idx.len(), idx.len(), |r, c| z[(idx[r], idx[c])]);
        all.extend(eigenvalues(&block));
    }
    // Fall back to the full matrix if Z is not block diagonal over the shells.
    let off: f64 = (0..ds.n)
        .flat_map(|r| (0..ds.n).map(move |c| (r, c)))
        .filter(|&(r, c)| ds.shell[r] != ds.shell[c])
        .map(|(r, c)| z[(r, c)].norm())
        .fold(0.0, f64::max);
    if off > Z_MATCH_TOL {
        let (_, t) = Schur::new(z.clone()).unpack();
        all = (0..z.nrows()).map(|i| t[(i, i)]).collect();
    }
    let mut distinct: Vec<ZEigen> = Vec::new();
    for v in all {
        match distinct.iter_mut().find(|e| (e.value - v).norm() < Z_MATCH_TOL * v.norm().max(1.0)) {
            Some(e) => e.multiplicity += 1,
            None => distinct.push(ZEigen { value: v, multiplicity: 1, matches: Vec::new() }),
        }
    }
    let d = ds.diameter;
    for e in &mut distinct {
        for r in 0..=d {
            for dd in 0..=(d - r) {
                if (z_scalar(p, r, dd) - e.value).norm() < Z_MATCH_TOL * e.value.norm().max(1.0) {
                    e.matches.push((r, dd));
                }
            }
        }
    }
    distinct.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    distinct
}

/// Residual of the cyclic relations with `𝖡` replaced by a seeded random symmetric matrix.
pub fn askey_wilson_control(t: &AbcTriple, z: &CMat, p: &QRacahParams, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let n = t.a.nrows();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut b = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = C64::new(rng.random_range(-1.0..1.0), 0.0);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    let fake = AbcTriple { a: t.a.clone(), b, c: t.c.clone() };
    let checks = verify_askey_wilson(&fake, z, p);
    checks.checks.iter().filter_map(|c| c.value).fold(0.0, f64::max)
}

/// `ζ` agrees with the scalar for `(r, d)`.
pub fn matches_scalar(p: &QRacahParams, zeta: C64, r: usize, dd: usize) -> bool {
    rel(z_scalar(p, r, dd), zeta) < Z_MATCH_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::dual_structure;
    use crate::graph::cycle_graph;
    use crate::qracah::fit_qracah;
    use crate::spectral::spectral_data;
    use std::f64::consts::PI;

    fn setup(n: usize) -> (DRGraph, SpectralData, DualStructure, QRacahParams) {
        let g = cycle_graph(n).unwrap();
        let s = spectral_data(&g).unwrap();
        let perm: Vec<usize> = (0..=g.diameter).collect();
        let s = s.reorder(&perm);
        let ds = dual_structure(&g, &s, 0).unwrap();
        let q = C64::from_polar(1.0, PI / n as f64);
        let p = fit_qracah(&s.theta)
            .unwrap()
            .into_iter()
            .find(|p| (p.q - q).norm() < 1e-9 && (p.a - q.powi(g.diameter as i32)).norm() < 1e-9)
            .unwrap();
        (g, s, ds, p)
    }

    #[test]
    fn c7_z_vanishes_and_relations_hold() {
        let (g, s, ds, p) = setup(7);
        let ce = build_z(&g, &s, &ds, &p, 1e-8).unwrap();
        assert!(fro(&ce.z) < 1e-10);
        assert!(z_checks(&g, &s, &ds, &ce).all_pass(1e-8));
        let (t, chk) = build_abc(&g, &s, &ds, &p, &ce);
        assert!(chk.all_pass(1e-9));
        assert!(verify_askey_wilson(&t, &ce.z, &p).all_pass(1e-8));
        assert!(askey_wilson_control(&t, &ce.z, &p, 1) > 1e-3);
        let spec = z_spectrum_check(&ce.z, &ds, &p);
        assert_eq!(spec.len(), 1);
        assert!(!spec[0].matches.is_empty());
        for &(r, dd) in &spec[0].matches {
            assert!(z_scalar(&p, r, dd).norm() < 1e-9);
        }
        let shifted = &ce.z + identity(7);
        let spec = z_spectrum_check(&shifted, &ds, &p);
        assert!(spec.iter().any(|e| (e.value - 1.0).norm() < 1e-9 && e.matches.is_empty()));
    }

    #[test]
    fn c7_perturbed_epsilon_fails_gate() {
        let (g, s, ds, p) = setup(7);
        let bad = p.with_epsilon(p.epsilon + 0.1);
        match build_z(&g, &s, &ds, &bad, 1e-8) {
            Err(Error::AssumptionFails { residual, .. }) => assert!(residual > 1e-4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn c8_b_is_diagonal() {
        let (g, s, ds, p) = setup(8);
        let ce = build_z(&g, &s, &ds, &p, 1e-8).unwrap();
        assert!(fro(&ce.z) < 1e-10);
        let (t, _) = build_abc(&g, &s, &ds, &p, &ce);
        for y in 0..8 {
            for z in 0..8 {
                let want = if y == z { p.vartheta[g.dist[0][y]] } else { C64::new(0.0, 0.0) };
                assert!((t.b[(y, z)] - want).norm() < 1e-9);
            }
        }
    }
}
