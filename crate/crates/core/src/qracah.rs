//! q-Racah parameters: fitting, canonical branches and the closed-form intersection numbers.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// Tolerance for the admissibility conditions when fitting real data.
pub const ADMISSIBLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QRacahParams {
    pub d: usize,
    pub q: C64,
    pub a: C64,
    pub alpha: C64,
    pub epsilon: C64,
    pub vartheta: Vec<C64>,
    pub tau: Vec<C64>,
    pub beta: C64,
    pub gamma: C64,
    pub varrho: C64,
    pub admissible: bool,
}

impl QRacahParams {
    pub fn new(d: usize, q: C64, a: C64, alpha: C64, epsilon: C64) -> Self {
        let di = d as i64;
        let qp = |e: i64| q.powi(e as i32);
        let vartheta = (0..=di).map(|i| a * qp(2 * i - di) + qp(di - 2 * i) / a).collect();
        let tau = (0..=di)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                a.powi(-(i as i32)) * qp(i * (di - i)) * sign
            })
            .collect();
        let qm = q - q.inv();
        let q2m = q * q - (q * q).inv();
        QRacahParams {
            d,
            q,
            a,
            alpha,
            epsilon,
            vartheta,
            tau,
            beta: q * q + (q * q).inv(),
            gamma: -epsilon * qm * qm,
            varrho: qm * qm * epsilon * epsilon - q2m * q2m * alpha * alpha,
            admissible: admissibility_margin(a, q, d) > ADMISSIBLE_TOL,
        }
    }

    /// `q^e`.
    pub fn qp(&self, e: i64) -> C64 {
        self.q.powi(e as i32)
    }

    pub fn di(&self) -> i64 {
        self.d as i64
    }

    /// `q + q⁻¹`.
    pub fn qsum(&self) -> C64 {
        self.q + self.q.inv()
    }

    /// `θ_i = α ϑ_i + ε`.
    pub fn theta(&self, i: usize) -> C64 {
        self.alpha * self.vartheta[i] + self.epsilon
    }

    /// The representative `(a⁻¹, q⁻¹)`, which has the same `ϑ_i`.
    pub fn inverted(&self) -> Self {
        QRacahParams::new(self.d, self.q.inv(), self.a.inv(), self.alpha, self.epsilon)
    }

    pub fn with_epsilon(&self, epsilon: C64) -> Self {
        QRacahParams::new(self.d, self.q, self.a, self.alpha, epsilon)
    }

    /// Canonical branch: `Im q > 0`; for real `q`, `|a| ≥ 1`, then the smaller argument of `a`.
    pub fn canonical(&self) -> Self {
        let inv = self.inverted();
        if prefer(self.q, self.a, inv.q, inv.a) {
            self.clone()
        } else {
            inv
        }
    }

    pub fn is_bipartite(&self) -> bool {
        (self.a * self.a + 1.0).norm() < 1e-9
    }

    pub fn is_almost_bipartite(&self) -> bool {
        (self.a + self.qp(-self.di() - 1)).norm() < 1e-9
    }
}

fn is_real(z: C64) -> bool {
    z.im.abs() <= 1e-12 * z.norm().max(1.0)
}

/// Whether `(q1, a1)` is preferred over `(q2, a2)` under canonicalization.
fn prefer(q1: C64, a1: C64, q2: C64, a2: C64) -> bool {
    if !is_real(q1) || !is_real(q2) {
        return q1.im >= q2.im;
    }
    let (m1, m2) = (a1.norm(), a2.norm());
    if (m1 - m2).abs() > 1e-12 * m1.max(m2) {
        return m1 > m2;
    }
    a1.arg() <= a2.arg()
}

/// `min |e − 1|` over the admissibility expressions
/// `q^{2i}`, `a²q^{2i}` and `a³q^{2i−D−1}` in their ranges.
pub fn admissibility_margin(a: C64, q: C64, d: usize) -> f64 {
    let di = d as i64;
    let qp = |e: i64| q.powi(e as i32);
    let mut m = f64::INFINITY;
    for i in 1..=di {
        m = m.min((qp(2 * i) - 1.0).norm());
        m = m.min((a * a * a * qp(2 * i - di - 1) - 1.0).norm());
    }
    for i in (1 - di)..=(di - 1) {
        m = m.min((a * a * qp(2 * i) - 1.0).norm());
    }
    m
}

/// Ratio estimates `(θ_{i−2} − θ_{i+1}) / (θ_{i−1} − θ_i)` for `2 ≤ i ≤ D−1`.
pub fn beta_plus_one_ratios(theta: &[C64]) -> Vec<C64> {
    let d = theta.len() - 1;
    (2..d).map(|i| (theta[i - 2] - theta[i + 1]) / (theta[i - 1] - theta[i])).collect()
}

/// Fit `θ_i = α(a q^{2i−D} + a⁻¹ q^{D−2i}) + ε`; returns every admissible canonical branch.
pub fn fit_qracah(theta: &[f64]) -> Result<Vec<QRacahParams>> {
    let th: Vec<C64> = theta.iter().map(|&t| c(t)).collect();
    fit_qracah_complex(&th)
}

pub fn fit_qracah_complex(theta: &[C64]) -> Result<Vec<QRacahParams>> {
    if theta.len() < 4 {
        return Err(Error::DiameterTooSmall(format!("need D >= 3, got D = {}", theta.len() as i64 - 1)));
    }
    let d = theta.len() - 1;
    let scale = theta.iter().fold(1.0f64, |m, t| m.max(t.norm()));
    for i in 0..=d {
        for j in 0..i {
            if (theta[i] - theta[j]).norm() < 1e-9 * scale {
                return Err(Error::NotQRacah(format!("eigenvalues {j} and {i} coincide")));
            }
        }
    }
    let ratios = beta_plus_one_ratios(theta);
    let mean = ratios.iter().sum::<C64>() / ratios.len() as f64;
    let spread = ratios.iter().fold(0.0f64, |m, r| m.max((r - mean).norm()));
    if spread > 1e-6 * mean.norm().max(1.0) {
        return Err(Error::NotQRacah(format!(
            "ratio test inconsistent: beta + 1 estimates spread by {spread:.3e}"
        )));
    }
    let beta = mean - 1.0;
    let beta = if is_real(beta) { c(beta.re) } else { beta };
    let disc = (beta * beta - 4.0).sqrt();
    let w = (beta + disc) / 2.0;
    let w = if w.norm() < 1.0 { (beta - disc) / 2.0 } else { w };
    for (target, label) in [(1.0, "1"), (-1.0, "-1")] {
        if (w - target).norm() < 1e-6 {
            return Err(Error::NotQRacah(format!(
                "beta = {:.6} forces q^2 = {label}; the q-Racah form needs q^2 != 1, -1 (ratio (theta_0 - theta_3)/(theta_1 - theta_2) = {:.6})",
                beta.re, ratios[0].re
            )));
        }
    }

    let di = d as i64;
    let mut out: Vec<QRacahParams> = Vec::new();
    let mut degenerate = false;
    let mut best_residual = f64::INFINITY;
    let r = w.sqrt();
    for q in [r, -r, r.inv(), -r.inv()] {
        let qp = |e: i64| q.powi(e as i32);
        let m = Matrix3::from_fn(|i, j| match j {
            0 => qp(2 * i as i64 - di),
            1 => qp(di - 2 * i as i64),
            _ => c(1.0),
        });
        let Some(sol) = m.lu().solve(&Vector3::new(theta[0], theta[1], theta[2])) else {
            continue;
        };
        let (u, v, eps) = (sol[0], sol[1], sol[2]);
        if u.norm() < 1e-12 * scale || v.norm() < 1e-12 * scale {
            degenerate = true;
            continue;
        }
        let res = (0..=d)
            .map(|i| (u * qp(2 * i as i64 - di) + v * qp(di - 2 * i as i64) + eps - theta[i]).norm())
            .fold(0.0, f64::max)
            / scale;
        best_residual = best_residual.min(res);
        if res > 1e-7 {
            continue;
        }
        let a0 = (u / v).sqrt();
        for a in [a0, -a0] {
            let p = QRacahParams::new(d, q, a, a * v, eps).canonical();
            if !p.admissible {
                continue;
            }
            let dup = out.iter().any(|o| (o.q - p.q).norm() < 1e-9 && (o.a - p.a).norm() < 1e-9);
            if !dup {
                out.push(p);
            }
        }
    }
    if out.is_empty() {
        if degenerate {
            return Err(Error::Degenerate("u * v = 0 in the eigenvalue fit".into()));
        }
        return Err(Error::NotQRacah(format!(
            "no admissible branch reproduces the eigenvalues (best residual {best_residual:.3e})"
        )));
    }
    out.sort_by(|x, y| {
        let key = |p: &QRacahParams| (p.q.arg(), p.a.arg());
        key(x).partial_cmp(&key(y)).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Closed-form intersection numbers, `α`, `ε` and `a_1` at `(a, q, D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixScalars {
    pub d: usize,
    pub alpha_cf: C64,
    pub epsilon_cf: C64,
    pub b: Vec<C64>,
    pub c: Vec<C64>,
    pub a_seq: Vec<C64>,
    /// `a_1` from its own closed form.
    pub a1: C64,
    /// `k_i = b_0⋯b_{i−1} / (c_1⋯c_i)`.
    pub k: Vec<C64>,
    pub bipartite: bool,
    pub almost_bipartite: bool,
}

pub fn scalar_tables(p: &QRacahParams) -> Result<AppendixScalars> {
    tables_at(p.a, p.q, p.d)
}

pub fn tables_at(a: C64, q: C64, d: usize) -> Result<AppendixScalars> {
    let margin = admissibility_margin(a, q, d);
    if margin < ADMISSIBLE_TOL {
        return Err(Error::Inadmissible(format!("admissibility margin {margin:.3e}")));
    }
    let di = d as i64;
    let qp = |e: i64| q.powi(e as i32);
    let ai = a.inv();
    let qi = q.inv();
    let al = (a * qp(2 - di) - ai * qp(di - 2)) * (a + qp(di - 1))
        / (qp(di - 1) * (qi - q) * (a * q - ai * qi) * (a - qp(1 - di)));
    let ep = q * (a + ai) * (a + qp(-di - 1)) * (a * qp(2 - di) - ai * qp(di - 2))
        / ((q - qi) * (a - qp(1 - di)) * (a * q - ai * qi));
    let mut b = vec![c(0.0); d + 1];
    let mut cc = vec![c(0.0); d + 1];
    let mut aa = vec![c(0.0); d + 1];
    b[0] = al * (qp(-di) - qp(di)) * (a * a * a - qp(di - 1)) / (a * (a + qp(di - 1)));
    for i in 1..di {
        let iu = i as usize;
        let bracket = a * qp(2 * i - di) - ai * qp(di - 2 * i);
        b[iu] = al * (qp(i - di) - qp(di - i)) * (a * qp(i - di) - ai * qp(di - i)) * (a * a * a - qp(di - 2 * i - 1))
            / (a * bracket * (a + qp(di - 2 * i - 1)));
        cc[iu] = al * a * (qp(i) - qp(-i)) * (a * qp(i) - ai * qp(-i)) * (ai - qp(di - 2 * i + 1))
            / (bracket * (a + qp(di - 2 * i + 1)));
        aa[iu] = al * a * (a + ai) * (1.0 + a * qp(di + 1)) * (qp(i) - qp(-i)) * (ai * qp(di - i) - a * qp(i - di))
            / (qp(2 * i - di + 1) * (a + qp(di - 1)) * (a + qp(di - 2 * i - 1)) * (a + qp(di - 2 * i + 1)));
    }
    cc[d] = al * (qp(-di) - qp(di)) * (a - qp(di - 1)) / (qp(di - 1) * (a + qp(1 - di)));
    aa[d] = al * a * (ai * ai - a * a) * (qp(di) - qp(-di)) / ((a + qp(di - 1)) * (a + qp(1 - di)));
    let a1 = (a + ai) * (1.0 - a * qp(1 - di)) * (1.0 + a * qp(di + 1)) * (a * qp(2 - di) - ai * qp(di - 2))
        / ((1.0 + a * qp(3 - di)) * (1.0 - a * qp(di - 1)) * (a * q - ai * qi));
    let mut k = vec![c(1.0); d + 1];
    for i in 1..=d {
        k[i] = k[i - 1] * b[i - 1] / cc[i];
    }
    Ok(AppendixScalars {
        d,
        alpha_cf: al,
        epsilon_cf: ep,
        b,
        c: cc,
        a_seq: aa,
        a1,
        k,
        bipartite: (a * a + 1.0).norm() < 1e-9,
        almost_bipartite: (a + qp(-di - 1)).norm() < 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(x: C64, y: C64, tol: f64) -> bool {
        (x - y).norm() < tol
    }

    #[test]
    fn c7_fit_contains_known_point() {
        let theta: Vec<f64> = (0..4).map(|i| 2.0 * (2.0 * PI * i as f64 / 7.0).cos()).collect();
        let fits = fit_qracah(&theta).unwrap();
        let q = C64::from_polar(1.0, PI / 7.0);
        let a = -q.powi(-4);
        let hit = fits.iter().find(|p| close(p.q, q, 1e-9) && close(p.a, a, 1e-9)).expect("C7 branch");
        assert!(close(hit.alpha, c(1.0), 1e-9));
        assert!(close(hit.epsilon, c(0.0), 1e-9));
        assert!(close(hit.q * hit.q, C64::from_polar(1.0, 2.0 * PI / 7.0), 1e-12));
    }

    #[test]
    fn hypercube_is_not_qracah() {
        match fit_qracah(&[4.0, 2.0, 0.0, -2.0, -4.0]) {
            Err(Error::NotQRacah(msg)) => assert!(msg.contains("beta = 2") && msg.contains("q^2 = 1"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn forward_then_fit() {
        let p = QRacahParams::new(4, c(1.3), c(0.7), c(2.0), c(0.5));
        let theta: Vec<f64> = (0..=4).map(|i| p.theta(i).re).collect();
        let fits = fit_qracah(&theta).unwrap();
        let want = p.canonical();
        assert!(close(want.q, c(1.0 / 1.3), 1e-12));
        let hit = fits.iter().find(|f| close(f.q, want.q, 1e-9) && close(f.a, want.a, 1e-9)).unwrap();
        assert!(close(hit.alpha, c(2.0), 1e-9) && close(hit.epsilon, c(0.5), 1e-9));
    }

    #[test]
    fn c7_tables() {
        let q = C64::from_polar(1.0, PI / 7.0);
        let t = tables_at(-q.powi(-4), q, 3).unwrap();
        let want_b = [2.0, 1.0, 1.0, 0.0];
        let want_c = [0.0, 1.0, 1.0, 1.0];
        let want_a = [0.0, 0.0, 0.0, 1.0];
        for i in 0..4 {
            assert!(close(t.b[i], c(want_b[i]), 1e-12));
            assert!(close(t.c[i], c(want_c[i]), 1e-12));
            assert!(close(t.a_seq[i], c(want_a[i]), 1e-12));
        }
        assert!(close(t.alpha_cf, c(1.0), 1e-12) && close(t.epsilon_cf, c(0.0), 1e-12));
        assert!(t.almost_bipartite && !t.bipartite);
    }

    #[test]
    fn c8_tables_bipartite() {
        let q = C64::from_polar(1.0, PI / 8.0);
        let t = tables_at(C64::i(), q, 4).unwrap();
        assert!(t.bipartite);
        assert!(t.a_seq.iter().all(|x| x.norm() < 1e-12));
        assert!(t.epsilon_cf.norm() < 1e-12);
        for (k, w) in t.k.iter().zip([1.0, 2.0, 2.0, 2.0, 1.0]) {
            assert!(close(*k, c(w), 1e-12));
        }
    }

    #[test]
    fn inadmissible_rejected() {
        let q = C64::from_polar(1.0, PI / 3.0);
        assert!(matches!(tables_at(c(1.7), q, 3), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn canonical_prefers_upper_half_plane() {
        let q = C64::from_polar(1.0, -0.4);
        let p = QRacahParams::new(3, q, c(2.0), c(1.0), c(0.0)).canonical();
        assert!(p.q.im > 0.0);
        let r = QRacahParams::new(3, c(0.5), c(0.25), c(1.0), c(0.0)).canonical();
        assert!(close(r.q, c(2.0), 1e-12) && close(r.a, c(4.0), 1e-12));
    }

    #[test]
    fn tau_ratio_and_start() {
        let p = QRacahParams::new(5, C64::from_polar(1.1, 0.3), C64::from_polar(0.9, 1.0), c(1.0), c(0.0));
        assert!(close(p.tau[0], c(1.0), 1e-15));
        for i in 1..=5 {
            let want = -p.a.inv() * p.qp(5 - 2 * i as i64 + 1);
            assert!(close(p.tau[i] / p.tau[i - 1], want, 1e-12));
        }
    }
}
