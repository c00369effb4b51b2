//! Closed forms in `(a, q)` and the intersection-number expressions they are compared with.

use crate::graph::DRGraph;
use crate::linalg::{c, C64};
use crate::qracah::{AppendixScalars, QRacahParams};

/// Parameters together with an intersection array, either from the closed-form
/// tables or from a certified graph.
#[derive(Debug, Clone)]
pub struct Closed {
    pub d: usize,
    pub q: C64,
    pub a: C64,
    pub alpha: C64,
    pub eps: C64,
    pub b: Vec<C64>,
    pub c: Vec<C64>,
    pub aa: Vec<C64>,
}

impl Closed {
    pub fn from_tables(a: C64, q: C64, t: &AppendixScalars) -> Self {
        Closed {
            d: t.d,
            q,
            a,
            alpha: t.alpha_cf,
            eps: t.epsilon_cf,
            b: t.b.clone(),
            c: t.c.clone(),
            aa: t.a_seq.clone(),
        }
    }

    pub fn from_graph(p: &QRacahParams, g: &DRGraph) -> Self {
        let conv = |v: &[u64]| v.iter().map(|&x| c(x as f64)).collect();
        Closed {
            d: p.d,
            q: p.q,
            a: p.a,
            alpha: p.alpha,
            eps: p.epsilon,
            b: conv(&g.b),
            c: conv(&g.c),
            aa: conv(&g.a),
        }
    }

    pub fn di(&self) -> i64 {
        self.d as i64
    }

    pub fn qp(&self, e: i64) -> C64 {
        self.q.powi(e as i32)
    }

    /// `q + q⁻¹`.
    pub fn qs(&self) -> C64 {
        self.q + self.q.inv()
    }

    pub fn qm(&self) -> C64 {
        self.q - self.q.inv()
    }

    pub fn beta(&self) -> C64 {
        self.qp(2) + self.qp(-2)
    }

    /// `(q − q⁻¹)(q² − q⁻²)`.
    pub fn kappa(&self) -> C64 {
        self.qm() * (self.qp(2) - self.qp(-2))
    }

    /// `ϑ_i` for any integer `i`.
    pub fn th(&self, i: i64) -> C64 {
        self.a * self.qp(2 * i - self.di()) + self.qp(self.di() - 2 * i) / self.a
    }

    /// `a q^e − a⁻¹ q^{−e}`.
    fn br(&self, e: i64) -> C64 {
        self.a * self.qp(e) - self.qp(-e) / self.a
    }

    pub fn k(&self) -> C64 {
        self.b[0]
    }

    pub fn a1(&self) -> C64 {
        self.aa[1]
    }

    pub fn c2(&self) -> C64 {
        self.c[2]
    }

    fn ai(&self, i: i64) -> C64 {
        self.aa[i as usize]
    }

    fn bi(&self, i: i64) -> C64 {
        self.b[i as usize]
    }

    fn ci(&self, i: i64) -> C64 {
        self.c[i as usize]
    }

    /// `(2ϑ_i − βϑ_j) / ((q − q⁻¹)(q² − q⁻²))`.
    pub fn xcoef(&self, i: i64, j: i64) -> C64 {
        (2.0 * self.th(i) - self.beta() * self.th(j)) / self.kappa()
    }

    /// `1 + ϑ_i/(q + q⁻¹)`.
    pub fn weight(&self, i: i64) -> C64 {
        1.0 + self.th(i) / self.qs()
    }

    // ---- z_i ----

    /// `2(q + q⁻¹) + ϑ_{i−1} + ϑ_i`.
    pub fn dnz(&self, i: i64) -> C64 {
        2.0 * self.qs() + self.th(i - 1) + self.th(i)
    }

    pub fn dnz_closed(&self, i: i64) -> C64 {
        let f = self.a + self.qp(self.di() - 2 * i + 1);
        self.qp(2 * i - self.di() - 1) / self.a * self.qs() * f * f
    }

    /// `z_i` from `a_1`, `ε` and `ϑ`.
    pub fn z_raw(&self, i: i64) -> C64 {
        (self.a1() * (self.qs() + self.th(i)) + self.eps * (self.th(i - 1) - self.th(i))) / self.dnz(i)
    }

    pub fn z_closed(&self, i: i64) -> C64 {
        let d = self.di();
        self.a1() / (1.0 - self.a * self.qp(1 - d)) * (1.0 - self.qp(2 - 2 * i))
            / (1.0 + self.qp(d - 2 * i + 1) / self.a)
    }

    pub fn a1_minus_z_closed(&self, i: i64) -> C64 {
        let d = self.di();
        self.a1() * self.qp(1 - i) / (1.0 - self.a * self.qp(1 - d)) * (self.qp(d - i) / self.a - self.a * self.qp(i - d))
            / (1.0 + self.qp(d - 2 * i + 1) / self.a)
    }

    /// Both sides of `z(1 + ϑ_{i−1}/Q) = (a_1 − z)(1 + ϑ_i/Q) + ε(ϑ_{i−1} − ϑ_i)/Q`.
    pub fn z_recurrence(&self, i: i64, z: C64) -> (C64, C64) {
        let lhs = z * self.weight(i - 1);
        let rhs = (self.a1() - z) * self.weight(i) + (self.th(i - 1) - self.th(i)) / self.qs() * self.eps;
        (lhs, rhs)
    }

    // ---- diagonal relation ----

    /// Both sides of the diagonal relation `c_i X(i,i−1) + a_i + b_i X(i,i+1) = −(ε² + αε(Q+ϑ_i) + Qα²ϑ_i)`.
    pub fn diagonal(&self, i: i64) -> (C64, C64) {
        let d = self.di();
        let mut lhs = self.ai(i);
        if i > 0 {
            lhs += self.ci(i) * self.xcoef(i, i - 1);
        }
        if i < d {
            lhs += self.bi(i) * self.xcoef(i, i + 1);
        }
        let (al, ep, qs) = (self.alpha, self.eps, self.qs());
        let rhs = -(ep * ep + al * ep * (qs + self.th(i)) + qs * al * al * self.th(i));
        (lhs, rhs)
    }

    // ---- same-layer splits ----

    /// Counts toward layers `i−1, i, i+1` for adjacent `y, z ∈ Γ_i(x)`.
    pub fn same_layer(&self, i: i64) -> [C64; 3] {
        let d = self.di();
        let down = self.ci(i) * (self.a1() - self.z_raw(i)) / self.ai(i);
        let up = if i < d { self.bi(i) * self.z_raw(i + 1) / self.ai(i) } else { c(0.0) };
        [down, self.a1() - down - up, up]
    }

    /// Both sides of the same-layer scalar relation.
    pub fn same_layer_relation(&self, i: i64) -> (C64, C64) {
        let d = self.di();
        let lhs = 2.0 * self.eps + self.alpha * (self.qs() + self.th(i));
        let [dn, same, up] = self.same_layer(i);
        let mut rhs = dn * self.xcoef(i, i - 1) + same;
        if i < d {
            rhs += up * self.xcoef(i, i + 1);
        }
        (lhs, rhs)
    }

    // ---- p^i_{2,i−1} and its splits ----

    pub fn a_sum(&self, i: i64) -> C64 {
        self.ai(i) + self.ai(i - 1) - self.a1()
    }

    pub fn a_sum_closed(&self, i: i64) -> C64 {
        let (a, d, qs) = (self.a, self.di(), self.qs());
        let qm = self.qm();
        let aqm = a * self.q - 1.0 / (a * self.q);
        if i < d {
            a * (a + 1.0 / a) * self.qp(d - 2 * i + 1) * (self.qp(i - 1) - self.qp(1 - i)) * self.br(i - d)
                / (qm * (a + self.qp(d - 2 * i + 3)) * (a + self.qp(d - 2 * i - 1)))
                * qs
                * (a + self.qp(d - 1))
                * (a + self.qp(-d - 1))
                * self.br(2 - d)
                / (aqm * (a - self.qp(1 - d)) * (a + self.qp(d - 3)))
        } else {
            a * (a * a - 1.0 / (a * a)) * self.qp(1 - d) * (self.qp(d - 1) - self.qp(1 - d)) * qs * (a + self.qp(d - 1))
                * self.br(2 - d)
                / (qm * (a + self.qp(3 - d)) * aqm * (a - self.qp(1 - d)) * (a + self.qp(d - 3)))
        }
    }

    /// `p^i_{2,i−1} = c_i(a_i + a_{i−1} − a_1)/c_2`.
    pub fn p2_down(&self, i: i64) -> C64 {
        self.ci(i) * self.a_sum(i) / self.c2()
    }

    /// Layer split `(|Γ_{i−1}(x) ∩ Γ(y) ∩ Γ(z)|, |Γ_i(x) ∩ Γ(y) ∩ Γ(z)|)` for `∂(x,y) = i−1`, `∂(x,z) = i`, `∂(y,z) = 2`.
    pub fn split(&self, i: i64) -> (C64, C64) {
        let dn = self.dnz(i);
        (self.c2() * (self.qs() + self.th(i)) / dn, self.c2() * (self.qs() + self.th(i - 1)) / dn)
    }

    pub fn split_from_a(&self, i: i64) -> (C64, C64) {
        let s = self.a_sum(i);
        let z = self.z_raw(i);
        (self.c2() * (self.ai(i - 1) - z) / s, self.c2() * (self.ai(i) - self.a1() + z) / s)
    }

    pub fn split_closed(&self, i: i64) -> (C64, C64) {
        let (a, d, qs) = (self.a, self.di(), self.qs());
        let den = a + self.qp(d - 2 * i + 1);
        (
            self.c2() * self.q / qs * (a + self.qp(d - 2 * i - 1)) / den,
            self.c2() / self.q / qs * (a + self.qp(d - 2 * i + 3)) / den,
        )
    }

    /// `(q + q⁻¹)² · (a_{i−1} − z_i)/(a_i + a_{i−1} − a_1) · (a_{i+1} − a_1 + z_{i+1})/(a_{i+1} + a_i − a_1)`.
    pub fn split_ratio_product(&self, i: i64) -> C64 {
        let qs = self.qs();
        qs * qs * (self.ai(i - 1) - self.z_raw(i)) / self.a_sum(i) * (self.ai(i + 1) - self.a1() + self.z_raw(i + 1))
            / self.a_sum(i + 1)
    }

    // ---- inequality ----

    pub fn xi(&self, i: i64) -> C64 {
        self.xcoef(i, i - 1) - 1.0
    }

    pub fn zeta(&self, i: i64) -> C64 {
        -(self.xcoef(i, i + 1) - 1.0)
    }

    pub fn xi_closed(&self, i: i64) -> C64 {
        let (a, d) = (self.a, self.di());
        self.qp(2 * i - d - 2) * (a + self.qp(d - 2 * i + 1)) * (a - self.qp(d - 2 * i + 3)) / (a * self.qm())
    }

    pub fn zeta_closed(&self, i: i64) -> C64 {
        let (a, d) = (self.a, self.di());
        self.qp(2 * i - d + 2) * (a + self.qp(d - 2 * i - 1)) * (a - self.qp(d - 2 * i - 3)) / (a * self.qm())
    }

    pub fn ratio_closed(&self, i: i64) -> C64 {
        let (a, d) = (self.a, self.di());
        self.qp(4) * (a + self.qp(d - 2 * i - 1)) * (a - self.qp(d - 2 * i - 3))
            / ((a + self.qp(d - 2 * i + 1)) * (a - self.qp(d - 2 * i + 3)))
    }

    /// `p^i_{2,i}` from the intersection array.
    pub fn p2_same(&self, i: i64) -> C64 {
        let a1 = self.a1();
        (self.ci(i) * (self.bi(i - 1) - 1.0) + self.bi(i) * (self.ci(i + 1) - 1.0) + self.ai(i) * (self.ai(i) - a1 - 1.0))
            / self.c2()
    }

    /// `p^i_{2,i}(c_2 − z_2 − 1) − (b_{i−1} − a_1 − 1 + z_i)(c_{i+1} − z_{i+1} − 1)`.
    pub fn inequality_bracket(&self, i: i64) -> C64 {
        let a1 = self.a1();
        self.p2_same(i) * (self.c2() - self.z_raw(2) - 1.0)
            - (self.bi(i - 1) - a1 - 1.0 + self.z_raw(i)) * (self.ci(i + 1) - self.z_raw(i + 1) - 1.0)
    }

    pub fn inequality_bracket_closed(&self, i: i64) -> C64 {
        let (a, q, d) = (self.a, self.q, self.di());
        let qm = self.qm();
        let aqm = a * q - 1.0 / (a * q);
        let r1 = (self.qp(i) - self.qp(-i)) * (self.qp(i - 1) - self.qp(1 - i)) * self.br(i - d)
            * (a - self.qp(d - 2 * i - 3))
            * (a - self.qp(d - 2 * i + 3))
            * self.br(i - d + 1)
            / (self.br(2 * i - d - 2) * self.br(2 * i + 2 - d) * (a + self.qp(d - 2 * i + 1)) * (a + self.qp(d - 2 * i - 1)));
        let r2 = self.qp(2 - 2 * d) * (a + 1.0 / a) * (a * a * q - 1.0 / (a * a * q)) * self.br(d) * self.br(2 - d)
            / (aqm * aqm * qm * qm * self.qs() * self.br(2));
        let r3 = (a + self.qp(-d - 1)) * (a - self.qp(d + 1)) * (a + self.qp(d - 1)) * (a + self.qp(d - 1))
            / ((a + self.qp(d - 3)) * (a - self.qp(3 - d)) * (a - self.qp(1 - d)) * (a - self.qp(1 - d)));
        r1 * r2 * r3
    }

    // ---- the last layer ----

    /// `p^D_{2,D}` from the intersection array.
    pub fn p2_end(&self) -> C64 {
        let d = self.di();
        (self.ci(d) * (self.bi(d - 1) - 1.0) + self.ai(d) * (self.ai(d) - self.a1() - 1.0)) / self.c2()
    }

    pub fn p2_end_closed(&self) -> C64 {
        let (a, q, d) = (self.a, self.q, self.di());
        let qm = self.qm();
        (self.qp(d) - self.qp(-d)) * (self.qp(d - 1) - self.qp(1 - d)) * (a * a - 1.0 / (a * a))
            * (a * a * q - 1.0 / (a * a * q))
            / ((self.qp(2) - self.qp(-2)) * qm * self.br(1) * self.br(2))
            * self.br(1 - d)
            * self.br(4 - d)
            / (self.br(d - 1) * self.br(d - 2))
    }

    /// `K − 2ϑ_D + βϑ_{D−1}`.
    pub fn end_den(&self) -> C64 {
        let d = self.di();
        self.kappa() - 2.0 * self.th(d) + self.beta() * self.th(d - 1)
    }

    /// Split for `∂(x,y) = ∂(x,z) = D`, `∂(y,z) = 2` from `ϑ`.
    pub fn end_split(&self) -> (C64, C64) {
        let d = self.di();
        let den = self.end_den();
        (
            self.c2() * self.kappa() / den,
            self.c2() * (self.beta() * self.th(d - 1) - 2.0 * self.th(d)) / den,
        )
    }

    pub fn end_split_from_a(&self) -> (C64, C64) {
        let d = self.di();
        let p = self.p2_end();
        let z = self.z_raw(d);
        let a1 = self.a1();
        (
            self.ci(d) * (self.bi(d - 1) - a1 - 1.0 + z) / p,
            (self.ci(d) * (a1 - z) + self.ai(d) * (self.ai(d) - a1 - 1.0)) / p,
        )
    }

    pub fn end_split_closed(&self) -> (C64, C64) {
        let (a, q, d) = (self.a, self.q, self.di());
        let cm = self.br(d - 1) * self.br(4 - d) * (a + self.qp(d - 3)) * self.br(1);
        let common = self.br(2) * self.br(2 - d) * (a + self.qp(d - 1)) / cm;
        (
            -(self.qp(2) - self.qp(-2)) / q * common,
            self.qs() / q * self.br(d - 2) * common,
        )
    }

    pub fn end_xcoef_minus_one_closed(&self) -> C64 {
        let (a, d) = (self.a, self.di());
        self.qp(d - 2) * (a + self.qp(1 - d)) * (a - self.qp(3 - d)) / (a * self.qm())
    }

    // ---- local graph ----

    /// `(r, s, mult_r, mult_s)` for the local graph.
    pub fn local_srg(&self) -> (C64, C64, C64, C64) {
        let (a, q, d) = (self.a, self.q, self.di());
        let qm = self.qm();
        let aqm = self.br(1);
        let r = a * (a + 1.0 / a) * self.br(2 - d) / (q * (a - self.qp(1 - d)) * (a + self.qp(d - 3)));
        let s = (1.0 + a * self.qp(d + 1)) * (self.qp(d - 2) / a - a * self.qp(2 - d))
            / (q * q * aqm * (a + self.qp(d - 3)));
        let w = 1.0 - a * a * a * self.qp(d + 1);
        let mr = (self.qp(d - 1) - self.qp(1 - d)) * (1.0 - a * self.qp(1 - d)) * (1.0 + a * self.qp(d + 1))
            * (a * a * a - self.qp(d - 1))
            / (a * w * qm * aqm);
        let ms = self.qp(d + 1) * (a + 1.0 / a) * (self.qp(-d) - self.qp(d)) * (1.0 - a * self.qp(1 - d))
            * (a * a * a - self.qp(d - 3))
            / (qm * (1.0 - a * self.qp(d - 1)) * w);
        (r, s, mr, ms)
    }

    // ---- table identities ----

    /// `a_i` from `a_1` by the ratio formula (`1 ≤ i ≤ D−1`).
    pub fn ai_from_a1(&self, i: i64) -> C64 {
        let (a, d) = (self.a, self.di());
        self.a1() * a * self.qp(2 - 2 * i) * (a + self.qp(d - 3)) * (self.qp(i) - self.qp(-i))
            * (self.qp(d - i) / a - a * self.qp(i - d))
            / ((1.0 - a * self.qp(1 - d)) * self.qm() * (a + self.qp(d - 2 * i + 1)) * (a + self.qp(d - 2 * i - 1)))
    }

    /// `ε` from `a_1`.
    pub fn eps_from_a1(&self) -> C64 {
        let (a, d) = (self.a, self.di());
        self.a1() * self.q * (a + self.qp(d - 3)) / (self.qm() * (a - self.qp(d - 1)))
    }

    /// Both sides of `a_{i−1}(1 + ϑ_{i−1}/Q) = a_i(1 + ϑ_i/Q) + ε(ϑ_{i−1} − ϑ_i)/Q`.
    pub fn a_recurrence(&self, i: i64) -> (C64, C64) {
        (
            self.ai(i - 1) * self.weight(i - 1),
            self.ai(i) * self.weight(i) + (self.th(i - 1) - self.th(i)) / self.qs() * self.eps,
        )
    }

    /// Both sides of `a_i(1 + ϑ_i/Q) = ε(ϑ_i − ϑ_0)/Q`.
    pub fn a_from_theta(&self, i: i64) -> (C64, C64) {
        (self.ai(i) * self.weight(i), self.eps * (self.th(i) - self.th(0)) / self.qs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qracah::tables_at;
    use std::f64::consts::PI;

    #[test]
    fn c7_z_values_vanish() {
        let q = C64::from_polar(1.0, PI / 7.0);
        let a = -q.powi(-4);
        let t = tables_at(a, q, 3).unwrap();
        let f = Closed::from_tables(a, q, &t);
        for i in 1..=3 {
            assert!(f.z_raw(i).norm() < 1e-12);
        }
        let (d, s) = f.split(2);
        assert!((d + s - 1.0).norm() < 1e-12);
    }

    #[test]
    fn diagonal_relation_on_tables() {
        let q = C64::from_polar(1.1, 0.7);
        let a = C64::from_polar(1.4, 2.1);
        let t = tables_at(a, q, 5).unwrap();
        let f = Closed::from_tables(a, q, &t);
        for i in 0..=5 {
            let (l, r) = f.diagonal(i);
            assert!((l - r).norm() < 1e-9 * (1.0 + l.norm()));
        }
    }
}
