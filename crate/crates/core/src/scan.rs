//! Search over `(q, a)` for points whose closed-form intersection numbers are nonnegative integers.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combin::special_tags;
use crate::error::{Error, Result};
use crate::formulas::Closed;
use crate::linalg::{c, C64};
use crate::qracah::{tables_at, AppendixScalars, QRacahParams};

/// Array entries must be real to within this.
pub const REAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    UnitCircleQ,
    SpecialA,
    RealQ,
}

impl FamilyTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::UnitCircleQ => "unit-circle-q",
            FamilyTag::SpecialA => "special-a",
            FamilyTag::RealQ => "real-q",
        }
    }
}

/// Inclusive range `lo + step·j ≤ hi`, `j ≥ 1` when `open_lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Range {
    pub fn points(&self, open_lo: bool) -> Vec<f64> {
        if !(self.step > 0.0) || self.hi < self.lo {
            return Vec::new();
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        let start = usize::from(open_lo);
        (start..=n).map(|j| self.lo + self.step * j as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Largest denominator `N` in `q = exp(iπ m/N)`; 0 disables the family.
    pub unit_circle_max: usize,
    /// Exponents `|j| ≤ power_max` in `a = ±q^j`.
    pub power_max: usize,
    /// Real `q`, lower end excluded.
    pub real_q: Option<Range>,
    /// Magnitudes of real `a`; both signs are used.
    pub real_a: Range,
    pub threshold: f64,
}

impl GridSpec {
    pub fn defaults(d: usize) -> Self {
        GridSpec {
            unit_circle_max: 60,
            power_max: 2 * d + 2,
            real_q: Some(Range { lo: 1.0, hi: 3.0, step: 1e-3 }),
            real_a: Range { lo: 1e-3, hi: 3.0, step: 1e-3 },
            threshold: 1e-4,
        }
    }

    pub fn empty() -> Self {
        GridSpec {
            unit_circle_max: 0,
            power_max: 0,
            real_q: None,
            real_a: Range { lo: 1.0, hi: 0.0, step: 1.0 },
            threshold: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |r: &Range| !(r.step > 0.0) || !r.lo.is_finite() || !r.hi.is_finite();
        if self.real_q.as_ref().is_some_and(|r| bad(r) || r.lo < 0.0) {
            return Err(Error::Degenerate("real q range needs a positive step and lo >= 0".into()));
        }
        if self.real_q.is_some() && bad(&self.real_a) {
            return Err(Error::Degenerate("real a range needs a positive step".into()));
        }
        if !(self.threshold >= 0.0) {
            return Err(Error::Degenerate("threshold must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityCandidate {
    pub d: usize,
    pub q: C64,
    pub a: C64,
    pub family_tag: FamilyTag,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub a_seq: Vec<f64>,
    pub k: Vec<f64>,
    pub integrality_residual: f64,
    pub n_implied: u64,
    pub tags: Vec<String>,
}

impl FeasibilityCandidate {
    pub fn arrays_string(&self) -> String {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{}", x.round() as i64)).collect::<Vec<_>>().join(",");
        format!(
            "b=[{}] c=[{}] a=[{}] k=[{}]",
            fmt(&self.b[..self.d]),
            fmt(&self.c[1..]),
            fmt(&self.a_seq),
            fmt(&self.k)
        )
    }
}

fn int_dist(v: C64) -> f64 {
    let r = v.re.round().max(0.0);
    (v.re - r).abs().max(v.im.abs())
}

/// Largest distance of any array entry from a nonnegative integer, or `None` when
/// some `b_i` (`i < D`) or `c_i` (`i ≥ 1`) rounds below 1.
pub fn integrality_residual(t: &AppendixScalars) -> Option<f64> {
    let d = t.d;
    let positive = |v: C64| v.re.round() >= 1.0;
    if !t.b[..d].iter().all(|&v| positive(v)) || !t.c[1..].iter().all(|&v| positive(v)) {
        return None;
    }
    let all = t.b[..d].iter().chain(&t.c[1..]).chain(&t.a_seq).chain(&t.k);
    Some(all.map(|&v| int_dist(v)).fold(0.0, f64::max))
}

fn candidate(a: C64, q: C64, d: usize, family: FamilyTag, threshold: f64) -> Option<FeasibilityCandidate> {
    let p = QRacahParams::new(d, q, a, c(1.0), c(0.0)).canonical();
    let t = tables_at(p.a, p.q, d).ok()?;
    let r = integrality_residual(&t)?;
    if !(r < threshold) {
        return None;
    }
    let re = |v: &[C64]| v.iter().map(|z| z.re).collect::<Vec<_>>();
    let k = re(&t.k);
    let n_implied = k.iter().map(|v| v.round() as u64).sum();
    Some(FeasibilityCandidate {
        d,
        q: p.q,
        a: p.a,
        family_tag: family,
        b: re(&t.b),
        c: re(&t.c),
        a_seq: re(&t.a_seq),
        tags: special_tags(&p, t.a_seq[1].re),
        k,
        integrality_residual: r,
        n_implied,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `b_0` for real `(a, q)`, used to discard grid points before the full evaluation.
fn valency_real(a: f64, q: f64, d: i64) -> f64 {
    let qp = |e: i64| q.powi(e as i32);
    let ai = 1.0 / a;
    let al = (a * qp(2 - d) - ai * qp(d - 2)) * (a + qp(d - 1))
        / (qp(d - 1) * (1.0 / q - q) * (a * q - ai / q) * (a - qp(1 - d)));
    al * (qp(-d) - qp(d)) * (a * a * a - qp(d - 1)) / (a * (a + qp(d - 1)))
}

fn unit_circle_points(spec: &GridSpec) -> Vec<(C64, C64, FamilyTag)> {
    let mut pts = Vec::new();
    let pm = spec.power_max as i32;
    for n in 2..=spec.unit_circle_max {
        for m in 1..2 * n {
            if gcd(m, n) != 1 {
                continue;
            }
            let q = C64::from_polar(1.0, std::f64::consts::PI * m as f64 / n as f64);
            if q.im < 0.0 {
                continue;
            }
            for j in -pm..=pm {
                for s in [1.0, -1.0] {
                    pts.push((q, q.powi(j) * s, FamilyTag::UnitCircleQ));
                }
            }
            for a in [C64::i(), -C64::i()] {
                pts.push((q, a, FamilyTag::SpecialA));
            }
        }
    }
    pts
}

/// All candidates for diameter `d`, deduplicated under `(a, q) → (a⁻¹, q⁻¹)` and
/// sorted by residual then position.
pub fn scan(d: usize, spec: &GridSpec) -> Result<Vec<FeasibilityCandidate>> {
    if d < 3 {
        return Err(Error::DiameterTooSmall(format!("scan needs D >= 3, got {d}")));
    }
    spec.validate()?;
    let th = spec.threshold;
    let mut found: Vec<FeasibilityCandidate> = unit_circle_points(spec)
        .into_par_iter()
        .filter_map(|(q, a, fam)| candidate(a, q, d, fam, th))
        .collect();
    if let Some(rq) = spec.real_q {
        let mags = spec.real_a.points(false);
        let avals: Vec<f64> = mags.iter().flat_map(|&m| [m, -m]).collect();
        let di = d as i64;
        let real: Vec<FeasibilityCandidate> = rq
            .points(true)
            .into_par_iter()
            .flat_map_iter(|q| {
                avals
                    .iter()
                    .filter(move |&&a| {
                        let b0 = valency_real(a, q, di);
                        b0.is_finite() && b0 > 1.5 && (b0 - b0.round()).abs() < th.max(1e-12)
                    })
                    .filter_map(move |&a| candidate(c(a), c(q), d, FamilyTag::RealQ, th))
                    .collect::<Vec<_>>()
            })
            .collect();
        found.extend(real);
    }
    let key = |x: &FeasibilityCandidate| {
        let r = |v: f64| (v * 1e8).round() as i64;
        (r(x.q.re), r(x.q.im), r(x.a.re), r(x.a.im))
    };
    let mut uniq: BTreeMap<(i64, i64, i64, i64), FeasibilityCandidate> = BTreeMap::new();
    for cand in found {
        match uniq.get(&key(&cand)) {
            Some(old) if old.family_tag <= cand.family_tag => {}
            _ => {
                uniq.insert(key(&cand), cand);
            }
        }
    }
    let mut out: Vec<_> = uniq.into_values().collect();
    out.sort_by(|x, y| {
        x.integrality_residual
            .total_cmp(&y.integrality_residual)
            .then_with(|| key(x).cmp(&key(y)))
    });
    Ok(out)
}

/// A named feasibility filter and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResult {
    pub name: String,
    pub value: Option<C64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub candidate: FeasibilityCandidate,
    pub tags: Vec<String>,
    pub filters: Vec<FilterResult>,
    pub feasible: bool,
}

/// Re-evaluates the arrays and applies the nonnegative-integrality filters on the counting formulas.
pub fn evaluate_candidate(cand: &FeasibilityCandidate) -> Result<CandidateReport> {
    let d = cand.d;
    let t = tables_at(cand.a, cand.q, d)?;
    let f = Closed::from_tables(cand.a, cand.q, &t);
    let p = QRacahParams::new(d, cand.q, cand.a, t.alpha_cf, t.epsilon_cf);
    let a1 = t.a_seq[1].re.round();
    let mut filters = Vec::new();
    let mut put = |name: String, v: C64| {
        let bad = if !v.is_finite() {
            Some("non-finite value".to_string())
        } else if v.im.abs() > REAL_TOL {
            Some(format!("imaginary part {:.3e}", v.im))
        } else if v.re < -REAL_TOL {
            Some(format!("negative value {:.6}", v.re))
        } else if int_dist(v) > REAL_TOL {
            Some(format!("non-integer value {:.6}", v.re))
        } else {
            None
        };
        filters.push(FilterResult { name, value: Some(v), pass: bad.is_none(), reason: bad });
    };
    put("arrays".into(), c(integrality_residual(&t).map_or(f64::NAN, |r| if r < REAL_TOL { 0.0 } else { 0.5 })));
    let usable = |z: C64| z.norm() > 1e-9 && z.is_finite();
    for i in 2..=d as i64 {
        if usable(f.dnz(i)) {
            put(format!("z.i{i}"), f.z_raw(i));
        }
        if usable(f.dnz(i)) && f.p2_down(i).norm() > REAL_TOL {
            let (dn, same) = f.split(i);
            put(format!("split.i{i}.down"), dn);
            put(format!("split.i{i}.same"), same);
        }
        put(format!("p2_down.i{i}"), f.p2_down(i));
    }
    put("p2_end".into(), f.p2_end());
    if f.p2_end().norm() > REAL_TOL && usable(f.end_den()) {
        let (dn, same) = f.end_split();
        put("end_split.down".into(), dn);
        put("end_split.same".into(), same);
    }
    if a1 != 0.0 {
        let (r, s, mr, ms) = f.local_srg();
        let _ = (r, s);
        put("local_srg.mult_r".into(), mr);
        put("local_srg.mult_s".into(), ms);
    }
    let feasible = filters.iter().all(|x| x.pass);
    Ok(CandidateReport { candidate: cand.clone(), tags: special_tags(&p, a1), filters, feasible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_only(d: usize, n: usize) -> GridSpec {
        GridSpec { unit_circle_max: n, real_q: None, ..GridSpec::defaults(d) }
    }

    #[test]
    fn c7_point_found() {
        let out = scan(3, &unit_only(3, 8)).unwrap();
        let q = C64::from_polar(1.0, PI / 7.0);
        let hit = out
            .iter()
            .find(|x| (x.q - q).norm() < 1e-9 && (x.a + q.powi(-4)).norm() < 1e-9)
            .expect("C7 point");
        assert!(hit.integrality_residual < 1e-10);
        assert_eq!(hit.n_implied, 7);
        assert_eq!(hit.arrays_string(), "b=[2,1,1] c=[1,1,1] a=[0,0,0,1] k=[1,2,2,2]");
        assert!(hit.tags.iter().any(|t| t == "a=-q^(-D-1)"));
    }

    #[test]
    fn c8_point_found() {
        let out = scan(4, &unit_only(4, 8)).unwrap();
        let hit = out.iter().find(|x| x.n_implied == 8 && x.tags.iter().any(|t| t == "a^2=-1")).expect("C8");
        assert_eq!(hit.arrays_string(), "b=[2,1,1,1] c=[1,1,1,2] a=[0,0,0,0,0] k=[1,2,2,2,1]");
    }

    #[test]
    fn restricted_grid_excludes_seven() {
        let out = scan(3, &unit_only(3, 5)).unwrap();
        assert!(out.iter().all(|x| (x.q.arg() * 7.0 / PI - (x.q.arg() * 7.0 / PI).round()).abs() > 1e-6
            || (x.q.arg() * 5.0 / PI).fract().abs() < 1e-9
            || x.q.arg() == 0.0));
        assert!(!out.iter().any(|x| x.n_implied == 7 && x.tags.iter().any(|t| t == "a=-q^(-D-1)")));
    }

    #[test]
    fn empty_grid() {
        assert!(scan(3, &GridSpec::empty()).unwrap().is_empty());
        assert!(scan(2, &GridSpec::empty()).is_err());
    }

    #[test]
    fn no_inverse_pairs() {
        let out = scan(3, &unit_only(3, 12)).unwrap();
        for x in &out {
            let (qi, ai) = (x.q.inv(), x.a.inv());
            let twin = out.iter().filter(|y| (y.q - qi).norm() < 1e-9 && (y.a - ai).norm() < 1e-9).count();
            assert!(twin == 0 || ((x.q - qi).norm() < 1e-9 && (x.a - ai).norm() < 1e-9));
        }
    }

    #[test]
    fn deterministic() {
        let s = unit_only(3, 10);
        assert_eq!(scan(3, &s).unwrap(), scan(3, &s).unwrap());
    }

    #[test]
    fn evaluate_c7() {
        let out = scan(3, &unit_only(3, 7)).unwrap();
        let hit = out.iter().find(|x| x.n_implied == 7 && x.tags.iter().any(|t| t == "a=-q^(-D-1)")).unwrap();
        let rep = evaluate_candidate(hit).unwrap();
        assert!(rep.feasible, "{:?}", rep.filters);
        assert!(rep.tags.iter().any(|t| t == "a=-q^(-D-1)"));
    }
}
