//! Scalar identities evaluated at random admissible `(a, q)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::formulas::Closed;
use crate::linalg::{rel, C64};
use crate::qracah::{admissibility_margin, tables_at};

/// Minimum distance from 1 of every admissibility expression, and minimum modulus
/// of every guarded denominator, for a sample to be kept.
pub const SAMPLE_MARGIN: f64 = 1e-4;
/// Pass threshold for every harness identity.
pub const HARNESS_TOL: f64 = 1e-9;
const MAX_DRAWS: usize = 100_000;

pub const BIPARTITE_FLAG: &str = "bipartite: a_1=0";

/// Identity names in report order.
pub const IDENTITIES: &[&str] = &[
    "appendix.c1_unit",
    "appendix.row_sum",
    "appendix.a1_closed",
    "appendix.epsilon_from_a1",
    "appendix.ai_from_a1",
    "appendix.a_recurrence",
    "appendix.a_from_theta",
    "theta.recurrence",
    "theta.quadratic",
    "theta.adjacent_forms",
    "theta.adjacent_product",
    "z.denominator_factor",
    "z.closed_form",
    "z.complement_closed_form",
    "z.recurrence",
    "z.product_relation",
    "diagonal.scalar_relation",
    "same_layer.inner_relation",
    "same_layer.end_relation",
    "down_count.expansion_mid",
    "down_count.expansion_end",
    "split.down_forms",
    "split.same_forms",
    "split.ratio_product",
    "inequality.xi_closed",
    "inequality.zeta_closed",
    "inequality.ratio_closed",
    "inequality.product_form",
    "end.p2_closed_form",
    "end.xcoef_closed",
    "end.split_forms",
    "local_srg.multiplicity_sum",
    "local_srg.trace",
    "local_srg.square_trace",
];

/// Per-identity maxima for one sample; `None` marks a skipped identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleResult {
    pub residuals: BTreeMap<&'static str, f64>,
    pub skipped: BTreeMap<&'static str, String>,
}

impl SampleResult {
    fn put(&mut self, name: &'static str, v: f64) {
        let e = self.residuals.entry(name).or_insert(0.0);
        // NaN must surface as a failure.
        if v.is_nan() || v > *e {
            *e = if v.is_nan() { f64::INFINITY } else { v };
        }
    }

    fn skip(&mut self, name: &'static str, why: &str) {
        self.skipped.entry(name).or_insert_with(|| why.to_string());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityStat {
    pub name: String,
    pub max_residual: f64,
    pub evaluated: usize,
    pub skipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub diameter: usize,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub identities: Vec<IdentityStat>,
    pub pass: bool,
}

impl HarnessReport {
    pub fn get(&self, name: &str) -> Option<&IdentityStat> {
        self.identities.iter().find(|s| s.name == name)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "identity harness: D={} samples={} seed={} tolerance={:e}\n",
            self.diameter, self.samples, self.seed, self.tolerance
        );
        for s in &self.identities {
            let status = if s.evaluated == 0 {
                "skip"
            } else if s.max_residual < self.tolerance {
                "pass"
            } else {
                "FAIL"
            };
            out.push_str(&format!(
                "{:<30} {:>4} max={:.3e} evaluated={} skipped={}",
                s.name, status, s.max_residual, s.evaluated, s.skipped
            ));
            if let Some(r) = &s.skip_reason {
                out.push_str(&format!(" ({r})"));
            }
            out.push('\n');
        }
        out.push_str(if self.pass { "verdict: pass\n" } else { "verdict: FAIL\n" });
        out
    }
}

/// Guarded denominators: the smallest modulus among them.
fn guard_margin(f: &Closed) -> f64 {
    let d = f.di();
    let a = f.a;
    let mut g = vec![1.0 - a * a * a * f.qp(d + 1), f.c2(), f.end_den(), f.p2_end()];
    for i in 1..=d {
        g.push(f.aa[i as usize]);
        g.push(f.dnz(i));
        g.push(2.0 * f.qs() + f.th(i - 1) + f.th(i));
    }
    for i in 2..=d {
        g.push(f.a_sum(i));
        g.push(f.p2_down(i));
    }
    for i in 2..d {
        g.push(f.xi(i));
        g.push(f.p2_same(i));
    }
    g.into_iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
}

/// Evaluate every identity at one parameter point.
pub fn evaluate_sample(a: C64, q: C64, d: usize) -> crate::Result<SampleResult> {
    let t = tables_at(a, q, d)?;
    let f = Closed::from_tables(a, q, &t);
    let di = d as i64;
    let mut r = SampleResult::default();
    let k = f.k();
    let a1 = f.a1();
    let bip = a1.norm() < 1e-12 * (1.0 + k.norm());

    r.put("appendix.c1_unit", rel(f.c[1], C64::new(1.0, 0.0)));
    for i in 0..=d {
        r.put("appendix.row_sum", rel(k, f.c[i] + f.aa[i] + f.b[i]));
    }
    r.put("appendix.a1_closed", rel(t.a1, a1));
    r.put("appendix.epsilon_from_a1", rel(f.eps, f.eps_from_a1()));
    for i in 1..di {
        r.put("appendix.ai_from_a1", rel(f.aa[i as usize], f.ai_from_a1(i)));
    }
    for i in 1..=di {
        let (l, rr) = f.a_recurrence(i);
        r.put("appendix.a_recurrence", rel(l, rr));
    }
    for i in 0..=di {
        let (l, rr) = f.a_from_theta(i);
        r.put("appendix.a_from_theta", rel(l, rr));
    }

    let q2m = f.qp(2) - f.qp(-2);
    for i in 1..di {
        r.put("theta.recurrence", rel(f.th(i - 1) + f.th(i + 1), f.beta() * f.th(i)));
    }
    for i in 1..=di {
        let (u, v) = (f.th(i - 1), f.th(i));
        r.put("theta.quadratic", rel(u * u - f.beta() * u * v + v * v, -q2m * q2m));
        let fwd = (f.q * v - u / f.q) / q2m;
        let bwd = (f.q * u - v / f.q) / q2m;
        r.put("theta.adjacent_forms", rel(fwd, a * f.qp(2 * i - di - 1)));
        r.put("theta.adjacent_forms", rel(bwd, f.qp(di - 2 * i + 1) / a));
        r.put("theta.adjacent_product", rel(fwd * bwd, C64::new(1.0, 0.0)));
        r.put("z.denominator_factor", rel(f.dnz(i), f.dnz_closed(i)));
    }

    for i in 0..=di {
        let (l, rr) = f.diagonal(i);
        r.put("diagonal.scalar_relation", rel(l, rr));
    }

    let z_group = [
        "z.closed_form",
        "z.complement_closed_form",
        "z.recurrence",
        "z.product_relation",
        "same_layer.inner_relation",
        "same_layer.end_relation",
        "split.ratio_product",
    ];
    if bip {
        for n in z_group {
            r.skip(n, BIPARTITE_FLAG);
        }
    } else {
        for i in 1..=di {
            let z = f.z_raw(i);
            r.put("z.closed_form", rel(z, f.z_closed(i)));
            r.put("z.complement_closed_form", rel(a1 - z, f.a1_minus_z_closed(i)));
            let (l, rr) = f.z_recurrence(i, z);
            r.put("z.recurrence", rel(l, rr));
        }
        for i in 1..di {
            r.put("z.product_relation", rel((a1 - f.z_raw(i)) * f.z_raw(i + 1), f.aa[i as usize] * f.z_raw(2)));
            let (l, rr) = f.same_layer_relation(i);
            r.put("same_layer.inner_relation", rel(l, rr));
        }
        let (l, rr) = f.same_layer_relation(di);
        r.put("same_layer.end_relation", rel(l, rr));
        for i in 2..di {
            r.put("split.ratio_product", rel(f.split_ratio_product(i), C64::new(1.0, 0.0)));
        }
    }

    let tiny = |z: C64| z.norm() < 1e-12 * (1.0 + k.norm());
    let zero_asum = (2..=di).any(|i| tiny(f.a_sum(i)));
    if zero_asum {
        r.skip("split.down_forms", "a_i + a_(i-1) - a_1 = 0");
        r.skip("split.same_forms", "a_i + a_(i-1) - a_1 = 0");
    }
    for i in 2..=di {
        let name = if i < di { "down_count.expansion_mid" } else { "down_count.expansion_end" };
        r.put(name, rel(f.a_sum(i), f.a_sum_closed(i)));
        if zero_asum {
            continue;
        }
        let (d13, s13) = f.split(i);
        let (d14, s14) = f.split_from_a(i);
        let (d15, s15) = f.split_closed(i);
        r.put("split.down_forms", rel(d13, d14).max(rel(d13, d15)));
        r.put("split.same_forms", rel(s13, s14).max(rel(s13, s15)));
    }

    for i in 2..di {
        r.put("inequality.xi_closed", rel(f.xi(i), f.xi_closed(i)));
        r.put("inequality.zeta_closed", rel(f.zeta(i), f.zeta_closed(i)));
        r.put("inequality.ratio_closed", rel(f.zeta(i) / f.xi(i), f.ratio_closed(i)));
        r.put("inequality.product_form", rel(f.inequality_bracket(i), f.inequality_bracket_closed(i)));
    }

    r.put("end.p2_closed_form", rel(f.p2_end(), f.p2_end_closed()));
    r.put("end.xcoef_closed", rel(f.xcoef(di, di - 1) - 1.0, f.end_xcoef_minus_one_closed()));
    if tiny(f.p2_end()) {
        r.skip("end.split_forms", "p^D_{2,D} = 0");
    } else {
        let (d30, s30) = f.end_split();
        let (d32, s32) = f.end_split_from_a();
        let (d33, s33) = f.end_split_closed();
        r.put("end.split_forms", rel(d30, d32).max(rel(d30, d33)).max(rel(s30, s32)).max(rel(s30, s33)));
    }

    let (rr, ss, mr, ms) = f.local_srg();
    r.put("local_srg.multiplicity_sum", rel(mr + ms + 1.0, k));
    r.put("local_srg.trace", rel(a1 + rr * mr + ss * ms, C64::new(0.0, 0.0)));
    r.put("local_srg.square_trace", rel(a1 * a1 + rr * rr * mr + ss * ss * ms, k * a1));
    Ok(r)
}

/// Draw one admissible, well-conditioned `(a, q)` for sample `index`.
pub fn draw_sample(d: usize, seed: u64, index: u64) -> Option<(C64, C64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for _ in 0..MAX_DRAWS {
        let q = C64::from_polar(rng.random_range(0.8..1.25), rng.random_range(0.0..std::f64::consts::TAU));
        let a = C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
        if admissibility_margin(a, q, d) < SAMPLE_MARGIN {
            continue;
        }
        let Ok(t) = tables_at(a, q, d) else { continue };
        if guard_margin(&Closed::from_tables(a, q, &t)) < SAMPLE_MARGIN {
            continue;
        }
        return Some((a, q));
    }
    None
}

pub fn identity_harness(d: usize, samples: usize, seed: u64) -> HarnessReport {
    let results: Vec<Option<SampleResult>> = (0..samples as u64)
        .into_par_iter()
        .map(|idx| draw_sample(d, seed, idx).and_then(|(a, q)| evaluate_sample(a, q, d).ok()))
        .collect();
    aggregate(d, samples, seed, &results)
}

fn aggregate(d: usize, samples: usize, seed: u64, results: &[Option<SampleResult>]) -> HarnessReport {
    let failed_draws = results.iter().filter(|r| r.is_none()).count();
    let mut identities = Vec::new();
    for &name in IDENTITIES {
        let mut stat = IdentityStat {
            name: name.to_string(),
            max_residual: 0.0,
            evaluated: 0,
            skipped: 0,
            skip_reason: None,
        };
        for r in results.iter().flatten() {
            if let Some(&v) = r.residuals.get(name) {
                stat.max_residual = stat.max_residual.max(v);
                stat.evaluated += 1;
            } else if let Some(why) = r.skipped.get(name) {
                stat.skipped += 1;
                stat.skip_reason.get_or_insert_with(|| why.clone());
            }
        }
        identities.push(stat);
    }
    let pass = failed_draws == 0
        && identities.iter().all(|s| s.max_residual < HARNESS_TOL)
        && identities.iter().any(|s| s.evaluated > 0);
    HarnessReport { diameter: d, samples, seed, tolerance: HARNESS_TOL, identities, pass }
}
