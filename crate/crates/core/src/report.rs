//! The end-to-end pipeline and its serializable report.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::central::{askey_wilson_control, build_abc, build_z, verify_askey_wilson, z_checks, z_spectrum_check, ZEigen};
use crate::check::{CheckSet, Status};
use crate::combin::{verify_counts, verify_matrix_eq, CountStats};
use crate::dual::{dual_structure, verify_dual_identities};
use crate::error::{Error, Result};
use crate::formulas::Closed;
use crate::graph::{integer_defects, DRGraph, GraphSummary};
use crate::linalg::{fro, identity, C64};
use crate::qracah::{fit_qracah, QRacahParams};
use crate::spectral::{
    find_qpoly_orderings, ordering_checks, spectral_checks, spectral_data, summary, SpectralData, SpectralSummary,
};
use crate::spin::{
    boltzmann_pair, nomura_membership, normalization_checks, pair_from_tau, permuted_control, spin_verdict,
    star_triangle_residual, verify_braid_and_rho, verify_intertwiners, verify_type2_and_expansions, verify_wminus,
    BoltzmannPair, FMode, TYPE3_BRUTEFORCE_MAX_N,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Controls must exceed this to count as detected.
pub const CONTROL_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub base_vertex: usize,
    pub all_vertices: bool,
    pub tolerance: f64,
    pub type3_bruteforce: bool,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            base_vertex: 0,
            all_vertices: false,
            tolerance: DEFAULT_TOLERANCE,
            type3_bruteforce: true,
            seed: 0,
        }
    }
}

/// A hard error and the stage that raised it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    pub fn new(stage: &str, e: &Error) -> Self {
        ErrorRecord { stage: stage.into(), kind: e.kind().into(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub ordering: Vec<usize>,
    pub branches: Vec<QRacahParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub x: usize,
    pub z_norm: Option<f64>,
    pub z_spectrum: Vec<ZEigen>,
    pub checks: CheckSet,
    pub counts: CountStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSummary {
    pub f: C64,
    pub tau: Vec<C64>,
    pub is_spin_model: bool,
    pub is_afforded: bool,
    /// Braid and brute-force star-triangle verdicts coincide; `None` when brute force was skipped.
    pub oracles_agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantRecord {
    pub ordering: Vec<usize>,
    pub params: QRacahParams,
    pub accepted: bool,
    pub gate_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejection: Option<ErrorRecord>,
    pub checks: CheckSet,
    pub controls: CheckSet,
    pub vertices: Vec<VertexRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<SpinSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool: String,
    pub version: String,
    pub input: String,
    pub options: AnalyzeOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSummary>,
    pub checks: CheckSet,
    pub fits: Vec<FitRecord>,
    pub variants: Vec<VariantRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl VerificationReport {
    fn new(input: &str, opts: &AnalyzeOptions) -> Self {
        VerificationReport {
            tool: "drgspin".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input: input.into(),
            options: opts.clone(),
            graph: None,
            spectral: None,
            checks: CheckSet::new(),
            fits: Vec::new(),
            variants: Vec::new(),
            error: None,
            verdict: Verdict::Fail,
            wall_time: None,
        }
    }

    /// Report for an input that failed before a graph was certified.
    pub fn failed(input: &str, opts: &AnalyzeOptions, stage: &str, e: &Error) -> Self {
        let mut r = Self::new(input, opts);
        r.error = Some(ErrorRecord::new(stage, e));
        r
    }

    pub fn accepted(&self) -> impl Iterator<Item = &VariantRecord> {
        self.variants.iter().filter(|v| v.accepted)
    }

    /// Every check in the report with its dotted name qualified by variant and vertex.
    pub fn all_checks(&self) -> Vec<(String, &crate::check::Check)> {
        let mut out: Vec<(String, &crate::check::Check)> =
            self.checks.checks.iter().map(|c| (String::new(), c)).collect();
        for (vi, v) in self.variants.iter().enumerate().filter(|(_, v)| v.accepted) {
            let tag = format!("variant{vi}");
            out.extend(v.checks.checks.iter().map(|c| (tag.clone(), c)));
            out.extend(v.controls.checks.iter().map(|c| (tag.clone(), c)));
            for vr in &v.vertices {
                let t = format!("{tag}/x{}", vr.x);
                out.extend(vr.checks.checks.iter().map(|c| (t.clone(), c)));
            }
        }
        out
    }

    /// First check, by report order, whose name matches and which fails.
    pub fn failures(&self) -> Vec<(String, &crate::check::Check)> {
        self.all_checks().into_iter().filter(|(_, c)| c.status == Status::Fail).collect()
    }

    fn finalize(&mut self) {
        let tol = self.options.tolerance;
        self.checks.finalize(tol);
        for v in &mut self.variants {
            v.checks.finalize(tol);
            v.controls.finalize(tol);
            for vr in &mut v.vertices {
                vr.checks.finalize(tol);
            }
        }
        let global = self.checks.all_pass(tol);
        let any = self.accepted().next().is_some();
        let all = self.accepted().all(|v| {
            v.checks.all_pass(tol)
                && v.controls.all_pass(tol)
                && v.vertices.iter().all(|vr| vr.error.is_none() && vr.checks.all_pass(tol))
        });
        self.verdict = if self.error.is_none() && global && any && all { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Human-readable table of the same dotted names.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}  input: {}", self.tool, self.version, self.input);
        if let Some(g) = &self.graph {
            let _ = writeln!(s, "graph: n={} D={} b={:?} c={:?} a={:?}", g.n, g.diameter, g.b, g.c, g.a);
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error [{}] {}: {}", e.stage, e.kind, e.message);
        }
        let row = |s: &mut String, scope: &str, c: &crate::check::Check| {
            let val = c.value.map_or("-".to_string(), |v| format!("{v:.3e}"));
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            let note = c.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default();
            let _ = writeln!(s, "  {status:<4}  {val:>10}  {scope}{}{}{note}", if scope.is_empty() { "" } else { " " }, c.name);
        };
        for c in &self.checks.checks {
            row(&mut s, "", c);
        }
        for (vi, v) in self.variants.iter().enumerate() {
            let _ = writeln!(
                s,
                "variant{vi}: ordering {:?} q={:.6}{:+.6}i a={:.6}{:+.6}i {} (gate {:.3e})",
                v.ordering,
                v.params.q.re,
                v.params.q.im,
                v.params.a.re,
                v.params.a.im,
                if v.accepted { "accepted" } else { "rejected" },
                v.gate_residual
            );
            if !v.accepted {
                continue;
            }
            for c in v.checks.checks.iter().chain(&v.controls.checks) {
                row(&mut s, "", c);
            }
            for vr in &v.vertices {
                let _ = writeln!(s, " vertex {}: |Z| = {:.3e}", vr.x, vr.z_norm.unwrap_or(f64::NAN));
                if let Some(e) = &vr.error {
                    let _ = writeln!(s, "  error {}: {}", e.kind, e.message);
                }
                for c in &vr.checks.checks {
                    row(&mut s, "", c);
                }
            }
        }
        let _ = writeln!(s, "verdict: {}", if self.verdict == Verdict::Pass { "PASS" } else { "FAIL" });
        s
    }
}

fn graph_checks(g: &DRGraph) -> CheckSet {
    let mut out = CheckSet::new();
    let defects = integer_defects(g);
    for name in ["graph.initial", "graph.row_sum", "graph.valency_product", "graph.valency_sum", "graph.p_symmetry", "graph.p_triangle"] {
        let hits: Vec<&(String, String)> = defects.iter().filter(|(n, _)| n == name).collect();
        out.residual_at(name, hits.len() as f64, 0.5);
        if let Some((_, why)) = hits.first() {
            out.note(why.clone());
        }
    }
    out
}

/// Run the full pipeline on a certified graph.
pub fn analyze(g: &DRGraph, input: &str, opts: &AnalyzeOptions) -> VerificationReport {
    let mut r = VerificationReport::new(input, opts);
    r.graph = Some(g.summary());
    r.checks.extend(graph_checks(g));
    if opts.base_vertex >= g.n {
        r.error = Some(ErrorRecord::new("dual", &Error::Degenerate(format!("base vertex {} >= n = {}", opts.base_vertex, g.n))));
        r.finalize();
        return r;
    }
    let s = match spectral_data(g) {
        Ok(s) => s,
        Err(e) => {
            r.error = Some(ErrorRecord::new("spectral", &e));
            r.finalize();
            return r;
        }
    };
    r.checks.extend(spectral_checks(g, &s));
    let orderings = find_qpoly_orderings(&s);
    r.spectral = Some(summary(&s, &orderings));
    let self_dual: Vec<_> = orderings.iter().filter(|o| o.is_formally_self_dual).collect();
    if self_dual.is_empty() {
        let msg = if orderings.is_empty() { "no Q-polynomial ordering" } else { "no formally self-dual ordering" };
        r.error = Some(ErrorRecord { stage: "spectral".into(), kind: "NoSelfDualOrdering".into(), message: msg.into() });
        r.finalize();
        return r;
    }
    for o in &self_dual {
        let mut oc = ordering_checks(g, &s, o);
        for c in &mut oc.checks {
            c.name = c.name.replacen("spectral.ordering", &format!("spectral.ordering{}", perm_tag(&o.perm)), 1);
        }
        r.checks.extend(oc);
    }
    for o in &self_dual {
        let so = s.reorder(&o.perm);
        match fit_qracah(&so.theta) {
            Ok(branches) => {
                for p in &branches {
                    r.variants.push(run_variant(g, &so, &o.perm, p, opts));
                }
                r.fits.push(FitRecord { ordering: o.perm.clone(), branches, error: None });
            }
            Err(e) => r.fits.push(FitRecord { ordering: o.perm.clone(), branches: Vec::new(), error: Some(ErrorRecord::new("qracah", &e)) }),
        }
    }
    if r.variants.is_empty() {
        r.error = r.fits.iter().find_map(|f| f.error.clone());
    } else if !r.variants.iter().any(|v| v.accepted) {
        r.error = r.variants.iter().find_map(|v| v.rejection.clone());
    }
    r.finalize();
    r
}

fn perm_tag(p: &[usize]) -> String {
    if p.iter().enumerate().all(|(i, &j)| i == j) {
        String::new()
    } else {
        format!("[{}]", p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""))
    }
}

fn run_variant(g: &DRGraph, s: &SpectralData, perm: &[usize], p: &QRacahParams, opts: &AnalyzeOptions) -> VariantRecord {
    let tol = opts.tolerance;
    let mut v = VariantRecord {
        ordering: perm.to_vec(),
        params: p.clone(),
        accepted: false,
        gate_residual: f64::NAN,
        rejection: None,
        checks: CheckSet::new(),
        controls: CheckSet::new(),
        vertices: Vec::new(),
        spin: None,
    };
    let x0 = opts.base_vertex;
    let ds = match dual_structure(g, s, x0) {
        Ok(ds) => ds,
        Err(e) => {
            v.rejection = Some(ErrorRecord::new("dual", &e));
            return v;
        }
    };
    match build_z(g, s, &ds, p, tol) {
        Ok(ce) => {
            v.gate_residual = ce.lhs_rhs_residual;
            v.accepted = true;
        }
        Err(e) => {
            if let Error::AssumptionFails { residual, .. } = &e {
                v.gate_residual = *residual;
            }
            v.rejection = Some(ErrorRecord::new("central", &e));
            return v;
        }
    }
    let xs: Vec<usize> = if opts.all_vertices { (0..g.n).collect() } else { vec![x0] };
    v.vertices = xs.par_iter().map(|&x| vertex_record(g, s, p, x, tol)).collect();

    let bp = match dual_structure(g, s, x0).and_then(|ds| boltzmann_pair(g, s, &ds, p, FMode::Theorem)) {
        Ok(bp) => bp,
        Err(e) => {
            v.checks.residual("spin.construction", f64::INFINITY);
            v.checks.note(e.to_string());
            return v;
        }
    };
    let brute = opts.type3_bruteforce && g.n <= TYPE3_BRUTEFORCE_MAX_N;
    v.checks.extend(global_spin_checks(g, &bp, &mut v.vertices, tol, brute, opts.type3_bruteforce));
    v.controls = controls(g, s, p, &bp, x0, opts.seed, brute);
    let verdict = spin_verdict(&bp.w, "spin.w", tol, brute);
    let afforded = v.checks.get("spin.nomura").map(|c| c.evaluate(tol) == Status::Pass).unwrap_or(false);
    let agree = v.checks.get("spin.oracle_agreement").and_then(|c| c.value).map(|x| x < 0.5);
    let braid_ok = v.vertices.iter().all(|vr| vr.checks.get("spin.braid").is_some_and(|c| c.evaluate(tol) == Status::Pass));
    v.spin = Some(SpinSummary {
        f: bp.f,
        tau: bp.tau.clone(),
        is_spin_model: if brute { verdict.is_spin_model } else { braid_ok && verdict.checks.all_pass(tol) },
        is_afforded: afforded,
        oracles_agree: agree,
    });
    v
}

fn vertex_record(g: &DRGraph, s: &SpectralData, p: &QRacahParams, x: usize, tol: f64) -> VertexRecord {
    let mut vr = VertexRecord { x, z_norm: None, z_spectrum: Vec::new(), checks: CheckSet::new(), counts: CountStats::default(), error: None };
    let ds = match dual_structure(g, s, x) {
        Ok(ds) => ds,
        Err(e) => {
            vr.checks.residual("dual.construction_agreement", f64::INFINITY);
            vr.error = Some(ErrorRecord::new("dual", &e));
            return vr;
        }
    };
    vr.checks.extend(verify_dual_identities(g, s, &ds, p));
    let ce = match build_z(g, s, &ds, p, tol) {
        Ok(ce) => ce,
        Err(e) => {
            let r = if let Error::AssumptionFails { residual, .. } = &e { *residual } else { f64::INFINITY };
            vr.checks.residual("z.gate", r);
            vr.error = Some(ErrorRecord::new("central", &e));
            return vr;
        }
    };
    vr.z_norm = Some(fro(&ce.z));
    vr.checks.extend(z_checks(g, s, &ds, &ce));
    vr.z_spectrum = z_spectrum_check(&ce.z, &ds, p);
    let unmatched = vr.z_spectrum.iter().filter(|e| e.matches.is_empty()).count();
    vr.checks.residual_at("z.spectrum_matched", unmatched as f64, 0.5);
    let (t, abc) = build_abc(g, s, &ds, p, &ce);
    vr.checks.extend(abc);
    vr.checks.extend(verify_askey_wilson(&t, &ce.z, p));
    match boltzmann_pair(g, s, &ds, p, FMode::Theorem) {
        Ok(bp) => {
            vr.checks.extend(verify_intertwiners(&bp, &t, p));
            vr.checks.extend(verify_braid_and_rho(&bp, &t, s, &ds));
            vr.checks.extend(verify_type2_and_expansions(&bp, g, &ds));
        }
        Err(e) => {
            vr.checks.residual("spin.construction", f64::INFINITY);
            vr.checks.note(e.to_string());
        }
    }
    let (counts, stats) = verify_counts(g, p, &ds);
    vr.checks.extend(counts);
    vr.counts = stats;
    vr
}

fn global_spin_checks(
    g: &DRGraph,
    bp: &BoltzmannPair,
    vertices: &mut [VertexRecord],
    tol: f64,
    brute: bool,
    requested: bool,
) -> CheckSet {
    let mut out = CheckSet::new();
    let verdict = spin_verdict(&bp.w, "spin.w", tol, brute);
    out.extend(verdict.checks.clone());
    if !brute {
        let why = if requested {
            format!("n > {TYPE3_BRUTEFORCE_MAX_N}; braid-based verification substitutes")
        } else {
            "brute-force disabled; braid-based verification substitutes".to_string()
        };
        out.checks.retain(|c| c.name != "spin.w.type3");
        out.skip("spin.w.type3", why);
    }
    out.extend(normalization_checks(bp, g.n, brute));
    let braid_pass: Vec<bool> = vertices
        .iter()
        .map(|vr| vr.checks.get("spin.braid").is_some_and(|c| c.evaluate(tol) == Status::Pass))
        .collect();
    if brute {
        let t3 = out.get("spin.w.type3").is_some_and(|c| c.evaluate(tol) == Status::Pass);
        let agree = braid_pass.iter().all(|&b| b == t3);
        out.residual_at("spin.oracle_agreement", if agree { 0.0 } else { 1.0 }, 0.5);
    } else {
        out.skip("spin.oracle_agreement", "brute-force star-triangle not evaluated");
    }
    if vertices.len() > 1 {
        let same = braid_pass.windows(2).all(|w| w[0] == w[1]);
        out.residual_at("spin.base_vertex_independence", if same { 0.0 } else { 1.0 }, 0.5);
    }
    match verify_wminus(&bp.w, tol, brute) {
        Ok(v) => {
            let mut v = v.checks;
            if !brute {
                v.checks.retain(|c| c.name != "spin.wminus.type3");
                v.skip("spin.wminus.type3", "brute-force star-triangle not evaluated");
            }
            out.extend(v);
        }
        Err(e) => {
            out.residual("spin.wminus.type2", f64::INFINITY);
            out.note(e.to_string());
        }
    }
    if brute {
        let neg = -bp.w.clone();
        match star_triangle_residual(&neg, C64::new((g.n as f64).sqrt(), 0.0)) {
            Ok(r) => out.residual("spin.negated_w.type3", r),
            Err(e) => {
                out.residual("spin.negated_w.type3", f64::INFINITY);
                out.note(e.to_string());
            }
        }
    }
    match nomura_membership(&bp.w, g) {
        Ok(r) => out.residual("spin.nomura", r),
        Err(e) => {
            out.residual("spin.nomura", f64::INFINITY);
            out.note(e.to_string());
        }
    }
    out
}

/// Negative controls; each must be detected.
fn controls(g: &DRGraph, s: &SpectralData, p: &QRacahParams, bp: &BoltzmannPair, x: usize, seed: u64, brute: bool) -> CheckSet {
    let mut out = CheckSet::new();
    let Ok(ds) = dual_structure(g, s, x) else { return out };
    let Ok(ce) = build_z(g, s, &ds, p, f64::INFINITY) else { return out };
    let (t, _) = build_abc(g, s, &ds, p, &ce);
    out.nonzero("control.aw_random_b", askey_wilson_control(&t, &ce.z, p, seed), CONTROL_THRESHOLD);
    let shifted = &ce.z + identity(g.n);
    let unmatched = z_spectrum_check(&shifted, &ds, p).iter().filter(|e| e.matches.is_empty()).count();
    out.nonzero("control.z_shift_unmatched", unmatched as f64, 0.5);
    let gate = match build_z(g, s, &ds, &p.with_epsilon(p.epsilon + 0.1), 1e-8) {
        Err(Error::AssumptionFails { residual, .. }) => residual,
        _ => 0.0,
    };
    out.nonzero("control.epsilon_shift_gate", gate, CONTROL_THRESHOLD);

    let mut neg = p.tau.clone();
    if neg.len() > 2 {
        neg[2] = -neg[2];
    }
    let v = pair_from_tau(g, s, &ds, &neg, FMode::Theorem)
        .map(|b| verify_intertwiners(&b, &t, p).value("spin.intertwiner_w").unwrap_or(f64::INFINITY))
        .unwrap_or(f64::INFINITY);
    out.nonzero("control.tau_negated_intertwiner", v, CONTROL_THRESHOLD);
    let mut shifted_tau = p.tau.clone();
    shifted_tau.rotate_left(1);
    let v = pair_from_tau(g, s, &ds, &shifted_tau, FMode::Theorem)
        .map(|b| verify_braid_and_rho(&b, &t, s, &ds).value("spin.braid").unwrap_or(f64::INFINITY))
        .unwrap_or(f64::INFINITY);
    out.nonzero("control.tau_shifted_braid", v, CONTROL_THRESHOLD);

    let f = Closed::from_graph(p, g);
    let flip = verify_matrix_eq(g, &f, &ds, true).value("combin.matrix_eq.a_form").unwrap_or(0.0);
    out.nonzero("control.matrix_eq_flip", flip, CONTROL_THRESHOLD);

    if let Ok(r) = nomura_membership(&permuted_control(&bp.w, g, seed), g) {
        out.nonzero("control.nomura_permuted", r, CONTROL_THRESHOLD);
    }
    if brute {
        if let Ok(unit) = pair_from_tau(g, s, &ds, &p.tau, FMode::Explicit(C64::new(1.0, 0.0))) {
            let n = g.n as f64;
            let r = star_triangle_residual(&unit.w, C64::new(n.sqrt(), 0.0)).unwrap_or(f64::INFINITY);
            out.nonzero("control.unit_f.type3", r, CONTROL_THRESHOLD);
            let scaled = normalization_checks(&unit, g.n, true);
            out.residual("control.unit_f.type3_scaled", scaled.value("spin.type3_scaled").unwrap_or(f64::INFINITY));
        }
    }
    out
}

/// Analyze a graph produced by `make`, recording construction errors in the report.
pub fn analyze_input(input: &str, make: impl FnOnce() -> Result<DRGraph>, opts: &AnalyzeOptions) -> VerificationReport {
    match make() {
        Ok(g) => analyze(&g, input, opts),
        Err(e) => {
            let mut r = VerificationReport::failed(input, opts, "graph", &e);
            r.finalize();
            r
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, hypercube_graph};

    #[test]
    fn c7_passes() {
        let g = cycle_graph(7).unwrap();
        let r = analyze(&g, "cycle 7", &AnalyzeOptions::default());
        let fails: Vec<_> = r.failures().into_iter().map(|(s, c)| format!("{s} {} {:?} {:?}", c.name, c.value, c.note)).collect();
        assert_eq!(r.verdict, Verdict::Pass, "{fails:#?}");
        assert!(r.accepted().all(|v| v.vertices[0].z_norm.unwrap() < 1e-10));
    }

    #[test]
    fn json_round_trip() {
        let g = cycle_graph(8).unwrap();
        let r = analyze(&g, "cycle 8", &AnalyzeOptions::default());
        let back = VerificationReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn hypercube_not_qracah() {
        let g = hypercube_graph(4).unwrap();
        let r = analyze(&g, "hypercube 4", &AnalyzeOptions::default());
        assert_eq!(r.verdict, Verdict::Fail);
        let e = r.error.as_ref().unwrap();
        assert_eq!((e.stage.as_str(), e.kind.as_str()), ("qracah", "NotQRacah"));
        assert!(r.checks.all_pass(1e-8));
    }

    #[test]
    fn impossible_tolerance_fails() {
        let g = cycle_graph(7).unwrap();
        let opts = AnalyzeOptions { tolerance: 1e-20, ..Default::default() };
        assert_eq!(analyze(&g, "cycle 7", &opts).verdict, Verdict::Fail);
    }
}
