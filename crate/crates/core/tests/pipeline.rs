use std::f64::consts::PI;

use drgspin::{
    analyze, cycle_graph, evaluate_candidate, fit_qracah, hypercube_graph, scan, spectral_data, AnalyzeOptions,
    GridSpec, Status, Verdict, VerificationReport, C64,
};

fn status(r: &VerificationReport, name: &str) -> Vec<Status> {
    r.all_checks().into_iter().filter(|(_, c)| c.name == name).map(|(_, c)| c.status).collect()
}

#[test]
fn c7_fit_has_paper_branch() {
    let g = cycle_graph(7).unwrap();
    let s = spectral_data(&g).unwrap();
    let q = C64::from_polar(1.0, PI / 7.0);
    let fits = fit_qracah(&s.theta).unwrap();
    let p = fits.iter().find(|p| (p.q - q).norm() < 1e-9 && (p.a + q.powi(-4)).norm() < 1e-9).unwrap();
    assert!((p.tau[1] + q.inv()).norm() < 1e-12);
    for i in 0..=3 {
        let want = 2.0 * (2.0 * PI * i as f64 / 7.0).cos();
        assert!((p.theta(i) - want).norm() < 1e-12);
    }
}

#[test]
fn c8_rho_maps_e_to_estar() {
    let g = cycle_graph(8).unwrap();
    let r = analyze(&g, "c8", &AnalyzeOptions::default());
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(status(&r, "spin.rho_e").iter().all(|&s| s == Status::Pass));
    assert!(status(&r, "combin.end_split").iter().all(|&s| s == Status::Skipped));
}

#[test]
fn every_vertex_agrees() {
    let g = cycle_graph(9).unwrap();
    let opts = AnalyzeOptions { all_vertices: true, ..Default::default() };
    let r = analyze(&g, "c9", &opts);
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.accepted().all(|v| v.vertices.len() == 9));
    assert!(status(&r, "spin.base_vertex_independence").iter().all(|&s| s == Status::Pass));
}

#[test]
fn braid_substitutes_when_bruteforce_disabled() {
    let g = cycle_graph(7).unwrap();
    let opts = AnalyzeOptions { type3_bruteforce: false, ..Default::default() };
    let r = analyze(&g, "c7", &opts);
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(status(&r, "spin.w.type3").iter().all(|&s| s == Status::Skipped));
    assert!(r.accepted().all(|v| v.spin.as_ref().unwrap().is_spin_model));
}

#[test]
fn hypercube_reports_not_qracah() {
    let g = hypercube_graph(4).unwrap();
    let r = analyze(&g, "q4", &AnalyzeOptions::default());
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.error.as_ref().unwrap().kind, "NotQRacah");
    assert!(r.variants.is_empty());
    let text = r.render_text();
    assert!(text.contains("NotQRacah") && text.contains("verdict: FAIL"));
}

#[test]
fn bad_base_vertex() {
    let g = cycle_graph(7).unwrap();
    let opts = AnalyzeOptions { base_vertex: 7, ..Default::default() };
    let r = analyze(&g, "c7", &opts);
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.error.unwrap().kind, "Degenerate");
}

#[test]
fn report_json_round_trip() {
    let g = cycle_graph(7).unwrap();
    let r = analyze(&g, "c7", &AnalyzeOptions { all_vertices: true, ..Default::default() });
    let text = r.to_json();
    let back = VerificationReport::from_json(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_json(), text);
}

#[test]
fn scan_candidates_pass_counting_filters() {
    let spec = GridSpec { unit_circle_max: 10, real_q: None, ..GridSpec::defaults(4) };
    let out = scan(4, &spec).unwrap();
    let c8 = out.iter().find(|x| x.n_implied == 8).unwrap();
    let rep = evaluate_candidate(c8).unwrap();
    assert!(rep.feasible);
    assert!(rep.tags.iter().any(|t| t == "a^2=-1"));
}

#[test]
fn scan_restricted_grid_excludes_c7() {
    let spec = GridSpec { unit_circle_max: 5, real_q: None, ..GridSpec::defaults(3) };
    assert!(!scan(3, &spec).unwrap().iter().any(|x| x.n_implied == 7));
}
