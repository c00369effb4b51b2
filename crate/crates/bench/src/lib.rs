//! Fixtures shared by the benchmarks.

use drgspin::{cycle_graph, dual_structure, fit_qracah, spectral_data, DRGraph, DualStructure, QRacahParams, SpectralData};

/// A cycle with its spectral data, base-vertex structure and first fit branch.
pub struct Fixture {
    pub g: DRGraph,
    pub s: SpectralData,
    pub ds: DualStructure,
    pub p: QRacahParams,
}

pub fn cycle_fixture(n: usize) -> Fixture {
    let g = cycle_graph(n).expect("cycle");
    let s = spectral_data(&g).expect("spectral data");
    let ds = dual_structure(&g, &s, 0).expect("dual structure");
    let p = fit_qracah(&s.theta).expect("q-Racah fit").remove(0);
    Fixture { g, s, ds, p }
}
