//! Every example runs to completion.

#[path = "../examples/generate_phantom.rs"]
mod generate_phantom;

#[test]
fn generate_phantom_runs() {
    generate_phantom::run().unwrap();
}

#[path = "../examples/motion_search.rs"]
mod motion_search;

#[test]
fn motion_search_runs() {
    motion_search::run().unwrap();
}

#[path = "../examples/temporal_lifting.rs"]
mod temporal_lifting;

#[test]
fn temporal_lifting_runs() {
    temporal_lifting::run().unwrap();
}

#[path = "../examples/wavelet_pyramid.rs"]
mod wavelet_pyramid;

#[test]
fn wavelet_pyramid_runs() {
    wavelet_pyramid::run().unwrap();
}

#[path = "../examples/resort_decisions.rs"]
mod resort_decisions;

#[test]
fn resort_decisions_runs() {
    resort_decisions::run().unwrap();
}

#[path = "../examples/tier1_rates.rs"]
mod tier1_rates;

#[test]
fn tier1_rates_runs() {
    tier1_rates::run().unwrap();
}

#[path = "../examples/container_roundtrip.rs"]
mod container_roundtrip;

#[test]
fn container_roundtrip_runs() {
    container_roundtrip::run().unwrap();
}

#[path = "../examples/rate_report.rs"]
mod rate_report;

#[test]
fn rate_report_runs() {
    rate_report::run().unwrap();
}

#[path = "../examples/export_planes.rs"]
mod export_planes;

#[test]
fn export_planes_runs() {
    export_planes::run().unwrap();
}
