use proptest::prelude::*;
use rscc_core::chain::sample_path_with_maps;
use rscc_core::grid::{
    estimate_julia_grid, estimate_path_julia_grid, pixel_measure, radial_profile, GridParams, GridWindow, MembershipGrid, PixelLabel,
};
use rscc_core::radial::RadialModel;
use rscc_core::scenario::{builtin, embed_gdms, GdmsEdge};
use rscc_core::{MapSpec, SpherePoint, StatePoint};

fn f() -> MapSpec {
    MapSpec::monomial(1.0, 2).unwrap()
}

fn g() -> MapSpec {
    MapSpec::monomial(0.5, 2).unwrap()
}

fn julia_pixels(grid: &MembershipGrid) -> impl Iterator<Item = usize> + '_ {
    grid.labels.iter().enumerate().filter(|(_, l)| **l == PixelLabel::JuliaCandidate).map(|(p, _)| p)
}

/// Checks the labels against the circle `|z| = r`: Julia only within `band`
/// pixels of it, Fatou with the right fate farther out.
fn assert_circle(grid: &MembershipGrid, r: f64, band: f64) {
    let w = grid.window;
    let px = w.pixel_width();
    for (p, l) in grid.labels.iter().enumerate() {
        let m = w.pixel_center(p).norm();
        let off = (m - r) / px;
        match l {
            PixelLabel::JuliaCandidate => assert!(off.abs() <= band, "Julia pixel {off} px from the circle"),
            _ if off < -band => assert_eq!(*l, PixelLabel::FatouAttracting, "pixel at |z| = {m}"),
            _ if off > band => assert_eq!(*l, PixelLabel::FatouEscaping, "pixel at |z| = {m}"),
            _ => {}
        }
    }
    assert!(julia_pixels(grid).count() > 0);
}

#[test]
fn frozen_state_gives_the_unit_circle() {
    let spec = builtin::reinforcement(0.5).unwrap();
    let window = GridWindow::square(2.0, 256).unwrap();
    let grid = estimate_julia_grid(&spec, &StatePoint::real(0.0), &window, &GridParams::defaults(&window)).unwrap();
    assert_circle(&grid, 1.0, 2.0);
}

#[test]
fn constant_path_bands() {
    let window = GridWindow::square(2.5, 256).unwrap();
    let off = window.default_probe_offset();
    assert_circle(&estimate_path_julia_grid(&vec![f(); 48], &window, off, 0.5).unwrap(), 1.0, 2.0);
    assert_circle(&estimate_path_julia_grid(&vec![g(); 48], &window, off, 0.5).unwrap(), 2.0, 2.0);
}

#[test]
fn absorbing_annulus_state() {
    let spec = builtin::jump_annulus();
    let window = GridWindow::square(2.5, 256).unwrap();
    let grid = estimate_julia_grid(&spec, &StatePoint::extra("2"), &window, &GridParams::defaults(&window)).unwrap();
    let px = window.pixel_width();
    for p in julia_pixels(&grid) {
        let m = window.pixel_center(p).norm();
        assert!(m >= 1.0 - 2.0 * px && m <= 2.0 + 2.0 * px, "Julia pixel at |z| = {m}");
    }
    // sampled words flag only part of the annulus, but every radius in it
    for (r, frac) in radial_profile(&grid) {
        if r > 1.0 + 3.0 * px && r < 2.0 - 3.0 * px {
            assert!(frac > 0.0, "no Julia pixel at radius {r}");
        }
    }
}

#[test]
fn constant_maps_have_no_julia_pixels() {
    let c = MapSpec::Constant(SpherePoint::new(0.5, 0.5));
    let spec = embed_gdms(1, &[GdmsEdge { from: 0, to: 0, maps: vec![(c, 1.0)] }]).unwrap();
    let window = GridWindow::square(2.0, 64).unwrap();
    let grid = estimate_julia_grid(&spec, &StatePoint::discrete("v0"), &window, &GridParams::defaults(&window)).unwrap();
    assert_eq!(pixel_measure(&grid, PixelLabel::JuliaCandidate), 0.0);
}

#[test]
fn path_julia_pixels_lie_in_the_statewise_annulus() {
    let spec = builtin::jump_annulus();
    let set = RadialModel::new(&spec, 1e-9).unwrap().julia_at(&StatePoint::rung(1)).unwrap().clone();
    let window = GridWindow::square(2.5, 128).unwrap();
    let px = window.pixel_width();
    for seed in 0..4 {
        let path = sample_path_with_maps(&spec, &StatePoint::rung(1), 48, seed).unwrap();
        let grid = estimate_path_julia_grid(&path.maps, &window, window.default_probe_offset(), 0.5).unwrap();
        for p in julia_pixels(&grid) {
            let m = window.pixel_center(p).norm();
            let (lo, hi) = (set.min().unwrap().exp(), set.max().unwrap().exp());
            assert!(m >= lo - 2.0 * px && m <= hi + 2.0 * px, "seed {seed}: |z| = {m}");
        }
    }
}

#[test]
fn path_measure_shrinks_with_resolution() {
    let spec = builtin::jump_annulus();
    let path = sample_path_with_maps(&spec, &StatePoint::rung(1), 48, 7).unwrap();
    let mut last = f64::INFINITY;
    for res in [64, 128, 256] {
        let window = GridWindow::square(2.5, res).unwrap();
        let grid = estimate_path_julia_grid(&path.maps, &window, window.default_probe_offset(), 0.5).unwrap();
        let m = pixel_measure(&grid, PixelLabel::JuliaCandidate);
        assert!(m * res as f64 <= 8.0, "res {res}: {m}");
        assert!(m < last);
        last = m;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn deeper_paths_only_add_julia_pixels(seed in any::<u64>()) {
        let spec = builtin::jump_annulus();
        let path = sample_path_with_maps(&spec, &StatePoint::rung(1), 48, seed).unwrap();
        let window = GridWindow::square(2.5, 48).unwrap();
        let off = window.default_probe_offset();
        let short = estimate_path_julia_grid(&path.maps[..24], &window, off, 0.5).unwrap();
        let long = estimate_path_julia_grid(&path.maps, &window, off, 0.5).unwrap();
        for p in julia_pixels(&short) {
            prop_assert_eq!(long.labels[p], PixelLabel::JuliaCandidate);
        }
    }

    #[test]
    fn sampled_grid_is_reproducible(seed in any::<u64>()) {
        let spec = builtin::gdms_demo();
        let window = GridWindow::square(2.5, 24).unwrap();
        let params = GridParams { seed, ..GridParams::defaults(&window) };
        let a = estimate_julia_grid(&spec, &StatePoint::discrete("v0"), &window, &params).unwrap();
        let b = estimate_julia_grid(&spec, &StatePoint::discrete("v0"), &window, &params).unwrap();
        prop_assert_eq!(a, b);
    }
}
