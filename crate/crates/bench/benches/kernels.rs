use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oamlis_core::modes::{coupling_matrix, SurfaceGrid};
use oamlis_core::numerics::{bessel_j, bessel_j_orders, svd_spectrum};
use oamlis_core::oam::{default_radial_grid, rx_field_radial, DEFAULT_RADIAL_SAMPLES};
use oamlis_core::Scenario;

const LAMBDA: f64 = 0.1;

fn bessel(c: &mut Criterion) {
    let mut g = c.benchmark_group("bessel");
    for order in [0, 5, 25] {
        g.bench_with_input(BenchmarkId::new("single", order), &order, |b, &n| {
            b.iter(|| bessel_j(n, black_box(37.3)).unwrap())
        });
    }
    let mut table = vec![0.0; 65];
    g.bench_function("orders_0_to_64", |b| b.iter(|| bessel_j_orders(black_box(37.3), &mut table)));
    g.finish();
}

fn coupling(c: &mut Criterion) {
    let mut g = c.benchmark_group("coupling_matrix");
    g.sample_size(10);
    for t in [5.0, 10.0] {
        let s = Scenario::normalized(t, t, 50.0, LAMBDA).unwrap();
        let grid_t = SurfaceGrid::disk_lattice(s.tx_radius(), LAMBDA / 2.0).unwrap();
        let grid_r = SurfaceGrid::disk_lattice(s.rx_radius(), LAMBDA / 2.0).unwrap();
        g.bench_with_input(BenchmarkId::new("assemble", grid_t.len()), &(), |b, _| {
            b.iter(|| coupling_matrix(&grid_t, &grid_r, s.distance(), s.wavenumber()).unwrap())
        });
    }
    g.finish();
}

fn svd(c: &mut Criterion) {
    let mut g = c.benchmark_group("svd");
    g.sample_size(10);
    for t in [5.0, 10.0] {
        let s = Scenario::normalized(t, t, 50.0, LAMBDA).unwrap();
        let grid = SurfaceGrid::disk_lattice(s.tx_radius(), LAMBDA / 2.0).unwrap();
        let h = coupling_matrix(&grid, &grid, s.distance(), s.wavenumber()).unwrap();
        g.bench_with_input(BenchmarkId::new("singular_values", grid.len()), &h, |b, h| {
            b.iter(|| svd_spectrum(h).unwrap())
        });
    }
    g.finish();
}

fn field(c: &mut Criterion) {
    let mut g = c.benchmark_group("field_synthesis");
    let s = Scenario::normalized(10.0, 10.0, 100.0, LAMBDA).unwrap();
    let radii = default_radial_grid(s.rx_radius(), DEFAULT_RADIAL_SAMPLES);
    for (index, focused) in [(1, true), (8, true), (8, false)] {
        let id = format!("n{index}_{}", if focused { "focused" } else { "uniform" });
        g.bench_function(id, |b| b.iter(|| rx_field_radial(index, &s, focused, &radii).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, bessel, coupling, svd, field);
criterion_main!(benches);
