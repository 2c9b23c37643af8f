use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use toric_tee::{
    box_region, build_restriction_graph, build_toric_code, entropy_fattal, entropy_restricted_rank,
    fix_ground_state_with, rank_gf2, reduce, BitMatrix, Boundary, Box3, LatticeSpec, StabilizerState,
};

fn ground(spec: LatticeSpec) -> StabilizerState {
    let l = Arc::new(build_toric_code(&spec).unwrap());
    fix_ground_state_with(l, Default::default()).unwrap()
}

fn rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank_gf2");
    for l in [4usize, 6, 8] {
        let lattice = build_toric_code(&LatticeSpec::torus_3d(l).unwrap()).unwrap();
        let rows: Vec<_> = lattice.words().iter().map(|w| w.symplectic_row()).collect();
        let m = BitMatrix::from_rows(2 * lattice.n_qubits(), rows).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(l), &m, |b, m| b.iter(|| rank_gf2(black_box(m))));
    }
    group.finish();
}

fn entropy(c: &mut Criterion) {
    let s = ground(LatticeSpec::torus_3d(8).unwrap());
    let l = s.lattice().unwrap().clone();
    let mut group = c.benchmark_group("entropy_cube_on_torus8");
    for side in [2i64, 4] {
        let r = box_region(&l, &Box3::cells([1; 3], [1 + side; 3]));
        group.bench_with_input(BenchmarkId::new("restricted_rank", side), &r, |b, r| {
            b.iter(|| entropy_restricted_rank(&s, black_box(r)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fattal_pairs", side), &r, |b, r| {
            b.iter(|| entropy_fattal(&s, black_box(r)).unwrap())
        });
    }
    group.finish();
}

fn graph(c: &mut Criterion) {
    let spec = LatticeSpec::slab_3d(10, 10, 8, Boundary::Smooth, Boundary::Smooth).unwrap();
    let l = build_toric_code(&spec).unwrap();
    let mut group = c.benchmark_group("graph_reduce_smooth_ball");
    for side in [2i64, 4] {
        let r = box_region(&l, &Box3::cells([2, 2, 0], [2 + side, 2 + side, side]));
        let g = build_restriction_graph(&l, &r, 9).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(side), &g, |b, g| b.iter(|| reduce(black_box(g.clone()))));
    }
    group.finish();
}

criterion_group!(benches, rank, entropy, graph);
criterion_main!(benches);
