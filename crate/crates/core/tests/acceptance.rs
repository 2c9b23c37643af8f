//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.
//!
//! Reference values come from small oracles in this file (direct cut-star
//! counts, brute-force dense states) or are the fixed literature values
//! written inline.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_tee::dense::{dense_entropy, dense_from_stabilizers, fidelity, random_density, trace_distance, verify_le_ge};
use toric_tee::entropy::{cond_mutual_info, entropy, entropy_fattal, entropy_restricted_rank};
use toric_tee::excitations::{condensation_check, monodromy_norm, syndrome, x_membrane, z_string, CondensationKind};
use toric_tee::graph::{build_restriction_graph, reduce, reduce_randomized};
use toric_tee::pauli::random_stabilizer_group;
use toric_tee::region::{annulus, area_report, box_region, partition_line, partition_point, Box3, PartitionParams, Region};
use toric_tee::{
    build_toric_code, fix_ground_state, gamma_line, gamma_point, Bits, Boundary, CodeLattice, Face, GeneratorKind,
    LatticeSpec, PauliWord, StabilizerState,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

/// Stars acting on both sides of the cut, counted directly.
fn oracle_area(l: &CodeLattice, r: &Region) -> usize {
    l.generators()
        .iter()
        .filter(|g| g.kind == GeneratorKind::Star)
        .filter(|g| {
            let inside = g.support.iter().filter(|&&q| r.contains(q)).count();
            inside > 0 && inside < g.support.len()
        })
        .count()
}

fn ground(spec: LatticeSpec) -> (Arc<CodeLattice>, StabilizerState) {
    let l = Arc::new(build_toric_code(&spec).unwrap());
    let s = toric_tee::fix_ground_state_with(l.clone(), Default::default()).unwrap();
    (l, s)
}

fn both_engines(s: &StabilizerState, r: &Region) -> Result<usize, String> {
    let a = entropy_restricted_rank(s, r).map_err(|e| e.to_string())?.entropy_bits;
    let b = entropy_fattal(s, r).map_err(|e| e.to_string())?.entropy_bits;
    ensure!(a == b, "engines disagree: rank {a}, pairs {b}");
    Ok(a)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let (l, s) = ground(LatticeSpec::torus_3d(8).unwrap());
    let mut shapes = Vec::new();
    for side in 2..=4i64 {
        shapes.push([side; 3]);
    }
    shapes.extend([[2, 3, 4], [4, 2, 3], [3, 4, 2]]);
    for d in shapes {
        let r = box_region(&l, &Box3::cells([1, 2, 1], [1 + d[0], 2 + d[1], 1 + d[2]]));
        let area = oracle_area(&l, &r);
        ensure!(area_report(&l, &r).area == area, "area_report disagrees with direct count for {d:?}");
        let bits = both_engines(&s, &r)?;
        ensure!(bits == area - 1, "cuboid {d:?}: S = {bits}, A_R − 1 = {}", area - 1);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1} s");
    Ok(format!("S = A_R − 1 for 6 cuboids, {secs:.2} s"))
}

fn criterion_2() -> Check {
    let (l, s) = ground(LatticeSpec::torus_3d(8).unwrap());
    let shells = [
        (Box3::cells([1; 3], [7; 3]), Box3::cells([3; 3], [5; 3])),
        (Box3::cells([0; 3], [7; 3]), Box3::cells([2; 3], [5; 3])),
    ];
    let mut out = Vec::new();
    for (outer, inner) in shells {
        let r = annulus(&l, outer, inner);
        let area = oracle_area(&l, &r);
        let bits = both_engines(&s, &r)?;
        ensure!(bits + 2 == area, "shell: S = {bits}, A_R = {area}");
        ensure!(area_report(&l, &r).components_total == 2, "shell boundary should have 2 components");
        out.push(format!("{bits} = {area} − 2"));
    }
    Ok(out.join(", "))
}

fn criterion_3() -> Check {
    let mut out = Vec::new();
    for (bottom, topo) in [(Boundary::Smooth, 1), (Boundary::Rough, 0)] {
        let (l, s) = ground(LatticeSpec::slab_3d(10, 10, 8, bottom, Boundary::Smooth).unwrap());
        for side in [2i64, 3, 4] {
            let r = box_region(&l, &Box3::cells([2, 3, 0], [2 + side, 3 + side, side]));
            let area = oracle_area(&l, &r);
            let bits = both_engines(&s, &r)?;
            ensure!(bits + topo == area, "{bottom:?} side {side}: S = {bits}, A_R = {area}");
        }
        out.push(format!("{bottom:?}: S = A_R − {topo}"));
    }
    Ok(out.join("; "))
}

fn criterion_4() -> Check {
    let settings = [
        PartitionParams { wall: 1, core: 1, depth: 1, height: 1, offset: [2, 2] },
        PartitionParams { wall: 2, core: 2, depth: 2, height: 2, offset: [3, 3] },
        PartitionParams { wall: 1, core: 3, depth: 2, height: 2, offset: [2, 3] },
        PartitionParams { wall: 2, core: 1, depth: 3, height: 3, offset: [3, 2] },
        PartitionParams { wall: 3, core: 2, depth: 1, height: 1, offset: [1, 1] },
    ];
    // (face, γ_point, γ_line, N for the point partition, N for the line partition)
    let table = [
        (Boundary::Smooth, 1, 0, [1, 1, 1, 2], [1, 1, 1, 1]),
        (Boundary::Rough, 0, 1, [0, 0, 0, 0], [0, 0, 1, 0]),
    ];
    for (bottom, gp, gl, np, nl) in table {
        let (l, s) = ground(LatticeSpec::slab_3d(14, 14, 10, bottom, Boundary::Smooth).unwrap());
        for p in &settings {
            let point = gamma_point(&s, Face::Z_LOW, p).map_err(|e| e.to_string())?;
            let line = gamma_line(&s, Face::Z_LOW, p).map_err(|e| e.to_string())?;
            ensure!(point.is_consistent() && line.is_consistent(), "report terms inconsistent");
            ensure!(point.value_bits == gp, "{bottom:?} {p:?}: γ_point = {}", point.value_bits);
            ensure!(line.value_bits == gl, "{bottom:?} {p:?}: γ_line = {}", line.value_bits);
            for (part, want) in [
                (partition_point(&l, Face::Z_LOW, p).unwrap(), np),
                (partition_line(&l, Face::Z_LOW, p).unwrap(), nl),
            ] {
                let regions = [part.bc(), part.cd(), part.b.clone(), part.d.clone()];
                for (r, &w) in regions.iter().zip(&want) {
                    let rep = area_report(&l, r);
                    ensure!(rep.components_rough_free == w, "{bottom:?} {p:?}: N = {} want {w}", rep.components_rough_free);
                    let bits = entropy(&s, r).unwrap();
                    ensure!(rep.area - w == bits, "{bottom:?}: S = {bits} but A_R − N_R = {}", rep.area - w);
                }
            }
        }
    }
    Ok(format!("smooth (1, 0), rough (0, 1) over {} settings; N lists match", settings.len()))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let n = rng.gen_range(1..=24);
        let gens = random_stabilizer_group(n, &mut rng);
        let s = StabilizerState::new(n, gens).unwrap();
        let mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let r = Region::from_mask(Bits::from_bools(&mask));
        both_engines(&s, &r).map_err(|e| format!("random state {case}: {e}"))?;
    }
    let mut graphs = 0;
    for bottom in [None, Some(Boundary::Smooth), Some(Boundary::Rough)] {
        let spec = match bottom {
            None => LatticeSpec::torus_3d(10).unwrap(),
            Some(b) => LatticeSpec::slab_3d(10, 10, 8, b, Boundary::Smooth).unwrap(),
        };
        let (l, s) = ground(spec);
        let z0 = if bottom.is_some() { 0 } else { 2 };
        for side in 2..=5i64 {
            let r = box_region(&l, &Box3::cells([2, 2, z0], [2 + side, 2 + side, z0 + side]));
            let want = entropy_restricted_rank(&s, &r).unwrap().entropy_bits;
            let g = build_restriction_graph(&l, &r, 9).map_err(|e| e.to_string())?;
            let det = reduce(g.clone());
            let got = det.require_complete().map_err(|e| e.to_string())?;
            ensure!(got == want, "{bottom:?} side {side}: graph {got}, rank {want}");
            let loops = det.residual.log().iter().filter(|a| a.rule == toric_tee::graph::RuleKind::Loop).count();
            let expect_loops = usize::from(bottom != Some(Boundary::Rough));
            ensure!(loops == expect_loops, "{bottom:?} side {side}: {loops} loops harvested");
            for seed in 0..20 {
                let mut rr = ChaCha8Rng::seed_from_u64(seed);
                let got = reduce_randomized(g.clone(), &mut rr).require_complete().map_err(|e| e.to_string())?;
                ensure!(got == want, "{bottom:?} side {side} seed {seed}: graph {got}, rank {want}");
            }
            graphs += 1;
        }
    }
    Ok(format!("200 random states; {graphs} region graphs × 21 rule orders"))
}

fn criterion_6() -> Check {
    let (_, s) = ground(LatticeSpec::torus_2d(2).unwrap());
    let d = dense_from_stabilizers(&s).map_err(|e| e.to_string())?;
    let n = s.n_qubits();
    let mut worst: f64 = 0.0;
    for mask in 0u32..1 << n {
        let bools: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
        let r = Region::from_mask(Bits::from_bools(&bools));
        let exact = both_engines(&s, &r)? as f64;
        worst = worst.max((dense_entropy(&d, &r).unwrap() - exact).abs());
    }
    ensure!(worst < 1e-9, "dense entropies differ by {worst:e}");
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..100 {
        let dim = rng.gen_range(2..=16);
        let rho = random_density(dim, rng.gen_range(1..=dim), &mut rng);
        let sigma = random_density(dim, rng.gen_range(1..=dim), &mut rng);
        let f = fidelity(&rho, &sigma).unwrap();
        let t = trace_distance(&rho, &sigma).unwrap();
        ensure!(1.0 - f <= t + 1e-9, "pair {i}: 1 − F = {} > D = {t}", 1.0 - f);
        ensure!(t <= (1.0 - f * f).max(0.0).sqrt() + 1e-9, "pair {i}: D = {t} > √(1 − F²)");
    }
    Ok(format!("all 256 regions within {worst:.1e}; sandwich on 100 pairs"))
}

fn criterion_7() -> Check {
    let (_, s) = ground(LatticeSpec::torus_2d(2).unwrap());
    let n = s.n_qubits();
    let q = |v: &[usize]| Region::from_qubits(n, v.iter().copied()).unwrap();
    let triples = [
        (q(&[0, 1]), q(&[2, 3, 4, 5]), q(&[6, 7])),
        (q(&[0]), q(&[1, 2, 3]), q(&[4, 5])),
        (q(&[0, 2]), q(&[1, 3, 5, 7]), q(&[4, 6])),
    ];
    let mut ops: Vec<PauliWord> = Vec::new();
    for a in 0..n {
        ops.push(PauliWord::z_on(n, [a]));
        ops.push(PauliWord::x_on(n, [a]));
        for b in a + 1..n {
            ops.push(PauliWord::z_on(n, [a, b]));
        }
    }
    let (mut met, mut unmet, mut nontrivial) = (0, 0, 0);
    let mut min_slack = f64::INFINITY;
    let mut check = |s: &StabilizerState, u: &PauliWord, t: &(Region, Region, Region)| -> Result<(), String> {
        let rep = verify_le_ge(s, u, &t.0, &t.1, &t.2).map_err(|e| e.to_string())?;
        if !rep.premise_met {
            unmet += 1;
            ensure!(rep.holds.is_none(), "premise-unmet instance reported as a verdict");
            return Ok(());
        }
        met += 1;
        let (lhs, rhs) = (rep.lhs.unwrap(), rep.rhs.unwrap());
        ensure!(rep.holds == Some(true), "violation: {lhs} > {rhs}");
        nontrivial += usize::from(lhs > 1e-9);
        min_slack = min_slack.min(rhs - lhs);
        Ok(())
    };
    for t in &triples {
        for u in &ops {
            check(&s, u, t)?;
        }
    }
    // Random graph states with random signs and random Pauli errors.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let m = rng.gen_range(3..=9);
        let mut adj = vec![vec![false; m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let e = rng.gen_bool(0.4);
                adj[a][b] = e;
                adj[b][a] = e;
            }
        }
        let gens = (0..m)
            .map(|a| {
                let x = Bits::from_indices(m, [a]);
                let z = Bits::from_indices(m, (0..m).filter(|&b| adj[a][b]));
                PauliWord::from_bits(x, z, rng.gen_bool(0.5)).unwrap()
            })
            .collect();
        let st = StabilizerState::new(m, gens).unwrap();
        let labels: Vec<u8> = (0..m).map(|_| rng.gen_range(0..4)).collect();
        let part = |k: u8| Region::from_qubits(m, (0..m).filter(|&j| labels[j] == k)).unwrap();
        let x = Bits::from_bools(&(0..m).map(|_| rng.gen_bool(0.3)).collect::<Vec<_>>());
        let z = Bits::from_bools(&(0..m).map(|_| rng.gen_bool(0.3)).collect::<Vec<_>>());
        let u = PauliWord::from_bits(x, z, false).unwrap();
        check(&st, &u, &(part(0), part(1), part(2)))?;
    }
    ensure!(met >= 5, "only {met} instances met the premise");
    Ok(format!("{met} premise-met instances hold ({nontrivial} with D > 0, min slack {min_slack:.1e}); {unmet} reported premise unmet"))
}

fn criterion_8() -> Check {
    let table = [
        (Boundary::Smooth, false, true),
        (Boundary::Rough, true, false),
    ];
    for (bottom, point, line) in table {
        let (_, s) = ground(LatticeSpec::slab_3d(8, 8, 6, bottom, Boundary::Smooth).unwrap());
        let p = condensation_check(&s, Face::Z_LOW, CondensationKind::Point).map_err(|e| e.to_string())?;
        let l = condensation_check(&s, Face::Z_LOW, CondensationKind::Line).map_err(|e| e.to_string())?;
        ensure!((p, l) == (point, line), "{bottom:?}: point {p}, line {l}");
    }
    // Smooth floor: a Z-string leaves a half ball of stars on the floor
    // through its dome. The dome's X-membrane is the product of those stars.
    let (lat, s) = ground(LatticeSpec::slab_3d(12, 12, 8, Boundary::Smooth, Boundary::Smooth).unwrap());
    let n = lat.n_qubits();
    let mut dome = PauliWord::identity(n);
    for x in 4..7 {
        for y in 4..7 {
            for z in 0..2 {
                dome.mul_assign(&lat.generator(lat.star_at([x, y, z]).unwrap()).word);
            }
        }
    }
    let v = x_membrane(&lat, &dome.support().iter_ones().collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    ensure!(syndrome(&s, &v.operator).unwrap().is_empty(), "dome is not trivial on the ground state");
    let path: Vec<usize> = (5..9).map(|x| lat.edge_index([x, 5, 0], 0).unwrap()).collect();
    let u = z_string(&lat, &path).map_err(|e| e.to_string())?;
    let norm = monodromy_norm(&s, &u.operator, &v.operator).map_err(|e| e.to_string())?;
    ensure!(norm == 2.0, "monodromy norm {norm}");
    let gp = gamma_point(&s, Face::Z_LOW, &PartitionParams::default()).unwrap().value_bits;
    ensure!(gp == 1, "γ_point = {gp}");
    Ok("condensation table matches; ‖[U, V]ψ‖ = 2 with γ_point = 1".into())
}

fn criterion_9() -> Check {
    let specs = [
        LatticeSpec::torus_2d(3).unwrap(),
        LatticeSpec::torus_3d(3).unwrap(),
        LatticeSpec::slab_3d(3, 3, 3, Boundary::Smooth, Boundary::Rough).unwrap(),
        LatticeSpec::slab_3d(3, 3, 3, Boundary::Rough, Boundary::Rough).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for spec in specs {
        let l = build_toric_code(&spec).unwrap();
        let s = fix_ground_state(&l).unwrap();
        let n = s.n_qubits();
        for t in 0..100 {
            let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let part = |k: u8| Region::from_qubits(n, (0..n).filter(|&j| labels[j] == k)).unwrap();
            let v = cond_mutual_info(&s, &part(0), &part(1), &part(2)).unwrap();
            ensure!(v >= 0, "triple {t}: I(A:C|B) = {v}");
        }
    }
    Ok("I(A:C|B) ≥ 0 on 100 triples × 4 lattices".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("bulk cuboids S = A_R − 1", criterion_1),
        ("hollow shell S = A_R − 2", criterion_2),
        ("boundary balls S = A_R − N_R", criterion_3),
        ("invariant table", criterion_4),
        ("engine triangle", criterion_5),
        ("dense certification", criterion_6),
        ("local-to-global inequality", criterion_7),
        ("excitation contract", criterion_8),
        ("strong subadditivity", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
