//! Fixed reference targets: the boundary invariant table, component counts
//! of the partitions, area-law offsets, condensation rules and graph-rule
//! agreement.

use std::sync::Arc;

use rayon::prelude::*;
use toric_tee::entropy::entropy;
use toric_tee::excitations::condensation_check;
use toric_tee::region::{annulus, partition_line, partition_point};
use toric_tee::{
    area_report, box_region, build_restriction_graph, build_toric_code, entropy_fattal, fix_ground_state_with,
    gamma_2d, gamma_line, gamma_point, reduce, Boundary, Box3, CodeLattice, CondensationKind, Face, LatticeSpec,
    Partition2dParams, PartitionParams, PauliWord, Region, StabilizerState,
};

use crate::report::TargetRow;

fn ground(spec: LatticeSpec) -> (Arc<CodeLattice>, StabilizerState) {
    let l = Arc::new(build_toric_code(&spec).expect("reference lattice builds"));
    let s = fix_ground_state_with(l.clone(), Default::default()).expect("ground state");
    (l, s)
}

fn slab(bottom: Boundary) -> (Arc<CodeLattice>, StabilizerState) {
    ground(LatticeSpec::slab_3d(14, 14, 10, bottom, Boundary::Smooth).expect("valid spec"))
}

fn row(name: &str, expected: impl ToString, observed: impl ToString) -> TargetRow {
    let (expected, observed) = (expected.to_string(), observed.to_string());
    TargetRow {
        passed: expected == observed,
        name: name.into(),
        expected,
        observed,
    }
}

fn fail(name: &str, expected: impl ToString, e: impl ToString) -> TargetRow {
    TargetRow {
        name: name.into(),
        expected: expected.to_string(),
        observed: format!("error: {}", e.to_string()),
        passed: false,
    }
}

fn label(b: Boundary) -> &'static str {
    match b {
        Boundary::Smooth => "smooth",
        Boundary::Rough => "rough",
        Boundary::Periodic => "periodic",
    }
}

/// γ_point and γ_line at one face type, for the default partition and a
/// grown one.
fn gamma_rows(bottom: Boundary, point: i64, line: i64) -> Vec<TargetRow> {
    let (_, s) = slab(bottom);
    let mut out = Vec::new();
    for (tag, p) in [("", PartitionParams::default()), (", grown", PartitionParams::default().dilated())] {
        let name = format!("gamma_point {}{tag}", label(bottom));
        out.push(match gamma_point(&s, Face::Z_LOW, &p) {
            Ok(r) => row(&name, point, r.value_bits),
            Err(e) => fail(&name, point, e),
        });
        let name = format!("gamma_line {}{tag}", label(bottom));
        out.push(match gamma_line(&s, Face::Z_LOW, &p) {
            Ok(r) => row(&name, line, r.value_bits),
            Err(e) => fail(&name, line, e),
        });
    }
    out
}

fn counts(l: &CodeLattice, regions: [Region; 4]) -> String {
    let n = regions.map(|r| area_report(l, &r).components_rough_free);
    format!("({}, {}, {}, {})", n[0], n[1], n[2], n[3])
}

/// (N_BC, N_CD, N_B, N_D) for both partitions at one face type.
fn count_rows(bottom: Boundary, point: &str, line: &str) -> Vec<TargetRow> {
    let (l, _) = slab(bottom);
    let p = PartitionParams::default();
    let mut out = Vec::new();
    let name = format!("point partition components {}", label(bottom));
    out.push(match partition_point(&l, Face::Z_LOW, &p) {
        Ok(q) => row(&name, point, counts(&l, [q.bc(), q.cd(), q.b, q.d])),
        Err(e) => fail(&name, point, e),
    });
    let name = format!("line partition components {}", label(bottom));
    out.push(match partition_line(&l, Face::Z_LOW, &p) {
        Ok(q) => row(&name, line, counts(&l, [q.bc(), q.cd(), q.b, q.d])),
        Err(e) => fail(&name, line, e),
    });
    out
}

fn gamma_2d_row() -> Vec<TargetRow> {
    let (_, s) = ground(LatticeSpec::torus_2d(10).expect("valid spec"));
    let name = "2D combination (two copies of gamma)";
    vec![match gamma_2d(&s, &Partition2dParams::default()) {
        Ok(r) => row(name, 2, r.value_bits),
        Err(e) => fail(name, 2, e),
    }]
}

/// `S − A_R` for cuboids and a hollow shell on the 3-torus, and for balls on
/// a smooth and a rough floor.
fn area_rows() -> Vec<TargetRow> {
    let offset = |l: &CodeLattice, s: &StabilizerState, r: &Region| -> i64 {
        entropy(s, r).expect("entropy") as i64 - area_report(l, r).area as i64
    };
    let (l, s) = ground(LatticeSpec::torus_3d(8).expect("valid spec"));
    let cubes: Vec<i64> = (2..=4)
        .map(|side| offset(&l, &s, &box_region(&l, &Box3::cells([1, 2, 1], [1 + side, 2 + side, 1 + side]))))
        .collect();
    let shell = annulus(&l, Box3::cells([1; 3], [7; 3]), Box3::cells([3; 3], [5; 3]));
    let mut out = vec![
        row("bulk cuboids S - A_R", "-1 -1 -1", join(&cubes)),
        row("hollow shell S - A_R", -2, offset(&l, &s, &shell)),
    ];
    for (bottom, want) in [(Boundary::Smooth, "-1 -1 -1"), (Boundary::Rough, "0 0 0")] {
        let (l, s) = ground(LatticeSpec::slab_3d(10, 10, 8, bottom, Boundary::Smooth).expect("valid spec"));
        let got: Vec<i64> = (2..=4)
            .map(|side| offset(&l, &s, &box_region(&l, &Box3::cells([2, 3, 0], [2 + side, 3 + side, side]))))
            .collect();
        out.push(row(&format!("balls on {} floor S - A_R", label(bottom)), want, join(&got)));
    }
    out
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn condensation_rows() -> Vec<TargetRow> {
    let mut out = Vec::new();
    for (bottom, point, line) in [(Boundary::Smooth, false, true), (Boundary::Rough, true, false)] {
        let (_, s) = ground(LatticeSpec::slab_3d(8, 8, 6, bottom, Boundary::Smooth).expect("valid spec"));
        for (kind, want, tag) in [(CondensationKind::Point, point, "point"), (CondensationKind::Line, line, "line")] {
            let name = format!("{tag} half-excitation absorbed at {} face", label(bottom));
            out.push(match condensation_check(&s, Face::Z_LOW, kind) {
                Ok(got) => row(&name, want, got),
                Err(e) => fail(&name, want, e),
            });
        }
    }
    out
}

fn ebit_rows() -> Vec<TargetRow> {
    let bell = StabilizerState::new(
        2,
        vec![PauliWord::x_on(2, [0, 1]), PauliWord::z_on(2, [0, 1])],
    )
    .expect("Bell pair");
    let first = Region::from_qubits(2, [0]).expect("region");
    let mut out = vec![match entropy_fattal(&bell, &first) {
        Ok(r) => row("Bell pair anticommuting pairs", 1, r.entropy_bits),
        Err(e) => fail("Bell pair anticommuting pairs", 1, e),
    }];
    for bottom in [None, Some(Boundary::Smooth), Some(Boundary::Rough)] {
        let (spec, z0, tag) = match bottom {
            None => (LatticeSpec::torus_3d(10), 2, "bulk"),
            Some(b) => (LatticeSpec::slab_3d(10, 10, 8, b, Boundary::Smooth), 0, label(b)),
        };
        let (l, s) = ground(spec.expect("valid spec"));
        let r = box_region(&l, &Box3::cells([2, 2, z0], [5, 5, z0 + 3]));
        let name = format!("graph rules on {tag} ball");
        let want = entropy(&s, &r).expect("entropy");
        out.push(match build_restriction_graph(&l, &r, 9) {
            Ok(g) => match reduce(g).require_complete() {
                Ok(bits) => row(&name, want, bits),
                Err(e) => fail(&name, want, e),
            },
            Err(e) => fail(&name, want, e),
        });
    }
    out
}

pub fn targets() -> Vec<TargetRow> {
    let groups: Vec<fn() -> Vec<TargetRow>> = vec![
        || gamma_rows(Boundary::Smooth, 1, 0),
        || gamma_rows(Boundary::Rough, 0, 1),
        || count_rows(Boundary::Smooth, "(1, 1, 1, 2)", "(1, 1, 1, 1)"),
        || count_rows(Boundary::Rough, "(0, 0, 0, 0)", "(0, 0, 1, 0)"),
        gamma_2d_row,
        area_rows,
        condensation_rows,
        ebit_rows,
    ];
    groups.par_iter().flat_map_iter(|g| g()).collect()
}
