use std::sync::Arc;

use proptest::prelude::*;

use toric_tee::entropy::{entropy, entropy_by_rank};
use toric_tee::excitations::condensation_check;
use toric_tee::region::{annulus, partition_line, partition_point};
use toric_tee::{
    area_report, box_region, build_toric_code, fix_ground_state_with, gamma_line, gamma_point,
    independent_generating_set, Bits, Boundary, Box3, CodeLattice, CondensationKind, Face, LatticeSpec,
    LogicalChoice, PartitionParams, Region, StabilizerState,
};

fn setup(spec: LatticeSpec, choice: LogicalChoice) -> (Arc<CodeLattice>, StabilizerState) {
    let l = Arc::new(build_toric_code(&spec).unwrap());
    let s = fix_ground_state_with(l.clone(), choice).unwrap();
    (l, s)
}

fn mixed_slab() -> LatticeSpec {
    LatticeSpec::slab_3d(7, 7, 6, Boundary::Smooth, Boundary::Rough).unwrap()
}

fn boxes(l: [i64; 3]) -> impl Strategy<Value = Box3> {
    (0..l[0], 0..l[1], 0..l[2], 1..=l[0] - 2, 1..=l[1] - 2, 1..=l[2])
        .prop_map(move |(x, y, z, a, b, c)| Box3::cells([x, y, z], [x + a, y + b, (z + c).min(l[2])]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn over_complete_and_independent_sets_agree(mask in proptest::collection::vec(any::<bool>(), 81)) {
        let (l, s) = setup(LatticeSpec::torus_3d(3).unwrap(), LogicalChoice::ZLowest);
        let r = Region::from_mask(Bits::from_bools(&mask));
        let logicals = &s.generators()[s.n_qubits() - s.n_logical()..];
        let mut over = l.words();
        over.extend_from_slice(logicals);
        let mut indep: Vec<_> = independent_generating_set(&l, 1).unwrap().into_iter().map(|i| l.generator(i).word.clone()).collect();
        indep.extend_from_slice(logicals);
        let pos = r.qubits();
        let e = entropy(&s, &r).unwrap();
        prop_assert_eq!(entropy_by_rank(&over, &pos), e);
        prop_assert_eq!(entropy_by_rank(&indep, &pos), e);
    }

    #[test]
    fn cut_star_area_is_symmetric(mask in proptest::collection::vec(any::<bool>(), 81)) {
        let l = build_toric_code(&LatticeSpec::torus_3d(3).unwrap()).unwrap();
        let r = Region::from_mask(Bits::from_bools(&mask));
        prop_assert_eq!(area_report(&l, &r).area, area_report(&l, &r.complement()).area);
    }

    #[test]
    fn box_entropy_follows_area_minus_components(b in boxes([7, 7, 6])) {
        let (l, s) = setup(mixed_slab(), LogicalChoice::ZLowest);
        let r = box_region(&l, &b);
        let rep = area_report(&l, &r);
        prop_assert_eq!(entropy(&s, &r).unwrap() as i64, rep.area as i64 - rep.components_rough_free as i64);
    }

    #[test]
    fn shells_follow_area_minus_components(x in 0i64..2, t in 1i64..3) {
        let (l, s) = setup(LatticeSpec::torus_3d(9).unwrap(), LogicalChoice::ZLowest);
        let r = annulus(&l, Box3::cells([x; 3], [x + 2 * t + 2; 3]), Box3::cells([x + t; 3], [x + t + 2; 3]));
        let rep = area_report(&l, &r);
        prop_assert_eq!(rep.components_rough_free, 2);
        prop_assert_eq!(entropy(&s, &r).unwrap(), rep.area - 2);
    }

    #[test]
    fn completions_agree_on_boxes(b in boxes([7, 7, 6])) {
        let spec = mixed_slab();
        let l = Arc::new(build_toric_code(&spec).unwrap());
        let r = box_region(&l, &b);
        let values: Vec<usize> = [LogicalChoice::ZLowest, LogicalChoice::ZHighest, LogicalChoice::XType]
            .into_iter()
            .map(|c| entropy(&fix_ground_state_with(l.clone(), c).unwrap(), &r).unwrap())
            .collect();
        prop_assert!(values.windows(2).all(|w| w[0] == w[1]), "{:?}", values);
    }

    #[test]
    fn partitions_cover_disjointly(wall in 1i64..3, core in 1i64..3, depth in 1i64..3, height in 1i64..3, o in 0i64..3) {
        let l = build_toric_code(&LatticeSpec::slab_3d(10, 10, 6, Boundary::Rough, Boundary::Smooth).unwrap()).unwrap();
        let p = PartitionParams { wall, core, depth, height, offset: [o, o] };
        for face in [Face::Z_LOW, Face::Z_HIGH] {
            for part in [partition_point(&l, face, &p), partition_line(&l, face, &p)] {
                let part = part.unwrap();
                prop_assert!(part.is_valid());
                let total = part.a.len() + part.b.len() + part.c.len() + part.d.len();
                prop_assert_eq!(total, l.n_qubits());
            }
        }
    }
}

#[test]
fn invariants_track_condensation_on_every_face() {
    for choice in [LogicalChoice::ZLowest, LogicalChoice::XType] {
        for (bottom, top) in [(Boundary::Smooth, Boundary::Rough), (Boundary::Rough, Boundary::Smooth)] {
            let spec = LatticeSpec::slab_3d(12, 12, 8, bottom, top).unwrap();
            let (_, s) = setup(spec, choice);
            for face in [Face::Z_LOW, Face::Z_HIGH] {
                for p in [PartitionParams::default(), PartitionParams::default().dilated()] {
                    let gp = gamma_point(&s, face, &p).unwrap().value_bits;
                    let gl = gamma_line(&s, face, &p).unwrap().value_bits;
                    assert!(gp >= 0 && gl >= 0);
                    let cp = condensation_check(&s, face, CondensationKind::Point).unwrap();
                    let cl = condensation_check(&s, face, CondensationKind::Line).unwrap();
                    assert_eq!(gp == 0, cp, "{face} point");
                    assert_eq!(gl == 0, cl, "{face} line");
                }
            }
        }
    }
}
