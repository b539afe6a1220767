use hypiso_core::classify::{realizable, witness, Answer, GroupClass, SurfaceDescriptor};
use hypiso_core::dot::{parse_dot, to_dot};
use hypiso_core::endspace::{CharSystem, EndSpace};
use hypiso_core::grouptable::{isomorphic, FiniteGroup, VcGroup};
use hypiso_core::ordinal::Ordinal;
use hypiso_core::synth::{
    build_x, build_x_finite, build_x_gamma, build_y, complex_automorphisms, complex_end_space, quotient,
    GluingComplex, GroupSource,
};
use hypiso_core::verify::verify;
use proptest::prelude::*;

fn builders() -> Vec<GluingComplex> {
    let w1 = EndSpace::omega_sum(EndSpace::Singleton);
    let two = CharSystem::new(Ordinal::one(), 2).unwrap();
    vec![
        build_x_finite(&w1, &FiniteGroup::cyclic(2), 2, 7).unwrap(),
        build_x_finite(&EndSpace::Cantor, &FiniteGroup::quaternion(), 1, 2).unwrap(),
        build_y(&EndSpace::Cantor, GroupSource::Finite { group: FiniteGroup::symmetric(3) }, 1, 0, 4).unwrap(),
        build_y(&w1, GroupSource::Ball { group: VcGroup::infinite_dihedral() }, 1, 2, 4).unwrap(),
        build_x(&EndSpace::Singleton, GroupSource::Ball { group: VcGroup::product_with_z(FiniteGroup::cyclic(2)) }, 1, 2, 4)
            .unwrap(),
        build_x_gamma(&VcGroup::integers(), &two, 3, 8).unwrap(),
    ]
}

#[test]
fn every_builder_round_trips_and_verifies() {
    for c in builders() {
        let text = c.to_json();
        let back = GluingComplex::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        let report = verify(&back, 1);
        assert!(report.passed(), "{report:?}");
        let dot = parse_dot(&to_dot(&c)).unwrap();
        assert_eq!(dot.nodes.len(), c.pieces.len());
        assert_eq!(dot.edges.len(), c.pairings.len());
    }
}

#[test]
fn non_normal_quotient() {
    // Z2 inside S3 is not normal; the quotient is still a valid complex.
    let s3 = FiniteGroup::symmetric(3);
    let e = EndSpace::omega_sum(EndSpace::Singleton);
    let c = build_x_finite(&e, &s3, 1, 3).unwrap();
    let cover = quotient(&c, &FiniteGroup::cyclic(2)).unwrap();
    assert_eq!(cover.quotient.vertex_count(), 3);
    assert!(verify(&cover.quotient, 1).passed());
    assert_eq!(complex_end_space(&cover.quotient, true).unwrap(), e.canonical());
}

#[test]
fn classifier_witness_path() {
    let e = CharSystem::new(Ordinal::nat(2), 3).unwrap().canonical();
    let s3 = FiniteGroup::symmetric(3);
    let v = realizable(&SurfaceDescriptor::standard(e.clone()), &GroupClass::Specific { group: s3.clone() });
    assert_eq!(v.answer, Answer::Realizable);
    let c = witness(&e, &s3, 1, 5).unwrap();
    assert!(isomorphic(&complex_automorphisms(&c), &s3));
}

#[test]
fn csv_tables_feed_the_builder() {
    let csv = ",e,a\ne,e,a\na,a,e\n";
    let g = FiniteGroup::from_csv(csv).unwrap();
    let h = FiniteGroup::from_csv(&g.to_csv()).unwrap();
    assert_eq!(g, h);
    let c = build_x_finite(&EndSpace::Cantor, &g, 1, 1).unwrap();
    assert_eq!(complex_automorphisms(&c).order(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn any_seed_builds_a_verifying_complex(seed in any::<u64>(), n in 1usize..5, m in 1u64..3) {
        let c = build_x_finite(&EndSpace::omega_sum(EndSpace::Singleton), &FiniteGroup::cyclic(n), m, seed).unwrap();
        prop_assert!(verify(&c, 1).passed());
        prop_assert_eq!(complex_automorphisms(&c).order(), n);
    }
}
