use super::*;
use crate::models::make_tube;

fn cfg() -> ZeroTestConfig {
    ZeroTestConfig::default()
}

fn presentation(h: Expr) -> FibrationPresentation {
    let tube = make_tube(2, 0.02, 2.0).unwrap();
    FibrationPresentation {
        construction: Construction::Surgery,
        a: 1,
        b: 1,
        fiber: FiberDescriptor {
            sphere_dim: 3,
            lens_order: 1,
        },
        hamiltonian: RadialHamiltonian {
            h,
            vanishing_order: 2,
            equivariance: Some(1),
        },
        tube,
        outer_band: (1.5, 2.0),
    }
}

#[test]
fn radial_examples() {
    let r = Expr::coord("r");
    let cert = check_radial(&presentation(r.powi(2)), &cfg()).unwrap();
    assert!((cert.margin - 0.1).abs() < 1e-9);
    let err = check_radial(&presentation(-r.powi(2)), &cfg()).unwrap_err();
    match err {
        UniquenessError::Radial(f) => {
            assert_eq!(f.inequality, "∂H/∂r > 0");
            assert!(f.witness.contains_key("r"));
        }
        e => panic!("unexpected {e}"),
    }
    assert!(check_radial(&presentation(r.clone()), &cfg()).is_err());
    let surgery = surgery_presentation(1, &make_tube(2, 0.02, 2.0).unwrap(), &cfg()).unwrap();
    assert!(check_radial(&surgery, &cfg()).is_ok());
}

#[test]
fn convex_path_cases() {
    let tube = make_tube(2, 0.02, 2.0).unwrap();
    let s = surgery_presentation(1, &tube, &cfg()).unwrap();
    let path = convex_path(&s, &s, s.outer_band, &cfg()).unwrap();
    assert_eq!(path.points.len(), PATH_POINTS);
    let m0 = path.points[0].margin;
    assert!(path.points.iter().all(|p| (p.margin - m0).abs() < 1e-12));

    let spec = make_action(1, 1, &tube, &cfg()).unwrap();
    let c = make_cut(&spec, &cfg()).unwrap().presentation.unwrap();
    let path = convex_path(&s, &c, s.outer_band, &cfg()).unwrap();
    assert!(path.min_margin > 0.0);

    let r = Expr::coord("r");
    let shifted = s.with_hamiltonian(&s.hamiltonian.h + Expr::float(1e-3) * r.powi(2));
    assert!(matches!(
        convex_path(&s, &shifted, s.outer_band, &cfg()),
        Err(UniquenessError::BoundaryMismatch { .. })
    ));
}

#[test]
fn gromov_reeb_field() {
    let tube = make_tube(2, 0.02, 2.0).unwrap();
    for (a, b) in [(1, 1), (2, 1), (3, 1), (2, 3)] {
        let (p, data) = gromov_presentation(a, b, &tube, &cfg()).unwrap();
        assert!(data.reeb.is_zero && data.outer.is_zero);
        let cert = check_radial(&p, &cfg()).unwrap();
        assert!(cert.margin > 0.0 && cert.equivariance.is_some() == (a > 1));
    }
}

#[test]
fn comparison_matrices() {
    let m = compare_constructions(1, 1, 2, &cfg()).unwrap();
    assert!(m.cells.iter().all(|c| c.verdict.passed()), "{:?}", m.cells);
    let m = compare_constructions(1, 3, 2, &cfg()).unwrap();
    assert!(m
        .cell(Construction::Surgery, Construction::Cut)
        .unwrap()
        .passed());
    let m = compare_constructions(2, 1, 2, &cfg()).unwrap();
    assert!(m
        .cell(Construction::Gromov, Construction::Cut)
        .unwrap()
        .passed());
    assert!(matches!(
        m.cell(Construction::Surgery, Construction::Cut),
        Some(Verdict::NotApplicable)
    ));
    assert!(matches!(
        compare_constructions(2, 4, 2, &cfg()),
        Err(UniquenessError::Cut(CutError::Bw(_)))
    ));
}
