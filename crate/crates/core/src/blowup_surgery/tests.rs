use super::*;
use crate::models::make_tube;
use crate::symexpr::ZeroTestConfig;

#[test]
fn profile_examples() {
    let p = build_profile(1, 0.5, 1.5, 2.0).unwrap();
    assert!((p.value(0.5) - 0.25).abs() < 1e-12);
    assert!((p.value(1.5) - (1.0 - 1.0 / 2.25)).abs() < 1e-12);
    assert!(p.monotonicity.min_derivative > 0.0);
    assert_eq!(p.value(0.0), 0.0);
    assert_eq!(p.derivative(0.0), 0.0);
    let p3 = build_profile(3, 0.5, 1.5, 2.0).unwrap();
    assert!((p3.value(1.5) - (3.0 - 4.0 / 9.0)).abs() < 1e-12);
    assert!(matches!(
        build_profile(1, 1.5, 0.5, 2.0),
        Err(SurgeryError::Profile(ProfileError::BandOrder { .. }))
    ));
    assert!(matches!(
        build_profile(0, 0.5, 1.5, 2.0),
        Err(SurgeryError::BadTwist(0))
    ));
    let table = p.table(1024);
    assert_eq!(table.len(), 1024);
    assert!(table.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn surgery_models() {
    let cfg = ZeroTestConfig::default();
    let t2 = make_tube(2, 0.02, 2.0).unwrap();
    let m = build_surgery_blowup(1, &t2, &cfg).unwrap();
    assert_eq!(m.divisor.sphere_dim, 3);
    assert!(m.certificates.contact.margin > 0.0);
    let t1 = make_tube(1, 0.02, 2.0).unwrap();
    let m1 = build_surgery_blowup(1, &t1, &cfg).unwrap();
    assert_eq!(m1.divisor.sphere_dim, 1);
    let m2 = build_surgery_blowup(2, &t2, &cfg).unwrap();
    assert!(m2.certificates.outer.single_signed);
    // factor relating φ_l*η to the glued form is −r² on the outer band
    assert!(m2.certificates.outer.factor_max < 0.0);
}

#[test]
fn parity() {
    assert!(isotopy_parity(1, 0, 2));
    assert!(!isotopy_parity(1, 0, 3));
    assert!(isotopy_parity(5, 5, 7));
    assert!(!isotopy_parity(-3, 0, 1));
}
