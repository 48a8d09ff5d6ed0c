//! Worked examples for the Dirac exponential map, gauge transforms and polynomial
//! deformation paths.

use poisfol::expr::{parse_form, parse_multivector, parse_path};
use poisfol::linfty::{exp_g, gauge_transform_bivector, gauge_transform_poisson, leafwise_gauge_form, verify_path};
use poisfol::multivector::{de_rham, schouten};
use poisfol::trigring::{q, qi};
use poisfol::{DeformationPath, Multivector, PathClaim, RegularPoissonStructure, Splitting};

fn mv(s: &str, n: usize) -> Multivector {
    parse_multivector(s, n).unwrap()
}

fn rp(pi: &str, n: usize, leaf: &[usize]) -> RegularPoissonStructure {
    RegularPoissonStructure::new(mv(pi, n), Splitting::coordinate(n, leaf).unwrap()).unwrap()
}

fn path(s: &str, n: usize) -> DeformationPath {
    DeformationPath::new(parse_path(s, n).unwrap())
}

fn all_hold(r: &RegularPoissonStructure, p: &DeformationPath, claims: &[PathClaim]) {
    for o in verify_path(r, p, claims).unwrap() {
        assert!(o.holds, "{:?} fails: {}", o.claim, o.computed);
    }
}

#[test]
fn gauge_transform_trivial_cases() {
    let g = parse_form("dt1^dt2", 2).unwrap();
    assert!(gauge_transform_bivector(&Multivector::zero(2), &g).unwrap().is_zero());
    let z = mv("sin(t1)*d1^d2", 2);
    assert_eq!(gauge_transform_bivector(&z, &parse_form("0", 2).unwrap()).unwrap(), z);
    // (1/2 d1^d2)^{dt1^dt2}: sharp(Z) (1 + gamma Z)^{-1} = (1/2) / (1/2) in the symplectic pair
    assert_eq!(gauge_transform_bivector(&mv("1/2*d1^d2", 2), &g).unwrap(), mv("d1^d2", 2));
    assert_eq!(gauge_transform_bivector(&mv("d1^d2", 2), &(-&g)).unwrap(), mv("1/2*d1^d2", 2));
}

#[test]
fn exponential_of_leafwise_bivector_is_a_gauge_transform() {
    let r = rp("(sin(t4) + 2)*d1^d2", 4, &[0, 1]);
    assert_eq!(exp_g(&r, &Multivector::zero(4)).unwrap(), r.pi);
    let z1 = mv("1/3*cos(t3)*d1^d2", 4);
    let beta = leafwise_gauge_form(&r, &z1);
    assert_eq!(exp_g(&r, &z1).unwrap(), gauge_transform_poisson(&r, &beta, &qi(1)).unwrap());
    assert_eq!(gauge_transform_poisson(&r, &beta, &qi(0)).unwrap(), r.pi);
}

#[test]
fn closed_gauge_forms_preserve_poisson() {
    let r = rp("d1^d2 + d3^d4", 5, &[0, 1, 2, 3]);
    let closed = parse_form("1/4*dt1^dt3 + 1/5*dt2^dt4", 5).unwrap();
    assert!(de_rham(&closed).is_zero());
    let g = gauge_transform_poisson(&r, &closed, &q(1, 2)).unwrap();
    assert!(schouten(&g, &g).is_zero());
    // d(beta) = -1/5 sin(t5) dt5^dt2^dt4 is nonzero but vanishes along the leaves t5 = const.
    let leafwise_closed = parse_form("1/4*dt1^dt3 + 1/5*cos(t5)*dt2^dt4", 5).unwrap();
    assert!(!de_rham(&leafwise_closed).is_zero());
    let g = gauge_transform_poisson(&r, &leafwise_closed, &q(1, 2)).unwrap();
    assert!(schouten(&g, &g).is_zero());
}

#[test]
fn unobstructed_rank_two_path() {
    let r = rp("d1^d2", 4, &[0, 1]);
    let p = path("d1^d2 + t*(d1^d3 + d2^d4) + t*t*d3^d4", 4);
    all_hold(
        &r,
        &p,
        &[
            PathClaim::PoissonIdentically,
            PathClaim::WedgePowerVanishes(2),
            PathClaim::TangentEquals(mv("d1^d3 + d2^d4", 4)),
            PathClaim::RankCertAt(vec![qi(1), q(-3, 2)], 2),
        ],
    );
}

#[test]
fn rank_jumping_path_of_the_rank_two_example() {
    let r = rp("(sin(t4) + 2)*d1^d2", 4, &[0, 1]);
    let p = path("(sin(t4) + 2)*d1^d2 + t*(sin(t4)*d1^d3 + d2^d4) + t*t*d3^d4", 4);
    all_hold(
        &r,
        &p,
        &[
            PathClaim::PoissonIdentically,
            PathClaim::WedgePowerEquals(2, path("4*t*t*d1^d2^d3^d4", 4)),
            PathClaim::WedgePowerVanishes(3),
            PathClaim::RankCertAt(vec![q(1, 2), qi(1)], 4),
        ],
    );
}

#[test]
fn linear_path_of_the_first_family_has_square_minus_two_t_squared_fg() {
    let f = "(1 + sin(t3))";
    let g = "cos(t4)";
    let r = rp("(3 + cos(t3) + sin(t4))*d1^d2", 4, &[0, 1]);
    let p = path(&format!("(3 + cos(t3) + sin(t4))*d1^d2 + t*({f}*d1^d3 + {g}*d2^d4)"), 4);
    all_hold(
        &r,
        &p,
        &[PathClaim::PoissonIdentically, PathClaim::WedgePowerEquals(2, path(&format!("-2*t*t*{f}*{g}*d1^d2^d3^d4"), 4))],
    );
}

#[test]
fn paths_must_start_at_the_structure() {
    let r = rp("d1^d2", 4, &[0, 1]);
    assert!(verify_path(&r, &path("2*d1^d2 + t*d3^d4", 4), &[PathClaim::PoissonIdentically]).is_err());
}
