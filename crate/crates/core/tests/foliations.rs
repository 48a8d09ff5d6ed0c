//! Worked examples for the foliation side: normal-bundle-valued leaf forms, the Bott
//! differential, the brackets `v_k`, the strict morphism `phi` and the anchors.

use std::collections::BTreeMap;

use poisfol::cohomology::{foliation_kuranishi_decide, FoliationVerdict};
use poisfol::expr::{parse_form, parse_function, parse_multivector};
use poisfol::foliation::{bott_differential, foliation_mc_residual, graph_involutive, n_anchor, phi, underline_phi, v2, v3};
use poisfol::linfty::anchor_rho;
use poisfol::{DifferentialForm, FoliatedFormNF, Multivector, RegularPoissonStructure, Splitting, TorusFunction};

fn form(s: &str, n: usize) -> DifferentialForm {
    parse_form(s, n).unwrap()
}

fn mv(s: &str, n: usize) -> Multivector {
    parse_multivector(s, n).unwrap()
}

fn rp(pi: &str, n: usize, leaf: &[usize]) -> RegularPoissonStructure {
    RegularPoissonStructure::new(mv(pi, n), Splitting::coordinate(n, leaf).unwrap()).unwrap()
}

fn one_term(alpha: &str, n: usize, direction: usize) -> FoliatedFormNF {
    FoliatedFormNF::decomposable(&form(alpha, n), direction)
}

fn scaled(eta: &FoliatedFormNF, t: &str) -> FoliatedFormNF {
    eta.mul_fn(&parse_function(t, eta.dim()).unwrap())
}

#[test]
fn bott_differential_examples() {
    let s5 = Splitting::coordinate(5, &[0, 1, 2, 3]).unwrap();
    assert!(bott_differential(&s5, &one_term("dt4", 5, 4)).is_zero());

    // coordinate frame: only the leafwise differential of the coefficient survives
    let s3 = Splitting::coordinate(3, &[0, 1]).unwrap();
    let eta = one_term("sin(t1 + t3)*cos(t2)*dt1", 3, 2);
    let expected = one_term("-sin(t1 + t3)*sin(t2)*dt2^dt1", 3, 2);
    assert_eq!(bott_differential(&s3, &eta), expected);
    assert!(bott_differential(&s3, &one_term("3*dt2", 3, 2)).is_zero());
}

#[test]
fn brackets_vanish_on_constant_data_and_coordinate_frames() {
    let s5 = Splitting::coordinate(5, &[0, 1, 2, 3]).unwrap();
    let eta = one_term("dt4", 5, 4);
    assert!(v2(&s5, &eta, &eta).is_zero());
    assert!(v2(&s5, &eta, &FoliatedFormNF::zero(5)).is_zero());
    let s4 = Splitting::coordinate(4, &[0, 1]).unwrap();
    let a = one_term("sin(t3)*dt1", 4, 2);
    let b = one_term("cos(t4)*dt2", 4, 3);
    assert!(v3(&s4, &a, &b, &a).is_zero());
}

#[test]
fn phi_of_the_projection_example() {
    let r = rp("d1^d2 + d3^d4", 5, &[0, 1, 2, 3]);
    let xi = mv("(2 + sin(t5))*d1^d2 + d3^d5", 5);
    let eta = phi(&r, &xi).unwrap();
    assert_eq!(eta, one_term("dt4", 5, 4));
    assert!(phi(&r, &mv("cos(t5)*d1^d2 + d3", 5)).unwrap().is_zero());
    for t in ["1", "1/2", "-3", "7/5"] {
        let e = scaled(&eta, t);
        assert!(graph_involutive(&r.splitting, &e), "t = {t}");
        assert!(foliation_mc_residual(&r.splitting, &e).is_mc, "t = {t}");
    }
    assert!(graph_involutive(&r.splitting, &FoliatedFormNF::zero(5)));
}

#[test]
fn underline_phi_examples() {
    let r = rp("(sin(t4) + 2)*d1^d2", 4, &[0, 1]);
    let f = mv("cos(t3)", 4);
    assert_eq!(underline_phi(&r, &f).unwrap(), form("cos(t3)", 4));
    // omega^flat(d1) = iota_{d1} omega with omega = dt1^dt2 / h
    assert_eq!(underline_phi(&r, &mv("d1", 4)).unwrap(), form("1/(sin(t4) + 2)*dt2", 4));
    // beta = -omega^flat Z^sharp omega^flat on the unit area: dt1^dt2 with the flat/sharp conventions
    let r2 = rp("d1^d2", 2, &[0, 1]);
    assert_eq!(underline_phi(&r2, &mv("d1^d2", 2)).unwrap(), form("dt1^dt2", 2));
}

#[test]
fn two_parameter_family_is_obstructed_on_the_foliation_side() {
    let h = "(3 + cos(t3) + sin(t4))";
    let r = rp(&format!("{h}*d1^d2"), 4, &[0, 1]);
    let xi = mv("(1 + sin(t3))*d1^d3 + cos(t4)*d2^d4", 4);
    let eta = phi(&r, &xi).unwrap();
    assert!(!foliation_mc_residual(&r.splitting, &eta).is_mc);
    let (cochain, verdict) = foliation_kuranishi_decide(&r.splitting, &eta).unwrap();
    assert_eq!(cochain, v2(&r.splitting, &eta, &eta));
    assert!(matches!(verdict, FoliationVerdict::NotExact(_)));
}

#[test]
fn obstructed_t3_element_is_obstructed_on_the_foliation_side() {
    let r = rp("d1^d2", 3, &[0, 1]);
    let eta = phi(&r, &mv("sin(t3)*d1^d3 + cos(t3)*d2^d3", 3)).unwrap();
    let (_, verdict) = foliation_kuranishi_decide(&r.splitting, &eta).unwrap();
    assert!(matches!(verdict, FoliationVerdict::NotExact(_)));
}

#[test]
fn square_free_cocycles_are_trivially_unobstructed() {
    let r = rp("d1^d2 + d3^d4", 5, &[0, 1, 2, 3]);
    let (cochain, verdict) = foliation_kuranishi_decide(&r.splitting, &one_term("dt4", 5, 4)).unwrap();
    assert!(cochain.is_zero());
    assert!(matches!(verdict, FoliationVerdict::Exact(_)));
}

#[test]
fn anchors_on_functions() {
    let n = 3;
    let mut frame = BTreeMap::new();
    frame.insert(2, vec![parse_function("cos(t3)", n).unwrap(), TorusFunction::zero(n)]);
    let r = RegularPoissonStructure::new(mv("d1^d2", n), Splitting::new(n, &[0, 1], frame).unwrap()).unwrap();
    let y3 = mv("d3 + cos(t3)*d1", n);
    let f = mv("sin(t1)*cos(t3)", n);
    // rho_2(Y3 | f) = -Y3(f)
    let y3f = mv("-sin(t1)*sin(t3) + cos(t3)*cos(t1)*cos(t3)", n);
    assert_eq!(anchor_rho(&r, 2, &[y3], &f).unwrap(), -&y3f);
    assert_eq!(anchor_rho(&r, 1, &[], &f).unwrap(), poisfol::linfty::l1(&r, &f));

    let s4 = Splitting::coordinate(4, &[0, 1]).unwrap();
    let a = one_term("1", 4, 2);
    let b = one_term("1", 4, 3);
    assert!(n_anchor(&s4, 3, &[a, b], &form("sin(t1)*dt2", 4)).unwrap().is_zero());
}
