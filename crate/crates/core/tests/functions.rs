//! Worked examples for trigonometric polynomials, certified quotients and splittings.

use std::collections::BTreeMap;

use poisfol::expr::{parse_form, parse_function, parse_multivector};
use poisfol::splitting::{bigrade_decompose, gamma_of, is_good, leafwise_symplectic};
use poisfol::trigring::certify_nonvanishing;
use poisfol::{Bigrade, Error, Gauss, NonvanishingCertificate, Splitting, TorusFunction, TrigPoly};

fn tf(s: &str, n: usize) -> TorusFunction {
    parse_function(s, n).unwrap()
}

fn tp(s: &str, n: usize) -> TrigPoly {
    tf(s, n).as_poly().unwrap().clone()
}

/// `sin(a) = (e^{ia} - e^{-ia}) / 2i`, `cos(a) = (e^{ia} + e^{-ia}) / 2`, built mode by mode.
fn exp_mode(k: Vec<i32>, re: i64, im: i64, den: i64) -> TrigPoly {
    use poisfol::Q;
    TrigPoly::monomial(k, Gauss::new(Q::new(re.into(), den.into()), Q::new(im.into(), den.into())))
}

#[test]
fn product_to_sum_by_mode_convolution() {
    let n = 4;
    // cos(t3) = (e3 + e-3)/2, sin(t4) = (-i e4 + i e-4)/2
    let cos3 = &exp_mode(vec![0, 0, 1, 0], 1, 0, 2) + &exp_mode(vec![0, 0, -1, 0], 1, 0, 2);
    let sin4 = &exp_mode(vec![0, 0, 0, 1], 0, -1, 2) + &exp_mode(vec![0, 0, 0, -1], 0, 1, 2);
    let mut convolution = TrigPoly::zero(n);
    for (ka, ca) in cos3.terms() {
        for (kb, cb) in sin4.terms() {
            let k: Vec<i32> = ka.iter().zip(kb.iter()).map(|(a, b)| a + b).collect();
            convolution = &convolution + &TrigPoly::monomial(k, ca * cb);
        }
    }
    assert_eq!(&tp("cos(t3)", n) * &tp("sin(t4)", n), convolution);
    assert_eq!(convolution, tp("1/2*(sin(t3 + t4) - sin(t3 - t4))", n));
    assert_eq!(&tp("sin(t4)", n) * &tp("sin(t4)", n), tp("1/2 - 1/2*cos(2*t4)", n));
}

#[test]
fn partial_derivatives_multiply_modes() {
    let n = 4;
    assert_eq!(tp("sin(t4)", n).partial(3), tp("cos(t4)", n));
    assert!(tp("sin(t4)", n).partial(0).is_zero());
    assert_eq!(tp("sin(t3 + t4)", n).partial(2), tp("cos(t3 + t4)", n));
}

#[test]
fn nonvanishing_certificates() {
    let n = 4;
    assert_eq!(certify_nonvanishing(&tp("sin(t4) + 2", n)), Some(NonvanishingCertificate::ConstantDomination));
    assert_eq!(certify_nonvanishing(&tp("1", n)), Some(NonvanishingCertificate::ConstantDomination));
    assert_eq!(certify_nonvanishing(&tp("sin(t4)", n)), None);
    // the margin must be strict
    assert_eq!(certify_nonvanishing(&tp("1 + sin(t4)", n)), None);
}

#[test]
fn certified_quotients() {
    let n = 4;
    let q = TorusFunction::one(n).div(&tf("sin(t4) + 2", n)).unwrap();
    assert!(!q.is_polynomial());
    assert_eq!(&q * &tf("sin(t4) + 2", n), TorusFunction::one(n));
    assert_eq!(tf("cos(t1)", n).div(&TorusFunction::one(n)).unwrap(), tf("cos(t1)", n));
    assert!(matches!(TorusFunction::one(n).div(&tf("sin(t4)", n)), Err(Error::DivisionUncertified(_))));
}

#[test]
fn leaf_averages_keep_only_leaf_zero_modes() {
    let n = 4;
    assert_eq!(tf("cos(t4)", n).zero_mode(&[0, 1]).unwrap(), tf("cos(t4)", n));
    assert!(tf("sin(t1)", n).zero_mode(&[0]).unwrap().is_zero());
    assert_eq!(tf("sin(t1)*cos(t3) + 5", n).zero_mode(&[0, 1]).unwrap(), tf("5", n));
}

#[test]
fn bigrade_decomposition_in_a_tilted_frame() {
    let n = 3;
    let coordinate = Splitting::coordinate(n, &[0, 1]).unwrap();
    let pi = parse_multivector("d1^d2", n).unwrap();
    assert_eq!(bigrade_decompose(&pi, &coordinate), BTreeMap::from([(Bigrade { p: 2, q: 0 }, pi.clone())]));

    let c = "3/2";
    let mut frame = BTreeMap::new();
    frame.insert(2, vec![TorusFunction::zero(n), tf(c, n)]);
    let tilted = Splitting::new(n, &[0, 1], frame).unwrap();
    // d3 = Y3 - c d2, so d1^d3 = d1^Y3 - c d1^d2
    let parts = bigrade_decompose(&parse_multivector("d1^d3", n).unwrap(), &tilted);
    assert_eq!(parts[&Bigrade { p: 1, q: 1 }], parse_multivector(&format!("d1^(d3 + {c}*d2)"), n).unwrap());
    assert_eq!(parts[&Bigrade { p: 2, q: 0 }], parse_multivector(&format!("-{c}*d1^d2"), n).unwrap());
}

#[test]
fn goodness_examples() {
    let s3 = Splitting::coordinate(3, &[0, 1]).unwrap();
    assert!(is_good(&parse_multivector("sin(t3)*d1^d2 + cos(t1)*d1^d3", 3).unwrap(), &s3));
    let s4 = Splitting::coordinate(4, &[0, 1]).unwrap();
    assert!(!is_good(&parse_multivector("d3^d4", 4).unwrap(), &s4));
    assert!(is_good(&parse_multivector("d3 + sin(t1)*d4", 4).unwrap(), &s4));
}

#[test]
fn leafwise_symplectic_forms() {
    let s4 = Splitting::coordinate(4, &[0, 1]).unwrap();
    let pi = parse_multivector("(sin(t4) + 2)*d1^d2", 4).unwrap();
    assert_eq!(leafwise_symplectic(&pi, &s4).unwrap().omega, parse_form("1/(sin(t4) + 2)*dt1^dt2", 4).unwrap());
    assert_eq!(gamma_of(&pi, &s4).unwrap(), parse_form("1/(sin(t4) + 2)*dt1^dt2", 4).unwrap());

    let s5 = Splitting::coordinate(5, &[0, 1, 2, 3]).unwrap();
    let pi5 = parse_multivector("d1^d2 + d3^d4", 5).unwrap();
    assert_eq!(leafwise_symplectic(&pi5, &s5).unwrap().omega, parse_form("dt1^dt2 + dt3^dt4", 5).unwrap());
}

#[test]
fn gamma_annihilates_a_tilted_complement() {
    let n = 3;
    let mut frame = BTreeMap::new();
    frame.insert(2, vec![tf("2", n), TorusFunction::zero(n)]);
    let s = Splitting::new(n, &[0, 1], frame).unwrap();
    let gamma = gamma_of(&parse_multivector("d1^d2", n).unwrap(), &s).unwrap();
    // gamma(Y3, .) = 0 with Y3 = d3 + 2 d1, and gamma(d1, d2) = 1: gamma = dt1^dt2 + 2 dt2^dt3
    assert_eq!(gamma, parse_form("dt1^dt2 + 2*dt2^dt3", n).unwrap());
}
