//! Jet arithmetic and the expression language against finite differences,
//! plain evaluation and symbolic differentiation.

mod common;

use proptest::prelude::*;
use r4gauss::exprlang::{parse, parse_with_params, Expr, ExprError, Func, Params};
use common::{jet_fd_error, smooth_expr, substitute};
use r4gauss::jets::{coeff_count, Jet2, JetError, MAX_ORDER};

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Polynomial expressions in `u`, `v` with small non-negative literals.
fn poly_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::U),
        Just(Expr::V),
        (0..5u8).prop_map(|k| Expr::Num(k as f64 * 0.5)),
    ];
    leaf.prop_recursive(4, 20, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(bx(a), bx(b))),
            inner.clone().prop_map(|a| Expr::Neg(bx(a))),
            (inner, 0..4i32).prop_map(|(a, n)| Expr::Pow(bx(a), n)),
        ]
    })
}

/// Expressions covering every syntactic form, with non-negative literals
/// (a negative literal prints as a negation and parses back as one).
fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::U),
        Just(Expr::V),
        Just(Expr::Pi),
        Just(Expr::Param("a".into())),
        Just(Expr::Param("r2".into())),
        (0.0..100.0f64).prop_map(Expr::Num),
        (0..10u8).prop_map(|k| Expr::Num(k as f64)),
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        let func = prop_oneof![Just(Func::Sqrt), Just(Func::Sin), Just(Func::Cos)];
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(bx(a), bx(b))),
            inner.clone().prop_map(|a| Expr::Neg(bx(a))),
            (inner.clone(), 0..6i32).prop_map(|(a, n)| Expr::Pow(bx(a), n)),
            (func, inner).prop_map(|(f, a)| Expr::Call(f, bx(a))),
        ]
    })
}

fn no_params() -> Params {
    Params::new()
}

fn jet(e: &Expr, u: f64, v: f64, order: usize) -> Jet2 {
    e.eval_jet(u, v, order, &no_params()).unwrap()
}

fn assert_coeffs(j: &Jet2, expected: &[((usize, usize), f64)]) {
    for d in 0..=j.order() {
        for jj in 0..=d {
            let i = d - jj;
            let want = expected.iter().find(|(k, _)| *k == (i, jj)).map_or(0.0, |x| x.1);
            assert!((j.coeff(i, jj) - want).abs() < 1e-14, "c[{i},{jj}] = {} != {want}", j.coeff(i, jj));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Degree-one coefficients against central differences of the plain
    /// value; degree `d > 1` coefficients against central differences of the
    /// degree `d - 1` coefficients, so every coefficient is checked against a
    /// first-derivative difference quotient of an already checked quantity.
    #[test]
    fn jet_coefficients_match_finite_differences(e in smooth_expr(), u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let worst = jet_fd_error(&e, u, v);
        prop_assert!(worst < 1e-6, "relative error {worst} for {e} at ({u}, {v})");
    }

    #[test]
    fn order_zero_jet_is_plain_evaluation(e in smooth_expr(), u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let p = no_params();
        let j = e.eval_jet(u, v, 0, &p).unwrap();
        let x = e.eval(u, v, &p).unwrap();
        prop_assert_eq!(j.coeffs().len(), coeff_count(0));
        prop_assert!((j.value() - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0), "{} vs {x}", j.value());
    }

    #[test]
    fn coefficient_count_matches_order(e in smooth_expr(), order in 0..=MAX_ORDER) {
        let j = jet(&e, 0.1, -0.2, order);
        prop_assert_eq!(j.coeffs().len(), (order + 1) * (order + 2) / 2);
    }

    #[test]
    fn print_then_parse_is_identity(e in any_expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "printed as {}", text);
    }

    /// Differentiating the jet agrees with the jet of the symbolic
    /// derivative for polynomials (up to rounding of the coefficient sums).
    #[test]
    fn jet_partial_matches_symbolic_derivative(e in poly_expr(), u in -1.0..1.0f64, v in -1.0..1.0f64, order in 1..=MAX_ORDER) {
        let j = jet(&e, u, v, order);
        for var in 0..2 {
            let lhs = j.partial(var).unwrap();
            let rhs = jet(&e.derivative(var), u, v, order - 1);
            prop_assert_eq!(lhs.order(), order - 1);
            let scale = rhs.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
            }
        }
    }

    /// Chain rule: the jet of `f(p, q)` equals the jet of `f` at `(p₀, q₀)`
    /// composed with the jets of `p - p₀` and `q - q₀`.
    #[test]
    fn jet_of_composite_is_composition_of_jets(
        f in poly_expr(), p in poly_expr(), q in poly_expr(),
        u in -1.0..1.0f64, v in -1.0..1.0f64, order in 1..=MAX_ORDER,
    ) {
        let direct = jet(&substitute(&f, &p, &q), u, v, order);
        let jp = jet(&p, u, v, order);
        let jq = jet(&q, u, v, order);
        let outer = jet(&f, jp.value(), jq.value(), order);
        let composed = outer.compose(&jp, &jq);
        let scale = direct.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for (a, b) in composed.coeffs().iter().zip(direct.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn division_undoes_multiplication(x in smooth_expr(), y in smooth_expr(), u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let jx = jet(&x, u, v, MAX_ORDER);
        let jy = jet(&y, u, v, MAX_ORDER);
        prop_assume!(jy.value().abs() > 0.1);
        let back = jx.prod(&jy).div(&jy).unwrap();
        let scale = jx.coeffs().iter().chain(jy.coeffs()).fold(1.0f64, |m, c| m.max(c.abs()));
        for (a, b) in back.coeffs().iter().zip(jx.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-9 * scale * scale, "{a} vs {b}");
        }
    }
}

#[test]
fn products_truncate_at_the_order() {
    let u = Jet2::var_u(0.0, 2).unwrap();
    let v = Jet2::var_v(0.0, 2).unwrap();
    assert_coeffs(&((u + 1.0) * (v + 1.0)), &[((0, 0), 1.0), ((1, 0), 1.0), ((0, 1), 1.0), ((1, 1), 1.0)]);
    let u3 = Jet2::var_u(0.0, 3).unwrap();
    let v3 = Jet2::var_v(0.0, 3).unwrap();
    let lhs = (u3 + v3 * v3 + 1.0) * (-u3 + 1.0);
    assert_coeffs(&lhs, &[((0, 0), 1.0), ((2, 0), -1.0), ((0, 2), 1.0), ((1, 2), -1.0)]);
    let f = (u3 * u3 + v3 * 2.0 + 3.0).sin() + 2.0;
    assert_coeffs(&f.div(&f).unwrap(), &[((0, 0), 1.0)]);
}

#[test]
fn division_by_a_jet_vanishing_at_the_base_point_fails() {
    let u = Jet2::var_u(0.0, 2).unwrap();
    assert!(matches!(Jet2::constant(1.0, 2).unwrap().div(&u), Err(JetError::Domain(_))));
}

#[test]
fn elementary_functions_expand_as_taylor_series() {
    let u2 = Jet2::var_u(0.0, 2).unwrap();
    assert_coeffs(&(u2 * 2.0 + 1.0).sqrt().unwrap(), &[((0, 0), 1.0), ((1, 0), 1.0), ((2, 0), -0.5)]);
    let u3 = Jet2::var_u(0.0, 3).unwrap();
    assert_coeffs(&u3.sin(), &[((1, 0), 1.0), ((3, 0), -1.0 / 6.0)]);
    for order in 0..=MAX_ORDER {
        let c = Jet2::constant(4.0, order).unwrap() + Jet2::var_u(0.0, order).unwrap() * 0.0;
        assert_coeffs(&c.sqrt().unwrap(), &[((0, 0), 2.0)]);
    }
    assert!(matches!(Jet2::var_u(0.0, 2).unwrap().sqrt(), Err(JetError::Domain(_))));
    assert!(matches!((Jet2::var_u(0.0, 2).unwrap() - 1.0).sqrt(), Err(JetError::Domain(_))));
}

#[test]
fn partial_derivatives_shift_coefficients() {
    let u = Jet2::var_u(0.0, 3).unwrap();
    let v = Jet2::var_v(0.0, 3).unwrap();
    let d = (u * u * v).partial(0).unwrap();
    assert_eq!(d.order(), 2);
    assert_coeffs(&d, &[((1, 1), 2.0)]);
    assert_coeffs(&Jet2::constant(5.0, 3).unwrap().partial(1).unwrap(), &[]);
    let cube = (u * u * u) * (1.0 / 6.0);
    assert_coeffs(&cube.partial(0).unwrap().partial(0).unwrap(), &[((1, 0), 1.0)]);
    assert_eq!(Jet2::constant(1.0, 0).unwrap().partial(0), Err(JetError::OrderUnderflow));
    assert!(matches!(Jet2::zero(MAX_ORDER + 1), Err(JetError::OrderOverflow(_))));
}

#[test]
fn expression_jets_at_reference_points() {
    let p = no_params();
    let sq = parse("u^2").unwrap().eval_jet(1.0, 0.0, 2, &p).unwrap();
    assert_coeffs(&sq, &[((0, 0), 1.0), ((1, 0), 2.0), ((2, 0), 1.0)]);
    let r = parse("sqrt(4+u)").unwrap().eval_jet(0.0, 0.0, 1, &p).unwrap();
    assert_coeffs(&r, &[((0, 0), 2.0), ((1, 0), 0.25)]);
    // third coordinate of Example 1
    let a = parse("u*v - u*v^2 + v^3/3").unwrap();
    let ja = a.eval_jet(0.0, 0.0, 3, &p).unwrap();
    assert_coeffs(&ja, &[((1, 1), 1.0), ((1, 2), -1.0), ((0, 3), 1.0 / 3.0)]);
    for (u, v) in [(0.3, -0.7), (1.1, 0.4)] {
        let want = u * v - u * v * v + v * v * v / 3.0;
        assert!((a.eval(u, v, &p).unwrap() - want).abs() < 1e-15);
    }
}

#[test]
fn parser_examples_and_errors() {
    let p = no_params();
    assert_eq!(parse("0").unwrap(), Expr::Num(0.0));
    assert_eq!(parse("sqrt(1 - u^2 - v^2)").unwrap().eval(0.0, 0.0, &p).unwrap(), 1.0);
    // ^ binds tighter than unary minus, which binds tighter than * and /
    assert_eq!(parse("-u^2").unwrap().eval(3.0, 0.0, &p).unwrap(), -9.0);
    assert_eq!(parse("-u*v").unwrap().eval(3.0, 2.0, &p).unwrap(), -6.0);
    assert_eq!(parse("1 + 2*3^2").unwrap().eval(0.0, 0.0, &p).unwrap(), 19.0);
    match parse("u +\n  * v") {
        Err(ExprError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
        other => panic!("expected a syntax error, got {other:?}"),
    }
    let mut known = Params::new();
    known.insert("r".into(), 2.0);
    assert_eq!(parse_with_params("q + u", &known), Err(ExprError::UnknownIdentifier("q".into())));
    assert!(matches!(
        parse("sqrt(u)").unwrap().eval_jet(-1.0, 0.0, 2, &p),
        Err(ExprError::Domain(_))
    ));
}
