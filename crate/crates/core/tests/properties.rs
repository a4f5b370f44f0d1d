//! Property tests over random rational and floating-point data.

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use num_traits::Zero;
use proptest::prelude::*;
use rumin_lab::enveloping::{Enveloping, Homogeneity, Mono, UEAElement};
use rumin_lab::graded_lie::{builtin_235, builtin_heisenberg, extend_automorphism, mul2, GradedLieAlgebra};
use rumin_lab::heat::{coverage_t_min, heat_trace, leading_exponent, log_grid, TraceInput};
use rumin_lab::metric::{hodge_star, hq_normal_form, metric_invariants, GradedMetric};
use rumin_lab::reps::{generator_matrices, RepresentationSpec, TruncationConfig};
use rumin_lab::scalar::{ExactScalar, Q};
use rumin_lab::zeta::{log_torsion_rumin_seshadri, schroedinger_dets, alternating_sum};
use rumin_lab::spectral::NormalMetric;
use rumin_lab::rumin::RuminComplex;
use std::sync::OnceLock;

fn env235() -> &'static Enveloping {
    static E: OnceLock<Enveloping> = OnceLock::new();
    E.get_or_init(|| Enveloping::new(builtin_235()).unwrap())
}

fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn positive_rational() -> impl Strategy<Value = Q> {
    (1i64..=9, 1i64..=4).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn invertible_2x2() -> impl Strategy<Value = [[Q; 2]; 2]> {
    [rational(), rational(), rational(), rational()]
        .prop_map(|[a, b, c, d]| [[a, b], [c, d]])
        .prop_filter("det ≠ 0", |m| !(&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]).is_zero())
}

/// Sum of up to three PBW monomials of total length ≤ 2 with small complex
/// rational coefficients.
fn element() -> impl Strategy<Value = UEAElement> {
    let mono = (0usize..5, 0usize..6).prop_map(|(i, j)| {
        let mut e = [0u8; 5];
        e[i] += 1;
        if j < 5 {
            e[j] += 1;
        }
        Mono::from_exponents(&e)
    });
    let coef = (-3i64..=3, -3i64..=3).prop_map(|(re, im)| &ExactScalar::int(re) + &(&ExactScalar::i() * &ExactScalar::int(im)));
    prop::collection::vec((mono, coef), 1..=3).prop_map(|ts| {
        ts.into_iter().fold(UEAElement::zero(), |acc, (m, c)| acc.add(&UEAElement::monomial(m, c)))
    })
}

fn homogeneous_word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..5, 1..=3)
}

fn degree(h: Homogeneity) -> Option<u32> {
    match h {
        Homogeneity::Degree(k) => Some(k),
        _ => None,
    }
}

fn normal_metric(l: &GradedLieAlgebra, a: Q, b11: Q, b22: Q) -> GradedMetric {
    GradedMetric::normal_form_235(l, a, b11, b22).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn automorphisms_preserve_brackets(phi in invertible_2x2()) {
        for l in [builtin_235(), builtin_heisenberg()] {
            let a = extend_automorphism(&l, &phi).unwrap();
            prop_assert!(l.preserves_brackets(&a.full_matrix));
        }
    }

    #[test]
    fn extension_is_a_homomorphism(p1 in invertible_2x2(), p2 in invertible_2x2()) {
        let l = builtin_235();
        let a1 = extend_automorphism(&l, &p1).unwrap();
        let a2 = extend_automorphism(&l, &p2).unwrap();
        let a12 = extend_automorphism(&l, &mul2(&p1, &p2)).unwrap();
        prop_assert_eq!(a1.compose(&a2), a12.full_matrix);
    }

    #[test]
    fn associativity(x in element(), y in element(), z in element()) {
        let e = env235();
        prop_assert_eq!(e.mul(&e.mul(&x, &y), &z), e.mul(&x, &e.mul(&y, &z)));
    }

    #[test]
    fn adjoint_reverses_products(x in element(), y in element()) {
        let e = env235();
        let lhs = e.formal_adjoint(&e.mul(&x, &y));
        let rhs = e.mul(&e.formal_adjoint(&y), &e.formal_adjoint(&x));
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(e.formal_adjoint(&e.formal_adjoint(&x)), x);
    }

    #[test]
    fn homogeneity_is_additive(u in homogeneous_word(), v in homogeneous_word()) {
        let e = env235();
        let (x, y) = (e.word(&u), e.word(&v));
        let xy = e.mul(&x, &y);
        let (dx, dy) = (degree(e.homogeneity_degree(&x)).unwrap(), degree(e.homogeneity_degree(&y)).unwrap());
        prop_assert_eq!(degree(e.homogeneity_degree(&xy)), Some(dx + dy));
    }

    #[test]
    fn automorphisms_preserve_homogeneity(u in homogeneous_word(), phi in invertible_2x2()) {
        let e = env235();
        let a = extend_automorphism(&builtin_235(), &phi).unwrap();
        let x = e.word(&u);
        prop_assert_eq!(e.homogeneity_degree(&e.apply_automorphism(&a, &x)), e.homogeneity_degree(&x));
    }

    #[test]
    fn metric_invariants_under_automorphisms(
        phi in invertible_2x2(), a in positive_rational(), b11 in positive_rational(), b22 in positive_rational()
    ) {
        let l = builtin_235();
        let g = normal_metric(&l, a, b11, b22);
        let aut = extend_automorphism(&l, &phi).unwrap();
        let before = metric_invariants(&l, &g).unwrap();
        let after = metric_invariants(&l, &g.transport(&aut)).unwrap();
        prop_assert_eq!(&after.a, &before.a);
        // b_{φ·g}(X, Y) = b_g(φ⁻¹X, φ⁻¹Y)
        let det = &phi[0][0] * &phi[1][1] - &phi[0][1] * &phi[1][0];
        let inv = [[&phi[1][1] / &det, -&phi[0][1] / &det], [-&phi[1][0] / &det, &phi[0][0] / &det]];
        let b = before.b.unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Q::zero();
                for k in 0..2 {
                    for m in 0..2 {
                        s += &inv[k][i] * &b[k][m] * &inv[m][j];
                    }
                }
                prop_assert_eq!(&after.b.as_ref().unwrap()[i][j], &s);
            }
        }
    }
}

fn hq_f64(a: f64, b11: f64, b22: f64) -> Vec<Array2<f64>> {
    let q = |x: f64| rumin_lab::reps::rational_from_f64(x).unwrap();
    hq_normal_form(&q(a), &q(b11), &q(b22))
        .iter()
        .map(|m| Array2::from_shape_fn((m.rows, m.cols), |(i, j)| m.get(i, j).to_c64().re))
        .collect()
}

fn mat(rows: &[Vec<f64>]) -> Array2<f64> {
    Array2::from_shape_fn((rows.len(), rows[0].len()), |(i, j)| rows[i][j])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn hodge_star_squares_to_identity(a in 1u32..=12, b11 in 1u32..=12, b22 in 1u32..=12) {
        let (a, b11, b22) = (a as f64 / 4.0, b11 as f64 / 4.0, b22 as f64 / 4.0);
        let st = hodge_star(a, b11, b22);
        for q in 0..6 {
            let p = mat(&st[5 - q]).dot(&mat(&st[q]));
            let id = Array2::<f64>::eye(p.nrows());
            prop_assert!((&p - &id).iter().all(|x| x.abs() < 1e-12), "q={} {:?}", q, p);
        }
    }

    #[test]
    fn hodge_star_is_an_isometry_up_to_scale(a in 1u32..=12, b11 in 1u32..=12, b22 in 1u32..=12) {
        let (a, b11, b22) = (a as f64 / 4.0, b11 as f64 / 4.0, b22 as f64 / 4.0);
        let st = hodge_star(a, b11, b22);
        let h = hq_f64(a, b11, b22);
        let mut ratios = Vec::new();
        for q in 0..6 {
            let s = mat(&st[q]);
            let lhs = s.t().dot(&h[5 - q]).dot(&s);
            let c = lhs[[0, 0]] / h[q][[0, 0]];
            prop_assert!((&lhs - &(&h[q] * c)).iter().all(|x| x.abs() < 1e-12 * c.abs().max(1.0)));
            ratios.push(c);
        }
        // the constant of proportionality is the same in every degree
        for c in &ratios {
            prop_assert!((c - ratios[0]).abs() < 1e-12 * ratios[0].abs());
        }
    }
}

fn dense(b: &rumin_lab::reps::Banded) -> Array2<C64> {
    b.to_dense()
}

fn interior(m: &Array2<C64>, n: usize) -> Array2<C64> {
    m.slice(s![..n, ..n]).to_owned()
}

fn generic_spec() -> impl Strategy<Value = RepresentationSpec> {
    (-20i32..=20, -20i32..=20, -20i32..=20)
        .prop_filter("λ, μ not both 0", |(l, m, _)| *l != 0 || *m != 0)
        .prop_map(|(l, m, nu)| RepresentationSpec::Generic { lambda: l as f64 / 10.0, mu: m as f64 / 10.0, nu: nu as f64 / 10.0 })
}

fn any_spec() -> impl Strategy<Value = RepresentationSpec> {
    prop_oneof![
        (-30i32..=30).prop_filter("ħ ≠ 0", |h| *h != 0).prop_map(|h| RepresentationSpec::Schroedinger { hbar: h as f64 / 10.0 }),
        generic_spec(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn generators_are_skew_adjoint(spec in any_spec()) {
        let n = 40;
        let t = TruncationConfig::new(n, 8);
        for x in generator_matrices(&spec, 5, &t).unwrap() {
            let m = interior(&dense(&x), n);
            let s = &m + &m.t().mapv(|z| z.conj());
            let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
            prop_assert!(s.iter().all(|z| z.norm() < 1e-12 * scale));
        }
    }

    #[test]
    fn brackets_are_realized(spec in any_spec()) {
        let n = 40;
        let t = TruncationConfig::new(n, 8);
        let l = builtin_235();
        let x: Vec<Array2<C64>> = generator_matrices(&spec, 5, &t).unwrap().iter().map(dense).collect();
        for i in 0..5 {
            for j in 0..5 {
                let comm = x[i].dot(&x[j]) - x[j].dot(&x[i]);
                let mut want = Array2::<C64>::zeros(x[0].raw_dim());
                for k in 0..5 {
                    let c = rumin_lab::scalar::q_to_f64(&l.structure_constant(i, j, k));
                    if c != 0.0 {
                        want = want + &x[k] * C64::new(c, 0.0);
                    }
                }
                let d = interior(&(comm - want), n);
                let scale = x.iter().flat_map(|m| m.iter()).map(|z| z.norm()).fold(1.0, f64::max);
                prop_assert!(d.iter().all(|z| z.norm() < 1e-10 * scale * scale), "[X{}, X{}]", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn heat_trace_positive_and_decreasing(mut eig in prop::collection::vec(0.01f64..1e3, 1..200)) {
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let Some(t0) = coverage_t_min(&eig) else {
            // too few eigenvalues to bound the tail before the trace underflows
            prop_assert!(eig.len() < 4);
            return Ok(());
        };
        let s = heat_trace(TraceInput { eigenvalues: &eig, kernel_count: 0 }, &log_grid(t0, 10.0 * t0, 20)).unwrap();
        prop_assert!(s.trace[0] > 0.0);
        prop_assert!(s.trace.iter().all(|&x| x >= 0.0));
        prop_assert!(s.trace.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0)));
    }
}

#[test]
fn synthetic_power_law_exponents() {
    for p in [1.0, 4.0 / 3.0, 2.0] {
        let eig: Vec<f64> = (1..=200_000).map(|n| (n as f64).powf(p)).collect();
        let t0 = coverage_t_min(&eig).unwrap();
        let s = heat_trace(TraceInput { eigenvalues: &eig, kernel_count: 0 }, &log_grid(t0, 1e3 * t0, 60)).unwrap();
        let e = leading_exponent(&s).unwrap();
        assert!((e.slope + 1.0 / p).abs() < 0.01, "p = {p}: {e:?}");
    }
}

#[test]
fn schroedinger_determinants_are_hbar_free_and_dual() {
    let c = RuminComplex::new(builtin_235()).unwrap();
    let std = NormalMetric::standard();
    let base = schroedinger_dets(1.0, &std).unwrap();
    for hbar in [0.5, 3.0, -2.0] {
        let other = schroedinger_dets(hbar, &std).unwrap();
        for (x, y) in other.log_dets.iter().zip(&base.log_dets) {
            assert!((x - y).abs() < 1e-14, "ħ = {hbar}");
        }
    }
    for q in 0..5 {
        assert_eq!(base.log_dets[q], base.log_dets[4 - q]);
        assert_eq!(base.zeta_at_0[q], 0.0);
    }
    // the Rumin–Seshadri formulation of the torsion agrees with the direct one
    let weights = &c.cohomology.weights;
    let rs = log_torsion_rumin_seshadri(&base.log_dets, &c.a, weights, c.kappa);
    assert!((rs - alternating_sum(&base.log_dets)).abs() < 1e-15);
    assert!(base.log_torsion.abs() < 1e-14);
}
