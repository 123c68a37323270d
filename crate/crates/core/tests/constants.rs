use arithsemi::catalog::{Instance, SemigroupSpec};
use arithsemi::mertens::report::report_a;
use arithsemi::mertens::{constants_report, euler_gamma, zhang_report};
use arithsemi::{to_f64, MeisselContext, MertensTables, NormalizedSemigroup, Precision, Tolerances};

const PREC: Precision = Precision::DEFAULT;

fn poly(q: u64, n: usize) -> (Instance, NormalizedSemigroup, MertensTables) {
    let instance = Instance::resolve(&SemigroupSpec::poly(q, n), None, PREC).unwrap();
    let norm = NormalizedSemigroup::from_instance(&instance, PREC).unwrap();
    let tables = MertensTables::new(&norm);
    (instance, norm, tables)
}

#[test]
fn euler_gamma_digits() {
    let g = euler_gamma(Precision::new(256).unwrap()).unwrap();
    let text = arithsemi::format_real(&g, 40);
    assert!(text.starts_with("0.577215664901532860606512090082402431042"), "{text}");
}

#[test]
fn poly_f2_constants() {
    let (instance, norm, tables) = poly(2, 1500);
    let a = report_a(&instance, &norm).unwrap();
    let c = constants_report(&norm, &tables, Some(&a), 1e-8).unwrap();
    assert!((to_f64(&c.c_m.value) - 0.452233).abs() < 1e-6);
    assert!((to_f64(&c.c_3.value) - 1.38272).abs() < 1e-5);
    assert!((to_f64(&c.c_2.as_ref().unwrap().value) - 0.5614595).abs() < 5e-8);
    let c1 = to_f64(&c.c_1.as_ref().unwrap().value);
    assert!((c1 - (to_f64(&c.gamma.value) - to_f64(&c.c_m.value))).abs() < 1e-15);
    assert!(!c.degenerate);
}

#[test]
fn constants_do_not_depend_on_n_max_once_converged() {
    let pick = |n| {
        let (instance, norm, tables) = poly(3, n);
        let a = report_a(&instance, &norm).unwrap();
        constants_report(&norm, &tables, Some(&a), 1e-8).unwrap()
    };
    let (small, large) = (pick(200), pick(600));
    for (x, y) in [(&small.c_m, &large.c_m), (&small.c_3, &large.c_3)] {
        assert!(to_f64(&(&x.value - &y.value)).abs() <= x.bound + y.bound + 1e-30);
    }
}

#[test]
fn verification_report_for_several_bases() {
    for q in [2u64, 3, 5] {
        let (instance, ..) = poly(q, 2000);
        let report = zhang_report(&instance, &Tolerances::default(), PREC, 25).unwrap();
        assert!(report.all_pass(), "q = {q}: {:?}", report.failing());
    }
}

#[test]
fn perturbed_instances_are_not_polynomials() {
    let spec = SemigroupSpec::perturbed(2, 300, 5, Default::default());
    let instance = Instance::resolve(&spec, None, PREC).unwrap();
    let norm = NormalizedSemigroup::from_instance(&instance, PREC).unwrap();
    let a = report_a(&instance, &norm).unwrap();
    assert!(to_f64(&a.a) > 1.0);
    let tables = MertensTables::new(&norm);
    let c = constants_report(&norm, &tables, Some(&a), 1e-8).unwrap();
    let e_gamma = (-to_f64(&c.gamma.value)).exp();
    assert!((to_f64(&c.c_2.unwrap().value) - e_gamma / to_f64(&a.a)).abs() < 1e-12);
}

#[test]
fn meissel_residual_shrinks_with_truncation() {
    let (instance, norm, tables) = poly(2, 3000);
    let a = report_a(&instance, &norm).unwrap();
    let c = constants_report(&norm, &tables, Some(&a), 1e-8).unwrap();
    let ctx = MeisselContext::new(&norm, &tables, &c.c_1.unwrap().value).unwrap();
    let alpha = PREC.parse("0.3").unwrap();
    let mut last = f64::INFINITY;
    for k in [500usize, 1000, 2000] {
        let eval = ctx.evaluate(&alpha, k, 3000).unwrap();
        let r = to_f64(&eval.identity_residual).abs();
        assert!(r <= 2.0 * eval.combined_bound(), "K = {k}: {r:e} vs {:e}", eval.combined_bound());
        assert!(r < last);
        last = r;
    }
}
