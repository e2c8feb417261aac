use std::io::Write;
use std::process::Command;
use std::sync::{Arc, OnceLock};

use wzw_ope::field::Field;
use wzw_ope::indexset::set_minus;
use wzw_ope::kz;
use wzw_ope::lie::{Family, LieAlgebra};
use wzw_ope::modes::VacuumModule;
use wzw_ope::suite::{
    self, c4_minus_one_scalar, IdentityCheck, Lemma, SuiteParams, Verdict, Workbench,
};
use wzw_ope::uea::Uea;
use wzw_ope::{IndexSet, OpeEngine, Scalar, Q};

fn wb() -> &'static Workbench {
    static WB: OnceLock<Workbench> = OnceLock::new();
    WB.get_or_init(Workbench::new)
}

fn check(id: &str) -> IdentityCheck {
    suite::run_check_with(wb(), id, SuiteParams::default()).unwrap()
}

/// Bypasses the test harness capture so the line always reaches the log.
fn verdict(n: u32, pass: bool, detail: &str) {
    let line = format!(
        "criterion {n}: {} | {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn set(v: &[usize]) -> IndexSet {
    IndexSet::sorted(v)
}

fn poly(s: &str) -> Scalar {
    s.parse().unwrap()
}

fn in_current_span(f: &Field) -> bool {
    f.terms().keys().all(|m| m.len() == 1)
}

#[test]
fn criterion_1_centrality() {
    let mut details = Vec::new();
    let mut pass = true;
    for n in [5, 6] {
        let u = Uea::new(Arc::new(LieAlgebra::new(Family::So, n).unwrap()));
        for order in [2, 4] {
            let c = u.is_central(&u.capelli(order).unwrap()).unwrap();
            assert!(c.central, "C{order} in U(so_{n})");
            pass &= c.central;
            details.push(format!("C{order}/so{n}"));
        }
    }
    let u = Uea::new(Arc::new(LieAlgebra::new(Family::Sl, 3).unwrap()));
    let g = u.gelfand_third().unwrap();
    assert!(!g.is_zero());
    let c = u.is_central(&g).unwrap();
    assert!(c.central);
    pass &= c.central;
    details.push("W_gelfand/sl3".into());
    verdict(1, pass, &format!("central: {}", details.join(", ")));
}

#[test]
fn criterion_2_pfaffian_identities() {
    let pffco = check("prop_pffco");
    let minor = check("minor_sum");
    let com = check("eq_com");
    assert_eq!(pffco.verdict, Verdict::Match);
    assert_eq!(minor.verdict, Verdict::Match);
    assert!(com.structural);
    // the printed relative sign of the two terms fails; the opposite sign holds on all 225 pairs
    assert!(
        com.engine_value.contains("first term negated: 225/225"),
        "{}",
        com.engine_value
    );
    assert!(
        com.engine_value.contains("printed sign: 135/225"),
        "{}",
        com.engine_value
    );
    let pass = pffco.structural && minor.structural && com.structural;
    verdict(
        2,
        pass,
        "[F_ij,PfF_I] and minor summation exact on all |I|=4 at N=6; commutator formula exact on 225/225 pairs \
         with PfF_{PfF_I J} entering with sign -1 (action-sign convention)",
    );
}

#[test]
fn criterion_3_base_opes() {
    let p1 = check("prop_p1");
    assert_eq!(p1.verdict, Verdict::Match);
    let p2 = check("prop_p2");
    let p4 = check("prop_p4");
    assert!(p2.structural && p4.structural);
    let e = wb().engine(Family::So, 6).unwrap();
    let mut orders = std::collections::BTreeSet::new();
    let mut scalars = std::collections::BTreeSet::new();
    for j in IndexSet::subsets(6, 2) {
        let (a, b) = (j.indices()[0], j.indices()[1]);
        let f = e.skew_current(a, b).unwrap();
        for i in IndexSet::subsets(6, 4) {
            let r = e.contract(&f, &e.pf_field(&i).unwrap(), 0).unwrap();
            assert!(r.singular_depth() <= 2);
            for (m, _) in r.singular() {
                orders.insert(m);
            }
            match set_minus(&i, &j) {
                Some((rest, s)) => {
                    let (x, y) = (rest.indices()[0], rest.indices()[1]);
                    let c = r.pole(2).ratio_to(&e.skew_current(x, y).unwrap()).unwrap();
                    scalars.insert((c.scale(Q::int(s as i64))).to_string());
                }
                None => assert!(r.pole(2).is_zero()),
            }
        }
    }
    assert_eq!(orders.into_iter().collect::<Vec<_>>(), vec![1, 2]);
    assert_eq!(
        scalars.into_iter().collect::<Vec<_>>(),
        vec!["-k-2".to_string()]
    );
    verdict(
        3,
        true,
        "six-term sl_N contraction exact; F_J x PfF_I poles {2,1} on all pairs at N=6; double pole \
         -(k+2) sign(J,I) F_{I\\J}, i.e. (k+2) up to the sign of the invariant form",
    );
}

#[test]
fn criterion_4_lemma_suite() {
    let pf = |n: usize| {
        wb().engine(Family::So, n)
            .unwrap()
            .pf_field(&set(&[1, 2, 3, 4]))
            .unwrap()
    };
    let depth = |v: &[Field]| v.iter().rposition(|f| !f.is_zero()).unwrap_or(0);

    let l1 = wb().lemma_series(6, Lemma::L1).unwrap();
    assert_eq!(l1[4].ratio_to(&pf(6)), Some(poly("6k^2+12k")));
    assert_eq!(check("lemma_l1").verdict, Verdict::Match);

    // Lemma l3 claims no poles above order 2; the engine finds a quartic pole
    let mut l3_depths = Vec::new();
    for n in 6..=9 {
        let v = wb().lemma_series(n, Lemma::L3).unwrap();
        let d = depth(&v);
        assert_eq!(d, 4, "N={n}");
        let nn = n as i64;
        let expect = Scalar::k_plus(2).scale(Q::int(-(nn * nn - 5 * nn + 8)));
        assert_eq!(v[4].ratio_to(&pf(n)), Some(expect));
        l3_depths.push(d);
    }
    assert!(!check("lemma_l3").structural);

    for n in 6..=9 {
        assert!(depth(&wb().lemma_series(n, Lemma::L4).unwrap()) <= 2);
        assert_eq!(depth(&wb().lemma_series(n, Lemma::L4Squared).unwrap()), 3);
    }

    // Lemma l5 leading coefficient: engine -2(k+2)((N-2)(N-3)(N-4)+6(N-4)) vs printed -(k+2)((N-2)(N-3)(N-4)+6)
    let l5 = wb().lemma_series(6, Lemma::L5).unwrap();
    let got = l5[4].ratio_to(&pf(6)).unwrap();
    assert_eq!(got, Scalar::k_plus(2).scale(Q::int(-72)));
    assert_ne!(got, Scalar::k_plus(2).scale(Q::int(-30)));
    assert_eq!(check("lemma_l5").verdict, Verdict::Mismatch);

    let l2 = check("lemma_l2");
    assert!(matches!(
        l2.verdict,
        Verdict::Match | Verdict::PaperInconsistency
    ));

    verdict(
        4,
        false,
        "l1 = 6(k+2)k exact; l2 recorded as paper-internal-inconsistency; l4 depth <= 2 with 1/(z-x) \
         (3 with the stated 1/(z-x)^2); REFUTED: l3 has a quartic pole -(k+2)(N^2-5N+8)PfF_J for N=6..9, \
         l5 leading coefficient is -72(k+2) at N=6, not -30(k+2)",
    );
}

#[test]
fn criterion_5_main_theorem() {
    let r = wb().c4_pf(6, &set(&[1, 2, 3, 4]), true).unwrap();
    assert_eq!(r.singular_depth(), 4);
    let c = c4_minus_one_scalar(wb(), 6).unwrap().unwrap();
    assert!(c.is_polynomial());
    assert_eq!(c.numer().degree(), Some(2));
    assert_eq!(c, poly("26k^2+156k+232"));
    assert_ne!(c, poly("6k^2+12k"));
    let s1 = check("cor_s1");
    assert_eq!(s1.verdict, Verdict::PaperInconsistency);
    assert!(s1.structural);
    verdict(
        5,
        true,
        &format!(
            "C4(z)PfF_J(w) depth 4, C4^m PfF_J = 0 for m >= 1, C4^(-1)PfF_J = ({c}) dPfF_J at N=6 \
             (degree 2 in k; differs from 6(k+2)k, logged as paper-internal-inconsistency)"
        ),
    );
}

#[test]
fn criterion_6_a_series() {
    let wn_j = check("thm_wn_j");
    let wn_w = check("thm_wn_w");
    let cor = check("cor_not_diff");
    assert!(wn_j.structural);
    assert_eq!(wn_j.verdict, Verdict::Mismatch);
    assert!(!wn_w.structural);
    assert!(!cor.structural);

    let e = wb().engine(Family::Sl, 3).unwrap();
    let w = e.w_field().unwrap();
    let wa = e.w_a_fields().unwrap();
    let j = e.current(0).unwrap();
    // W_n J lands in the span of W_a: outside the current span
    let p2 = e.pole(&w, 2, &j).unwrap();
    assert!(!p2.is_zero() && !in_current_span(&p2));
    // W_{-1} W_a is composite, contradicting the claimed image in the current span
    let lower = e.pole(&w, 2, &wa[0]).unwrap();
    assert!(!in_current_span(&lower));
    // some W_n W_m composition leaves the current span
    let y = e.pole(&w, 1, &j).unwrap();
    let escapes = (-2..=4i64).any(|n| !in_current_span(&e.pole(&w, n + 3, &y).unwrap()));
    assert!(escapes);
    verdict(
        6,
        false,
        "W_n(d^r J_a) lies in the span of d^s W_a but with coefficient 6(k+N)(r+1)!/(r-n-1)! instead of \
         the printed factorials; REFUTED: W_n(d^r W_a) has composite lower modes (e.g. W_{-1} W_a), \
         and W_n W_m leaves the current span for some (n,m)",
    );
}

#[test]
fn criterion_7_oracle_equivalence() {
    let so = wb().engine(Family::So, 5).unwrap();
    let sl = wb().engine(Family::Sl, 3).unwrap();
    let f = |i, j| so.skew_current(i, j).unwrap();
    let pf = |v: &[usize]| so.pf_field(&set(v)).unwrap();
    let d = |e: &OpeEngine, x: &Field| e.derivative(x).unwrap();
    let np = |e: &OpeEngine, a: &Field, b: &Field| e.normal_product(a, b).unwrap();

    let so_fields: Vec<Field> = vec![
        f(1, 2),
        f(2, 3),
        d(&so, &f(1, 3)),
        pf(&[1, 2, 3, 4]),
        pf(&[1, 2, 3, 5]),
        pf(&[2, 3, 4, 5]),
        np(&so, &f(1, 2), &pf(&[2, 3, 4, 5])),
        so.sugawara_field().unwrap(),
    ];
    let mut so_pairs: Vec<(Field, Field)> = Vec::new();
    for (a, x) in so_fields.iter().enumerate() {
        for y in &so_fields[a..] {
            if x.weight().unwrap() + y.weight().unwrap() <= 8 {
                so_pairs.push((x.clone(), y.clone()));
            }
        }
    }
    so_pairs.push((so.c4_field().unwrap(), f(1, 2)));
    so_pairs.push((so.c4_field().unwrap(), pf(&[1, 2, 3, 4])));

    let j = |a| sl.current(a).unwrap();
    let w = sl.w_field().unwrap();
    let wa = sl.w_a_fields().unwrap();
    let sl_fields: Vec<Field> = vec![
        j(0),
        j(3),
        d(&sl, &j(1)),
        w.clone(),
        wa[0].clone(),
        wa[4].clone(),
    ];
    let mut sl_pairs: Vec<(Field, Field)> = Vec::new();
    for (a, x) in sl_fields.iter().enumerate() {
        for y in &sl_fields[a..] {
            if x.weight().unwrap() + y.weight().unwrap() <= 8 {
                sl_pairs.push((x.clone(), y.clone()));
            }
        }
    }

    let mut compared = 0;
    let mut coeffs = 0;
    for (e, pairs) in [(&so, &so_pairs), (&sl, &sl_pairs)] {
        let vm = VacuumModule::new(e.algebra().clone(), 9);
        for (a, b) in pairs {
            let r = e.contract(a, b, 1).unwrap();
            for m in 0..=r.singular_depth() as i64 + 1 {
                assert_eq!(
                    vm.state_of(&r.pole(m)).unwrap(),
                    vm.pole(a, m, b).unwrap(),
                    "pole {m}"
                );
                coeffs += 1;
            }
            compared += 1;
        }
    }
    assert!(compared >= 25);
    verdict(
        7,
        true,
        &format!(
            "{compared} field pairs (weight <= 8), {coeffs} coefficients equal to the mode oracle"
        ),
    );
}

#[test]
fn criterion_8_kz_emission() {
    let j = set(&[1, 2, 3, 4]);
    let mut sizes = Vec::new();
    for (n, r) in [(5, 2), (6, 3)] {
        let eq = kz::emit_equation_with(wb(), n, r, &j).unwrap();
        assert_eq!(
            kz::keyed_terms(&eq.rhs),
            kz::termwise_expansion(n, r, &j).unwrap()
        );
        assert_eq!(Some(eq.lhs.clone()), c4_minus_one_scalar(wb(), n).unwrap());
        sizes.push(format!(
            "N={n} r={r}: {} terms, lhs={}",
            eq.rhs.len(),
            eq.lhs
        ));
    }
    assert_eq!(
        kz::emit_equation_with(wb(), 6, 3, &j).unwrap().lhs,
        poly("26k^2+156k+232")
    );

    let out = std::env::temp_dir().join(format!("kz-accept-{}.txt", std::process::id()));
    let run = Command::new(env!("CARGO_BIN_EXE_wzw-ope"))
        .args([
            "kz", "emit", "--N", "5", "--r", "2", "--J", "1,2,3,4", "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let _ = std::fs::remove_file(&out);
    assert_eq!(
        text.lines().next(),
        Some("kz4 N=5 r=2 J=1,2,3,4 lhs=17k^2+83k+98")
    );

    let eqv = kz::check_equivariance(5, 2, Q::new(7, 3), &[Q::int(0), Q::new(5, 2)], 7).unwrap();
    assert!(eqv.holds(), "{:?}", eqv.failures);
    verdict(
        8,
        true,
        &format!(
            "{}; both equal the independent expansion; equivariance exact on {} (J, g) cases at N=5 r=2",
            sizes.join("; "),
            eqv.checked
        ),
    );
}

#[test]
fn criterion_9_determinism() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_wzw-ope"))
            .args(["verify-paper", "--seed", "7", "--format", "records"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    // structural failures are reported through the exit status
    assert_eq!(a.status.code(), Some(1));
    verdict(
        9,
        a.stdout == b.stdout,
        &format!("two runs byte-identical ({} bytes)", a.stdout.len()),
    );
}
