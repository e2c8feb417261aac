use proptest::prelude::*;
use wzw_ope::indexset::{sort_sign, IndexSet};
use wzw_ope::kz::Tensor;
use wzw_ope::parse::{parse_expr, Expr};
use wzw_ope::Q;

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i128..20).prop_map(|n| Expr::Num(Q::new(n, 1))),
        Just(Expr::K),
        (1usize..9).prop_map(Expr::Current),
        (1usize..7, 1usize..7).prop_map(|(i, j)| Expr::Skew(i, j)),
        Just(Expr::Pf(vec![1, 2, 3, 4])),
        Just(Expr::T),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Deriv(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Normal(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), 1u32..4).prop_map(|(a, p)| Expr::Pow(Box::new(a), p)),
        ]
    })
}

proptest! {
    #[test]
    fn printed_expressions_reparse(e in expr()) {
        let s = e.to_string();
        let back = parse_expr(&s).unwrap();
        prop_assert_eq!(back.to_string(), s);
    }

    #[test]
    fn from_seq_sign_is_sort_sign(v in Just((1usize..=8).collect::<Vec<_>>()).prop_shuffle(), len in 0usize..=8) {
        let seq = &v[..len];
        let (set, sign) = IndexSet::from_seq(seq).unwrap();
        prop_assert_eq!(sign, sort_sign(seq));
        prop_assert_eq!(set.len(), len);
    }

    #[test]
    fn slot_action_is_linear(a in -5i64..5, s1 in 0u64..50, s2 in 0u64..50, i in 1usize..5, j in 1usize..6) {
        prop_assume!(i < j);
        let jset = IndexSet::sorted(&[1, 2, 3, 4]);
        let x = Tensor::random_state(5, 2, &jset, s1).unwrap();
        let y = Tensor::random_state(5, 2, &jset, s2).unwrap();
        let pair = IndexSet::sorted(&[i, j]);
        for slot in 1..=2 {
            let mut lhs = x.scaled(Q::int(a));
            lhs.add_assign(&y);
            let mut rhs = x.apply(slot, &pair).scaled(Q::int(a));
            rhs.add_assign(&y.apply(slot, &pair));
            prop_assert_eq!(lhs.apply(slot, &pair), rhs);
        }
    }
}
