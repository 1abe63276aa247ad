use std::f64::consts::PI;

use hypercross_core::hypercross::{cardinality, materialize, CrossParams};
use hypercross_core::tensorfield::{check_projection_lemma, CoefficientField};
use hypercross_core::{MultiIndex, Tail, WeightSequence};
use proptest::prelude::*;

fn sequence() -> impl Strategy<Value = WeightSequence> {
    (prop::collection::vec(0.05f64..0.45, 1..=3), prop::option::of((0.01f64..0.1, 2.0f64..4.0))).prop_map(
        |(head, tail)| {
            let tail = tail.map_or(Tail::Zero, |(kappa, q)| Tail::Power { kappa, q });
            WeightSequence::new(head, tail).unwrap()
        },
    )
}

fn field() -> impl Strategy<Value = CoefficientField> {
    (1usize..=3).prop_flat_map(|m| {
        let nonzero = prop_oneof![-12i64..=-1, 1i64..=12];
        let entry = (prop::collection::vec(nonzero, m), prop::collection::vec(0u32..=3, 3), -1.0f64..1.0);
        prop::collection::vec(entry, 1..=25).prop_map(move |entries| {
            let mut v = CoefficientField::new(m);
            for (k, s, x) in entries {
                v.insert(k, MultiIndex::from_dense(&s), x).unwrap();
            }
            v
        })
    })
}

fn v_norm(v: &CoefficientField) -> f64 {
    v.iter()
        .map(|(idx, x)| 4.0 * PI * PI * idx.k.iter().map(|&k| (k * k) as f64).sum::<f64>() * x * x)
        .sum::<f64>()
        .sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn truncation_error_is_bounded(v in field(), b in sequence(), beta in 0.0f64..2.0, gap in 0.2f64..3.0, t in 1.0f64..40.0) {
        let r = check_projection_lemma(&v, t, beta + gap, beta, &b).unwrap();
        prop_assert!(r.ok, "{r:?}");
    }

    #[test]
    fn truncation_splits_orthogonally(v in field(), b in sequence(), beta in 0.0f64..2.0, gap in 0.2f64..3.0, t in 1.0f64..40.0) {
        let kept = v.project(t, beta + gap, beta, &b);
        let rest = v.sub(&kept);
        let whole = v.norm_k(beta).powi(2);
        let parts = kept.norm_k(beta).powi(2) + rest.norm_k(beta).powi(2);
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0));
    }

    #[test]
    fn truncation_is_idempotent(v in field(), b in sequence(), beta in 0.0f64..2.0, gap in 0.2f64..3.0, t in 1.0f64..40.0) {
        let once = v.project(t, beta + gap, beta, &b);
        prop_assert_eq!(once.project(t, beta + gap, beta, &b), once);
    }

    #[test]
    fn energy_norm_embeds_in_k1(v in field()) {
        let m = v.dimension() as f64;
        prop_assert!(v_norm(&v) <= 2.0 * PI * m.sqrt() * v.norm_k(1.0) * (1.0 + 1e-12));
    }

    #[test]
    fn crosses_are_nested(a in 1.0f64..2.5, m in 1u32..=2, t in 1.0f64..12.0, grow in 1.0f64..3.0) {
        let b = WeightSequence::new(vec![0.25, 0.125], Tail::Power { kappa: 1.0 / 16.0, q: 3.0 }).unwrap();
        let small = materialize(&CrossParams::new(a, m, t, b.clone()), 1 << 22).unwrap();
        let large = materialize(&CrossParams::new(a, m, t * grow, b.clone()), 1 << 22).unwrap();
        let larger: std::collections::BTreeSet<_> = large.pairs.iter().collect();
        prop_assert!(small.pairs.iter().all(|p| larger.contains(p)));
        prop_assert_eq!(cardinality(&CrossParams::new(a, m, t, b)).unwrap().count, Some(small.len() as u64));
    }
}
