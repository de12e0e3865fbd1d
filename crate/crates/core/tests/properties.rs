use proptest::prelude::*;

use qmds::gf::{make_field, Element, FieldCtx};
use qmds::verify::{brute_dual_distance, brute_min_distance, certify, check_self_orthogonal, dual_distance, min_distance, rank};
use qmds::{construct, GeneratorMatrix};

fn field(p: u32, r: u32) -> FieldCtx {
    make_field(p, r).unwrap()
}

fn matrix(ctx: &FieldCtx, a: &[u32], b: &[u32]) -> GeneratorMatrix {
    let lift = |v: &[u32]| v.iter().map(|&e| ctx.element(e % ctx.order()).unwrap()).collect::<Vec<Element>>();
    GeneratorMatrix::new(lift(a), lift(b)).unwrap()
}

fn rows(max_n: usize) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (3..=max_n).prop_flat_map(|n| (prop::collection::vec(0u32..625, n), prop::collection::vec(0u32..625, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn distances_match_enumeration(p in prop::sample::select(vec![3u32, 5]), (a, b) in rows(10)) {
        let ctx = field(p, 1);
        let m = matrix(&ctx, &a, &b);
        if rank(&ctx, &m) == 2 {
            prop_assert_eq!(min_distance(&ctx, &m).unwrap(), brute_min_distance(&ctx, &m).unwrap());
        }
        prop_assert_eq!(dual_distance(&ctx, &m).unwrap(), brute_dual_distance(&ctx, &m));
    }

    #[test]
    fn near_repetition_columns(p in prop::sample::select(vec![3u32, 5]), (a, b) in rows(6), dup in 0usize..6, scale in 1u32..25) {
        // Force a proportional pair so the weight-2 dual branch is exercised.
        let ctx = field(p, 1);
        let mut m = matrix(&ctx, &a, &b);
        let n = m.n();
        let (src, dst) = (dup % n, (dup + 1) % n);
        let c = ctx.element(1 + scale % (ctx.order() - 1)).unwrap();
        m.set(0, dst, ctx.mul(c, m.get(0, src)));
        m.set(1, dst, ctx.mul(c, m.get(1, src)));
        prop_assert_eq!(dual_distance(&ctx, &m).unwrap(), brute_dual_distance(&ctx, &m));
        prop_assert!(dual_distance(&ctx, &m).unwrap() <= 2);
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism(x in 0u32..625, y in 0u32..625) {
        let ctx = field(5, 2);
        let (x, y) = (ctx.element(x).unwrap(), ctx.element(y).unwrap());
        prop_assert_eq!(ctx.conj(ctx.conj(x)), x);
        prop_assert_eq!(ctx.conj(ctx.mul(x, y)), ctx.mul(ctx.conj(x), ctx.conj(y)));
        prop_assert_eq!(ctx.conj(ctx.add(x, y)), ctx.add(ctx.conj(x), ctx.conj(y)));
        prop_assert!(ctx.is_in_base(ctx.norm(x)));
    }

    #[test]
    fn hermitian_product_is_conjugate_symmetric((a, b) in rows(8)) {
        let ctx = field(5, 1);
        let m = matrix(&ctx, &a, &b);
        let [r1, r2] = m.rows();
        let xy = ctx.hermitian_ip(r1, r2).unwrap();
        let yx = ctx.hermitian_ip(r2, r1).unwrap();
        prop_assert_eq!(ctx.conj(xy), yx);
    }

    #[test]
    fn certificates_survive_permutation_and_scaling(
        n in 4usize..=26,
        seed in any::<u64>(),
        c in 1u32..25,
    ) {
        let ctx = field(5, 1);
        let built = construct(&ctx, n).unwrap();
        let mut cols: Vec<(Element, Element)> = built.matrix.columns().collect();
        // Deterministic shuffle and a unit-norm column scaling keep every property.
        let mut s = seed;
        for i in (1..cols.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            cols.swap(i, (s >> 33) as usize % (i + 1));
        }
        let lambda = ctx.alpha_pow(((ctx.q() - 1) * c) as i64);
        prop_assert_eq!(ctx.norm(lambda), Element::ONE);
        cols[0] = (ctx.mul(lambda, cols[0].0), ctx.mul(lambda, cols[0].1));
        let m = GeneratorMatrix::from_columns(cols).unwrap();
        prop_assert!(check_self_orthogonal(&ctx, &m));
        let cert = certify(&ctx, &m);
        prop_assert!(cert.passes());
        prop_assert_eq!(cert.min_distance, Some(n - 1));
    }
}
