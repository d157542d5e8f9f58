use paramodular::eisenstein::jacobi_eisenstein;
use paramodular::hecke::{apply_op, jacobi_bound, reps_for, required_discriminant, t_down, t_up, OpLabel};
use paramodular::io::{paramodular_to_json, read_paramodular};
use paramodular::jacobi::{index_raise, validate_jacobi, JacobiExpansion};
use paramodular::maass::{gritsenko_lift, maass_check, LiftSource};
use paramodular::ntheory::{divisors, factorize, format_rational, frac, gcd3, parse_rational, rat};
use paramodular::paramod::{fricke_index_map, fricke_matrix, ExpansionBox, FourierIndex, ParamodularExpansion};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LEVELS: [i64; 5] = [1, 2, 3, 5, 6];

/// `a e*_{k,N} + b e*_{k,1} | V_N`, a Jacobi form of index N.
fn jacobi_combo(k: i64, level: i64, a: i64, b: i64, n_max: i64) -> JacobiExpansion {
    let e = jacobi_eisenstein(k, level, n_max).unwrap();
    let raised = index_raise(&jacobi_eisenstein(k, 1, n_max * level).unwrap(), level).unwrap().truncate(n_max);
    e.scale(&rat(a)).add_scaled(&raised, &rat(b)).unwrap()
}

fn level_strategy() -> impl Strategy<Value = i64> {
    prop::sample::select(LEVELS.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fricke_map_keeps_discriminant_and_content(
        level in level_strategy(),
        pick in 0usize..8,
        n in 0i64..20,
        m in 0i64..20,
        r in -40i64..40,
    ) {
        let ds = divisors(level as u64);
        let d = ds[pick % ds.len()] as i64;
        let v = fricke_matrix(level, d).unwrap();
        prop_assert!(v.determinant_holds());
        let t = FourierIndex::new(n, r, m);
        let s = fricke_index_map(t, &v);
        prop_assert_eq!(s.discriminant(level), t.discriminant(level));
        prop_assert_eq!(gcd3(s.n, s.r, s.m).abs(), gcd3(n, r, m).abs());
    }

    #[test]
    fn factorization_matches_divisors(n in 1u64..5000) {
        let f = factorize(n);
        prop_assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
        let count: u64 = f.iter().map(|&(_, e)| u64::from(e) + 1).product();
        prop_assert_eq!(divisors(n).len() as u64, count);
    }

    #[test]
    fn rational_text_roundtrips(a in -10_000i64..10_000, b in 1i64..10_000) {
        let x = frac(a, b);
        prop_assert_eq!(parse_rational(&format_rational(&x)), Some(x));
    }

    #[test]
    fn json_roundtrip_is_byte_stable(
        level in level_strategy(),
        n_max in 0i64..4,
        m_max in 0i64..4,
        seed in any::<u64>(),
    ) {
        let bx = ExpansionBox::new(n_max, m_max);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<_> = bx
            .indices(level)
            .into_iter()
            .map(|t| (t, frac(rand::Rng::gen_range(&mut rng, -50..50), rand::Rng::gen_range(&mut rng, 1..20))))
            .collect();
        let f = ParamodularExpansion::from_coeffs(4, level, bx, coeffs).unwrap();
        let text = paramodular_to_json(&f);
        let back = read_paramodular(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(paramodular_to_json(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn index_raise_gives_jacobi_forms(k in prop::sample::select(vec![4i64, 6]), level in level_strategy()) {
        let phi = index_raise(&jacobi_eisenstein(k, 1, 8 * level).unwrap(), level).unwrap();
        prop_assert!(validate_jacobi(&phi).passed());
    }

    #[test]
    fn lifts_satisfy_maass_relations(
        k in prop::sample::select(vec![4i64, 6]),
        level in level_strategy(),
        a in -3i64..4,
        b in -3i64..4,
    ) {
        let phi = jacobi_combo(k, level, a, b, 12);
        let f = gritsenko_lift(&phi, level, ExpansionBox::new(3, 3)).unwrap();
        prop_assert!(maass_check(&f).passed());
        prop_assert!(f.is_r_symmetric());
    }

    #[test]
    fn elliptic_hecke_families_agree_on_lifts(
        level in level_strategy(),
        p in prop::sample::select(vec![2i64, 3]),
        a in -3i64..4,
        b in -3i64..4,
    ) {
        let phi = jacobi_combo(4, level, a, b, 40);
        let f = gritsenko_lift(&phi, level, ExpansionBox::new(6, 6)).unwrap();
        let up = t_up(&f, p).unwrap();
        let down = t_down(&f, p).unwrap();
        prop_assert_eq!(up.first_difference(&down, level), None);
    }

    #[test]
    fn representative_order_is_irrelevant(
        label in prop::sample::select(vec![OpLabel::TN, OpLabel::TStarN]),
        level in prop::sample::select(vec![1i64, 2]),
        seed in any::<u64>(),
    ) {
        let q = 3;
        let op = reps_for(label, q, level).unwrap();
        let out = ExpansionBox::new(1, 1);
        let need = jacobi_bound(required_discriminant(&op, out), level);
        let f = LiftSource::new(jacobi_combo(4, level, 1, 1, need), level).unwrap();
        let out = Some(out);
        let base = apply_op(&f, &op, out).unwrap();
        let mut shuffled = op.clone();
        shuffled.reps.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let again = apply_op(&f, &shuffled, out).unwrap();
        prop_assert_eq!(base.expansion, again.expansion);
    }
}
