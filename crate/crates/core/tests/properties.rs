use proptest::prelude::*;
use voa_core::remainder::{r1_closed_form, rn, scan_f, RemainderEngine};
use voa_core::scalars::{int, rat};
use voa_core::vertex::Level;
use voa_core::{ActionSpec, IndexList, LevelScalar, LieSpec, Rational, State, VertexAlgebra};

fn increasing(len: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let start = v.last().map_or(0, |&x| x + 1);
                (start..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn memoized_matches_unmemoized() {
    let mut memo = RemainderEngine::memoized();
    let mut plain = RemainderEngine::unmemoized();
    for n in 1..=3 {
        for i in increasing(n + 1, 4) {
            for j in increasing(n + 1, 4) {
                let m: u32 = i.iter().chain(&j).sum::<u32>() + 2 * n as u32;
                if m % 2 == 1 {
                    assert!(memo.rn(n, &i, &j).is_err());
                    continue;
                }
                assert_eq!(memo.rn(n, &i, &j).unwrap(), plain.rn(n, &i, &j).unwrap(), "n={} {:?} {:?}", n, i, j);
            }
        }
    }
    assert!(memo.memo_len() > 0);
}

#[test]
fn n1_matches_closed_form() {
    for i in increasing(2, 5) {
        for j in increasing(2, 5) {
            if (i.iter().sum::<u32>() + j.iter().sum::<u32>()) % 2 == 0 {
                assert_eq!(rn(1, &i, &j).unwrap(), r1_closed_form(&i, &j).unwrap());
            }
        }
    }
}

#[test]
fn f_is_one_rational_function() {
    // 1/2 - 1/(a+3) + 3/(a+2), fixed by five of the samples
    let scan = scan_f(1, 15).unwrap();
    assert!(scan.values.len() >= 7);
    for (a, v) in &scan.values {
        let a = int(*a as i64);
        let expect = rat(1, 2) - int(1) / (a.clone() + int(3)) + int(3) / (a + int(2));
        assert_eq!(*v, expect);
    }
    assert_eq!(scan.first_nonzero, Some(1));
}

proptest! {
    #[test]
    fn normalization_sign(mut v in proptest::collection::vec(0u32..8, 2..5), swap in 0usize..4) {
        let base = IndexList::normalize(&v);
        let s = swap % (v.len() - 1);
        v.swap(s, s + 1);
        let swapped = IndexList::normalize(&v);
        match (base, swapped) {
            (None, None) => {}
            (Some((a, l1)), Some((b, l2))) => {
                prop_assert_eq!(l1, l2);
                prop_assert_eq!(a, -b);
            }
            _ => prop_assert!(false, "zero-ness changed under a swap"),
        }
    }

    #[test]
    fn repeated_entries_vanish(v in proptest::collection::vec(0u32..6, 1..4), dup in 0usize..3) {
        let mut w = v.clone();
        w.push(v[dup % v.len()]);
        prop_assert!(IndexList::normalize(&w).is_none());
    }
}

#[test]
fn adjoint_sl2_commutators() {
    let spec = LieSpec::sl2();
    let ad = ActionSpec::adjoint(&spec);
    assert!(ad.validate(&spec).is_valid());
    let m = &ad.lie_generators;
    let comm = |a: usize, b: usize| {
        let ab = m[a].mul(&m[b]);
        let ba = m[b].mul(&m[a]);
        (0..3)
            .map(|r| (0..3).map(|c| ab.get(r, c) - ba.get(r, c)).collect::<Vec<Rational>>())
            .collect::<Vec<_>>()
    };
    let scaled = |g: usize, s: i64| m[g].to_rows().into_iter().map(|r| r.into_iter().map(|x| x * int(s)).collect()).collect::<Vec<Vec<Rational>>>();
    // (x, y, h) = (0, 1, 2)
    assert_eq!(comm(0, 1), scaled(2, 1));
    assert_eq!(comm(2, 0), scaled(0, 2));
    assert_eq!(comm(2, 1), scaled(1, -2));
}

#[test]
fn sugawara_at_level_one() {
    let alg = VertexAlgebra::with_level(LieSpec::sl2(), Level::Fixed(int(1)));
    let l = alg.sugawara(&int(2)).unwrap();
    assert_eq!(alg.circle_product(&l, 3, &l), State::vacuum().scale(&LevelScalar::from(rat(1, 2))));
    assert_eq!(alg.circle_product(&l, 1, &l), l.scale(&LevelScalar::from(int(2))));
    assert!(alg.sugawara(&int(-1)).is_err());
}

#[test]
fn heisenberg_basis_counts() {
    // partitions of w into parts coloured by two generators
    let counts: Vec<usize> = (0..=6).map(|w| voa_core::Monomial::basis(2, w).len()).collect();
    assert_eq!(counts, vec![1, 2, 5, 10, 20, 36, 65]);
}
