//! Randomized checks of the structural invariants of factorizations,
//! twists and point orbits.

use ncmf::algebra::{Algebra, AlgebraElement, GradedAutomorphism, NormalElement};
use ncmf::copoint::SkewContext;
use ncmf::grmod::GradedMatrix;
use ncmf::linalg::Matrix;
use ncmf::nmf::{nmf_period, Nmf, TrivialKind};
use ncmf::ring::Ring;
use ncmf::scalar::{FieldElem, FieldSpec};
use ncmf::twist::{twist_nmf, untwist_nmf};
use proptest::prelude::*;

const F13: FieldSpec = FieldSpec::PrimeField { p: 13 };

fn plane() -> Algebra {
    Algebra::free(F13, 2, &[0, 1]).unwrap()
}

fn lin(s: &Algebra, a: &FieldElem, b: &FieldElem) -> AlgebraElement {
    s.gen(0).scale(a).add(&s.gen(1).scale(b))
}

fn normal(s: &Algebra, alpha: &FieldElem) -> NormalElement {
    let f = s.gen(0).mul(&s.gen(1)).scale(alpha).add(&s.gen(1).mul(&s.gen(0)));
    s.normalizing_automorphism(&f, 8).unwrap()
}

/// Rank-one factorization `a x + b y`, `b^-1 x + alpha a^-1 y` of
/// `alpha xy + yx`.
fn rank_one(s: &Algebra, alpha: i64, a: i64, b: i64) -> Nmf {
    let (alpha, a, b) = (F13.from_i64(alpha), F13.from_i64(a), F13.from_i64(b));
    let nf = normal(s, &alpha);
    let ring = Ring::new(s);
    let p0 = GradedMatrix::new(&ring, vec![0], vec![1], vec![vec![lin(s, &a, &b)]]).unwrap();
    let second = lin(s, &b.inv().unwrap(), &(&alpha * &a.inv().unwrap()));
    let p1 = GradedMatrix::new(&ring, vec![1], vec![2], vec![vec![second]]).unwrap();
    Nmf::complete(p0, p1, &nf, 8).unwrap()
}

fn cyclic() -> SkewContext {
    let k = F13;
    let (a12, a23, a13) = (k.from_i64(2), k.from_i64(3), k.from_i64(6));
    let alpha = vec![
        vec![k.one(), a12.clone(), a13.clone()],
        vec![a12.inv().unwrap(), k.one(), a23.clone()],
        vec![a13.inv().unwrap(), a23.inv().unwrap(), k.one()],
    ];
    SkewContext::new(k, alpha, 8).unwrap()
}

fn unit() -> impl Strategy<Value = i64> {
    1i64..13
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn components_multiply_to_f_and_follow_nu(alpha in unit(), a in unit(), b in unit()) {
        let s = plane();
        let nmf = rank_one(&s, alpha, a, b);
        let nf = nmf.f().clone();
        for i in -4i64..=4 {
            let (c, next) = (nmf.component(i), nmf.component(i + 1));
            prop_assert_eq!(c.compose(&next).unwrap(), GradedMatrix::diagonal(nmf.ring(), c.target(), &nf.f));
            let moved = c.map_entries(|e| nf.nu.apply(e)).shifted(nmf.d());
            prop_assert_eq!(nmf.component(i + 2), moved);
        }
        prop_assert!(nmf.verify(8).ok);
    }

    #[test]
    fn rescaling_consistent_sequences_verifies(alpha in unit(), a in unit(), b in unit(), len in 2usize..5) {
        let s = plane();
        let al = F13.from_i64(alpha);
        let nf = normal(&s, &al);
        let ring = Ring::new(&s);
        let seq: Vec<GradedMatrix> = (0..len)
            .map(|i| {
                let c = &al.pow(i as i64).unwrap() * &F13.from_i64(b);
                GradedMatrix::new(&ring, vec![i as i64], vec![i as i64 + 1], vec![vec![lin(&s, &F13.from_i64(a), &c)]]).unwrap()
            })
            .collect();
        let nmf = Nmf::rescale(&seq, None, &nf, 8).unwrap();
        prop_assert!(nmf.verify(8).ok);
    }

    #[test]
    fn direct_sum_adds_coker_windows(x in (unit(), unit(), unit()), y in (unit(), unit()), shift in -2i64..3) {
        let s = plane();
        let p = rank_one(&s, x.0, x.1, x.2);
        let q = rank_one(&s, x.0, y.0, y.1);
        let q = if shift == 0 { q } else {
            let t = Nmf::trivial(TrivialKind::Left, &[shift], p.f());
            q.direct_sum(&t).unwrap()
        };
        let sum = p.direct_sum(&q).unwrap();
        prop_assert!(sum.verify(8).ok);
        let (a, b, c) = (p.coker(), q.coker(), sum.coker());
        let (lo_a, wa) = a.hilbert_window(8);
        let (lo_b, wb) = b.hilbert_window(8);
        let (lo_c, wc) = c.hilbert_window(8);
        for (k, &d) in wc.iter().enumerate() {
            let e = lo_c + k as i64;
            let at = |lo: i64, w: &[usize]| usize::try_from(e - lo).ok().and_then(|j| w.get(j).copied()).unwrap_or(0);
            prop_assert_eq!(d, at(lo_a, &wa) + at(lo_b, &wb), "degree {}", e);
        }
    }

    #[test]
    fn pair_form_round_trips(alpha in unit(), a in unit(), b in unit()) {
        let s = plane();
        let nmf = rank_one(&s, alpha, a, b);
        let tmf = nmf.to_tmf();
        prop_assert!(tmf.verify_window(8));
        let back = Nmf::from_tmf(&tmf, 8).unwrap();
        prop_assert_eq!(&back, &nmf);
        prop_assert_eq!(back.to_tmf(), tmf);
    }

    #[test]
    fn trivial_complexes_are_exact(shift in -3i64..4, window in 2usize..11, left in any::<bool>()) {
        let s = plane();
        let nf = normal(&s, &F13.from_i64(5));
        let kind = if left { TrivialKind::Left } else { TrivialKind::Right };
        let t = Nmf::trivial(kind, &[shift], &nf);
        for r in t.complex(-2, 3, window).exactness_all().unwrap() {
            prop_assert!(r.exact, "position {}", r.position);
        }
    }

    #[test]
    fn twisting_round_trips(alpha in unit(), a in unit(), b in unit(), c in unit()) {
        let s = plane();
        let nmf = rank_one(&s, alpha, a, b);
        let c = F13.from_i64(c);
        let sigma = GradedAutomorphism::diagonal(&s, &[c.clone(), c.inv().unwrap()]).unwrap();
        let t = twist_nmf(&nmf, &sigma, 8).unwrap();
        prop_assert!(t.verify(-4..=4));
        prop_assert_eq!(untwist_nmf(&t).unwrap(), nmf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn period_is_invariant_under_base_change(alpha in unit(), a in unit(), b in unit(), u in unit(), v in unit()) {
        let s = plane();
        let nmf = rank_one(&s, alpha, a, b);
        let moved = nmf
            .change_basis(&Matrix::from_rows(F13, vec![vec![F13.from_i64(u)]]), &Matrix::from_rows(F13, vec![vec![F13.from_i64(v)]]))
            .unwrap();
        let p = nmf_period(&nmf, 8, 6, 1, 16).unwrap().period;
        prop_assert_eq!(nmf_period(&moved, 8, 6, 2, 16).unwrap().period, p);
        let order = (1..=12).find(|&j| nmf.f().nu.pow(j).is_identity()).unwrap();
        if let Some(l) = p {
            prop_assert!(l as i64 <= 2 * order);
        }
    }

    #[test]
    fn point_orbits_certify_and_close(x in 0i64..13, y in 0i64..13) {
        let ctx = cyclic();
        let p = ctx.point(vec![F13.from_i64(x), F13.from_i64(y), F13.one()]).unwrap();
        let res = ctx.nmf_from_point(&p, 6, 8).unwrap();
        for (i, w) in res.orbit.forms.windows(2).enumerate() {
            let last = |j: usize| res.orbit.points[j].coords()[2].clone();
            prop_assert_eq!(w[0].mul(&w[1]), ctx.f.f.scale(&(&last(i + 1) * &last(i))));
        }
        let first_return = (1..res.orbit.points.len()).find(|&j| res.orbit.points[j] == p);
        prop_assert_eq!(res.period, first_return);
        let certified = nmf_period(&res.nmf, 6, 6, 1, 16).unwrap().period;
        prop_assert_eq!(certified, res.period);
        let ext = ctx.build_extension_nmf(&[p.clone(), p], 8, 4).unwrap();
        prop_assert!(ext.nmf.verify(8).ok);
        prop_assert!(ext.resolution.is_linear());
    }

    #[test]
    fn coordinate_lines_are_stable(t in 1i64..13, line in 0usize..3) {
        let ctx = cyclic();
        let mut coords = vec![F13.one(), F13.from_i64(t), F13.from_i64(t + 1)];
        coords[line] = F13.zero();
        let p = ctx.point(coords).unwrap();
        let orbit = ctx.orbit(&p, 4, 6).unwrap();
        for q in &orbit.points {
            prop_assert!(q.coords()[line].is_zero(), "{} left the line", q);
        }
    }
}
