//! Property suites for the algebraic kernels, each checked against a naive
//! oracle from `common`.

mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use p4surf::bott::{omega_sections, BottTable};
use p4surf::extalg::{binomial, ExtElem, ExtMonomial};
use p4surf::ff::{FMatrix, Field, PrimeField};
use p4surf::poly::{groebner, GbOptions, Ideal, Mono, Poly};
use p4surf::search::random_ematrix;

const PRIMES: [u32; 4] = [2, 3, 5, 7];

// ---- exterior algebra ----

fn homogeneous(k: usize, coeffs: &[u32], p: u32) -> ExtElem {
    let n = binomial(5, k);
    let c: Vec<u32> = coeffs.iter().take(n).map(|&x| x % p).collect();
    ExtElem::from_graded(k, &c)
}

fn elem_strategy() -> impl Strategy<Value = (usize, Vec<u32>)> {
    (0usize..=5, prop::collection::vec(0u32..7, 10))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn exterior_axioms(pi in 0usize..4, x in elem_strategy(), y in elem_strategy(), z in elem_strategy()) {
        let p = PRIMES[pi];
        let f = PrimeField::new(p).unwrap();
        let (a, b, c) = (homogeneous(x.0, &x.1, p), homogeneous(y.0, &y.1, p), homogeneous(z.0, &z.1, p));
        let ab = a.wedge(&b, &f);
        prop_assert_eq!(ab.raw(), &naive_wedge(&a, &b, &f));
        // anticommutativity
        let ba = b.wedge(&a, &f);
        let expected = if x.0 * y.0 % 2 == 1 { ba.neg(&f) } else { ba };
        prop_assert_eq!(ab.raw(), expected.raw());
        // associativity
        let (left, right) = (ab.wedge(&c, &f), a.wedge(&b.wedge(&c, &f), &f));
        prop_assert_eq!(left.raw(), right.raw());
        // nilpotence: odd elements square to zero, and words longer than 5 vanish
        if x.0 % 2 == 1 {
            prop_assert!(a.wedge(&a, &f).is_zero());
        }
        if x.0 + y.0 > 5 {
            prop_assert!(ab.is_zero());
        }
    }
}

#[test]
fn product_of_six_linear_forms_vanishes() {
    let f = PrimeField::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let mut acc = ExtElem::monomial(ExtMonomial::ONE, 1);
        for _ in 0..6 {
            let c: [u32; 5] = std::array::from_fn(|_| rng.gen_range(0..5));
            acc = acc.wedge(&ExtElem::linear(&c), &f);
        }
        assert!(acc.is_zero());
    }
}

// ---- flattenings ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rank_nullity_on_every_flattening(
        pi in 0usize..4,
        seed in any::<u64>(),
        source in prop::collection::vec(0i32..=4, 1..5),
        target in prop::collection::vec(-1i32..=3, 1..4),
    ) {
        let f = PrimeField::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_ematrix(&f, &source, &target, &mut rng);
        let (lo, hi) = m.degree_window().unwrap();
        for d in lo..=hi {
            let a = m.flatten(d);
            let rank = a.rank(&f);
            let kernel = a.kernel_basis(&f);
            prop_assert_eq!(rank + kernel.len(), a.cols());
            prop_assert_eq!(rank, a.transpose().rank(&f));
            for v in &kernel {
                prop_assert!(a.mul_vec(v, &f).iter().all(|&x| x == 0));
            }
            if !kernel.is_empty() {
                prop_assert_eq!(FMatrix::from_rows(a.cols(), &kernel).rank(&f), kernel.len());
            }
        }
    }
}

// ---- Bott dimensions ----

#[test]
fn bott_dimensions_match_koszul_kernels() {
    let cases = [(3, 4, 5), (2, 3, 10), (1, 2, 10), (2, 4, 45), (1, 3, 40), (3, 5, 24)];
    for p in [3, 5, 7] {
        let f = PrimeField::new(p).unwrap();
        for (i, t, want) in cases {
            assert_eq!(BottTable::h0(i, t as i64), want);
            assert_eq!(koszul_kernel_rank(i, t, &f), want, "p = {p}, Ω^{i}({t})");
            assert_eq!(omega_sections(i, (t - i) as u32, &f).unwrap().dim(), want);
        }
    }
}

// ---- Gröbner bases ----

fn mono_from(e: &[u32]) -> Mono {
    Mono::from_exps(e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn monomial_ideals_cross_oracle(
        n in 2usize..=5,
        raw in prop::collection::vec(prop::collection::vec(0u32..4, 5), 1..6),
    ) {
        let f = PrimeField::new(5).unwrap();
        let gens: Vec<Vec<u32>> = raw
            .into_iter()
            .map(|e| e[..n].to_vec())
            .filter(|e| e.iter().sum::<u32>() > 0)
            .collect();
        prop_assume!(!gens.is_empty());
        let polys: Vec<Poly> = gens.iter().map(|e| Poly::term(mono_from(e), 1)).collect();
        let ideal = Ideal::new(f.clone(), n, polys).unwrap();
        let hp = ideal.hilbert_polynomial().unwrap();
        let top = gens.iter().map(|g| g.iter().sum::<u32>()).max().unwrap();
        // the Hilbert function is polynomial from the largest generator degree on
        // (up to n − 1 more for the lcm lattice); check well past that
        for d in (top + n as u32 * 4)..(top + n as u32 * 4 + 3) {
            let count = standard_count(&gens, n, d) as i64;
            prop_assert_eq!(hp.eval(d as i64), num_rational::Ratio::from_integer(count as i128));
        }
        prop_assert_eq!(hp.dimension(), naive_krull(&gens, n) as i64 - 1);
        // Gröbner basis of a monomial ideal: its minimal generators
        let gb = ideal.groebner(&GbOptions::default()).unwrap();
        for g in &gb.basis {
            prop_assert_eq!(g.len(), 1);
        }
        for g in &gens {
            prop_assert!(gb.leading_monomials().iter().any(|l| divides(&l.exps()[..n], g)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn groebner_bases_satisfy_buchberger(seed in any::<u64>(), n in 3usize..=4, count in 2usize..=4) {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<Poly> = (0..count)
            .map(|_| random_form(n, rng.gen_range(1..=3), &f, &mut rng))
            .filter(|g| !g.is_zero())
            .collect();
        prop_assume!(!gens.is_empty());
        let gb = groebner(&gens, n, &f, &GbOptions::default()).unwrap();
        prop_assert!(gb.complete);
        for g in &gens {
            prop_assert!(gb.normal_form(g, &f).is_zero());
        }
        // every S-polynomial reduces to zero
        for i in 0..gb.basis.len() {
            for j in i + 1..gb.basis.len() {
                let (gi, gj) = (&gb.basis[i], &gb.basis[j]);
                let (li, ci) = gi.lead().unwrap();
                let (lj, cj) = gj.lead().unwrap();
                let l = li.lcm(lj);
                let s = gi.mul_term(li.div(l), f.inv(ci), &f).sub(&gj.mul_term(lj.div(l), f.inv(cj), &f), &f);
                prop_assert!(gb.normal_form(&s, &f).is_zero());
            }
        }
        // standard monomials of the leading ideal count (S/I)_d
        let lms: Vec<Vec<u32>> = gb.leading_monomials().iter().map(|m| m.exps()[..n].to_vec()).collect();
        for d in 0..=6 {
            prop_assert_eq!(standard_count(&lms, n, d), macaulay_hilbert(&gens, n, d, &f));
        }
    }
}
