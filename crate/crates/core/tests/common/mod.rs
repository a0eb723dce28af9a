//! Naive oracles shared by the property suites and the acceptance report.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;

use p4surf::extalg::ExtElem;
use p4surf::ff::{FMatrix, Field, PrimeField};
use p4surf::fixtures;
use p4surf::geometry::{lemma_bounds_check, verify_point, zazb_intersection};
use p4surf::poly::{monomials_of_degree, Poly};
use p4surf::search::{a1_with_shared_planes, trial_rng};

/// Sign of sorting `idx` into increasing order, or `None` on a repeat.
pub fn sort_sign(mut idx: Vec<usize>) -> Option<bool> {
    let mut neg = false;
    for i in 0..idx.len() {
        for j in 0..idx.len() - 1 - i {
            if idx[j] == idx[j + 1] {
                return None;
            }
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                neg = !neg;
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(neg)
}

pub fn indices(bits: u8) -> Vec<usize> {
    (0..5).filter(|i| bits >> i & 1 == 1).collect()
}

/// Wedge product by expanding into words and sorting.
pub fn naive_wedge(a: &ExtElem, b: &ExtElem, f: &PrimeField) -> [u32; 32] {
    let mut out = [0u32; 32];
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let mut word = indices(ma);
            word.extend(indices(mb));
            if let Some(neg) = sort_sign(word) {
                let c = f.mul(ca, cb);
                let slot = (ma | mb) as usize;
                out[slot] = f.add(out[slot], if neg { f.neg(c) } else { c });
            }
        }
    }
    out
}

/// Exponent vectors of degree `d` in `n` variables.
pub fn exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in exponents(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect()).collect()
}

/// `h⁰Ωⁱ(t)` as the kernel of `∧ⁱW⊗S_{t−i} → ∧^{i−1}W⊗S_{t−i+1}`,
/// `x_J⊗s ↦ Σ_k ± x_{J∖j_k}⊗x_{j_k}s`, built from scratch.
pub fn koszul_kernel_rank(i: usize, t: usize, f: &PrimeField) -> usize {
    let k = (t - i) as u32;
    let src_mons = exponents(5, k);
    let tgt_mons = exponents(5, k + 1);
    let tgt_index: HashMap<Vec<u32>, usize> = tgt_mons.iter().cloned().enumerate().map(|(a, m)| (m, a)).collect();
    let src_sets = subsets(5, i);
    let tgt_sets = subsets(5, i - 1);
    let set_index: HashMap<Vec<usize>, usize> = tgt_sets.iter().cloned().enumerate().map(|(a, s)| (s, a)).collect();
    let mut m = FMatrix::zeros(tgt_sets.len() * tgt_mons.len(), src_sets.len() * src_mons.len());
    for (jx, set) in src_sets.iter().enumerate() {
        for (sx, mon) in src_mons.iter().enumerate() {
            for (pos, &v) in set.iter().enumerate() {
                let mut rest = set.clone();
                rest.remove(pos);
                let mut bigger = mon.clone();
                bigger[v] += 1;
                let row = set_index[&rest] * tgt_mons.len() + tgt_index[&bigger];
                let col = jx * src_mons.len() + sx;
                m.set(row, col, if pos % 2 == 1 { f.neg(1) } else { 1 });
            }
        }
    }
    m.cols() - m.rank(f)
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Standard monomials of degree `d` for monomial generators, counted by brute force.
pub fn standard_count(gens: &[Vec<u32>], n: usize, d: u32) -> usize {
    exponents(n, d).iter().filter(|m| !gens.iter().any(|g| divides(g, m))).count()
}

/// Largest set of variables carrying no generator: the Krull dimension.
pub fn naive_krull(gens: &[Vec<u32>], n: usize) -> usize {
    (0..=n)
        .rev()
        .find(|&k| {
            subsets(n, k).iter().any(|vars| gens.iter().all(|g| (0..n).any(|i| g[i] > 0 && !vars.contains(&i))))
        })
        .unwrap()
}

pub fn random_form<R: Rng>(n: usize, d: u32, f: &PrimeField, rng: &mut R) -> Poly {
    let mut terms = Vec::new();
    for m in monomials_of_degree(n, d) {
        if rng.gen_bool(0.5) {
            terms.push((m, rng.gen_range(0..f.p())));
        }
    }
    Poly::from_terms(terms, f)
}

/// `dim (S/I)_d` from the Macaulay matrix of all `m·g` of degree `d`.
pub fn macaulay_hilbert(gens: &[Poly], n: usize, d: u32, f: &PrimeField) -> usize {
    let basis = monomials_of_degree(n, d);
    let mut rows = Vec::new();
    for g in gens {
        let gd = g.degree().unwrap();
        if gd > d {
            continue;
        }
        for m in monomials_of_degree(n, d - gd) {
            rows.push(g.mul_term(m, 1, f).coords(&basis));
        }
    }
    basis.len() - if rows.is_empty() { 0 } else { FMatrix::from_rows(basis.len(), &rows).rank(f) }
}

/// Outcome of the Appendix sweep over random `A_1`.
#[derive(Debug, Default)]
pub struct LemmaSweep {
    pub valid: usize,
    pub skipped: usize,
    pub violations: Vec<String>,
    pub max_r: usize,
}

/// `samples` random `A_1` with finite `Z_A ∩ Z_B`; a third of them share 0, 1
/// or 2 planes with `B_1` so that `r > 0` occurs.
pub fn lemma_sweep(p: u32, samples: usize) -> LemmaSweep {
    let b1 = if p == 3 { fixtures::b1_f3() } else { fixtures::b1_f5() };
    let mut out = LemmaSweep::default();
    for i in 0.. {
        if out.valid == samples {
            break;
        }
        let mut rng = trial_rng(1000 + p as u64, i);
        let copies = (i % 3) as usize;
        let a1 = a1_with_shared_planes(&b1, copies, true, &mut rng);
        let rep = match lemma_bounds_check(&a1, &b1, 3, &mut rng) {
            Ok(r) => r,
            // base points and positive-dimensional intersections are outside the lemma
            Err(p4surf::Error::Dimension(_) | p4surf::Error::Degenerate(_)) => {
                out.skipped += 1;
                continue;
            }
            Err(e) => panic!("{e}"),
        };
        out.valid += 1;
        if !rep.passed() || rep.r < copies {
            out.violations.push(format!("p = {p}, sample {i}: {rep:?}"));
        }
        out.max_r = out.max_r.max(rep.r);
        if i < 10 {
            let inter = zazb_intersection(&a1, &b1, 2).unwrap();
            if !inter.points.iter().all(|pt| verify_point(&a1, &b1, pt).unwrap()) {
                out.violations.push(format!("p = {p}, sample {i}: a reported point is not on both loci"));
            }
        }
    }
    out
}
