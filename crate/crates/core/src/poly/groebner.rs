//! Degree-by-degree F4 for homogeneous ideals in degree reverse lexicographic order.
//!
//! Each round collects the S-pairs of the lowest pending degree, adds reducer
//! rows by symbolic preprocessing and row-reduces the resulting sparse matrix
//! with a dense accumulator. Pairs are pruned with the Gebauer–Möller criteria.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::mono::Mono;
use super::polynomial::Poly;
use crate::error::{Error, Result};
use crate::ff::Field;

#[derive(Clone, Debug, Default)]
pub struct GbOptions {
    /// Stop after this degree; the result is then a truncated basis.
    pub max_degree: Option<u32>,
    /// Maximum number of matrix rows processed over the whole run.
    pub row_budget: Option<usize>,
    /// Stop as soon as every variable has a pure power among the leading
    /// monomials, i.e. the projective zero set is empty.
    pub stop_when_empty: bool,
}

#[derive(Clone, Debug)]
pub struct Groebner {
    pub nvars: usize,
    /// Monic basis elements in order of discovery (nondecreasing degree).
    pub basis: Vec<Poly>,
    /// Every S-pair and input was processed.
    pub complete: bool,
    /// Set when the computation stopped because the zero set is empty.
    pub empty_zero_set: bool,
    /// Highest degree that was fully processed.
    pub degree_reached: u32,
    pub rows_processed: usize,
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

impl Groebner {
    pub fn leading_monomials(&self) -> Vec<Mono> {
        self.basis.iter().map(|g| g.lm()).collect()
    }

    fn divisor_of(&self, m: Mono) -> Option<usize> {
        self.basis.iter().position(|g| g.lm().divides(m))
    }

    /// Remainder of `p` on division by the basis (valid as a membership test
    /// in every degree up to [`Groebner::degree_reached`] when incomplete).
    pub fn normal_form<F: Field>(&self, p: &Poly, f: &F) -> Poly {
        let mut acc: BTreeMap<std::cmp::Reverse<Mono>, u32> =
            p.terms().iter().map(|&(m, c)| (std::cmp::Reverse(m), c)).collect();
        let mut rem = Vec::new();
        while let Some((std::cmp::Reverse(m), c)) = acc.pop_first() {
            match self.divisor_of(m) {
                None => rem.push((m, c)),
                Some(k) => {
                    let g = &self.basis[k];
                    let t = g.lm().div(m);
                    let nc = f.neg(c);
                    for &(gm, gc) in &g.terms()[1..] {
                        let e = acc.entry(std::cmp::Reverse(gm.mul(t))).or_insert(0);
                        *e = f.add(*e, f.mul(nc, gc));
                        if *e == 0 {
                            acc.remove(&std::cmp::Reverse(gm.mul(t)));
                        }
                    }
                }
            }
        }
        Poly::from_sorted(rem)
    }

    pub fn contains<F: Field>(&self, p: &Poly, f: &F) -> bool {
        self.normal_form(p, f).is_zero()
    }

    /// The reduced Gröbner basis: minimal leading monomials, monic, tails in normal form.
    pub fn reduced<F: Field>(&self, f: &F) -> Groebner {
        let lms = self.leading_monomials();
        let keep: Vec<usize> = (0..lms.len())
            .filter(|&i| !(0..lms.len()).any(|j| j != i && lms[j].divides(lms[i]) && (lms[j] != lms[i] || j < i)))
            .collect();
        let minimal = Groebner { basis: keep.iter().map(|&i| self.basis[i].clone()).collect(), ..self.clone() };
        let mut basis = Vec::with_capacity(minimal.basis.len());
        for (k, g) in minimal.basis.iter().enumerate() {
            let others = Groebner {
                basis: minimal.basis.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, h)| h.clone()).collect(),
                ..minimal.clone()
            };
            let (lm, lc) = g.lead().expect("basis elements are nonzero");
            let tail = Poly::from_sorted(g.terms()[1..].to_vec());
            let t = others.normal_form(&tail, f);
            basis.push(Poly::term(lm, lc).add(&t, f).monic(f));
        }
        basis.sort_by(|a, b| b.lm().cmp(&a.lm()));
        Groebner { basis, ..self.clone() }
    }
}

/// Gröbner basis of the ideal generated by homogeneous `gens`.
pub fn groebner<F: Field>(gens: &[Poly], nvars: usize, f: &F, opts: &GbOptions) -> Result<Groebner> {
    let mut inputs: BTreeMap<u32, Vec<Poly>> = BTreeMap::new();
    for g in gens {
        if !g.is_homogeneous() {
            return Err(Error::Degree(format!("generator {} is not homogeneous", g.to_text(f))));
        }
        if let Some(d) = g.degree() {
            inputs.entry(d).or_default().push(g.monic(f));
        }
    }
    let mut gb = Groebner {
        nvars,
        basis: Vec::new(),
        complete: false,
        empty_zero_set: false,
        degree_reached: 0,
        rows_processed: 0,
    };
    let mut pairs: Vec<Pair> = Vec::new();
    loop {
        let pd = pairs.iter().map(|p| p.lcm.degree()).min();
        let id = inputs.keys().next().copied();
        let d = match (pd, id) {
            (None, None) => {
                gb.complete = true;
                break;
            }
            (a, b) => a.into_iter().chain(b).min().unwrap(),
        };
        if opts.max_degree.is_some_and(|m| d > m) {
            break;
        }
        let (now, later): (Vec<Pair>, Vec<Pair>) = pairs.into_iter().partition(|p| p.lcm.degree() == d);
        pairs = later;
        // per lcm: one multiple becomes the pivot of that column, the rest are reduced
        let mut by_lcm: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for p in &now {
            let v = by_lcm.entry(p.lcm.0).or_default();
            for k in [p.i, p.j] {
                if !v.contains(&k) {
                    v.push(k);
                }
            }
        }
        let mut todo: Vec<(Mono, usize)> = Vec::new();
        let mut fixed: Vec<(Mono, usize)> = Vec::new();
        for (l, ks) in by_lcm {
            let l = Mono(l);
            let first = *ks.iter().min_by_key(|&&k| gb.basis[k].len()).unwrap();
            fixed.push((gb.basis[first].lm().div(l), first));
            todo.extend(ks.into_iter().filter(|&k| k != first).map(|k| (gb.basis[k].lm().div(l), k)));
        }
        let mut extra: Vec<Poly> = inputs.remove(&d).unwrap_or_default();
        let new = reduce_round(&gb, &todo, &fixed, &mut extra, f)?;
        gb.rows_processed += todo.len() + extra.len() + new.1;
        if opts.row_budget.is_some_and(|b| gb.rows_processed > b) {
            return Err(Error::Budget(format!(
                "Gröbner basis exceeded {} rows at degree {d}",
                opts.row_budget.unwrap()
            )));
        }
        for h in new.0 {
            update_pairs(&mut pairs, &gb, &h);
            gb.basis.push(h);
        }
        gb.degree_reached = d;
        if opts.stop_when_empty && covers_all_variables(&gb, nvars) {
            gb.empty_zero_set = true;
            break;
        }
    }
    if gb.complete && covers_all_variables(&gb, nvars) {
        gb.empty_zero_set = true;
    }
    Ok(gb)
}

fn covers_all_variables(gb: &Groebner, nvars: usize) -> bool {
    let mut mask = 0u8;
    for g in &gb.basis {
        if let Some(v) = g.lm().pure_power_var() {
            mask |= 1 << v;
        }
    }
    mask.count_ones() as usize == nvars
}

/// Gebauer–Möller update for a new basis element `h` (not yet pushed).
fn update_pairs(pairs: &mut Vec<Pair>, gb: &Groebner, h: &Poly) {
    let hi = gb.basis.len();
    let hm = h.lm();
    let cands: Vec<(usize, Mono)> = (0..hi).map(|i| (i, gb.basis[i].lm().lcm(hm))).collect();
    // chain criterion among the new pairs: keep a pair unless another new pair's
    // lcm properly divides it (ties resolved by index)
    let mut keep = Vec::new();
    for (k, &(i, l)) in cands.iter().enumerate() {
        let redundant = cands.iter().enumerate().any(|(k2, &(_, l2))| {
            k2 != k && l2.divides(l) && (l2 != l || k2 < k)
        });
        if !redundant {
            keep.push((i, l));
        }
    }
    // old pairs made redundant by h
    pairs.retain(|p| {
        !(hm.divides(p.lcm)
            && gb.basis[p.i].lm().lcm(hm) != p.lcm
            && gb.basis[p.j].lm().lcm(hm) != p.lcm)
    });
    for (i, l) in keep {
        // product criterion
        if gb.basis[i].lm().coprime(hm) {
            continue;
        }
        pairs.push(Pair { i, j: hi, lcm: l });
    }
}

struct SparseRow {
    cols: Vec<u32>,
    vals: Vec<u32>,
}

/// Build and reduce the matrix of one degree; returns new basis elements and
/// the number of reducer rows used.
fn reduce_round<F: Field>(
    gb: &Groebner,
    todo: &[(Mono, usize)],
    fixed: &[(Mono, usize)],
    extra: &mut Vec<Poly>,
    f: &F,
) -> Result<(Vec<Poly>, usize)> {
    // rows to reduce
    let mut rows: Vec<Poly> = todo.iter().map(|&(t, j)| gb.basis[j].mul_term(t, 1, f)).collect();
    rows.append(extra);
    if rows.is_empty() {
        return Ok((Vec::new(), 0));
    }
    // symbolic preprocessing
    let mut monos: HashSet<Mono> = HashSet::new();
    let mut queue: Vec<Mono> = Vec::new();
    for r in &rows {
        for &(m, _) in r.terms() {
            if monos.insert(m) {
                queue.push(m);
            }
        }
    }
    let mut reducers: Vec<(Mono, Poly)> = Vec::new();
    let mut has_reducer: HashSet<Mono> = HashSet::new();
    for &(t, k) in fixed {
        let row = gb.basis[k].mul_term(t, 1, f);
        for &(m, _) in row.terms() {
            if monos.insert(m) {
                queue.push(m);
            }
        }
        has_reducer.insert(row.lm());
        reducers.push((row.lm(), row));
    }
    while let Some(m) = queue.pop() {
        if has_reducer.contains(&m) {
            continue;
        }
        let mut best: Option<usize> = None;
        for (k, g) in gb.basis.iter().enumerate() {
            if g.lm().divides(m) && best.map_or(true, |b| gb.basis[b].len() > g.len()) {
                best = Some(k);
            }
        }
        if let Some(k) = best {
            let g = &gb.basis[k];
            let row = g.mul_term(g.lm().div(m), 1, f);
            for &(t, _) in &row.terms()[1..] {
                if monos.insert(t) {
                    queue.push(t);
                }
            }
            reducers.push((m, row));
        }
    }
    let mut cols: Vec<Mono> = monos.into_iter().collect();
    cols.sort_unstable_by(|a, b| b.cmp(a));
    let index: HashMap<Mono, u32> = cols.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
    let to_sparse = |p: &Poly| SparseRow {
        cols: p.terms().iter().map(|(m, _)| index[m]).collect(),
        vals: p.terms().iter().map(|&(_, c)| c).collect(),
    };
    let n = cols.len();
    let mut pivot: Vec<Option<SparseRow>> = (0..n).map(|_| None).collect();
    for (m, r) in &reducers {
        pivot[index[m] as usize] = Some(to_sparse(r));
    }
    let nred = reducers.len();
    let mut acc = vec![0u32; n];
    let mut new_rows: Vec<u32> = Vec::new();
    for r in &rows {
        let sr = to_sparse(r);
        for (&c, &v) in sr.cols.iter().zip(&sr.vals) {
            acc[c as usize] = v;
        }
        let mut lead: Option<usize> = None;
        let start = sr.cols[0] as usize;
        for c in start..n {
            let a = acc[c];
            if a == 0 {
                continue;
            }
            match &pivot[c] {
                Some(p) => {
                    let na = f.neg(a);
                    for (&pc, &pv) in p.cols.iter().zip(&p.vals) {
                        let pc = pc as usize;
                        acc[pc] = f.add(acc[pc], f.mul(na, pv));
                    }
                }
                None => {
                    if lead.is_none() {
                        lead = Some(c);
                    }
                }
            }
        }
        if let Some(c) = lead {
            let inv = f.inv(acc[c]);
            let mut row = SparseRow { cols: Vec::new(), vals: Vec::new() };
            for (k, slot) in acc.iter_mut().enumerate().skip(c) {
                if *slot != 0 {
                    row.cols.push(k as u32);
                    row.vals.push(f.mul(*slot, inv));
                    *slot = 0;
                }
            }
            pivot[c] = Some(row);
            new_rows.push(c as u32);
        } else {
            acc.iter_mut().for_each(|x| *x = 0);
        }
    }
    let out = new_rows
        .into_iter()
        .map(|c| {
            let p = pivot[c as usize].as_ref().unwrap();
            Poly::from_sorted(p.cols.iter().zip(&p.vals).map(|(&k, &v)| (cols[k as usize], v)).collect())
        })
        .collect();
    Ok((out, nred))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;

    fn polys(f: &PrimeField, s: &[&str]) -> Vec<Poly> {
        s.iter().map(|t| Poly::parse(t, f).unwrap()).collect()
    }

    #[test]
    fn twisted_cubic() {
        let f = PrimeField::new(101).unwrap();
        let g = polys(&f, &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"]);
        let gb = groebner(&g, 4, &f, &GbOptions::default()).unwrap();
        assert!(gb.complete);
        assert_eq!(gb.reduced(&f).basis.len(), 3);
        for p in &g {
            assert!(gb.contains(p, &f));
        }
        assert!(!gb.contains(&Poly::var(0).mul(&Poly::var(3), &f).add(&Poly::var(1).mul(&Poly::var(2), &f), &f), &f));
    }

    #[test]
    fn complete_intersection_of_points_is_detected_empty_after_adding_a_form() {
        let f = PrimeField::new(101).unwrap();
        let g = polys(&f, &["x0^2 - x1*x2", "x1^2 - x0*x2", "x2^3 + x0^3 + x0*x1*x2"]);
        let gb = groebner(&g, 3, &f, &GbOptions { stop_when_empty: true, ..Default::default() }).unwrap();
        // three conics-and-cubic in P^2 meet in no point generically
        assert!(gb.empty_zero_set);
    }

    #[test]
    fn budget_is_reported() {
        let f = PrimeField::new(101).unwrap();
        let g = polys(&f, &["x0*x1 - x2*x3", "x0*x2 - x1*x4", "x1*x2 + x3*x4 + x0^2"]);
        let r = groebner(&g, 5, &f, &GbOptions { row_budget: Some(5), ..Default::default() });
        assert!(matches!(r, Err(Error::Budget(_))));
    }
}
