//! Homogeneous ideals: Hilbert polynomial, saturation, quotients and the
//! Jacobian smoothness test.

use rand::Rng;

use super::groebner::{groebner, GbOptions, Groebner};
use super::hilbert::{hilbert_numerator, HilbertPolynomial};
use super::mono::{monomials_of_degree, Mono};
use super::polynomial::Poly;
use crate::error::{Error, Result};
use crate::ff::{EchelonSpace, FMatrix, Field};

#[derive(Clone, Debug)]
pub struct Ideal<F: Field> {
    pub field: F,
    pub nvars: usize,
    pub gens: Vec<Poly>,
}

/// Outcome of the Jacobian test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    /// The singular locus is nonempty; `dimension` is its projective dimension
    /// when it was computed.
    Singular { dimension: Option<i64>, witness: Option<Vec<u32>> },
    Undetermined(String),
}

/// A uniformly random invertible `n×n` matrix over `f`.
pub fn random_invertible<F: Field, R: Rng>(f: &F, n: usize, rng: &mut R) -> Vec<Vec<u32>> {
    loop {
        let g: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..f.order())).collect()).collect();
        if FMatrix::from_rows(n, &g).rank(f) == n {
            return g;
        }
    }
}

fn inverse<F: Field>(g: &[Vec<u32>], f: &F) -> Vec<Vec<u32>> {
    let n = g.len();
    let aug = FMatrix::from_rows(n, g).hstack(&FMatrix::identity(n));
    let r = aug.rref(f);
    assert_eq!(&r.pivots[..], &(0..n).collect::<Vec<_>>()[..], "matrix is singular");
    (0..n).map(|i| r.matrix.row(i)[n..].to_vec()).collect()
}

fn identity(n: usize) -> Vec<Vec<u32>> {
    (0..n).map(|i| (0..n).map(|j| (i == j) as u32).collect()).collect()
}

/// Strip the largest power of `x_v` from every basis element (Bayer's lemma:
/// for a degrevlex basis with `x_v` last this is a basis of `I : x_v^∞`).
fn divide_out_last(gb: &Groebner, v: usize) -> Vec<Poly> {
    gb.basis
        .iter()
        .map(|g| {
            let k = g.terms().iter().map(|(m, _)| m.exp(v)).min().unwrap_or(0);
            let d = Mono::from_exps(&{
                let mut e = [0u32; 5];
                e[v] = k;
                e
            });
            Poly::from_sorted(g.terms().iter().map(|&(m, c)| (d.div(m), c)).collect())
        })
        .collect()
}

impl<F: Field> Ideal<F> {
    pub fn new(field: F, nvars: usize, gens: Vec<Poly>) -> Result<Self> {
        for g in &gens {
            if !g.is_homogeneous() {
                return Err(Error::Degree(format!("{} is not homogeneous", g.to_text(&field))));
            }
            if g.terms().iter().any(|(m, _)| (nvars..5).any(|v| m.exp(v) > 0)) {
                return Err(Error::Dimension(format!("{} uses more than {nvars} variables", g.to_text(&field))));
            }
        }
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Self { field, nvars, gens })
    }

    pub fn groebner(&self, opts: &GbOptions) -> Result<Groebner> {
        groebner(&self.gens, self.nvars, &self.field, opts)
    }

    pub fn hilbert_polynomial(&self) -> Result<HilbertPolynomial> {
        let gb = self.groebner(&GbOptions::default())?;
        Ok(hp_of(&gb, self.nvars))
    }

    /// Projective dimension (−1 when empty) and degree.
    pub fn dimension_degree(&self) -> Result<(i64, i64)> {
        let hp = self.hilbert_polynomial()?;
        Ok((hp.dimension(), hp.degree()))
    }

    /// `p(x) -> p(g x)`.
    pub fn linear_change(&self, g: &[Vec<u32>]) -> Self {
        let gens = self.gens.iter().map(|p| p.linear_change(g, &self.field)).collect();
        Self { gens, ..self.clone() }
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        let gens = self.gens.iter().map(|p| p.permute(perm, &self.field)).collect();
        Self { gens, ..self.clone() }
    }

    /// `I : m^∞`.
    ///
    /// After a coordinate change `J = I : x_last^∞` is read off a single basis.
    /// It is accepted only with a certificate: `J : x_{last-1}^∞ = J` (so `J`
    /// is saturated) and `J` has the Hilbert polynomial of `I` (so `J` does not
    /// exceed the saturation).
    pub fn saturate<R: Rng>(&self, rng: &mut R) -> Result<Ideal<F>> {
        let n = self.nvars;
        let f = &self.field;
        if n < 2 {
            return Err(Error::Dimension("saturation needs at least two variables".into()));
        }
        for attempt in 0..6 {
            let g = if attempt == 0 { identity(n) } else { random_invertible(f, n, rng) };
            let changed = self.linear_change(&g);
            let gb = changed.groebner(&GbOptions::default())?;
            let hp = hp_of(&gb, n);
            let jgens = divide_out_last(&gb, n - 1);
            let j = Groebner { basis: jgens.clone(), ..gb.clone() };
            if hp_of(&j, n) != hp {
                continue;
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(n - 1, n - 2);
            let swapped = Ideal { gens: jgens.clone(), ..changed.clone() }.permute(&perm);
            let gb2 = swapped.groebner(&GbOptions::default())?;
            let certified = divide_out_last(&gb2, n - 1)
                .iter()
                .all(|p| j.contains(&p.permute(&perm, f), f));
            if !certified {
                continue;
            }
            let back = inverse(&g, f);
            let sat = Ideal { gens: jgens, ..changed }.linear_change(&back);
            return Ok(sat.minimal_generators()?);
        }
        Err(Error::Budget("could not certify the saturation in six coordinate systems".into()))
    }

    /// Drop generators lying in the ideal generated by the others, degree by
    /// degree in the monomial basis.
    pub fn minimal_generators(&self) -> Result<Ideal<F>> {
        let f = &self.field;
        let mut by_deg = self.gens.clone();
        by_deg.sort_by_key(|g| g.degree());
        let mut kept: Vec<Poly> = Vec::new();
        let mut i = 0;
        while i < by_deg.len() {
            let d = by_deg[i].degree().unwrap();
            let basis = monomials_of_degree(self.nvars, d);
            let mut span = EchelonSpace::new(basis.len());
            for k in &kept {
                let e = d - k.degree().unwrap();
                for m in monomials_of_degree(self.nvars, e) {
                    span.insert(&k.mul_term(m, 1, f).coords(&basis), f);
                }
            }
            while i < by_deg.len() && by_deg[i].degree() == Some(d) {
                if span.insert(&by_deg[i].coords(&basis), f) {
                    kept.push(by_deg[i].clone());
                }
                i += 1;
            }
        }
        Ok(Ideal { gens: kept, ..self.clone() })
    }

    /// Degree-`d` piece of `self : other` as coefficient vectors over
    /// `monomials_of_degree(nvars, d)`, given a complete basis of `self`.
    pub fn quotient_part(&self, gb: &Groebner, other: &Ideal<F>, d: u32) -> Vec<Poly> {
        let f = &self.field;
        let src = monomials_of_degree(self.nvars, d);
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        for m in &src {
            let mut col = Vec::new();
            for h in &other.gens {
                let dh = h.degree().unwrap();
                let tgt = monomials_of_degree(self.nvars, d + dh);
                let r = gb.normal_form(&h.mul_term(*m, 1, f), f);
                col.extend(r.coords(&tgt));
            }
            blocks.push(col);
        }
        let rows = blocks.first().map_or(0, |c| c.len());
        let mat = FMatrix::from_columns(rows, &blocks);
        mat.kernel_basis(f).into_iter().map(|v| Poly::from_coords(&src, &v)).collect()
    }

    /// Generators of `self : other` in degrees up to `max_degree`.
    pub fn quotient(&self, other: &Ideal<F>, max_degree: u32) -> Result<Ideal<F>> {
        let f = &self.field;
        let gb = self.groebner(&GbOptions::default())?;
        let mut gens: Vec<Poly> = Vec::new();
        let mut prev: Vec<Poly> = Vec::new();
        for d in 0..=max_degree {
            let basis = monomials_of_degree(self.nvars, d);
            let part = self.quotient_part(&gb, other, d);
            let mut span = EchelonSpace::new(basis.len());
            for p in &prev {
                for v in 0..self.nvars {
                    span.insert(&p.mul_term(Mono::var(v), 1, f).coords(&basis), f);
                }
            }
            for p in &part {
                if span.insert(&p.coords(&basis), f) {
                    gens.push(p.clone());
                }
            }
            prev = part;
        }
        Ideal::new(f.clone(), self.nvars, gens)
    }

    /// `∂g_i/∂x_j`.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.gens
            .iter()
            .map(|g| (0..self.nvars).map(|j| g.derivative(j, &self.field)).collect())
            .collect()
    }

    /// Points of `V(I)` over the field `g` (which must contain the coefficients)
    /// where the Jacobian has rank below `codim`. Stops after `limit` zeros.
    pub fn singular_points_over<G: Field>(&self, g: &G, codim: usize, limit: usize) -> (usize, Option<Vec<u32>>) {
        let jac = self.jacobian();
        let mut zeros = 0;
        let mut found = None;
        for_each_projective_point(g, self.nvars, |pt| {
            if !self.gens.iter().all(|p| p.eval(pt, g) == 0) {
                return true;
            }
            zeros += 1;
            let m: Vec<Vec<u32>> = jac.iter().map(|row| row.iter().map(|d| d.eval(pt, g)).collect()).collect();
            if FMatrix::from_rows(self.nvars, &m).rank(g) < codim {
                found = Some(pt.to_vec());
                return false;
            }
            zeros < limit
        });
        (zeros, found)
    }

    /// Jacobian criterion for an equidimensional scheme of codimension `codim`.
    ///
    /// The ideal `I + (codim-minors)` is replaced first by `I` plus a few random
    /// combinations of minors of each degree; emptiness of that smaller locus
    /// already proves smoothness. Otherwise all minors are used.
    pub fn smoothness<R: Rng>(&self, codim: usize, rng: &mut R, row_budget: Option<usize>) -> Result<Smoothness> {
        let f = &self.field;
        if let (_, Some(pt)) = self.singular_points_over(f, codim, usize::MAX) {
            return Ok(Smoothness::Singular { dimension: None, witness: Some(pt) });
        }
        let minors = self.minors(codim);
        let mut by_deg: std::collections::BTreeMap<u32, Vec<Poly>> = Default::default();
        for m in minors.into_iter().filter(|m| !m.is_zero()) {
            by_deg.entry(m.degree().unwrap()).or_default().push(m);
        }
        let opts = GbOptions { stop_when_empty: true, row_budget, ..Default::default() };
        let random_count = 2 * self.nvars;
        let mut combos = self.gens.clone();
        for ms in by_deg.values() {
            if ms.len() <= random_count {
                combos.extend(ms.iter().cloned());
                continue;
            }
            for _ in 0..random_count {
                let mut acc = Poly::zero();
                for m in ms {
                    acc = acc.add(&m.scale(rng.gen_range(0..f.order()), f), f);
                }
                combos.push(acc);
            }
        }
        let gb = match groebner(&combos, self.nvars, f, &opts) {
            Ok(gb) => gb,
            Err(Error::Budget(s)) => return Ok(Smoothness::Undetermined(s)),
            Err(e) => return Err(e),
        };
        if gb.empty_zero_set {
            return Ok(Smoothness::Smooth);
        }
        let mut all = self.gens.clone();
        all.extend(by_deg.into_values().flatten());
        let gb = match groebner(&all, self.nvars, f, &GbOptions { row_budget, ..Default::default() }) {
            Ok(gb) => gb,
            Err(Error::Budget(s)) => return Ok(Smoothness::Undetermined(s)),
            Err(e) => return Err(e),
        };
        let hp = hp_of(&gb, self.nvars);
        if hp.dimension() < 0 {
            Ok(Smoothness::Smooth)
        } else {
            Ok(Smoothness::Singular { dimension: Some(hp.dimension()), witness: None })
        }
    }

    /// All `c×c` minors of the Jacobian.
    pub fn minors(&self, c: usize) -> Vec<Poly> {
        let f = &self.field;
        let jac = self.jacobian();
        let mut out = Vec::new();
        let rows: Vec<Vec<usize>> = subsets(jac.len(), c);
        let cols: Vec<Vec<usize>> = subsets(self.nvars, c);
        for r in &rows {
            for cl in &cols {
                out.push(det(&r.iter().map(|&i| cl.iter().map(|&j| jac[i][j].clone()).collect()).collect::<Vec<Vec<Poly>>>(), f));
            }
        }
        out
    }
}

fn hp_of(gb: &Groebner, n: usize) -> HilbertPolynomial {
    HilbertPolynomial::from_numerator(&hilbert_numerator(&gb.leading_monomials()), n)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn det<F: Field>(m: &[Vec<Poly>], f: &F) -> Poly {
    match m.len() {
        0 => Poly::constant(1),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Poly::zero();
            for j in 0..n {
                let minor: Vec<Vec<Poly>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect()).collect();
                let t = m[0][j].mul(&det(&minor, f), f);
                acc = if j % 2 == 0 { acc.add(&t, f) } else { acc.sub(&t, f) };
            }
            acc
        }
    }
}

/// Visit one representative of each point of `P^{n-1}` over `g` (first nonzero
/// coordinate equal to one); the visitor returns `false` to stop.
pub(crate) fn for_each_projective_point<G: Field>(g: &G, n: usize, mut visit: impl FnMut(&[u32]) -> bool) {
    let q = g.order();
    let mut pt = vec![0u32; n];
    for lead in 0..n {
        pt.iter_mut().for_each(|x| *x = 0);
        pt[lead] = 1;
        let free = n - lead - 1;
        let total = (q as u64).pow(free as u32);
        for idx in 0..total {
            let mut r = idx;
            for k in 0..free {
                pt[lead + 1 + k] = (r % q as u64) as u32;
                r /= q as u64;
            }
            if !visit(&pt) {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use rand::SeedableRng;

    fn ideal(f: &PrimeField, n: usize, s: &[&str]) -> Ideal<PrimeField> {
        Ideal::new(f.clone(), n, s.iter().map(|t| Poly::parse(t, f).unwrap()).collect()).unwrap()
    }

    #[test]
    fn twisted_cubic_invariants() {
        let f = PrimeField::new(101).unwrap();
        let i = ideal(&f, 4, &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"]);
        assert_eq!(i.hilbert_polynomial().unwrap(), HilbertPolynomial::from_integers(&[1, 3]));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(i.smoothness(2, &mut rng, None).unwrap(), Smoothness::Smooth);
    }

    #[test]
    fn saturation_removes_irrelevant_component() {
        let f = PrimeField::new(101).unwrap();
        // (x0, x1) ∩ (x0, x1, x2)^2-ish: multiply the line ideal by m
        let line = ideal(&f, 3, &["x0"]);
        let gens: Vec<Poly> = (0..3).map(|v| line.gens[0].mul(&Poly::var(v), &f)).collect();
        let i = Ideal::new(f.clone(), 3, gens).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let s = i.saturate(&mut rng).unwrap();
        let gb = s.groebner(&GbOptions::default()).unwrap();
        assert!(gb.contains(&Poly::var(0), &f));
        let again = s.saturate(&mut rng).unwrap();
        assert_eq!(again.groebner(&GbOptions::default()).unwrap().reduced(&f).basis, gb.reduced(&f).basis);
    }

    #[test]
    fn quotient_recovers_a_component() {
        let f = PrimeField::new(101).unwrap();
        // union of the lines x0=x1=0 and x2=x3=0 in P^3
        let i = ideal(&f, 4, &["x0*x2", "x0*x3", "x1*x2", "x1*x3"]);
        let j = ideal(&f, 4, &["x0", "x1"]);
        let q = i.quotient(&j, 2).unwrap();
        let gb = q.groebner(&GbOptions::default()).unwrap();
        assert!(gb.contains(&Poly::var(2), &f) && gb.contains(&Poly::var(3), &f));
        assert!(!gb.contains(&Poly::var(0), &f));
    }

    #[test]
    fn cone_is_singular() {
        let f = PrimeField::new(7).unwrap();
        let i = ideal(&f, 3, &["x0^2 + x1^2 - x2^2"]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        assert_eq!(i.smoothness(1, &mut rng, None).unwrap(), Smoothness::Smooth);
        let cone = ideal(&f, 4, &["x0^2 + x1^2 - x2^2"]);
        match cone.smoothness(1, &mut rng, None).unwrap() {
            Smoothness::Singular { witness, .. } => assert_eq!(witness, Some(vec![0, 0, 0, 1])),
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn projective_point_count() {
        let f = PrimeField::new(5).unwrap();
        let mut n = 0;
        for_each_projective_point(&f, 3, |_| {
            n += 1;
            true
        });
        assert_eq!(n, 31);
    }
}
