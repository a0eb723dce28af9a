//! Determinantal loci of the linear blocks `A_1`, `B_1` and the intersection of
//! their Veronese images in `P(∧²V)`.
//!
//! A linear entry `Σ c_i e_i` is read as the linear form `Σ c_i x_i` on the
//! dual projective space. A column `λ` of `A_1` (2×4) gives the pair
//! `(f_λ, g_λ)`, a row combination `μ` of `B_1` (3×2) the pair `(h_μ, k_μ)`;
//! `Z_A` and `Z_B` are the images of `λ ↦ f_λ ∧ g_λ` and `μ ↦ h_μ ∧ k_μ`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::emod::EMatrix;
use crate::error::{Error, Result};
use crate::extalg::{basis_of_len, ExtElem};
use crate::ff::{EchelonSpace, ExtField, FMatrix, Field, PrimeField};
use crate::poly::{monomials_of_degree, Ideal, Mono, Poly, Smoothness};
use crate::search::N_invariant;

const RANK_V: usize = 5;

fn linear_coeffs(e: &ExtElem) -> Result<[u32; RANK_V]> {
    if e.terms().any(|(m, _)| m.count_ones() != 1) {
        return Err(Error::Degree(format!("entry {e:?} is not linear")));
    }
    let c = e.graded_coeffs(1);
    Ok([c[0], c[1], c[2], c[3], c[4]])
}

fn linear_form(c: &[u32; RANK_V], f: &PrimeField) -> Poly {
    Poly::from_terms((0..RANK_V).map(|i| (Mono::var(i), c[i])), f)
}

/// Linear entries of a block as a grid of coefficient vectors.
fn grid(m: &EMatrix) -> Result<Vec<Vec<[u32; RANK_V]>>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| linear_coeffs(m.get(r, c))).collect()).collect()
}

/// Ideal of 2×2 minors of a matrix of linear forms on `P⁴`.
pub fn rank1_locus(m: &EMatrix) -> Result<Ideal<PrimeField>> {
    let f = m.field();
    let g = grid(m)?;
    let forms: Vec<Vec<Poly>> = g.iter().map(|row| row.iter().map(|c| linear_form(c, f)).collect()).collect();
    let (nr, nc) = (forms.len(), forms[0].len());
    let mut gens = Vec::new();
    for r1 in 0..nr {
        for r2 in r1 + 1..nr {
            for c1 in 0..nc {
                for c2 in c1 + 1..nc {
                    let d = forms[r1][c1].mul(&forms[r2][c2], f).sub(&forms[r1][c2].mul(&forms[r2][c1], f), f);
                    if !d.is_zero() {
                        gens.push(d);
                    }
                }
            }
        }
    }
    Ideal::new(f.clone(), RANK_V, gens)
}

/// True iff `V(I) ∩ V(J)` is empty in projective space.
pub fn disjoint(i: &Ideal<PrimeField>, j: &Ideal<PrimeField>) -> Result<bool> {
    let mut gens = i.gens.clone();
    gens.extend(j.gens.iter().cloned());
    Ok(Ideal::new(i.field.clone(), i.nvars, gens)?.hilbert_polynomial()?.is_zero())
}

/// Dimension, degree and smoothness of a rank-one locus.
#[derive(Clone, Debug)]
pub struct LocusReport {
    pub dimension: i64,
    pub degree: i64,
    pub smooth: Smoothness,
}

pub fn describe_locus<R: Rng>(i: &Ideal<PrimeField>, rng: &mut R) -> Result<LocusReport> {
    let (dimension, degree) = i.dimension_degree()?;
    let smooth = if dimension < 0 {
        Smoothness::Smooth
    } else {
        i.smoothness((RANK_V - 1) - dimension as usize, rng, Some(5_000_000))?
    };
    Ok(LocusReport { dimension, degree, smooth })
}

/// The 2-vector `f_λ ∧ g_λ` (for `A_1`, `λ ∈ F⁴`) or `h_μ ∧ k_μ` (for `B_1`, `μ ∈ F³`).
pub fn veronese_point<G: Field>(pair: &[[Vec<u32>; 2]], t: &[u32], g: &G) -> ExtElem {
    let mut a = [0u32; RANK_V];
    let mut b = [0u32; RANK_V];
    for (p, &c) in pair.iter().zip(t) {
        for i in 0..RANK_V {
            a[i] = g.add(a[i], g.mul(c, p[0][i]));
            b[i] = g.add(b[i], g.mul(c, p[1][i]));
        }
    }
    ExtElem::linear(&a).wedge(&ExtElem::linear(&b), g)
}

/// Pairs `(f_j, g_j)` of the columns of `A_1`.
pub fn a1_pairs(a1: &EMatrix) -> Result<Vec<[Vec<u32>; 2]>> {
    let g = grid(a1)?;
    Ok((0..a1.cols()).map(|c| [g[0][c].to_vec(), g[1][c].to_vec()]).collect())
}

/// Pairs `(h_r, k_r)` of the rows of `B_1`.
pub fn b1_pairs(b1: &EMatrix) -> Result<Vec<[Vec<u32>; 2]>> {
    let g = grid(b1)?;
    Ok(g.iter().map(|row| [row[0].to_vec(), row[1].to_vec()]).collect())
}

/// Plücker check: a 2-vector is decomposable iff `ω ∧ ω = 0`.
pub fn is_decomposable<G: Field>(w: &ExtElem, g: &G) -> bool {
    w.wedge(w, g).is_zero()
}

/// A point of `Z_A ∩ Z_B` found by enumeration, coordinates normalized
/// (first nonzero entry 1) in `F_{p^k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionPoint {
    pub field_degree: u32,
    pub residue_degree: u32,
    pub lambda: Vec<u32>,
    pub mu: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct IntersectionReport {
    /// Distinct geometric points found by enumeration with residue degree ≤ `max_degree`.
    pub enumerated: usize,
    pub max_degree: u32,
    /// Points grouped by residue degree.
    pub by_residue_degree: BTreeMap<u32, usize>,
    pub points: Vec<IntersectionPoint>,
    /// Multiplicity in the minor scheme of each rational point (`None` otherwise).
    pub multiplicities: Vec<Option<usize>>,
    /// Length of the scheme cut out by the 4×4 minors (Gröbner count).
    pub groebner_degree: i64,
    /// Length not explained by the enumerated points (rational ones with their
    /// multiplicity, the others counted once).
    pub undetected: i64,
}

impl IntersectionReport {
    /// Number of distinct geometric points: the enumerated ones plus the
    /// unexplained length, read as reduced points of higher residue degree.
    pub fn r(&self) -> usize {
        self.enumerated + self.undetected.max(0) as usize
    }

    /// Enumeration saw every point and the lengths match.
    pub fn agree(&self) -> bool {
        self.undetected == 0
    }

    /// The counts can only differ by points the enumeration cannot see
    /// (residue degree > `max_degree`, hence at least `max_degree + 1` of them).
    pub fn consistent(&self) -> bool {
        self.undetected == 0 || self.undetected > self.max_degree as i64
    }

    pub fn has_multiple_points(&self) -> bool {
        self.multiplicities.iter().any(|m| m.is_some_and(|m| m > 1))
    }
}

/// Multiplicity of the rational point `mu` in a zero-dimensional ideal of
/// length `len` in three variables: `len − length(I : P^len)`.
fn point_multiplicity(ideal: &Ideal<PrimeField>, mu: &[u32], len: i64) -> Result<usize> {
    let f = &ideal.field;
    let lin = FMatrix::from_rows(3, &[mu.to_vec()]).kernel_basis(f);
    let l: Vec<Poly> = lin.iter().map(|c| Poly::from_terms((0..3).map(|i| (Mono::var(i), c[i])), f)).collect();
    let s = len as u32;
    let power: Vec<Poly> = (0..=s).map(|a| l[0].pow(a, f).mul(&l[1].pow(s - a, f), f)).collect();
    let pw = Ideal::new(f.clone(), 3, power)?;
    let gb = ideal.groebner(&crate::poly::GbOptions::default())?;
    let colength = |d: u32| -> usize {
        let n = monomials_of_degree(3, d).len();
        let basis = monomials_of_degree(3, d);
        let mut span = EchelonSpace::new(n);
        for p in ideal.quotient_part(&gb, &pw, d) {
            span.insert(&p.coords(&basis), f);
        }
        n - span.rank()
    };
    let d = 8 + s + 2;
    let (a, b) = (colength(d), colength(d + 1));
    if a != b {
        return Err(Error::Dimension(format!("colength not stable in degrees {d}, {}: {a} vs {b}", d + 1)));
    }
    Ok(len as usize - a)
}

fn normalize<G: Field>(v: &mut [u32], g: &G) -> bool {
    let Some(&lead) = v.iter().find(|&&x| x != 0) else { return false };
    let inv = g.inv(lead);
    v.iter_mut().for_each(|x| *x = g.mul(*x, inv));
    true
}

/// Enumerate `Z_A ∩ Z_B` over `F_{p^k}`: for every `μ ∈ P²(F_{p^k})` the
/// columns `λ` with `f_λ, g_λ ∈ ⟨h_μ, k_μ⟩` form a linear space.
pub fn enumerate_intersection(a1: &EMatrix, b1: &EMatrix, k: u32) -> Result<Vec<IntersectionPoint>> {
    let p = a1.field().p();
    let g = ExtField::new(p, k)?;
    let ap = a1_pairs(a1)?;
    let bp = b1_pairs(b1)?;
    let mut out = Vec::new();
    let mut err = None;
    crate::poly::for_each_projective_point(&g, 3, |mu| {
        let mut w = [vec![0u32; RANK_V], vec![0u32; RANK_V]];
        for (pair, &c) in bp.iter().zip(mu) {
            for s in 0..2 {
                g.axpy(&mut w[s], &pair[s], c);
            }
        }
        let wm = FMatrix::from_rows(RANK_V, &w);
        if wm.rank(&g) < 2 {
            return true;
        }
        let ann = wm.kernel_basis(&g);
        // rows: φ_a(f_j), φ_a(g_j)
        let mut rows = Vec::with_capacity(6);
        for s in 0..2 {
            for phi in &ann {
                rows.push(
                    ap.iter()
                        .map(|pair| (0..RANK_V).fold(0, |acc, i| g.add(acc, g.mul(phi[i], pair[s][i]))))
                        .collect::<Vec<u32>>(),
                );
            }
        }
        let ker = FMatrix::from_rows(ap.len(), &rows).kernel_basis(&g);
        if ker.len() > 1 {
            err = Some(Error::Dimension(format!("Z_A ∩ Z_B is infinite above μ = {mu:?}")));
            return false;
        }
        if let Some(lambda) = ker.into_iter().next() {
            let mut lambda = lambda;
            normalize(&mut lambda, &g);
            let fg = veronese_point(&ap, &lambda, &g);
            if fg.is_zero() {
                err = Some(Error::Degenerate(format!("λ = {lambda:?} is a base point of λ ↦ f_λ ∧ g_λ")));
                return false;
            }
            // subfield degrees divide k ≤ 3, so the lcm is the max
            let rd = lambda.iter().chain(mu.iter()).map(|&x| g.residue_degree(x)).max().unwrap_or(1);
            out.push(IntersectionPoint { field_degree: k, residue_degree: rd, lambda, mu: mu.to_vec() });
        }
        true
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// The 20×4 matrix `λ ↦ (f_λ ∧ h_μ ∧ k_μ, g_λ ∧ h_μ ∧ k_μ)` with entries
/// quadratic forms in `μ`.
fn wedge_matrix(a1: &EMatrix, b1: &EMatrix) -> Result<Vec<Vec<Poly>>> {
    let f = a1.field();
    let ap = a1_pairs(a1)?;
    let bp = b1_pairs(b1)?;
    // h∧k = Σ_{r,s} μ_r μ_s h_r ∧ k_s
    let mut hk: Vec<(Mono, ExtElem)> = Vec::new();
    for r in 0..3 {
        for s in 0..3 {
            let w = ExtElem::linear(&arr(&bp[r][0])).wedge(&ExtElem::linear(&arr(&bp[s][1])), f);
            hk.push((Mono::var(r).mul(Mono::var(s)), w));
        }
    }
    let basis3 = basis_of_len(3);
    let mut m = vec![vec![Poly::zero(); ap.len()]; 2 * basis3.len()];
    for (j, pair) in ap.iter().enumerate() {
        for s in 0..2 {
            let a = ExtElem::linear(&arr(&pair[s]));
            for (mono, w) in &hk {
                let prod = a.wedge(w, f);
                for (t, b) in basis3.iter().enumerate() {
                    let c = prod.coeff(*b);
                    if c != 0 {
                        let row = s * basis3.len() + t;
                        m[row][j] = m[row][j].add(&Poly::term(*mono, c), f);
                    }
                }
            }
        }
    }
    Ok(m)
}

fn arr(v: &[u32]) -> [u32; RANK_V] {
    [v[0], v[1], v[2], v[3], v[4]]
}

/// The ideal in `F[μ_0, μ_1, μ_2]` of μ where some `λ ≠ 0` has `f_λ, g_λ ∈ ⟨h_μ, k_μ⟩`:
/// the 4×4 minors of [`wedge_matrix`], spanned in degree 8.
pub fn intersection_ideal(a1: &EMatrix, b1: &EMatrix) -> Result<Ideal<PrimeField>> {
    let f = a1.field();
    let m = wedge_matrix(a1, b1)?;
    let nr = m.len();
    let col_pairs: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    // 2×2 minors on rows (a, b) for each column pair
    let mut m2: BTreeMap<(usize, usize), Vec<Poly>> = BTreeMap::new();
    for a in 0..nr {
        for b in a + 1..nr {
            let v: Vec<Poly> = col_pairs
                .iter()
                .map(|&(c, d)| m[a][c].mul(&m[b][d], f).sub(&m[a][d].mul(&m[b][c], f), f))
                .collect();
            m2.insert((a, b), v);
        }
    }
    // Laplace expansion along rows (a, b) | (c, d): complement of pair i is pair 5 − i,
    // with sign (−1)^{sum of column indices + 1 + 2}
    let signs: [bool; 6] = [false, true, false, false, true, false];
    let basis = monomials_of_degree(3, 8);
    let mut span = EchelonSpace::new(basis.len());
    let nonzero_rows: Vec<usize> = (0..nr).filter(|&r| m[r].iter().any(|p| !p.is_zero())).collect();
    for (i1, &a) in nonzero_rows.iter().enumerate() {
        for (i2, &b) in nonzero_rows.iter().enumerate().skip(i1 + 1) {
            for (i3, &c) in nonzero_rows.iter().enumerate().skip(i2 + 1) {
                for &d in nonzero_rows.iter().skip(i3 + 1) {
                    let top = &m2[&(a, b)];
                    let bot = &m2[&(c, d)];
                    let mut det = Poly::zero();
                    for i in 0..6 {
                        let t = top[i].mul(&bot[5 - i], f);
                        det = if signs[i] { det.sub(&t, f) } else { det.add(&t, f) };
                    }
                    if !det.is_zero() {
                        span.insert(&det.coords(&basis), f);
                        if span.rank() == basis.len() {
                            return Ideal::new(f.clone(), 3, vec![Poly::constant(1)]);
                        }
                    }
                }
            }
        }
    }
    let gens = span.basis().iter().map(|v| Poly::from_coords(&basis, v)).collect();
    Ideal::new(f.clone(), 3, gens)
}

/// `Z_A ∩ Z_B` by enumeration over `F_{p^k}`, `k ≤ max_degree`, cross-checked
/// against the degree of [`intersection_ideal`].
///
/// Fails with [`Error::Degenerate`] when a combination of columns of `A_1`
/// has rank one (the Veronese map has a base point, which the minors also see)
/// and with [`Error::Dimension`] when the intersection is infinite.
pub fn zazb_intersection(a1: &EMatrix, b1: &EMatrix, max_degree: u32) -> Result<IntersectionReport> {
    let ideal = intersection_ideal(a1, b1)?;
    let hp = ideal.hilbert_polynomial()?;
    if hp.dimension() > 0 {
        return Err(Error::Dimension(format!("Z_A ∩ Z_B is infinite (Hilbert polynomial {hp})")));
    }
    let groebner_degree = if hp.is_zero() { 0 } else { hp.degree() };
    let mut points = Vec::new();
    let mut by_residue_degree = BTreeMap::new();
    for k in 1..=max_degree {
        for pt in enumerate_intersection(a1, b1, k)? {
            if pt.residue_degree == k {
                *by_residue_degree.entry(k).or_insert(0) += 1;
                points.push(pt);
            }
        }
    }
    let enumerated = points.len();
    let mut multiplicities = Vec::with_capacity(enumerated);
    let mut accounted = 0i64;
    for pt in &points {
        if pt.residue_degree == 1 {
            let m = point_multiplicity(&ideal, &pt.mu, groebner_degree)?;
            accounted += m as i64;
            multiplicities.push(Some(m));
        } else {
            accounted += 1;
            multiplicities.push(None);
        }
    }
    Ok(IntersectionReport {
        enumerated,
        max_degree,
        by_residue_degree,
        points,
        multiplicities,
        groebner_degree,
        undetected: groebner_degree - accounted,
    })
}

/// Re-verify an enumerated point: both parametrizations give proportional pure wedges.
pub fn verify_point(a1: &EMatrix, b1: &EMatrix, pt: &IntersectionPoint) -> Result<bool> {
    let g = ExtField::new(a1.field().p(), pt.field_degree)?;
    let fg = veronese_point(&a1_pairs(a1)?, &pt.lambda, &g);
    let hk = veronese_point(&b1_pairs(b1)?, &pt.mu, &g);
    if fg.is_zero() || hk.is_zero() || !is_decomposable(&fg, &g) || !is_decomposable(&hk, &g) {
        return Ok(false);
    }
    let a = fg.graded_coeffs(2);
    let b = hk.graded_coeffs(2);
    Ok(FMatrix::from_rows(10, &[a, b]).rank(&g) == 1)
}

/// Outcome of the Appendix inequalities for one `A_1`.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub n: usize,
    pub r: usize,
    /// `N ≤ 120 − r`.
    pub lemma1: bool,
    /// `Some(smooth and disjoint)`; only evaluated when `r > 6`.
    pub lemma2_hypothesis: Option<bool>,
    /// `r ≤ 6` or the hypothesis of the bound fails.
    pub lemma2: bool,
    /// Enumeration and Gröbner count are consistent (see [`IntersectionReport::consistent`]).
    pub methods_agree: bool,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.lemma1 && self.lemma2 && self.methods_agree
    }
}

pub fn lemma_bounds_check<R: Rng>(a1: &EMatrix, b1: &EMatrix, max_degree: u32, rng: &mut R) -> Result<LemmaReport> {
    let n = N_invariant(a1, b1)?;
    let inter = zazb_intersection(a1, b1, max_degree)?;
    let r = inter.r();
    let (hyp, lemma2) = if r <= 6 {
        (None, true)
    } else {
        let ca = rank1_locus(a1)?;
        let sb = rank1_locus(b1)?;
        let smooth = describe_locus(&ca, rng)?.smooth == Smoothness::Smooth && describe_locus(&sb, rng)?.smooth == Smoothness::Smooth;
        let h = smooth && disjoint(&ca, &sb)?;
        (Some(h), !h)
    };
    Ok(LemmaReport { n, r, lemma1: n + r <= 120, lemma2_hypothesis: hyp, lemma2, methods_agree: inter.consistent() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::search::{a1_with_shared_planes, random_a1, trial_rng};

    #[test]
    fn scroll_and_quartic() {
        let mut rng = trial_rng(0, 0);
        let s = describe_locus(&rank1_locus(&fixtures::b1_f5()).unwrap(), &mut rng).unwrap();
        assert_eq!((s.dimension, s.degree, s.smooth), (2, 3, Smoothness::Smooth));
        let c = describe_locus(&rank1_locus(&fixtures::load(fixtures::A1_I_F5)).unwrap(), &mut rng).unwrap();
        assert_eq!((c.dimension, c.degree, c.smooth), (1, 4, Smoothness::Smooth));
    }

    #[test]
    fn cone_is_singular() {
        let mut rng = trial_rng(0, 0);
        let s = describe_locus(&rank1_locus(&fixtures::load(fixtures::B1_CONE_F5)).unwrap(), &mut rng).unwrap();
        assert_eq!((s.dimension, s.degree), (2, 3));
        assert!(matches!(s.smooth, Smoothness::Singular { .. }));
    }

    #[test]
    fn plucker_relations_vanish_on_both_images() {
        let a1 = fixtures::load(fixtures::A1_I_F5);
        let b1 = fixtures::b1_f5();
        let f = b1.field().clone();
        let mut rng = trial_rng(3, 3);
        let (ap, bp) = (a1_pairs(&a1).unwrap(), b1_pairs(&b1).unwrap());
        for _ in 0..50 {
            let l: Vec<u32> = (0..4).map(|_| rng.gen_range(0..5)).collect();
            let m: Vec<u32> = (0..3).map(|_| rng.gen_range(0..5)).collect();
            assert!(is_decomposable(&veronese_point(&ap, &l, &f), &f));
            assert!(is_decomposable(&veronese_point(&bp, &m, &f), &f));
        }
    }

    #[test]
    fn copied_rows_are_shared_planes() {
        let b1 = fixtures::b1_f5();
        let mut rng = trial_rng(11, 0);
        let verbatim = a1_with_shared_planes(&b1, 2, false, &mut rng);
        assert!(matches!(zazb_intersection(&verbatim, &b1, 1), Err(Error::Dimension(_))));
        let a1 = a1_with_shared_planes(&b1, 2, true, &mut rng);
        let rep = zazb_intersection(&a1, &b1, 2).unwrap();
        assert!(rep.by_residue_degree.get(&1).copied().unwrap_or(0) >= 2);
        for pt in &rep.points {
            assert!(verify_point(&a1, &b1, pt).unwrap());
        }
    }

    #[test]
    fn random_a1_satisfies_lemma_one() {
        let b1 = fixtures::b1_f5();
        let f = b1.field().clone();
        let mut rng = trial_rng(12, 0);
        for _ in 0..5 {
            let a1 = random_a1(&f, &mut rng);
            let rep = lemma_bounds_check(&a1, &b1, 3, &mut rng).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn fixture_matrices_meet_in_120_minus_n_points() {
        let b1 = fixtures::b1_f5();
        let scroll = rank1_locus(&b1).unwrap();
        for (name, s) in fixtures::A1_F5_LIST {
            let a1 = fixtures::load(s);
            let n = N_invariant(&a1, &b1).unwrap();
            let rep = zazb_intersection(&a1, &b1, 4).unwrap();
            assert!(rep.agree() && !rep.has_multiple_points(), "{name}: {rep:?}");
            assert_eq!(rep.r(), 120 - n, "{name}");
            for pt in &rep.points {
                assert!(verify_point(&a1, &b1, pt).unwrap());
            }
            assert!(disjoint(&rank1_locus(&a1).unwrap(), &scroll).unwrap(), "{name}");
        }
    }

    #[test]
    fn char_three_example_meets_in_seven_points() {
        let b1 = fixtures::b1_f3();
        let a1 = fixtures::load(fixtures::A1_F3);
        let rep = zazb_intersection(&a1, &b1, 3).unwrap();
        assert_eq!((rep.groebner_degree, rep.enumerated), (7, 7));
        assert!(!disjoint(&rank1_locus(&a1).unwrap(), &rank1_locus(&b1).unwrap()).unwrap());
        let lem = lemma_bounds_check(&a1, &b1, 3, &mut trial_rng(0, 0)).unwrap();
        assert_eq!(lem.lemma2_hypothesis, Some(false));
        assert!(lem.passed());
    }

    #[test]
    fn an_ideal_meets_itself() {
        let s = rank1_locus(&fixtures::b1_f5()).unwrap();
        assert!(!disjoint(&s, &s).unwrap());
    }
}
