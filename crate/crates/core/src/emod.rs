//! Graded free `E`-modules, homogeneous maps between them, degreewise
//! flattening, kernels, minimal generators and Betti tables.
//!
//! A map `⊕_c E(a_c) → ⊕_r E(b_r)` is a matrix whose `(r, c)` entry has degree
//! `b_r - a_c` and acts by left multiplication. `E(a)_d = E_{a+d}`, so the
//! generator of `E(a)` sits in degree `-a`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extalg::{basis_of_len, dim_in_degree, index_in_degree, wedge_monomials, ExtElem, RANK};
use crate::ff::{EchelonSpace, FMatrix, Field, PrimeField};

/// `⊕_j E(a_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeEModule {
    pub twists: Vec<i32>,
}

impl FreeEModule {
    pub fn new(twists: Vec<i32>) -> Self {
        Self { twists }
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    /// Dimension of the degree-`d` component.
    pub fn dim(&self, d: i32) -> usize {
        self.twists.iter().map(|&a| dim_in_degree(a + d)).sum()
    }

    /// Offsets of each summand inside the degree-`d` component.
    pub fn offsets(&self, d: i32) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.twists.len() + 1);
        let mut acc = 0;
        for &a in &self.twists {
            off.push(acc);
            acc += dim_in_degree(a + d);
        }
        off.push(acc);
        off
    }

    /// Degrees in which the module is nonzero.
    pub fn support(&self) -> Option<(i32, i32)> {
        let lo = self.twists.iter().map(|&a| -a - RANK as i32).min()?;
        let hi = self.twists.iter().map(|&a| -a).max()?;
        Some((lo, hi))
    }

    /// Coordinates of a degree-`d` vector as one `ExtElem` per summand.
    pub fn vector_to_elems(&self, d: i32, v: &[u32]) -> Vec<ExtElem> {
        let off = self.offsets(d);
        self.twists
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let k = -(a + d);
                if (0..=RANK as i32).contains(&k) {
                    ExtElem::from_graded(k as usize, &v[off[j]..off[j + 1]])
                } else {
                    ExtElem::zero()
                }
            })
            .collect()
    }
}

/// A homogeneous matrix between graded free `E`-modules.
#[derive(Clone, PartialEq, Eq)]
pub struct EMatrix {
    field: PrimeField,
    source: FreeEModule,
    target: FreeEModule,
    entries: Vec<ExtElem>,
}

impl fmt::Debug for EMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "EMatrix over F_{}: {:?} -> {:?}", self.field.p(), self.source.twists, self.target.twists)?;
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.cols()).map(|c| self.get(r, c).to_text(&self.field)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Serialized form of an [`EMatrix`]; entries are rows of element strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EMatrixJson {
    pub p: u32,
    pub source_twists: Vec<i32>,
    pub target_twists: Vec<i32>,
    pub entries: Vec<Vec<String>>,
}

impl EMatrix {
    /// Build a matrix, checking that every entry has degree `b_r - a_c`.
    pub fn new(field: PrimeField, source: Vec<i32>, target: Vec<i32>, entries: Vec<ExtElem>) -> Result<Self> {
        if entries.len() != source.len() * target.len() {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                target.len(),
                source.len()
            )));
        }
        let m = Self { field, source: FreeEModule::new(source), target: FreeEModule::new(target), entries };
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let e = m.get(r, c);
                if e.is_zero() {
                    continue;
                }
                let want = m.target.twists[r] - m.source.twists[c];
                if e.degree() != Some(want) {
                    return Err(Error::Degree(format!(
                        "entry ({r},{c}) = {} is not homogeneous of degree {want}",
                        e.to_text(&m.field)
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn zero(field: PrimeField, source: Vec<i32>, target: Vec<i32>) -> Self {
        let n = source.len() * target.len();
        Self { field, source: FreeEModule::new(source), target: FreeEModule::new(target), entries: vec![ExtElem::zero(); n] }
    }

    pub fn identity(field: PrimeField, twists: Vec<i32>) -> Self {
        let n = twists.len();
        let mut m = Self::zero(field, twists.clone(), twists);
        for i in 0..n {
            m.entries[i * n + i] = ExtElem::one();
        }
        m
    }

    /// Parse entries given row by row as strings.
    pub fn from_strings(field: PrimeField, source: Vec<i32>, target: Vec<i32>, rows: &[Vec<&str>]) -> Result<Self> {
        let mut entries = Vec::new();
        for row in rows {
            if row.len() != source.len() {
                return Err(Error::Dimension(format!("row has {} entries, expected {}", row.len(), source.len())));
            }
            for s in row {
                entries.push(ExtElem::parse(s, &field)?);
            }
        }
        Self::new(field, source, target, entries)
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn source(&self) -> &FreeEModule {
        &self.source
    }

    pub fn target(&self) -> &FreeEModule {
        &self.target
    }

    pub fn rows(&self) -> usize {
        self.target.rank()
    }

    pub fn cols(&self) -> usize {
        self.source.rank()
    }

    pub fn get(&self, r: usize, c: usize) -> &ExtElem {
        &self.entries[r * self.cols() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: ExtElem) {
        let n = self.cols();
        self.entries[r * n + c] = e;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn column(&self, c: usize) -> Vec<ExtElem> {
        (0..self.rows()).map(|r| *self.get(r, c)).collect()
    }

    /// Sub-matrix on the given columns.
    pub fn select_columns(&self, cols: &[usize]) -> EMatrix {
        let source = cols.iter().map(|&c| self.source.twists[c]).collect();
        let mut out = EMatrix::zero(self.field.clone(), source, self.target.twists.clone());
        for r in 0..self.rows() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, *self.get(r, c));
            }
        }
        out
    }

    /// Sub-matrix on the given rows.
    pub fn select_rows(&self, rows: &[usize]) -> EMatrix {
        let target = rows.iter().map(|&r| self.target.twists[r]).collect();
        let mut out = EMatrix::zero(self.field.clone(), self.source.twists.clone(), target);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols() {
                out.set(i, c, *self.get(r, c));
            }
        }
        out
    }

    /// `(self | other)`: same target, sources concatenated.
    pub fn hconcat(&self, other: &EMatrix) -> Result<EMatrix> {
        if self.target != other.target {
            return Err(Error::Dimension("hconcat needs equal targets".into()));
        }
        let mut source = self.source.twists.clone();
        source.extend(&other.source.twists);
        let mut out = EMatrix::zero(self.field.clone(), source, self.target.twists.clone());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.set(r, c, *self.get(r, c));
            }
            for c in 0..other.cols() {
                out.set(r, self.cols() + c, *other.get(r, c));
            }
        }
        Ok(out)
    }

    /// `self ∘ other`, i.e. the matrix product with wedge.
    pub fn compose(&self, other: &EMatrix) -> Result<EMatrix> {
        if other.target != self.source {
            return Err(Error::Dimension(format!(
                "cannot compose: {:?} vs {:?}",
                other.target.twists, self.source.twists
            )));
        }
        let f = &self.field;
        let mut out = EMatrix::zero(f.clone(), other.source.twists.clone(), self.target.twists.clone());
        for r in 0..self.rows() {
            for c in 0..other.cols() {
                let mut acc = ExtElem::zero();
                for k in 0..self.cols() {
                    let a = self.get(r, k);
                    let b = other.get(k, c);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.wedge(b, f), f);
                    }
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: u32) -> EMatrix {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scale(s, &self.field);
        }
        out
    }

    pub fn add(&self, other: &EMatrix) -> Result<EMatrix> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Dimension("add needs equal shapes".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.add(b, &self.field);
        }
        Ok(out)
    }

    /// Field matrix of the degree-`d` component `⊕ E_{a_c+d} → ⊕ E_{b_r+d}`.
    pub fn flatten(&self, d: i32) -> FMatrix {
        let f = &self.field;
        let src_off = self.source.offsets(d);
        let tgt_off = self.target.offsets(d);
        let mut m = FMatrix::zeros(*tgt_off.last().unwrap(), *src_off.last().unwrap());
        for c in 0..self.cols() {
            let k = -(self.source.twists[c] + d);
            if !(0..=RANK as i32).contains(&k) {
                continue;
            }
            for (j, mono) in basis_of_len(k as usize).iter().enumerate() {
                let col = src_off[c] + j;
                for r in 0..self.rows() {
                    if tgt_off[r] == tgt_off[r + 1] {
                        continue;
                    }
                    for (a, ca) in self.get(r, c).terms() {
                        if let Some((neg, res)) = wedge_monomials(a, mono.0) {
                            let row = tgt_off[r] + index_in_degree(res);
                            let v = if neg { f.neg(ca) } else { ca };
                            m.set(row, col, f.add(m.get(row, col), v));
                        }
                    }
                }
            }
        }
        m
    }

    /// Degrees where the source is nonzero.
    pub fn degree_window(&self) -> Option<(i32, i32)> {
        self.source.support()
    }

    /// Per-degree kernels over the source's full support.
    pub fn kernel_window(&self) -> GradedSubmoduleWindow {
        let mut parts = BTreeMap::new();
        if let Some((lo, hi)) = self.degree_window() {
            for d in lo..=hi {
                let basis = self.flatten(d).kernel_basis(&self.field);
                parts.insert(d, basis);
            }
        }
        GradedSubmoduleWindow { field: self.field.clone(), ambient: self.source.clone(), parts }
    }

    /// Entry-level dual `⊕E(-b_r) → ⊕E(-a_c)` with entry `(c,r) = (-1)^{a_c b_r} m_{rc}`.
    ///
    /// The sign makes `flatten(dual, -5-d)` equal, up to block signs, the
    /// transpose of `flatten(self, d)`.
    pub fn dualize(&self) -> EMatrix {
        let f = &self.field;
        let source: Vec<i32> = self.target.twists.iter().map(|b| -b).collect();
        let target: Vec<i32> = self.source.twists.iter().map(|a| -a).collect();
        let mut out = EMatrix::zero(f.clone(), source, target);
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                let e = *self.get(r, c);
                let odd = (self.source.twists[c] * self.target.twists[r]).rem_euclid(2) == 1;
                out.set(c, r, if odd { e.neg(f) } else { e });
            }
        }
        out
    }

    /// Matrix whose columns are the given generator vectors of the source-side module.
    pub fn from_generators(field: PrimeField, ambient: &FreeEModule, gens: &[Generator]) -> EMatrix {
        let source: Vec<i32> = gens.iter().map(|g| -g.degree).collect();
        let mut m = EMatrix::zero(field, source, ambient.twists.clone());
        for (c, g) in gens.iter().enumerate() {
            for (r, e) in ambient.vector_to_elems(g.degree, &g.vector).into_iter().enumerate() {
                m.set(r, c, e);
            }
        }
        m
    }

    /// Minimal free presentation of the kernel: the next map in a minimal resolution.
    pub fn syzygy_matrix(&self) -> EMatrix {
        let gens = self.kernel_window().minimal_generators();
        EMatrix::from_generators(self.field.clone(), &self.source, &gens)
    }

    /// Generator counts of the first `steps` syzygy modules.
    ///
    /// Step 0 lists the target twists, step 1 the source twists (the map is
    /// assumed minimal), and step `s+1` the minimal generators of the kernel
    /// of the step-`s` map.
    pub fn betti_window(&self, steps: usize) -> Result<BettiTable> {
        if steps == 0 {
            return Err(Error::Dimension("betti_window needs at least one step".into()));
        }
        let mut t = BettiTable::default();
        for &b in &self.target.twists {
            t.bump(0, b);
        }
        for &a in &self.source.twists {
            t.bump(1, a);
        }
        let mut cur = self.clone();
        for s in 2..=steps {
            let next = cur.syzygy_matrix();
            for &a in &next.source.twists {
                t.bump(s, a);
            }
            if next.cols() == 0 {
                break;
            }
            cur = next;
        }
        t.steps = steps;
        Ok(t)
    }

    pub fn to_json(&self) -> EMatrixJson {
        EMatrixJson {
            p: self.field.p(),
            source_twists: self.source.twists.clone(),
            target_twists: self.target.twists.clone(),
            entries: (0..self.rows())
                .map(|r| (0..self.cols()).map(|c| self.get(r, c).to_text(&self.field)).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &EMatrixJson) -> Result<EMatrix> {
        let field = PrimeField::new(j.p)?;
        if j.entries.len() != j.target_twists.len() {
            return Err(Error::Dimension(format!(
                "{} rows for {} target twists",
                j.entries.len(),
                j.target_twists.len()
            )));
        }
        let rows: Vec<Vec<&str>> = j.entries.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
        Self::from_strings(field, j.source_twists.clone(), j.target_twists.clone(), &rows)
    }

    pub fn from_json_str(s: &str) -> Result<EMatrix> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("EMatrixJson serializes")
    }
}

/// A minimal generator: a homogeneous vector of the ambient free module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub degree: i32,
    pub vector: Vec<u32>,
}

/// Per-degree bases of a graded submodule `K ⊆ F`.
#[derive(Clone, Debug)]
pub struct GradedSubmoduleWindow {
    pub field: PrimeField,
    pub ambient: FreeEModule,
    pub parts: BTreeMap<i32, Vec<Vec<u32>>>,
}

impl GradedSubmoduleWindow {
    pub fn dim(&self, d: i32) -> usize {
        self.parts.get(&d).map_or(0, |v| v.len())
    }

    /// The span of `K_{d+1} · V` inside degree `d`.
    pub fn decomposables(&self, d: i32) -> EchelonSpace {
        let f = &self.field;
        let mut span = EchelonSpace::new(self.ambient.dim(d));
        if let Some(above) = self.parts.get(&(d + 1)) {
            for v in above {
                for i in 0..RANK {
                    span.insert(&right_multiply(&self.ambient, d + 1, v, i, f), f);
                }
            }
        }
        span
    }

    /// Lifts of bases of `K_d / (K_{d+1}·V)`, taken in basis order, from the top degree down.
    pub fn minimal_generators(&self) -> Vec<Generator> {
        let f = &self.field;
        let mut gens = Vec::new();
        for (&d, basis) in self.parts.iter().rev() {
            let mut span = self.decomposables(d);
            for v in basis {
                if span.insert(v, f) {
                    gens.push(Generator { degree: d, vector: v.clone() });
                }
            }
        }
        gens
    }

    /// Generator counts by degree.
    pub fn generator_counts(gens: &[Generator]) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for g in gens {
            *out.entry(g.degree).or_insert(0) += 1;
        }
        out
    }
}

/// `v ∧ e_i` for a degree-`d` vector of `F`.
pub fn right_multiply(ambient: &FreeEModule, d: i32, v: &[u32], i: usize, f: &PrimeField) -> Vec<u32> {
    let src = ambient.offsets(d);
    let dst = ambient.offsets(d - 1);
    let mut out = vec![0; *dst.last().unwrap()];
    for (j, &a) in ambient.twists.iter().enumerate() {
        let k = -(a + d);
        if !(0..RANK as i32).contains(&k) {
            continue;
        }
        for (t, m) in basis_of_len(k as usize).iter().enumerate() {
            let c = v[src[j] + t];
            if c == 0 {
                continue;
            }
            if let Some((neg, r)) = wedge_monomials(m.0, 1 << i) {
                let pos = dst[j] + index_in_degree(r);
                out[pos] = f.add(out[pos], if neg { f.neg(c) } else { c });
            }
        }
    }
    out
}

/// Generator counts keyed by `(step, twist)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub counts: BTreeMap<(usize, i32), usize>,
    pub steps: usize,
}

impl BettiTable {
    pub fn bump(&mut self, step: usize, twist: i32) {
        *self.counts.entry((step, twist)).or_insert(0) += 1;
        self.steps = self.steps.max(step);
    }

    pub fn get(&self, step: usize, twist: i32) -> usize {
        self.counts.get(&(step, twist)).copied().unwrap_or(0)
    }

    /// Twist multiset of a step as `(twist, count)` pairs.
    pub fn step(&self, step: usize) -> BTreeMap<i32, usize> {
        self.counts.iter().filter(|((s, _), _)| *s == step).map(|((_, t), &n)| (*t, n)).collect()
    }

    pub fn from_steps(steps: &[&[(i32, usize)]]) -> Self {
        let mut t = BettiTable::default();
        for (s, list) in steps.iter().enumerate() {
            for &(tw, n) in list.iter() {
                if n > 0 {
                    t.counts.insert((s, tw), n);
                }
            }
        }
        t.steps = steps.len().saturating_sub(1);
        t
    }

    /// True when every count listed in `expected` matches, including explicit zeros.
    pub fn matches(&self, expected: &[(usize, i32, usize)]) -> bool {
        expected.iter().all(|&(s, t, n)| self.get(s, t) == n)
    }
}

impl fmt::Display for BettiTable {
    /// Columns are steps; row `step - twist`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "(empty)");
        }
        let rows: Vec<i32> = {
            let mut r: Vec<i32> = self.counts.keys().map(|(s, t)| *s as i32 - t).collect();
            r.sort_unstable();
            r.dedup();
            r
        };
        write!(f, "{:>5}:", "")?;
        for s in 0..=self.steps {
            write!(f, " {s:>4}")?;
        }
        writeln!(f)?;
        for row in rows {
            write!(f, "{row:>5}:")?;
            for s in 0..=self.steps {
                let n = self.get(s, s as i32 - row);
                if n == 0 {
                    write!(f, " {:>4}", ".")?;
                } else {
                    write!(f, " {n:>4}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn identity_flattens_to_identity() {
        let id = EMatrix::identity(f5(), vec![2, 1, 0]);
        for d in -7..=0 {
            let m = id.flatten(d);
            assert_eq!(m, FMatrix::identity(m.rows()));
        }
    }

    #[test]
    fn rejects_inhomogeneous_entries() {
        let r = EMatrix::from_strings(f5(), vec![1], vec![0], &[vec!["e_{01}"]]);
        assert!(matches!(r, Err(Error::Degree(_))));
        let r = EMatrix::from_strings(f5(), vec![1], vec![0], &[vec!["e_0+e_{01}"]]);
        assert!(r.is_err());
    }

    #[test]
    fn zero_endomorphism_kernel_is_everything() {
        let z = EMatrix::zero(f5(), vec![0], vec![0]);
        let k = z.kernel_window();
        assert_eq!(k.dim(-1), 5);
        // E is generated by 1 as a module
        let g = k.minimal_generators();
        assert_eq!(GradedSubmoduleWindow::generator_counts(&g), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn single_variable_resolution_is_periodic() {
        // the kernel of multiplication by e_0 on E is e_0 E, generated in degree -1
        let m = EMatrix::from_strings(f5(), vec![1], vec![0], &[vec!["e_0"]]).unwrap();
        let t = m.betti_window(4).unwrap();
        for s in 2..=4 {
            assert_eq!(t.step(s), BTreeMap::from([(s as i32, 1)]));
        }
    }

    #[test]
    fn json_round_trip() {
        let m = EMatrix::from_strings(
            f5(),
            vec![2, 1],
            vec![0, 0],
            &[vec!["e_{01}-2e_{34}", "e_2"], vec!["0", "e_0+e_4"]],
        )
        .unwrap();
        let back = EMatrix::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(m, back);
        assert_eq!(m.dualize().dualize(), m);
    }

    #[test]
    fn compose_shape_mismatch_is_an_error() {
        let a = EMatrix::identity(f5(), vec![1]);
        let b = EMatrix::identity(f5(), vec![2]);
        assert!(a.compose(&b).is_err());
    }
}
