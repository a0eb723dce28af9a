//! Global sections `H⁰(P⁴, Ωⁱ(i+k))` as Koszul kernels inside `∧ⁱW ⊗ S_k`,
//! the Bott table, and the maps on sections induced by exterior matrices.
//!
//! A summand `E(a)` of a free `E`-module corresponds to the bundle `Ωᵃ(a)`,
//! and an entry `ω ∈ ∧ᵐV` acts by contraction `ι_ω : ∧ᵃW → ∧^{a−m}W`.
//! Coordinates on `∧ⁱW ⊗ S_k` are `J·|S_k| + m` with `J` indexing
//! [`basis_of_len`] and `m` indexing [`monomials_of_degree`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::emod::EMatrix;
use crate::error::{Error, Result};
use crate::extalg::{basis_of_len, binomial, contract_generator, contract_monomials, index_in_degree, RANK};
use crate::ff::{FMatrix, Field, PrimeField};
use crate::poly::{monomials_of_degree, Mono};

/// `h^q(P⁴, Ωⁱ(t))`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BottTable;

impl BottTable {
    pub fn h0(i: usize, t: i64) -> usize {
        assert!(i <= RANK - 1, "Ω^{i} does not exist on P^4");
        if t == 0 && i == 0 {
            1
        } else if t <= i as i64 {
            0
        } else {
            let t = t as usize;
            binomial(t + 4 - i, t) * binomial(t - 1, i)
        }
    }

    /// All cohomology, using `H^q Ωⁱ(0) = δ_{qi}` and Serre duality
    /// `h⁴Ωⁱ(t) = h⁰Ω^{4−i}(−t)`.
    pub fn h(q: usize, i: usize, t: i64) -> usize {
        match q {
            0 => Self::h0(i, t),
            4 => Self::h0(4 - i, -t),
            _ => usize::from(t == 0 && q == i),
        }
    }
}

/// An explicit basis of `H⁰Ωⁱ(i+k)`, stored in reduced echelon form.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub i: usize,
    pub k: u32,
    pub monomials: Vec<Mono>,
    /// Rows in reduced echelon form over `∧ⁱW ⊗ S_k`.
    pub basis: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        binomial(RANK, self.i) * self.monomials.len()
    }

    /// Coordinates of a vector of the space in the section basis (read off the pivots).
    pub fn coordinates(&self, v: &[u32]) -> Vec<u32> {
        self.pivots.iter().map(|&c| v[c]).collect()
    }

    pub fn vector(&self, coords: &[u32], f: &PrimeField) -> Vec<u32> {
        let mut v = vec![0; self.ambient_dim()];
        for (row, &c) in self.basis.iter().zip(coords) {
            if c != 0 {
                f.axpy(&mut v, row, c);
            }
        }
        v
    }
}

/// The Koszul map `∧ⁱW⊗S_k → ∧^{i−1}W⊗S_{k+1}`, `x_J⊗s ↦ Σ_j ι_{e_j}(x_J)⊗x_j s`.
pub fn koszul_matrix(i: usize, k: u32, f: &PrimeField) -> FMatrix {
    let src = monomials_of_degree(RANK, k);
    let tgt = monomials_of_degree(RANK, k + 1);
    let tgt_index: HashMap<Mono, usize> = tgt.iter().enumerate().map(|(a, &m)| (m, a)).collect();
    let rows = if i == 0 { 0 } else { binomial(RANK, i - 1) * tgt.len() };
    let mut m = FMatrix::zeros(rows, binomial(RANK, i) * src.len());
    if i == 0 {
        return m;
    }
    for (jx, j) in basis_of_len(i).iter().enumerate() {
        for (sx, s) in src.iter().enumerate() {
            let col = jx * src.len() + sx;
            for v in 0..RANK {
                if let Some((neg, r)) = contract_generator(v, j.0) {
                    let row = index_in_degree(r) * tgt.len() + tgt_index[&s.mul(Mono::var(v))];
                    m.set(row, col, if neg { f.neg(1) } else { 1 });
                }
            }
        }
    }
    m
}

fn compute_sections(i: usize, k: u32, f: &PrimeField) -> SectionSpace {
    let monomials = monomials_of_degree(RANK, k);
    let kernel = koszul_matrix(i, k, f).kernel_basis(f);
    let n = binomial(RANK, i) * monomials.len();
    let r = if kernel.is_empty() { None } else { Some(FMatrix::from_rows(n, &kernel).rref(f)) };
    let (basis, pivots) = match r {
        None => (Vec::new(), Vec::new()),
        Some(r) => ((0..r.rank()).map(|a| r.matrix.row(a).to_vec()).collect(), r.pivots),
    };
    SectionSpace { i, k, monomials, basis, pivots }
}

type Cache = Mutex<HashMap<(u32, usize, u32), Arc<SectionSpace>>>;

/// `H⁰Ωⁱ(i+k)` for `0 ≤ i ≤ 4`, `k ≥ 0`; memoized per field.
pub fn omega_sections(i: usize, k: u32, f: &PrimeField) -> Result<Arc<SectionSpace>> {
    if i > 4 {
        return Err(Error::Degree(format!("Ω^{i} does not exist on P^4")));
    }
    if k > 6 {
        return Err(Error::Degree(format!("twist offset {k} is beyond the supported range")));
    }
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (f.p(), i, k);
    if let Some(s) = cache.lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    // computed outside the lock; concurrent fills produce identical values
    let s = Arc::new(compute_sections(i, k, f));
    Ok(cache.lock().unwrap().entry(key).or_insert(s).clone())
}

fn summand_index(twist: i32) -> Result<usize> {
    if (0..=4).contains(&twist) {
        Ok(twist as usize)
    } else {
        Err(Error::Degree(format!("E({twist}) does not correspond to a bundle Ω^a(a) on P^4")))
    }
}

/// Contraction of an ambient vector in `∧ᵃW⊗S_k` by `ω`, landing in `∧^{a−m}W⊗S_k`.
pub fn contract_vector(omega: &crate::extalg::ExtElem, a: usize, v: &[u32], nmon: usize, f: &PrimeField) -> Vec<u32> {
    let Some(deg) = omega.degree() else {
        return Vec::new();
    };
    let m = (-deg) as usize;
    let out_len = binomial(RANK, a - m) * nmon;
    let mut out = vec![0u32; out_len];
    for (jx, j) in basis_of_len(a).iter().enumerate() {
        let block = &v[jx * nmon..(jx + 1) * nmon];
        if block.iter().all(|&x| x == 0) {
            continue;
        }
        for (w, cw) in omega.terms() {
            if let Some((neg, r)) = contract_monomials(w, j.0) {
                let c = if neg { f.neg(cw) } else { cw };
                let o = index_in_degree(r) * nmon;
                f.axpy(&mut out[o..o + nmon], block, c);
            }
        }
    }
    out
}

/// The map `⊕_c H⁰Ω^{a_c}(a_c+k) → ⊕_r H⁰Ω^{b_r}(b_r+k)` induced by `M`, in
/// section-basis coordinates.
pub fn induced_section_map(m: &EMatrix, k: u32) -> Result<FMatrix> {
    let f = m.field();
    let src: Vec<Arc<SectionSpace>> = m
        .source()
        .twists
        .iter()
        .map(|&a| omega_sections(summand_index(a)?, k, f))
        .collect::<Result<_>>()?;
    let tgt: Vec<Arc<SectionSpace>> = m
        .target()
        .twists
        .iter()
        .map(|&b| omega_sections(summand_index(b)?, k, f))
        .collect::<Result<_>>()?;
    let cols: usize = src.iter().map(|s| s.dim()).sum();
    let rows: usize = tgt.iter().map(|s| s.dim()).sum();
    let mut out = FMatrix::zeros(rows, cols);
    let nmon = monomials_of_degree(RANK, k).len();
    let mut col0 = 0;
    for (c, s) in src.iter().enumerate() {
        for (bi, b) in s.basis.iter().enumerate() {
            let mut row0 = 0;
            for (r, t) in tgt.iter().enumerate() {
                let e = m.get(r, c);
                if !e.is_zero() {
                    let img = contract_vector(e, s.i, b, nmon, f);
                    for (ci, v) in t.coordinates(&img).into_iter().enumerate() {
                        out.set(row0 + ci, col0 + bi, v);
                    }
                }
                row0 += t.dim();
            }
        }
        col0 += s.dim();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn bott_formula_values() {
        assert_eq!(BottTable::h0(3, 4), 5);
        assert_eq!(BottTable::h0(2, 3), 10);
        assert_eq!(BottTable::h0(1, 2), 10);
        assert_eq!(BottTable::h0(2, 4), 45);
        assert_eq!(BottTable::h0(1, 3), 40);
        assert_eq!(BottTable::h0(3, 5), 24);
        assert_eq!(BottTable::h0(0, 3), 35);
        assert_eq!(BottTable::h0(2, 2), 0);
        assert_eq!(BottTable::h(4, 4, 0), 1);
        assert_eq!(BottTable::h(2, 2, 0), 1);
    }

    #[test]
    fn sections_have_bott_dimension() {
        let f = f5();
        for i in 0..=4 {
            for k in 0..=2 {
                let s = omega_sections(i, k, &f).unwrap();
                assert_eq!(s.dim(), BottTable::h0(i, i as i64 + k as i64), "(i, k) = ({i}, {k})");
            }
        }
    }

    #[test]
    fn unsupported_parameters() {
        assert!(omega_sections(5, 1, &f5()).is_err());
    }
}
