//! The exterior algebra `E = ∧V` on `V = <e_0,..,e_4>`, graded by `deg(e_i) = -1`,
//! together with the dual algebra `∧W` on `x_0..x_4` acted on by contraction.
//!
//! A monomial is a 5-bit subset; `e_J` means the wedge of the generators in
//! increasing index order with coefficient `+1`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ff::Field;

/// Number of generators of `V`.
pub const RANK: usize = 5;
/// Number of monomials of `E`.
pub const DIM: usize = 1 << RANK;

/// A basis monomial of `E`, stored as a subset bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtMonomial(pub u8);

impl ExtMonomial {
    pub const ONE: ExtMonomial = ExtMonomial(0);

    pub fn generator(i: usize) -> Self {
        assert!(i < RANK);
        ExtMonomial(1 << i)
    }

    pub fn from_indices(idx: &[usize]) -> Option<Self> {
        let mut s = 0u8;
        for &i in idx {
            if i >= RANK || s & (1 << i) != 0 {
                return None;
            }
            s |= 1 << i;
        }
        Some(ExtMonomial(s))
    }

    /// Word length; the grading degree is its negative.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn degree(self) -> i32 {
        -(self.len() as i32)
    }

    pub fn indices(self) -> Vec<usize> {
        (0..RANK).filter(|&i| self.0 & (1 << i) != 0).collect()
    }
}

/// A dual monomial `x_J` of `∧W`, degree `+|J|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualMonomial(pub u8);

impl DualMonomial {
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// Sign and result of `e_I ∧ e_J`, or `None` when the subsets overlap.
#[inline]
pub fn wedge_monomials(a: u8, b: u8) -> Option<(bool, u8)> {
    if a & b != 0 {
        return None;
    }
    // count pairs (i in a, j in b) with i > j
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some((inversions & 1 == 1, a | b))
}

/// Sign and result of contracting `x_J` by the single generator `e_k`.
#[inline]
pub fn contract_generator(k: usize, j: u8) -> Option<(bool, u8)> {
    if j & (1 << k) == 0 {
        return None;
    }
    let below = (j & ((1u8 << k) - 1)).count_ones();
    Some((below & 1 == 1, j & !(1 << k)))
}

/// Contraction `ι_{e_W}(x_J)`, where `ι_{e_{k1}∧..∧e_{km}} = ι_{e_{k1}} ∘ .. ∘ ι_{e_{km}}`.
///
/// With this ordering contraction is an algebra homomorphism
/// `∧V → End(∧W)`.
#[inline]
pub fn contract_monomials(w: u8, j: u8) -> Option<(bool, u8)> {
    if w & j != w {
        return None;
    }
    let mut neg = false;
    let mut cur = j;
    // innermost operator is the largest index
    for k in (0..RANK).rev() {
        if w & (1 << k) != 0 {
            let (s, r) = contract_generator(k, cur)?;
            neg ^= s;
            cur = r;
        }
    }
    Some((neg, cur))
}

/// Monomials of `E` of the given degree, ordered by increasing bitmask.
pub fn graded_basis(d: i32) -> Result<Vec<ExtMonomial>> {
    if !(-(RANK as i32)..=0).contains(&d) {
        return Err(Error::Degree(format!("E has no component in degree {d}")));
    }
    Ok(basis_of_len((-d) as usize).to_vec())
}

/// Monomials of word length `k`, cached; empty for `k > RANK`.
pub fn basis_of_len(k: usize) -> &'static [ExtMonomial] {
    static TABLE: std::sync::OnceLock<Vec<Vec<ExtMonomial>>> = std::sync::OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut t = vec![Vec::new(); RANK + 1];
        for s in 0..DIM as u8 {
            t[s.count_ones() as usize].push(ExtMonomial(s));
        }
        t
    });
    t.get(k).map(|v| v.as_slice()).unwrap_or(&[])
}

/// Position of each monomial inside its graded piece.
pub fn index_in_degree(m: u8) -> usize {
    static POS: std::sync::OnceLock<[usize; DIM]> = std::sync::OnceLock::new();
    POS.get_or_init(|| {
        let mut pos = [0; DIM];
        let mut counts = [0; RANK + 1];
        for s in 0..DIM {
            let k = (s as u8).count_ones() as usize;
            pos[s] = counts[k];
            counts[k] += 1;
        }
        pos
    })[m as usize]
}

/// Dimension of `E` in degree `d` (zero outside `[-5, 0]`).
pub fn dim_in_degree(d: i32) -> usize {
    if (-(RANK as i32)..=0).contains(&d) {
        binomial(RANK, (-d) as usize)
    } else {
        0
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// An element of `E` with coefficients in a field, stored densely.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtElem {
    coeffs: [u32; DIM],
}

impl Default for ExtElem {
    fn default() -> Self {
        Self::zero()
    }
}

impl std::fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // raw residues; use `to_text` for signed output
        write!(f, "ExtElem(")?;
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*{}", monomial_token(m))?;
        }
        write!(f, ")")
    }
}

impl ExtElem {
    pub const fn zero() -> Self {
        Self { coeffs: [0; DIM] }
    }

    pub fn one() -> Self {
        Self::monomial(ExtMonomial::ONE, 1)
    }

    pub fn monomial(m: ExtMonomial, c: u32) -> Self {
        let mut e = Self::zero();
        e.coeffs[m.0 as usize] = c;
        e
    }

    pub fn generator(i: usize) -> Self {
        Self::monomial(ExtMonomial::generator(i), 1)
    }

    /// Linear form `sum c_i e_i`.
    pub fn linear(c: &[u32; RANK]) -> Self {
        let mut e = Self::zero();
        for (i, &v) in c.iter().enumerate() {
            e.coeffs[1 << i] = v;
        }
        e
    }

    /// Element of word length `k` from coefficients in `basis_of_len(k)` order.
    pub fn from_graded(k: usize, coeffs: &[u32]) -> Self {
        let basis = basis_of_len(k);
        assert_eq!(basis.len(), coeffs.len());
        let mut e = Self::zero();
        for (m, &c) in basis.iter().zip(coeffs) {
            e.coeffs[m.0 as usize] = c;
        }
        e
    }

    /// Coefficients of the word-length-`k` part in `basis_of_len(k)` order.
    pub fn graded_coeffs(&self, k: usize) -> Vec<u32> {
        basis_of_len(k).iter().map(|m| self.coeffs[m.0 as usize]).collect()
    }

    pub fn coeff(&self, m: ExtMonomial) -> u32 {
        self.coeffs[m.0 as usize]
    }

    pub fn set_coeff(&mut self, m: ExtMonomial, c: u32) {
        self.coeffs[m.0 as usize] = c;
    }

    pub fn raw(&self) -> &[u32; DIM] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, u32)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(m, &c)| (m as u8, c))
    }

    /// Common grading degree of all terms; `None` for zero or inhomogeneous elements.
    pub fn degree(&self) -> Option<i32> {
        let mut d = None;
        for (m, _) in self.terms() {
            let dm = -(m.count_ones() as i32);
            match d {
                None => d = Some(dm),
                Some(x) if x != dm => return None,
                _ => {}
            }
        }
        d
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn add<F: Field>(&self, other: &Self, f: &F) -> Self {
        let mut out = *self;
        for i in 0..DIM {
            out.coeffs[i] = f.add(out.coeffs[i], other.coeffs[i]);
        }
        out
    }

    pub fn sub<F: Field>(&self, other: &Self, f: &F) -> Self {
        let mut out = *self;
        for i in 0..DIM {
            out.coeffs[i] = f.sub(out.coeffs[i], other.coeffs[i]);
        }
        out
    }

    pub fn neg<F: Field>(&self, f: &F) -> Self {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c = f.neg(*c);
        }
        out
    }

    pub fn scale<F: Field>(&self, s: u32, f: &F) -> Self {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c = f.mul(*c, s);
        }
        out
    }

    /// `self += s * (m ∧ other-monomial)` helper used by products.
    #[inline]
    fn add_term<F: Field>(&mut self, m: u8, c: u32, neg: bool, f: &F) {
        let v = if neg { f.neg(c) } else { c };
        self.coeffs[m as usize] = f.add(self.coeffs[m as usize], v);
    }

    pub fn wedge<F: Field>(&self, other: &Self, f: &F) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if let Some((neg, m)) = wedge_monomials(a, b) {
                    out.add_term(m, f.mul(ca, cb), neg, f);
                }
            }
        }
        out
    }

    /// `self ∧ m` for a single monomial.
    pub fn wedge_monomial<F: Field>(&self, m: u8, f: &F) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            if let Some((neg, r)) = wedge_monomials(a, m) {
                out.add_term(r, ca, neg, f);
            }
        }
        out
    }

    /// Parse the text syntax, e.g. `2e_{23}+e_{24}-2e_{34}` or `e0 - 2e_1`.
    pub fn parse<F: Field>(s: &str, f: &F) -> Result<Self> {
        parse_elem(s, f)
    }

    /// Render with signed coefficient representatives in `(-p/2, p/2]`.
    pub fn to_text<F: Field>(&self, f: &F) -> String {
        let p = f.characteristic();
        let mut out = String::new();
        let mut terms: Vec<(u8, u32)> = self.terms().collect();
        // print by word length, then lexicographically on the index list
        terms.sort_by_key(|&(m, _)| (m.count_ones(), ExtMonomial(m).indices()));
        for (m, c) in terms {
            let signed = if c > p / 2 { c as i64 - p as i64 } else { c as i64 };
            let (neg, mag) = (signed < 0, signed.unsigned_abs());
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if m == 0 {
                let _ = write!(out, "{mag}");
            } else {
                if mag != 1 {
                    let _ = write!(out, "{mag}");
                }
                out.push_str(&monomial_token(m));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn monomial_token(m: u8) -> String {
    let idx = ExtMonomial(m).indices();
    match idx.len() {
        0 => "1".into(),
        1 => format!("e_{}", idx[0]),
        _ => {
            let digits: String = idx.iter().map(|i| char::from(b'0' + *i as u8)).collect();
            format!("e_{{{digits}}}")
        }
    }
}

fn parse_elem<F: Field>(s: &str, f: &F) -> Result<ExtElem> {
    let err = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(err("empty element"));
    }
    let mut out = ExtElem::zero();
    let mut i = 0;
    while i < chars.len() {
        let mut neg = false;
        let mut saw_sign = false;
        while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            neg ^= chars[i] == '-';
            saw_sign = true;
            i += 1;
        }
        if i > 0 && !saw_sign {
            return Err(err("missing operator between terms"));
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let coeff: Option<i64> = if i > start {
            Some(
                chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| err("bad coefficient"))?,
            )
        } else {
            None
        };
        if i < chars.len() && chars[i] == '*' {
            i += 1;
        }
        let mono = if i < chars.len() && chars[i] == 'e' {
            i += 1;
            if i < chars.len() && chars[i] == '_' {
                i += 1;
            }
            let mut idx = Vec::new();
            if i < chars.len() && chars[i] == '{' {
                i += 1;
                while i < chars.len() && chars[i] != '}' {
                    let d = chars[i].to_digit(10).ok_or_else(|| err("bad index"))?;
                    idx.push(d as usize);
                    i += 1;
                }
                if i == chars.len() {
                    return Err(err("unclosed brace"));
                }
                i += 1;
            } else {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    idx.push(chars[i].to_digit(10).unwrap() as usize);
                    i += 1;
                }
            }
            if idx.is_empty() {
                return Err(err("generator without index"));
            }
            let sorted_ok = idx.windows(2).all(|w| w[0] < w[1]);
            // unsorted index lists are reordered with the permutation sign
            let mut m = 0u8;
            let mut sign = false;
            for &k in &idx {
                let (s, r) = wedge_monomials(m, 1 << k)
                    .filter(|_| k < RANK)
                    .ok_or_else(|| err("repeated or out-of-range index"))?;
                sign ^= s;
                m = r;
            }
            debug_assert!(!sorted_ok || !sign);
            neg ^= sign;
            m
        } else {
            if coeff.is_none() {
                return Err(err("expected coefficient or generator"));
            }
            0
        };
        let c = f.from_i64(if neg { -coeff.unwrap_or(1) } else { coeff.unwrap_or(1) });
        out.add_term(mono, c, false, f);
    }
    Ok(out)
}

/// An element of `∧W`, the dual exterior algebra.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct DualElem {
    coeffs: [u32; DIM],
}

impl DualElem {
    pub fn zero() -> Self {
        Self { coeffs: [0; DIM] }
    }

    pub fn monomial(m: DualMonomial, c: u32) -> Self {
        let mut e = Self::zero();
        e.coeffs[m.0 as usize] = c;
        e
    }

    pub fn coeff(&self, m: DualMonomial) -> u32 {
        self.coeffs[m.0 as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Interior product `ι_ω τ` of `ω ∈ ∧V` on `τ ∈ ∧W`.
pub fn contract<F: Field>(omega: &ExtElem, tau: &DualElem, f: &F) -> DualElem {
    let mut out = DualElem::zero();
    for (w, cw) in omega.terms() {
        for (j, &cj) in tau.coeffs.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            if let Some((neg, r)) = contract_monomials(w, j as u8) {
                let v = f.mul(cw, cj);
                let v = if neg { f.neg(v) } else { v };
                out.coeffs[r as usize] = f.add(out.coeffs[r as usize], v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    fn e(s: &str) -> ExtElem {
        ExtElem::parse(s, &f5()).unwrap()
    }

    #[test]
    fn basic_products() {
        let f = f5();
        assert_eq!(e("e_0").wedge(&e("e_1"), &f), e("e_{01}"));
        assert!(e("e_0").wedge(&e("e_0"), &f).is_zero());
        assert_eq!(e("e_1").wedge(&e("e_0"), &f), e("-e_{01}"));
        assert_eq!(e("e_{01}").wedge(&e("e_{23}"), &f), e("e_{23}").wedge(&e("e_{01}"), &f));
    }

    #[test]
    fn graded_basis_sizes() {
        assert_eq!(graded_basis(0).unwrap(), vec![ExtMonomial::ONE]);
        assert_eq!(graded_basis(-3).unwrap().len(), 10);
        assert_eq!(graded_basis(-5).unwrap(), vec![ExtMonomial(0b11111)]);
        assert!(graded_basis(1).is_err());
        assert!(graded_basis(-6).is_err());
    }

    #[test]
    fn contraction_examples() {
        let f = f5();
        let x01 = DualElem::monomial(DualMonomial(0b11), 1);
        let r = contract(&e("e_0"), &x01, &f);
        assert_eq!(r, DualElem::monomial(DualMonomial(0b10), 1));
        assert!(contract(&e("e_2"), &x01, &f).is_zero());
        // removing e_1 from x_0 x_1 passes one smaller index
        let r = contract(&e("e_1"), &x01, &f);
        assert_eq!(r, DualElem::monomial(DualMonomial(0b01), 4));
    }

    #[test]
    fn parser_accepts_printed_styles() {
        let f = f5();
        let a = e("2e_{23}+e_{24}-2e_{34}");
        assert_eq!(a.degree(), Some(-2));
        assert_eq!(a.to_text(&f), "2e_{23}+e_{24}-2e_{34}");
        assert_eq!(e("e0+2e1"), e("e_0+2e_1"));
        assert_eq!(e("e_{10}"), e("-e_{01}"));
        assert_eq!(e("3"), ExtElem::monomial(ExtMonomial::ONE, 3));
        assert!(e("0").is_zero());
        assert!(ExtElem::parse("e_{00}", &f).is_err());
        assert!(ExtElem::parse("e_", &f).is_err());
        assert!(ExtElem::parse("", &f).is_err());
        assert!(ExtElem::parse("e_{5}", &f).is_err());
    }

    #[test]
    fn inhomogeneous_has_no_degree() {
        assert_eq!(e("e_0+e_{12}").degree(), None);
        assert_eq!(ExtElem::zero().degree(), None);
        assert!(ExtElem::zero().is_homogeneous());
    }
}
