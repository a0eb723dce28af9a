//! Sparse polynomials over a [`Field`], terms sorted by descending monomial.

use std::collections::BTreeMap;

use super::mono::{Mono, MAX_VARS};
use crate::error::{Error, Result};
use crate::ff::Field;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Mono, u32)>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: u32) -> Self {
        Self::term(Mono::ONE, c)
    }

    pub fn term(m: Mono, c: u32) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Self { terms: vec![(m, c)] }
        }
    }

    pub fn var(i: usize) -> Self {
        Self::term(Mono::var(i), 1)
    }

    /// Build from arbitrary terms, combining duplicates.
    pub fn from_terms<F: Field>(terms: impl IntoIterator<Item = (Mono, u32)>, f: &F) -> Self {
        let mut acc: BTreeMap<std::cmp::Reverse<Mono>, u32> = BTreeMap::new();
        for (m, c) in terms {
            let e = acc.entry(std::cmp::Reverse(m)).or_insert(0);
            *e = f.add(*e, c);
        }
        Self { terms: acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (m.0, c)).collect() }
    }

    /// Trusted constructor: terms already sorted descending with nonzero coefficients.
    pub(crate) fn from_sorted(terms: Vec<(Mono, u32)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|t| t.1 != 0));
        Self { terms }
    }

    pub fn terms(&self) -> &[(Mono, u32)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<(Mono, u32)> {
        self.terms.first().copied()
    }

    pub fn lm(&self) -> Mono {
        self.terms[0].0
    }

    /// Degree of the leading monomial; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m, _)) => self.terms.iter().all(|t| t.0.degree() == m.degree()),
        }
    }

    pub fn coeff(&self, m: Mono) -> u32 {
        self.terms.iter().find(|t| t.0 == m).map_or(0, |t| t.1)
    }

    pub fn add<F: Field>(&self, o: &Poly, f: &F) -> Poly {
        let mut out = Vec::with_capacity(self.len() + o.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < o.len() {
            let (a, b) = (self.terms[i], o.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = f.add(a.1, b.1);
                    if c != 0 {
                        out.push((a.0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&o.terms[j..]);
        Poly { terms: out }
    }

    pub fn neg<F: Field>(&self, f: &F) -> Poly {
        Poly { terms: self.terms.iter().map(|&(m, c)| (m, f.neg(c))).collect() }
    }

    pub fn sub<F: Field>(&self, o: &Poly, f: &F) -> Poly {
        self.add(&o.neg(f), f)
    }

    pub fn scale<F: Field>(&self, c: u32, f: &F) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|&(m, a)| (m, f.mul(a, c))).collect() }
    }

    /// Multiply by `c·m`; the order is preserved because the ordering is multiplicative.
    pub fn mul_term<F: Field>(&self, m: Mono, c: u32, f: &F) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|&(t, a)| (t.mul(m), f.mul(a, c))).collect() }
    }

    pub fn mul<F: Field>(&self, o: &Poly, f: &F) -> Poly {
        let mut acc = Poly::zero();
        for &(m, c) in &o.terms {
            acc = acc.add(&self.mul_term(m, c, f), f);
        }
        acc
    }

    pub fn pow<F: Field>(&self, e: u32, f: &F) -> Poly {
        let mut acc = Poly::constant(1);
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    pub fn monic<F: Field>(&self, f: &F) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(f.inv(c), f),
        }
    }

    pub fn eval<F: Field>(&self, point: &[u32], f: &F) -> u32 {
        let mut acc = 0;
        for &(m, c) in &self.terms {
            let mut v = c;
            for (i, &x) in point.iter().enumerate().take(MAX_VARS) {
                let e = m.exp(i);
                if e > 0 {
                    v = f.mul(v, f.pow(x, e as u64));
                }
            }
            acc = f.add(acc, v);
        }
        acc
    }

    pub fn derivative<F: Field>(&self, i: usize, f: &F) -> Poly {
        let terms = self.terms.iter().filter_map(|&(m, c)| {
            let e = m.exp(i);
            let c = f.mul(c, f.from_i64(e as i64));
            (e > 0 && c != 0).then(|| (Mono(m.0 - Mono::var(i).0), c))
        });
        Poly::from_terms(terms, f)
    }

    /// Rename variables: `x_i -> x_{perm[i]}`.
    pub fn permute<F: Field>(&self, perm: &[usize], f: &F) -> Poly {
        Poly::from_terms(self.terms.iter().map(|&(m, c)| (m.permute(perm), c)), f)
    }

    /// Substitute `x_i -> images[i]` (any polynomials).
    pub fn substitute<F: Field>(&self, images: &[Poly], f: &F) -> Poly {
        let mut acc = Poly::zero();
        let mut cache: BTreeMap<(usize, u32), Poly> = BTreeMap::new();
        for &(m, c) in &self.terms {
            let mut t = Poly::constant(c);
            for (i, img) in images.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    let p = cache.entry((i, e)).or_insert_with(|| img.pow(e, f)).clone();
                    t = t.mul(&p, f);
                }
            }
            acc = acc.add(&t, f);
        }
        acc
    }

    /// Linear change of coordinates `x_i -> Σ_j g[i][j] x_j`.
    pub fn linear_change<F: Field>(&self, g: &[Vec<u32>], f: &F) -> Poly {
        let images: Vec<Poly> = g
            .iter()
            .map(|row| {
                Poly::from_terms(row.iter().enumerate().map(|(j, &c)| (Mono::var(j), c)), f)
            })
            .collect();
        self.substitute(&images, f)
    }

    /// Coefficient vector with respect to a list of monomials (descending order).
    pub fn coords(&self, basis: &[Mono]) -> Vec<u32> {
        let mut v = vec![0; basis.len()];
        let mut j = 0;
        for &(m, c) in &self.terms {
            while j < basis.len() && basis[j] > m {
                j += 1;
            }
            assert!(j < basis.len() && basis[j] == m, "monomial {m:?} outside basis");
            v[j] = c;
        }
        v
    }

    pub fn from_coords(basis: &[Mono], v: &[u32]) -> Poly {
        Poly {
            terms: basis.iter().zip(v).filter(|(_, &c)| c != 0).map(|(&m, &c)| (m, c)).collect(),
        }
    }

    /// Text form such as `x_0^2*x_3 - 2*x_1*x_4 + 1`; coefficients are printed
    /// as signed representatives when the field is prime.
    pub fn to_text<F: Field>(&self, f: &F) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let p = f.characteristic();
        let prime = f.order() == p;
        let mut s = String::new();
        for (k, &(m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if prime && c > p / 2 { (true, p - c) } else { (false, c) };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m == Mono::ONE {
                s.push_str(&mag.to_string());
            } else if mag == 1 {
                s.push_str(&m.to_text());
            } else {
                s.push_str(&format!("{mag}*{}", m.to_text()));
            }
        }
        s
    }

    /// Parse the text form; accepts `x_3`, `x3`, `^`, `*`, integer coefficients
    /// and arbitrary spacing.
    pub fn parse<F: Field>(text: &str, f: &F) -> Result<Poly> {
        let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bytes = src.as_bytes();
        let mut terms = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1i64;
            while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let body = &src[start..i];
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {text:?}")));
            }
            let mut coeff = sign;
            let mut exps = [0u32; MAX_VARS];
            for factor in body.split('*') {
                if let Some(rest) = factor.strip_prefix('x') {
                    let rest = rest.strip_prefix('_').unwrap_or(rest);
                    let (v, e) = match rest.split_once('^') {
                        Some((v, e)) => (v, e.parse::<u32>().map_err(|_| bad(factor))?),
                        None => (rest, 1),
                    };
                    let v: usize = v.parse().map_err(|_| bad(factor))?;
                    if v >= MAX_VARS {
                        return Err(Error::Parse(format!("variable index {v} out of range")));
                    }
                    exps[v] += e;
                } else {
                    let c: i64 = factor.parse().map_err(|_| bad(factor))?;
                    coeff *= c;
                }
            }
            if exps.iter().any(|&e| e >= 128) {
                return Err(Error::Parse(format!("exponent too large in {body:?}")));
            }
            terms.push((Mono::from_exps(&exps), f.from_i64(coeff)));
        }
        Ok(Poly::from_terms(terms, f))
    }
}

fn bad(s: &str) -> Error {
    Error::Parse(format!("malformed factor {s:?}"))
}
