//! Prime fields and small extension fields.
//!
//! Elements of every field are plain `u32` indices in `0..order`. For a
//! prime field this is the reduced residue; for `F_{p^k}` it is the base-`p`
//! encoding of the coefficient vector modulo the stored modulus, so the
//! constants `0..p` coincide with the prime subfield.

use std::fmt;

use crate::error::{Error, Result};

/// Operations shared by prime fields and extension fields.
pub trait Field: Clone + Send + Sync + fmt::Debug {
    fn characteristic(&self) -> u32;
    fn order(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    /// Inverse of a nonzero element. Panics on zero.
    fn inv(&self, a: u32) -> u32;

    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Image of an integer under `Z -> F`.
    fn from_i64(&self, v: i64) -> u32 {
        let p = self.characteristic() as i64;
        v.rem_euclid(p) as u32
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `dst += c * src`, entrywise.
    fn axpy(&self, dst: &mut [u32], src: &[u32], c: u32) {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = self.add(*d, self.mul(c, s));
        }
    }

    /// Row reduction in place on a row-major buffer; returns pivot columns.
    fn rref_in_place(&self, data: &mut [u32], rows: usize, cols: usize) -> Vec<usize> {
        generic_rref(self, data, rows, cols)
    }
}

fn generic_rref<F: Field + ?Sized>(f: &F, data: &mut [u32], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(data[r * cols + c]);
        for j in c..cols {
            data[r * cols + j] = f.mul(data[r * cols + j], inv);
        }
        let pivot: Vec<u32> = data[r * cols + c..(r + 1) * cols].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let v = data[i * cols + c];
            if v != 0 {
                let m = f.neg(v);
                f.axpy(&mut data[i * cols + c..(i + 1) * cols], &pivot, m);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// The prime field `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
    inverses: Vec<u32>,
}

impl PrimeField {
    /// Fields up to `p < 256`; the elimination kernel relies on this bound.
    pub fn new(p: u32) -> Result<Self> {
        if !(2..256).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 256")));
        }
        let mut inverses = vec![0; p as usize];
        for a in 1..p {
            for b in 1..p {
                if a * b % p == 1 {
                    inverses[a as usize] = b;
                    break;
                }
            }
        }
        Ok(Self { p, inverses })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn signed(&self, a: u32) -> i64 {
        let a = a as i64;
        let p = self.p as i64;
        if a > p / 2 {
            a - p
        } else {
            a
        }
    }
}

impl Field for PrimeField {
    fn characteristic(&self) -> u32 {
        self.p
    }
    fn order(&self) -> u32 {
        self.p
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.p
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        self.inverses[a as usize]
    }

    fn axpy(&self, dst: &mut [u32], src: &[u32], c: u32) {
        let p = self.p;
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = (*d + c * s) % p;
        }
    }

    /// Elimination with delayed reduction: non-pivot rows accumulate
    /// unreduced sums (bounded by `rows * (p-1)^2`, far below `u32::MAX` for
    /// `p < 256` and the matrix sizes used here) and are reduced when they
    /// become pivot rows.
    fn rref_in_place(&self, data: &mut [u32], rows: usize, cols: usize) -> Vec<usize> {
        let p = self.p;
        debug_assert!((rows as u64) * (p as u64 - 1).pow(2) < u32::MAX as u64 / 2);
        let mut pivots = Vec::new();
        let mut r = 0;
        let mut pivot = vec![0u32; cols];
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| data[i * cols + c] % p != 0) else {
                continue;
            };
            if pr != r {
                for j in c..cols {
                    data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = self.inv(data[r * cols + c] % p);
            for j in c..cols {
                let v = (data[r * cols + j] % p) * inv % p;
                data[r * cols + j] = v;
                pivot[j] = v;
            }
            let src = &pivot[c..];
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let row = &mut data[i * cols + c..(i + 1) * cols];
                let v = row[0] % p;
                if v != 0 {
                    let m = p - v;
                    for (d, &s) in row.iter_mut().zip(src) {
                        *d += m * s;
                    }
                }
                row[0] = 0;
            }
            pivots.push(c);
            r += 1;
        }
        for v in data.iter_mut() {
            *v %= p;
        }
        pivots
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Fixed irreducible moduli as `c_0..c_{k-1}`, leading coefficient 1 implied.
const MODULI: &[(u32, u32, &[u32])] = &[
    (3, 2, &[1, 0]),    // x^2 + 1
    (3, 3, &[1, 2, 0]), // x^3 + 2x + 1
    (5, 2, &[3, 0]),    // x^2 + 3
    (5, 3, &[1, 1, 0]), // x^3 + x + 1
];

/// `F_{p^k}` for `1 <= k <= 4` (at most 4096 elements) with table arithmetic.
#[derive(Clone)]
pub struct ExtField {
    p: u32,
    k: u32,
    modulus: Vec<u32>,
    q: u32,
    add_t: Vec<u16>,
    mul_t: Vec<u16>,
    inv_t: Vec<u16>,
    neg_t: Vec<u16>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtField(F_{}^{}, modulus {:?})", self.p, self.k, self.modulus)
    }
}

impl ExtField {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if !(1..=4).contains(&k) || p.pow(k) > 4096 {
            return Err(Error::InvalidField(format!("F_{p}^{k}: extension degree must be in 1..=4 with at most 4096 elements")));
        }
        // modulus stored as coefficients c_0..c_{k-1} of x^k + sum c_i x^i
        let modulus: Vec<u32> = if k == 1 {
            vec![0]
        } else if let Some((_, _, m)) = MODULI.iter().find(|(mp, mk, _)| *mp == p && *mk == k) {
            m.to_vec()
        } else {
            first_irreducible(&base, k)
        };
        if k > 1 && !is_irreducible(&base, &modulus) {
            return Err(Error::InvalidField(format!("modulus for F_{p}^{k} is reducible")));
        }
        let q = p.pow(k);
        let digits = |a: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(k as usize);
            let mut a = a;
            for _ in 0..k {
                v.push(a % p);
                a /= p;
            }
            v
        };
        let encode = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let qs = q as usize;
        let mut add_t = vec![0u16; qs * qs];
        let mut mul_t = vec![0u16; qs * qs];
        let mut neg_t = vec![0u16; qs];
        for a in 0..q {
            let da = digits(a);
            neg_t[a as usize] = encode(&da.iter().map(|&c| base.neg(c)).collect::<Vec<_>>()) as u16;
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| base.add(x, y)).collect();
                add_t[a as usize * qs + b as usize] = encode(&s) as u16;
                // schoolbook product then reduce by x^k = -sum c_i x^i
                let mut prod = vec![0u32; 2 * k as usize];
                for i in 0..k as usize {
                    for j in 0..k as usize {
                        prod[i + j] = base.add(prod[i + j], base.mul(da[i], db[j]));
                    }
                }
                for t in (k as usize..2 * k as usize).rev() {
                    let c = prod[t];
                    if c == 0 {
                        continue;
                    }
                    prod[t] = 0;
                    for i in 0..k as usize {
                        let sh = t - k as usize + i;
                        prod[sh] = base.sub(prod[sh], base.mul(c, modulus[i]));
                    }
                }
                mul_t[a as usize * qs + b as usize] = encode(&prod[..k as usize]) as u16;
            }
        }
        let mut inv_t = vec![0u16; qs];
        for a in 1..qs {
            for b in 1..qs {
                if mul_t[a * qs + b] == 1 {
                    inv_t[a] = b as u16;
                    break;
                }
            }
        }
        Ok(Self { p, k, modulus, q, add_t, mul_t, inv_t, neg_t })
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Modulus coefficients `c_0..c_{k-1}` of `x^k + sum c_i x^i`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Smallest `j` with `a^(p^j) = a`, i.e. the degree of the subfield `a` generates.
    pub fn residue_degree(&self, a: u32) -> u32 {
        let mut x = a;
        for j in 1..=self.k {
            x = self.pow(x, self.p as u64);
            if x == a {
                return j;
            }
        }
        self.k
    }
}

fn has_root(f: &PrimeField, modulus: &[u32]) -> bool {
    let k = modulus.len();
    (0..f.p()).any(|x| {
        let mut v = f.pow(x, k as u64);
        let mut xp = 1;
        for &c in modulus {
            v = f.add(v, f.mul(c, xp));
            xp = f.mul(xp, x);
        }
        v == 0
    })
}

/// Remainder of monic `x^k + Σ c_i x^i` modulo monic `x^2 + a x + b`, zero test.
fn divisible_by_quadratic(f: &PrimeField, modulus: &[u32], a: u32, b: u32) -> bool {
    let mut r: Vec<u32> = modulus.to_vec();
    r.push(1);
    for t in (2..r.len()).rev() {
        let c = r[t];
        r[t] = 0;
        r[t - 1] = f.sub(r[t - 1], f.mul(c, a));
        r[t - 2] = f.sub(r[t - 2], f.mul(c, b));
    }
    r[0] == 0 && r[1] == 0
}

/// Irreducibility for degree ≤ 4: no linear and no quadratic factor.
fn is_irreducible(f: &PrimeField, modulus: &[u32]) -> bool {
    if has_root(f, modulus) {
        return false;
    }
    modulus.len() < 4 || !(0..f.p()).any(|a| (0..f.p()).any(|b| divisible_by_quadratic(f, modulus, a, b)))
}

fn first_irreducible(f: &PrimeField, k: u32) -> Vec<u32> {
    let p = f.p();
    let total = p.pow(k);
    for code in 0..total {
        let mut m = Vec::with_capacity(k as usize);
        let mut c = code;
        for _ in 0..k {
            m.push(c % p);
            c /= p;
        }
        if is_irreducible(f, &m) {
            return m;
        }
    }
    unreachable!("an irreducible polynomial of degree <= 4 always exists")
}

impl Field for ExtField {
    fn characteristic(&self) -> u32 {
        self.p
    }
    fn order(&self) -> u32 {
        self.q
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add_t[(a * self.q + b) as usize] as u32
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul_t[(a * self.q + b) as usize] as u32
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        self.neg_t[a as usize] as u32
    }
    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        self.inv_t[a as usize] as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rejects_composites() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(5).is_ok());
    }

    #[test]
    fn inverses_and_signed_reps() {
        let f = PrimeField::new(5).unwrap();
        for a in 1..5 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.signed(4), -1);
        assert_eq!(f.signed(2), 2);
        assert_eq!(f.signed(3), -2);
        assert_eq!(f.from_i64(-7), 3);
    }

    #[test]
    fn extension_fields_are_fields() {
        for (p, k) in [(3, 2), (3, 3), (5, 2), (5, 3), (7, 2), (2, 3), (3, 4), (5, 4), (2, 4)] {
            let f = ExtField::new(p, k).unwrap();
            assert_eq!(f.order(), p.pow(k));
            for a in 1..f.order() {
                assert_eq!(f.mul(a, f.inv(a)), 1, "F_{p}^{k} element {a}");
            }
            // the multiplicative group has order q-1
            for a in 1..f.order() {
                assert_eq!(f.pow(a, (f.order() - 1) as u64), 1);
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for (p, k) in [(3, 3), (5, 2), (5, 3)] {
            let f = ExtField::new(p, k).unwrap();
            let q = f.order();
            for a in (0..q).step_by(7) {
                for b in (0..q).step_by(5) {
                    let lhs = f.pow(f.add(a, b), p as u64);
                    let rhs = f.add(f.pow(a, p as u64), f.pow(b, p as u64));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn residue_degrees() {
        let f = ExtField::new(5, 2).unwrap();
        let counts = (0..25).fold([0usize; 3], |mut acc, a| {
            acc[f.residue_degree(a) as usize] += 1;
            acc
        });
        assert_eq!(counts[1], 5);
        assert_eq!(counts[2], 20);
        // F_625: 5 + 20 + 600
        let f = ExtField::new(5, 4).unwrap();
        let mut counts = [0usize; 5];
        for a in 0..625 {
            counts[f.residue_degree(a) as usize] += 1;
        }
        assert_eq!(counts, [0, 5, 20, 0, 600]);
    }

    #[test]
    fn quartic_with_quadratic_factor_is_rejected() {
        let f = PrimeField::new(5).unwrap();
        // (x^2 + 2)(x^2 + 3) = x^4 + 1 over F_5 has no roots
        assert!(!has_root(&f, &[1, 0, 0, 0]));
        assert!(!is_irreducible(&f, &[1, 0, 0, 0]));
        assert!(ExtField::new(7, 5).is_err());
    }
}
