//! Monomials in at most five variables, packed one exponent per byte.

use std::fmt;

/// Maximum number of variables.
pub const MAX_VARS: usize = 5;
const LOW40: u64 = 0xFF_FFFF_FFFF;
// high bit of each exponent byte, for the borrow-free divisibility test
const HIGH_BITS: u64 = 0x80_8080_8080;

/// `x^a` with `a_i` stored in byte `i`; exponents stay below 128.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub u64);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn var(i: usize) -> Mono {
        assert!(i < MAX_VARS);
        Mono(1 << (8 * i))
    }

    pub fn from_exps(e: &[u32]) -> Mono {
        assert!(e.len() <= MAX_VARS);
        let mut m = 0u64;
        for (i, &a) in e.iter().enumerate() {
            assert!(a < 128, "exponent {a} too large");
            m |= (a as u64) << (8 * i);
        }
        Mono(m)
    }

    #[inline]
    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> (8 * i)) & 0xFF) as u32
    }

    pub fn exps(self) -> [u32; MAX_VARS] {
        std::array::from_fn(|i| self.exp(i))
    }

    #[inline]
    pub fn degree(self) -> u32 {
        ((self.0.wrapping_mul(0x01_0101_0101) >> 32) & 0xFF) as u32
    }

    /// Sort key: a larger key is a larger monomial in degree reverse lexicographic
    /// order with `x_4 < x_3 < ... < x_0` tie-breaking on the last variable.
    #[inline]
    pub fn key(self) -> u64 {
        ((self.degree() as u64) << 40) | (self.0 ^ LOW40)
    }

    #[inline]
    pub fn mul(self, o: Mono) -> Mono {
        Mono(self.0 + o.0)
    }

    #[inline]
    pub fn divides(self, m: Mono) -> bool {
        ((m.0 | HIGH_BITS) - self.0) & HIGH_BITS == HIGH_BITS
    }

    /// `m / self`, assuming divisibility.
    #[inline]
    pub fn div(self, m: Mono) -> Mono {
        debug_assert!(self.divides(m));
        Mono(m.0 - self.0)
    }

    pub fn lcm(self, o: Mono) -> Mono {
        let mut m = 0u64;
        for i in 0..MAX_VARS {
            m |= (self.exp(i).max(o.exp(i)) as u64) << (8 * i);
        }
        Mono(m)
    }

    pub fn gcd(self, o: Mono) -> Mono {
        let mut m = 0u64;
        for i in 0..MAX_VARS {
            m |= (self.exp(i).min(o.exp(i)) as u64) << (8 * i);
        }
        Mono(m)
    }

    pub fn coprime(self, o: Mono) -> bool {
        (0..MAX_VARS).all(|i| self.exp(i) == 0 || o.exp(i) == 0)
    }

    /// Variables occurring in the monomial as a bitmask.
    pub fn support(self) -> u8 {
        (0..MAX_VARS).filter(|&i| self.exp(i) > 0).fold(0, |s, i| s | (1 << i))
    }

    /// Move variable `i` to position `perm[i]`.
    pub fn permute(self, perm: &[usize]) -> Mono {
        let mut m = 0u64;
        for (i, &t) in perm.iter().enumerate() {
            m |= (self.exp(i) as u64) << (8 * t);
        }
        Mono(m)
    }

    /// Largest `k` with `x_i^k | self`.
    pub fn strip_var(self, i: usize) -> (Mono, u32) {
        let k = self.exp(i);
        (Mono(self.0 & !(0xFF << (8 * i))), k)
    }

    pub fn pure_power_var(self) -> Option<usize> {
        let s = self.support();
        (s.count_ones() == 1).then(|| s.trailing_zeros() as usize)
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Mono {
    pub fn to_text(self) -> String {
        let mut parts = Vec::new();
        for i in 0..MAX_VARS {
            match self.exp(i) {
                0 => {}
                1 => parts.push(format!("x_{i}")),
                e => parts.push(format!("x_{i}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// All monomials of degree `d` in the first `n` variables, in descending order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut e = [0u32; MAX_VARS];
    fn rec(i: usize, n: usize, left: u32, e: &mut [u32; MAX_VARS], out: &mut Vec<Mono>) {
        if i + 1 == n {
            e[i] = left;
            out.push(Mono::from_exps(&e[..n]));
            return;
        }
        for a in (0..=left).rev() {
            e[i] = a;
            rec(i + 1, n, left - a, e, out);
        }
        e[i] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(Mono::ONE);
        }
        return out;
    }
    rec(0, n, d, &mut e, &mut out);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// `C(d + n - 1, n - 1)`.
pub fn count_monomials(n: usize, d: u32) -> usize {
    crate::extalg::binomial(d as usize + n - 1, n - 1)
}
