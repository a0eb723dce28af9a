//! Hilbert series of monomial ideals (pivot recursion) and Hilbert polynomials.

use std::fmt;

use num_rational::Ratio;

use super::mono::{Mono, MAX_VARS};

/// Keep only the minimal generators of a monomial ideal.
pub fn minimalize(gens: &[Mono]) -> Vec<Mono> {
    let mut g: Vec<Mono> = gens.to_vec();
    g.sort_unstable_by_key(|m| (m.degree(), m.0));
    g.dedup();
    let mut out: Vec<Mono> = Vec::new();
    for m in g {
        if !out.iter().any(|o| o.divides(m)) {
            out.push(m);
        }
    }
    out
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x != 0 {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn trim(mut v: Vec<i64>) -> Vec<i64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

/// Numerator `K(t)` of the Hilbert series `K(t)/(1-t)^n` of `S/(gens)`.
pub fn hilbert_numerator(gens: &[Mono]) -> Vec<i64> {
    trim(numerator_rec(minimalize(gens)))
}

fn numerator_rec(gens: Vec<Mono>) -> Vec<i64> {
    if gens.is_empty() {
        return vec![1];
    }
    // pairwise coprime generators form a regular sequence
    let coprime = gens.iter().enumerate().all(|(i, a)| gens[i + 1..].iter().all(|b| a.coprime(*b)));
    if coprime {
        let mut acc = vec![1i64];
        for g in &gens {
            let mut f = vec![0i64; g.degree() as usize + 1];
            f[0] = 1;
            f[g.degree() as usize] -= 1;
            acc = poly_mul(&acc, &f);
        }
        return acc;
    }
    // pivot x_v^e: most frequent shared variable with its least positive exponent
    let mut counts = [0usize; MAX_VARS];
    for g in &gens {
        for (v, c) in counts.iter_mut().enumerate() {
            if g.exp(v) > 0 {
                *c += 1;
            }
        }
    }
    let v = (0..MAX_VARS).max_by_key(|&v| counts[v]).unwrap();
    let e = gens.iter().map(|g| g.exp(v)).filter(|&a| a > 0).min().unwrap();
    let p = Mono::from_exps(&{
        let mut x = [0u32; MAX_VARS];
        x[v] = e;
        x
    });
    // I + (p)
    let mut plus: Vec<Mono> = gens.iter().copied().filter(|g| !p.divides(*g)).collect();
    plus.push(p);
    // I : p
    let colon: Vec<Mono> = gens.iter().map(|g| g.gcd(p).div(*g)).collect();
    let a = numerator_rec(minimalize(&plus));
    let mut shifted = vec![0i64; e as usize];
    shifted.extend(numerator_rec(minimalize(&colon)));
    poly_add(&a, &shifted)
}

/// Krull dimension of `S/(gens)` in `n` variables: the largest set of variables
/// containing the support of no generator.
pub fn krull_dimension(gens: &[Mono], n: usize) -> usize {
    let supports: Vec<u8> = gens.iter().map(|g| g.support()).collect();
    (0u32..(1 << n))
        .filter(|&u| supports.iter().all(|&s| s as u32 & !u != 0))
        .map(|u| u.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Number of standard monomials of degree `d`, read off the series.
pub fn hilbert_function(numerator: &[i64], n: usize, d: u32) -> i64 {
    numerator
        .iter()
        .enumerate()
        .filter(|(i, _)| *i as u32 <= d)
        .map(|(i, &k)| k * crate::extalg::binomial(d as usize - i + n - 1, n - 1) as i64)
        .sum()
}

/// A polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertPolynomial {
    pub coeffs: Vec<Ratio<i128>>,
}

impl HilbertPolynomial {
    /// The polynomial agreeing with `hilbert_function` in large degrees.
    pub fn from_numerator(numerator: &[i64], n: usize) -> Self {
        let mut acc = vec![Ratio::from_integer(0i128)];
        for (i, &k) in numerator.iter().enumerate() {
            if k == 0 {
                continue;
            }
            // C(s - i + n - 1, n - 1) = Π_{j=1}^{n-1} (s - i + j) / j
            let mut b = vec![Ratio::from_integer(1i128)];
            for j in 1..n {
                let c = Ratio::new(j as i128 - i as i128, j as i128);
                let lin = [c, Ratio::new(1, j as i128)];
                let mut nb = vec![Ratio::from_integer(0); b.len() + 1];
                for (a, x) in b.iter().enumerate() {
                    nb[a] += x * lin[0];
                    nb[a + 1] += x * lin[1];
                }
                b = nb;
            }
            if acc.len() < b.len() {
                acc.resize(b.len(), Ratio::from_integer(0));
            }
            for (a, x) in b.iter().enumerate() {
                acc[a] += x * Ratio::from_integer(k as i128);
            }
        }
        while acc.len() > 1 && acc.last().unwrap() == &Ratio::from_integer(0) {
            acc.pop();
        }
        Self { coeffs: acc }
    }

    pub fn from_integers(c: &[i64]) -> Self {
        Self { coeffs: c.iter().map(|&x| Ratio::from_integer(x as i128)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Ratio::from_integer(0))
    }

    /// Projective dimension of the scheme; `-1` when empty.
    pub fn dimension(&self) -> i64 {
        if self.is_zero() {
            -1
        } else {
            self.coeffs.len() as i64 - 1
        }
    }

    /// Leading coefficient times `dim!`.
    pub fn degree(&self) -> i64 {
        if self.is_zero() {
            return 0;
        }
        let d = self.coeffs.len() - 1;
        let fact: i128 = (1..=d as i128).product();
        let v = self.coeffs[d] * Ratio::from_integer(fact);
        assert!(v.is_integer());
        v.to_integer() as i64
    }

    pub fn eval(&self, t: i64) -> Ratio<i128> {
        self.coeffs.iter().rev().fold(Ratio::from_integer(0), |acc, c| acc * Ratio::from_integer(t as i128) + c)
    }
}

impl fmt::Display for HilbertPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Ratio::from_integer(0) {
                continue;
            }
            let neg = *c < Ratio::from_integer(0);
            let mag = if neg { -c } else { *c };
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let m = if mag == Ratio::from_integer(1) && k > 0 { String::new() } else { mag.to_string() };
            let v = match k {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{k}"),
            };
            write!(f, "{sign}{m}{v}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(gens: &[Mono], n: usize, d: u32) -> i64 {
        super::super::mono::monomials_of_degree(n, d)
            .into_iter()
            .filter(|m| !gens.iter().any(|g| g.divides(*m)))
            .count() as i64
    }

    #[test]
    fn numerator_matches_counting() {
        let gens = vec![
            Mono::from_exps(&[2, 1, 0, 0]),
            Mono::from_exps(&[0, 2, 1, 0]),
            Mono::from_exps(&[1, 0, 0, 3]),
            Mono::from_exps(&[0, 0, 4, 0]),
            Mono::from_exps(&[1, 1, 1, 1]),
        ];
        let k = hilbert_numerator(&gens);
        for d in 0..12 {
            assert_eq!(hilbert_function(&k, 4, d), brute_count(&gens, 4, d), "degree {d}");
        }
    }

    #[test]
    fn plane_curve_polynomial() {
        // a plane cubic: 3t
        let k = hilbert_numerator(&[Mono::from_exps(&[3, 0, 0])]);
        let hp = HilbertPolynomial::from_numerator(&k, 3);
        assert_eq!(hp, HilbertPolynomial::from_integers(&[0, 3]));
        assert_eq!((hp.dimension(), hp.degree()), (1, 3));
        assert_eq!(hp.to_string(), "3t");
    }

    #[test]
    fn display_surface_polynomial() {
        assert_eq!(HilbertPolynomial::from_integers(&[1, -6, 6]).to_string(), "6t^2 - 6t + 1");
    }

    #[test]
    fn krull_dimension_of_coordinate_ideals() {
        assert_eq!(krull_dimension(&[Mono::var(0), Mono::var(1)], 5), 3);
        assert_eq!(krull_dimension(&[Mono::from_exps(&[1, 1])], 3), 2);
        assert_eq!(krull_dimension(&[], 4), 4);
    }
}
