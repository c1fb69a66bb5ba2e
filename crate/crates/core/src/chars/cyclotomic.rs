//! Cyclotomic integers `Z[ζ_e]` in the power basis `1, ζ, …, ζ^{φ(e)−1}`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A reduced element of `Z[ζ_e]`; equality is coefficient equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cyclotomic {
    pub e: u64,
    pub coeffs: Vec<i128>,
}

impl Cyclotomic {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// `Some(r)` when the value is the rational integer `r`.
    pub fn as_integer(&self) -> Option<i128> {
        if self.coeffs.iter().skip(1).all(|&c| c == 0) {
            Some(self.coeffs.first().copied().unwrap_or(0))
        } else {
            None
        }
    }
}

/// Written in powers of `z = ζ_e`, e.g. `-1 - 2z^2`.
impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            let sign = if c < 0 { "-" } else { "+" };
            match (first, c < 0) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, _) => write!(f, " {sign} ")?,
            }
            first = false;
            let a = c.unsigned_abs();
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => {}
                _ => write!(f, "{a}")?,
            }
            match i {
                0 => {}
                1 => f.write_str("z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Arithmetic context for a fixed conductor `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicRing {
    e: u64,
    /// `Φ_e`, low degree first, monic.
    phi: Vec<i128>,
}

/// Coefficients of the `e`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(e: u64) -> Vec<i128> {
    // Φ_d = (x^d − 1) / Π_{d' | d, d' < d} Φ_{d'}, over the divisors of e
    let divisors: Vec<u64> = (1..=e).filter(|d| e.is_multiple_of(*d)).collect();
    let mut table: Vec<Vec<i128>> = Vec::with_capacity(divisors.len());
    for (i, &d) in divisors.iter().enumerate() {
        let mut num = vec![0i128; d as usize + 1];
        num[0] = -1;
        num[d as usize] = 1;
        for j in 0..i {
            if d % divisors[j] == 0 {
                num = div_exact(&num, &table[j]);
            }
        }
        table.push(num);
    }
    table.pop().expect("e has at least one divisor")
}

fn div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let mut quot = vec![0i128; num.len() + 1 - dl];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dl - 1];
        quot[i] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i + j] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

impl CyclotomicRing {
    pub fn new(e: u64) -> Self {
        assert!(e >= 1, "conductor must be positive");
        CyclotomicRing { e, phi: cyclotomic_polynomial(e) }
    }

    pub fn conductor(&self) -> u64 {
        self.e
    }

    /// `φ(e)`, the length of reduced coefficient vectors.
    pub fn rank(&self) -> usize {
        self.phi.len() - 1
    }

    /// Reduces an arbitrary polynomial in `ζ` modulo `Φ_e`.
    pub fn reduce(&self, mut poly: Vec<i128>) -> Cyclotomic {
        let r = self.rank();
        for i in (r..poly.len()).rev() {
            let c = poly[i];
            if c == 0 {
                continue;
            }
            for (j, &pc) in self.phi.iter().enumerate() {
                poly[i - r + j] -= c * pc;
            }
        }
        poly.resize(r, 0);
        Cyclotomic { e: self.e, coeffs: poly }
    }

    pub fn integer(&self, n: i128) -> Cyclotomic {
        let mut coeffs = vec![0; self.rank()];
        coeffs[0] = n;
        Cyclotomic { e: self.e, coeffs }
    }

    pub fn zero(&self) -> Cyclotomic {
        self.integer(0)
    }

    /// `Σ_t mult[t]·ζ_e^t`, the exponents taken modulo `e`.
    pub fn from_exponents(&self, terms: impl IntoIterator<Item = (u64, i128)>) -> Cyclotomic {
        let mut full = vec![0i128; self.e as usize];
        for (t, m) in terms {
            full[(t % self.e) as usize] += m;
        }
        self.reduce(full)
    }

    pub fn add(&self, a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        Cyclotomic { e: self.e, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }

    pub fn scale(&self, a: &Cyclotomic, s: i128) -> Cyclotomic {
        Cyclotomic { e: self.e, coeffs: a.coeffs.iter().map(|x| x * s).collect() }
    }

    pub fn mul(&self, a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        let r = self.rank();
        let mut prod = vec![0i128; 2 * r - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce(prod)
    }

    /// Complex conjugation `ζ ↦ ζ⁻¹`.
    pub fn conj(&self, a: &Cyclotomic) -> Cyclotomic {
        self.from_exponents(
            a.coeffs.iter().enumerate().map(|(i, &c)| ((self.e - i as u64) % self.e, c)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(360).len() - 1, 96);
    }

    #[test]
    fn display() {
        let v = |coeffs: Vec<i128>| Cyclotomic { e: 8, coeffs }.to_string();
        assert_eq!(v(vec![0, 0, 0, 0]), "0");
        assert_eq!(v(vec![3, 0, 0, 0]), "3");
        assert_eq!(v(vec![-1, 1, 0, -2]), "-1 + z - 2z^3");
        assert_eq!(v(vec![0, -1, 1, 0]), "-z + z^2");
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        let ring = CyclotomicRing::new(12);
        assert!(ring.from_exponents((0..12).map(|t| (t, 1))).is_zero());
        // the primitive cube roots sum to −1
        assert_eq!(ring.from_exponents([(4, 1), (8, 1)]).as_integer(), Some(-1));
        let z = ring.from_exponents([(1, 1)]);
        let mut p = ring.integer(1);
        for _ in 0..12 {
            p = ring.mul(&p, &z);
        }
        assert_eq!(p, ring.integer(1));
    }

    proptest! {
        #[test]
        fn conjugation_is_an_involutive_ring_map(
            e in 1u64..40,
            a in proptest::collection::vec((0u64..40, -5i128..5), 0..6),
            b in proptest::collection::vec((0u64..40, -5i128..5), 0..6),
        ) {
            let ring = CyclotomicRing::new(e);
            let x = ring.from_exponents(a);
            let y = ring.from_exponents(b);
            prop_assert_eq!(ring.conj(&ring.conj(&x)), x.clone());
            prop_assert_eq!(ring.conj(&ring.mul(&x, &y)), ring.mul(&ring.conj(&x), &ring.conj(&y)));
            prop_assert_eq!(ring.mul(&x, &y), ring.mul(&y, &x));
        }
    }
}
