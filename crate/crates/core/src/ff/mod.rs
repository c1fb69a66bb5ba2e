//! Exact arithmetic in `F_{p^f}`.
//!
//! Elements are addressed by their *code*: the polynomial-basis coefficient
//! vector `(c_0, …, c_{f-1})` read as the base-`p` integer `Σ c_i p^i`. Codes
//! are canonical, so element equality is code equality. Multiplication goes
//! through discrete log tables built from a fixed primitive element.

mod element;
pub mod numtheory;

use std::fmt;
use std::sync::Arc;

pub use element::{ArithOp, FieldElement, Operand};
pub use numtheory::p_part;

use crate::error::{Error, Result};
use numtheory::{factorize, is_prime};

/// Default cap on `q = p^f`.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 20;

const ADD_TABLE_MAX: u32 = 1024;

/// The finite field `F_q`, `q = p^f`, realized as `F_p[X]/(modulus)`.
pub struct Field {
    p: u32,
    degree: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Option<Vec<u32>>,
    unit_factors: Vec<(u64, u32)>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// Coefficient tuples of length `len` over `F_p`, in lexicographic order with
/// `c_0` most significant, yielded as codes.
fn lex_codes(p: u32, len: u32) -> impl Iterator<Item = u32> {
    let total = (p as u64).pow(len) as u32;
    (0..total).map(move |t| {
        // digit i of t (most significant first) becomes c_i
        let mut code = 0u32;
        let mut rest = t;
        let mut weight = 1u32;
        let mut digits = Vec::with_capacity(len as usize);
        for _ in 0..len {
            digits.push(rest % p);
            rest /= p;
        }
        // digits[0] is least significant digit of t, i.e. c_{len-1}
        for c in digits.iter().rev() {
            code += c * weight;
            weight *= p;
        }
        code
    })
}

fn to_digits(code: u32, p: u32, len: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(len as usize);
    let mut c = code;
    for _ in 0..len {
        v.push(c % p);
        c /= p;
    }
    v
}

fn from_digits(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let dm = m.len() - 1;
    let p64 = p as u64;
    while r.len() > dm {
        let lead = r.pop().unwrap() % p64;
        if lead == 0 {
            continue;
        }
        let base = r.len() - dm;
        for (j, &mj) in m[..dm].iter().enumerate() {
            let sub = lead * mj as u64 % p64;
            r[base + j] = (r[base + j] + p64 - sub) % p64;
        }
    }
    r.into_iter().map(|x| (x % p64) as u32).collect()
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    out.into_iter().map(|x| x as u32).collect()
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() as u32 - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        for low in lex_codes(p, d) {
            let mut divisor = to_digits(low, p, d);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// `F_{p^f}` with the default cardinality cap.
    pub fn new(p: u64, f: u32) -> Result<Arc<Field>> {
        Self::with_cap(p, f, DEFAULT_FIELD_CAP)
    }

    /// `F_q` for a prime power `q`.
    pub fn of_order(q: u64) -> Result<Arc<Field>> {
        let (p, f) = numtheory::prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, f)
    }

    /// Builds `F_{p^f}` with the lexicographically least monic irreducible
    /// modulus (coefficients compared low degree first).
    pub fn with_cap(p: u64, f: u32, cap: u64) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 {
            return Err(Error::InvalidSpec("extension degree must be at least 1".into()));
        }
        let size = (p as u128).checked_pow(f).unwrap_or(u128::MAX);
        if size > cap as u128 || size > u32::MAX as u128 {
            return Err(Error::FieldTooLarge { size, cap });
        }
        let p = p as u32;
        let modulus = lex_codes(p, f)
            .map(|low| {
                let mut m = to_digits(low, p, f);
                m.push(1);
                m
            })
            .find(|m| is_irreducible(m, p))
            .expect("an irreducible polynomial exists in every degree");
        Ok(Arc::new(Self::build(p, f, modulus)))
    }

    /// Builds a field from an explicit monic modulus (low degree first).
    pub fn from_modulus(p: u64, modulus: Vec<u32>) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p = p as u32;
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::Reducible);
        }
        let f = modulus.len() as u32 - 1;
        let size = (p as u128).pow(f);
        if size > DEFAULT_FIELD_CAP as u128 {
            return Err(Error::FieldTooLarge { size, cap: DEFAULT_FIELD_CAP });
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::Reducible);
        }
        Ok(Arc::new(Self::build(p, f, modulus)))
    }

    fn build(p: u32, f: u32, modulus: Vec<u32>) -> Field {
        let q = p.pow(f);
        let unit_factors = factorize(q as u64 - 1);
        let slow_mul = |a: u32, b: u32| -> u32 {
            let prod = poly_mul(&to_digits(a, p, f), &to_digits(b, p, f), p);
            from_digits(&poly_rem(&prod, &modulus, p), p)
        };
        let slow_pow = |a: u32, mut e: u64| -> u32 {
            let mut acc = 1u32;
            let mut base = a;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            acc
        };
        let order = q as u64 - 1;
        let generator = lex_codes(p, f)
            .filter(|&c| c != 0)
            .find(|&c| unit_factors.iter().all(|&(r, _)| slow_pow(c, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..order as u32 {
            exp.push(cur);
            log[cur as usize] = i;
            cur = slow_mul(cur, generator);
        }
        debug_assert_eq!(cur, 1);

        let neg = (0..q)
            .map(|c| {
                let d: Vec<u32> = to_digits(c, p, f).iter().map(|&x| (p - x) % p).collect();
                from_digits(&d, p)
            })
            .collect();

        let mut field = Field {
            p,
            degree: f,
            q,
            modulus,
            generator,
            exp,
            log,
            neg,
            add_table: None,
            unit_factors,
        };
        if p != 2 && f > 1 && q <= ADD_TABLE_MAX {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.add_digitwise(a, b);
                }
            }
            field.add_table = Some(table);
        }
        field
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Cardinality `q`.
    pub fn size(&self) -> u32 {
        self.q
    }

    /// Monic modulus, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The fixed primitive element (least in lexicographic order).
    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }

    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        to_digits(a, self.p, self.degree)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<u32> {
        if coeffs.len() != self.degree as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::FieldMismatch);
        }
        Ok(from_digits(coeffs, self.p))
    }

    /// Image of an integer under `Z → F_p ⊆ F_q`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    fn add_digitwise(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut w = 1;
        for _ in 0..self.degree {
            out += ((a % p + b % p) % p) * w;
            a /= p;
            b /= p;
            w *= p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if self.degree == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if let Some(t) = &self.add_table {
            t[(a * self.q + b) as usize]
        } else {
            self.add_digitwise(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.q - 1;
        let l = self.log[a as usize];
        Ok(self.exp[((n - l) % n) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative exponents require `a ≠ 0`.
    pub fn pow(&self, a: u32, e: i64) -> Result<u32> {
        if a == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Less => Err(Error::DivisionByZero),
                std::cmp::Ordering::Equal => Ok(1),
                std::cmp::Ordering::Greater => Ok(0),
            };
        }
        let n = (self.q - 1) as i64;
        let l = self.log[a as usize] as i64;
        let idx = (l as i128 * e as i128).rem_euclid(n as i128) as usize;
        Ok(self.exp[idx])
    }

    /// Frobenius `a ↦ a^{p^k}`.
    pub fn frobenius(&self, a: u32, k: u32) -> u32 {
        let e = (self.p as u64).pow(k % self.degree.max(1));
        self.pow(a, e as i64).expect("non-negative exponent")
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u32) -> Result<u64> {
        if a == 0 {
            return Err(Error::ZeroOrder);
        }
        let n = (self.q - 1) as u64;
        let l = self.log[a as usize] as u64;
        Ok(n / numtheory::gcd(l, n))
    }

    /// The deterministic element of exact order `r`: the fixed generator
    /// raised to `(q−1)/r`.
    pub fn element_of_order(&self, r: u64) -> Result<u32> {
        let n = (self.q - 1) as u64;
        if r == 0 || !n.is_multiple_of(r) {
            return Err(Error::OrderNotDivisor { order: r, group_order: n });
        }
        Ok(self.exp[(n / r) as usize % self.exp.len()])
    }

    /// Prime factorization of `q − 1`.
    pub fn unit_group_factors(&self) -> &[(u64, u32)] {
        &self.unit_factors
    }

    /// Evaluates a polynomial with coefficients in `F_p` (low degree first) at `x`.
    fn eval_prime_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Image of `x` (the class of `X` in `source`) under the fixed embedding
    /// `source → self`: the least code that is a root of `source`'s modulus.
    pub fn embedding_root(&self, source: &Field) -> Result<u32> {
        if source.p != self.p || !self.degree.is_multiple_of(source.degree) {
            return Err(Error::NoEmbedding { from: source.q as u64, to: self.q as u64 });
        }
        (0..self.q)
            .find(|&x| self.eval_prime_poly(&source.modulus, x) == 0)
            .ok_or(Error::NoEmbedding { from: source.q as u64, to: self.q as u64 })
    }

    /// Embeds an element of `source` into `self`.
    pub fn embed_from(&self, source: &Field, a: u32) -> Result<u32> {
        let root = self.embedding_root(source)?;
        Ok(self.embed_with_root(source, root, a))
    }

    /// Embedding given a precomputed [`Field::embedding_root`].
    pub fn embed_with_root(&self, source: &Field, root: u32, a: u32) -> u32 {
        let coeffs = source.coefficients(a);
        self.eval_prime_poly(&coeffs, root)
    }
}

/// Moves `a ∈ source` into `target` along the fixed embedding.
pub fn subfield_embed(a: u32, source: &Field, target: &Field) -> Result<u32> {
    if !source.contains(a) {
        return Err(Error::FieldMismatch);
    }
    target.embed_from(source, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_order(field: &Field, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = field.mul(x, a);
            k += 1;
        }
        k
    }

    #[test]
    fn creation_examples() {
        assert_eq!(Field::new(5, 1).unwrap().size(), 5);
        assert_eq!(Field::new(5, 2).unwrap().size(), 25);
        let f4 = Field::new(2, 2).unwrap();
        assert_eq!(f4.size(), 4);
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert!(matches!(Field::new(6, 1), Err(Error::NotPrime(6))));
        assert!(matches!(Field::new(2, 21), Err(Error::FieldTooLarge { .. })));
        assert!(Field::with_cap(2, 21, 1 << 21).is_ok());
    }

    #[test]
    fn modulus_is_lexicographically_least() {
        // over F_5, x^2 + 1 has the root 2; x^2 + x + 1 has discriminant 2, a non-square
        assert_eq!(Field::new(5, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Field::new(7, 1).unwrap().modulus(), &[0, 1]);
        assert!(matches!(Field::from_modulus(5, vec![1, 0, 1]), Err(Error::Reducible)));
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.mul(2, 3), 1);
        assert_eq!(f5.pow(2, 4).unwrap(), 1);
        let f9 = Field::new(3, 2).unwrap();
        for x in 1..9 {
            assert_eq!(f9.pow(x, 8).unwrap(), 1);
        }
        assert!(matches!(f5.div(1, 0), Err(Error::DivisionByZero)));
        assert!(matches!(f5.pow(0, -1), Err(Error::DivisionByZero)));
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25] {
            let f = Field::of_order(q).unwrap();
            let q = q as u32;
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn orders_divide_group_order() {
        for q in [5u64, 9, 16, 25, 49, 81] {
            let f = Field::of_order(q).unwrap();
            for a in 1..f.size() {
                let o = f.element_order(a).unwrap();
                assert_eq!(o, naive_order(&f, a));
                assert_eq!((q - 1) % o, 0);
                assert_eq!(f.pow(a, q as i64 - 1).unwrap(), 1);
            }
        }
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.element_order(1).unwrap(), 1);
        assert_eq!(f5.element_order(2).unwrap(), 4);
        assert!(matches!(f5.element_order(0), Err(Error::ZeroOrder)));
        let f25 = Field::new(5, 2).unwrap();
        assert_eq!(f25.element_order(f25.generator()).unwrap(), 24);
    }

    #[test]
    fn element_of_order_examples() {
        let f5 = Field::new(5, 1).unwrap();
        let g = f5.element_of_order(4).unwrap();
        assert!(g == 2 || g == 3);
        assert!(f5.element_of_order(3).is_err());

        let f25 = Field::new(5, 2).unwrap();
        let gamma = f25.element_of_order(8).unwrap();
        assert_eq!(f25.pow(gamma, 4).unwrap(), f25.neg(1));
    }

    #[test]
    fn element_of_order_is_exact() {
        for q in [7u64, 9, 25, 64, 81, 121] {
            let f = Field::of_order(q).unwrap();
            let n = q - 1;
            for r in (1..=n).filter(|r| n % r == 0) {
                let a = f.element_of_order(r).unwrap();
                assert_eq!(f.pow(a, r as i64).unwrap(), 1);
                for (s, _) in factorize(r) {
                    assert_ne!(f.pow(a, (r / s) as i64).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let f5 = Field::new(5, 1).unwrap();
        let f25 = Field::new(5, 2).unwrap();
        assert_eq!(subfield_embed(1, &f5, &f25).unwrap(), 1);
        let img = subfield_embed(2, &f5, &f25).unwrap();
        assert_eq!(f25.element_order(img).unwrap(), 4);
        let f4 = Field::new(2, 2).unwrap();
        let f8 = Field::new(2, 3).unwrap();
        assert!(matches!(subfield_embed(1, &f4, &f8), Err(Error::NoEmbedding { .. })));
    }

    #[test]
    fn embedding_is_ring_homomorphism() {
        for (src, tgt) in [((5u64, 1u32), (5u64, 2u32)), ((2, 2), (2, 4)), ((3, 2), (3, 4)), ((2, 1), (2, 3))] {
            let s = Field::new(src.0, src.1).unwrap();
            let t = Field::new(tgt.0, tgt.1).unwrap();
            let root = t.embedding_root(&s).unwrap();
            let phi = |a| t.embed_with_root(&s, root, a);
            for a in 0..s.size() {
                for b in 0..s.size() {
                    assert_eq!(phi(s.add(a, b)), t.add(phi(a), phi(b)));
                    assert_eq!(phi(s.mul(a, b)), t.mul(phi(a), phi(b)));
                }
                if a != 0 {
                    assert_eq!(s.element_order(a).unwrap(), t.element_order(phi(a)).unwrap());
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        let f = Field::new(3, 2).unwrap();
        for a in 0..3 {
            assert_eq!(f.frobenius(a, 1), a);
        }
        let moved = (0..9).filter(|&a| f.frobenius(a, 1) != a).count();
        assert_eq!(moved, 6);
    }
}
