//! Dixon's method: common eigenvectors of the class matrices over `F_ℓ`,
//! lifted to cyclotomic integers through eigenvalue multiplicities.

use super::cyclotomic::{Cyclotomic, CyclotomicRing};
use super::structure::StructureConstants;
use crate::error::{Error, Result};
use crate::ff::numtheory::{factorize, is_prime, mod_inv, mod_pow};
use crate::grp::ClassData;

/// Default bound on the number of classes.
pub const DEFAULT_CLASS_CAP: usize = 400;

pub(crate) struct RawTable {
    pub prime: u64,
    pub degrees: Vec<u64>,
    pub values: Vec<Vec<Cyclotomic>>,
}

/// Least prime `ℓ ≡ 1 (mod e)` with `ℓ > 2√order`.
pub fn dixon_prime(exponent: u64, order: u64) -> u64 {
    let mut l = exponent + 1;
    loop {
        if (l as u128) * (l as u128) > 4 * order as u128 && is_prime(l) {
            return l;
        }
        l += exponent;
    }
}

fn primitive_root(l: u64) -> u64 {
    let factors = factorize(l - 1);
    (2..l)
        .find(|&z| factors.iter().all(|&(r, _)| mod_pow(z, (l - 1) / r, l) != 1))
        .unwrap_or(1)
}

struct Fl(u64);

impl Fl {
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.0 - b) % self.0
    }
    fn inv(&self, a: u64) -> u64 {
        mod_inv(a, self.0).expect("nonzero residue")
    }
}

/// Row echelon form in place; returns pivot columns. Rows are normalized and
/// cleared above and below each pivot.
fn rref(f: &Fl, rows: &mut Vec<Vec<u64>>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = f.inv(rows[r][col]);
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let factor = rows[i][col];
                for j in 0..width {
                    let v = f.mul(factor, rows[r][j]);
                    rows[i][j] = f.sub(rows[i][j], v);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Null space of a square matrix, as row vectors.
fn nullspace(f: &Fl, mut a: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let n = a.len();
    let pivots = rref(f, &mut a);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; n];
            v[fc] = 1;
            for (row, &pc) in a.iter().zip(&pivots) {
                v[pc] = f.sub(0, row[fc]);
            }
            v
        })
        .collect()
}

/// Characteristic polynomial via Hessenberg reduction, low degree first.
fn charpoly(f: &Fl, mut h: Vec<Vec<u64>>) -> Vec<u64> {
    let n = h.len();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = f.inv(h[j + 1][j]);
        for i in j + 2..n {
            let u = f.mul(h[i][j], inv);
            if u == 0 {
                continue;
            }
            for c in 0..n {
                let v = f.mul(u, h[j + 1][c]);
                h[i][c] = f.sub(h[i][c], v);
            }
            for row in h.iter_mut() {
                let v = f.mul(u, row[i]);
                row[j + 1] = f.add(row[j + 1], v);
            }
        }
    }
    // p_{m+1} = (x − h_mm) p_m − Σ_{i<m} h_im (Π_{i<r≤m} h_{r,r−1}) p_i
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 0..n {
        let mut next = vec![0u64; m + 2];
        for (d, &c) in polys[m].iter().enumerate() {
            next[d + 1] = f.add(next[d + 1], c);
            next[d] = f.sub(next[d], f.mul(h[m][m], c));
        }
        let mut prod = 1u64;
        for i in (0..m).rev() {
            prod = f.mul(prod, h[i + 1][i]);
            let coef = f.mul(h[i][m], prod);
            if coef == 0 {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] = f.sub(next[d], f.mul(coef, c));
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn roots(f: &Fl, poly: &[u64]) -> Vec<u64> {
    (0..f.0)
        .filter(|&x| poly.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c)) == 0)
        .collect()
}

/// Splits `basis` (rows in RREF) into eigenspaces of class matrix `i`.
fn split(
    f: &Fl,
    sc: &StructureConstants,
    i: usize,
    basis: Vec<Vec<u64>>,
    pivots: &[usize],
) -> Result<Vec<Vec<Vec<u64>>>> {
    let d = basis.len();
    let mut a = vec![vec![0u64; d]; d];
    for (s, b) in basis.iter().enumerate() {
        for (t, &pj) in pivots.iter().enumerate() {
            let mut acc = 0;
            for (m, &bm) in b.iter().enumerate() {
                if bm != 0 {
                    acc = f.add(acc, f.mul(sc.get(i, pj, m) % f.0, bm));
                }
            }
            a[t][s] = acc;
        }
    }
    let lambdas = roots(f, &charpoly(f, a.clone()));
    let mut parts = Vec::new();
    let mut total = 0;
    for lambda in lambdas {
        let mut shifted = a.clone();
        for (t, row) in shifted.iter_mut().enumerate() {
            row[t] = f.sub(row[t], lambda);
        }
        let ys = nullspace(f, shifted);
        total += ys.len();
        let vecs: Vec<Vec<u64>> = ys
            .iter()
            .map(|y| {
                let mut v = vec![0u64; basis[0].len()];
                for (s, &ys) in y.iter().enumerate() {
                    if ys != 0 {
                        for (vj, &bj) in v.iter_mut().zip(&basis[s]) {
                            *vj = f.add(*vj, f.mul(ys, bj));
                        }
                    }
                }
                v
            })
            .collect();
        parts.push(vecs);
    }
    if total != d {
        return Err(Error::Dixon(format!(
            "class matrix {i} is not diagonalizable over F_{} on a {d}-dimensional space",
            f.0
        )));
    }
    Ok(parts)
}

pub(crate) fn dixon(classes: &ClassData, sc: &StructureConstants, cap: usize) -> Result<RawTable> {
    let k = classes.num_classes();
    if k > cap {
        return Err(Error::TooManyClasses { classes: k, cap });
    }
    let order = classes.group_order();
    let e = classes.exponent;
    let l = dixon_prime(e, order);
    let f = Fl(l);

    let mut done: Vec<Vec<u64>> = Vec::new();
    let mut pending: Vec<Vec<Vec<u64>>> =
        vec![(0..k).map(|j| (0..k).map(|m| u64::from(j == m)).collect()).collect()];
    for i in 1..k {
        if pending.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for mut basis in pending {
            let pivots = rref(&f, &mut basis);
            for mut part in split(&f, sc, i, basis, &pivots)? {
                if part.len() == 1 {
                    done.push(part.pop().unwrap());
                } else {
                    next.push(part);
                }
            }
        }
        pending = next;
    }
    if k == 1 {
        done.push(vec![1]);
    }
    if !pending.is_empty() {
        return Err(Error::Dixon("eigenspace splitting incomplete".into()));
    }
    if done.len() != k {
        return Err(Error::Dixon(format!("found {} characters for {k} classes", done.len())));
    }

    let ring = CyclotomicRing::new(e);
    let z = primitive_root(l);
    let mut chars = Vec::with_capacity(k);
    for w in done {
        if w[0] == 0 {
            return Err(Error::Dixon("eigenvector vanishes at the identity class".into()));
        }
        let w0 = f.inv(w[0]);
        let w: Vec<u64> = w.iter().map(|&x| f.mul(x, w0)).collect();
        // χ(1)² = |G| / Σ_j ω_j ω_{j'} / |C_j|
        let mut s = 0;
        for j in 0..k {
            let term = f.mul(w[j], w[classes.inverse_class[j]]);
            s = f.add(s, f.mul(term, f.inv(classes.sizes[j] % l)));
        }
        if s == 0 {
            return Err(Error::Dixon("degenerate norm".into()));
        }
        let target = f.mul(order % l, f.inv(s));
        let degree = (1..)
            .take_while(|d: &u64| d * d <= order)
            .find(|&d| order.is_multiple_of(d) && f.mul(d % l, d % l) == target)
            .ok_or_else(|| Error::Dixon("no admissible degree".into()))?;
        let modvals: Vec<u64> =
            (0..k).map(|j| f.mul(f.mul(w[j], degree % l), f.inv(classes.sizes[j] % l))).collect();
        let mut values = Vec::with_capacity(k);
        for c in 0..k {
            let o = classes.rep_orders[c];
            let zeta = mod_pow(z, (l - 1) / o, l);
            let zinv = f.inv(zeta);
            let oinv = f.inv(o % l);
            let mut terms = Vec::new();
            let mut total = 0u64;
            for t in 0..o {
                // m_t = (1/o) Σ_s χ(g^s) ζ_o^{−st}
                let step = mod_pow(zinv, t, l);
                let mut acc = 0;
                let mut root = 1;
                for s in 0..o {
                    acc = f.add(acc, f.mul(modvals[classes.power(c, s as i64)], root));
                    root = f.mul(root, step);
                }
                let m = f.mul(acc, oinv);
                if m > degree {
                    return Err(Error::Dixon(format!("eigenvalue multiplicity {m} exceeds degree")));
                }
                total += m;
                if m > 0 {
                    terms.push((t * (e / o), m as i128));
                }
            }
            if total != degree {
                return Err(Error::Dixon("multiplicities do not sum to the degree".into()));
            }
            values.push(ring.from_exponents(terms));
        }
        chars.push((degree, values));
    }
    // trivial character first, then by degree; the sort is stable
    chars.sort_by_key(|(d, vals)| (*d, !vals.iter().all(|v| v.as_integer() == Some(1))));
    let degree_sum: u128 = chars.iter().map(|(d, _)| (*d as u128).pow(2)).sum();
    if degree_sum != order as u128 {
        return Err(Error::Dixon(format!("Σ χ(1)² = {degree_sum} ≠ {order}")));
    }
    let (degrees, values) = chars.into_iter().unzip();
    Ok(RawTable { prime: l, degrees, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_choice() {
        // SL(2,5): e = 60, 2√120 ≈ 21.9
        assert_eq!(dixon_prime(60, 120), 61);
        assert_eq!(dixon_prime(4, 4), 5);
        let l = dixon_prime(360, 51840);
        assert!(is_prime(l) && l % 360 == 1 && l * l > 4 * 51840);
    }

    #[test]
    fn charpoly_of_companion() {
        let f = Fl(101);
        // companion matrix of x³ − 2x² + 3x − 5
        let c = vec![vec![0, 0, 5], vec![1, 0, 101 - 3], vec![0, 1, 2]];
        assert_eq!(charpoly(&f, c), vec![101 - 5, 3, 101 - 2, 1]);
        let diag = vec![vec![3, 0], vec![0, 7]];
        let mut r = roots(&f, &charpoly(&f, diag));
        r.sort();
        assert_eq!(r, vec![3, 7]);
    }

    #[test]
    fn nullspace_dimension() {
        let f = Fl(7);
        let a = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 0, 0]];
        let ns = nullspace(&f, a.clone());
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &a {
                let dot = row.iter().zip(&v).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
                assert_eq!(dot, 0);
            }
        }
    }
}
