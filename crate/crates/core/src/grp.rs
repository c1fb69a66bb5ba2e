//! Fully enumerated matrix groups and their class data.
//!
//! Elements are indexed `0..|G|` with index 0 the identity. Ordering is BFS
//! layer by layer from the generators, ties broken by the canonical key (the
//! row-major entry encodings packed into a `u128`).

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::numtheory::{gcd, lcm, mod_inv, valuation};
use crate::ff::Field;
use crate::matrix::{mul_into, Matrix};

/// Default enumeration cap.
pub const DEFAULT_MAX_ORDER: u64 = 20_000_000;
/// Multiplication tables are materialized at or below this order.
pub const DEFAULT_TABLE_THRESHOLD: usize = 4096;

#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    pub max_order: u64,
    pub table_threshold: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_order: DEFAULT_MAX_ORDER, table_threshold: DEFAULT_TABLE_THRESHOLD }
    }
}

pub struct FiniteGroup {
    field: Arc<Field>,
    n: usize,
    bits: u32,
    // lexicographic rank of each code, so packed keys order like canonical bytes
    rank: Vec<u32>,
    data: Vec<u32>,
    keys: Vec<u128>,
    index: FxHashMap<u128, u32>,
    generators: Vec<usize>,
    inverse: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("field", &self.field)
            .field("degree", &self.n)
            .field("order", &self.keys.len())
            .finish()
    }
}

/// Enumerates `⟨generators⟩` with default limits except for `cap`.
pub fn enumerate(field: &Arc<Field>, generators: &[Matrix], cap: u64) -> Result<FiniteGroup> {
    enumerate_with(field, generators, EnumLimits { max_order: cap, ..Default::default() })
}

pub fn enumerate_with(
    field: &Arc<Field>,
    generators: &[Matrix],
    limits: EnumLimits,
) -> Result<FiniteGroup> {
    let n = generators.first().map(Matrix::dim).unwrap_or(1);
    FiniteGroup::build(field, n, generators, limits)
}

impl FiniteGroup {
    /// Enumerates with an explicit dimension (needed when there are no generators).
    pub fn build(
        field: &Arc<Field>,
        n: usize,
        generators: &[Matrix],
        limits: EnumLimits,
    ) -> Result<FiniteGroup> {
        for (i, g) in generators.iter().enumerate() {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
            }
            if g.det(field) == 0 {
                return Err(Error::NotInvertible(i));
            }
        }
        let mut g = FiniteGroup::empty(field, n)?;
        let id = Matrix::identity(n);
        g.push(id.entries());

        let nn = n * n;
        let mut layer: Vec<usize> = vec![0];
        let mut buf = vec![0u32; nn];
        while !layer.is_empty() {
            let mut next: Vec<(u128, Vec<u32>)> = Vec::new();
            let mut seen: FxHashMap<u128, ()> = FxHashMap::default();
            for &i in &layer {
                for gen in generators {
                    mul_into(field, n, g.slice(i), gen.entries(), &mut buf);
                    let key = g.key_of(&buf);
                    if !g.index.contains_key(&key) && seen.insert(key, ()).is_none() {
                        next.push((key, buf.clone()));
                    }
                }
            }
            if (g.keys.len() + next.len()) as u64 > limits.max_order {
                return Err(Error::CapExceeded { cap: limits.max_order });
            }
            next.sort_unstable_by_key(|(k, _)| *k);
            layer = next.iter().map(|(_, m)| g.push(m)).collect();
        }
        g.generators = generators
            .iter()
            .map(|m| g.index_of(m).expect("generator lies in its own closure"))
            .collect();
        g.finish(limits);
        Ok(g)
    }

    /// Rebuilds a group from a stored element list (identity first) and
    /// generator indices. Closure is checked on the generators only.
    pub fn from_elements(
        field: &Arc<Field>,
        n: usize,
        elements: &[u32],
        generators: &[usize],
        limits: EnumLimits,
    ) -> Result<FiniteGroup> {
        let nn = n * n;
        if nn == 0 || !elements.len().is_multiple_of(nn) {
            return Err(Error::Malformed("element data does not match dimension".into()));
        }
        if elements.iter().any(|&c| !field.contains(c)) {
            return Err(Error::Malformed("element entry outside the field".into()));
        }
        let count = elements.len() / nn;
        if count as u64 > limits.max_order {
            return Err(Error::CapExceeded { cap: limits.max_order });
        }
        let mut g = FiniteGroup::empty(field, n)?;
        for m in elements.chunks(nn) {
            if g.index.contains_key(&g.key_of(m)) {
                return Err(Error::Malformed("duplicate element".into()));
            }
            g.push(m);
        }
        if !g.element(0).is_identity() {
            return Err(Error::Malformed("element 0 is not the identity".into()));
        }
        if generators.iter().any(|&i| i >= count) {
            return Err(Error::Malformed("generator index out of range".into()));
        }
        g.generators = generators.to_vec();
        let mut buf = vec![0u32; nn];
        for i in 0..count {
            if g.element(i).det(field) == 0 {
                return Err(Error::NotInvertible(i));
            }
            for &s in generators {
                mul_into(field, n, g.slice(i), g.slice(s), &mut buf);
                if !g.index.contains_key(&g.key_of(&buf)) {
                    return Err(Error::Consistency("element list is not closed".into()));
                }
            }
        }
        g.finish(limits);
        Ok(g)
    }

    fn empty(field: &Arc<Field>, n: usize) -> Result<FiniteGroup> {
        let q = field.size();
        let bits = 32 - (q - 1).max(1).leading_zeros();
        let total_bits = bits * (n * n) as u32;
        if total_bits > 128 {
            return Err(Error::KeyTooWide { bits: total_bits });
        }
        let rank = (0..q)
            .map(|c| field.coefficients(c).iter().fold(0, |acc, &d| acc * field.characteristic() + d))
            .collect();
        Ok(FiniteGroup {
            field: Arc::clone(field),
            n,
            bits,
            rank,
            data: Vec::new(),
            keys: Vec::new(),
            index: FxHashMap::default(),
            generators: Vec::new(),
            inverse: Vec::new(),
            table: None,
        })
    }

    fn finish(&mut self, limits: EnumLimits) {
        let g = self;
        let field = Arc::clone(&g.field);
        let n = g.n;
        let nn = n * n;
        g.inverse = (0..g.order())
            .map(|i| {
                let inv = g.element(i).inverse(&field).expect("group elements are invertible");
                g.index_of(&inv).expect("group is closed under inverses") as u32
            })
            .collect();
        if g.order() <= limits.table_threshold {
            let order = g.order();
            let table: Vec<u32> = (0..order)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let mut buf = vec![0u32; nn];
                    let g = &g;
                    (0..order)
                        .map(move |j| {
                            mul_into(&g.field, n, g.slice(i), g.slice(j), &mut buf);
                            g.index[&g.key_of(&buf)]
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            g.table = Some(table);
        }
    }

    /// Row-major entries of element `i`.
    pub fn entries(&self, i: usize) -> &[u32] {
        self.slice(i)
    }

    /// All element entries, concatenated in index order.
    pub fn raw_elements(&self) -> &[u32] {
        &self.data
    }

    fn push(&mut self, m: &[u32]) -> usize {
        let idx = self.keys.len();
        let key = self.key_of(m);
        self.keys.push(key);
        self.index.insert(key, idx as u32);
        self.data.extend_from_slice(m);
        idx
    }

    #[inline]
    fn key_of(&self, m: &[u32]) -> u128 {
        m.iter().fold(0u128, |acc, &c| (acc << self.bits) | self.rank[c as usize] as u128)
    }

    #[inline]
    fn slice(&self, i: usize) -> &[u32] {
        let nn = self.n * self.n;
        &self.data[i * nn..(i + 1) * nn]
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Matrix dimension.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.keys.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    pub fn element(&self, i: usize) -> Matrix {
        Matrix::new(self.n, self.slice(i).to_vec()).unwrap()
    }

    pub fn canonical_key(&self, i: usize) -> u128 {
        self.keys[i]
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        if m.dim() != self.n || m.entries().iter().any(|&c| !self.field.contains(c)) {
            return None;
        }
        self.index.get(&self.key_of(m.entries())).map(|&i| i as usize)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        if let Some(t) = &self.table {
            return t[a * self.order() + b] as usize;
        }
        let mut buf = [0u32; 128];
        let nn = self.n * self.n;
        mul_into(&self.field, self.n, self.slice(a), self.slice(b), &mut buf[..nn]);
        self.index[&self.key_of(&buf[..nn])] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn pow(&self, a: usize, e: i64) -> usize {
        let mut base = if e < 0 { self.inv(a) } else { a };
        let mut k = e.unsigned_abs();
        let mut acc = 0;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `g⁻¹ x g`.
    #[inline]
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Elements commuting with every generator.
    pub fn center(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&z| self.generators.iter().all(|&g| self.commutes(z, g)))
            .collect()
    }

    /// Normal closure of `seeds`, as a membership mask plus its size.
    ///
    /// Stops early once the closure is the whole group.
    pub fn normal_closure(&self, seeds: &[usize]) -> (Vec<bool>, usize) {
        let total = self.order();
        let mut member = vec![false; total];
        member[0] = true;
        let mut members = vec![0usize];
        let mut ngens: Vec<usize> = Vec::new();
        let mut pending: Vec<usize> = seeds.to_vec();
        loop {
            while let Some(s) = pending.pop() {
                if member[s] {
                    continue;
                }
                ngens.push(s);
                let old_len = members.len();
                for k in 0..old_len {
                    let y = self.mul(members[k], s);
                    if !member[y] {
                        member[y] = true;
                        members.push(y);
                    }
                }
                let mut k = old_len;
                while k < members.len() {
                    let x = members[k];
                    for &t in &ngens {
                        let y = self.mul(x, t);
                        if !member[y] {
                            member[y] = true;
                            members.push(y);
                        }
                    }
                    k += 1;
                }
                if members.len() == total {
                    return (member, total);
                }
            }
            for &t in &ngens {
                for &g in &self.generators {
                    let c = self.conj(t, g);
                    if !member[c] {
                        pending.push(c);
                    }
                }
            }
            if pending.is_empty() {
                return (member, members.len());
            }
        }
    }

    /// Jordan decomposition `g = su = us` inside `⟨g⟩` for characteristic `p`.
    pub fn jordan_decompose(&self, g: usize, p: u64) -> (usize, usize) {
        let order = self.element_order(g);
        let pa = p.pow(valuation(order, p));
        let m = order / pa;
        // p^a·α ≡ 1 (mod m) and m·β ≡ 1 (mod p^a)
        let alpha = if m == 1 { 0 } else { mod_inv(pa % m, m).unwrap() };
        let beta = if pa == 1 { 0 } else { mod_inv(m % pa, pa).unwrap() };
        let s = self.pow(g, ((pa as u128 * alpha as u128) % order as u128) as i64);
        let u = self.pow(g, ((m as u128 * beta as u128) % order as u128) as i64);
        (s, u)
    }

    /// `|C_G(g)|` by direct count.
    pub fn centralizer_order_direct(&self, g: usize) -> u64 {
        (0..self.order()).filter(|&h| self.commutes(g, h)).count() as u64
    }
}

/// Conjugacy classes, inverse-class permutation and power maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassData {
    pub class_of: Vec<u32>,
    pub reps: Vec<usize>,
    pub sizes: Vec<u64>,
    pub inverse_class: Vec<usize>,
    pub rep_orders: Vec<u64>,
    pub exponent: u64,
    /// Row-major `classes × exponent`: class of `rep^j`.
    pub power_map: Vec<u32>,
}

impl ClassData {
    pub fn num_classes(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g] as usize
    }

    /// Class of `rep(c)^j`, any integer `j`.
    pub fn power(&self, c: usize, j: i64) -> usize {
        let e = self.exponent as i64;
        self.power_map[c * self.exponent as usize + j.rem_euclid(e) as usize] as usize
    }

    pub fn group_order(&self) -> u64 {
        self.sizes.iter().sum()
    }

    /// Classes of size one.
    pub fn central_classes(&self) -> Vec<usize> {
        (0..self.num_classes()).filter(|&c| self.sizes[c] == 1).collect()
    }

    /// `|C_G(g)| = |G| / |class(g)|`.
    pub fn centralizer_order(&self, g: usize) -> u64 {
        self.group_order() / self.sizes[self.class_of(g)]
    }

    /// Internal consistency: class equation, identity class, involutive
    /// inversion, `power(c, 1) = c`.
    pub fn check(&self, order: u64) -> Result<()> {
        let fail = |m: &str| Err(Error::Consistency(m.to_string()));
        if self.group_order() != order {
            return fail("class sizes do not sum to the group order");
        }
        if self.reps.first() != Some(&0) || self.sizes.first() != Some(&1) {
            return fail("class 0 is not the identity");
        }
        if self.sizes.iter().any(|s| !order.is_multiple_of(*s)) {
            return fail("class size does not divide the group order");
        }
        for c in 0..self.num_classes() {
            if self.inverse_class[self.inverse_class[c]] != c {
                return fail("inverse class map is not an involution");
            }
            if self.exponent > 1 && self.power(c, 1) != c {
                return fail("power map does not fix classes at j = 1");
            }
            if self.rep_orders[c] == 0 || !self.exponent.is_multiple_of(self.rep_orders[c]) {
                return fail("representative order does not divide the exponent");
            }
        }
        if self.power_map.len() != self.num_classes() * self.exponent as usize {
            return fail("power map has the wrong shape");
        }
        Ok(())
    }
}

/// Conjugation orbits by generators; representatives are least indices.
pub fn conjugacy_classes(g: &FiniteGroup) -> ClassData {
    let total = g.order();
    let mut class_of = vec![u32::MAX; total];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..total {
        if class_of[start] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(start);
        class_of[start] = c;
        let mut size = 1u64;
        stack.push(start);
        while let Some(x) = stack.pop() {
            for &h in g.generators() {
                let y = g.conj(x, h);
                if class_of[y] == u32::MAX {
                    class_of[y] = c;
                    size += 1;
                    stack.push(y);
                }
            }
        }
        sizes.push(size);
    }
    let inverse_class = reps.iter().map(|&r| class_of[g.inv(r)] as usize).collect();
    let rep_orders: Vec<u64> = reps.iter().map(|&r| g.element_order(r)).collect();
    let exponent = rep_orders.iter().fold(1, |acc, &o| lcm(acc, o));
    let power_map = reps
        .par_iter()
        .flat_map_iter(|&r| {
            let mut x = 0usize;
            let mut row = Vec::with_capacity(exponent as usize);
            for _ in 0..exponent {
                row.push(class_of[x]);
                x = g.mul(x, r);
            }
            row
        })
        .collect();
    ClassData { class_of, reps, sizes, inverse_class, rep_orders, exponent, power_map }
}

pub fn center(g: &FiniteGroup) -> Vec<usize> {
    g.center()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasisimpleReport {
    pub quasisimple: bool,
    pub perfect: bool,
    pub derived_order: usize,
    pub center_order: usize,
    /// A non-central class whose normal closure with the center is proper.
    pub proper_normal_class: Option<usize>,
}

/// Perfect and simple modulo the center.
pub fn is_quasisimple(g: &FiniteGroup, classes: &ClassData) -> QuasisimpleReport {
    let gens = g.generators();
    let mut commutators = Vec::new();
    for &a in gens {
        for &b in gens {
            let c = g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b));
            if c != 0 {
                commutators.push(c);
            }
        }
    }
    let (_, derived_order) = g.normal_closure(&commutators);
    let center = g.center();
    let perfect = derived_order == g.order();
    let mut proper_normal_class = None;
    if perfect {
        for c in 0..classes.num_classes() {
            if classes.sizes[c] == 1 {
                continue;
            }
            let mut seeds = center.clone();
            seeds.push(classes.reps[c]);
            if g.normal_closure(&seeds).1 != g.order() {
                proper_normal_class = Some(c);
                break;
            }
        }
    }
    let nonabelian = center.len() < g.order();
    QuasisimpleReport {
        quasisimple: perfect && nonabelian && proper_normal_class.is_none(),
        perfect,
        derived_order,
        center_order: center.len(),
        proper_normal_class,
    }
}

/// Whether `gcd(order, p) = 1`.
pub fn is_p_regular(order: u64, p: u64) -> bool {
    gcd(order, p) == 1
}
