//! Character tables over cyclotomic integers, and the class-algebra
//! computations built on them.

pub mod cyclotomic;
pub mod dixon;
pub mod structure;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use cyclotomic::{Cyclotomic, CyclotomicRing};
pub use dixon::{dixon_prime, DEFAULT_CLASS_CAP};
pub use structure::{structure_constants, StructureConstants};

use crate::error::{Error, Result};
use crate::grp::{ClassData, FiniteGroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    ring: CyclotomicRing,
    pub prime: u64,
    pub group_order: u64,
    pub class_sizes: Vec<u64>,
    pub inverse_class: Vec<usize>,
    pub degrees: Vec<u64>,
    /// `values[χ][class]`.
    pub values: Vec<Vec<Cyclotomic>>,
    pub real: Vec<bool>,
}

/// Serialized form: coefficient arrays in the reduced power basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableData {
    pub conductor: u64,
    pub prime: u64,
    pub degrees: Vec<u64>,
    pub values: Vec<Vec<Vec<i64>>>,
}

impl CharacterTable {
    fn assemble(
        classes: &ClassData,
        prime: u64,
        degrees: Vec<u64>,
        values: Vec<Vec<Cyclotomic>>,
    ) -> Self {
        let real = values
            .iter()
            .map(|row| (0..row.len()).all(|c| row[c] == row[classes.inverse_class[c]]))
            .collect();
        CharacterTable {
            ring: CyclotomicRing::new(classes.exponent),
            prime,
            group_order: classes.group_order(),
            class_sizes: classes.sizes.clone(),
            inverse_class: classes.inverse_class.clone(),
            degrees,
            values,
            real,
        }
    }

    pub fn ring(&self) -> &CyclotomicRing {
        &self.ring
    }

    pub fn num_characters(&self) -> usize {
        self.degrees.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn value(&self, chi: usize, class: usize) -> &Cyclotomic {
        &self.values[chi][class]
    }

    pub fn is_trivial(&self, chi: usize) -> bool {
        self.values[chi].iter().all(|v| v.as_integer() == Some(1))
    }

    pub fn to_data(&self) -> Result<TableData> {
        let narrow = |c: &i128| {
            i64::try_from(*c).map_err(|_| Error::Consistency("character value too large".into()))
        };
        let values = self
            .values
            .iter()
            .map(|row| {
                row.iter().map(|v| v.coeffs.iter().map(narrow).collect()).collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        Ok(TableData {
            conductor: self.ring.conductor(),
            prime: self.prime,
            degrees: self.degrees.clone(),
            values,
        })
    }

    pub fn from_data(data: &TableData, classes: &ClassData) -> Result<Self> {
        if data.conductor != classes.exponent {
            return Err(Error::Consistency("table conductor differs from the exponent".into()));
        }
        let ring = CyclotomicRing::new(data.conductor);
        let k = classes.num_classes();
        if data.degrees.len() != data.values.len()
            || data.values.iter().any(|row| row.len() != k)
            || data.values.iter().flatten().any(|v| v.len() != ring.rank())
        {
            return Err(Error::Malformed("character table has the wrong shape".into()));
        }
        let values = data
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| Cyclotomic {
                        e: data.conductor,
                        coeffs: v.iter().map(|&c| c as i128).collect(),
                    })
                    .collect()
            })
            .collect();
        Ok(Self::assemble(classes, data.prime, data.degrees.clone(), values))
    }

    /// `Σ_χ weight(χ)·term(χ)` with the weights `L/den(χ)`, divided by `L`,
    /// asserted rational.
    fn rational_sum(
        &self,
        chars: impl Iterator<Item = usize> + Clone,
        den: impl Fn(usize) -> i128,
        term: impl Fn(usize) -> Cyclotomic,
    ) -> Result<Ratio<i128>> {
        let l = chars.clone().fold(1i128, |acc, chi| acc.lcm(&den(chi)));
        let mut acc = self.ring.zero();
        for chi in chars {
            acc = self.ring.add(&acc, &self.ring.scale(&term(chi), l / den(chi)));
        }
        let n = acc
            .as_integer()
            .ok_or_else(|| Error::Inconsistency("character sum is not rational".into()))?;
        Ok(Ratio::new(n, l))
    }
}

/// Exact table by Dixon's method.
pub fn dixon_character_table(
    classes: &ClassData,
    sc: &StructureConstants,
    class_cap: usize,
) -> Result<CharacterTable> {
    let raw = dixon::dixon(classes, sc, class_cap)?;
    Ok(CharacterTable::assemble(classes, raw.prime, raw.degrees, raw.values))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub characters: usize,
    pub rows_orthogonal: bool,
    pub columns_orthogonal: bool,
    pub degree_square_sum: u128,
    pub degrees_divide_order: bool,
    /// `Σ ν₂(χ)χ(1)`.
    pub indicator_sum: i128,
    pub involution_count: u64,
}

impl TableReport {
    pub fn ok(&self, order: u64) -> bool {
        self.rows_orthogonal
            && self.columns_orthogonal
            && self.degree_square_sum == order as u128
            && self.degrees_divide_order
            && self.indicator_sum == self.involution_count as i128
    }
}

/// Exact orthogonality relations, degree checks and the Frobenius–Schur count.
pub fn check_table(table: &CharacterTable, classes: &ClassData) -> Result<TableReport> {
    let ring = table.ring();
    let k = table.num_classes();
    let h = table.num_characters();
    let order = table.group_order as i128;
    let mut rows_orthogonal = h == k;
    for a in 0..h {
        for b in a..h {
            let mut acc = ring.zero();
            for c in 0..k {
                let prod = ring.mul(table.value(a, c), table.value(b, table.inverse_class[c]));
                acc = ring.add(&acc, &ring.scale(&prod, table.class_sizes[c] as i128));
            }
            let want = if a == b { order } else { 0 };
            rows_orthogonal &= acc.as_integer() == Some(want);
        }
    }
    let mut columns_orthogonal = true;
    for c in 0..k {
        for d in c..k {
            let mut acc = ring.zero();
            for chi in 0..h {
                acc = ring.add(
                    &acc,
                    &ring.mul(table.value(chi, c), table.value(chi, table.inverse_class[d])),
                );
            }
            let want = if c == d { order / table.class_sizes[c] as i128 } else { 0 };
            columns_orthogonal &= acc.as_integer() == Some(want);
        }
    }
    let nu = fs_indicator(table, classes, 2)?;
    let indicator_sum: Ratio<i128> =
        nu.iter().zip(&table.degrees).map(|(v, &d)| v * d as i128).sum();
    let involution_count = (0..k)
        .filter(|&c| classes.power(c, 2) == 0)
        .map(|c| classes.sizes[c])
        .sum();
    Ok(TableReport {
        characters: h,
        rows_orthogonal,
        columns_orthogonal,
        degree_square_sum: table.degrees.iter().map(|&d| (d as u128).pow(2)).sum(),
        degrees_divide_order: table.degrees.iter().all(|&d| table.group_order.is_multiple_of(d)),
        indicator_sum: if indicator_sum.is_integer() { indicator_sum.to_integer() } else { i128::MIN },
        involution_count,
    })
}

/// `ν_k(χ) = (1/|G|) Σ_x χ(x^k)`, classwise through the power map.
pub fn fs_indicator(table: &CharacterTable, classes: &ClassData, k: i64) -> Result<Vec<Ratio<i128>>> {
    let ring = table.ring();
    (0..table.num_characters())
        .map(|chi| {
            let mut acc = ring.zero();
            for c in 0..table.num_classes() {
                let v = table.value(chi, classes.power(c, k));
                acc = ring.add(&acc, &ring.scale(v, table.class_sizes[c] as i128));
            }
            let n = acc
                .as_integer()
                .ok_or_else(|| Error::Inconsistency("indicator sum is not rational".into()))?;
            let nu = Ratio::new(n, table.group_order as i128);
            if k == 2 && !(nu.is_integer() && nu.to_integer().abs() <= 1) {
                return Err(Error::Inconsistency(format!("ν₂ = {nu} outside {{−1, 0, 1}}")));
            }
            Ok(nu)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionValue {
    /// `Σ_{χ real} χ(g)/χ(1)`.
    pub sum: Ratio<i128>,
    pub decision: bool,
}

/// The real-character sum deciding whether class `class` consists of
/// products of two squares.
pub fn two_squares_criterion(table: &CharacterTable, class: usize) -> Result<CriterionValue> {
    let reals = (0..table.num_characters()).filter(|&chi| table.real[chi]);
    let sum = table.rational_sum(reals, |chi| table.degrees[chi] as i128, |chi| {
        table.value(chi, class).clone()
    })?;
    Ok(CriterionValue { decision: sum != Ratio::from_integer(0), sum })
}

/// `#{x : x^k ∈ C} / |C|` for every class `C`.
pub fn power_root_counts(classes: &ClassData, k: i64) -> Vec<u64> {
    let mut counts = vec![0u64; classes.num_classes()];
    for d in 0..classes.num_classes() {
        counts[classes.power(d, k)] += classes.sizes[d];
    }
    counts.iter().zip(&classes.sizes).map(|(n, s)| n / s).collect()
}

/// `|{(x, y) : x^k y^k = g}|` for `g` in class `target`, by class convolution.
pub fn count_power_word_solutions(
    classes: &ClassData,
    sc: &StructureConstants,
    k: i64,
    target: usize,
) -> u128 {
    let f = power_root_counts(classes, k);
    let n = classes.num_classes();
    let mut total = 0u128;
    for c in (0..n).filter(|&c| f[c] > 0) {
        for d in (0..n).filter(|&d| f[d] > 0) {
            total += f[c] as u128 * f[d] as u128 * sc.get(c, d, target) as u128;
        }
    }
    total
}

/// Per-element counts of `x^k y^k` by the `|G|²` double loop.
pub fn power_word_counts_brute(g: &FiniteGroup, k: i64) -> Vec<u64> {
    let powers: Vec<usize> = (0..g.order()).map(|x| g.pow(x, k)).collect();
    let mut counts = vec![0u64; g.order()];
    for &px in &powers {
        for &py in &powers {
            counts[g.mul(px, py)] += 1;
        }
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleCover {
    /// Triples `(x₁, x₂, x₃) ∈ C₁×C₂×C₃` with product the class representative.
    pub counts: Vec<u128>,
    pub covered: Vec<bool>,
    pub covers_group: bool,
}

/// Frobenius count of `x₁x₂x₃ = h` over a class triple, for every class of `h`.
pub fn frobenius_triple_cover(
    table: &CharacterTable,
    c1: usize,
    c2: usize,
    c3: usize,
) -> Result<TripleCover> {
    let ring = table.ring();
    let products: Vec<Cyclotomic> = (0..table.num_characters())
        .map(|chi| {
            let p = ring.mul(table.value(chi, c1), table.value(chi, c2));
            ring.mul(&p, table.value(chi, c3))
        })
        .collect();
    let sizes = &table.class_sizes;
    let scale = sizes[c1] as i128 * sizes[c2] as i128 * sizes[c3] as i128;
    let mut counts = Vec::with_capacity(table.num_classes());
    for h in 0..table.num_classes() {
        let hinv = table.inverse_class[h];
        let sum = table.rational_sum(
            0..table.num_characters(),
            |chi| (table.degrees[chi] as i128).pow(2),
            |chi| ring.mul(&products[chi], table.value(chi, hinv)),
        )?;
        let count = sum * scale / table.group_order as i128;
        if !count.is_integer() || count.to_integer() < 0 {
            return Err(Error::Inconsistency(format!("triple count {count} is not a count")));
        }
        counts.push(count.to_integer() as u128);
    }
    let covered: Vec<bool> = counts.iter().map(|&c| c > 0).collect();
    let covers_group = covered.iter().all(|&b| b);
    Ok(TripleCover { counts, covered, covers_group })
}

/// Least degree of a nontrivial irreducible character; 1 for the trivial group.
pub fn min_nontrivial_degree(table: &CharacterTable) -> u64 {
    (0..table.num_characters())
        .filter(|&chi| !table.is_trivial(chi))
        .map(|chi| table.degrees[chi])
        .min()
        .unwrap_or(1)
}

/// `⌊|G| / m^{1/3}⌋`, exactly.
pub fn gowers_threshold(order: u64, m: u64) -> u64 {
    let cube = (order as u128).pow(3);
    let (mut lo, mut hi) = (0u64, order);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if (mid as u128).pow(3) * m as u128 <= cube {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GowersReport {
    pub m: u64,
    pub threshold: u64,
    pub sizes: [usize; 3],
    pub hypothesis: [bool; 3],
    /// `Some(product == G)` when all hypotheses hold.
    pub product_is_group: Option<bool>,
}

/// Size criterion: three subsets each larger than `|G|/m^{1/3}` multiply to `G`.
pub fn gowers_np_check(
    g: &FiniteGroup,
    table: &CharacterTable,
    ys: [&[usize]; 3],
) -> Result<GowersReport> {
    let m = min_nontrivial_degree(table);
    let order = g.order() as u64;
    let cube = (order as u128).pow(3);
    let sizes = ys.map(|y| {
        let mut v = y.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len()
    });
    let hypothesis = sizes.map(|s| (s as u128).pow(3) * m as u128 > cube);
    let product_is_group = if hypothesis.iter().all(|&h| h) {
        let covered = set_product_mask(g, &set_product_mask(g, &mask(g, ys[0]), ys[1]), ys[2]);
        let full = covered.iter().all(|&b| b);
        if !full {
            return Err(Error::Inconsistency("Y₁Y₂Y₃ ≠ G although every |Y_i| exceeds the bound".into()));
        }
        Some(full)
    } else {
        None
    };
    Ok(GowersReport { m, threshold: gowers_threshold(order, m), sizes, hypothesis, product_is_group })
}

fn mask(g: &FiniteGroup, ys: &[usize]) -> Vec<bool> {
    let mut m = vec![false; g.order()];
    for &y in ys {
        m[y] = true;
    }
    m
}

fn set_product_mask(g: &FiniteGroup, left: &[bool], right: &[usize]) -> Vec<bool> {
    let mut out = vec![false; g.order()];
    for (x, _) in left.iter().enumerate().filter(|(_, &b)| b) {
        for &y in right {
            out[g.mul(x, y)] = true;
        }
    }
    out
}
