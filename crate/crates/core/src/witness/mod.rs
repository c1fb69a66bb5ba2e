//! Explicit two-squares witnesses, exponent formulas and certificates.

mod certificate;

pub use certificate::{
    main2_group, main3_rule, main4_rule,
    main2_certificate, main3_certificate, main4_certificate, sl2_certificate,
    two_squares_certificate, witness_certificate, CertKind, Certificate, Claim, Derivation,
    Evidence, Main4Variant, Sl2Facts, SquarePair, VERIFIER_VERSION,
};

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::chars::{
    count_power_word_solutions, power_word_counts_brute, two_squares_criterion, DEFAULT_CLASS_CAP,
};
use crate::context::GroupData;
use crate::error::{Error, Result};
use crate::ff::numtheory::{floor_log, gcd, is_prime, prime_power, valuation};
use crate::ff::Field;
use crate::grp::{is_quasisimple, ClassData, FiniteGroup};
use crate::matgrp::{norm_one_torus_element, singer_element};
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => Ok(Variant::I),
            "ii" => Ok(Variant::II),
            "iii" => Ok(Variant::III),
            _ => Err(Error::InvalidSpec(format!("unknown variant {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::I => "i",
            Variant::II => "ii",
            Variant::III => "iii",
        })
    }
}

/// Parameters of the `x^{p^a} y^{p^a}` exponent formulas for `SL^ε_n(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentParams {
    pub n: u64,
    pub q: u64,
    pub eps: i8,
    pub p: u64,
    pub variant: Variant,
}

/// `q − ε`.
pub fn q_minus_eps(q: u64, eps: i8) -> u64 {
    if eps > 0 {
        q - 1
    } else {
        q + 1
    }
}

fn check_eps(eps: i8) -> Result<()> {
    if eps == 1 || eps == -1 {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!("ε must be ±1, got {eps}")))
    }
}

impl ExponentParams {
    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)?;
        if !is_prime(self.p) {
            return Err(Error::Hypothesis(format!("{} is not prime", self.p)));
        }
        if prime_power(self.q).is_none() {
            return Err(Error::Hypothesis(format!("{} is not a prime power", self.q)));
        }
        if self.n == 0 || !gcd(self.n, q_minus_eps(self.q, self.eps)).is_multiple_of(self.p) {
            return Err(Error::Hypothesis(format!(
                "p = {} does not divide gcd(n, q − ε) = gcd({}, {})",
                self.p,
                self.n,
                q_minus_eps(self.q, self.eps)
            )));
        }
        if self.variant == Variant::III {
            let qe = q_minus_eps(self.q, self.eps);
            if self.n != self.p || self.p == 2 || valuation(qe, self.p) != 1 {
                return Err(Error::Hypothesis("variant iii needs n = p > 2 and (q − ε)_p = p".into()));
            }
        }
        Ok(())
    }

    /// `b` with `p^b = gcd(n, q − ε)_p`.
    pub fn b(&self) -> u32 {
        valuation(gcd(self.n, q_minus_eps(self.q, self.eps)), self.p)
    }
}

/// The exponent `a` for the given variant.
pub fn main2_exponent(params: &ExponentParams) -> Result<u32> {
    params.validate()?;
    let ExponentParams { n, q, eps, p, variant } = *params;
    let c = floor_log(n, p);
    let qe = q_minus_eps(q, eps);
    let g = gcd(n, qe);
    let q2 = (q as u128 * q as u128 - 1) as u64;
    Ok(match (variant, p) {
        (Variant::I, 2) => c + valuation(q2 / g, 2),
        (Variant::I, _) => c + 1 + valuation(qe / g, p),
        (Variant::II, 2) => (c + valuation(q2, 2)).checked_sub(1).expect("q² − 1 is even"),
        (Variant::II, _) => c + valuation(qe, p),
        (Variant::III, _) => 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCase {
    /// `b ≥ a + 1`: `x = diag(α, …, α, −α)`, `y = 1`.
    Diagonal,
    /// `b = a = 1`: `y` of order 4 in the norm-one torus, `x = 1`.
    NormOneTorus,
    /// `b = a ≥ 2`: `x` built from a Singer-cycle element, `y` diagonal.
    SingerTorus,
}

/// `x, y ∈ SL_n(q)` with `x²y² = z`, `z = ωI` generating the 2-part of the center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralWitness {
    pub n: usize,
    pub q: u64,
    /// `2^a = |z|`.
    pub a: u32,
    /// `2^b = (q − 1)_2`.
    pub b: u32,
    pub case: WitnessCase,
    pub x: Matrix,
    pub y: Matrix,
    pub z: Matrix,
}

pub fn central_two_squares_witness(n: usize, q: u64, eps: i8) -> Result<CentralWitness> {
    check_eps(eps)?;
    if eps < 0 {
        return Err(Error::Unsupported("unitary central witnesses are not constructed".into()));
    }
    if q.is_multiple_of(2) {
        return Err(Error::Hypothesis("q must be odd".into()));
    }
    let field = Field::of_order(q)?;
    let a = valuation(gcd(n as u64, q - 1), 2);
    let b = valuation(q - 1, 2);
    if a == 0 {
        return Err(Error::Hypothesis(format!("Z(SL({n},{q})) has odd order")));
    }
    let block = 1usize << a;
    let f = &*field;
    let minus_one = f.neg(1);
    let (case, x0, y0, omega) = if b > a {
        let alpha = f.element_of_order(1 << (a + 1))?;
        let mut d = vec![alpha; block];
        d[block - 1] = f.neg(alpha);
        (WitnessCase::Diagonal, Matrix::diag(&d), Matrix::identity(block), f.mul(alpha, alpha))
    } else if a == 1 {
        let y = norm_one_torus_element(q, 4)?;
        (WitnessCase::NormOneTorus, Matrix::identity(2), y, minus_one)
    } else {
        let half = block / 2;
        let t = singer_element(half, q, 1 << (2 * a - 1))?;
        let omega = t
            .pow(1 << (a - 1), f)?
            .is_scalar()
            .ok_or_else(|| Error::Inconsistency("t^(2^(a−1)) is not scalar".into()))?;
        let x = Matrix::block_diag(&[t.pow(1 << (a - 2), f)?, t.pow(3 << (a - 2), f)?]);
        let mut d = vec![1; half - 1];
        d.push(minus_one);
        d.extend(std::iter::repeat_n(f.inv(omega)?, half));
        (WitnessCase::SingerTorus, x, Matrix::diag(&d), omega)
    };
    let copies = n / block;
    let w = CentralWitness {
        n,
        q,
        a,
        b,
        case,
        x: Matrix::block_diag(&vec![x0; copies]),
        y: Matrix::block_diag(&vec![y0; copies]),
        z: Matrix::scalar(n, omega),
    };
    if !w.verify()? {
        return Err(Error::Verification(format!("central witness for SL({n},{q}) fails")));
    }
    Ok(w)
}

impl CentralWitness {
    /// Matrix arithmetic only: determinants, scalar `z` of order `2^a`, `x²y² = z`.
    pub fn verify(&self) -> Result<bool> {
        let f = Field::of_order(self.q)?;
        let f = &*f;
        let dims = [&self.x, &self.y, &self.z].iter().all(|m| m.dim() == self.n);
        if !dims {
            return Ok(false);
        }
        let Some(omega) = self.z.is_scalar() else {
            return Ok(false);
        };
        if omega == 0 || f.element_order(omega)? != 1 << self.a {
            return Ok(false);
        }
        let x2 = self.x.mul(&self.x, f);
        let y2 = self.y.mul(&self.y, f);
        Ok(self.x.det(f) == 1 && self.y.det(f) == 1 && x2.mul(&y2, f) == self.z)
    }
}

/// `x' = x·t^{(o+1)/2}` for central `t` of odd order `o`, so that
/// `x'²y² = x²y²t`.
pub fn odd_center_adjust(g: &FiniteGroup, x: usize, y: usize, t: usize) -> Result<(usize, usize)> {
    if !g.generators().iter().all(|&s| g.commutes(t, s)) {
        return Err(Error::Hypothesis("t is not central".into()));
    }
    let o = g.element_order(t);
    if o.is_multiple_of(2) {
        return Err(Error::Hypothesis(format!("t has even order {o}")));
    }
    let z = g.pow(t, o.div_ceil(2) as i64);
    Ok((g.mul(x, z), y))
}

/// `g^{(|g|+1)/2}` for `g` of odd order.
pub fn odd_order_sqrt(g: &FiniteGroup, x: usize) -> Result<usize> {
    let o = g.element_order(x);
    if o.is_multiple_of(2) {
        return Err(Error::Hypothesis(format!("element has even order {o}")));
    }
    Ok(g.pow(x, o.div_ceil(2) as i64))
}

/// Search for `g = uv` with `u, v` unipotent (`p`-power order).
pub struct UnipotentSearch<'a> {
    g: &'a FiniteGroup,
    classes: &'a ClassData,
    members: Vec<usize>,
    unipotent: Vec<bool>,
}

impl<'a> UnipotentSearch<'a> {
    pub fn new(g: &'a FiniteGroup, classes: &'a ClassData, p: u64) -> Self {
        let unipotent: Vec<bool> =
            classes.rep_orders.iter().map(|&o| o == p.pow(valuation(o, p))).collect();
        let members =
            (0..g.order()).filter(|&x| unipotent[classes.class_of(x)]).collect();
        UnipotentSearch { g, classes, members, unipotent }
    }

    pub fn unipotent_count(&self) -> usize {
        self.members.len()
    }

    /// Least `u` (by index) with `u⁻¹x` unipotent, as `(u, u⁻¹x)`.
    pub fn factor(&self, x: usize) -> Option<(usize, usize)> {
        self.members.iter().find_map(|&u| {
            let v = self.g.mul(self.g.inv(u), x);
            self.unipotent[self.classes.class_of(v)].then_some((u, v))
        })
    }
}

pub fn unipotent_factorization(
    g: &FiniteGroup,
    classes: &ClassData,
    x: usize,
    p: u64,
) -> Option<(usize, usize)> {
    UnipotentSearch::new(g, classes, p).factor(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCheck {
    pub class: usize,
    pub rep_order: u64,
    pub size: u64,
    /// `Σ_{χ real} χ(g)/χ(1)` as `num/den`.
    pub criterion: String,
    pub decision: bool,
    /// `#{(x, y) : x²y² = g}` by class convolution.
    pub count: u128,
    /// The same count by the double loop, for small groups.
    pub brute: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquaresReport {
    pub group: String,
    pub order: u64,
    pub quasisimple: bool,
    pub classes: Vec<ClassCheck>,
    /// Every class passes the criterion.
    pub all_products: bool,
}

/// Largest order for which the double-loop count runs.
pub const BRUTE_SQUARES_LIMIT: u64 = 1000;

/// Criterion decision per class, with the count identity enforced exactly.
pub fn squares_check(data: &GroupData, class_cap: usize) -> Result<SquaresReport> {
    let table = data.character_table(class_cap)?;
    let sc = data.structure_constants();
    let cd = &data.classes;
    let order = data.order();
    let brute = (order <= BRUTE_SQUARES_LIMIT).then(|| power_word_counts_brute(&data.group, 2));
    let mut classes = Vec::with_capacity(cd.num_classes());
    for c in 0..cd.num_classes() {
        let crit = two_squares_criterion(table, c)?;
        let count = count_power_word_solutions(cd, sc, 2, c);
        if crit.sum * order as i128 != Ratio::from_integer(count as i128) {
            return Err(Error::Inconsistency(format!(
                "class {c}: |G|·Σ = {} but the solution count is {count}",
                crit.sum * order as i128
            )));
        }
        let brute_count = brute.as_ref().map(|b| b[cd.reps[c]]);
        if brute_count.is_some_and(|b| b as u128 != count) {
            return Err(Error::Inconsistency(format!("class {c}: brute count differs")));
        }
        if crit.decision != (count > 0) {
            return Err(Error::Inconsistency(format!("class {c}: decision disagrees with count")));
        }
        classes.push(ClassCheck {
            class: c,
            rep_order: cd.rep_orders[c],
            size: cd.sizes[c],
            criterion: crit.sum.to_string(),
            decision: crit.decision,
            count,
            brute: brute_count,
        });
    }
    Ok(SquaresReport {
        group: data.spec.to_string(),
        order,
        quasisimple: is_quasisimple(&data.group, cd).quasisimple,
        all_products: classes.iter().all(|c| c.decision),
        classes,
    })
}

/// Default class cap, re-exported for callers that only use this module.
pub const CLASS_CAP: usize = DEFAULT_CLASS_CAP;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::{conjugacy_classes, enumerate, EnumLimits};
    use crate::matgrp::classical_group;

    fn params(n: u64, q: u64, eps: i8, p: u64, variant: Variant) -> ExponentParams {
        ExponentParams { n, q, eps, p, variant }
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(main2_exponent(&params(2, 5, 1, 2, Variant::I)).unwrap(), 3);
        assert_eq!(main2_exponent(&params(2, 5, 1, 2, Variant::II)).unwrap(), 3);
        assert_eq!(main2_exponent(&params(3, 4, 1, 3, Variant::III)).unwrap(), 1);
        assert!(matches!(
            main2_exponent(&params(3, 5, 1, 3, Variant::I)),
            Err(Error::Hypothesis(_))
        ));
        assert!(main2_exponent(&params(3, 10, 1, 3, Variant::III)).is_err());
    }

    /// Independent reading of the formulas: `a` is the least exponent with
    /// `p^{a+b}` beyond the largest `p`-part of `q^k − ε^k`, `k ≤ n`, for (i),
    /// and `p^{a+1}` beyond it for (ii).
    #[test]
    fn exponent_matches_torus_bound() {
        for eps in [1i8, -1] {
            for q in [3u64, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27] {
                for n in 2u64..=12 {
                    for p in [2u64, 3, 5, 7] {
                        let prm = params(n, q, eps, p, Variant::I);
                        if prm.validate().is_err() {
                            continue;
                        }
                        let max_part = (1..=n as u32)
                            .map(|k| {
                                let qk = (q as i128).pow(k);
                                let ek = if eps > 0 || k % 2 == 0 { 1 } else { -1 };
                                valuation((qk - ek) as u64, p)
                            })
                            .max()
                            .unwrap();
                        let b = prm.b();
                        let a1 = main2_exponent(&prm).unwrap();
                        assert_eq!(a1 + b, max_part + 1, "(i) n={n} q={q} ε={eps} p={p}");
                        let a2 = main2_exponent(&params(n, q, eps, p, Variant::II)).unwrap();
                        assert_eq!(a2, max_part, "(ii) n={n} q={q} ε={eps} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn central_witness_cases() {
        let w = central_two_squares_witness(2, 9, 1).unwrap();
        assert_eq!((w.a, w.b, w.case), (1, 3, WitnessCase::Diagonal));
        assert!(w.y.is_identity());
        let w = central_two_squares_witness(2, 7, 1).unwrap();
        assert_eq!((w.a, w.b, w.case), (1, 1, WitnessCase::NormOneTorus));
        assert!(w.x.is_identity());
        let w = central_two_squares_witness(4, 5, 1).unwrap();
        assert_eq!((w.a, w.b, w.case), (2, 2, WitnessCase::SingerTorus));
        let f = Field::of_order(5).unwrap();
        let omega = w.z.is_scalar().unwrap();
        assert_eq!(f.element_order(omega).unwrap(), 4);
        assert_eq!(w.y, Matrix::diag(&[1, 4, f.inv(omega).unwrap(), f.inv(omega).unwrap()]));
        for (n, q) in [(4, 3), (6, 7), (8, 5), (4, 13), (8, 17), (4, 9), (12, 5), (6, 11)] {
            let w = central_two_squares_witness(n, q, 1).unwrap();
            assert!(w.verify().unwrap(), "SL({n},{q})");
            let cg = classical_group(&format!("SL({n},{q})").parse().unwrap()).unwrap();
            assert!(cg.form_membership(&w.x).unwrap() && cg.form_membership(&w.y).unwrap());
        }
        assert!(matches!(central_two_squares_witness(2, 5, -1), Err(Error::Unsupported(_))));
        assert!(central_two_squares_witness(3, 7, 1).is_err());
        assert!(central_two_squares_witness(2, 8, 1).is_err());
    }

    #[test]
    fn odd_roots_and_center_adjust() {
        let cg = classical_group(&"SL(3,4)".parse().unwrap()).unwrap();
        let g = enumerate(&cg.field, &cg.generators, 100_000).unwrap();
        let center = g.center();
        assert_eq!(center.len(), 3);
        for x in (0..g.order()).step_by(97) {
            if g.element_order(x) % 2 == 1 {
                let h = odd_order_sqrt(&g, x).unwrap();
                assert_eq!(g.mul(h, h), x);
            } else {
                assert!(odd_order_sqrt(&g, x).is_err());
            }
        }
        for &t in &center {
            for (x, y) in [(5, 17), (1000, 2), (0, 0)] {
                let target = g.mul(g.mul(g.pow(x, 2), g.pow(y, 2)), t);
                let (x2, y2) = odd_center_adjust(&g, x, y, t).unwrap();
                assert_eq!(g.mul(g.pow(x2, 2), g.pow(y2, 2)), target);
            }
        }
        assert_eq!(odd_center_adjust(&g, 9, 4, 0).unwrap(), (9, 4));
        let noncentral = (0..g.order()).find(|x| !center.contains(x)).unwrap();
        assert!(odd_center_adjust(&g, 1, 1, noncentral).is_err());
    }

    #[test]
    fn unipotent_factorizations_in_sl25() {
        let cg = classical_group(&"SL(2,5)".parse().unwrap()).unwrap();
        let g = enumerate(&cg.field, &cg.generators, 1000).unwrap();
        let cd = conjugacy_classes(&g);
        let search = UnipotentSearch::new(&g, &cd, 5);
        assert_eq!(search.unipotent_count(), 25);
        let minus_i = g.index_of(&Matrix::scalar(2, 4)).unwrap();
        for x in 0..g.order() {
            let found = search.factor(x);
            if x == 0 || x == minus_i {
                if x == minus_i {
                    assert_eq!(found, None);
                }
                continue;
            }
            let (u, v) = found.unwrap();
            assert_eq!(g.mul(u, v), x);
        }
        // a unipotent element factors with the identity available
        let u = (1..g.order()).find(|&x| g.element_order(x) == 5).unwrap();
        let (a, b) = unipotent_factorization(&g, &cd, u, 5).unwrap();
        assert_eq!(g.mul(a, b), u);
    }

    #[test]
    fn squares_check_small() {
        let data = GroupData::build(&"SL(2,5)".parse().unwrap(), EnumLimits::default()).unwrap();
        let r = squares_check(&data, CLASS_CAP).unwrap();
        assert!(r.all_products && r.quasisimple);
        assert!(r.classes.iter().all(|c| c.brute.is_some()));
        let data = GroupData::build(&"SL(2,3)".parse().unwrap(), EnumLimits::default()).unwrap();
        assert!(squares_check(&data, CLASS_CAP).unwrap().all_products);
    }
}
