//! Self-contained certificates and their verification.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{central_two_squares_witness, main2_exponent, q_minus_eps, CentralWitness, ExponentParams, Variant};
use crate::context::GroupData;
use crate::error::{Error, Result};
use crate::ff::numtheory::{gcd, is_prime, p_part, valuation};
use crate::grp::{conjugacy_classes, enumerate_with, EnumLimits, FiniteGroup};
use crate::matgrp::{classical_group, Family, GroupSpec};
use crate::matrix::Matrix;
use crate::words::{parse_word, word_image, ImageStrategy, Word, DEFAULT_EVAL_CAP};

pub const VERIFIER_VERSION: &str = concat!("wordmap-verify/", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertKind {
    #[serde(rename = "SL2_COUNTEREXAMPLE")]
    Sl2Counterexample,
    #[serde(rename = "MAIN2")]
    Main2,
    #[serde(rename = "MAIN3")]
    Main3,
    #[serde(rename = "MAIN4")]
    Main4,
    TwoSquares,
    Witness,
}

impl fmt::Display for CertKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertKind::Sl2Counterexample => "SL2_COUNTEREXAMPLE",
            CertKind::Main2 => "MAIN2",
            CertKind::Main3 => "MAIN3",
            CertKind::Main4 => "MAIN4",
            CertKind::TwoSquares => "TWO_SQUARES",
            CertKind::Witness => "WITNESS",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Surjective,
    NotSurjective,
    CentralWitness,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Claim::Surjective => "surjective",
            Claim::NotSurjective => "not_surjective",
            Claim::CentralWitness => "central_witness",
        })
    }
}

/// How the exponent `p^a` was derived.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub n: u64,
    pub q: u64,
    pub eps: i8,
    pub p: u64,
    /// `i`, `ii` or `iii`; absent where the rule has a single case.
    pub variant: Option<String>,
    pub a: u32,
    /// Order of the missed central element.
    pub central_order: u64,
}

/// The three checkable facts behind the `SL_2(q)` counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Facts {
    pub a: u32,
    /// `(q² − 1)_2 = 2^{a+1}`.
    pub two_part: u64,
    /// Largest 2-power element order found.
    pub max_two_power_order: u64,
    /// Elements `g` with `g^{2^a} ≠ 1` and `|C(g^{2^a})| = |C(g)|`.
    pub stable: u64,
    /// Elements `g` with `g^{2^a} ≠ 1`.
    pub nontrivial_powers: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarePair {
    pub class: usize,
    pub target: Matrix,
    pub x: Matrix,
    pub y: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    /// A central element outside `x^k y^k (G)`.
    MissedElement {
        exponent: u64,
        element: Matrix,
        derivation: Derivation,
        sl2: Option<Sl2Facts>,
    },
    /// `g = x²y²` for one representative of every class.
    SquarePairs { pairs: Vec<SquarePair> },
    CentralWitness { witness: CentralWitness },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    pub group: String,
    pub word: String,
    pub claim: Claim,
    pub evidence: Evidence,
    pub verified: bool,
    pub verifier_version: String,
}

impl Certificate {
    fn new(kind: CertKind, group: String, word: String, claim: Claim, evidence: Evidence) -> Self {
        Certificate {
            kind,
            group,
            word,
            claim,
            evidence,
            verified: false,
            verifier_version: VERIFIER_VERSION.to_string(),
        }
    }

    /// Re-checks the claim from the evidence alone.
    ///
    /// Group-based evidence re-enumerates the group from its spec; witness
    /// evidence uses matrix arithmetic only. `Ok(false)` means the evidence
    /// does not support the claim.
    pub fn verify(&self, limits: EnumLimits) -> Result<bool> {
        match &self.evidence {
            Evidence::CentralWitness { witness } => Ok(self.claim == Claim::CentralWitness
                && self.kind == CertKind::Witness
                && self.group == format!("SL({},{})", witness.n, witness.q)
                && witness.verify()?),
            Evidence::MissedElement { exponent, element, derivation, sl2 } => {
                if self.claim != Claim::NotSurjective || !self.derivation_holds(derivation, *exponent)? {
                    return Ok(false);
                }
                let word = parse_word(&self.word)?.word;
                let k = *exponent as i64;
                if word.split_powers() != Some((k, k)) {
                    return Ok(false);
                }
                let g = self.group(limits)?;
                let Some(z) = g.index_of(element) else {
                    return Ok(false);
                };
                if g.element_order(z) != derivation.central_order
                    || !g.generators().iter().all(|&s| g.commutes(z, s))
                {
                    return Ok(false);
                }
                if !missed_by_power_product(&g, k, z) {
                    return Ok(false);
                }
                match sl2 {
                    Some(facts) => Ok(self.kind == CertKind::Sl2Counterexample && sl2_facts(&g, derivation.q)? == *facts),
                    None => Ok(self.kind != CertKind::Sl2Counterexample),
                }
            }
            Evidence::SquarePairs { pairs } => {
                if self.claim != Claim::Surjective || self.kind != CertKind::TwoSquares {
                    return Ok(false);
                }
                if parse_word(&self.word)?.word != two_squares_word() {
                    return Ok(false);
                }
                let g = self.group(limits)?;
                let classes = conjugacy_classes(&g);
                let f = g.field();
                let mut seen = vec![false; classes.num_classes()];
                for pair in pairs {
                    let (Some(x), Some(y), Some(t)) =
                        (g.index_of(&pair.x), g.index_of(&pair.y), g.index_of(&pair.target))
                    else {
                        return Ok(false);
                    };
                    let x2 = pair.x.mul(&pair.x, f);
                    if x2.mul(&pair.y.mul(&pair.y, f), f) != pair.target || g.mul(g.pow(x, 2), g.pow(y, 2)) != t {
                        return Ok(false);
                    }
                    seen[classes.class_of(t)] = true;
                }
                Ok(seen.iter().all(|&s| s))
            }
        }
    }

    fn group(&self, limits: EnumLimits) -> Result<FiniteGroup> {
        let spec: GroupSpec = self.group.parse()?;
        let cg = classical_group(&spec)?;
        enumerate_with(&cg.field, &cg.generators, limits)
    }

    /// Recomputes `a` from the derivation parameters by the rule for `kind`.
    fn derivation_holds(&self, d: &Derivation, exponent: u64) -> Result<bool> {
        let expected_group;
        let a = match self.kind {
            CertKind::Sl2Counterexample => {
                expected_group = format!("SL(2,{})", d.q);
                if d.q.is_multiple_of(2) || d.q < 5 {
                    return Ok(false);
                }
                valuation(d.q * d.q - 1, 2) - 1
            }
            CertKind::Main2 => {
                let Some(variant) = d.variant.as_deref().map(str::parse::<Variant>).transpose()? else {
                    return Ok(false);
                };
                let params = ExponentParams { n: d.n, q: d.q, eps: d.eps, p: d.p, variant };
                expected_group = main2_group(&params)?.to_string();
                main2_exponent(&params)?
            }
            CertKind::Main3 => {
                expected_group = sl_eps(d.n, d.q, d.eps).to_string();
                main3_rule(d.n, d.q, d.eps, d.p)?
            }
            CertKind::Main4 => {
                let variant: Main4Variant = match d.variant.as_deref() {
                    Some("i") => Main4Variant::I,
                    Some("ii") => Main4Variant::II,
                    _ => return Ok(false),
                };
                expected_group = main4_group(variant, d.n, d.q, d.eps).to_string();
                main4_rule(variant, d.n, d.q, d.eps)?
            }
            _ => return Ok(false),
        };
        Ok(a == d.a && d.p.checked_pow(a) == Some(exponent) && self.group == expected_group)
    }
}

/// Is `z` outside `{x^k y^k}`? Direct power set, no class data.
fn missed_by_power_product(g: &FiniteGroup, k: i64, z: usize) -> bool {
    let mut powers = vec![false; g.order()];
    for x in 0..g.order() {
        powers[g.pow(x, k)] = true;
    }
    (0..g.order()).filter(|&s| powers[s]).all(|s| !powers[g.mul(g.inv(s), z)])
}

fn sl2_facts(g: &FiniteGroup, q: u64) -> Result<Sl2Facts> {
    let classes = conjugacy_classes(g);
    let two_part = p_part(q * q - 1, 2);
    let a = valuation(two_part, 2) - 1;
    let k = 1i64 << a;
    let max_two_power_order = classes
        .rep_orders
        .iter()
        .copied()
        .filter(|o| o.is_power_of_two())
        .max()
        .unwrap_or(1);
    let mut stable = 0;
    let mut nontrivial_powers = 0;
    for x in 0..g.order() {
        let y = g.pow(x, k);
        if y != g.identity() {
            nontrivial_powers += 1;
            if classes.centralizer_order(y) == classes.centralizer_order(x) {
                stable += 1;
            }
        }
    }
    Ok(Sl2Facts { a, two_part, max_two_power_order, stable, nontrivial_powers })
}

fn two_squares_word() -> Word {
    Word::from_letters([(1, 2), (2, 2)])
}

fn sl_eps(n: u64, q: u64, eps: i8) -> GroupSpec {
    let family = if eps > 0 { Family::SL } else { Family::SU };
    GroupSpec { family, n: n as usize, q, path: None }
}

/// The group the variant speaks about: `SL^ε` for (i), (iii), `GL^ε` for (ii).
pub fn main2_group(params: &ExponentParams) -> Result<GroupSpec> {
    let mut spec = sl_eps(params.n, params.q, params.eps);
    if params.variant == Variant::II {
        spec.family = if params.eps > 0 { Family::GL } else { Family::GU };
    }
    GroupSpec::new(spec.family, spec.n, spec.q)
}

/// `a = 2` for `p > 2`, `a = 3` for `p = 2`, under the congruence hypotheses.
pub fn main3_rule(n: u64, q: u64, eps: i8, p: u64) -> Result<u32> {
    if !is_prime(p) || (eps != 1 && eps != -1) {
        return Err(Error::Hypothesis("need p prime and ε = ±1".into()));
    }
    let p2 = p * p;
    if n % p2 != p {
        return Err(Error::Hypothesis(format!("n = {n} is not ≡ {p} mod {p2}")));
    }
    let (modulus, residue, a) = if p == 2 { (8, 4 + eps as i64, 3) } else { (p2 as i64, p as i64 + eps as i64, 2) };
    if (q as i64 - residue).rem_euclid(modulus) != 0 {
        return Err(Error::Hypothesis(format!("q = {q} is not ≡ {residue} mod {modulus}")));
    }
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Main4Variant {
    /// `x⁹y⁹` on `SL^ε_n(q)`, `n ≡ 3 mod 9`, `q ≡ 3 + ε mod 9`.
    I,
    /// `x⁸y⁸` on `Sp_{2n}(q)`, `n` odd, `q ≡ 5 mod 8`.
    II,
}

impl std::str::FromStr for Main4Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => Ok(Main4Variant::I),
            "ii" => Ok(Main4Variant::II),
            _ => Err(Error::InvalidSpec(format!("unknown variant {s:?}"))),
        }
    }
}

pub fn main4_rule(variant: Main4Variant, n: u64, q: u64, eps: i8) -> Result<u32> {
    match variant {
        Main4Variant::I => {
            if eps != 1 && eps != -1 {
                return Err(Error::Hypothesis("ε must be ±1".into()));
            }
            if n % 9 != 3 || (q as i64 - 3 - eps as i64).rem_euclid(9) != 0 {
                return Err(Error::Hypothesis(format!("need n ≡ 3 and q ≡ {} mod 9", 3 + eps)));
            }
            Ok(2)
        }
        Main4Variant::II => {
            if n.is_multiple_of(2) || q % 8 != 5 {
                return Err(Error::Hypothesis("need n odd and q ≡ 5 mod 8".into()));
            }
            Ok(3)
        }
    }
}

fn main4_group(variant: Main4Variant, n: u64, q: u64, eps: i8) -> GroupSpec {
    match variant {
        Main4Variant::I => sl_eps(n, q, eps),
        Main4Variant::II => GroupSpec { family: Family::Sp, n: 2 * n as usize, q, path: None },
    }
}

fn expect_group(data: &GroupData, spec: &GroupSpec) -> Result<()> {
    if data.spec == *spec {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

/// Scalar of order `r` in the matrix field of `data`.
fn central_scalar(data: &GroupData, r: u64) -> Result<Matrix> {
    let f = data.field();
    Ok(Matrix::scalar(data.group.degree(), f.element_of_order(r)?))
}

/// Confirms by class products that `z ∉ x^k y^k (G)`, then self-verifies.
fn non_surjective(
    data: &GroupData,
    kind: CertKind,
    z: Matrix,
    derivation: Derivation,
    sl2: Option<Sl2Facts>,
    limits: EnumLimits,
) -> Result<Certificate> {
    let k = derivation.p.pow(derivation.a);
    let word = Word::from_letters([(1, k as i64), (2, k as i64)]);
    let zc = data
        .class_of_matrix(&z)
        .ok_or_else(|| Error::Inconsistency("central element is not in the group".into()))?;
    let image = word_image(
        &data.group,
        &data.classes,
        Some(data.structure_constants()),
        &word,
        ImageStrategy::Auto,
        DEFAULT_EVAL_CAP,
    )?;
    if image.contains(zc) {
        return Err(Error::Verification(format!("{} lies in the image of {word} on {}", kind, data.spec)));
    }
    let mut cert = Certificate::new(
        kind,
        data.spec.to_string(),
        word.to_string(),
        Claim::NotSurjective,
        Evidence::MissedElement { exponent: k, element: z, derivation, sl2 },
    );
    cert.verified = cert.verify(limits)?;
    if !cert.verified {
        return Err(Error::Verification(format!("{kind} certificate for {} fails re-verification", data.spec)));
    }
    Ok(cert)
}

/// `−I ∉ x^{2^a} y^{2^a}(SL_2(q))` with `2^{a+1} = (q² − 1)_2`.
pub fn sl2_certificate(data: &GroupData, limits: EnumLimits) -> Result<Certificate> {
    let q = data.spec.q;
    if q.is_multiple_of(2) || q < 5 {
        return Err(Error::Hypothesis(format!("q = {q} must be odd and at least 5")));
    }
    expect_group(data, &GroupSpec::new(Family::SL, 2, q)?)?;
    let facts = sl2_facts(&data.group, q)?;
    let a = facts.a;
    if facts.max_two_power_order >= 1 << (a + 1) {
        return Err(Error::Verification(format!("an element of order {} exists", facts.max_two_power_order)));
    }
    if facts.stable != facts.nontrivial_powers {
        return Err(Error::Verification("centralizer stability fails".into()));
    }
    let f = data.field();
    let derivation = Derivation { n: 2, q, eps: 1, p: 2, variant: None, a, central_order: 2 };
    non_surjective(data, CertKind::Sl2Counterexample, Matrix::scalar(2, f.neg(1)), derivation, Some(facts), limits)
}

pub fn main2_certificate(data: &GroupData, params: &ExponentParams, limits: EnumLimits) -> Result<Certificate> {
    let a = main2_exponent(params)?;
    expect_group(data, &main2_group(params)?)?;
    let central_order = match params.variant {
        Variant::I => params.p.pow(params.b()),
        Variant::II | Variant::III => params.p,
    };
    let z = central_scalar(data, central_order)?;
    let derivation = Derivation {
        n: params.n,
        q: params.q,
        eps: params.eps,
        p: params.p,
        variant: Some(params.variant.to_string()),
        a,
        central_order,
    };
    non_surjective(data, CertKind::Main2, z, derivation, None, limits)
}

pub fn main3_certificate(data: &GroupData, n: u64, q: u64, eps: i8, p: u64, limits: EnumLimits) -> Result<Certificate> {
    let a = main3_rule(n, q, eps, p)?;
    expect_group(data, &sl_eps(n, q, eps))?;
    debug_assert_eq!(gcd(n, q_minus_eps(q, eps)) % p, 0);
    let z = central_scalar(data, p)?;
    let derivation = Derivation { n, q, eps, p, variant: None, a, central_order: p };
    non_surjective(data, CertKind::Main3, z, derivation, None, limits)
}

/// For [`Main4Variant::II`], `n` is half the symplectic dimension.
pub fn main4_certificate(
    data: &GroupData,
    variant: Main4Variant,
    n: u64,
    q: u64,
    eps: i8,
    limits: EnumLimits,
) -> Result<Certificate> {
    let a = main4_rule(variant, n, q, eps)?;
    let eps = if variant == Main4Variant::II { 1 } else { eps };
    expect_group(data, &main4_group(variant, n, q, eps))?;
    let (p, name) = match variant {
        Main4Variant::I => (3, "i"),
        Main4Variant::II => (2, "ii"),
    };
    let z = central_scalar(data, p)?;
    let derivation = Derivation { n, q, eps, p, variant: Some(name.into()), a, central_order: p };
    non_surjective(data, CertKind::Main4, z, derivation, None, limits)
}

/// One `x²y²` decomposition per class, found by scanning squares.
pub fn two_squares_certificate(data: &GroupData, limits: EnumLimits) -> Result<Certificate> {
    let g = &data.group;
    let mut root = vec![usize::MAX; g.order()];
    for x in 0..g.order() {
        let s = g.pow(x, 2);
        if root[s] == usize::MAX {
            root[s] = x;
        }
    }
    let squares: Vec<usize> = (0..g.order()).filter(|&s| root[s] != usize::MAX).collect();
    let mut pairs = Vec::with_capacity(data.classes.num_classes());
    for (class, &t) in data.classes.reps.iter().enumerate() {
        let found = squares.iter().find_map(|&s| {
            let r = g.mul(g.inv(s), t);
            (root[r] != usize::MAX).then(|| (root[s], root[r]))
        });
        let Some((x, y)) = found else {
            return Err(Error::Verification(format!("class {class} of {} is not a product of two squares", data.spec)));
        };
        pairs.push(SquarePair { class, target: g.element(t), x: g.element(x), y: g.element(y) });
    }
    let mut cert = Certificate::new(
        CertKind::TwoSquares,
        data.spec.to_string(),
        two_squares_word().to_string(),
        Claim::Surjective,
        Evidence::SquarePairs { pairs },
    );
    cert.verified = cert.verify(limits)?;
    if !cert.verified {
        return Err(Error::Verification("two-squares certificate fails re-verification".into()));
    }
    Ok(cert)
}

pub fn witness_certificate(n: usize, q: u64, eps: i8) -> Result<Certificate> {
    let witness = central_two_squares_witness(n, q, eps)?;
    let mut cert = Certificate::new(
        CertKind::Witness,
        format!("SL({n},{q})"),
        two_squares_word().to_string(),
        Claim::CentralWitness,
        Evidence::CentralWitness { witness },
    );
    cert.verified = cert.verify(EnumLimits::default())?;
    if !cert.verified {
        return Err(Error::Verification("witness certificate fails re-verification".into()));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(s: &str) -> GroupData {
        GroupData::build(&s.parse().unwrap(), EnumLimits::default()).unwrap()
    }

    #[test]
    fn sl2_q5() {
        let d = data("SL(2,5)");
        let cert = sl2_certificate(&d, EnumLimits::default()).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.word, "x^4 y^4");
        let Evidence::MissedElement { sl2: Some(facts), derivation, .. } = &cert.evidence else {
            panic!("wrong evidence");
        };
        assert_eq!((facts.a, facts.two_part, derivation.a), (2, 8, 2));
        assert_eq!(facts.max_two_power_order, 4);
        let json = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
        assert!(json.contains("SL2_COUNTEREXAMPLE"));
    }

    #[test]
    fn tampered_certificates_fail() {
        let d = data("SL(2,5)");
        let cert = sl2_certificate(&d, EnumLimits::default()).unwrap();
        let mut wrong_word = cert.clone();
        wrong_word.word = "x^2 y^2".into();
        assert!(!wrong_word.verify(EnumLimits::default()).unwrap());
        let mut wrong_elem = cert.clone();
        if let Evidence::MissedElement { element, .. } = &mut wrong_elem.evidence {
            *element = Matrix::identity(2);
        }
        assert!(!wrong_elem.verify(EnumLimits::default()).unwrap());
        let mut wrong_group = cert;
        wrong_group.group = "SL(2,7)".into();
        assert!(!wrong_group.verify(EnumLimits::default()).unwrap());
    }

    #[test]
    fn main2_on_gl25_and_sl34() {
        let d = data("GL(2,5)");
        let params = ExponentParams { n: 2, q: 5, eps: 1, p: 2, variant: Variant::II };
        let cert = main2_certificate(&d, &params, EnumLimits::default()).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.word, "x^8 y^8");
        let d = data("SL(3,4)");
        let params = ExponentParams { n: 3, q: 4, eps: 1, p: 3, variant: Variant::III };
        let cert = main2_certificate(&d, &params, EnumLimits::default()).unwrap();
        assert_eq!(cert.word, "x^3 y^3");
        assert!(matches!(main2_certificate(&d, &ExponentParams { variant: Variant::II, ..params }, EnumLimits::default()),
            Err(Error::GroupMismatch)));
    }

    #[test]
    fn congruence_rules() {
        assert_eq!(main3_rule(3, 4, 1, 3).unwrap(), 2);
        assert_eq!(main3_rule(3, 2, -1, 3).unwrap(), 2);
        assert_eq!(main3_rule(2, 5, 1, 2).unwrap(), 3);
        assert_eq!(main3_rule(2, 3, -1, 2).unwrap(), 3);
        assert!(main3_rule(3, 7, 1, 3).is_err());
        assert!(main3_rule(9, 4, 1, 3).is_err());
        assert_eq!(main4_rule(Main4Variant::I, 3, 4, 1).unwrap(), 2);
        assert_eq!(main4_rule(Main4Variant::I, 3, 2, -1).unwrap(), 2);
        assert!(main4_rule(Main4Variant::I, 3, 7, 1).is_err());
        assert_eq!(main4_rule(Main4Variant::II, 1, 5, 1).unwrap(), 3);
        assert!(main4_rule(Main4Variant::II, 2, 5, 1).is_err());
        assert!(main4_rule(Main4Variant::II, 1, 13, 1).is_ok());
        assert!(main4_rule(Main4Variant::II, 1, 7, 1).is_err());
    }

    #[test]
    fn main3_main4_desk() {
        let d = data("SL(3,4)");
        let cert = main3_certificate(&d, 3, 4, 1, 3, EnumLimits::default()).unwrap();
        assert_eq!(cert.word, "x^9 y^9");
        let cert4 = main4_certificate(&d, Main4Variant::I, 3, 4, 1, EnumLimits::default()).unwrap();
        assert_eq!(cert4.word, "x^9 y^9");
        let d = data("Sp(2,5)");
        let cert = main4_certificate(&d, Main4Variant::II, 1, 5, 1, EnumLimits::default()).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.word, "x^8 y^8");
    }

    #[test]
    fn two_squares_and_witness() {
        let d = data("SL(2,7)");
        let cert = two_squares_certificate(&d, EnumLimits::default()).unwrap();
        assert!(cert.verified);
        let Evidence::SquarePairs { pairs } = &cert.evidence else { panic!() };
        assert_eq!(pairs.len(), d.classes.num_classes());
        let w = witness_certificate(4, 5, 1).unwrap();
        assert!(w.verified && w.verify(EnumLimits::default()).unwrap());
        let mut bad = w;
        if let Evidence::CentralWitness { witness } = &mut bad.evidence {
            witness.y = Matrix::identity(4);
        }
        assert!(!bad.verify(EnumLimits::default()).unwrap());
    }
}
