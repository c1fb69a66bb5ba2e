//! Free-group words, word maps and their images as unions of classes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chars::StructureConstants;
use crate::error::{Error, Result};
use crate::grp::{ClassData, FiniteGroup};

/// Hard limit on the letter count produced while parsing.
const MAX_LETTERS: usize = 1 << 20;
/// Default bound on word-map evaluations for the brute strategy.
pub const DEFAULT_EVAL_CAP: u64 = 1_000_000_000;

/// Freely reduced word: `(variable ≥ 1, nonzero exponent)` syllables with
/// distinct adjacent variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<(u32, i64)>,
}

impl Word {
    pub fn trivial() -> Self {
        Word::default()
    }

    pub fn var(v: u32) -> Self {
        Word { letters: vec![(v, 1)] }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (u32, i64)>) -> Self {
        let mut w = Word::trivial();
        for (v, e) in letters {
            w.push(v, e);
        }
        w
    }

    fn push(&mut self, v: u32, e: i64) {
        if e == 0 {
            return;
        }
        match self.letters.last_mut() {
            Some((lv, le)) if *lv == v => {
                *le += e;
                if *le == 0 {
                    self.letters.pop();
                }
            }
            _ => self.letters.push((v, e)),
        }
    }

    pub fn letters(&self) -> &[(u32, i64)] {
        &self.letters
    }

    pub fn is_trivial(&self) -> bool {
        self.letters.is_empty()
    }

    /// Highest variable index used.
    pub fn arity(&self) -> u32 {
        self.letters.iter().map(|&(v, _)| v).max().unwrap_or(0)
    }

    fn len(&self) -> usize {
        self.letters.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(v, e) in &other.letters {
            w.push(v, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|&(v, e)| (v, -e)).collect() }
    }

    pub fn pow(&self, k: i64) -> Word {
        if self.is_trivial() || k == 0 {
            return Word::trivial();
        }
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::trivial();
        for _ in 0..k.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    /// `u⁻¹v⁻¹uv`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.inverse().concat(&v.inverse()).concat(u).concat(v)
    }

    /// `Some((a, b))` when the word is `x^a y^b` or `y^b x^a` with both
    /// exponents nonzero.
    pub fn split_powers(&self) -> Option<(i64, i64)> {
        match self.letters.as_slice() {
            [(1, a), (2, b)] | [(2, b), (1, a)] => Some((*a, *b)),
            _ => None,
        }
    }

    /// Evaluates at group elements; `assignment[i]` is the value of variable `i + 1`.
    pub fn evaluate(&self, g: &FiniteGroup, assignment: &[usize]) -> Result<usize> {
        let mut acc = g.identity();
        for &(v, e) in &self.letters {
            let x = *assignment.get(v as usize - 1).ok_or(Error::MissingVariable(v))?;
            acc = g.mul(acc, g.pow(x, e));
        }
        Ok(acc)
    }
}

fn var_name(v: u32) -> String {
    match v {
        1 => "x".into(),
        2 => "y".into(),
        3 => "z".into(),
        _ => format!("x{v}"),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("1");
        }
        for (i, &(v, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&var_name(v))?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A parse result; `collapsed` flags nonempty input that reduced to the trivial word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub word: Word,
    pub collapsed: bool,
}

pub fn parse_word(text: &str) -> Result<Parsed> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let word = p.word()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("unexpected character");
    }
    let collapsed = word.is_trivial() && text.trim() != "1";
    Ok(Parsed { word, collapsed })
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_word(s).map(|p| p.word)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = Word::trivial();
        let mut terms = 0;
        while matches!(self.peek(), Some(b'x' | b'y' | b'z' | b'(' | b'[' | b'1')) {
            let t = self.term()?;
            w = w.concat(&t);
            terms += 1;
        }
        if terms == 0 {
            return self.err("expected a term");
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Word> {
        let atom = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.int()?;
            if atom.len().saturating_mul(k.unsigned_abs() as usize) > MAX_LETTERS {
                return self.err("word too long");
            }
            return Ok(atom.pow(k));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(b',')?;
                let v = self.word()?;
                self.expect(b']')?;
                Ok(Word::commutator(&u, &v))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::trivial())
            }
            Some(c @ (b'x' | b'y' | b'z')) => {
                self.pos += 1;
                let digit = self.src.get(self.pos).copied().filter(u8::is_ascii_digit);
                match (c, digit) {
                    (b'x', Some(d @ b'1'..=b'9')) => {
                        self.pos += 1;
                        if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                            return self.err("variable index must be 1..9");
                        }
                        Ok(Word::var(u32::from(d - b'0')))
                    }
                    (_, Some(_)) => self.err("invalid variable"),
                    (b'x', None) => Ok(Word::var(1)),
                    (b'y', None) => Ok(Word::var(2)),
                    _ => Ok(Word::var(3)),
                }
            }
            _ => self.err("expected a variable, '(' or '['"),
        }
    }

    fn int(&mut self) -> Result<i64> {
        let mut neg = false;
        match self.peek() {
            Some(b'-') => {
                neg = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer exponent");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let k: i64 = digits.parse().map_err(|_| Error::Parse {
            pos: start,
            msg: "exponent out of range".into(),
        })?;
        Ok(if neg { -k } else { k })
    }
}

/// A union of conjugacy classes of a fixed group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassUnion {
    bits: Vec<u64>,
    num_classes: usize,
    elements: u64,
}

impl ClassUnion {
    pub fn empty(num_classes: usize) -> Self {
        ClassUnion { bits: vec![0; num_classes.div_ceil(64)], num_classes, elements: 0 }
    }

    pub fn all(classes: &ClassData) -> Self {
        Self::from_classes(classes, 0..classes.num_classes())
    }

    pub fn from_classes(classes: &ClassData, members: impl IntoIterator<Item = usize>) -> Self {
        let mut u = Self::empty(classes.num_classes());
        for c in members {
            u.insert(c, classes.sizes[c]);
        }
        u
    }

    pub fn insert(&mut self, c: usize, size: u64) {
        if !self.contains(c) {
            self.bits[c / 64] |= 1 << (c % 64);
            self.elements += size;
        }
    }

    pub fn contains(&self, c: usize) -> bool {
        self.bits[c / 64] >> (c % 64) & 1 == 1
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Number of group elements in the union.
    pub fn element_count(&self) -> u64 {
        self.elements
    }

    pub fn classes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_classes).filter(|&c| self.contains(c))
    }

    pub fn missed(&self) -> Vec<usize> {
        (0..self.num_classes).filter(|&c| !self.contains(c)).collect()
    }

    pub fn is_full(&self) -> bool {
        self.classes().count() == self.num_classes
    }

    fn union_with(&mut self, other: &ClassUnion, classes: &ClassData) {
        for c in other.classes() {
            self.insert(c, classes.sizes[c]);
        }
    }

    fn is_subset(&self, other: &ClassUnion) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageStrategy {
    Brute,
    ClassReduced,
    /// Power maps for one variable, split products, else class-reduced.
    Auto,
}

/// Exact image `w(G)` as a union of classes.
pub fn word_image(
    g: &FiniteGroup,
    classes: &ClassData,
    sc: Option<&StructureConstants>,
    w: &Word,
    strategy: ImageStrategy,
    eval_cap: u64,
) -> Result<ClassUnion> {
    let d = w.arity();
    match strategy {
        ImageStrategy::Auto => {
            if d <= 1 {
                let k = w.letters().first().map_or(0, |&(_, e)| e);
                return Ok(power_image(classes, k));
            }
            if let Some((a, b)) = w.split_powers() {
                let cover = product_cover(
                    g,
                    classes,
                    sc,
                    &[power_image(classes, a), power_image(classes, b)],
                )?;
                return Ok(cover.image);
            }
            if d == 2 {
                return class_reduced(g, classes, w);
            }
            brute(g, classes, w, eval_cap)
        }
        ImageStrategy::ClassReduced => {
            if d > 2 {
                return Err(Error::UnsupportedArity { arity: d, strategy: "class_reduced" });
            }
            class_reduced(g, classes, w)
        }
        ImageStrategy::Brute => brute(g, classes, w, eval_cap),
    }
}

/// Image of `x ↦ x^k` through the power map.
pub fn power_image(classes: &ClassData, k: i64) -> ClassUnion {
    ClassUnion::from_classes(classes, (0..classes.num_classes()).map(|c| classes.power(c, k)))
}

fn merge(classes: &ClassData, parts: Vec<ClassUnion>) -> ClassUnion {
    let mut out = ClassUnion::empty(classes.num_classes());
    for p in &parts {
        out.union_with(p, classes);
    }
    out
}

fn class_reduced(g: &FiniteGroup, classes: &ClassData, w: &Word) -> Result<ClassUnion> {
    let parts = classes
        .reps
        .par_iter()
        .map(|&x| {
            let mut u = ClassUnion::empty(classes.num_classes());
            for y in 0..g.order() {
                let v = w.evaluate(g, &[x, y])?;
                u.insert(classes.class_of(v), classes.sizes[classes.class_of(v)]);
            }
            Ok(u)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(classes, parts))
}

fn brute(g: &FiniteGroup, classes: &ClassData, w: &Word, eval_cap: u64) -> Result<ClassUnion> {
    let d = w.arity().max(1);
    let order = g.order() as u64;
    let evaluations = (0..d).try_fold(1u64, |acc, _| acc.checked_mul(order));
    if evaluations.is_none_or(|n| n > eval_cap) {
        return Err(Error::CapExceeded { cap: eval_cap });
    }
    let parts = (0..g.order())
        .into_par_iter()
        .map(|first| {
            let mut u = ClassUnion::empty(classes.num_classes());
            let mut assign = vec![0usize; d as usize];
            assign[0] = first;
            loop {
                let v = w.evaluate(g, &assign)?;
                u.insert(classes.class_of(v), classes.sizes[classes.class_of(v)]);
                // odometer over variables 2..d
                let mut i = 1;
                while i < d as usize {
                    assign[i] += 1;
                    if assign[i] < g.order() {
                        break;
                    }
                    assign[i] = 0;
                    i += 1;
                }
                if i == d as usize {
                    return Ok(u);
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(classes, parts))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub image: ClassUnion,
    pub surjective: bool,
    /// Classes not reached, ascending.
    pub missed: Vec<usize>,
}

/// Classes reachable as products `u₁u₂…u_m` with `u_i` in `images[i]`, folded
/// left to right. Uses structure constants when given, else direct products
/// of elements with class representatives.
pub fn product_cover(
    g: &FiniteGroup,
    classes: &ClassData,
    sc: Option<&StructureConstants>,
    images: &[ClassUnion],
) -> Result<Cover> {
    let k = classes.num_classes();
    let first = images.first().ok_or_else(|| Error::Hypothesis("no images given".into()))?;
    if images.iter().any(|u| u.num_classes() != k) || sc.is_some_and(|s| s.num_classes() != k) {
        return Err(Error::GroupMismatch);
    }
    let mut acc = first.clone();
    for right in &images[1..] {
        let mut next = ClassUnion::empty(k);
        match sc {
            Some(sc) => {
                for t in 0..k {
                    let hit = acc.classes().any(|c| right.classes().any(|d| sc.get(c, d, t) > 0));
                    if hit {
                        next.insert(t, classes.sizes[t]);
                    }
                }
            }
            None => {
                // S·T is conjugation-closed, so S times the representatives of T suffices
                for x in (0..g.order()).filter(|&x| acc.contains(classes.class_of(x))) {
                    for d in right.classes() {
                        let c = classes.class_of(g.mul(x, classes.reps[d]));
                        next.insert(c, classes.sizes[c]);
                    }
                }
            }
        }
        acc = next;
    }
    let missed = acc.missed();
    Ok(Cover { surjective: missed.is_empty(), missed, image: acc })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Width {
    Exact(u32),
    ExceedsMax(u32),
}

/// Least `m ≤ max_m` with `w(G)^m = G`.
pub fn width(
    g: &FiniteGroup,
    classes: &ClassData,
    sc: Option<&StructureConstants>,
    image: &ClassUnion,
    max_m: u32,
) -> Result<Width> {
    let mut acc = image.clone();
    let mut m = 1;
    while !acc.is_full() {
        if m >= max_m {
            return Ok(Width::ExceedsMax(max_m));
        }
        let next = product_cover(g, classes, sc, &[acc.clone(), image.clone()])?.image;
        if next.is_subset(&acc) {
            // the powers have stabilized short of G
            return Ok(Width::ExceedsMax(max_m));
        }
        acc = next;
        m += 1;
    }
    Ok(Width::Exact(m))
}
