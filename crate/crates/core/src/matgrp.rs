//! Classical matrix groups: specs, generators, invariant forms, torus elements.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::numtheory::{gcd, prime_power};
use crate::ff::Field;
use crate::grp;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    SL,
    SU,
    Sp,
    GL,
    GU,
    File,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::SL => "SL",
            Family::SU => "SU",
            Family::Sp => "Sp",
            Family::GL => "GL",
            Family::GU => "GU",
            Family::File => "FILE",
        }
    }

    pub fn is_unitary(self) -> bool {
        matches!(self, Family::SU | Family::GU)
    }
}

/// Names one group: `SL(n,q)`, `SU(n,q)`, `Sp(n,q)` (`n` the full even
/// dimension), `GL(n,q)`, `GU(n,q)` or `file:<path>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
    pub q: u64,
    pub path: Option<PathBuf>,
}

impl GroupSpec {
    pub fn new(family: Family, n: usize, q: u64) -> Result<Self> {
        let spec = GroupSpec { family, n, q, path: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        GroupSpec { family: Family::File, n: 0, q: 0, path: Some(path.into()) }
    }

    fn validate(&self) -> Result<()> {
        if self.family == Family::File {
            return Ok(());
        }
        if self.n == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if prime_power(self.q).is_none() {
            return Err(Error::InvalidSpec(format!("{} is not a prime power", self.q)));
        }
        if self.family == Family::Sp && !self.n.is_multiple_of(2) {
            return Err(Error::InvalidSpec("symplectic dimension must be even".into()));
        }
        Ok(())
    }

    /// Size of the field the matrices live over (`q²` for unitary families).
    pub fn matrix_field_size(&self) -> u64 {
        if self.family.is_unitary() {
            self.q * self.q
        } else {
            self.q
        }
    }

    /// Exact order by the classical order formulas, saturating at
    /// `u128::MAX`; `None` for `FILE`.
    pub fn predicted_order(&self) -> Option<u128> {
        let q = self.q as u128;
        let n = self.n as u32;
        let pow = |e: u32| q.saturating_pow(e);
        let prod = |range: std::ops::RangeInclusive<u32>, f: &dyn Fn(u32) -> u128| -> u128 {
            range.map(f).fold(1u128, u128::saturating_mul)
        };
        let unitary = |i: u32| if i.is_multiple_of(2) { pow(i) - 1 } else { pow(i).saturating_add(1) };
        Some(match self.family {
            Family::SL => pow(n * (n - 1) / 2).saturating_mul(prod(2..=n, &|i| pow(i) - 1)),
            Family::GL => pow(n * (n - 1) / 2).saturating_mul(prod(1..=n, &|i| pow(i) - 1)),
            Family::SU => pow(n * (n - 1) / 2).saturating_mul(prod(2..=n, &unitary)),
            Family::GU => pow(n * (n - 1) / 2).saturating_mul(prod(1..=n, &unitary)),
            Family::Sp => {
                let m = n / 2;
                pow(m * m).saturating_mul(prod(1..=m, &|i| pow(2 * i) - 1))
            }
            Family::File => return None,
        })
    }

    /// Order of the center for the matrix families.
    pub fn predicted_center_order(&self) -> Option<u64> {
        let n = self.n as u64;
        Some(match self.family {
            Family::SL => gcd(n, self.q - 1),
            Family::GL => self.q - 1,
            Family::SU => gcd(n, self.q + 1),
            Family::GU => self.q + 1,
            Family::Sp => gcd(2, self.q - 1),
            Family::File => return None,
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::File => write!(
                f,
                "file:{}",
                self.path.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
            ),
            fam => write!(f, "{}({},{})", fam.name(), self.n, self.q),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err(Error::InvalidSpec("empty file path".into()));
            }
            return Ok(GroupSpec::file(path));
        }
        let bad = || Error::InvalidSpec(format!("cannot parse group `{s}`"));
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let family = match s[..open].trim() {
            "SL" => Family::SL,
            "SU" => Family::SU,
            "Sp" => Family::Sp,
            "GL" => Family::GL,
            "GU" => Family::GU,
            _ => return Err(bad()),
        };
        let mut parts = inner.split(',').map(|t| t.trim().parse::<u64>());
        let (Some(Ok(n)), Some(Ok(q)), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        GroupSpec::new(family, n as usize, q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    None,
    Symplectic,
    Unitary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalForm {
    pub kind: FormKind,
    pub gram: Matrix,
}

/// Generators, invariant form and predicted order for one spec.
#[derive(Clone, Debug)]
pub struct ClassicalGroup {
    pub spec: GroupSpec,
    pub field: Arc<Field>,
    pub generators: Vec<Matrix>,
    pub form: ClassicalForm,
    pub order: Option<u128>,
}

/// Builds the named group. Construction itself is uncapped.
pub fn classical_group(spec: &GroupSpec) -> Result<ClassicalGroup> {
    spec.validate()?;
    if spec.family == Family::File {
        let path = spec.path.as_ref().ok_or_else(|| Error::InvalidSpec("missing path".into()))?;
        let (field, generators) = crate::store::load_generators(path)?;
        let n = generators.first().map(Matrix::dim).unwrap_or(0);
        if generators.iter().any(|g| g.dim() != n) {
            return Err(Error::InvalidSpec("generator dimensions differ".into()));
        }
        let mut spec = spec.clone();
        spec.n = n;
        spec.q = field.size() as u64;
        return Ok(ClassicalGroup {
            spec,
            field,
            generators,
            form: ClassicalForm { kind: FormKind::None, gram: Matrix::identity(n) },
            order: None,
        });
    }
    let field = Field::of_order(spec.matrix_field_size())?;
    let n = spec.n;
    let (generators, form) = match spec.family {
        Family::SL => (sl_generators(&field, n, false), none_form(n)),
        Family::GL => (sl_generators(&field, n, true), none_form(n)),
        Family::Sp => {
            let gram = symplectic_gram(&field, n / 2);
            (sp_generators(&field, n / 2), ClassicalForm { kind: FormKind::Symplectic, gram })
        }
        Family::SU | Family::GU => {
            let gens = su_generators(&field, spec.q, n, spec.family == Family::GU)?;
            (gens, ClassicalForm { kind: FormKind::Unitary, gram: Matrix::identity(n) })
        }
        Family::File => unreachable!(),
    };
    Ok(ClassicalGroup {
        spec: spec.clone(),
        field,
        generators,
        form,
        order: spec.predicted_order(),
    })
}

fn none_form(n: usize) -> ClassicalForm {
    ClassicalForm { kind: FormKind::None, gram: Matrix::identity(n) }
}

/// `I + t·E_{ij}`.
fn transvection(n: usize, i: usize, j: usize, t: u32) -> Matrix {
    let mut m = Matrix::identity(n);
    m.set(i, j, t);
    m
}

/// `e_i ↦ e_{i+1}`, `e_n ↦ ±e_1`, sign chosen so the determinant is 1.
fn cycle_monomial(field: &Field, n: usize) -> Matrix {
    let mut m = Matrix::new(n, vec![0; n * n]).unwrap();
    for i in 0..n {
        m.set((i + 1) % n, i, 1);
    }
    if n.is_multiple_of(2) {
        m.set(0, n - 1, field.neg(1));
    }
    m
}

fn sl_generators(field: &Field, n: usize, general: bool) -> Vec<Matrix> {
    let mut gens = Vec::new();
    let omega = field.generator();
    if n >= 2 {
        gens.push(transvection(n, 0, 1, 1));
        gens.push(cycle_monomial(field, n));
        if field.degree() > 1 {
            let mut d = vec![1; n];
            d[0] = omega;
            d[1] = field.inv(omega).unwrap();
            gens.push(Matrix::diag(&d));
        }
    }
    if general && field.size() > 2 {
        let mut d = vec![1; n];
        d[0] = omega;
        gens.push(Matrix::diag(&d));
    }
    gens
}

/// `[[0, I], [−I, 0]]` in dimension `2m`.
fn symplectic_gram(field: &Field, m: usize) -> Matrix {
    let n = 2 * m;
    let mut j = Matrix::new(n, vec![0; n * n]).unwrap();
    for i in 0..m {
        j.set(i, m + i, 1);
        j.set(m + i, i, field.neg(1));
    }
    j
}

/// Levi embedding `A ↦ diag(A, A^{-T})`.
fn levi(field: &Field, a: &Matrix) -> Matrix {
    let inv_t = a.inverse(field).expect("Levi factor is invertible").transpose();
    Matrix::block_diag(&[a.clone(), inv_t])
}

fn sp_generators(field: &Field, m: usize) -> Vec<Matrix> {
    let n = 2 * m;
    let mut gens = vec![transvection(n, 0, m, 1), symplectic_gram(field, m)];
    if m >= 2 {
        gens.push(levi(field, &transvection(m, 0, 1, 1)));
        gens.push(levi(field, &cycle_monomial(field, m)));
    }
    if field.size() > 3 {
        let mut d = vec![1; m];
        d[0] = field.generator();
        gens.push(levi(field, &Matrix::diag(&d)));
    }
    gens
}

/// Generators of SU/GU over `F_{q²}` with the identity hermitian form: a
/// generating pair of `SU_2(q)` placed in every adjacent coordinate plane.
fn su_generators(field: &Arc<Field>, q: u64, n: usize, general: bool) -> Result<Vec<Matrix>> {
    let conj = |a: u32| field.pow(a, q as i64).unwrap();
    let lambda = field.element_of_order(q + 1)?;
    let mut gens = Vec::new();
    if n >= 2 {
        let h = Matrix::diag(&[lambda, conj(lambda)]);
        let su2_order = (q * (q * q - 1)) as u128;
        let norm = |a: u32| field.mul(a, conj(a));
        let mut partner = None;
        'search: for b in 1..field.size() {
            for a in 0..field.size() {
                if field.add(norm(a), norm(b)) != 1 {
                    continue;
                }
                let u = Matrix::from_rows(&[vec![a, b], vec![field.neg(conj(b)), conj(a)]])?;
                let g = grp::enumerate(field, &[h.clone(), u.clone()], su2_order as u64)?;
                if g.order() as u128 == su2_order {
                    partner = Some(u);
                    break 'search;
                }
            }
        }
        let u = partner.ok_or_else(|| Error::InvalidSpec("no SU_2 generating pair".into()))?;
        for i in 0..n - 1 {
            for block in [&h, &u] {
                let mut m = Matrix::identity(n);
                for r in 0..2 {
                    for c in 0..2 {
                        m.set(i + r, i + c, block.get(r, c));
                    }
                }
                gens.push(m);
            }
        }
    }
    if q == 2 && n >= 3 {
        // SU_2(2) blocks reach only a normal subgroup of index 4 in SU_3(2).
        for extra in su3_over_f4_generators(field, &gens[..4])? {
            for i in 0..n - 2 {
                let mut m = Matrix::identity(n);
                for r in 0..3 {
                    for c in 0..3 {
                        m.set(i + r, i + c, extra.get(r, c));
                    }
                }
                gens.push(m);
            }
        }
    }
    if general {
        let mut d = vec![1; n];
        d[0] = lambda;
        gens.push(Matrix::diag(&d));
    }
    Ok(gens)
}

/// Elements of `SU_3(2)` (identity form), taken greedily in code order, that
/// extend the embedded `SU_2(2)` blocks to all of `SU_3(2)`.
fn su3_over_f4_generators(field: &Arc<Field>, blocks: &[Matrix]) -> Result<Vec<Matrix>> {
    let spec = GroupSpec { family: Family::SU, n: 3, q: 2, path: None };
    let target = spec.predicted_order().unwrap() as u64;
    let shrink = |m: &Matrix| {
        let mut out = Matrix::identity(3);
        for r in 0..3 {
            for c in 0..3 {
                out.set(r, c, m.get(r, c));
            }
        }
        out
    };
    let mut gens: Vec<Matrix> = blocks.iter().map(shrink).collect();
    let form = ClassicalGroup {
        spec,
        field: Arc::clone(field),
        generators: Vec::new(),
        form: ClassicalForm { kind: FormKind::Unitary, gram: Matrix::identity(3) },
        order: None,
    };
    let mut current = grp::enumerate(field, &gens, target)?;
    let mut extras = Vec::new();
    for code in 0..4u32.pow(9) {
        if current.order() as u64 == target {
            return Ok(extras);
        }
        let m = Matrix::new(3, (0..9).map(|i| (code >> (2 * (8 - i))) & 3).collect())?;
        if !form.form_membership(&m)? || current.index_of(&m).is_some() {
            continue;
        }
        gens.push(m.clone());
        extras.push(m);
        current = grp::enumerate(field, &gens, target)?;
    }
    if current.order() as u64 == target {
        return Ok(extras);
    }
    Err(Error::InvalidSpec("no SU_3(2) generators found".into()))
}

impl ClassicalGroup {
    /// Whether `m` satisfies the determinant and form conditions of the family.
    pub fn form_membership(&self, m: &Matrix) -> Result<bool> {
        let n = self.spec.n;
        if m.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
        }
        let f = &*self.field;
        let det = m.det(f);
        Ok(match self.spec.family {
            Family::SL => det == 1,
            Family::GL | Family::File => det != 0,
            Family::Sp => m.transpose().mul(&self.form.gram, f).mul(m, f) == self.form.gram,
            Family::SU | Family::GU => {
                let q = self.spec.q as i64;
                let conj = m.map(|a| f.pow(a, q).unwrap());
                let preserved = m.transpose().mul(&self.form.gram, f).mul(&conj, f) == self.form.gram;
                preserved && (self.spec.family == Family::GU || det == 1)
            }
        })
    }
}

/// Matrix of multiplication by `gamma ∈ ext` on `ext` viewed as a vector space
/// over its subfield `base`, in the basis `1, X, …, X^{m−1}`.
pub fn multiplication_matrix(base: &Field, ext: &Field, gamma: u32) -> Result<Matrix> {
    let f = base.degree() as usize;
    let total = ext.degree() as usize;
    if base.characteristic() != ext.characteristic() || !total.is_multiple_of(f) {
        return Err(Error::NoEmbedding { from: base.size() as u64, to: ext.size() as u64 });
    }
    let m = total / f;
    let p = ext.characteristic();
    let prime = Field::new(p as u64, 1)?;
    let root = ext.embedding_root(base)?;
    let beta = if total >= 2 { p } else { 1 };
    let beta_pows: Vec<u32> = (0..m).map(|j| ext.pow(beta, j as i64).unwrap()).collect();
    // e_i = image of X^i from the base field
    let e: Vec<u32> = (0..f)
        .map(|i| {
            let code = base.pow(if f >= 2 { base.characteristic() } else { 1 }, i as i64).unwrap();
            ext.embed_with_root(base, root, code)
        })
        .collect();
    let mut cols = vec![0u32; total * total];
    for j in 0..m {
        for i in 0..f {
            let v = ext.coefficients(ext.mul(e[i], beta_pows[j]));
            for (r, c) in v.into_iter().enumerate() {
                cols[r * total + j * f + i] = c;
            }
        }
    }
    let basis = Matrix::new(total, cols)?;
    let to_coords = basis.inverse(&prime).ok_or_else(|| {
        Error::Inconsistency("polynomial basis is not a basis over the subfield".into())
    })?;
    let mut out = Matrix::new(m, vec![0; m * m])?;
    for j in 0..m {
        let image = ext.mul(gamma, beta_pows[j]);
        let v = Matrix::new(total, {
            let mut col = vec![0; total * total];
            for (r, c) in ext.coefficients(image).into_iter().enumerate() {
                col[r * total] = c;
            }
            col
        })?;
        let coords = to_coords.mul(&v, &prime);
        for k in 0..m {
            let digits: Vec<u32> = (0..f).map(|i| coords.get(k * f + i, 0)).collect();
            out.set(k, j, base.from_coefficients(&digits)?);
        }
    }
    Ok(out)
}

/// Singer-cycle element of `GL_m(q)` of exact order `r` (`r | q^m − 1`).
pub fn singer_element(m: usize, q: u64, r: u64) -> Result<Matrix> {
    let base = Field::of_order(q)?;
    let size = (q as u128).pow(m as u32);
    if size > crate::ff::DEFAULT_FIELD_CAP as u128 {
        return Err(Error::FieldTooLarge { size, cap: crate::ff::DEFAULT_FIELD_CAP });
    }
    let ext = Field::of_order(size as u64)?;
    let gamma = ext.element_of_order(r)?;
    multiplication_matrix(&base, &ext, gamma)
}

/// Element of order `r` in the norm-one torus `C_{q+1} ≤ SL_2(q)`.
pub fn norm_one_torus_element(q: u64, r: u64) -> Result<Matrix> {
    if r == 0 || !(q + 1).is_multiple_of(r) {
        return Err(Error::OrderNotDivisor { order: r, group_order: q + 1 });
    }
    let base = Field::of_order(q)?;
    let ext = Field::of_order(q * q)?;
    let gamma = ext.element_of_order(r)?;
    multiplication_matrix(&base, &ext, gamma)
}
