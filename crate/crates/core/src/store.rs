//! Versioned on-disk bundles and the group cache.
//!
//! A bundle file is one JSON header line followed by a binary payload:
//!
//! ```text
//! {"format":"wordmap-bundle","version":"1",…,"content_hash":"<sha256>"}\n
//! elements | generator indices | class data | character table | certificates
//! ```
//!
//! Field elements are written as their `f` coefficients, low degree first,
//! each in a fixed little-endian width chosen from `p`. Integers are
//! little-endian; certificates are length-prefixed JSON documents. The hash
//! covers the payload only.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chars::TableData;
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::grp::{ClassData, FiniteGroup};
use crate::matgrp::{Family, GroupSpec};
use crate::matrix::Matrix;
use crate::witness::Certificate;

pub const FORMAT_NAME: &str = "wordmap-bundle";
pub const FORMAT_VERSION: &str = "1";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// A fully enumerated group with optional class data and table.
    Group,
    /// Generator matrices only, for the `file:` group family.
    Generators,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldData {
    pub p: u64,
    pub f: u32,
    pub modulus: Vec<u32>,
}

impl FieldData {
    pub fn of(field: &Field) -> Self {
        FieldData {
            p: field.characteristic() as u64,
            f: field.degree(),
            modulus: field.modulus().to_vec(),
        }
    }

    pub fn field(&self) -> Result<Arc<Field>> {
        if self.modulus.len() != self.f as usize + 1 {
            return Err(Error::Malformed("modulus degree differs from f".into()));
        }
        Field::from_modulus(self.p, self.modulus.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Sizes {
    elements: u64,
    generators: u64,
    classes: u64,
    exponent: u64,
    characters: u64,
    certificates: u64,
    payload_bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: String,
    engine_version: String,
    role: Role,
    spec: String,
    field: FieldData,
    degree: usize,
    sizes: Sizes,
    content_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupBundle {
    pub role: Role,
    pub spec: String,
    pub field: FieldData,
    pub degree: usize,
    /// Concatenated row-major entries; for [`Role::Generators`] these are the
    /// generators themselves.
    pub elements: Vec<u32>,
    /// Element indices of the generators ([`Role::Group`] only).
    pub generators: Vec<usize>,
    pub classes: Option<ClassData>,
    pub table: Option<TableData>,
    pub certificates: Vec<Certificate>,
    pub engine_version: String,
}

impl GroupBundle {
    pub fn from_group(
        spec: &str,
        group: &FiniteGroup,
        classes: Option<&ClassData>,
        table: Option<TableData>,
        certificates: Vec<Certificate>,
    ) -> Self {
        GroupBundle {
            role: Role::Group,
            spec: spec.to_string(),
            field: FieldData::of(group.field()),
            degree: group.degree(),
            elements: group.raw_elements().to_vec(),
            generators: group.generators().to_vec(),
            classes: classes.cloned(),
            table,
            certificates,
            engine_version: ENGINE_VERSION.to_string(),
        }
    }

    pub fn from_generators(spec: &str, field: &Field, generators: &[Matrix]) -> Result<Self> {
        let degree = generators.first().map_or(0, Matrix::dim);
        let mut elements = Vec::with_capacity(generators.len() * degree * degree);
        for g in generators {
            if g.dim() != degree {
                return Err(Error::DimensionMismatch { expected: degree, found: g.dim() });
            }
            elements.extend_from_slice(g.entries());
        }
        Ok(GroupBundle {
            role: Role::Generators,
            spec: spec.to_string(),
            field: FieldData::of(field),
            degree,
            elements,
            generators: Vec::new(),
            classes: None,
            table: None,
            certificates: Vec::new(),
            engine_version: ENGINE_VERSION.to_string(),
        })
    }

    pub fn element_count(&self) -> usize {
        self.elements.len().checked_div(self.degree * self.degree).unwrap_or(0)
    }

    pub fn matrices(&self) -> Vec<Matrix> {
        let nn = self.degree * self.degree;
        self.elements
            .chunks(nn.max(1))
            .map(|c| Matrix::new(self.degree, c.to_vec()).expect("chunk has n² entries"))
            .collect()
    }

    /// Rebuilds the enumerated group ([`Role::Group`] only).
    pub fn to_group(&self, limits: crate::grp::EnumLimits) -> Result<FiniteGroup> {
        if self.role != Role::Group {
            return Err(Error::Unsupported("bundle holds generators only".into()));
        }
        FiniteGroup::from_elements(
            &self.field.field()?,
            self.degree,
            &self.elements,
            &self.generators,
            limits,
        )
    }

    /// Class equation and index sanity.
    pub fn check(&self) -> Result<()> {
        let nn = self.degree * self.degree;
        if nn == 0 || !self.elements.len().is_multiple_of(nn) {
            return Err(Error::Consistency("element data does not match the degree".into()));
        }
        let q = self.field.p.pow(self.field.f);
        if self.elements.iter().any(|&c| c as u64 >= q) {
            return Err(Error::Consistency("element entry outside the field".into()));
        }
        let count = self.element_count();
        if self.generators.iter().any(|&g| g >= count) {
            return Err(Error::Consistency("generator index out of range".into()));
        }
        if let Some(cd) = &self.classes {
            if self.role != Role::Group || cd.class_of.len() != count {
                return Err(Error::Consistency("class data does not match the elements".into()));
            }
            cd.check(count as u64)?;
            let k = cd.num_classes();
            if cd.reps.iter().enumerate().any(|(c, &r)| r >= count || cd.class_of[r] as usize != c)
                || cd.class_of.iter().any(|&c| c as usize >= k)
                || cd.inverse_class.iter().any(|&c| c >= k)
                || cd.power_map.iter().any(|&c| c as usize >= k)
            {
                return Err(Error::Consistency("class indices out of range".into()));
            }
            let mut counted = vec![0u64; k];
            for &c in &cd.class_of {
                counted[c as usize] += 1;
            }
            if counted != cd.sizes {
                return Err(Error::Consistency("class sizes disagree with the class map".into()));
            }
        }
        if self.table.is_some() && self.classes.is_none() {
            return Err(Error::Consistency("character table without class data".into()));
        }
        Ok(())
    }
}

fn coeff_width(p: u64) -> usize {
    match p {
        0..=256 => 1,
        257..=65536 => 2,
        _ => 4,
    }
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn i64(&mut self, v: i64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn coeff(&mut self, v: u32, width: usize) {
        self.buf.extend_from_slice(&v.to_le_bytes()[..width]);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Malformed("payload truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn coeff(&mut self, width: usize) -> Result<u32> {
        let mut b = [0u8; 4];
        b[..width].copy_from_slice(self.take(width)?);
        Ok(u32::from_le_bytes(b))
    }
    fn usize(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }
}

/// Upper bound on counts read from a header before allocating.
fn bounded(n: u64, remaining: usize, unit: usize) -> Result<usize> {
    if n.saturating_mul(unit as u64) > remaining as u64 {
        return Err(Error::Malformed("declared sizes exceed the payload".into()));
    }
    Ok(n as usize)
}

fn encode(bundle: &GroupBundle) -> Result<Vec<u8>> {
    bundle.check()?;
    let p = bundle.field.p;
    let f = bundle.field.f as usize;
    let width = coeff_width(p);
    let mut w = Writer { buf: Vec::new() };
    for &code in &bundle.elements {
        let mut c = code as u64;
        for _ in 0..f {
            w.coeff((c % p) as u32, width);
            c /= p;
        }
    }
    for &g in &bundle.generators {
        w.u32(g as u32);
    }
    if let Some(cd) = &bundle.classes {
        cd.class_of.iter().for_each(|&c| w.u32(c));
        cd.reps.iter().for_each(|&r| w.u32(r as u32));
        cd.sizes.iter().for_each(|&s| w.u64(s));
        cd.inverse_class.iter().for_each(|&c| w.u32(c as u32));
        cd.rep_orders.iter().for_each(|&o| w.u64(o));
        cd.power_map.iter().for_each(|&c| w.u32(c));
    }
    if let Some(t) = &bundle.table {
        w.u64(t.prime);
        let rank = t.values.first().and_then(|r| r.first()).map_or(0, Vec::len);
        w.u32(rank as u32);
        t.degrees.iter().for_each(|&d| w.u64(d));
        for v in t.values.iter().flatten() {
            if v.len() != rank {
                return Err(Error::Consistency("ragged character values".into()));
            }
            v.iter().for_each(|&c| w.i64(c));
        }
    }
    for cert in &bundle.certificates {
        let json = serde_json::to_vec(cert)?;
        w.u32(json.len() as u32);
        w.buf.extend_from_slice(&json);
    }
    Ok(w.buf)
}

fn header_for(bundle: &GroupBundle, payload: &[u8]) -> Header {
    let cd = bundle.classes.as_ref();
    Header {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION.to_string(),
        engine_version: bundle.engine_version.clone(),
        role: bundle.role,
        spec: bundle.spec.clone(),
        field: bundle.field.clone(),
        degree: bundle.degree,
        sizes: Sizes {
            elements: bundle.element_count() as u64,
            generators: bundle.generators.len() as u64,
            classes: cd.map_or(0, |c| c.num_classes() as u64),
            exponent: cd.map_or(0, |c| c.exponent),
            characters: bundle.table.as_ref().map_or(0, |t| t.degrees.len() as u64),
            certificates: bundle.certificates.len() as u64,
            payload_bytes: payload.len() as u64,
        },
        content_hash: hex::encode(Sha256::digest(payload)),
    }
}

/// Serializes a bundle to bytes.
pub fn to_bytes(bundle: &GroupBundle) -> Result<(Vec<u8>, String)> {
    let payload = encode(bundle)?;
    let header = header_for(bundle, &payload);
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    out.extend_from_slice(&payload);
    Ok((out, header.content_hash))
}

/// Parses and validates bundle bytes.
pub fn from_bytes(bytes: &[u8]) -> Result<GroupBundle> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Malformed("missing header line".into()))?;
    let header: Header = serde_json::from_slice(&bytes[..nl])
        .map_err(|e| Error::Malformed(format!("header: {e}")))?;
    if header.format != FORMAT_NAME {
        return Err(Error::Malformed(format!("unknown format {:?}", header.format)));
    }
    if header.version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: header.version,
            expected: FORMAT_VERSION.to_string(),
        });
    }
    let payload = &bytes[nl + 1..];
    if payload.len() as u64 != header.sizes.payload_bytes {
        return Err(Error::Malformed(format!(
            "payload has {} bytes, header declares {}",
            payload.len(),
            header.sizes.payload_bytes
        )));
    }
    let computed = hex::encode(Sha256::digest(payload));
    if computed != header.content_hash {
        return Err(Error::HashMismatch { stored: header.content_hash, computed });
    }
    let s = &header.sizes;
    let p = header.field.p;
    if p < 2 || header.field.f == 0 {
        return Err(Error::Malformed("invalid field data".into()));
    }
    let f = header.field.f as usize;
    let width = coeff_width(p);
    let nn = header.degree * header.degree;
    let mut r = Reader { buf: payload, pos: 0 };

    let n_entries = bounded(s.elements.saturating_mul(nn as u64), payload.len(), f * width)?;
    let mut elements = Vec::with_capacity(n_entries);
    for _ in 0..n_entries {
        let mut code = 0u64;
        let mut scale = 1u64;
        for _ in 0..f {
            let c = r.coeff(width)? as u64;
            if c >= p {
                return Err(Error::Malformed("coefficient out of range".into()));
            }
            code += c * scale;
            scale *= p;
        }
        elements.push(code as u32);
    }
    let n_gens = bounded(s.generators, payload.len(), 4)?;
    let generators = (0..n_gens).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
    let classes = if s.classes > 0 {
        let k = bounded(s.classes, payload.len(), 4)?;
        let count = s.elements as usize;
        let class_of = (0..count).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let reps = (0..k).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
        let sizes = (0..k).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let inverse_class = (0..k).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
        let rep_orders = (0..k).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let pm = bounded(s.classes.saturating_mul(s.exponent), payload.len(), 4)?;
        let power_map = (0..pm).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        Some(ClassData { class_of, reps, sizes, inverse_class, rep_orders, exponent: s.exponent, power_map })
    } else {
        None
    };
    let table = if s.characters > 0 {
        let h = bounded(s.characters, payload.len(), 8)?;
        let k = s.classes as usize;
        let prime = r.u64()?;
        let rank = r.usize()?;
        let degrees = (0..h).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        bounded((h * k) as u64 * rank as u64, payload.len(), 8)?;
        let mut values = Vec::with_capacity(h);
        for _ in 0..h {
            let row = (0..k)
                .map(|_| (0..rank).map(|_| r.i64()).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Some(TableData { conductor: s.exponent, prime, degrees, values })
    } else {
        None
    };
    let n_certs = bounded(s.certificates, payload.len(), 4)?;
    let mut certificates = Vec::with_capacity(n_certs);
    for _ in 0..n_certs {
        let len = r.usize()?;
        let json = r.take(len)?;
        certificates.push(
            serde_json::from_slice(json).map_err(|e| Error::Malformed(format!("certificate: {e}")))?,
        );
    }
    if r.pos != payload.len() {
        return Err(Error::Malformed("trailing bytes after payload".into()));
    }
    let bundle = GroupBundle {
        role: header.role,
        spec: header.spec,
        field: header.field,
        degree: header.degree,
        elements,
        generators,
        classes,
        table,
        certificates,
        engine_version: header.engine_version,
    };
    bundle.check()?;
    Ok(bundle)
}

/// Writes atomically (temporary file, then rename); returns the content hash.
pub fn save_bundle(bundle: &GroupBundle, path: &Path) -> Result<String> {
    let (bytes, hash) = to_bytes(bundle)?;
    atomic_write(path, &bytes)?;
    Ok(hash)
}

pub fn load_bundle(path: &Path) -> Result<GroupBundle> {
    from_bytes(&fs::read(path)?)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Generator matrices from a bundle of either role.
pub fn load_generators(path: &Path) -> Result<(Arc<Field>, Vec<Matrix>)> {
    let bundle = load_bundle(path)?;
    let field = bundle.field.field()?;
    let all = bundle.matrices();
    let gens = match bundle.role {
        Role::Generators => all,
        Role::Group => bundle.generators.iter().map(|&i| all[i].clone()).collect(),
    };
    if gens.is_empty() {
        return Err(Error::InvalidSpec(format!("{} holds no generators", path.display())));
    }
    Ok((field, gens))
}

pub fn save_generators(path: &Path, spec: &str, field: &Field, generators: &[Matrix]) -> Result<String> {
    save_bundle(&GroupBundle::from_generators(spec, field, generators)?, path)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub path: String,
    pub content_hash: String,
    pub engine_version: String,
}

/// Bundle cache laid out as `<root>/<family>/<n>/<q>/bundle` plus `index.json`.
#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// `None` for `file:` specs, which are not cached.
    pub fn bundle_path(&self, spec: &GroupSpec) -> Option<PathBuf> {
        if spec.family == Family::File {
            return None;
        }
        Some(
            self.root
                .join(spec.family.name())
                .join(spec.n.to_string())
                .join(spec.q.to_string())
                .join("bundle"),
        )
    }

    fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }

    pub fn index(&self) -> Result<BTreeMap<String, IndexEntry>> {
        match fs::read(self.index_path()) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| Error::Malformed(format!("cache index: {e}"))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BTreeMap::new()),
            Err(e) => Err(e.into()),
        }
    }

    /// Cached bundle for `spec`, if present and compatible.
    pub fn load(&self, spec: &GroupSpec) -> Result<Option<GroupBundle>> {
        match self.bundle_path(spec) {
            Some(path) if path.exists() => {
                let b = load_bundle(&path)?;
                Ok((b.engine_version == ENGINE_VERSION).then_some(b))
            }
            _ => Ok(None),
        }
    }

    pub fn store(&self, spec: &GroupSpec, bundle: &GroupBundle) -> Result<Option<String>> {
        let Some(path) = self.bundle_path(spec) else {
            return Ok(None);
        };
        let hash = save_bundle(bundle, &path)?;
        let mut index = self.index()?;
        let rel = path.strip_prefix(&self.root).unwrap_or(&path);
        index.insert(
            spec.to_string(),
            IndexEntry {
                path: rel.to_string_lossy().into_owned(),
                content_hash: hash.clone(),
                engine_version: ENGINE_VERSION.to_string(),
            },
        );
        let mut bytes = serde_json::to_vec_pretty(&index)?;
        bytes.push(b'\n');
        atomic_write(&self.index_path(), &bytes)?;
        Ok(Some(hash))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::{conjugacy_classes, enumerate, EnumLimits};
    use crate::matgrp::classical_group;

    fn sl25_bundle() -> GroupBundle {
        let cg = classical_group(&"SL(2,5)".parse().unwrap()).unwrap();
        let g = enumerate(&cg.field, &cg.generators, 1000).unwrap();
        let cd = conjugacy_classes(&g);
        GroupBundle::from_group("SL(2,5)", &g, Some(&cd), None, Vec::new())
    }

    #[test]
    fn roundtrip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b");
        let bundle = sl25_bundle();
        assert_eq!(bundle.element_count(), 120);
        assert_eq!(bundle.classes.as_ref().unwrap().num_classes(), 9);
        let h1 = save_bundle(&bundle, &path).unwrap();
        let first = fs::read(&path).unwrap();
        let loaded = load_bundle(&path).unwrap();
        assert_eq!(loaded, bundle);
        let h2 = save_bundle(&loaded, &path).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(fs::read(&path).unwrap(), first);
        let g = loaded.to_group(EnumLimits::default()).unwrap();
        assert_eq!(g.order(), 120);
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let (bytes, _) = to_bytes(&sl25_bundle()).unwrap();
        assert!(matches!(from_bytes(&bytes[..bytes.len() - 7]), Err(Error::Malformed(_))));
        assert!(matches!(from_bytes(b"no header"), Err(Error::Malformed(_))));
        let mut tampered = bytes.clone();
        let last = tampered.len() - 1;
        tampered[last] ^= 1;
        assert!(matches!(from_bytes(&tampered), Err(Error::HashMismatch { .. })));
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
        let header = text[..nl].replace("\"version\":\"1\"", "\"version\":\"99\"");
        let mut other = header.into_bytes();
        other.extend_from_slice(&bytes[nl..]);
        assert!(matches!(from_bytes(&other), Err(Error::VersionMismatch { .. })));
    }

    #[test]
    fn inconsistent_bundle_is_not_written() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad");
        let mut bundle = sl25_bundle();
        bundle.classes.as_mut().unwrap().sizes[1] += 1;
        assert!(matches!(save_bundle(&bundle, &path), Err(Error::Consistency(_))));
        assert!(!path.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn generator_files_and_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cg = classical_group(&"SL(2,3)".parse().unwrap()).unwrap();
        let path = dir.path().join("gens");
        save_generators(&path, "SL(2,3)", &cg.field, &cg.generators).unwrap();
        let (field, gens) = load_generators(&path).unwrap();
        assert_eq!(*field, *cg.field);
        assert_eq!(gens, cg.generators);
        let spec: GroupSpec = format!("file:{}", path.display()).parse().unwrap();
        let via_file = classical_group(&spec).unwrap();
        assert_eq!(enumerate(&via_file.field, &via_file.generators, 100).unwrap().order(), 24);

        let cache = Cache::new(dir.path().join("cache"));
        let spec: GroupSpec = "SL(2,5)".parse().unwrap();
        assert!(cache.load(&spec).unwrap().is_none());
        let hash = cache.store(&spec, &sl25_bundle()).unwrap().unwrap();
        assert!(cache.root().join("SL/2/5/bundle").exists());
        assert_eq!(cache.index().unwrap()["SL(2,5)"].content_hash, hash);
        assert_eq!(cache.load(&spec).unwrap().unwrap(), sl25_bundle());
    }
}
