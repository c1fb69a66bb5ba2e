//! A group together with its lazily computed class algebra.

use std::sync::{Arc, OnceLock};

use crate::chars::{self, CharacterTable, StructureConstants};
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::grp::{conjugacy_classes, ClassData, EnumLimits, FiniteGroup};
use crate::matgrp::{classical_group, GroupSpec};
use crate::store::{Cache, GroupBundle};

pub struct GroupData {
    pub spec: GroupSpec,
    pub group: FiniteGroup,
    pub classes: ClassData,
    structure: OnceLock<StructureConstants>,
    table: OnceLock<CharacterTable>,
}

impl GroupData {
    /// Constructs, enumerates and checks the order against the classical formula.
    pub fn build(spec: &GroupSpec, limits: EnumLimits) -> Result<Self> {
        let cg = classical_group(spec)?;
        if let Some(order) = cg.order {
            if order > limits.max_order as u128 {
                return Err(Error::CapExceeded { cap: limits.max_order });
            }
        }
        let group = crate::grp::enumerate_with(&cg.field, &cg.generators, limits)?;
        if let Some(order) = cg.order {
            if group.order() as u128 != order {
                return Err(Error::Inconsistency(format!(
                    "{spec}: enumerated {} elements, order formula gives {order}",
                    group.order()
                )));
            }
        }
        Ok(Self::from_parts(spec.clone(), group, None))
    }

    /// Like [`GroupData::build`], going through the cache when one is given.
    pub fn load_or_build(spec: &GroupSpec, limits: EnumLimits, cache: Option<&Cache>) -> Result<Self> {
        if let Some(cache) = cache {
            if let Some(bundle) = cache.load(spec)? {
                let group = bundle.to_group(limits)?;
                let data = Self::from_parts(spec.clone(), group, bundle.classes.clone());
                if let Some(t) = &bundle.table {
                    let _ = data.table.set(CharacterTable::from_data(t, &data.classes)?);
                }
                return Ok(data);
            }
            let data = Self::build(spec, limits)?;
            cache.store(spec, &data.bundle(false)?)?;
            return Ok(data);
        }
        Self::build(spec, limits)
    }

    fn from_parts(spec: GroupSpec, group: FiniteGroup, classes: Option<ClassData>) -> Self {
        let classes = classes.unwrap_or_else(|| conjugacy_classes(&group));
        GroupData { spec, group, classes, structure: OnceLock::new(), table: OnceLock::new() }
    }

    pub fn field(&self) -> &Arc<Field> {
        self.group.field()
    }

    pub fn order(&self) -> u64 {
        self.group.order() as u64
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        self.structure.get_or_init(|| chars::structure_constants(&self.group, &self.classes))
    }

    pub fn character_table(&self, class_cap: usize) -> Result<&CharacterTable> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let t = chars::dixon_character_table(&self.classes, self.structure_constants(), class_cap)?;
        Ok(self.table.get_or_init(|| t))
    }

    pub fn has_table(&self) -> bool {
        self.table.get().is_some()
    }

    /// Bundle of the current state; the table is included when computed.
    pub fn bundle(&self, with_table: bool) -> Result<GroupBundle> {
        let table = match (with_table, self.table.get()) {
            (true, Some(t)) => Some(t.to_data()?),
            _ => None,
        };
        Ok(GroupBundle::from_group(
            &self.spec.to_string(),
            &self.group,
            Some(&self.classes),
            table,
            Vec::new(),
        ))
    }

    /// Class of a matrix, if it lies in the group.
    pub fn class_of_matrix(&self, m: &crate::matrix::Matrix) -> Option<usize> {
        self.group.index_of(m).map(|i| self.classes.class_of(i))
    }
}
