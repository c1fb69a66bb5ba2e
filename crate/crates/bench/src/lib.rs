//! Fixtures shared by the benchmarks.

use wordmap_core::matgrp::classical_group;
use wordmap_core::{EnumLimits, GroupData, GroupSpec};

/// Enumerated group with classes, panicking on bad input.
pub fn group(spec: &str) -> GroupData {
    GroupData::build(&spec.parse::<GroupSpec>().unwrap(), EnumLimits::default()).unwrap()
}

/// Field and generators for `spec`, ready to enumerate.
pub fn generators(spec: &str) -> wordmap_core::matgrp::ClassicalGroup {
    classical_group(&spec.parse().unwrap()).unwrap()
}
