//! Class multiplication coefficients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grp::{ClassData, FiniteGroup};

/// Dense tensor `a[C][D][K]`: pairs `(c, d) ∈ C × D` with `cd = k₀`, where
/// `k₀` is the representative of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstants {
    k: usize,
    data: Vec<u64>,
}

impl StructureConstants {
    pub fn num_classes(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, c: usize, d: usize, target: usize) -> u64 {
        self.data[(c * self.k + d) * self.k + target]
    }

    /// `Σ_K a[C][D][K]·|K| = |C|·|D|` and `a[C][C⁻¹][1] = |C|` for all pairs.
    pub fn check(&self, classes: &ClassData) -> bool {
        let k = self.k;
        (0..k).all(|c| {
            let inv_ok = self.get(c, classes.inverse_class[c], 0) == classes.sizes[c];
            inv_ok
                && (0..k).all(|d| {
                    let total: u64 = (0..k).map(|t| self.get(c, d, t) * classes.sizes[t]).sum();
                    total == classes.sizes[c] * classes.sizes[d]
                })
        })
    }
}

/// Counts, for each target class `K` and each `x ∈ G`, the class of `x⁻¹k₀`.
pub fn structure_constants(g: &FiniteGroup, classes: &ClassData) -> StructureConstants {
    let k = classes.num_classes();
    let columns: Vec<Vec<u64>> = (0..k)
        .into_par_iter()
        .map(|t| {
            let k0 = classes.reps[t];
            let mut col = vec![0u64; k * k];
            for x in 0..g.order() {
                let y = g.mul(g.inv(x), k0);
                col[classes.class_of(x) * k + classes.class_of(y)] += 1;
            }
            col
        })
        .collect();
    let mut data = vec![0u64; k * k * k];
    for (t, col) in columns.iter().enumerate() {
        for (cd, &v) in col.iter().enumerate() {
            data[cd * k + t] = v;
        }
    }
    StructureConstants { k, data }
}
