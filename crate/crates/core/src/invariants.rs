//! Topological diagnostics `S(BC) + S(CD) − S(B) − S(D)` on four-region
//! partitions.

use serde::Serialize;

use crate::entropy::entropy;
use crate::error::{Error, Result};
use crate::lattice::{Face, StabilizerState};
use crate::region::{partition_2d, partition_line, partition_point, Partition2dParams, PartitionABCD, PartitionParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    Gamma2dCombination,
    GammaPoint,
    GammaLine,
}

/// The four entropies entering the combination, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct InvariantTerms {
    pub s_bc: usize,
    pub s_cd: usize,
    pub s_b: usize,
    pub s_d: usize,
}

impl InvariantTerms {
    pub fn value(&self) -> i64 {
        self.s_bc as i64 + self.s_cd as i64 - self.s_b as i64 - self.s_d as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub kind: InvariantKind,
    pub value_bits: i64,
    /// Short description of the partition geometry.
    pub partition: String,
    pub region_sizes: [usize; 4],
    pub terms: InvariantTerms,
}

impl InvariantReport {
    /// True when `value_bits` agrees with the stored terms.
    pub fn is_consistent(&self) -> bool {
        self.value_bits == self.terms.value()
    }
}

pub fn tee_combination(state: &StabilizerState, p: &PartitionABCD) -> Result<InvariantReport> {
    tee_with_kind(state, p, InvariantKind::Gamma2dCombination, "custom".into())
}

fn tee_with_kind(
    state: &StabilizerState,
    p: &PartitionABCD,
    kind: InvariantKind,
    partition: String,
) -> Result<InvariantReport> {
    if !p.is_valid() {
        return Err(Error::Overlap("partition regions overlap or leave gaps".into()));
    }
    let terms = InvariantTerms {
        s_bc: entropy(state, &p.bc())?,
        s_cd: entropy(state, &p.cd())?,
        s_b: entropy(state, &p.b)?,
        s_d: entropy(state, &p.d)?,
    };
    Ok(InvariantReport {
        kind,
        value_bits: terms.value(),
        partition,
        region_sizes: [p.a.len(), p.b.len(), p.c.len(), p.d.len()],
        terms,
    })
}

fn describe(face: Face, p: &PartitionParams) -> String {
    format!(
        "{face} wall={} core={} depth={} height={} offset={:?}",
        p.wall, p.core, p.depth, p.height, p.offset
    )
}

pub fn gamma_point(state: &StabilizerState, face: Face, params: &PartitionParams) -> Result<InvariantReport> {
    let lattice = state.require_lattice()?;
    let p = partition_point(lattice, face, params)?;
    tee_with_kind(state, &p, InvariantKind::GammaPoint, describe(face, params))
}

pub fn gamma_line(state: &StabilizerState, face: Face, params: &PartitionParams) -> Result<InvariantReport> {
    let lattice = state.require_lattice()?;
    let p = partition_line(lattice, face, params)?;
    tee_with_kind(state, &p, InvariantKind::GammaLine, describe(face, params))
}

pub fn gamma_2d(state: &StabilizerState, params: &Partition2dParams) -> Result<InvariantReport> {
    let lattice = state.require_lattice()?;
    let p = partition_2d(lattice, params)?;
    let label = format!(
        "2d wall={} core={} depth={} offset={:?}",
        params.wall, params.core, params.depth, params.offset
    );
    tee_with_kind(state, &p, InvariantKind::Gamma2dCombination, label)
}
