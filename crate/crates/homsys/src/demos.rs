//! Bundled example systems on the linear three-vertex quiver: the shifted
//! injective family, the simple modules, and the reversed projectives as a
//! strongly exceptional sequence.

use std::sync::Arc;

use crate::derived::DbObject;
use crate::error::Result;
use crate::field::FieldCfg;
use crate::quiver::{special_rep, Quiver, Rep, SpecialKind};
use crate::theta::ThetaSystem;

pub fn a3_quiver() -> Arc<Quiver> {
    Quiver::linear(3)
}

/// The family `I2[0], I2[2], I2[4]` with the natural order.
pub fn shifted_injective_system(field: FieldCfg, seed: u64) -> Result<ThetaSystem> {
    let q = a3_quiver();
    let i2 = special_rep(&q, field, SpecialKind::Injective, 1);
    let theta = (0..3)
        .map(|k| DbObject::stalk(&i2, 2 * k as i64, seed))
        .collect::<Result<Vec<_>>>()?;
    ThetaSystem::new(theta, vec![0, 1, 2], seed)
}

/// The simple modules `S1, S2, S3` with the natural order.
pub fn simples_system(field: FieldCfg, seed: u64) -> Result<ThetaSystem> {
    let q = a3_quiver();
    let theta = (0..3)
        .map(|v| DbObject::stalk(&special_rep(&q, field, SpecialKind::Simple, v), 0, seed))
        .collect::<Result<Vec<_>>>()?;
    ThetaSystem::new(theta, vec![0, 1, 2], seed)
}

/// The reversed projectives `P3, P2, P1` (a strongly exceptional sequence).
pub fn reversed_projectives(field: FieldCfg, seed: u64) -> Result<Vec<DbObject>> {
    let q = a3_quiver();
    [2usize, 1, 0]
        .iter()
        .map(|&v| DbObject::stalk(&special_rep(&q, field, SpecialKind::Projective, v), 0, seed))
        .collect()
}

/// All six indecomposable representations of the linear three-vertex
/// quiver, by dimension vector:
/// the simples, the two length-two modules, and the sincere one.
pub fn a3_indecomposables(field: FieldCfg) -> Vec<Rep> {
    let q = a3_quiver();
    vec![
        special_rep(&q, field, SpecialKind::Simple, 0),
        special_rep(&q, field, SpecialKind::Simple, 1),
        special_rep(&q, field, SpecialKind::Simple, 2),
        special_rep(&q, field, SpecialKind::Injective, 1),
        special_rep(&q, field, SpecialKind::Projective, 1),
        special_rep(&q, field, SpecialKind::Projective, 0),
    ]
}
