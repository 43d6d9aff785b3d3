//! Public one-way functions `h_1..h_m : F_p -> F_p`.
//!
//! `h_level(x)` hashes the message
//!
//! ```text
//! "DHSS-OWF-v1" || level:u16 || len(p):u16 || p || len(x):u16 || x
//! ```
//!
//! (all integers big-endian, `p` and `x` in minimal bytes, zero as the empty
//! string) with SHA-256 in counter mode, `SHA-256(msg || ctr:u32)` for
//! `ctr = 0, 1, ...`, takes the first `ceil(2 * bitlen(p) / 8)` bytes of the
//! stream as a big-endian integer and reduces it modulo `p`.

use num_bigint::BigUint;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::field::{FieldCtx, FieldElement, FieldError};

pub const FAMILY_ID: &str = "DHSS-OWF-v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OneWayError {
    #[error("one-way function level {level} outside 1..={levels}")]
    LevelOutOfRange { level: usize, levels: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneWayFamily {
    ctx: FieldCtx,
    levels: usize,
}

impl OneWayFamily {
    pub fn new(ctx: &FieldCtx, levels: usize) -> Self {
        OneWayFamily { ctx: ctx.clone(), levels }
    }

    pub fn family_id(&self) -> &'static str {
        FAMILY_ID
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// The exact bytes hashed for `h_level(x)`.
    pub fn message(&self, level: usize, x: &FieldElement) -> Result<Vec<u8>, OneWayError> {
        if level == 0 || level > self.levels || level > u16::MAX as usize {
            return Err(OneWayError::LevelOutOfRange { level, levels: self.levels });
        }
        self.ctx.check(x.ctx())?;
        let p = self.ctx.modulus_bytes();
        let xb = x.to_bytes_be();
        let mut msg = Vec::with_capacity(FAMILY_ID.len() + 6 + p.len() + xb.len());
        msg.extend_from_slice(FAMILY_ID.as_bytes());
        msg.extend_from_slice(&(level as u16).to_be_bytes());
        msg.extend_from_slice(&(p.len() as u16).to_be_bytes());
        msg.extend_from_slice(&p);
        msg.extend_from_slice(&(xb.len() as u16).to_be_bytes());
        msg.extend_from_slice(&xb);
        Ok(msg)
    }

    pub fn eval(&self, level: usize, x: &FieldElement) -> Result<FieldElement, OneWayError> {
        let msg = self.message(level, x)?;
        let width = (2 * self.ctx.bits()).div_ceil(8) as usize;
        let mut stream = Vec::with_capacity(width + 32);
        let mut counter: u32 = 0;
        while stream.len() < width {
            let mut h = Sha256::new();
            h.update(&msg);
            h.update(counter.to_be_bytes());
            stream.extend_from_slice(&h.finalize());
            counter += 1;
        }
        Ok(self.ctx.reduce(BigUint::from_bytes_be(&stream[..width])))
    }
}
