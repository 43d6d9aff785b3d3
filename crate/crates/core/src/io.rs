//! JSON bulletin and share files.
//!
//! Bulletin:
//!
//! ```json
//! {
//!   "version": "dhss-1",
//!   "modulus": "47",
//!   "familyId": "DHSS-OWF-v1",
//!   "levelSizes": [3, 4],
//!   "thresholds": [2, 3],
//!   "alphas": ["01"],
//!   "rValues": ["2a"],
//!   "iTables": [{ "level": 1, "index": 3, "value": "05" }, ...]
//! }
//! ```
//!
//! `iTables` lists `I^(l)` entries ordered by level then index; entries for
//! the top level `m` carry `"level": m`. Share files are
//! `{"version", "modulus", "index", "value"}`. Every field element, and the
//! modulus, is lowercase big-endian hex of its minimal bytes (`"0"` for zero).
//! Output is pretty-printed with a trailing newline.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{parse_hex, FieldCtx, FieldElement, FieldError};
use crate::scheme::{AccessStructure, Bulletin, SchemeError};

pub const FORMAT_VERSION: &str = "dhss-1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0:?}")]
    Version(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("share file is for a different modulus than the bulletin")]
    ModulusMismatch,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct BulletinFile {
    version: String,
    modulus: String,
    family_id: String,
    level_sizes: Vec<usize>,
    thresholds: Vec<usize>,
    alphas: Vec<String>,
    r_values: Vec<String>,
    i_tables: Vec<TableEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    level: usize,
    index: usize,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShareFile {
    version: String,
    modulus: String,
    index: usize,
    value: String,
}

/// One participant's share as read from disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareRecord {
    pub ctx: FieldCtx,
    pub index: usize,
    pub value: FieldElement,
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn bulletin_to_json(b: &Bulletin) -> String {
    let m = b.structure.levels();
    let mut i_tables = Vec::new();
    for (l, table) in b.i_tables.iter().enumerate() {
        i_tables.extend(table.iter().map(|(&index, v)| TableEntry { level: l + 1, index, value: v.to_hex() }));
    }
    i_tables.extend(b.i_table_m.iter().map(|(&index, v)| TableEntry { level: m, index, value: v.to_hex() }));
    to_pretty(&BulletinFile {
        version: FORMAT_VERSION.to_owned(),
        modulus: b.ctx.modulus_hex(),
        family_id: b.family_id.clone(),
        level_sizes: b.structure.level_sizes().to_vec(),
        thresholds: b.structure.thresholds().to_vec(),
        alphas: b.alphas.iter().map(FieldElement::to_hex).collect(),
        r_values: b.r_values.iter().map(FieldElement::to_hex).collect(),
        i_tables,
    })
}

pub fn bulletin_from_json(s: &str) -> Result<Bulletin, FormatError> {
    let f: BulletinFile = serde_json::from_str(s)?;
    if f.version != FORMAT_VERSION {
        return Err(FormatError::Version(f.version));
    }
    let structure = AccessStructure::new(f.level_sizes, f.thresholds)?;
    let ctx = structure.validate(&parse_hex(&f.modulus)?)?;
    let m = structure.levels();
    let hexes = |v: &[String]| v.iter().map(|h| ctx.from_hex(h)).collect::<Result<Vec<_>, _>>();
    let mut i_tables = vec![BTreeMap::new(); m - 1];
    let mut i_table_m = BTreeMap::new();
    for e in &f.i_tables {
        let table = match e.level {
            l if l >= 1 && l < m => &mut i_tables[l - 1],
            l if l == m => &mut i_table_m,
            l => return Err(SchemeError::MalformedBulletin(format!("table entry for level {l}")).into()),
        };
        if table.insert(e.index, ctx.from_hex(&e.value)?).is_some() {
            return Err(SchemeError::MalformedBulletin(format!("repeated entry I_{}^({})", e.index, e.level)).into());
        }
    }
    let b = Bulletin {
        structure,
        alphas: hexes(&f.alphas)?,
        r_values: hexes(&f.r_values)?,
        ctx,
        family_id: f.family_id,
        i_tables,
        i_table_m,
    };
    b.check()?;
    Ok(b)
}

pub fn share_to_json(ctx: &FieldCtx, index: usize, value: &FieldElement) -> String {
    to_pretty(&ShareFile {
        version: FORMAT_VERSION.to_owned(),
        modulus: ctx.modulus_hex(),
        index,
        value: value.to_hex(),
    })
}

pub fn share_from_json(s: &str) -> Result<ShareRecord, FormatError> {
    let f: ShareFile = serde_json::from_str(s)?;
    if f.version != FORMAT_VERSION {
        return Err(FormatError::Version(f.version));
    }
    let ctx = FieldCtx::new(parse_hex(&f.modulus)?)?;
    let value = ctx.from_hex(&f.value)?;
    Ok(ShareRecord { ctx, index: f.index, value })
}

/// Re-homes a share into the bulletin's field, rejecting other moduli.
pub fn share_in_field(record: &ShareRecord, ctx: &FieldCtx) -> Result<FieldElement, FormatError> {
    if record.ctx != *ctx {
        return Err(FormatError::ModulusMismatch);
    }
    Ok(ctx.from_biguint(record.value.value().clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::deal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn sample() -> (Bulletin, crate::ShareSet) {
        let st = AccessStructure::new(vec![3, 4], vec![2, 3]).unwrap();
        let ctx = FieldCtx::from_u64(71).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let (shares, b) = deal(&st, &ctx.elem(30), &mut rng).unwrap();
        (b, shares)
    }

    #[test]
    fn bulletin_round_trip_is_byte_identical() {
        let (b, _) = sample();
        let text = bulletin_to_json(&b);
        let parsed = bulletin_from_json(&text).unwrap();
        assert_eq!(parsed, b);
        assert_eq!(bulletin_to_json(&parsed), text);
        assert!(text.starts_with("{\n  \"version\": \"dhss-1\",\n  \"modulus\": \"47\",\n  \"familyId\": \"DHSS-OWF-v1\""));
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn share_round_trip() {
        let (b, shares) = sample();
        let text = share_to_json(&b.ctx, 4, shares.get(4).unwrap());
        let rec = share_from_json(&text).unwrap();
        assert_eq!(rec.index, 4);
        assert_eq!(&rec.value, shares.get(4).unwrap());
        assert_eq!(share_to_json(&rec.ctx, rec.index, &rec.value), text);
    }

    #[test]
    fn rejects_bad_bulletins() {
        let (b, _) = sample();
        let text = bulletin_to_json(&b);
        assert!(matches!(bulletin_from_json(&text.replace("dhss-1", "dhss-2")), Err(FormatError::Version(_))));
        assert!(matches!(bulletin_from_json("{"), Err(FormatError::Json(_))));
        let composite = text.replace("\"modulus\": \"47\"", "\"modulus\": \"4b\"");
        assert!(matches!(
            bulletin_from_json(&composite),
            Err(FormatError::Scheme(SchemeError::Field(FieldError::NotPrime(_))))
        ));
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["iTables"].as_array_mut().unwrap().pop();
        assert!(matches!(
            bulletin_from_json(&v.to_string()),
            Err(FormatError::Scheme(SchemeError::MalformedBulletin(_)))
        ));
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["alphas"] = serde_json::json!(["0"]);
        assert!(bulletin_from_json(&v.to_string()).is_err());
    }

    #[test]
    fn share_modulus_must_match() {
        let (b, _) = sample();
        let other = FieldCtx::from_u64(73).unwrap();
        let rec = share_from_json(&share_to_json(&other, 1, &other.elem(5))).unwrap();
        assert!(matches!(share_in_field(&rec, &b.ctx), Err(FormatError::ModulusMismatch)));
        assert!(share_in_field(&rec, &other).is_ok());
    }
}
