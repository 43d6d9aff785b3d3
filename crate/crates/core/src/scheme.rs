//! The hierarchical scheme: access structure, dealer and combiner.
//!
//! Participants are numbered `1..=n` level-major, so level `l` owns indices
//! `N_{l-1}+1 ..= N_l`. A set is authorized iff for some level `l` it holds
//! at least `t_l` participants from levels `1..=l`.
//!
//! Shares of levels `1..m-1` are uniform random values `c_i`; shares of the
//! last level are points of a random polynomial `f` with `f(0) = s`. The
//! bulletin carries what lets each level recover either a point of its
//! recurrence (`I_i^(l)`, `r_l`) or a point of `f` (`I_i^(m)`).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

use crate::field::{lagrange_eval, FieldCtx, FieldElement, FieldError, Polynomial};
use crate::lhr::{LhrError, LhrRelation};
use crate::oneway::{OneWayError, OneWayFamily, FAMILY_ID};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("access structure needs at least one level")]
    NoLevels,
    #[error("{sizes} level sizes but {thresholds} thresholds")]
    LengthMismatch { sizes: usize, thresholds: usize },
    #[error("level {0} is empty")]
    EmptyLevel(usize),
    #[error("threshold of level 1 must be at least 1")]
    ZeroThreshold,
    #[error("thresholds must be strictly increasing: t_{level} <= t_{prev}", prev = .level - 1)]
    NotIncreasing { level: usize },
    #[error("threshold t_{level} = {threshold} exceeds N_{level} = {available} participants in levels 1..={level}")]
    ThresholdExceedsLevels { level: usize, threshold: usize, available: usize },
    #[error("modulus must exceed the participant count n = {n}")]
    ModulusTooSmall { n: usize },
    #[error("participant index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("duplicate index {0}")]
    DuplicateIndex(usize),
    #[error("quorum is unauthorized: {0}")]
    Unauthorized(String),
    #[error("level {level} does not qualify for this quorum")]
    LevelNotQualified { level: usize },
    #[error("bulletin has no entry I_{index}^({level})")]
    MissingBulletinEntry { level: usize, index: usize },
    #[error("malformed bulletin: {0}")]
    MalformedBulletin(String),
    #[error("bulletin was dealt for a different access structure")]
    StructureMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    OneWay(#[from] OneWayError),
    #[error(transparent)]
    Lhr(#[from] LhrError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessStructure {
    level_sizes: Vec<usize>,
    thresholds: Vec<usize>,
    cumulative: Vec<usize>,
}

impl AccessStructure {
    pub fn new(level_sizes: Vec<usize>, thresholds: Vec<usize>) -> Result<Self, SchemeError> {
        if level_sizes.is_empty() {
            return Err(SchemeError::NoLevels);
        }
        if level_sizes.len() != thresholds.len() {
            return Err(SchemeError::LengthMismatch { sizes: level_sizes.len(), thresholds: thresholds.len() });
        }
        if let Some(l) = level_sizes.iter().position(|&s| s == 0) {
            return Err(SchemeError::EmptyLevel(l + 1));
        }
        if thresholds[0] == 0 {
            return Err(SchemeError::ZeroThreshold);
        }
        for l in 1..thresholds.len() {
            if thresholds[l] <= thresholds[l - 1] {
                return Err(SchemeError::NotIncreasing { level: l + 1 });
            }
        }
        let mut cumulative = Vec::with_capacity(level_sizes.len() + 1);
        cumulative.push(0);
        for &s in &level_sizes {
            cumulative.push(cumulative.last().unwrap() + s);
        }
        // Level l seeds its recurrence from the first t_l shares, so only the
        // cumulative count has to reach t_l.
        for (l, &t) in thresholds.iter().enumerate() {
            if t > cumulative[l + 1] {
                return Err(SchemeError::ThresholdExceedsLevels { level: l + 1, threshold: t, available: cumulative[l + 1] });
            }
        }
        Ok(AccessStructure { level_sizes, thresholds, cumulative })
    }

    /// Number of levels `m`.
    pub fn levels(&self) -> usize {
        self.level_sizes.len()
    }

    /// Total participants `n`.
    pub fn participants(&self) -> usize {
        *self.cumulative.last().unwrap()
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }

    /// `t_l`, 1-based.
    pub fn threshold(&self, level: usize) -> usize {
        self.thresholds[level - 1]
    }

    /// `N_l = n_1 + ... + n_l`; `N_0 = 0`.
    pub fn cumulative(&self, level: usize) -> usize {
        self.cumulative[level]
    }

    /// Level owning participant `index`.
    pub fn level_of(&self, index: usize) -> Option<usize> {
        if index == 0 || index > self.participants() {
            return None;
        }
        (1..=self.levels()).find(|&l| index <= self.cumulative[l])
    }

    /// Checks `p > n` for an already-constructed field.
    pub fn check_field(&self, ctx: &FieldCtx) -> Result<(), SchemeError> {
        if *ctx.modulus() <= BigUint::from(self.participants()) {
            return Err(SchemeError::ModulusTooSmall { n: self.participants() });
        }
        Ok(())
    }

    /// Builds the field for `p` and checks it suits this structure.
    pub fn validate(&self, p: &BigUint) -> Result<FieldCtx, SchemeError> {
        if *p <= BigUint::from(self.participants()) {
            return Err(SchemeError::ModulusTooSmall { n: self.participants() });
        }
        let ctx = FieldCtx::new(p.clone())?;
        Ok(ctx)
    }

    fn check_indices(&self, indices: &[usize]) -> Result<BTreeSet<usize>, SchemeError> {
        let n = self.participants();
        let mut set = BTreeSet::new();
        for &i in indices {
            if i == 0 || i > n {
                return Err(SchemeError::IndexOutOfRange { index: i, n });
            }
            set.insert(i);
        }
        Ok(set)
    }

    /// Levels `l` at which `|indices ∩ [1, N_l]| >= t_l`, ascending.
    pub fn qualifying_levels(&self, indices: &[usize]) -> Result<Vec<usize>, SchemeError> {
        let set = self.check_indices(indices)?;
        Ok((1..=self.levels())
            .filter(|&l| set.range(..=self.cumulative[l]).count() >= self.thresholds[l - 1])
            .collect())
    }

    pub fn is_authorized(&self, indices: &[usize]) -> Result<bool, SchemeError> {
        Ok(!self.qualifying_levels(indices)?.is_empty())
    }
}

/// Private shares, `shares[i-1]` for participant `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareSet {
    shares: Vec<FieldElement>,
}

impl ShareSet {
    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&FieldElement> {
        index.checked_sub(1).and_then(|i| self.shares.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &FieldElement)> {
        self.shares.iter().enumerate().map(|(i, s)| (i + 1, s))
    }

    pub fn quorum(&self, indices: &[usize]) -> Result<Quorum, SchemeError> {
        let members = indices
            .iter()
            .map(|&i| {
                self.get(i)
                    .cloned()
                    .map(|s| (i, s))
                    .ok_or(SchemeError::IndexOutOfRange { index: i, n: self.len() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Quorum::new(members)
    }
}

/// Public values published by the dealer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bulletin {
    pub structure: AccessStructure,
    pub ctx: FieldCtx,
    pub family_id: String,
    /// `alpha_1..alpha_{m-1}`.
    pub alphas: Vec<FieldElement>,
    /// `r_1..r_{m-1}`.
    pub r_values: Vec<FieldElement>,
    /// `i_tables[l-1]` holds `I_i^(l)` for `i in t_l+1..=N_l`, `l < m`.
    pub i_tables: Vec<BTreeMap<usize, FieldElement>>,
    /// `I_i^(m)` for `i in 1..=N_{m-1}`.
    pub i_table_m: BTreeMap<usize, FieldElement>,
}

impl Bulletin {
    pub fn family(&self) -> OneWayFamily {
        OneWayFamily::new(&self.ctx, self.structure.levels())
    }

    /// Checks counts, index ranges, alpha distinctness and the field bound.
    pub fn check(&self) -> Result<(), SchemeError> {
        let st = &self.structure;
        let m = st.levels();
        let bad = |msg: String| Err(SchemeError::MalformedBulletin(msg));
        st.check_field(&self.ctx)?;
        if self.family_id != FAMILY_ID {
            return bad(format!("unknown one-way family {:?}", self.family_id));
        }
        if self.alphas.len() != m - 1 || self.r_values.len() != m - 1 || self.i_tables.len() != m - 1 {
            return bad(format!("expected {} alphas, r-values and level tables", m - 1));
        }
        for (k, a) in self.alphas.iter().enumerate() {
            if a.is_zero() {
                return bad(format!("alpha_{} is zero", k + 1));
            }
            if self.alphas[..k].contains(a) {
                return bad(format!("alpha_{} repeats an earlier alpha", k + 1));
            }
        }
        for l in 1..m {
            let want: Vec<usize> = (st.threshold(l) + 1..=st.cumulative(l)).collect();
            if !self.i_tables[l - 1].keys().copied().eq(want.iter().copied()) {
                return bad(format!("I^({l}) must cover indices {}..={}", st.threshold(l) + 1, st.cumulative(l)));
            }
        }
        if !self.i_table_m.keys().copied().eq(1..=st.cumulative(m - 1)) {
            return bad(format!("I^({m}) must cover indices 1..={}", st.cumulative(m - 1)));
        }
        let all = self
            .alphas
            .iter()
            .chain(&self.r_values)
            .chain(self.i_tables.iter().flat_map(|t| t.values()))
            .chain(self.i_table_m.values());
        for e in all {
            self.ctx.check(e.ctx())?;
        }
        Ok(())
    }

    /// Recovers `u_{index-1}^(level)` from participant `index`'s share.
    pub fn lhr_term_from_share(&self, level: usize, index: usize, share: &FieldElement) -> Result<FieldElement, SchemeError> {
        let st = &self.structure;
        if level == 0 || level >= st.levels() || index == 0 || index > st.cumulative(level) {
            return Err(SchemeError::MissingBulletinEntry { level, index });
        }
        let h = self.family().eval(level, share)?;
        if index <= st.threshold(level) {
            Ok(h)
        } else {
            let i = self.i_tables[level - 1]
                .get(&index)
                .ok_or(SchemeError::MissingBulletinEntry { level, index })?;
            Ok(i + &h)
        }
    }

    /// Recovers `f(index)` from participant `index`'s share.
    pub fn poly_value_from_share(&self, index: usize, share: &FieldElement) -> Result<FieldElement, SchemeError> {
        let st = &self.structure;
        let m = st.levels();
        if index <= st.cumulative(m - 1) {
            let i = self.i_table_m.get(&index).ok_or(SchemeError::MissingBulletinEntry { level: m, index })?;
            Ok(i + &self.family().eval(m, share)?)
        } else {
            Ok(share.clone())
        }
    }
}

/// Participants pooling their shares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quorum {
    members: BTreeMap<usize, FieldElement>,
}

impl Quorum {
    pub fn new(members: Vec<(usize, FieldElement)>) -> Result<Self, SchemeError> {
        let mut map = BTreeMap::new();
        for (i, s) in members {
            if map.insert(i, s).is_some() {
                return Err(SchemeError::DuplicateIndex(i));
            }
        }
        Ok(Quorum { members: map })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members.keys().copied().collect()
    }

    pub fn members(&self) -> &BTreeMap<usize, FieldElement> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AlphaMode {
    /// `alpha_l = l`.
    #[default]
    Sequential,
    /// Uniformly random, pairwise distinct, nonzero.
    RandomDistinct,
}

/// How many quorum members enter the interpolation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WorkingSet {
    /// The `t_l` lowest-indexed eligible members.
    #[default]
    Minimal,
    /// Every eligible member.
    Full,
}

pub fn deal<R: RngCore + ?Sized>(
    structure: &AccessStructure,
    secret: &FieldElement,
    rng: &mut R,
) -> Result<(ShareSet, Bulletin), SchemeError> {
    deal_with(structure, secret, rng, AlphaMode::Sequential)
}

pub fn deal_with<R: RngCore + ?Sized>(
    structure: &AccessStructure,
    secret: &FieldElement,
    rng: &mut R,
    alpha_mode: AlphaMode,
) -> Result<(ShareSet, Bulletin), SchemeError> {
    let ctx = secret.ctx().clone();
    structure.check_field(&ctx)?;
    let m = structure.levels();
    let n = structure.participants();
    let n_low = structure.cumulative(m - 1);

    let f = Polynomial::random_with_constant(secret.clone(), structure.threshold(m), rng)?;
    let mut shares = Vec::with_capacity(n);
    for _ in 0..n_low {
        shares.push(ctx.random(rng)?);
    }
    for i in n_low + 1..=n {
        shares.push(f.eval_u64(i as u64));
    }

    let family = OneWayFamily::new(&ctx, m);
    let alphas = pick_alphas(&ctx, m - 1, alpha_mode, rng)?;
    let mut r_values = Vec::with_capacity(m - 1);
    let mut i_tables = Vec::with_capacity(m - 1);
    for (l, alpha) in (1..m).zip(&alphas) {
        let t = structure.threshold(l);
        let hashed = shares[..structure.cumulative(l)]
            .iter()
            .map(|s| family.eval(l, s))
            .collect::<Result<Vec<_>, _>>()?;
        let rel = LhrRelation::from_alpha(alpha.clone(), t, hashed[..t].to_vec())?;
        let u = rel.terms(n + 1);
        r_values.push(secret - &u[n]);
        let table = (t + 1..=structure.cumulative(l)).map(|i| (i, &u[i - 1] - &hashed[i - 1])).collect();
        i_tables.push(table);
    }
    let mut i_table_m = BTreeMap::new();
    for i in 1..=n_low {
        let h = family.eval(m, &shares[i - 1])?;
        i_table_m.insert(i, &f.eval_u64(i as u64) - &h);
    }

    let bulletin = Bulletin {
        structure: structure.clone(),
        ctx,
        family_id: FAMILY_ID.to_owned(),
        alphas,
        r_values,
        i_tables,
        i_table_m,
    };
    Ok((ShareSet { shares }, bulletin))
}

fn pick_alphas<R: RngCore + ?Sized>(
    ctx: &FieldCtx,
    count: usize,
    mode: AlphaMode,
    rng: &mut R,
) -> Result<Vec<FieldElement>, SchemeError> {
    match mode {
        AlphaMode::Sequential => Ok((1..=count).map(|l| ctx.elem(l as u64)).collect()),
        AlphaMode::RandomDistinct => {
            let mut out: Vec<FieldElement> = Vec::with_capacity(count);
            while out.len() < count {
                let a = ctx.random(rng)?;
                if !a.is_zero() && !out.contains(&a) {
                    out.push(a);
                }
            }
            Ok(out)
        }
    }
}

/// Reconstructs at the lowest qualifying level with the minimal working set.
pub fn reconstruct(structure: &AccessStructure, bulletin: &Bulletin, quorum: &Quorum) -> Result<FieldElement, SchemeError> {
    if *structure != bulletin.structure {
        return Err(SchemeError::StructureMismatch);
    }
    let levels = structure.qualifying_levels(&quorum.indices())?;
    let Some(&level) = levels.first() else {
        return Err(SchemeError::Unauthorized(unauthorized_reason(structure, &quorum.indices())));
    };
    reconstruct_at(bulletin, quorum, level, WorkingSet::Minimal)
}

/// Names the shortfall at every level.
pub fn unauthorized_reason(structure: &AccessStructure, indices: &[usize]) -> String {
    (1..=structure.levels())
        .map(|l| {
            let have = indices.iter().filter(|&&i| i <= structure.cumulative(l)).count();
            format!("|A ∩ [1,{}]| = {have} < t_{l} = {}", structure.cumulative(l), structure.threshold(l))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Reconstructs through the given level, which must qualify for the quorum.
pub fn reconstruct_at(
    bulletin: &Bulletin,
    quorum: &Quorum,
    level: usize,
    working: WorkingSet,
) -> Result<FieldElement, SchemeError> {
    let st = &bulletin.structure;
    let ctx = &bulletin.ctx;
    let n = st.participants();
    for (&i, s) in quorum.members() {
        if i == 0 || i > n {
            return Err(SchemeError::IndexOutOfRange { index: i, n });
        }
        ctx.check(s.ctx())?;
    }
    if level == 0 || level > st.levels() {
        return Err(SchemeError::LevelNotQualified { level });
    }
    let t = st.threshold(level);
    let eligible: Vec<(&usize, &FieldElement)> = quorum.members().range(..=st.cumulative(level)).collect();
    if eligible.len() < t {
        return Err(SchemeError::LevelNotQualified { level });
    }
    let take = match working {
        WorkingSet::Minimal => t,
        WorkingSet::Full => eligible.len(),
    };
    let members = &eligible[..take];

    if level < st.levels() {
        let alpha = &bulletin.alphas[level - 1];
        let alpha_inv = alpha.inverse()?;
        let mut points = Vec::with_capacity(take);
        for &(&i, s) in members {
            let u = bulletin.lhr_term_from_share(level, i, s)?;
            let x = (i - 1) as u64;
            points.push((ctx.elem(x), &u * &alpha_inv.pow(x)));
        }
        let g_at_n = lagrange_eval(&points, &ctx.elem(n as u64))?;
        Ok(&bulletin.r_values[level - 1] + &(&alpha.pow(n as u64) * &g_at_n))
    } else {
        let mut points = Vec::with_capacity(take);
        for &(&i, s) in members {
            points.push((ctx.elem(i as u64), bulletin.poly_value_from_share(i, s)?));
        }
        Ok(lagrange_eval(&points, &ctx.zero())?)
    }
}
