//! Exhaustive perfectness checking.
//!
//! For an unauthorized coalition `B` and any candidate secret `s'`, a
//! [`Witness`] is an alternative set of recurrences and an alternative
//! polynomial that agree with everything `B` can see (its shares, the
//! bulletin, the public hash family) while encoding `s'`. If a witness exists
//! for every `s'`, the view carries no information about the secret beyond
//! the hash-preimage condition, which is a computational assumption and is
//! not checked here.
//!
//! The witness recurrence for level `l` interpolates `g_l` through the points
//! `(i-1, u_{i-1} alpha_l^{-(i-1)})` recovered by `B` plus
//! `(n, (s' - r_l) alpha_l^{-n})`; the witness polynomial interpolates `B`'s
//! recovered values of `f` plus `(0, s')`. Coalitions smaller than the worst
//! case are padded with zero-valued points at the smallest unused indices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{lagrange_interpolate, FieldElement, FieldError, Polynomial};
use crate::scheme::{deal, AccessStructure, Bulletin, SchemeError};

/// Largest modulus the sweep will enumerate.
pub const MAX_SWEEP_MODULUS: u64 = 31;
/// Largest participant count the sweep will enumerate subsets of.
pub const MAX_SWEEP_PARTICIPANTS: usize = 16;

pub const EXCLUDED_CONDITION: &str =
    "existence of hash preimages for non-coalition shares is a computational assumption and is not verified";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("coalition {0:?} is authorized")]
    Authorized(Vec<usize>),
    #[error("sweep refused: {0}")]
    GuardExceeded(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// What an unauthorized coalition knows: the bulletin and its own shares.
#[derive(Clone, Debug)]
pub struct UnauthorizedView {
    bulletin: Bulletin,
    coalition: BTreeMap<usize, FieldElement>,
}

impl UnauthorizedView {
    pub fn new(bulletin: Bulletin, coalition: Vec<(usize, FieldElement)>) -> Result<Self, OracleError> {
        let view = Self::new_unchecked(bulletin, coalition)?;
        if view.bulletin.structure.is_authorized(&view.indices())? {
            return Err(OracleError::Authorized(view.indices()));
        }
        Ok(view)
    }

    /// Skips the authorization check. Used to confirm that authorized sets
    /// admit no witness for a wrong secret.
    fn new_unchecked(bulletin: Bulletin, coalition: Vec<(usize, FieldElement)>) -> Result<Self, OracleError> {
        let n = bulletin.structure.participants();
        let mut map = BTreeMap::new();
        for (i, s) in coalition {
            if i == 0 || i > n {
                return Err(SchemeError::IndexOutOfRange { index: i, n }.into());
            }
            bulletin.ctx.check(s.ctx())?;
            if map.insert(i, s).is_some() {
                return Err(SchemeError::DuplicateIndex(i).into());
            }
        }
        Ok(UnauthorizedView { bulletin, coalition: map })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.coalition.keys().copied().collect()
    }

    pub fn bulletin(&self) -> &Bulletin {
        &self.bulletin
    }
}

/// `u_i = g(i) alpha^i` with the bulletin's `alpha_l` and order `t_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AltRelation {
    pub level: usize,
    pub order: usize,
    pub alpha: FieldElement,
    pub g: Polynomial,
}

impl AltRelation {
    pub fn term(&self, i: usize) -> FieldElement {
        &self.g.eval_u64(i as u64) * &self.alpha.pow(i as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub candidate: FieldElement,
    pub alt_relations: Vec<AltRelation>,
    pub alt_polynomial: Polynomial,
}

impl Witness {
    /// Human-readable coefficient listing.
    pub fn dump(&self) -> String {
        let coeffs = |p: &Polynomial| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
        let mut out = format!("candidate = {}\nf~ coeffs = [{}]\n", self.candidate, coeffs(&self.alt_polynomial));
        for r in &self.alt_relations {
            out.push_str(&format!(
                "level {}: alpha = {}, order = {}, g coeffs = [{}]\n",
                r.level,
                r.alpha,
                r.order,
                coeffs(&r.g)
            ));
        }
        out
    }
}

/// The first condition a witness violates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ConditionFailure {
    /// `deg f~ >= t_m` or `f~(0) != s'`.
    PolynomialShape,
    /// Wrong count, root, order or degree for a level's recurrence.
    AuxiliaryEquation { level: usize },
    /// `r_l != s' - u~_n^(l)`.
    PublishedOffset { level: usize },
    /// A low-level coalition member's recovered values disagree.
    LowLevelShare { index: usize, level: usize },
    /// A top-level member's share disagrees with `f~`.
    TopLevelShare { index: usize },
}

impl fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionFailure::PolynomialShape => write!(f, "(i) degree or constant term of the polynomial"),
            ConditionFailure::AuxiliaryEquation { level } => write!(f, "(iii) auxiliary equation of level {level}"),
            ConditionFailure::PublishedOffset { level } => write!(f, "(iv) r_{level}"),
            ConditionFailure::LowLevelShare { index, level } => {
                write!(f, "(v) share {index} against level {level}")
            }
            ConditionFailure::TopLevelShare { index } => write!(f, "(vi) share {index}"),
        }
    }
}

pub fn build_witness(view: &UnauthorizedView, candidate: &FieldElement) -> Result<Witness, OracleError> {
    let b = &view.bulletin;
    let st = &b.structure;
    let ctx = &b.ctx;
    ctx.check(candidate.ctx())?;
    let m = st.levels();
    let n = st.participants();

    let mut alt_relations = Vec::with_capacity(m - 1);
    for l in 1..m {
        let t = st.threshold(l);
        let alpha = &b.alphas[l - 1];
        let alpha_inv = alpha.inverse()?;
        let mut points = Vec::with_capacity(t);
        for (&i, s) in view.coalition.range(..=st.cumulative(l)) {
            let u = b.lhr_term_from_share(l, i, s)?;
            let x = (i - 1) as u64;
            points.push((ctx.elem(x), &u * &alpha_inv.pow(x)));
        }
        let tail = candidate - &b.r_values[l - 1];
        points.push((ctx.elem(n as u64), &tail * &alpha_inv.pow(n as u64)));
        let mut pad = (1..=st.cumulative(l)).filter(|i| !view.coalition.contains_key(i));
        while points.len() < t {
            let i = pad.next().expect("N_l >= t_l leaves enough unused indices");
            points.push((ctx.elem((i - 1) as u64), ctx.zero()));
        }
        alt_relations.push(AltRelation { level: l, order: t, alpha: alpha.clone(), g: lagrange_interpolate(&points)? });
    }

    let tm = st.threshold(m);
    let mut points = Vec::with_capacity(tm);
    points.push((ctx.zero(), candidate.clone()));
    for (&i, s) in &view.coalition {
        points.push((ctx.elem(i as u64), b.poly_value_from_share(i, s)?));
    }
    let mut pad = (1..=n).filter(|i| !view.coalition.contains_key(i));
    while points.len() < tm {
        let i = pad.next().expect("n >= t_m leaves enough unused indices");
        points.push((ctx.elem(i as u64), ctx.zero()));
    }
    let alt_polynomial = lagrange_interpolate(&points)?;

    Ok(Witness { candidate: candidate.clone(), alt_relations, alt_polynomial })
}

/// Checks conditions (i) and (iii)-(vi); (ii) holds because the family is
/// public and fixed.
pub fn check_conditions(view: &UnauthorizedView, w: &Witness) -> Result<(), ConditionFailure> {
    let b = &view.bulletin;
    let st = &b.structure;
    let m = st.levels();
    let n = st.participants();
    let family = b.family();
    let lt = |p: &Polynomial, bound: usize| p.degree().is_none_or(|d| d < bound);

    // (i)
    if !lt(&w.alt_polynomial, st.threshold(m)) || w.alt_polynomial.coeff(0) != w.candidate {
        return Err(ConditionFailure::PolynomialShape);
    }
    // (iii)
    if w.alt_relations.len() != m - 1 {
        return Err(ConditionFailure::AuxiliaryEquation { level: w.alt_relations.len().min(m - 1) + 1 });
    }
    for (l, r) in (1..m).zip(&w.alt_relations) {
        if r.level != l || r.alpha != b.alphas[l - 1] || r.order != st.threshold(l) || !lt(&r.g, r.order) {
            return Err(ConditionFailure::AuxiliaryEquation { level: l });
        }
    }
    // (iv)
    for (l, r) in (1..m).zip(&w.alt_relations) {
        if b.r_values[l - 1] != &w.candidate - &r.term(n) {
            return Err(ConditionFailure::PublishedOffset { level: l });
        }
    }
    // (v), (vi)
    let n_low = st.cumulative(m - 1);
    for (&i, s) in &view.coalition {
        let f_i = w.alt_polynomial.eval_u64(i as u64);
        if i <= n_low {
            let want = family.eval(m, s).map(|h| &b.i_table_m[&i] + &h);
            if want.as_ref() != Ok(&f_i) {
                return Err(ConditionFailure::LowLevelShare { index: i, level: m });
            }
            for (l, r) in (1..m).zip(&w.alt_relations).filter(|(l, _)| i <= st.cumulative(*l)) {
                if b.lhr_term_from_share(l, i, s).as_ref() != Ok(&r.term(i - 1)) {
                    return Err(ConditionFailure::LowLevelShare { index: i, level: l });
                }
            }
        } else if f_i != *s {
            return Err(ConditionFailure::TopLevelShare { index: i });
        }
    }
    Ok(())
}

pub fn verify_conditions(view: &UnauthorizedView, w: &Witness) -> bool {
    check_conditions(view, w).is_ok()
}

/// Coalitions that are unauthorized but become authorized when any single
/// outsider joins.
pub fn maximal_unauthorized(structure: &AccessStructure) -> Vec<Vec<usize>> {
    let n = structure.participants();
    let authorized = |set: &[usize]| structure.is_authorized(set).expect("indices in range");
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let set: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        if authorized(&set) {
            continue;
        }
        let maximal = (1..=n).filter(|i| mask >> (i - 1) & 1 == 0).all(|j| {
            let mut bigger = set.clone();
            bigger.push(j);
            authorized(&bigger)
        });
        if maximal {
            out.push(set);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    pub coalition: Vec<usize>,
    pub candidate: String,
    pub failed_condition: String,
    pub witness: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct SweepReport {
    pub level_sizes: Vec<usize>,
    pub thresholds: Vec<usize>,
    pub modulus: u64,
    pub seed: u64,
    pub coalition_count: usize,
    pub candidate_count: usize,
    pub checked_pairs: usize,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    pub excluded: String,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "levels      {:?}", self.level_sizes)?;
        writeln!(f, "thresholds  {:?}", self.thresholds)?;
        writeln!(f, "modulus     {}", self.modulus)?;
        writeln!(f, "seed        {}", self.seed)?;
        writeln!(f, "coalitions  {} maximal unauthorized", self.coalition_count)?;
        writeln!(f, "candidates  {}", self.candidate_count)?;
        writeln!(f, "checked     {} (coalition, candidate) pairs", self.checked_pairs)?;
        writeln!(f, "verdict     {}", if self.passed { "PASS" } else { "FAIL" })?;
        if let Some(c) = &self.counterexample {
            writeln!(f, "first counterexample: coalition {:?}, candidate {}, violates {}", c.coalition, c.candidate, c.failed_condition)?;
            write!(f, "{}", c.witness)?;
        }
        writeln!(f, "note        {}", self.excluded)
    }
}

/// How the sweep distributes its `(coalition, candidate)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Execution::Parallel;
        #[cfg(not(feature = "parallel"))]
        Execution::Sequential
    }
}

/// Deals one seeded instance and checks every maximal unauthorized coalition
/// against every candidate secret.
pub fn perfectness_sweep(structure: &AccessStructure, p: &BigUint, seed: u64) -> Result<SweepReport, OracleError> {
    perfectness_sweep_with(structure, p, seed, Execution::default())
}

pub fn perfectness_sweep_with(
    structure: &AccessStructure,
    p: &BigUint,
    seed: u64,
    execution: Execution,
) -> Result<SweepReport, OracleError> {
    if *p > BigUint::from(MAX_SWEEP_MODULUS) {
        return Err(OracleError::GuardExceeded(format!(
            "modulus {p} exceeds the exhaustive bound {MAX_SWEEP_MODULUS}"
        )));
    }
    if structure.participants() > MAX_SWEEP_PARTICIPANTS {
        return Err(OracleError::GuardExceeded(format!(
            "{} participants exceed the exhaustive bound {MAX_SWEEP_PARTICIPANTS}",
            structure.participants()
        )));
    }
    let ctx = structure.validate(p)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let secret = ctx.random(&mut rng)?;
    let (shares, bulletin) = deal(structure, &secret, &mut rng)?;

    let views = maximal_unauthorized(structure)
        .into_iter()
        .map(|c| {
            let members = c.iter().map(|&i| (i, shares.get(i).expect("in range").clone())).collect();
            UnauthorizedView::new(bulletin.clone(), members)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let candidates: Vec<FieldElement> = ctx.elements().collect();
    let pairs: Vec<(usize, usize)> =
        (0..views.len()).flat_map(|v| (0..candidates.len()).map(move |c| (v, c))).collect();

    let check = |&(v, c): &(usize, usize)| -> Result<Option<Counterexample>, OracleError> {
        let view = &views[v];
        let w = build_witness(view, &candidates[c])?;
        Ok(check_conditions(view, &w).err().map(|failure| Counterexample {
            coalition: view.indices(),
            candidate: candidates[c].to_string(),
            failed_condition: failure.to_string(),
            witness: w.dump(),
        }))
    };
    let results: Vec<Result<Option<Counterexample>, OracleError>> = match execution {
        Execution::Sequential => pairs.iter().map(check).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            pairs.par_iter().map(check).collect()
        }
    };
    let mut counterexample = None;
    for r in results {
        if let Some(c) = r? {
            counterexample.get_or_insert(c);
        }
    }

    Ok(SweepReport {
        level_sizes: structure.level_sizes().to_vec(),
        thresholds: structure.thresholds().to_vec(),
        modulus: ctx.modulus_u64().expect("guarded"),
        seed,
        coalition_count: views.len(),
        candidate_count: candidates.len(),
        checked_pairs: pairs.len(),
        passed: counterexample.is_none(),
        counterexample,
        excluded: EXCLUDED_CONDITION.to_owned(),
    })
}
