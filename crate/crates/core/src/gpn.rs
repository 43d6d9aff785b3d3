//! The two-level GPN hierarchical scheme and the linear-algebra attack on it.
//!
//! The dealer picks `f_1` of degree `< t_1` and `f_2` of degree
//! `<= n_1 + t_2 - t_1`, both with constant term `s`, agreeing on the level-1
//! abscissae. Level-1 shares lie on `f_1`, level-2 shares on `f_2`. A level-2
//! quorum is supposed to recover `s` by solving
//!
//! ```text
//! f_1(x_i) = f_2(x_i)   for i in 1..=n_1
//! f_2(x_i) = s_i        for i in the quorum
//! ```
//!
//! [`gpn_analyze`] solves that system symbolically in the shares and reports
//! whether `s` is actually pinned down.

use std::fmt::Write as _;

use rand::RngCore;
use thiserror::Error;

use crate::field::{
    lagrange_interpolate, solve_parametric_ordered, FieldCtx, FieldElement, FieldError, Matrix, ParametricSolution,
    Polynomial,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GpnError {
    #[error("invalid GPN parameters: {0}")]
    InvalidParams(String),
    #[error("abscissa x_{0} is zero")]
    ZeroAbscissa(usize),
    #[error("abscissae x_{0} and x_{1} coincide")]
    DuplicateAbscissa(usize, usize),
    #[error("coalition index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("duplicate coalition index {0}")]
    DuplicateIndex(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Public parameters: field, level sizes, thresholds and abscissae `x_1..x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpnParams {
    pub ctx: FieldCtx,
    pub n1: usize,
    pub n2: usize,
    pub t1: usize,
    pub t2: usize,
    pub abscissae: Vec<FieldElement>,
}

impl GpnParams {
    pub fn new(ctx: &FieldCtx, n1: usize, n2: usize, t1: usize, t2: usize, abscissae: Vec<FieldElement>) -> Result<Self, GpnError> {
        let bad = |m: &str| Err(GpnError::InvalidParams(m.to_owned()));
        if t1 == 0 || t1 >= t2 || t2 >= n2 || t1 > n1 {
            return bad("need 1 <= t_1 < t_2 < n_2 and t_1 <= n_1");
        }
        if abscissae.len() != n1 + n2 {
            return bad("need exactly n_1 + n_2 abscissae");
        }
        if let Some(p) = ctx.modulus_u64() {
            if p <= (n1 + n2) as u64 {
                return bad("modulus must exceed n");
            }
        }
        check_abscissae(ctx, &abscissae)?;
        Ok(GpnParams { ctx: ctx.clone(), n1, n2, t1, t2, abscissae })
    }

    pub fn from_u64(ctx: &FieldCtx, n1: usize, n2: usize, t1: usize, t2: usize, xs: &[u64]) -> Result<Self, GpnError> {
        Self::new(ctx, n1, n2, t1, t2, xs.iter().map(|&x| ctx.elem(x)).collect())
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Degree bound of `f_2`.
    pub fn f2_degree(&self) -> usize {
        self.n1 + self.t2 - self.t1
    }
}

fn check_abscissae(ctx: &FieldCtx, xs: &[FieldElement]) -> Result<(), GpnError> {
    for (i, x) in xs.iter().enumerate() {
        ctx.check(x.ctx())?;
        if x.is_zero() {
            return Err(GpnError::ZeroAbscissa(i + 1));
        }
        if let Some(j) = xs[..i].iter().position(|y| y == x) {
            return Err(GpnError::DuplicateAbscissa(j + 1, i + 1));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpnInstance {
    pub params: GpnParams,
    pub f1: Polynomial,
    pub f2: Polynomial,
}

impl GpnInstance {
    pub fn secret(&self) -> FieldElement {
        self.f1.coeff(0)
    }

    /// `s_i` for `i = 1..=n`.
    pub fn shares(&self) -> Vec<FieldElement> {
        let p = &self.params;
        p.abscissae
            .iter()
            .enumerate()
            .map(|(i, x)| if i < p.n1 { self.f1.eval_unchecked(x) } else { self.f2.eval_unchecked(x) })
            .collect()
    }
}

/// Samples `f_1` uniformly, then `f_2` by interpolating the constraint points
/// plus `t_2 - t_1` uniform values at the smallest nonzero residues not used
/// as abscissae.
pub fn gpn_deal<R: RngCore + ?Sized>(params: &GpnParams, secret: &FieldElement, rng: &mut R) -> Result<GpnInstance, GpnError> {
    let ctx = &params.ctx;
    ctx.check(secret.ctx())?;
    let f1 = Polynomial::random_with_constant(secret.clone(), params.t1, rng)?;
    let mut points = vec![(ctx.zero(), secret.clone())];
    for x in &params.abscissae[..params.n1] {
        points.push((x.clone(), f1.eval_unchecked(x)));
    }
    let mut aux = (1u64..).map(|v| ctx.elem(v)).filter(|x| !params.abscissae.contains(x));
    for _ in 0..params.t2 - params.t1 {
        let x = aux.next().filter(|x| !x.is_zero()).ok_or_else(|| {
            GpnError::InvalidParams("field too small for auxiliary abscissae".into())
        })?;
        points.push((x, ctx.random(rng)?));
    }
    let f2 = lagrange_interpolate(&points)?;
    Ok(GpnInstance { params: params.clone(), f1, f2 })
}

/// The linear system a coalition sets up, with its labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpnSystem {
    pub a: Matrix,
    pub b: Matrix,
    pub unknown_names: Vec<String>,
    pub param_names: Vec<String>,
    pub coalition: Vec<usize>,
}

/// Builds `A x = B y` with unknowns `[s, a_{1,1..t_1-1}, a_{2,1..n_1+t_2-t_1}]`
/// and one parameter per coalition share. The first `n_1` rows encode
/// `f_1(x_i) - f_2(x_i) = 0`, the rest `f_2(x_i) = s_i`.
pub fn gpn_attack_system(
    ctx: &FieldCtx,
    abscissae: &[FieldElement],
    n1: usize,
    t1: usize,
    t2: usize,
    coalition: &[usize],
) -> Result<GpnSystem, GpnError> {
    let n = abscissae.len();
    if t1 == 0 || t1 >= t2 || n1 > n || t1 > n1 {
        return Err(GpnError::InvalidParams("need 1 <= t_1 < t_2, t_1 <= n_1 <= n".into()));
    }
    check_abscissae(ctx, abscissae)?;
    for (k, &i) in coalition.iter().enumerate() {
        if i == 0 || i > n {
            return Err(GpnError::IndexOutOfRange { index: i, n });
        }
        if coalition[..k].contains(&i) {
            return Err(GpnError::DuplicateIndex(i));
        }
    }
    let d2 = n1 + t2 - t1;
    let cols = 1 + (t1 - 1) + d2;
    let q = coalition.len();

    let mut unknown_names = vec!["s".to_owned()];
    unknown_names.extend((1..t1).map(|k| format!("a_{{1,{k}}}")));
    unknown_names.extend((1..=d2).map(|k| format!("a_{{2,{k}}}")));
    let param_names = coalition.iter().map(|i| format!("s_{i}")).collect();

    let powers = |x: &FieldElement, count: usize| -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(count);
        let mut acc = x.clone();
        for _ in 0..count {
            out.push(acc.clone());
            acc = &acc * x;
        }
        out
    };

    let mut a_rows = Vec::with_capacity(n1 + q);
    let mut b_rows = Vec::with_capacity(n1 + q);
    for x in &abscissae[..n1] {
        let mut row = vec![ctx.zero()];
        row.extend(powers(x, t1 - 1).iter().map(|v| -v));
        row.extend(powers(x, d2));
        a_rows.push(row);
        b_rows.push(vec![ctx.zero(); q]);
    }
    for (k, &i) in coalition.iter().enumerate() {
        let x = &abscissae[i - 1];
        let mut row = vec![ctx.one()];
        row.extend(std::iter::repeat_n(ctx.zero(), t1 - 1));
        row.extend(powers(x, d2));
        a_rows.push(row);
        let mut brow = vec![ctx.zero(); q];
        brow[k] = ctx.one();
        b_rows.push(brow);
    }
    Ok(GpnSystem {
        a: Matrix::new(ctx, cols, a_rows)?,
        b: Matrix::new(ctx, q, b_rows)?,
        unknown_names,
        param_names,
        coalition: coalition.to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SecretVerdict {
    /// `s = sum c_k s_k` over the coalition shares.
    Determined(Vec<FieldElement>),
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackReport {
    pub system: GpnSystem,
    pub solution: ParametricSolution,
    pub verdict: SecretVerdict,
}

impl AttackReport {
    /// Consistency relations among the coalition shares, each solved for its
    /// last share: `(share index, coefficients over the earlier shares)`.
    pub fn share_relations(&self) -> Vec<(usize, Vec<FieldElement>)> {
        (0..self.solution.consistency_relations().len())
            .filter_map(|r| self.solution.solved_relation(r))
            .map(|(k, c)| (self.system.coalition[k], c))
            .collect()
    }

    /// Evaluates a determined secret on concrete shares (ordered like the coalition).
    pub fn secret_from_shares(&self, shares: &[FieldElement]) -> Option<FieldElement> {
        match &self.verdict {
            SecretVerdict::Determined(c) if c.len() == shares.len() => {
                let ctx = self.solution.ctx();
                Some(c.iter().zip(shares).fold(ctx.zero(), |acc, (c, s)| &acc + &(c * s)))
            }
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let sys = &self.system;
        let _ = writeln!(out, "coalition: {{{}}}", sys.coalition.iter().map(|i| format!("P_{i}")).collect::<Vec<_>>().join(", "));
        let _ = writeln!(out, "unknowns:  [{}]", sys.unknown_names.join(", "));
        let _ = writeln!(out, "system (A | B) over F_{}:", self.solution.ctx().modulus());
        for r in 0..sys.a.nrows() {
            let a: Vec<String> = sys.a.row(r).iter().map(|e| format!("{e:>3}")).collect();
            let b: Vec<String> = sys.b.row(r).iter().map(|e| format!("{e:>3}")).collect();
            let _ = writeln!(out, "  [{} | {}]", a.join(" "), b.join(" "));
        }
        let _ = writeln!(out, "general solution:");
        for u in 0..self.solution.rows().len() {
            let _ = writeln!(out, "  {}", self.solution.render_row(u));
        }
        if self.solution.consistency_relations().is_empty() {
            let _ = writeln!(out, "share relations: none");
        } else {
            let _ = writeln!(out, "share relations:");
            for r in 0..self.solution.consistency_relations().len() {
                let _ = writeln!(out, "  {}", self.solution.render_relation(r));
            }
        }
        let s = self.solution.unknown_index("s").expect("secret column");
        match &self.verdict {
            SecretVerdict::Determined(_) => {
                let _ = writeln!(out, "verdict: secret DETERMINED, {}", self.solution.render_row(s));
            }
            SecretVerdict::Free => {
                let _ = writeln!(out, "verdict: secret FREE, the coalition cannot pin s");
            }
        }
        out
    }
}

/// Solves the system with the secret column tried last as a pivot, so that
/// an undetermined secret shows up as the free unknown and the other
/// unknowns are expressed through it.
pub fn gpn_analyze(system: &GpnSystem) -> Result<AttackReport, GpnError> {
    let u = system.a.ncols();
    let order: Vec<usize> = (1..u).chain(std::iter::once(0)).collect();
    let solution = solve_parametric_ordered(&system.a, &system.b, &order)?
        .with_names(system.unknown_names.clone(), system.param_names.clone())?;
    let verdict = if solution.is_pinned(0) {
        SecretVerdict::Determined(solution.param_coeffs(0).expect("pinned rows are determined").to_vec())
    } else {
        SecretVerdict::Free
    };
    Ok(AttackReport { system: system.clone(), solution, verdict })
}

/// Worked-example setting: `n_1 = 3`, `n_2 = 4`, `t_1 = 2`, `t_2 = 3` over `F_71`.
pub struct GpnExample {
    pub abscissae: [u64; 7],
    pub coalition: &'static [usize],
}

pub const EXAMPLE_1: GpnExample = GpnExample { abscissae: [1, 2, 3, 4, 7, 8, 9], coalition: &[4, 5, 6] };
pub const EXAMPLE_2: GpnExample = GpnExample { abscissae: [1, 2, 3, 7, 35, 9, 10], coalition: &[4, 5] };

impl GpnExample {
    pub fn params(&self) -> GpnParams {
        let ctx = FieldCtx::from_u64(71).expect("71 is prime");
        GpnParams::from_u64(&ctx, 3, 4, 2, 3, &self.abscissae).expect("example parameters are valid")
    }

    pub fn system(&self) -> GpnSystem {
        let p = self.params();
        gpn_attack_system(&p.ctx, &p.abscissae, p.n1, p.t1, p.t2, self.coalition).expect("example system is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn example_one_matrix() {
        let sys = EXAMPLE_1.system();
        let ctx = sys.a.ctx().clone();
        let printed: Vec<Vec<i64>> = vec![
            vec![0, -1, 1, 1, 1, 1],
            vec![0, -2, 2, 4, 8, 16],
            vec![0, -3, 3, 9, 27, 81],
            vec![1, 0, 4, 16, 64, 256],
            vec![1, 0, 7, 49, 343, 2401],
            vec![1, 0, 8, 64, 512, 4096],
        ];
        assert_eq!(sys.a, Matrix::from_i64(&ctx, 6, &printed).unwrap());
        let b: Vec<Vec<i64>> = vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(sys.b, Matrix::from_i64(&ctx, 3, &b).unwrap());
        assert_eq!(sys.unknown_names, ["s", "a_{1,1}", "a_{2,1}", "a_{2,2}", "a_{2,3}", "a_{2,4}"]);
    }

    #[test]
    fn example_two_matrix() {
        let sys = EXAMPLE_2.system();
        let ctx = sys.a.ctx().clone();
        let printed: Vec<Vec<i64>> = vec![
            vec![0, -1, 1, 1, 1, 1],
            vec![0, -2, 2, 4, 8, 16],
            vec![0, -3, 3, 9, 27, 81],
            vec![1, 0, 7, 49, 343, 2401],
            vec![1, 0, 35, 1225, 42875, 1500625],
        ];
        assert_eq!(sys.a, Matrix::from_i64(&ctx, 6, &printed).unwrap());
        assert_eq!((sys.a.nrows(), sys.a.ncols()), (5, 6));
    }

    #[test]
    fn empty_coalition_keeps_matching_rows() {
        let p = EXAMPLE_1.params();
        let sys = gpn_attack_system(&p.ctx, &p.abscissae, 3, 2, 3, &[]).unwrap();
        assert_eq!(sys.a.nrows(), 3);
        assert_eq!(sys.b.ncols(), 0);
        assert_eq!(gpn_analyze(&sys).unwrap().verdict, SecretVerdict::Free);
    }

    #[test]
    fn system_errors() {
        let p = EXAMPLE_1.params();
        assert_eq!(
            gpn_attack_system(&p.ctx, &p.abscissae, 3, 2, 3, &[8]),
            Err(GpnError::IndexOutOfRange { index: 8, n: 7 })
        );
        assert_eq!(gpn_attack_system(&p.ctx, &p.abscissae, 3, 2, 3, &[4, 4]), Err(GpnError::DuplicateIndex(4)));
        let ctx = p.ctx.clone();
        assert_eq!(
            GpnParams::from_u64(&ctx, 3, 4, 2, 3, &[1, 2, 3, 4, 7, 8, 0]),
            Err(GpnError::ZeroAbscissa(7))
        );
        assert_eq!(
            GpnParams::from_u64(&ctx, 3, 4, 2, 3, &[1, 2, 3, 4, 7, 8, 1]),
            Err(GpnError::DuplicateAbscissa(1, 7))
        );
        assert!(matches!(GpnParams::from_u64(&ctx, 3, 4, 3, 3, &[1, 2, 3, 4, 5, 6, 7]), Err(GpnError::InvalidParams(_))));
        let f7 = FieldCtx::from_u64(7).unwrap();
        assert!(matches!(GpnParams::from_u64(&f7, 3, 4, 2, 3, &[1, 2, 3, 4, 5, 6, 0]), Err(GpnError::InvalidParams(_))));
    }

    #[test]
    fn deal_shapes() {
        let params = EXAMPLE_2.params();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let secret = params.ctx.elem(33);
        let inst = gpn_deal(&params, &secret, &mut rng).unwrap();
        assert!(inst.f2.degree().unwrap() <= 4);
        assert!(inst.f1.degree().unwrap_or(0) < 2);
        assert_eq!(inst.f2.coeff(0), secret);
        for x in &params.abscissae[..3] {
            assert_eq!(inst.f1.eval(x).unwrap(), inst.f2.eval(x).unwrap());
        }
        // level-1 pair is plain Shamir
        let shares = inst.shares();
        let pts = vec![(params.abscissae[0].clone(), shares[0].clone()), (params.abscissae[2].clone(), shares[2].clone())];
        assert_eq!(crate::field::lagrange_eval(&pts, &params.ctx.zero()).unwrap(), secret);
    }

    #[test]
    fn zero_secret_constant_level_one() {
        let ctx = FieldCtx::from_u64(71).unwrap();
        let params = GpnParams::from_u64(&ctx, 2, 4, 1, 3, &[1, 2, 3, 4, 5, 6]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let inst = gpn_deal(&params, &ctx.zero(), &mut rng).unwrap();
        assert!(inst.shares()[..2].iter().all(FieldElement::is_zero));
    }

    #[test]
    fn render_uses_conventional_names() {
        let r = gpn_analyze(&EXAMPLE_1.system()).unwrap();
        let text = r.render();
        assert!(text.contains("a_{1,1} = 59s + 4s_4 + 8s_5"), "{text}");
        assert!(text.contains("s_6 = 47s_4 + 25s_5"));
        assert!(text.contains("FREE"));
        let r = gpn_analyze(&EXAMPLE_2.system()).unwrap();
        assert!(r.render().contains("s = 19s_4 + 53s_5"));
    }
}
