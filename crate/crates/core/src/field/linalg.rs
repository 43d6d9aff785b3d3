use std::fmt::Write as _;

use super::{FieldCtx, FieldElement, FieldError};

/// Row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    ctx: FieldCtx,
    cols: usize,
    rows: Vec<Vec<FieldElement>>,
}

impl Matrix {
    /// `cols` is needed so that matrices with zero rows still know their width.
    pub fn new(ctx: &FieldCtx, cols: usize, rows: Vec<Vec<FieldElement>>) -> Result<Self, FieldError> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(FieldError::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for e in row {
                ctx.check(e.ctx())?;
            }
        }
        Ok(Matrix { ctx: ctx.clone(), cols, rows })
    }

    pub fn from_i64(ctx: &FieldCtx, cols: usize, rows: &[Vec<i64>]) -> Result<Self, FieldError> {
        let rows = rows.iter().map(|r| r.iter().map(|&v| ctx.elem_i64(v)).collect()).collect();
        Self::new(ctx, cols, rows)
    }

    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { ctx.one() } else { ctx.zero() }).collect())
            .collect();
        Matrix { ctx: ctx.clone(), cols: n, rows }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.rows[r][c]
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().zip(v).fold(self.ctx.zero(), |acc, (a, b)| &acc + &(a * b)))
            .collect())
    }
}

/// A linear form over `params ++ free unknowns`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearExpr {
    pub coeffs: Vec<FieldElement>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UnknownRow {
    Determined(LinearExpr),
    Free,
}

/// General solution of `A x = B y` with `y` symbolic.
///
/// Each determined unknown is a linear form whose first `q` coefficients
/// multiply the parameters and whose remaining coefficients multiply the free
/// unknowns, in declaration order. Each consistency relation is a vector `c`
/// over the parameters with `sum c_k y_k = 0` required for solvability.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParametricSolution {
    ctx: FieldCtx,
    unknown_names: Vec<String>,
    param_names: Vec<String>,
    free_unknowns: Vec<usize>,
    rows: Vec<UnknownRow>,
    consistency_relations: Vec<Vec<FieldElement>>,
}

impl ParametricSolution {
    /// Replaces the default `x_i` / `y_k` labels.
    pub fn with_names(mut self, unknowns: Vec<String>, params: Vec<String>) -> Result<Self, FieldError> {
        if unknowns.len() != self.unknown_names.len() || params.len() != self.param_names.len() {
            return Err(FieldError::DimensionMismatch("label count".into()));
        }
        self.unknown_names = unknowns;
        self.param_names = params;
        Ok(self)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn unknown_names(&self) -> &[String] {
        &self.unknown_names
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn free_unknowns(&self) -> &[usize] {
        &self.free_unknowns
    }

    pub fn rows(&self) -> &[UnknownRow] {
        &self.rows
    }

    pub fn row(&self, unknown: usize) -> &UnknownRow {
        &self.rows[unknown]
    }

    pub fn consistency_relations(&self) -> &[Vec<FieldElement>] {
        &self.consistency_relations
    }

    pub fn unknown_index(&self, name: &str) -> Option<usize> {
        self.unknown_names.iter().position(|n| n == name)
    }

    pub fn is_free(&self, unknown: usize) -> bool {
        matches!(self.rows[unknown], UnknownRow::Free)
    }

    /// Parameter part of a determined row.
    pub fn param_coeffs(&self, unknown: usize) -> Option<&[FieldElement]> {
        match &self.rows[unknown] {
            UnknownRow::Determined(e) => Some(&e.coeffs[..self.param_names.len()]),
            UnknownRow::Free => None,
        }
    }

    /// Free-unknown part of a determined row.
    pub fn free_coeffs(&self, unknown: usize) -> Option<&[FieldElement]> {
        match &self.rows[unknown] {
            UnknownRow::Determined(e) => Some(&e.coeffs[self.param_names.len()..]),
            UnknownRow::Free => None,
        }
    }

    /// True iff the unknown is determined and independent of every free unknown.
    pub fn is_pinned(&self, unknown: usize) -> bool {
        self.free_coeffs(unknown).is_some_and(|c| c.iter().all(FieldElement::is_zero))
    }

    pub fn relations_hold(&self, params: &[FieldElement]) -> bool {
        self.consistency_relations
            .iter()
            .all(|rel| rel.iter().zip(params).fold(self.ctx.zero(), |acc, (c, y)| &acc + &(c * y)).is_zero())
    }

    /// Full assignment of the unknowns for given parameter and free values.
    pub fn evaluate(&self, params: &[FieldElement], free: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
        if params.len() != self.param_names.len() || free.len() != self.free_unknowns.len() {
            return Err(FieldError::DimensionMismatch("assignment length".into()));
        }
        let symbols: Vec<&FieldElement> = params.iter().chain(free).collect();
        let mut out = Vec::with_capacity(self.rows.len());
        for (u, row) in self.rows.iter().enumerate() {
            out.push(match row {
                UnknownRow::Determined(e) => {
                    e.coeffs.iter().zip(&symbols).fold(self.ctx.zero(), |acc, (c, s)| &acc + &(c * s))
                }
                UnknownRow::Free => {
                    let k = self.free_unknowns.iter().position(|&f| f == u).expect("free unknown is listed");
                    free[k].clone()
                }
            });
        }
        Ok(out)
    }

    /// `"name = 59s + 4s_4 + 8s_5"`, free unknowns first, then parameters.
    pub fn render_row(&self, unknown: usize) -> String {
        let name = &self.unknown_names[unknown];
        match &self.rows[unknown] {
            UnknownRow::Free => format!("{name} is free"),
            UnknownRow::Determined(e) => {
                let q = self.param_names.len();
                let mut terms: Vec<(&FieldElement, &str)> = Vec::new();
                for (k, &f) in self.free_unknowns.iter().enumerate() {
                    terms.push((&e.coeffs[q + k], &self.unknown_names[f]));
                }
                for (k, p) in self.param_names.iter().enumerate() {
                    terms.push((&e.coeffs[k], p));
                }
                format!("{name} = {}", render_terms(&terms))
            }
        }
    }

    /// Renders a relation solved for its last parameter:
    /// `"s_6 = 47s_4 + 25s_5"`.
    pub fn render_relation(&self, idx: usize) -> String {
        let rel = &self.consistency_relations[idx];
        let Some(last) = rel.iter().rposition(|c| !c.is_zero()) else {
            return "0 = 0".into();
        };
        let inv = rel[last].inverse().expect("nonzero");
        let neg_inv = -&inv;
        let scaled: Vec<FieldElement> = rel[..last].iter().map(|c| c * &neg_inv).collect();
        let terms: Vec<(&FieldElement, &str)> =
            scaled.iter().zip(&self.param_names).map(|(c, n)| (c, n.as_str())).collect();
        format!("{} = {}", self.param_names[last], render_terms(&terms))
    }

    /// The relation solved for its last nonzero parameter, as
    /// `(that parameter, coefficients over the parameters before it)`.
    pub fn solved_relation(&self, idx: usize) -> Option<(usize, Vec<FieldElement>)> {
        let rel = &self.consistency_relations[idx];
        let last = rel.iter().rposition(|c| !c.is_zero())?;
        let neg_inv = -&rel[last].inverse().ok()?;
        Some((last, rel[..last].iter().map(|c| c * &neg_inv).collect()))
    }

    /// Multi-line dump: one line per unknown then one per relation.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for u in 0..self.rows.len() {
            let _ = writeln!(out, "{}", self.render_row(u));
        }
        for r in 0..self.consistency_relations.len() {
            let _ = writeln!(out, "requires {}", self.render_relation(r));
        }
        out
    }
}

fn render_terms(terms: &[(&FieldElement, &str)]) -> String {
    let parts: Vec<String> = terms
        .iter()
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| if c.to_u64() == Some(1) { (*n).to_owned() } else { format!("{c}{n}") })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Solves `A x = B y` with pivot columns tried left to right.
pub fn solve_parametric(a: &Matrix, b: &Matrix) -> Result<ParametricSolution, FieldError> {
    let order: Vec<usize> = (0..a.ncols()).collect();
    solve_parametric_ordered(a, b, &order)
}

/// Solves `A x = B y`, trying pivot columns in `pivot_order` (a permutation
/// of the unknowns). Within a column the topmost remaining row with a
/// nonzero entry is the pivot, and the reduction is carried to reduced row
/// echelon form so that each pivot unknown depends only on parameters and
/// non-pivot (free) unknowns.
pub fn solve_parametric_ordered(
    a: &Matrix,
    b: &Matrix,
    pivot_order: &[usize],
) -> Result<ParametricSolution, FieldError> {
    a.ctx.check(&b.ctx)?;
    if a.nrows() != b.nrows() {
        return Err(FieldError::DimensionMismatch(format!(
            "A has {} rows, B has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let u = a.ncols();
    let q = b.ncols();
    let mut sorted = pivot_order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..u).collect::<Vec<_>>() {
        return Err(FieldError::DimensionMismatch("pivot order is not a permutation of the unknowns".into()));
    }
    let ctx = a.ctx.clone();

    let mut m: Vec<Vec<FieldElement>> =
        a.rows.iter().zip(&b.rows).map(|(ra, rb)| ra.iter().chain(rb).cloned().collect()).collect();
    let r = m.len();
    let mut pivot_row_of = vec![None; u];
    let mut next = 0;
    for &c in pivot_order {
        let Some(pr) = (next..r).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(next, pr);
        let inv = m[next][c].inverse()?;
        for e in m[next].iter_mut() {
            *e = &*e * &inv;
        }
        let pivot = m[next].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == next || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (e, pe) in row.iter_mut().zip(&pivot) {
                *e = &*e - &(&factor * pe);
            }
        }
        pivot_row_of[c] = Some(next);
        next += 1;
    }

    let free_unknowns: Vec<usize> = (0..u).filter(|&c| pivot_row_of[c].is_none()).collect();
    let rows = (0..u)
        .map(|c| match pivot_row_of[c] {
            None => UnknownRow::Free,
            Some(pr) => {
                let row = &m[pr];
                let mut coeffs: Vec<FieldElement> = row[u..].to_vec();
                coeffs.extend(free_unknowns.iter().map(|&f| -&row[f]));
                UnknownRow::Determined(LinearExpr { coeffs })
            }
        })
        .collect();
    let consistency_relations = m[next..]
        .iter()
        .filter(|row| row[u..].iter().any(|e| !e.is_zero()))
        .map(|row| row[u..].to_vec())
        .collect();

    Ok(ParametricSolution {
        ctx,
        unknown_names: (1..=u).map(|i| format!("x_{i}")).collect(),
        param_names: (1..=q).map(|k| format!("y_{k}")).collect(),
        free_unknowns,
        rows,
        consistency_relations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f71() -> FieldCtx {
        FieldCtx::from_u64(71).unwrap()
    }

    fn gpn_rows(level1: &[i64], coalition: &[i64]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let q = coalition.len();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for &x in level1 {
            a.push(vec![0, -x, x, x * x, x.pow(3), x.pow(4)]);
            b.push(vec![0; q]);
        }
        for (k, &x) in coalition.iter().enumerate() {
            a.push(vec![1, 0, x, x * x, x.pow(3), x.pow(4)]);
            let mut row = vec![0; q];
            row[k] = 1;
            b.push(row);
        }
        (a, b)
    }

    fn expect_row(sol: &ParametricSolution, u: usize, params: &[u64], free: &[u64]) {
        let ctx = sol.ctx().clone();
        let want: Vec<FieldElement> = params.iter().chain(free).map(|&v| ctx.elem(v)).collect();
        match sol.row(u) {
            UnknownRow::Determined(e) => assert_eq!(e.coeffs, want, "{}", sol.render_row(u)),
            UnknownRow::Free => panic!("unknown {u} unexpectedly free"),
        }
    }

    #[test]
    fn identity_system() {
        let ctx = f71();
        let a = Matrix::identity(&ctx, 3);
        let b = Matrix::from_i64(&ctx, 2, &[vec![1, 2], vec![3, 4], vec![5, -1]]).unwrap();
        let sol = solve_parametric(&a, &b).unwrap();
        assert!(sol.free_unknowns().is_empty());
        assert!(sol.consistency_relations().is_empty());
        for i in 0..3 {
            assert_eq!(sol.param_coeffs(i).unwrap(), b.row(i));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let ctx = f71();
        let a = Matrix::identity(&ctx, 3);
        let b = Matrix::identity(&ctx, 2);
        assert!(matches!(solve_parametric(&a, &b), Err(FieldError::DimensionMismatch(_))));
        assert!(matches!(
            Matrix::from_i64(&ctx, 2, &[vec![1, 2], vec![3]]),
            Err(FieldError::DimensionMismatch(_))
        ));
        let b = Matrix::identity(&ctx, 3);
        assert!(solve_parametric_ordered(&a, &b, &[0, 0, 1]).is_err());
    }

    #[test]
    fn gpn_example_one_secret_last() {
        let ctx = f71();
        let (a, b) = gpn_rows(&[1, 2, 3], &[4, 7, 8]);
        let a = Matrix::from_i64(&ctx, 6, &a).unwrap();
        let b = Matrix::from_i64(&ctx, 3, &b).unwrap();
        let sol = solve_parametric_ordered(&a, &b, &[1, 2, 3, 4, 5, 0]).unwrap();
        assert!(sol.is_free(0));
        assert_eq!(sol.free_unknowns(), &[0]);
        expect_row(&sol, 1, &[4, 8, 0], &[59]);
        expect_row(&sol, 2, &[61, 16, 0], &[65]);
        expect_row(&sol, 3, &[2, 9, 0], &[60]);
        expect_row(&sol, 4, &[57, 8, 0], &[6]);
        expect_row(&sol, 5, &[26, 46, 0], &[70]);
        assert_eq!(sol.consistency_relations().len(), 1);
        let (solved_for, coeffs) = sol.solved_relation(0).unwrap();
        assert_eq!(solved_for, 2);
        assert_eq!(coeffs, vec![ctx.elem(47), ctx.elem(25)]);
    }

    #[test]
    fn gpn_example_two() {
        let ctx = f71();
        let (a, b) = gpn_rows(&[1, 2, 3], &[7, 35]);
        let a = Matrix::from_i64(&ctx, 6, &a).unwrap();
        let b = Matrix::from_i64(&ctx, 2, &b).unwrap();
        for order in [vec![0, 1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5, 0]] {
            let sol = solve_parametric_ordered(&a, &b, &order).unwrap();
            assert_eq!(sol.free_unknowns(), &[5]);
            expect_row(&sol, 0, &[19, 53], &[0]);
            expect_row(&sol, 1, &[38, 33], &[22]);
            expect_row(&sol, 2, &[38, 33], &[16]);
            expect_row(&sol, 3, &[0, 0], &[11]);
            expect_row(&sol, 4, &[0, 0], &[65]);
            assert!(sol.consistency_relations().is_empty());
            assert!(sol.is_pinned(0));
        }
    }

    #[test]
    fn rendering() {
        let ctx = f71();
        let (a, b) = gpn_rows(&[1, 2, 3], &[4, 7, 8]);
        let a = Matrix::from_i64(&ctx, 6, &a).unwrap();
        let b = Matrix::from_i64(&ctx, 3, &b).unwrap();
        let names = ["s", "a_{1,1}", "a_{2,1}", "a_{2,2}", "a_{2,3}", "a_{2,4}"];
        let sol = solve_parametric_ordered(&a, &b, &[1, 2, 3, 4, 5, 0])
            .unwrap()
            .with_names(names.iter().map(|s| s.to_string()).collect(), vec!["s_4".into(), "s_5".into(), "s_6".into()])
            .unwrap();
        assert_eq!(sol.render_row(1), "a_{1,1} = 59s + 4s_4 + 8s_5");
        assert_eq!(sol.render_row(0), "s is free");
        assert_eq!(sol.render_relation(0), "s_6 = 47s_4 + 25s_5");
    }

    #[test]
    fn inconsistent_zero_row_recorded() {
        let ctx = FieldCtx::from_u64(7).unwrap();
        // x1 + x2 = y1, 2x1 + 2x2 = y2 -> y2 - 2y1 = 0
        let a = Matrix::from_i64(&ctx, 2, &[vec![1, 1], vec![2, 2]]).unwrap();
        let b = Matrix::identity(&ctx, 2);
        let sol = solve_parametric(&a, &b).unwrap();
        assert_eq!(sol.free_unknowns(), &[1]);
        assert_eq!(sol.consistency_relations(), &[vec![ctx.elem(5), ctx.one()]]);
        assert!(sol.relations_hold(&[ctx.elem(3), ctx.elem(6)]));
        assert!(!sol.relations_hold(&[ctx.elem(3), ctx.elem(5)]));
    }
}
