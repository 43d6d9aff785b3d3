use super::{FieldCtx, FieldElement, FieldError};

/// Dense polynomial over `F_p`; `coeffs[k]` is the coefficient of `x^k`.
/// Trailing zero coefficients are stripped, so the zero polynomial has no
/// coefficients and no degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    ctx: FieldCtx,
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(ctx: &FieldCtx, coeffs: Vec<FieldElement>) -> Result<Self, FieldError> {
        for c in &coeffs {
            ctx.check(c.ctx())?;
        }
        Ok(Self::from_coeffs_unchecked(ctx, coeffs))
    }

    pub(crate) fn from_coeffs_unchecked(ctx: &FieldCtx, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        Polynomial { ctx: ctx.clone(), coeffs }
    }

    pub fn zero(ctx: &FieldCtx) -> Self {
        Polynomial { ctx: ctx.clone(), coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        let ctx = c.ctx().clone();
        Self::from_coeffs_unchecked(&ctx, vec![c])
    }

    /// Uniform polynomial of degree `< len` with the given constant term.
    pub fn random_with_constant<R: rand::RngCore + ?Sized>(
        constant: FieldElement,
        len: usize,
        rng: &mut R,
    ) -> Result<Self, FieldError> {
        let ctx = constant.ctx().clone();
        let mut coeffs = Vec::with_capacity(len.max(1));
        coeffs.push(constant);
        for _ in 1..len {
            coeffs.push(ctx.random(rng)?);
        }
        Ok(Self::from_coeffs_unchecked(&ctx, coeffs))
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        self.ctx.check(x.ctx())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &FieldElement) -> FieldElement {
        self.coeffs.iter().rev().fold(self.ctx.zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn eval_u64(&self, x: u64) -> FieldElement {
        self.eval_unchecked(&self.ctx.elem(x))
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, FieldError> {
        self.ctx.check(&other.ctx)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        Ok(Self::from_coeffs_unchecked(&self.ctx, coeffs))
    }
}

fn check_points(points: &[(FieldElement, FieldElement)]) -> Result<FieldCtx, FieldError> {
    let ctx = points.first().ok_or(FieldError::NoPoints)?.0.ctx().clone();
    for (i, (x, y)) in points.iter().enumerate() {
        ctx.check(x.ctx())?;
        ctx.check(y.ctx())?;
        if points[..i].iter().any(|(x2, _)| x2 == x) {
            return Err(FieldError::DuplicateAbscissa(x.to_string()));
        }
    }
    Ok(ctx)
}

/// The unique polynomial of degree `< points.len()` through `points`.
pub fn lagrange_interpolate(points: &[(FieldElement, FieldElement)]) -> Result<Polynomial, FieldError> {
    let ctx = check_points(points)?;
    let k = points.len();

    // master(x) = prod (x - x_j), coefficients low to high
    let mut master = vec![ctx.one()];
    for (xj, _) in points {
        let mut next = vec![ctx.zero(); master.len() + 1];
        for (d, c) in master.iter().enumerate() {
            next[d + 1] = &next[d + 1] + c;
            next[d] = &next[d] - &(c * xj);
        }
        master = next;
    }

    let mut acc = vec![ctx.zero(); k];
    for (i, (xi, yi)) in points.iter().enumerate() {
        // basis numerator master(x) / (x - x_i) by synthetic division
        let mut quot = vec![ctx.zero(); k];
        let mut carry = ctx.zero();
        for d in (0..k).rev() {
            carry = &master[d + 1] + &(&carry * xi);
            quot[d] = carry.clone();
        }
        let denom = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(ctx.one(), |acc, (_, (xj, _))| &acc * &(xi - xj));
        let scale = yi * &denom.inverse()?;
        for (a, q) in acc.iter_mut().zip(&quot) {
            *a = &*a + &(q * &scale);
        }
    }
    Ok(Polynomial::from_coeffs_unchecked(&ctx, acc))
}

/// Evaluates the interpolating polynomial of `points` at `x` without
/// materializing it.
pub fn lagrange_eval(points: &[(FieldElement, FieldElement)], x: &FieldElement) -> Result<FieldElement, FieldError> {
    let ctx = check_points(points)?;
    ctx.check(x.ctx())?;
    let mut sum = ctx.zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut num = ctx.one();
        let mut den = ctx.one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                num = &num * &(x - xj);
                den = &den * &(xi - xj);
            }
        }
        sum = &sum + &(&(yi * &num) * &den.inverse()?);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::from_u64(p).unwrap()
    }

    fn pts(ctx: &FieldCtx, v: &[(u64, u64)]) -> Vec<(FieldElement, FieldElement)> {
        v.iter().map(|&(x, y)| (ctx.elem(x), ctx.elem(y))).collect()
    }

    #[test]
    fn eval_examples() {
        let f7 = f(7);
        assert_eq!(Polynomial::zero(&f7).eval(&f7.elem(3)).unwrap(), f7.zero());
        let p = Polynomial::new(&f7, vec![f7.elem(1), f7.elem(2)]).unwrap();
        assert_eq!(p.eval(&f7.elem(2)).unwrap(), f7.elem(5));
        let f5 = f(5);
        let sq = Polynomial::new(&f5, vec![f5.zero(), f5.zero(), f5.one()]).unwrap();
        assert_eq!(sq.eval(&f5.elem(3)).unwrap(), f5.elem(4));
        assert_eq!(p.eval(&f5.elem(1)), Err(FieldError::ModulusMismatch));
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let f7 = f(7);
        let z = Polynomial::new(&f7, vec![f7.zero(), f7.zero()]).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        let through_zeros = lagrange_interpolate(&pts(&f7, &[(1, 0), (2, 0), (3, 0)])).unwrap();
        assert_eq!(through_zeros.degree(), None);
    }

    #[test]
    fn interpolation_single_point_is_constant() {
        let f7 = f(7);
        let p = lagrange_interpolate(&pts(&f7, &[(1, 5)])).unwrap();
        assert_eq!(p, Polynomial::constant(f7.elem(5)));
    }

    #[test]
    fn interpolation_line_matches_enumeration() {
        let f7 = f(7);
        let points = pts(&f7, &[(1, 3), (2, 5)]);
        // oracle: scan all 49 linear polynomials b + a x
        let mut hits = Vec::new();
        for a in 0..7u64 {
            for b in 0..7u64 {
                if (b + a) % 7 == 3 && (b + 2 * a) % 7 == 5 {
                    hits.push((b, a));
                }
            }
        }
        assert_eq!(hits, vec![(1, 2)]);
        let p = lagrange_interpolate(&points).unwrap();
        assert_eq!(p.coeffs(), &[f7.elem(1), f7.elem(2)]);
    }

    #[test]
    fn interpolation_errors() {
        let f7 = f(7);
        assert_eq!(lagrange_interpolate(&[]), Err(FieldError::NoPoints));
        assert!(matches!(
            lagrange_interpolate(&pts(&f7, &[(1, 3), (1, 4)])),
            Err(FieldError::DuplicateAbscissa(_))
        ));
        let f11 = f(11);
        let mixed = vec![(f7.elem(1), f7.elem(1)), (f11.elem(2), f11.elem(2))];
        assert_eq!(lagrange_interpolate(&mixed), Err(FieldError::ModulusMismatch));
    }

    #[test]
    fn lagrange_eval_agrees_with_interpolation() {
        let f71 = f(71);
        let points = pts(&f71, &[(0, 9), (3, 40), (5, 2), (70, 33)]);
        let p = lagrange_interpolate(&points).unwrap();
        for x in 0..71 {
            let x = f71.elem(x);
            assert_eq!(lagrange_eval(&points, &x).unwrap(), p.eval(&x).unwrap());
        }
    }
}
