//! Linear homogeneous recurrences whose auxiliary equation is `(x - alpha)^t`.
//!
//! Such a sequence satisfies `u_{i+t} + a_1 u_{i+t-1} + ... + a_t u_i = 0`
//! with `a_k = C(t,k) (-alpha)^k`, and has the general term
//! `u_i = g(i) alpha^i` for a polynomial `g` of degree `< t`.

use thiserror::Error;

use crate::field::{lagrange_interpolate, FieldCtx, FieldElement, FieldError, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LhrError {
    #[error("recurrence root alpha must be nonzero")]
    ZeroAlpha,
    #[error("recurrence order must be at least 1")]
    ZeroOrder,
    #[error("order {order} needs {order} initial values, got {got}")]
    InitialCount { order: usize, got: usize },
    #[error("order {0} is not below the field modulus")]
    OrderTooLarge(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LhrRelation {
    alpha: FieldElement,
    coeffs: Vec<FieldElement>,
    initial: Vec<FieldElement>,
}

/// `u_i = g(i) * alpha^i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedForm {
    pub g: Polynomial,
    pub alpha: FieldElement,
}

/// `a_1..a_t` of `(x - alpha)^t = x^t + a_1 x^{t-1} + ... + a_t`.
pub fn auxiliary_coeffs(alpha: &FieldElement, order: usize) -> Vec<FieldElement> {
    let ctx = alpha.ctx();
    let neg_alpha = -alpha;
    let mut out = Vec::with_capacity(order);
    // C(t,k) built incrementally in the field: C(t,k) = C(t,k-1) (t-k+1) / k.
    // Valid because order < p keeps every k invertible.
    let mut binom = ctx.one();
    let mut power = ctx.one();
    for k in 1..=order {
        binom = &(&binom * &ctx.elem((order - k + 1) as u64)) * &ctx.elem(k as u64).inverse().expect("k < p");
        power = &power * &neg_alpha;
        out.push(&binom * &power);
    }
    out
}

impl LhrRelation {
    pub fn from_alpha(alpha: FieldElement, order: usize, initial: Vec<FieldElement>) -> Result<Self, LhrError> {
        if alpha.is_zero() {
            return Err(LhrError::ZeroAlpha);
        }
        if order == 0 {
            return Err(LhrError::ZeroOrder);
        }
        if initial.len() != order {
            return Err(LhrError::InitialCount { order, got: initial.len() });
        }
        let ctx = alpha.ctx().clone();
        if ctx.modulus_u64().is_some_and(|p| order as u64 >= p) {
            return Err(LhrError::OrderTooLarge(order));
        }
        for u in &initial {
            ctx.check(u.ctx())?;
        }
        let coeffs = auxiliary_coeffs(&alpha, order);
        Ok(LhrRelation { alpha, coeffs, initial })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.alpha.ctx()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn initial(&self) -> &[FieldElement] {
        &self.initial
    }

    /// `u_{i+t} = -(a_1 u_{i+t-1} + ... + a_t u_i)` applied to the last `t` terms.
    fn step(&self, window: &[FieldElement]) -> FieldElement {
        let t = self.order();
        let acc = self
            .coeffs
            .iter()
            .enumerate()
            .fold(self.ctx().zero(), |acc, (k, a)| &acc + &(a * &window[t - 1 - k]));
        -&acc
    }

    /// Terms `u_0..u_{count-1}` by iteration.
    pub fn terms(&self, count: usize) -> Vec<FieldElement> {
        let t = self.order();
        let mut out: Vec<FieldElement> = self.initial.iter().take(count).cloned().collect();
        while out.len() < count {
            let next = self.step(&out[out.len() - t..]);
            out.push(next);
        }
        out
    }

    /// `u_i` by iterating the recurrence, keeping only a sliding window.
    pub fn term(&self, i: usize) -> FieldElement {
        let t = self.order();
        if i < t {
            return self.initial[i].clone();
        }
        let mut window = self.initial.clone();
        for _ in t..=i {
            let next = self.step(&window);
            window.remove(0);
            window.push(next);
        }
        window.pop().expect("order >= 1")
    }

    /// Interpolates `g` through `(i, u_i alpha^{-i})` for `i < t`.
    pub fn closed_form(&self) -> ClosedForm {
        let ctx = self.ctx();
        let alpha_inv = self.alpha.inverse().expect("alpha is nonzero");
        let mut scale = ctx.one();
        let mut points = Vec::with_capacity(self.order());
        for (i, u) in self.initial.iter().enumerate() {
            points.push((ctx.elem(i as u64), u * &scale));
            scale = &scale * &alpha_inv;
        }
        let g = lagrange_interpolate(&points).expect("abscissae 0..t are distinct because t < p");
        ClosedForm { g, alpha: self.alpha.clone() }
    }
}

impl ClosedForm {
    pub fn term(&self, i: usize) -> FieldElement {
        &self.g.eval_u64(i as u64) * &self.alpha.pow(i as u64)
    }
}
