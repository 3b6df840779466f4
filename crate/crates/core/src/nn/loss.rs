//! Vector-level Huber loss.
//!
//! Branch selection uses the L1 norm of the whole residual `r = x − x_r`:
//!
//! ```text
//! L = ½‖r‖₂²            if ‖r‖₁ ≤ δ
//! L = δ‖r‖₁ − ½δ²       otherwise
//! ```
//!
//! This is not the usual elementwise Huber. The two branches meet continuously only when
//! the residual has a single nonzero entry; for spread-out residuals the loss jumps at
//! `‖r‖₁ = δ` (the quadratic side is `½‖r‖₂² < ½δ²` there).

use crate::{Error, Result, Scalar};

fn check<T: Scalar>(x: &[T], x_r: &[T], delta: T) -> Result<()> {
    if x.len() != x_r.len() {
        return Err(Error::dims("huber reconstruction", x.len(), x_r.len()));
    }
    if !(delta > T::zero() && delta.is_finite()) {
        return Err(Error::invalid("huber delta must be positive and finite"));
    }
    Ok(())
}

fn l1<T: Scalar>(x: &[T], x_r: &[T]) -> T {
    x.iter().zip(x_r).map(|(&a, &b)| (a - b).abs()).sum()
}

pub(crate) fn quadratic_branch<T: Scalar>(residual: &[T]) -> T {
    T::lit(0.5) * residual.iter().map(|&r| r * r).sum::<T>()
}

pub(crate) fn linear_branch<T: Scalar>(residual: &[T], delta: T) -> T {
    let norm: T = residual.iter().map(|r| r.abs()).sum();
    delta * norm - T::lit(0.5) * delta * delta
}

pub fn huber_loss<T: Scalar>(x: &[T], x_r: &[T], delta: T) -> Result<T> {
    check(x, x_r, delta)?;
    let residual: Vec<T> = x.iter().zip(x_r).map(|(&a, &b)| a - b).collect();
    if l1(x, x_r) <= delta {
        Ok(quadratic_branch(&residual))
    } else {
        Ok(linear_branch(&residual, delta))
    }
}

/// `∂L/∂x_r`. The boundary `‖r‖₁ == δ` takes the quadratic branch.
pub fn huber_grad<T: Scalar>(x: &[T], x_r: &[T], delta: T) -> Result<Vec<T>> {
    check(x, x_r, delta)?;
    let quadratic = l1(x, x_r) <= delta;
    Ok(x.iter()
        .zip(x_r)
        .map(|(&a, &b)| {
            let r = a - b;
            if quadratic {
                -r
            } else if r > T::zero() {
                -delta
            } else if r < T::zero() {
                delta
            } else {
                T::zero()
            }
        })
        .collect())
}
