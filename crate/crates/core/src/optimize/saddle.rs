//! Escape from stationary points with negative curvature.
//!
//! BFGS stops wherever the gradient vanishes, including saddle points that
//! symmetric starting angles produce exactly. The lowest Hessian eigenpair
//! is estimated by Lanczos iteration on finite-difference Hessian-vector
//! products, and a step along that direction restarts the descent.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::effective::symmetric_eigen;
use crate::error::Result;

/// Curvature below this (Hartree/rad²) counts as a saddle.
pub const CURVATURE_TOLERANCE: f64 = 1e-5;

const LANCZOS_STEPS: usize = 24;
const HVP_STEP: f64 = 1e-3;
const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    pub value: f64,
    /// Unit vector.
    pub direction: Vec<f64>,
}

/// Lowest Ritz pair of the Hessian of `f` at `x`.
pub fn lowest_curvature<F>(f: &mut F, x: &[f64]) -> Result<Curvature>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let n = x.len();
    let x = DVector::from_column_slice(x);
    let mut hvp = |v: &DVector<f64>| -> Result<DVector<f64>> {
        let (_, gp) = f((&x + v * HVP_STEP).as_slice())?;
        let (_, gm) = f((&x - v * HVP_STEP).as_slice())?;
        Ok((DVector::from_vec(gp) - DVector::from_vec(gm)) / (2.0 * HVP_STEP))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut q = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    q /= q.norm();
    let steps = LANCZOS_STEPS.min(n);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut w = hvp(&q)?;
        let a = w.dot(&q);
        // Full reorthogonalization against all previous vectors.
        for b in basis.iter().chain(std::iter::once(&q)) {
            let p = w.dot(b);
            w -= b * p;
        }
        alpha.push(a);
        basis.push(q.clone());
        let nb = w.norm();
        if nb < 1e-10 {
            break;
        }
        beta.push(nb);
        q = w / nb;
    }
    let k = basis.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j || j + 1 == i {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    let eig = symmetric_eigen(&t)?;
    let y = eig.eigenvectors.column(0);
    let mut d = DVector::zeros(n);
    for (i, b) in basis.iter().enumerate() {
        d += b * y[i];
    }
    d /= d.norm();
    Ok(Curvature {
        value: eig.eigenvalues[0],
        direction: d.iter().copied().collect(),
    })
}

/// Point along `±direction` from `x` that lowers `f` below `f0`, trying
/// step lengths 1, 1/2, …, 1/64 and keeping the better sign.
pub fn escape_step<F>(f: &mut F, x: &[f64], f0: f64, direction: &[f64]) -> Result<Option<Vec<f64>>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut alpha = 1.0;
    for _ in 0..7 {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for sign in [1.0, -1.0] {
            let y: Vec<f64> = x
                .iter()
                .zip(direction)
                .map(|(a, d)| a + sign * alpha * d)
                .collect();
            let (v, _) = f(&y)?;
            if v < f0 && best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, y));
            }
        }
        if let Some((_, y)) = best {
            return Ok(Some(y));
        }
        alpha *= 0.5;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    // f = x² - y² + y⁴ has a saddle at the origin and minima at y = ±1/√2.
    fn saddle(x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        Ok((
            a * a - b * b + b.powi(4),
            vec![2.0 * a, -2.0 * b + 4.0 * b.powi(3)],
        ))
    }

    #[test]
    fn finds_negative_direction() {
        let c = lowest_curvature(&mut saddle, &[0.0, 0.0]).unwrap();
        assert!((c.value + 2.0).abs() < 1e-5);
        assert!(c.direction[0].abs() < 1e-6);
        assert!((c.direction[1].abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn step_lowers_value() {
        let c = lowest_curvature(&mut saddle, &[0.0, 0.0]).unwrap();
        let y = escape_step(&mut saddle, &[0.0, 0.0], 0.0, &c.direction)
            .unwrap()
            .unwrap();
        assert!(saddle(&y).unwrap().0 < 0.0);
    }

    #[test]
    fn minimum_has_positive_curvature() {
        let c = lowest_curvature(&mut saddle, &[0.0, 0.5f64.sqrt()]).unwrap();
        assert!(c.value > 1.0);
    }
}
