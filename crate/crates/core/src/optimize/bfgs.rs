//! BFGS on the inverse Hessian with a strong-Wolfe line search
//! (bracketing + zoom with safeguarded cubic interpolation).

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    /// Stop once `max_i |g_i| <= gtol`.
    pub gtol: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-6,
            max_iterations: 200,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Objective value after each accepted step.
    pub history: Vec<f64>,
}

fn inf_norm(g: &DVector<f64>) -> f64 {
    g.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>> Counted<F> {
    fn eval(&mut self, x: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        self.evaluations += 1;
        let (v, g) = (self.f)(x.as_slice())?;
        Ok((v, DVector::from_vec(g)))
    }
}

/// Minimizes `f`, which returns the value and gradient at a point.
pub fn minimize<F>(f: F, x0: &[f64], opts: &BfgsOptions) -> Result<BfgsReport>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let n = x0.len();
    let mut f = Counted { f, evaluations: 0 };
    let mut x = DVector::from_column_slice(x0);
    let (mut fx, mut g) = f.eval(&x)?;
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut history = Vec::new();
    let mut iterations = 0;

    while inf_norm(&g) > opts.gtol && iterations < opts.max_iterations {
        let mut p = -(&hinv * &g);
        let mut slope = p.dot(&g);
        if slope >= 0.0 {
            hinv = DMatrix::identity(n, n);
            fresh = true;
            p = -g.clone();
            slope = p.dot(&g);
        }
        let alpha0 = if fresh {
            (1.0 / inf_norm(&g)).min(1.0)
        } else {
            1.0
        };
        let step = line_search(&mut f, &x, fx, &p, slope, alpha0, opts)?;
        let Some((alpha, fnew, gnew)) = step else {
            if fresh {
                break;
            }
            // Discard curvature information and retry along -g.
            hinv = DMatrix::identity(n, n);
            fresh = true;
            continue;
        };
        let s = &p * alpha;
        let y = &gnew - &g;
        x += &s;
        fx = fnew;
        g = gnew;
        iterations += 1;
        history.push(fx);

        let sy = s.dot(&y);
        if sy > 1e-14 * s.norm() * y.norm() {
            if fresh {
                hinv *= sy / y.dot(&y);
            }
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            // H+ = H - ρ(H y sᵀ + s yᵀ H) + (ρ² yᵀHy + ρ) s sᵀ
            hinv -= (&hy * s.transpose() + &s * hy.transpose()) * rho;
            hinv += (&s * s.transpose()) * (rho * rho * yhy + rho);
            fresh = false;
        }
    }

    let gradient_norm = inf_norm(&g);
    Ok(BfgsReport {
        x: x.iter().copied().collect(),
        value: fx,
        gradient_norm,
        iterations,
        evaluations: f.evaluations,
        converged: gradient_norm <= opts.gtol,
        history,
    })
}

type Trial = (f64, f64, DVector<f64>);

fn line_search<F>(
    f: &mut Counted<F>,
    x: &DVector<f64>,
    f0: f64,
    p: &DVector<f64>,
    slope0: f64,
    alpha0: f64,
    opts: &BfgsOptions,
) -> Result<Option<(f64, f64, DVector<f64>)>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut eval = |a: f64| -> Result<Trial> {
        let (v, g) = f.eval(&(x + p * a))?;
        let d = g.dot(p);
        Ok((v, d, g))
    };
    let (c1, c2) = (opts.c1, opts.c2);
    let mut prev = (0.0, f0, slope0);
    let mut alpha = alpha0;
    for i in 0..opts.max_line_search {
        let (fa, da, ga) = eval(alpha)?;
        if !fa.is_finite() {
            alpha = 0.5 * (prev.0 + alpha);
            continue;
        }
        if fa > f0 + c1 * alpha * slope0 || (i > 0 && fa >= prev.1) {
            return zoom(&mut eval, prev, (alpha, fa, da), f0, slope0, opts);
        }
        if da.abs() <= -c2 * slope0 {
            return Ok(Some((alpha, fa, ga)));
        }
        if da >= 0.0 {
            return zoom(&mut eval, (alpha, fa, da), prev, f0, slope0, opts);
        }
        prev = (alpha, fa, da);
        alpha *= 2.0;
    }
    Ok(None)
}

/// `lo` satisfies sufficient decrease and has the lower value; the minimizer
/// lies between `lo` and `hi`.
fn zoom<E>(
    eval: &mut E,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    f0: f64,
    slope0: f64,
    opts: &BfgsOptions,
) -> Result<Option<(f64, f64, DVector<f64>)>>
where
    E: FnMut(f64) -> Result<Trial>,
{
    let (c1, c2) = (opts.c1, opts.c2);
    for _ in 0..opts.max_line_search {
        let (a, b) = (lo.0.min(hi.0), lo.0.max(hi.0));
        let width = b - a;
        if width <= 1e-16 * b.max(1.0) {
            break;
        }
        let mut alpha = cubic_min(lo, hi).unwrap_or(0.5 * (a + b));
        if alpha < a + 0.1 * width || alpha > b - 0.1 * width {
            alpha = 0.5 * (a + b);
        }
        let (fa, da, ga) = eval(alpha)?;
        if fa > f0 + c1 * alpha * slope0 || fa >= lo.1 {
            hi = (alpha, fa, da);
        } else {
            if da.abs() <= -c2 * slope0 {
                return Ok(Some((alpha, fa, ga)));
            }
            if da * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (alpha, fa, da);
        }
    }
    // Accept the best point found if it still decreases the objective.
    if lo.0 > 0.0 && lo.1 < f0 {
        let (fa, _, ga) = eval(lo.0)?;
        return Ok(Some((lo.0, fa, ga)));
    }
    Ok(None)
}

/// Minimizer of the cubic through two points with values and slopes.
fn cubic_min(a: (f64, f64, f64), b: (f64, f64, f64)) -> Option<f64> {
    let (x1, f1, d1) = a;
    let (x2, f2, d2) = b;
    let d = d1 + d2 - 3.0 * (f1 - f2) / (x1 - x2);
    let disc = d * d - d1 * d2;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt() * (x2 - x1).signum();
    let denom = d2 - d1 + 2.0 * s;
    if denom == 0.0 {
        return None;
    }
    let t = x2 - (x2 - x1) * (d2 + s - d) / denom;
    t.is_finite().then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![
            -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
            200.0 * (b - a * a),
        ];
        Ok((v, g))
    }

    #[test]
    fn rosenbrock_minimum() {
        let r = minimize(rosenbrock, &[-1.2, 1.0], &BfgsOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
        assert!(r.iterations < 100);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn quadratic_converges_quickly() {
        let q = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
            let v = 0.5 * (x[0] * x[0] + 10.0 * x[1] * x[1] + 100.0 * x[2] * x[2]);
            Ok((v, vec![x[0], 10.0 * x[1], 100.0 * x[2]]))
        };
        let r = minimize(q, &[1.0, 1.0, 1.0], &BfgsOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.value < 1e-12);
        assert!(r.iterations <= 20);
    }

    #[test]
    fn stationary_start_takes_no_steps() {
        let r = minimize(
            |_| Ok((3.0, vec![0.0, 0.0])),
            &[0.5, 0.5],
            &BfgsOptions::default(),
        )
        .unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.evaluations, 1);
        assert!(r.converged);
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let opts = BfgsOptions {
            max_iterations: 2,
            ..Default::default()
        };
        let r = minimize(rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert_eq!(r.iterations, 2);
        assert!(!r.converged);
    }
}
