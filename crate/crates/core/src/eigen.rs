//! First eigenpair of the Dirichlet p-Laplacian by Rayleigh-quotient minimization.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::model::DEFAULT_EPSILON_REG;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Stop when the relative quotient change falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Smoothing of `|grad y|^{p-2}` for `p < 2` in the descent direction.
    pub epsilon_reg: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
            epsilon_reg: DEFAULT_EPSILON_REG,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda1: f64,
    /// Positive eigenfunction with `|phi1|_p = 1`.
    pub phi1: GridFunction,
    pub p: f64,
    pub iterations: usize,
    /// `H^1_0` dual norm of the quotient's differential at `phi1`.
    pub residual: f64,
    pub converged: bool,
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "eigen exponent must be finite and > 1",
        })
    }
}

/// `int |grad y|^p / int |y|^p`
pub fn rayleigh_quotient(y: &GridFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let den = y.power_integral(p);
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(y.grad_power_integral(p) / den)
}

/// The positive bubble `prod sin(pi x_k)`.
pub fn bubble(grid: &Arc<Grid>) -> GridFunction {
    let dim = grid.dim();
    GridFunction::from_fn(grid, |[x, y]| {
        let b = (PI * x).sin();
        if dim == 1 {
            b
        } else {
            b * (PI * y).sin()
        }
    })
}

fn normalized(y: &GridFunction, p: f64) -> Result<GridFunction> {
    let n = y.norm_lp(p)?;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroField);
    }
    let mut out = y.scaled(1.0 / n);
    if out.values().iter().sum::<f64>() < 0.0 {
        out.scale(-1.0);
    }
    Ok(out)
}

/// Nodal differential of the quotient `N/D` at `y`, with the numerator and
/// denominator integrals.
fn quotient_gradient(y: &GridFunction, p: f64, eps: f64) -> (Vec<f64>, f64, f64) {
    let g = y.grid();
    let vals = y.values();
    let (wts, grads) = g.center_shape();
    let vol = g.element_volume();
    let mut dn = vec![0.0; g.node_count()];
    let mut dd = vec![0.0; g.node_count()];
    let (mut num, mut den) = (0.0, 0.0);
    for e in 0..g.element_count() {
        let (nodes, count) = g.element_nodes(e);
        let m = g.element_value(vals, e);
        let d = g.element_gradient(vals, e);
        let r2 = d[0] * d[0] + d[1] * d[1];
        num += r2.powf(0.5 * p);
        den += m.abs().powf(p);
        let wg = if p == 2.0 {
            1.0
        } else if p < 2.0 && eps > 0.0 {
            (r2 + eps * eps).powf(0.5 * (p - 2.0))
        } else if r2 == 0.0 {
            0.0
        } else {
            r2.powf(0.5 * (p - 2.0))
        };
        let wm = if m == 0.0 {
            0.0
        } else {
            m.abs().powf(p - 1.0) * m.signum()
        };
        for a in 0..count {
            let k = nodes[a];
            dn[k] += p * wg * (d[0] * grads[a][0] + d[1] * grads[a][1]);
            dd[k] += p * wm * wts[a];
        }
    }
    num *= vol;
    den *= vol;
    let q = num / den;
    let grad = (0..g.node_count())
        .map(|k| {
            if g.is_boundary(k) {
                0.0
            } else {
                vol * (dn[k] - q * dd[k]) / den
            }
        })
        .collect();
    (grad, num, den)
}

fn sobolev_direction(grid: &Arc<Grid>, grad: &[f64]) -> Result<(GridFunction, f64)> {
    let rhs: Vec<f64> = grid.interior_nodes().map(|k| grad[k]).collect();
    let mut r = rhs.clone();
    grid.solve_laplacian(&mut r)?;
    let sq: f64 = rhs.iter().zip(&r).map(|(a, b)| a * b).sum();
    Ok((GridFunction::from_interior(grid, &r), sq.max(0.0).sqrt()))
}

/// Applies the midpoint mass matrix to nodal values.
fn mass_apply(grid: &Grid, x: &[f64]) -> Vec<f64> {
    let (wts, _) = grid.center_shape();
    let vol = grid.element_volume();
    let mut out = vec![0.0; grid.node_count()];
    for e in 0..grid.element_count() {
        let (nodes, count) = grid.element_nodes(e);
        let m = grid.element_value(x, e);
        for a in 0..count {
            out[nodes[a]] += vol * m * wts[a];
        }
    }
    out
}

fn inverse_iteration(grid: &Arc<Grid>, opts: &EigenOptions) -> Result<EigenPair> {
    let mut y = normalized(&bubble(grid), 2.0)?;
    let mut lambda = rayleigh_quotient(&y, 2.0)?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let my = mass_apply(grid, y.values());
        let mut rhs: Vec<f64> = grid.interior_nodes().map(|k| my[k]).collect();
        grid.solve_laplacian(&mut rhs)?;
        y = normalized(&GridFunction::from_interior(grid, &rhs), 2.0)?;
        let next = rayleigh_quotient(&y, 2.0)?;
        let change = (next - lambda).abs();
        lambda = next;
        if change <= opts.tol * lambda {
            converged = true;
            break;
        }
    }
    finish(y, 2.0, iterations, converged, opts)
}

fn finish(
    y: GridFunction,
    p: f64,
    iterations: usize,
    converged: bool,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    let phi1 = normalized(&y, p)?;
    let lambda1 = rayleigh_quotient(&phi1, p)?;
    let (grad, _, _) = quotient_gradient(&phi1, p, opts.epsilon_reg);
    let (_, residual) = sobolev_direction(phi1.grid(), &grad)?;
    Ok(EigenPair {
        lambda1,
        phi1,
        p,
        iterations,
        residual,
        converged,
    })
}

fn sobolev_descent(p: f64, grid: &Arc<Grid>, opts: &EigenOptions) -> Result<EigenPair> {
    const ARMIJO_C: f64 = 1e-4;
    let mut y = normalized(&bubble(grid), p)?;
    let mut q = rayleigh_quotient(&y, p)?;
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let (grad, _, _) = quotient_gradient(&y, p, opts.epsilon_reg);
        let (dir, gnorm) = sobolev_direction(grid, &grad)?;
        if gnorm == 0.0 {
            converged = true;
            break;
        }
        let slope = gnorm * gnorm;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = y.plus(-step, &dir);
            if let Ok(tq) = rayleigh_quotient(&trial, p) {
                if tq <= q - ARMIJO_C * step * slope {
                    accepted = Some((trial, tq));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((trial, tq)) = accepted else {
            // no representable decrease left
            converged = true;
            break;
        };
        let change = q - tq;
        y = normalized(&trial, p)?;
        q = tq;
        step *= 2.0;
        if change <= opts.tol * q {
            converged = true;
            break;
        }
    }
    finish(y, p, iterations, converged, opts)
}

/// First Dirichlet eigenpair of `-Delta_p` on `grid`.
///
/// `p = 2` uses inverse power iteration with the midpoint mass; other `p`
/// use Sobolev-gradient descent on the quotient with Armijo backtracking.
/// Both start from the positive bubble. Non-convergence within `max_iter`
/// returns the last iterate with `converged = false`.
pub fn first_eigenpair(p: f64, grid: &Arc<Grid>, opts: &EigenOptions) -> Result<EigenPair> {
    check_p(p)?;
    if p == 2.0 {
        inverse_iteration(grid, opts)
    } else {
        sobolev_descent(p, grid, opts)
    }
}
