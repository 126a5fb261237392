//! Discrete energy functional, its differential and Sobolev-gradient residuals.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::ExponentConfig;
use crate::grid::{ell_norm, FieldPair, Grid, GridFunction};
use crate::model::{Evaluators, ModelFunctions};
use crate::serial;

/// Energy value with its term breakdown, norms and residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub total: f64,
    pub int_a: f64,
    pub int_b: f64,
    pub int_g: f64,
    pub norm_w1: f64,
    pub norm_w2: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    pub ell: f64,
    /// `H^1_0`-preconditioned dual norm of the differential.
    #[serde(serialize_with = "serial::ext_f64")]
    pub residual: f64,
}

/// `(int A, int B, int G)` by midpoint quadrature.
pub fn energy_terms<E: Evaluators + ?Sized>(fp: &FieldPair, ev: &E) -> Result<(f64, f64, f64)> {
    let g = fp.grid();
    let (u, v) = (fp.u.values(), fp.v.values());
    let dim = g.dim();
    let (mut sa, mut sb, mut sg) = (0.0, 0.0, 0.0);
    for e in 0..g.element_count() {
        let um = g.element_value(u, e);
        let vm = g.element_value(v, e);
        let gu = g.element_gradient(u, e);
        let gv = g.element_gradient(v, e);
        sa += ev.density(0, um, &gu[..dim]);
        sb += ev.density(1, vm, &gv[..dim]);
        sg += ev.g(um, vm);
    }
    let vol = g.element_volume();
    let terms = (sa * vol, sb * vol, sg * vol);
    if !(terms.0.is_finite() && terms.1.is_finite() && terms.2.is_finite()) {
        return Err(Error::NonFinite("energy"));
    }
    Ok(terms)
}

/// `J(u, v) = int A(u, grad u) + int B(v, grad v) - int G(u, v)`.
pub fn j_value<E: Evaluators + ?Sized>(fp: &FieldPair, ev: &E) -> Result<f64> {
    let (a, b, g) = energy_terms(fp, ev)?;
    let total = a + b - g;
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::NonFinite("energy"))
    }
}

/// Nodal differential `dJ(u, v)[phi_k]` for every node, zero on the boundary.
///
/// This is the exact derivative of the discrete functional assembled with
/// the evaluator fluxes.
pub fn nodal_gradient<E: Evaluators + ?Sized>(fp: &FieldPair, ev: &E) -> (Vec<f64>, Vec<f64>) {
    let g = fp.grid();
    let (u, v) = (fp.u.values(), fp.v.values());
    let dim = g.dim();
    let (wts, grads) = g.center_shape();
    let vol = g.element_volume();
    let mut du = vec![0.0; g.node_count()];
    let mut dv = vec![0.0; g.node_count()];
    let mut fa = [0.0; 2];
    let mut fb = [0.0; 2];
    for e in 0..g.element_count() {
        let (nodes, count) = g.element_nodes(e);
        let um = g.element_value(u, e);
        let vm = g.element_value(v, e);
        let gu = g.element_gradient(u, e);
        let gv = g.element_gradient(v, e);
        let (_, at) = ev.principal(0, um, &gu[..dim], &mut fa[..dim]);
        let (_, bt) = ev.principal(1, vm, &gv[..dim], &mut fb[..dim]);
        let cu = at - ev.g_u(um, vm);
        let cv = bt - ev.g_v(um, vm);
        for a in 0..count {
            let k = nodes[a];
            let gr = grads[a];
            du[k] += vol * (fa[0] * gr[0] + fa[1] * gr[1] + cu * wts[a]);
            dv[k] += vol * (fb[0] * gr[0] + fb[1] * gr[1] + cv * wts[a]);
        }
    }
    for k in 0..g.node_count() {
        if g.is_boundary(k) {
            du[k] = 0.0;
            dv[k] = 0.0;
        }
    }
    (du, dv)
}

/// `dJ(u, v)[(w, z)]`.
pub fn dj_apply<E: Evaluators + ?Sized>(fp: &FieldPair, dir: &FieldPair, ev: &E) -> Result<f64> {
    if !fp.u.same_grid(&dir.u) {
        return Err(Error::GridMismatch("direction"));
    }
    let (du, dv) = nodal_gradient(fp, ev);
    let w = dir.u.values();
    let z = dir.v.values();
    let mut s = 0.0;
    for k in 0..du.len() {
        s += du[k] * w[k] + dv[k] * z[k];
    }
    Ok(s)
}

/// Riesz representative of a nodal differential and its dual norm.
pub fn riesz_map(fp: &FieldPair, du: &[f64], dv: &[f64]) -> Result<(FieldPair, f64)> {
    let g = fp.grid();
    let mut ru: Vec<f64> = g.interior_nodes().map(|k| du[k]).collect();
    let mut rv: Vec<f64> = g.interior_nodes().map(|k| dv[k]).collect();
    let rhs_u = ru.clone();
    let rhs_v = rv.clone();
    g.solve_laplacian(&mut ru)?;
    g.solve_laplacian(&mut rv)?;
    let sq: f64 = rhs_u.iter().zip(&ru).map(|(a, b)| a * b).sum::<f64>()
        + rhs_v.iter().zip(&rv).map(|(a, b)| a * b).sum::<f64>();
    let r = FieldPair {
        u: GridFunction::from_interior(g, &ru),
        v: GridFunction::from_interior(g, &rv),
    };
    Ok((r, sq.max(0.0).sqrt()))
}

/// Riesz representative of `dJ(u, v)` in `int grad . grad`, with the
/// residual `sqrt(dJ[r])`.
pub fn gradient_representative<E: Evaluators + ?Sized>(
    fp: &FieldPair,
    ev: &E,
) -> Result<(FieldPair, f64)> {
    let (du, dv) = nodal_gradient(fp, ev);
    let (r, res) = riesz_map(fp, &du, &dv)?;
    if !res.is_finite() {
        return Err(Error::NonFinite("residual"));
    }
    Ok((r, res))
}

/// Full report for any evaluator family, with norms taken from `cfg`.
pub fn j_eval_with<E: Evaluators + ?Sized>(
    fp: &FieldPair,
    ev: &E,
    cfg: &ExponentConfig,
) -> Result<EnergyReport> {
    let (int_a, int_b, int_g) = energy_terms(fp, ev)?;
    let total = int_a + int_b - int_g;
    if !total.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    let (_, residual) = gradient_representative(fp, ev)?;
    Ok(EnergyReport {
        total,
        int_a,
        int_b,
        int_g,
        norm_w1: fp.u.norm_w(cfg.p1)?,
        norm_w2: fp.v.norm_w(cfg.p2)?,
        linf_u: fp.u.norm_linf(),
        linf_v: fp.v.norm_linf(),
        ell: ell_norm(fp, cfg)?,
        residual,
    })
}

pub fn j_eval(fp: &FieldPair, mf: &ModelFunctions) -> Result<EnergyReport> {
    j_eval_with(fp, mf, &mf.cfg)
}

/// Seeded `(point, direction)` pair for differential checks.
///
/// The point is a positive bubble modulated by a random smooth factor in
/// `[1/2, 3/2]`, so midpoint values stay away from zero where the model
/// densities lose smoothness. The direction is a random sine combination.
pub fn seeded_test_pair(grid: &Arc<Grid>, seed: u64) -> (FieldPair, FieldPair) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let combo = |rng: &mut ChaCha8Rng| {
        let c: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(1.0..4.0),
                    rng.gen_range(1.0..4.0),
                )
            })
            .collect();
        let total: f64 = c
            .iter()
            .map(|t| t.0.abs())
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
        move |x: f64, y: f64| {
            c.iter()
                .map(|&(a, kx, ky)| {
                    let s = (kx * PI * x).cos();
                    if dim == 1 {
                        a * s
                    } else {
                        a * s * (ky * PI * y).cos()
                    }
                })
                .sum::<f64>()
                / total
        }
    };
    let bubble = move |x: f64, y: f64| {
        let b = (PI * x).sin();
        if dim == 1 {
            b
        } else {
            b * (PI * y).sin()
        }
    };
    let point = |rng: &mut ChaCha8Rng| {
        let amp = rng.gen_range(0.5..1.5);
        let m = combo(rng);
        GridFunction::from_fn(grid, |[x, y]| amp * bubble(x, y) * (1.0 + 0.5 * m(x, y)))
    };
    let u = point(&mut rng);
    let v = point(&mut rng);
    let direction = |rng: &mut ChaCha8Rng| {
        let m = combo(rng);
        GridFunction::from_fn(grid, |[x, y]| bubble(x, y) * m(x, y))
    };
    let w = direction(&mut rng);
    let z = direction(&mut rng);
    (FieldPair { u, v }, FieldPair { u: w, v: z })
}

/// Central-difference check of [`dj_apply`] along one direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheck {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log step`, over the
    /// steps whose error stays above the roundoff floor.
    #[serde(serialize_with = "serial::ext_f64")]
    pub slope: f64,
    pub used: usize,
    pub directional: f64,
}

/// Default step sequence `10^{-2 - k/2}`, `k = 0..7`.
pub fn default_fd_steps() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(-2.0 - 0.5 * k as f64)).collect()
}

pub fn finite_difference_check<E: Evaluators + ?Sized>(
    fp: &FieldPair,
    dir: &FieldPair,
    ev: &E,
    steps: &[f64],
) -> Result<GradCheck> {
    let exact = dj_apply(fp, dir, ev)?;
    let j0 = j_value(fp, ev)?.abs();
    let mut errors = Vec::with_capacity(steps.len());
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &h in steps {
        let jp = j_value(&fp.plus(h, dir), ev)?;
        let jm = j_value(&fp.plus(-h, dir), ev)?;
        let err = ((jp - jm) / (2.0 * h) - exact).abs();
        errors.push(err);
        let floor = 10.0 * f64::EPSILON * (j0 + jp.abs() + jm.abs() + 1.0) / h;
        if err > floor {
            xs.push(h.ln());
            ys.push(err.ln());
        }
    }
    let slope = if xs.len() >= 2 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(GradCheck {
        steps: steps.to_vec(),
        errors,
        slope,
        used: xs.len(),
        directional: exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cfg_a() -> ExponentConfig {
        ExponentConfig {
            n: 2,
            p1: 1.5,
            p2: 1.5,
            s1: 1.0,
            s2: 1.0,
            q1: 8.0,
            q2: 8.0,
            gamma1: 4.0,
            gamma2: 4.0,
            theta1: 0.125,
            theta2: 0.125,
            c_star: 1.0,
        }
    }

    pub(crate) fn cfg_b() -> ExponentConfig {
        ExponentConfig {
            n: 2,
            p1: 2.0,
            p2: 2.0,
            s1: 0.0,
            s2: 0.0,
            q1: 4.0,
            q2: 4.0,
            gamma1: 2.0,
            gamma2: 2.0,
            theta1: 0.25,
            theta2: 0.25,
            c_star: 0.0,
        }
    }

    fn random_field(grid: &Arc<Grid>, rng: &mut ChaCha8Rng, amp: f64) -> GridFunction {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-amp..amp)).collect();
        GridFunction::from_fn(grid, |[x, y]| {
            let sy = if grid.dim() == 1 { 1.0 } else { (PI * y).sin() };
            let s2y = if grid.dim() == 1 {
                1.0
            } else {
                (2.0 * PI * y).sin()
            };
            (c[0] * (PI * x).sin() + c[1] * (2.0 * PI * x).sin() + c[2] * (3.0 * PI * x).sin()) * sy
                + (c[3] * (PI * x).sin() + c[4] * (2.0 * PI * x).sin()) * s2y
                + c[5] * (PI * x).sin().powi(2) * sy
        })
    }

    fn random_pair(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> FieldPair {
        FieldPair {
            u: random_field(grid, rng, 1.0),
            v: random_field(grid, rng, 1.0),
        }
    }

    #[test]
    fn zero_field() {
        let grid = Grid::new(2, 9).unwrap();
        let mf = ModelFunctions::new(cfg_a());
        let z = FieldPair::zeros(&grid);
        let rep = j_eval(&z, &mf).unwrap();
        assert_eq!(rep.total, 0.0);
        assert_eq!(rep.residual, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = random_pair(&grid, &mut rng);
        assert_eq!(dj_apply(&z, &d, &mf).unwrap(), 0.0);
        let (r, _) = gradient_representative(&z, &mf).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn decoupled_analytic_integrals() {
        let grid = Grid::new(2, 129).unwrap();
        let mf = ModelFunctions::new(cfg_b());
        let u = GridFunction::from_fn(&grid, |[x, y]| (PI * x).sin() * (PI * y).sin());
        let fp = FieldPair {
            u,
            v: GridFunction::zeros(&grid),
        };
        let rep = j_eval(&fp, &mf).unwrap();
        // s = 0 gives A = (1/2)(1 + 1)|grad u|^2
        let ea = PI * PI / 2.0;
        assert!((rep.int_a - ea).abs() / ea < 1e-2, "{}", rep.int_a);
        let eg = 9.0 / 256.0;
        assert!((rep.int_g - eg).abs() / eg < 1e-2, "{}", rep.int_g);
        assert!((rep.total - (rep.int_a + rep.int_b - rep.int_g)).abs() <= 1e-12 * rep.total.abs());
    }

    #[test]
    fn homogeneity_without_coefficient_growth() {
        let mut cfg = cfg_a();
        cfg.s1 = 0.0;
        let grid = Grid::new(2, 17).unwrap();
        let mf = ModelFunctions::new(cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fp = random_pair(&grid, &mut rng);
        let (a1, _, _) = energy_terms(&fp, &mf).unwrap();
        let (a2, _, _) = energy_terms(&fp.scaled(3.0), &mf).unwrap();
        assert!((a2 - 3f64.powf(1.5) * a1).abs() <= 1e-12 * a2);
    }

    #[test]
    fn additivity_and_evenness() {
        let grid = Grid::new(2, 17).unwrap();
        let mf = ModelFunctions::new(cfg_a());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fp = random_pair(&grid, &mut rng);
        let d = random_pair(&grid, &mut rng);
        let full = dj_apply(&fp, &d, &mf).unwrap();
        let zero = GridFunction::zeros(&grid);
        let w = FieldPair {
            u: d.u.clone(),
            v: zero.clone(),
        };
        let z = FieldPair {
            u: zero,
            v: d.v.clone(),
        };
        let parts = dj_apply(&fp, &w, &mf).unwrap() + dj_apply(&fp, &z, &mf).unwrap();
        assert!((full - parts).abs() <= 1e-12 * full.abs().max(1.0));
        assert_eq!(
            j_value(&fp, &mf).unwrap(),
            j_value(&-fp.clone(), &mf).unwrap()
        );
    }

    #[test]
    fn central_differences_are_second_order() {
        for (cfg, dim) in [(cfg_a(), 2), (cfg_b(), 2), (cfg_b(), 1)] {
            let grid = Grid::new(dim, 17).unwrap();
            let mf = ModelFunctions::exact(cfg);
            let mut rng = ChaCha8Rng::seed_from_u64(21);
            let fp = random_pair(&grid, &mut rng);
            let d = random_pair(&grid, &mut rng);
            let chk = finite_difference_check(&fp, &d, &mf, &default_fd_steps()).unwrap();
            assert!(chk.used >= 3);
            assert!((1.8..=2.2).contains(&chk.slope), "{chk:?}");
        }
    }

    #[test]
    fn seeded_pairs_are_second_order_for_both_configs() {
        for cfg in [cfg_a(), cfg_b()] {
            let grid = Grid::new(2, 17).unwrap();
            let mf = ModelFunctions::exact(cfg);
            for seed in 0..5 {
                let (fp, d) = seeded_test_pair(&grid, seed);
                assert!(grid
                    .interior_nodes()
                    .all(|k| fp.u[k] > 0.0 && fp.v[k] > 0.0));
                let chk = finite_difference_check(&fp, &d, &mf, &default_fd_steps()).unwrap();
                assert!((1.8..=2.2).contains(&chk.slope), "seed {seed}: {chk:?}");
            }
        }
    }

    #[test]
    fn representative_matches_differential() {
        let grid = Grid::new(2, 17).unwrap();
        let mf = ModelFunctions::new(cfg_a());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fp = random_pair(&grid, &mut rng);
        let (r, res) = gradient_representative(&fp, &mf).unwrap();
        for _ in 0..5 {
            let d = random_pair(&grid, &mut rng);
            let lhs = dj_apply(&fp, &d, &mf).unwrap();
            let rhs = r.h1_inner(&d);
            assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1e-300));
        }
        let self_pair = dj_apply(&fp, &r, &mf).unwrap();
        assert!((self_pair.sqrt() - res).abs() <= 1e-10 * res);
        let j0 = j_value(&fp, &mf).unwrap();
        let j1 = j_value(&fp.plus(-1e-4, &r), &mf).unwrap();
        assert!(j1 < j0);
    }

    #[test]
    fn overflow_is_reported() {
        let grid = Grid::new(1, 9).unwrap();
        let mf = ModelFunctions::new(cfg_a());
        let u = GridFunction::from_fn(&grid, |[x, _]| 1e300 * (PI * x).sin());
        let fp = FieldPair { u: u.clone(), v: u };
        assert!(matches!(j_eval(&fp, &mf), Err(Error::NonFinite(_))));
    }
}
