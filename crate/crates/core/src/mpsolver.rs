//! Mountain-pass geometry checks and path-deformation critical point search.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eigen::EigenPair;
use crate::energy::{gradient_representative, j_value, nodal_gradient, riesz_map};
use crate::error::{Error, Result};
use crate::grid::{ell_norm, FieldPair, Grid, GridFunction};
use crate::model::ModelFunctions;
use crate::serial;

const MAX_DOUBLINGS: u32 = 60;
const ENDPOINT_LEVEL: f64 = -1.0;

/// Doubles `tau` from 1 until `J(tau * dir) < -1`; returns `(tau, J)`.
fn scale_until_negative(mf: &ModelFunctions, dir: &FieldPair) -> Result<(f64, f64)> {
    let mut tau = 1.0;
    for _ in 0..=MAX_DOUBLINGS {
        match j_value(&dir.scaled(tau), mf) {
            Ok(j) if j < ENDPOINT_LEVEL => return Ok((tau, j)),
            Ok(_) => {}
            Err(_) => break,
        }
        tau *= 2.0;
    }
    Err(Error::NoNegativeEnergy {
        doublings: MAX_DOUBLINGS,
    })
}

/// `(tau phi_1, 0)` with `tau` doubled from 1 until `J < -1`.
pub fn find_endpoint(mf: &ModelFunctions, eig: &EigenPair) -> Result<FieldPair> {
    let grid = eig.phi1.grid();
    let dir = FieldPair {
        u: eig.phi1.clone(),
        v: GridFunction::zeros(grid),
    };
    let (tau, _) = scale_until_negative(mf, &dir)?;
    Ok(dir.scaled(tau))
}

#[derive(Debug, Clone)]
pub struct GeometryCertificate {
    pub r0: f64,
    /// Smallest sampled energy on the sphere `ell = r0`.
    pub rho0: f64,
    pub samples: usize,
    pub min_index: usize,
    pub min_sample: FieldPair,
    /// Largest `|ell(sample) - r0| / r0` over the samples.
    pub sphere_error: f64,
    pub endpoint: Option<FieldPair>,
    pub endpoint_energy: Option<f64>,
    pub endpoint_ell: Option<f64>,
    pub validated: bool,
}

/// Serializable summary of a [`GeometryCertificate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometrySummary {
    pub r0: f64,
    pub rho0: f64,
    pub samples: usize,
    pub min_index: usize,
    pub sphere_error: f64,
    pub endpoint_energy: Option<f64>,
    pub endpoint_ell: Option<f64>,
    pub validated: bool,
}

impl GeometryCertificate {
    pub fn summary(&self) -> GeometrySummary {
        GeometrySummary {
            r0: self.r0,
            rho0: self.rho0,
            samples: self.samples,
            min_index: self.min_index,
            sphere_error: self.sphere_error,
            endpoint_energy: self.endpoint_energy,
            endpoint_ell: self.endpoint_ell,
            validated: self.validated,
        }
    }
}

fn random_modes(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> GridFunction {
    const KMAX: usize = 4;
    let dim = grid.dim();
    let ky = if dim == 1 { 1 } else { KMAX };
    let mut coef = Vec::with_capacity(KMAX * ky);
    for l in 1..=ky {
        for k in 1..=KMAX {
            let c: f64 = rng.gen_range(-1.0..1.0);
            coef.push((k, l, c / (k * l) as f64));
        }
    }
    GridFunction::from_fn(grid, |[x, y]| {
        coef.iter()
            .map(|&(k, l, c)| {
                let sx = (k as f64 * PI * x).sin();
                if dim == 1 {
                    c * sx
                } else {
                    c * sx * (l as f64 * PI * y).sin()
                }
            })
            .sum()
    })
}

/// Scales `fp` so that `ell(fp) = r0`.
///
/// Uses `ell(t fp) = max{ t a, t^{s1+1} b1 + t^{s2+1} b2 }`, which is
/// increasing in `t`, and bisects the scalar equation.
pub fn scale_to_sphere(fp: &FieldPair, mf: &ModelFunctions, r0: f64) -> Result<FieldPair> {
    let c = &mf.cfg;
    let a = fp.norm_w(c.p1, c.p2)?;
    let b1 = fp.u.power_map(c.s1)?.norm_w(c.p1)?;
    let b2 = fp.v.power_map(c.s2)?.norm_w(c.p2)?;
    if a == 0.0 {
        return Err(Error::ZeroField);
    }
    let ell = |t: f64| (t * a).max(t.powf(c.s1 + 1.0) * b1 + t.powf(c.s2 + 1.0) * b2);
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while ell(lo) > r0 {
        lo *= 0.5;
    }
    while ell(hi) < r0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ell(mid) < r0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(fp.scaled(0.5 * (lo + hi)))
}

/// The seeded sphere samples used by [`certify_geometry`].
pub fn sphere_samples(
    mf: &ModelFunctions,
    grid: &Arc<Grid>,
    r0: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<FieldPair>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_samples);
    while out.len() < n_samples {
        let mut u = random_modes(grid, &mut rng);
        let mut v = random_modes(grid, &mut rng);
        match rng.gen_range(0..4u8) {
            0 => u = GridFunction::zeros(grid),
            1 => v = GridFunction::zeros(grid),
            _ => {}
        }
        let fp = FieldPair { u, v };
        if fp.is_zero() {
            continue;
        }
        out.push(scale_to_sphere(&fp, mf, r0)?);
    }
    Ok(out)
}

/// Samples `J` on the sphere `ell = r0` and attaches the endpoint from
/// [`find_endpoint`]. A certificate that fails to validate is returned,
/// not raised.
pub fn certify_geometry(
    mf: &ModelFunctions,
    eig: &EigenPair,
    r0: f64,
    n_samples: usize,
    seed: u64,
) -> Result<GeometryCertificate> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "r0",
            value: r0,
            reason: "sphere radius must be finite and > 0",
        });
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: 0.0,
            reason: "at least one sample is required",
        });
    }
    let grid = eig.phi1.grid();
    let samples = sphere_samples(mf, grid, r0, n_samples, seed)?;
    let mut rho0 = f64::INFINITY;
    let mut min_index = 0;
    let mut sphere_error: f64 = 0.0;
    for (i, s) in samples.iter().enumerate() {
        let j = j_value(s, mf)?;
        sphere_error = sphere_error.max((ell_norm(s, &mf.cfg)? - r0).abs() / r0);
        if j < rho0 {
            rho0 = j;
            min_index = i;
        }
    }
    let (endpoint, endpoint_energy, endpoint_ell) = match find_endpoint(mf, eig) {
        Ok(e) => {
            let j = j_value(&e, mf)?;
            let l = ell_norm(&e, &mf.cfg)?;
            (Some(e), Some(j), Some(l))
        }
        Err(Error::NoNegativeEnergy { .. }) => (None, None, None),
        Err(err) => return Err(err),
    };
    let validated = rho0 > 0.0
        && endpoint_energy.is_some_and(|j| j < 0.0)
        && endpoint_ell.is_some_and(|l| l > r0);
    Ok(GeometryCertificate {
        r0,
        rho0,
        samples: n_samples,
        min_index,
        min_sample: samples[min_index].clone(),
        sphere_error,
        endpoint,
        endpoint_energy,
        endpoint_ell,
        validated,
    })
}

// ---------------------------------------------------------------------------
// Path search

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MountainPassParams {
    pub path_points: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub armijo_c: f64,
    /// Path neighbours on each side moved together with the maximum.
    pub stencil: usize,
    pub reparam_every: usize,
    pub nontrivial_floor: f64,
    pub dedup_tol: f64,
    /// Worker cap for multi-start searches; `0` uses all available cores.
    pub threads: usize,
}

impl Default for MountainPassParams {
    fn default() -> Self {
        Self {
            path_points: 33,
            tol: 1e-6,
            max_iters: 10_000,
            armijo_c: 1e-4,
            stencil: 1,
            reparam_every: 50,
            nontrivial_floor: 1e-3,
            dedup_tol: 1e-2,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub method: String,
    pub seed: Option<u64>,
    /// Starting mode `(k, l)` for multi-start searches.
    pub mode: Option<(usize, usize)>,
    pub path_points: usize,
}

#[derive(Debug, Clone)]
pub struct CriticalPointCandidate {
    pub fields: FieldPair,
    pub level: f64,
    pub residual: f64,
    /// `||(u, v)||_W`
    pub nontriviality: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    pub iterations: usize,
    pub converged: bool,
    pub collapsed: bool,
    pub provenance: Provenance,
}

/// Serializable summary of a [`CriticalPointCandidate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSummary {
    pub level: f64,
    #[serde(serialize_with = "serial::ext_f64")]
    pub residual: f64,
    pub nontriviality: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    pub iterations: usize,
    pub converged: bool,
    pub collapsed: bool,
    pub provenance: Provenance,
}

impl CriticalPointCandidate {
    pub fn summary(&self) -> CandidateSummary {
        CandidateSummary {
            level: self.level,
            residual: self.residual,
            nontriviality: self.nontriviality,
            linf_u: self.linf_u,
            linf_v: self.linf_v,
            iterations: self.iterations,
            converged: self.converged,
            collapsed: self.collapsed,
            provenance: self.provenance.clone(),
        }
    }
}

/// Reflection symmetries of the unit cube that a search is confined to.
/// Each entry is `Some(sign)` for a prescribed parity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymmetryClass {
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub swap: Option<f64>,
}

impl SymmetryClass {
    /// Parity class of `sin(k pi x) sin(l pi y)`.
    pub fn of_mode(dim: usize, k: usize, l: usize) -> Self {
        let parity = |m: usize| if m % 2 == 1 { 1.0 } else { -1.0 };
        if dim == 1 {
            Self {
                x: Some(parity(k)),
                ..Self::default()
            }
        } else {
            Self {
                x: Some(parity(k)),
                y: Some(parity(l)),
                swap: (k == l).then_some(1.0),
            }
        }
    }

    fn project(&self, f: &mut GridFunction) {
        let grid = f.grid().clone();
        let n = grid.n();
        let dim = grid.dim();
        let mut vals = f.values().to_vec();
        let mirror =
            |vals: &mut Vec<f64>, sign: f64, map: &dyn Fn(usize, usize) -> (usize, usize)| {
                let old = vals.clone();
                let rows = if dim == 1 { 1 } else { n };
                for j in 0..rows {
                    for i in 0..n {
                        let (ri, rj) = map(i, j);
                        vals[j * n + i] = 0.5 * (old[j * n + i] + sign * old[rj * n + ri]);
                    }
                }
            };
        if let Some(s) = self.x {
            mirror(&mut vals, s, &|i, j| (n - 1 - i, j));
        }
        if let Some(s) = self.y {
            mirror(&mut vals, s, &|i, j| (i, n - 1 - j));
        }
        if let Some(s) = self.swap {
            mirror(&mut vals, s, &|i, j| (j, i));
        }
        *f = GridFunction::from_values(&grid, vals).expect("reflection preserves the boundary");
    }

    fn project_pair(&self, fp: &mut FieldPair) {
        if *self != Self::default() {
            self.project(&mut fp.u);
            self.project(&mut fp.v);
        }
    }
}

struct Searcher<'a> {
    mf: &'a ModelFunctions,
    params: &'a MountainPassParams,
    sym: SymmetryClass,
}

struct PointState {
    rep: FieldPair,
    residual: f64,
}

impl Searcher<'_> {
    fn gradient(&self, x: &FieldPair) -> Result<PointState> {
        let (du, dv) = nodal_gradient(x, self.mf);
        let (mut rep, residual) = riesz_map(x, &du, &dv)?;
        self.sym.project_pair(&mut rep);
        if !residual.is_finite() {
            return Err(Error::NonFinite("residual"));
        }
        Ok(PointState { rep, residual })
    }

    fn w_dist(&self, a: &FieldPair, b: &FieldPair) -> f64 {
        let d = a.plus(-1.0, b);
        d.norm_w(self.mf.cfg.p1, self.mf.cfg.p2)
            .unwrap_or(f64::INFINITY)
    }

    /// `dJ(x)[t]` through the nodal differential.
    fn slope(&self, x: &FieldPair, t: &FieldPair) -> f64 {
        let (du, dv) = nodal_gradient(x, self.mf);
        let (tu, tv) = (t.u.values(), t.v.values());
        (0..du.len()).map(|k| du[k] * tu[k] + dv[k] * tv[k]).sum()
    }

    /// Maximizes `J` along the unit tangent `t` through `x`, stopping once
    /// the tangential slope drops below `target`. Returns the new point.
    fn line_max(
        &self,
        x: &FieldPair,
        t: &FieldPair,
        g0: f64,
        target: f64,
        guess: &mut f64,
    ) -> FieldPair {
        if g0.abs() <= target {
            return x.clone();
        }
        let dir = t.scaled(g0.signum());
        let ga0 = g0.abs();
        let (mut sa, mut ga) = (0.0, ga0);
        let mut sb = (*guess).max(1e-12);
        let mut gb = self.slope(&x.plus(sb, &dir), &dir);
        let mut expansions = 0;
        while gb > 0.0 && expansions < 40 {
            sa = sb;
            ga = gb;
            sb *= 2.0;
            gb = self.slope(&x.plus(sb, &dir), &dir);
            expansions += 1;
        }
        if gb > 0.0 || !gb.is_finite() {
            return x.clone();
        }
        // Illinois iteration on the slope over [sa, sb]
        let mut side = 0i8;
        let mut s = sa;
        for _ in 0..60 {
            s = (sa * gb - sb * ga) / (gb - ga);
            let gs = self.slope(&x.plus(s, &dir), &dir);
            if gs.abs() <= target {
                break;
            }
            if gs > 0.0 {
                sa = s;
                ga = gs;
                if side == 1 {
                    gb *= 0.5;
                }
                side = 1;
            } else {
                sb = s;
                gb = gs;
                if side == -1 {
                    ga *= 0.5;
                }
                side = -1;
            }
        }
        *guess = s.max(1e-12);
        x.plus(s, &dir)
    }

    /// One Armijo step along the component of `-rep` orthogonal to `t`,
    /// with step length at most `max_len` in the `H^1_0` norm. Returns the
    /// displacement and the new energy.
    fn armijo(
        &self,
        x: &FieldPair,
        jx: f64,
        state: &PointState,
        t: Option<&FieldPair>,
        alpha: &mut f64,
        max_len: f64,
    ) -> Result<Option<(FieldPair, f64)>> {
        let mut d = state.rep.clone();
        if let Some(t) = t {
            let c = d.h1_inner(t);
            d.axpy(-c, t);
        }
        let dd = state.rep.h1_inner(&d);
        if !(dd > 0.0) {
            return Ok(None);
        }
        let dn = d.h1_inner(&d).sqrt();
        let mut a = alpha.min(max_len / dn);
        let noise = 64.0 * f64::EPSILON * (jx.abs() + 1.0);
        for _ in 0..60 {
            let step = d.scaled(-a);
            let trial = x.plus(1.0, &step);
            if let Ok(jt) = j_value(&trial, self.mf) {
                let armijo = jt <= jx - self.params.armijo_c * a * dd && jt < jx;
                // inside the roundoff band of J, fall back to the approximate
                // Armijo test on the directional derivative
                let approx = !armijo
                    && jt <= jx + noise
                    && self.slope(&trial, &d) >= -(1.0 - 2.0 * self.params.armijo_c) * dd;
                if armijo || approx {
                    *alpha = (a * 2.0).min(16.0);
                    return Ok(Some((step, jt)));
                }
            }
            a *= 0.5;
        }
        *alpha = 1.0;
        Ok(None)
    }

    fn w_h1(&self, a: &FieldPair, b: &FieldPair) -> f64 {
        let d = a.plus(-1.0, b);
        d.h1_inner(&d).sqrt()
    }

    fn unit_tangent(&self, path: &[FieldPair], k: usize) -> Option<FieldPair> {
        let t = path[k + 1].plus(-1.0, &path[k - 1]);
        let n2 = t.h1_inner(&t);
        (n2 > 0.0).then(|| t.scaled(1.0 / n2.sqrt()))
    }

    /// Redistributes interior points by `W` arc length on both sides of
    /// `pivot`, which stays fixed.
    fn reparameterize(&self, path: &mut [FieldPair], pivot: usize) {
        let m = path.len();
        let segment = |path: &mut [FieldPair], lo: usize, hi: usize| {
            if hi <= lo + 1 {
                return;
            }
            let mut cum = vec![0.0];
            for i in lo..hi {
                let d = self.w_dist(&path[i + 1], &path[i]);
                cum.push(cum.last().unwrap() + d);
            }
            let total = *cum.last().unwrap();
            if !(total > 0.0) || !total.is_finite() {
                return;
            }
            let old: Vec<FieldPair> = path[lo..=hi].to_vec();
            let mut seg = 0;
            for i in 1..(hi - lo) {
                let target = total * i as f64 / (hi - lo) as f64;
                while seg + 1 < cum.len() - 1 && cum[seg + 1] < target {
                    seg += 1;
                }
                let len = cum[seg + 1] - cum[seg];
                let w = if len > 0.0 {
                    (target - cum[seg]) / len
                } else {
                    0.0
                };
                let mut p = old[seg].scaled(1.0 - w);
                p.axpy(w, &old[seg + 1]);
                self.sym.project_pair(&mut p);
                path[lo + i] = p;
            }
        };
        segment(path, 0, pivot);
        segment(path, pivot, m - 1);
    }

    fn stop_threshold(&self, x: &FieldPair) -> f64 {
        let c = &self.mf.cfg;
        let nx = x.norm_x(c.p1, c.p2).unwrap_or(f64::INFINITY);
        self.params.tol * (10.0 / (1.0 + nx)).min(1.0)
    }

    fn run(&self, end: &FieldPair, provenance: Provenance) -> Result<CriticalPointCandidate> {
        let m = self.params.path_points.max(3);
        let grid = end.grid().clone();
        let mut path: Vec<FieldPair> = (0..m)
            .map(|i| {
                let mut p = end.scaled(i as f64 / (m - 1) as f64);
                self.sym.project_pair(&mut p);
                p
            })
            .collect();
        path[0] = FieldPair::zeros(&grid);
        let mut energies = path
            .iter()
            .map(|p| j_value(p, self.mf))
            .collect::<Result<Vec<f64>>>()?;
        let mut alphas = vec![1.0; m];
        let mut guess = vec![0.1; m];
        let mut iterations = 0;
        let mut converged = false;
        let mut k;
        let mut residual;
        loop {
            k = (1..m - 1).fold(1, |best, i| {
                if energies[i] > energies[best] {
                    i
                } else {
                    best
                }
            });
            let state = self.gradient(&path[k])?;
            residual = state.residual;
            if residual <= self.stop_threshold(&path[k]) {
                converged = true;
                break;
            }
            if iterations >= self.params.max_iters {
                break;
            }
            iterations += 1;

            // climb along the path tangent, then descend across it
            let tangent = self.unit_tangent(&path, k);
            let mut state = state;
            if let Some(t) = &tangent {
                let g0 = state.rep.h1_inner(t);
                let target = 1e-2 * residual;
                let moved = self.line_max(&path[k], t, g0, target, &mut guess[k]);
                if let Ok(j) = j_value(&moved, self.mf) {
                    if j >= energies[k] {
                        let mut moved = moved;
                        self.sym.project_pair(&mut moved);
                        path[k] = moved;
                        energies[k] = j;
                        state = self.gradient(&path[k])?;
                    }
                }
            }
            let spacing = self
                .w_h1(&path[k], &path[k - 1])
                .min(self.w_h1(&path[k], &path[k + 1]));
            let mut moved_any = false;
            if let Some((step, j)) = self.armijo(
                &path[k],
                energies[k],
                &state,
                tangent.as_ref(),
                &mut alphas[k],
                0.5 * spacing,
            )? {
                path[k].axpy(1.0, &step);
                self.sym.project_pair(&mut path[k]);
                energies[k] = j;
                moved_any = true;
                // drag the stencil neighbours with tapering weights
                let width = self.params.stencil;
                for off in 1..=width {
                    let w = 1.0 - off as f64 / (width + 1) as f64;
                    for i in [k.wrapping_sub(off), k + off] {
                        if (1..m - 1).contains(&i) {
                            path[i].axpy(w, &step);
                            self.sym.project_pair(&mut path[i]);
                            energies[i] = j_value(&path[i], self.mf)?;
                        }
                    }
                }
            }
            if !moved_any && tangent.is_none() {
                break;
            }
            if self.params.reparam_every > 0 && iterations % self.params.reparam_every == 0 {
                self.reparameterize(&mut path, k);
                for i in 1..m - 1 {
                    if i != k {
                        energies[i] = j_value(&path[i], self.mf)?;
                    }
                }
            }
        }
        let x = path.swap_remove(k);
        let c = &self.mf.cfg;
        let nontriviality = x.norm_w(c.p1, c.p2)?;
        let collapsed = nontriviality < self.params.nontrivial_floor;
        Ok(CriticalPointCandidate {
            level: j_value(&x, self.mf)?,
            residual,
            nontriviality,
            linf_u: x.u.norm_linf(),
            linf_v: x.v.norm_linf(),
            iterations,
            converged: converged && !collapsed,
            collapsed,
            fields: x,
            provenance,
        })
    }
}

/// Path-deformation search from `(0, 0)` to the certificate endpoint.
///
/// Each iteration takes the highest path point (lowest index on ties),
/// maximizes `J` along the local path tangent, then moves it and its
/// stencil neighbours by an Armijo step along the Riesz gradient with the
/// tangential part removed. The path is redistributed by `W` arc length
/// every `reparam_every` iterations. The search stops when the maximum's
/// residual, weighted by `min(1, 10 / (1 + ||x||_X))`, is at most `tol`.
pub fn mountain_pass_search(
    mf: &ModelFunctions,
    cert: &GeometryCertificate,
    params: &MountainPassParams,
) -> Result<CriticalPointCandidate> {
    let end = match (&cert.endpoint, cert.validated) {
        (Some(e), true) => e,
        _ => return Err(Error::GeometryNotValidated { rho0: cert.rho0 }),
    };
    let searcher = Searcher {
        mf,
        params,
        sym: SymmetryClass::default(),
    };
    searcher.run(
        end,
        Provenance {
            method: "mountain_pass".into(),
            seed: None,
            mode: None,
            path_points: params.path_points,
        },
    )
}

/// Path search between `(0, 0)` and a given endpoint inside a symmetry class.
pub fn mountain_pass_between(
    mf: &ModelFunctions,
    end: &FieldPair,
    sym: SymmetryClass,
    params: &MountainPassParams,
    provenance: Provenance,
) -> Result<CriticalPointCandidate> {
    Searcher { mf, params, sym }.run(end, provenance)
}

/// Modes `(k, l)` ordered by frequency `k^2 + l^2`, then by `k`.
pub fn mode_sequence(dim: usize, count: usize) -> Vec<(usize, usize)> {
    if dim == 1 {
        return (1..=count).map(|k| (k, 1)).collect();
    }
    let side = (count as f64).sqrt().ceil() as usize + 2;
    let mut modes: Vec<(usize, usize)> = (1..=side)
        .flat_map(|k| (1..=side).map(move |l| (k, l)))
        .collect();
    modes.sort_by_key(|&(k, l)| (k * k + l * l, k));
    modes.truncate(count);
    modes
}

fn mode_field(grid: &Arc<Grid>, k: usize, l: usize) -> GridFunction {
    let dim = grid.dim();
    GridFunction::from_fn(grid, |[x, y]| {
        let sx = (k as f64 * PI * x).sin();
        if dim == 1 {
            sx
        } else {
            sx * (l as f64 * PI * y).sin()
        }
    })
}

fn start_endpoint(
    mf: &ModelFunctions,
    grid: &Arc<Grid>,
    mode: (usize, usize),
    sym: SymmetryClass,
    seed: u64,
) -> Result<FieldPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = mode_field(grid, mode.0, mode.1);
    let scale = base.norm_linf();
    let mut u = base.clone();
    u.axpy(0.05 * scale, &random_modes(grid, &mut rng));
    let v = if mf.cfg.is_coupled() {
        let mut v = base;
        v.axpy(0.05 * scale, &random_modes(grid, &mut rng));
        v
    } else {
        GridFunction::zeros(grid)
    };
    let mut dir = FieldPair { u, v };
    sym.project_pair(&mut dir);
    let (tau, _) = scale_until_negative(mf, &dir)?;
    Ok(dir.scaled(tau))
}

fn is_duplicate(a: &FieldPair, b: &FieldPair, mf: &ModelFunctions, tol: f64) -> bool {
    let (p1, p2) = (mf.cfg.p1, mf.cfg.p2);
    let same = a.plus(-1.0, b).norm_w(p1, p2).unwrap_or(f64::INFINITY);
    let flipped = a.plus(1.0, b).norm_w(p1, p2).unwrap_or(f64::INFINITY);
    same < tol || flipped < tol
}

/// Multi-start search through `count` sign-structured starting modes.
///
/// Search `i` starts from mode `i` of [`mode_sequence`] perturbed with seed
/// `seed + i`, confined to that mode's reflection-parity class. Converged,
/// nontrivial results are deduplicated (up to a global sign) in seed order
/// and returned sorted by level.
pub fn multiplicity_search(
    mf: &ModelFunctions,
    grid: &Arc<Grid>,
    count: usize,
    seed: u64,
    params: &MountainPassParams,
) -> Result<Vec<CriticalPointCandidate>> {
    let modes = mode_sequence(grid.dim(), count);
    let threads = if params.threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        params.threads
    }
    .clamp(1, modes.len().max(1));

    let run_one = |i: usize| -> Result<Option<CriticalPointCandidate>> {
        let mode = modes[i];
        let sym = SymmetryClass::of_mode(grid.dim(), mode.0, mode.1);
        let s = seed.wrapping_add(i as u64);
        let end = match start_endpoint(mf, grid, mode, sym, s) {
            Ok(e) => e,
            Err(Error::NoNegativeEnergy { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let prov = Provenance {
            method: "multi".into(),
            seed: Some(s),
            mode: Some(mode),
            path_points: params.path_points,
        };
        mountain_pass_between(mf, &end, sym, params, prov).map(Some)
    };

    let mut results: Vec<Option<Result<Option<CriticalPointCandidate>>>> =
        (0..modes.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunks: Vec<Vec<usize>> = (0..threads)
            .map(|t| (t..modes.len()).step_by(threads).collect())
            .collect();
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|idx| {
                let run_one = &run_one;
                scope.spawn(move || idx.into_iter().map(|i| (i, run_one(i))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("search thread panicked") {
                results[i] = Some(r);
            }
        }
    });

    let mut found: Vec<CriticalPointCandidate> = Vec::new();
    for r in results.into_iter().flatten() {
        let Some(cand) = r? else { continue };
        if !cand.converged || cand.collapsed {
            continue;
        }
        if found
            .iter()
            .any(|f| is_duplicate(&f.fields, &cand.fields, mf, params.dedup_tol))
        {
            continue;
        }
        found.push(cand);
    }
    found.sort_by(|a, b| a.level.total_cmp(&b.level));
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub level: f64,
    #[serde(serialize_with = "serial::ext_f64")]
    pub residual: f64,
    pub nontriviality: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    /// `||(u, v)||_W + |u|_inf + |v|_inf`
    pub norm_x: f64,
    /// `residual * (1 + norm_x)`
    #[serde(serialize_with = "serial::ext_f64")]
    pub cerami_residual: f64,
    pub trivial: bool,
    pub positive_level: bool,
}

impl Verification {
    /// Nontrivial, positive level and Cerami-weighted residual within `10 tol`.
    pub fn passes(&self, tol: f64) -> bool {
        !self.trivial && self.positive_level && self.cerami_residual <= 10.0 * tol
    }
}

/// Recomputes level, residuals and bounds of a candidate from its fields.
pub fn verify_candidate(
    cand: &CriticalPointCandidate,
    mf: &ModelFunctions,
    nontrivial_floor: f64,
) -> Result<Verification> {
    let x = &cand.fields;
    let c = &mf.cfg;
    let level = j_value(x, mf)?;
    let (_, residual) = gradient_representative(x, mf)?;
    let nontriviality = x.norm_w(c.p1, c.p2)?;
    let norm_x = x.norm_x(c.p1, c.p2)?;
    Ok(Verification {
        level,
        residual,
        nontriviality,
        linf_u: x.u.norm_linf(),
        linf_v: x.v.norm_linf(),
        norm_x,
        cerami_residual: residual * (1.0 + norm_x),
        trivial: nontriviality < nontrivial_floor,
        positive_level: level > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{first_eigenpair, EigenOptions};
    use crate::exponents::ExponentConfig;

    fn cfg_b() -> ExponentConfig {
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

    #[test]
    fn endpoint_and_zero_nonlinearity() {
        let grid = Grid::new(2, 17).unwrap();
        let eig = first_eigenpair(2.0, &grid, &EigenOptions::default()).unwrap();
        let mf = ModelFunctions::new(cfg_b());
        let e = find_endpoint(&mf, &eig).unwrap();
        let j = j_value(&e, &mf).unwrap();
        assert!(j < -1.0);
        assert!(j_value(&e.scaled(2.0), &mf).unwrap() < j);
        let flat = mf.with_g_scale(0.0);
        assert!(matches!(
            find_endpoint(&flat, &eig),
            Err(Error::NoNegativeEnergy { .. })
        ));
    }

    #[test]
    fn sphere_samples_lie_on_sphere() {
        let grid = Grid::new(2, 17).unwrap();
        let mf = ModelFunctions::new(cfg_b());
        for s in sphere_samples(&mf, &grid, 0.1, 16, 3).unwrap() {
            assert!((ell_norm(&s, &mf.cfg).unwrap() - 0.1).abs() <= 1e-8 * 0.1);
        }
    }

    #[test]
    fn symmetry_projection() {
        let grid = Grid::new(2, 9).unwrap();
        let mut f = mode_field(&grid, 2, 1);
        let orig = f.clone();
        SymmetryClass::of_mode(2, 2, 1).project(&mut f);
        for (a, b) in f.values().iter().zip(orig.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let mut g = mode_field(&grid, 1, 1);
        SymmetryClass::of_mode(2, 2, 1).project(&mut g);
        assert!(g.norm_linf() < 1e-15);
    }

    #[test]
    fn modes_by_frequency() {
        assert_eq!(mode_sequence(1, 3), vec![(1, 1), (2, 1), (3, 1)]);
        assert_eq!(mode_sequence(2, 4), vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn small_mountain_pass_in_one_dimension() {
        let grid = Grid::new(1, 65).unwrap();
        let eig = first_eigenpair(2.0, &grid, &EigenOptions::default()).unwrap();
        let mf = ModelFunctions::new(cfg_b());
        let cert = certify_geometry(&mf, &eig, 0.1, 32, 1).unwrap();
        assert!(cert.validated);
        let cand = mountain_pass_search(&mf, &cert, &MountainPassParams::default()).unwrap();
        assert!(
            cand.converged,
            "residual {} after {}",
            cand.residual, cand.iterations
        );
        assert!(cand.level >= cert.rho0);
        let ver = verify_candidate(&cand, &mf, 1e-3).unwrap();
        assert!(ver.passes(1e-6), "{ver:?}");
        let neg = CriticalPointCandidate {
            fields: -cand.fields.clone(),
            ..cand.clone()
        };
        let vn = verify_candidate(&neg, &mf, 1e-3).unwrap();
        assert_eq!(vn.level, ver.level);
        assert_eq!(vn.residual, ver.residual);
    }
}
