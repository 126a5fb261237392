//! Coefficient functions of the model system and sampled structural checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exponents::{ExponentConfig, ModelConstants};
use crate::serial;

/// Pointwise evaluators of the energy densities and their partial derivatives.
///
/// Component `0` is the `A`-family acting on `u`, component `1` the
/// `B`-family acting on `v`. Implementations must be deterministic and finite
/// on finite inputs. [`ModelFunctions`] is the built-in implementation;
/// other coefficient families plug in through this trait.
pub trait Evaluators: Send + Sync {
    /// `A(t, xi)` (component 0) or `B(t, xi)` (component 1).
    fn density(&self, comp: usize, t: f64, xi: &[f64]) -> f64;
    /// `a(t, xi)` or `b(t, xi)`, written to `flux`.
    fn flux(&self, comp: usize, t: f64, xi: &[f64], flux: &mut [f64]);
    /// `A_t(t, xi)` or `B_t(t, xi)`.
    fn density_t(&self, comp: usize, t: f64, xi: &[f64]) -> f64;

    fn g(&self, u: f64, v: f64) -> f64;
    fn g_u(&self, u: f64, v: f64) -> f64;
    fn g_v(&self, u: f64, v: f64) -> f64;

    /// `(A, A_t)` with `a` written to `flux`, in one pass.
    fn principal(&self, comp: usize, t: f64, xi: &[f64], flux: &mut [f64]) -> (f64, f64) {
        self.flux(comp, t, xi, flux);
        (self.density(comp, t, xi), self.density_t(comp, t, xi))
    }
}

/// `|t|^e` with `0^0 = 1`.
#[inline]
fn apow(t: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        t.abs().powf(e)
    }
}

/// `|t|^(e-1) t`, taken as `0` at `t = 0`.
#[inline]
fn spow(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(e - 1.0) * t
    }
}

#[inline]
fn norm2(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum()
}

/// The explicit model class
/// `A = (1/p1)(1 + |t|^{s1 p1}) |xi|^{p1}`, `B` likewise, and
/// `G = |u|^{q1}/q1 + |v|^{q2}/q2 + c* |u|^{g1} |v|^{g2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelFunctions {
    pub cfg: ExponentConfig,
    /// Smoothing of `|xi|^{p-2}` for `p < 2`; zero gives the exact model.
    pub epsilon_reg: f64,
    /// Multiplier on `G`; `1` for the model, `0` removes the nonlinearity.
    pub g_scale: f64,
}

pub const DEFAULT_EPSILON_REG: f64 = 1e-8;

impl ModelFunctions {
    pub fn new(cfg: ExponentConfig) -> Self {
        Self {
            cfg,
            epsilon_reg: DEFAULT_EPSILON_REG,
            g_scale: 1.0,
        }
    }

    pub fn exact(cfg: ExponentConfig) -> Self {
        Self {
            epsilon_reg: 0.0,
            ..Self::new(cfg)
        }
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon_reg = eps;
        self
    }

    pub fn with_g_scale(mut self, scale: f64) -> Self {
        self.g_scale = scale;
        self
    }

    #[inline]
    fn ps(&self, comp: usize) -> (f64, f64) {
        (self.cfg.p(comp), self.cfg.s(comp))
    }

    /// `|xi|^p`, regularized to `(|xi|^2 + eps^2)^{p/2}` when `p < 2`.
    #[inline]
    fn grad_power(&self, p: f64, r2: f64) -> f64 {
        if p < 2.0 && self.epsilon_reg > 0.0 {
            (r2 + self.epsilon_reg * self.epsilon_reg).powf(0.5 * p)
        } else {
            r2.powf(0.5 * p)
        }
    }

    /// `|xi|^{p-2}`, regularized for `p < 2`; zero at `xi = 0` when exact.
    #[inline]
    fn grad_weight(&self, p: f64, r2: f64) -> f64 {
        if p == 2.0 {
            1.0
        } else if p < 2.0 && self.epsilon_reg > 0.0 {
            (r2 + self.epsilon_reg * self.epsilon_reg).powf(0.5 * (p - 2.0))
        } else if r2 == 0.0 {
            0.0
        } else {
            r2.powf(0.5 * (p - 2.0))
        }
    }

    pub fn a_eval(&self, t: f64, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; xi.len()];
        self.flux(0, t, xi, &mut out);
        out
    }

    pub fn b_eval(&self, t: f64, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; xi.len()];
        self.flux(1, t, xi, &mut out);
        out
    }

    pub fn big_a(&self, t: f64, xi: &[f64]) -> f64 {
        self.density(0, t, xi)
    }

    pub fn big_b(&self, t: f64, xi: &[f64]) -> f64 {
        self.density(1, t, xi)
    }

    pub fn a_t(&self, t: f64, xi: &[f64]) -> f64 {
        self.density_t(0, t, xi)
    }

    pub fn b_t(&self, t: f64, xi: &[f64]) -> f64 {
        self.density_t(1, t, xi)
    }
}

impl Evaluators for ModelFunctions {
    /// Always the exact density; regularization never enters energies.
    fn density(&self, comp: usize, t: f64, xi: &[f64]) -> f64 {
        let (p, s) = self.ps(comp);
        (1.0 + apow(t, s * p)) * norm2(xi).powf(0.5 * p) / p
    }

    fn flux(&self, comp: usize, t: f64, xi: &[f64], flux: &mut [f64]) {
        let (p, s) = self.ps(comp);
        let w = (1.0 + apow(t, s * p)) * self.grad_weight(p, norm2(xi));
        for (f, x) in flux.iter_mut().zip(xi) {
            *f = w * x;
        }
    }

    fn density_t(&self, comp: usize, t: f64, xi: &[f64]) -> f64 {
        let (p, s) = self.ps(comp);
        if s == 0.0 {
            return 0.0;
        }
        s * spow(t, s * p - 1.0) * self.grad_power(p, norm2(xi))
    }

    fn g(&self, u: f64, v: f64) -> f64 {
        let c = &self.cfg;
        let mut g = apow(u, c.q1) / c.q1 + apow(v, c.q2) / c.q2;
        if c.c_star != 0.0 {
            g += c.c_star * apow(u, c.gamma1) * apow(v, c.gamma2);
        }
        self.g_scale * g
    }

    fn g_u(&self, u: f64, v: f64) -> f64 {
        let c = &self.cfg;
        let mut d = spow(u, c.q1 - 1.0);
        if c.c_star != 0.0 {
            d += c.c_star * c.gamma1 * spow(u, c.gamma1 - 1.0) * apow(v, c.gamma2);
        }
        self.g_scale * d
    }

    fn g_v(&self, u: f64, v: f64) -> f64 {
        let c = &self.cfg;
        let mut d = spow(v, c.q2 - 1.0);
        if c.c_star != 0.0 {
            d += c.c_star * c.gamma2 * apow(u, c.gamma1) * spow(v, c.gamma2 - 1.0);
        }
        self.g_scale * d
    }

    fn principal(&self, comp: usize, t: f64, xi: &[f64], flux: &mut [f64]) -> (f64, f64) {
        let (p, s) = self.ps(comp);
        let r2 = norm2(xi);
        let coef = 1.0 + apow(t, s * p);
        let w = coef * self.grad_weight(p, r2);
        for (f, x) in flux.iter_mut().zip(xi) {
            *f = w * x;
        }
        let exact = r2.powf(0.5 * p);
        let a_t = if s == 0.0 {
            0.0
        } else {
            s * spow(t, s * p - 1.0) * self.grad_power(p, r2)
        };
        (coef * exact / p, a_t)
    }
}

// ---------------------------------------------------------------------------
// Sampled structural hypotheses

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerParams {
    pub samples: usize,
    pub seed: u64,
    /// Half-width of the sampling box for `t` and each component of `xi`.
    pub box_half_width: f64,
    /// Outer radius of the `(u, v)` annulus used for the `g3` records.
    pub uv_radius: f64,
    /// Number of geometric annuli for the `g4`/`g5` ratio trends.
    pub annuli: u32,
    /// First eigenvalues `(lambda_{1,1}, lambda_{2,1})` for the `g4` threshold.
    pub eigenvalues: Option<(f64, f64)>,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
            box_half_width: 10.0,
            uv_radius: 10.0,
            annuli: 10,
            eigenvalues: None,
        }
    }
}

/// Relative margins within this band of zero are reported as exactly zero.
pub const EQUALITY_BAND: f64 = 64.0 * f64::EPSILON;

/// Worst sampled margin of one pointwise inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledBound {
    pub id: String,
    pub relation: String,
    /// Smallest relative margin `(lhs - rhs) / scale` over all samples.
    pub min_margin: f64,
    /// Largest relative margin; equalities hold identically when both are zero.
    pub max_margin: f64,
    /// Sample attaining the minimum: `(t, xi..)` or `(u, v)`.
    pub argmin: Vec<f64>,
    pub samples: usize,
}

impl SampledBound {
    pub fn holds(&self) -> bool {
        self.min_margin >= 0.0
    }
}

/// Extremal ratio over a family of annuli `|(u, v)| = r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTrend {
    pub id: String,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Ratios move monotonically in the expected direction.
    pub monotone: bool,
    #[serde(serialize_with = "serial::ext_f64")]
    pub threshold: f64,
    /// The ratio at the last annulus lies on the expected side of `threshold`.
    pub final_side_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralSample {
    pub bounds: Vec<SampledBound>,
    pub trends: Vec<RatioTrend>,
}

impl StructuralSample {
    pub fn bound(&self, id: &str) -> Option<&SampledBound> {
        self.bounds.iter().find(|b| b.id == id)
    }

    pub fn trend(&self, id: &str) -> Option<&RatioTrend> {
        self.trends.iter().find(|t| t.id == id)
    }
}

fn relative(lhs: f64, rhs: f64, scale: f64) -> f64 {
    let scale = scale.abs().max(lhs.abs()).max(rhs.abs());
    if scale == 0.0 {
        return 0.0;
    }
    let m = (lhs - rhs) / scale;
    if m.abs() <= EQUALITY_BAND {
        0.0
    } else {
        m
    }
}

struct Tracker {
    id: String,
    relation: String,
    min: f64,
    max: f64,
    argmin: Vec<f64>,
    count: usize,
}

impl Tracker {
    fn new(id: String, relation: &str) -> Self {
        Self {
            id,
            relation: relation.to_string(),
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            argmin: Vec::new(),
            count: 0,
        }
    }

    fn observe(&mut self, margin: f64, at: &[f64]) {
        self.count += 1;
        self.max = self.max.max(margin);
        // first strict improvement wins, so ties keep the earliest sample
        if margin < self.min || self.argmin.is_empty() {
            self.min = margin;
            self.argmin = at.to_vec();
        }
    }

    fn finish(self) -> SampledBound {
        SampledBound {
            id: self.id,
            relation: self.relation,
            min_margin: self.min,
            max_margin: self.max,
            argmin: self.argmin,
            samples: self.count,
        }
    }
}

/// Samples the pointwise structural inequalities of the model at its
/// closed-form constants, always with the exact (unregularized) model.
pub fn sample_structural_hypotheses(
    mf: &ModelFunctions,
    constants: &ModelConstants,
    params: &SamplerParams,
) -> StructuralSample {
    let exact = ModelFunctions {
        epsilon_reg: 0.0,
        ..*mf
    };
    sample_structural_hypotheses_with(&exact, &mf.cfg, constants, params)
}

/// Sampling harness for any [`Evaluators`] implementation.
pub fn sample_structural_hypotheses_with<E: Evaluators + ?Sized>(
    ev: &E,
    cfg: &ExponentConfig,
    k: &ModelConstants,
    params: &SamplerParams,
) -> StructuralSample {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let dim = cfg.n.max(1) as usize;
    let w = params.box_half_width;
    let r_big = k.r;
    let alpha2 = (1.0 / cfg.p1).min(1.0 / cfg.p2);

    let mut bounds = Vec::new();
    let mut xi = vec![0.0; dim];
    let mut xi2 = vec![0.0; dim];
    let mut fl = vec![0.0; dim];
    let mut fl2 = vec![0.0; dim];
    let mut at = vec![0.0; dim + 1];

    for comp in 0..2 {
        let idx = comp + 1;
        let (p, s, th) = (cfg.p(comp), cfg.s(comp), cfg.theta(comp));
        let mu2 = k.mu2(comp);
        let mut h2 = Tracker::new(format!("h2[{idx}]"), "eta1 a.xi - A >= 0 for |(t,xi)| >= R");
        let mut h3 = Tracker::new(format!("h3[{idx}]"), "a.xi - mu0 (1+|t|^{sp}) |xi|^p >= 0");
        let mut h4 = Tracker::new(
            format!("h4[{idx}]"),
            "a.xi + A_t t - mu1 a.xi >= 0 for |(t,xi)| >= R",
        );
        let mut h5 = Tracker::new(
            format!("h5[{idx}]"),
            "A - th a.xi - th A_t t - mu2 a.xi >= 0 for |(t,xi)| >= R",
        );
        let mut h6 = Tracker::new(format!("h6[{idx}]"), "(a(xi) - a(xi')).(xi - xi') > 0");
        let mut h7 = Tracker::new(format!("h7[{idx}]"), "A - alpha2 (1+|t|^{sp}) |xi|^p >= 0");
        let mut h8 = Tracker::new(format!("h8[{idx}]"), "A(-t,-xi) - A(t,xi) = 0");

        for _ in 0..params.samples {
            let t = rng.gen_range(-w..w);
            for x in xi.iter_mut() {
                *x = rng.gen_range(-w..w);
            }
            for x in xi2.iter_mut() {
                *x = rng.gen_range(-w..w);
            }
            at[0] = t;
            at[1..].copy_from_slice(&xi);
            let big = ev.density(comp, t, &xi);
            ev.flux(comp, t, &xi, &mut fl);
            let at_t = ev.density_t(comp, t, &xi);
            let adotxi: f64 = fl.iter().zip(&xi).map(|(a, b)| a * b).sum();
            let weight = (1.0 + apow(t, s * p)) * norm2(&xi).powf(0.5 * p);

            h3.observe(relative(adotxi, k.mu0 * weight, weight), &at);
            h7.observe(relative(big, alpha2 * weight, weight), &at);

            let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
            let diff = (ev.density(comp, -t, &neg) - big).abs();
            h8.observe(0.0 - diff, &at);

            ev.flux(comp, t, &xi2, &mut fl2);
            let mut num = 0.0;
            let (mut da, mut dx) = (0.0, 0.0);
            for d in 0..dim {
                let a = fl[d] - fl2[d];
                let x = xi[d] - xi2[d];
                num += a * x;
                da += a * a;
                dx += x * x;
            }
            if dx > 0.0 && da > 0.0 {
                h6.observe(num / (da.sqrt() * dx.sqrt()), &at);
            }

            if (t * t + norm2(&xi)).sqrt() >= r_big {
                h2.observe(relative(k.eta1 * adotxi, big, adotxi), &at);
                h4.observe(relative(adotxi + at_t * t, k.mu1 * adotxi, adotxi), &at);
                let lhs = big - th * adotxi - th * at_t * t;
                h5.observe(relative(lhs, mu2 * adotxi, big.max(adotxi)), &at);
            }
        }
        bounds.extend([h2, h3, h4, h5, h6, h7, h8].map(Tracker::finish));
    }

    // `g3` and `g6` records on the annulus R <= |(u, v)| <= uv_radius
    let mut g3_pos = Tracker::new("g3.pos".into(), "G > 0 for |(u,v)| >= R");
    let mut g3_ar = Tracker::new(
        "g3.ar".into(),
        "th1 G_u u + th2 G_v v - G >= 0 for |(u,v)| >= R",
    );
    let mut g6 = Tracker::new("g6".into(), "G(-u,-v) - G(u,v) = 0");
    let (th1, th2) = (cfg.theta1, cfg.theta2);
    for _ in 0..params.samples {
        let r = rng.gen_range(r_big..params.uv_radius.max(r_big));
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let (u, v) = (r * phi.cos(), r * phi.sin());
        let g = ev.g(u, v);
        let lhs_u = th1 * ev.g_u(u, v) * u;
        let lhs_v = th2 * ev.g_v(u, v) * v;
        g3_pos.observe(g, &[u, v]);
        g3_ar.observe(
            relative(lhs_u + lhs_v, g, lhs_u.abs() + lhs_v.abs()),
            &[u, v],
        );
        g6.observe(0.0 - (ev.g(-u, -v) - g).abs(), &[u, v]);
    }
    bounds.extend([g3_pos, g3_ar, g6].map(Tracker::finish));

    // ratio trends over geometric annuli
    let dirs = (params.samples / params.annuli.max(1) as usize).clamp(16, 4096);
    let angles: Vec<f64> = (0..dirs)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    let (p1, p2) = (cfg.p1, cfg.p2);
    let mut small_r = Vec::new();
    let mut small_ratio = Vec::new();
    let mut large_r = Vec::new();
    let mut large_ratio = Vec::new();
    for level in 1..=params.annuli {
        let r = 0.5f64.powi(level as i32);
        let worst = angles
            .iter()
            .map(|phi| {
                let (u, v) = (r * phi.cos(), r * phi.sin());
                ev.g(u, v) / (apow(u, p1) + apow(v, p2))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        small_r.push(r);
        small_ratio.push(worst);

        let r = 2f64.powi(level as i32);
        let worst = angles
            .iter()
            .map(|phi| {
                let (u, v) = (r * phi.cos(), r * phi.sin());
                ev.g(u, v) / (apow(u, 1.0 / th1) + apow(v, 1.0 / th2))
            })
            .fold(f64::INFINITY, f64::min);
        large_r.push(r);
        large_ratio.push(worst);
    }
    let threshold = params
        .eigenvalues
        .map(|(l1, l2)| alpha2 * l1.min(l2))
        .unwrap_or(f64::INFINITY);
    let g4 = RatioTrend {
        id: "g4".into(),
        monotone: small_ratio.windows(2).all(|w| w[1] <= w[0]),
        final_side_ok: small_ratio.last().is_some_and(|&x| x < threshold),
        radii: small_r,
        ratios: small_ratio,
        threshold,
    };
    let g5 = RatioTrend {
        id: "g5".into(),
        monotone: large_ratio.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)),
        final_side_ok: large_ratio.last().is_some_and(|&x| x > 0.0),
        radii: large_r,
        ratios: large_ratio,
        threshold: 0.0,
    };

    StructuralSample {
        bounds,
        trends: vec![g4, g5],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{compute_model_constants, CheckOptions};

    fn cfg_a() -> ExponentConfig {
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

    #[test]
    fn vanishes_at_origin() {
        let mf = ModelFunctions::new(cfg_a());
        assert_eq!(mf.big_a(0.0, &[0.0, 0.0]), 0.0);
        assert_eq!(mf.a_eval(0.0, &[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(mf.a_t(0.0, &[0.0, 0.0]), 0.0);
        assert_eq!(mf.g(0.0, 0.0), 0.0);
        assert_eq!(mf.g_u(0.0, 0.0), 0.0);
        assert_eq!(mf.g_v(0.0, 0.0), 0.0);
        let exact = ModelFunctions::exact(cfg_a());
        assert_eq!(exact.a_eval(0.0, &[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn substitution_examples() {
        let mut cfg = cfg_a();
        cfg.p1 = 2.0;
        cfg.s1 = 1.0;
        let mf = ModelFunctions::new(cfg);
        assert_eq!(mf.big_a(2.0, &[3.0, 4.0]), 62.5);

        let cfg = ExponentConfig {
            q1: 4.0,
            q2: 4.0,
            gamma1: 2.0,
            gamma2: 2.0,
            c_star: 1.0,
            ..cfg_a()
        };
        let mf = ModelFunctions::new(cfg);
        assert_eq!(mf.g(1.0, 2.0), 8.25);
    }

    #[test]
    fn flux_is_p_homogeneous() {
        let mf = ModelFunctions::exact(cfg_a());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(-3.0..3.0);
            let xi = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let a = mf.a_eval(t, &xi);
            let lhs = a[0] * xi[0] + a[1] * xi[1];
            let rhs = mf.cfg.p1 * mf.big_a(t, &xi);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }

    /// Central differences against the analytic partials; the error must
    /// shrink like step^2.
    #[test]
    fn partials_match_central_differences() {
        let mf = ModelFunctions::exact(cfg_a());
        let (u, v) = (0.7, -1.3);
        let (t, xi) = (0.8, [0.6, -1.1]);
        let mut prev: Option<[f64; 4]> = None;
        for k in 2..5 {
            let h = 10f64.powi(-k);
            let fd_u = (mf.g(u + h, v) - mf.g(u - h, v)) / (2.0 * h);
            let fd_v = (mf.g(u, v + h) - mf.g(u, v - h)) / (2.0 * h);
            let fd_t = (mf.big_a(t + h, &xi) - mf.big_a(t - h, &xi)) / (2.0 * h);
            let fd_x =
                (mf.big_a(t, &[xi[0] + h, xi[1]]) - mf.big_a(t, &[xi[0] - h, xi[1]])) / (2.0 * h);
            let err = [
                (fd_u - mf.g_u(u, v)).abs(),
                (fd_v - mf.g_v(u, v)).abs(),
                (fd_t - mf.a_t(t, &xi)).abs(),
                (fd_x - mf.a_eval(t, &xi)[0]).abs(),
            ];
            if let Some(p) = prev {
                for i in 0..4 {
                    let slope = (p[i] / err[i]).log10();
                    assert!((1.8..2.2).contains(&slope), "component {i}: slope {slope}");
                }
            }
            prev = Some(err);
        }
    }

    #[test]
    fn regularized_flux_converges_to_exact() {
        let cfg = cfg_a();
        let exact = ModelFunctions::exact(cfg);
        let xi = [0.3, -0.2];
        let a0 = exact.a_eval(0.5, &xi);
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
            let a = ModelFunctions::exact(cfg)
                .with_epsilon(eps)
                .a_eval(0.5, &xi);
            let err = ((a[0] - a0[0]).powi(2) + (a[1] - a0[1]).powi(2)).sqrt();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn evenness() {
        let mf = ModelFunctions::new(cfg_a());
        for (t, x, y) in [(0.3, 1.0, -2.0), (-4.0, 0.1, 0.0), (2.5, -3.0, 7.0)] {
            assert_eq!(mf.big_a(-t, &[-x, -y]), mf.big_a(t, &[x, y]));
            assert_eq!(mf.g(-t, -x), mf.g(t, x));
        }
    }

    #[test]
    fn zero_g_scale_removes_nonlinearity() {
        let mf = ModelFunctions::new(cfg_a()).with_g_scale(0.0);
        assert_eq!(mf.g(3.0, 4.0), 0.0);
        assert_eq!(mf.g_u(3.0, 4.0), 0.0);
    }

    #[test]
    fn sampled_hypotheses_small_run() {
        let cfg = cfg_a();
        let k = compute_model_constants(&cfg, CheckOptions::default()).unwrap();
        let params = SamplerParams {
            samples: 2000,
            seed: 11,
            eigenvalues: Some((10.0, 10.0)),
            ..Default::default()
        };
        let rep = sample_structural_hypotheses(&ModelFunctions::new(cfg), &k, &params);
        for id in ["h3[1]", "h3[2]", "g6", "h8[1]"] {
            assert_eq!(rep.bound(id).unwrap().min_margin, 0.0, "{id}");
        }
        for b in &rep.bounds {
            assert!(b.holds(), "{} margin {}", b.id, b.min_margin);
        }
        let g4 = rep.trend("g4").unwrap();
        assert!(g4.monotone && g4.final_side_ok);
        let g5 = rep.trend("g5").unwrap();
        assert!(g5.final_side_ok);
        // deterministic
        let again = sample_structural_hypotheses(&ModelFunctions::new(cfg), &k, &params);
        assert_eq!(rep, again);
    }
}
