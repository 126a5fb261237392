//! Uniform grids on the unit interval and unit square.
//!
//! Elements are intervals (1D) or axis-aligned square cells with bilinear
//! shape functions (2D). Every integral uses one quadrature point per element,
//! the element center: field values are interpolated there and gradients are
//! the shape-function gradients evaluated there.

use std::io::{self, Write};
use std::ops::{Index, Neg};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::exponents::ExponentConfig;
use crate::linalg::BandedSpd;

/// Gradient of a field on one element (`[dx, 0]` in 1D).
pub type Grad = [f64; 2];

#[derive(Debug)]
pub struct Grid {
    dim: usize,
    n: usize,
    h: f64,
    stiffness: OnceLock<Result<BandedSpd>>,
}

impl Grid {
    /// `n` nodes per axis on `(0,1)^dim`, `dim` in {1, 2}, `n >= 3`.
    pub fn new(dim: usize, n: usize) -> Result<Arc<Grid>> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidParameter {
                name: "dimension",
                value: dim as f64,
                reason: "grid dimension must be 1 or 2",
            });
        }
        if n < 3 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "need at least 3 nodes per axis",
            });
        }
        Ok(Arc::new(Grid {
            dim,
            n,
            h: 1.0 / (n - 1) as f64,
            stiffness: OnceLock::new(),
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn element_count(&self) -> usize {
        (self.n - 1).pow(self.dim as u32)
    }

    pub fn element_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Number of interior (free) nodes.
    pub fn interior_count(&self) -> usize {
        (self.n - 2).pow(self.dim as u32)
    }

    pub fn node_coords(&self, node: usize) -> [f64; 2] {
        let i = node % self.n;
        let j = node / self.n;
        match self.dim {
            1 => [i as f64 * self.h, 0.0],
            _ => [i as f64 * self.h, j as f64 * self.h],
        }
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let last = self.n - 1;
        let i = node % self.n;
        if self.dim == 1 {
            return i == 0 || i == last;
        }
        let j = node / self.n;
        i == 0 || i == last || j == 0 || j == last
    }

    /// Position of `node` among the interior unknowns.
    pub fn interior_index(&self, node: usize) -> Option<usize> {
        if self.is_boundary(node) {
            return None;
        }
        let m = self.n - 2;
        let i = node % self.n;
        let j = node / self.n;
        Some(match self.dim {
            1 => i - 1,
            _ => (j - 1) * m + (i - 1),
        })
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |&k| !self.is_boundary(k))
    }

    /// Node indices of element `e` and how many of them are used.
    #[inline]
    pub fn element_nodes(&self, e: usize) -> ([usize; 4], usize) {
        match self.dim {
            1 => ([e, e + 1, 0, 0], 2),
            _ => {
                let cells = self.n - 1;
                let (ci, cj) = (e % cells, e / cells);
                let k = cj * self.n + ci;
                ([k, k + 1, k + self.n, k + self.n + 1], 4)
            }
        }
    }

    pub fn element_center(&self, e: usize) -> [f64; 2] {
        match self.dim {
            1 => [(e as f64 + 0.5) * self.h, 0.0],
            _ => {
                let cells = self.n - 1;
                [
                    ((e % cells) as f64 + 0.5) * self.h,
                    ((e / cells) as f64 + 0.5) * self.h,
                ]
            }
        }
    }

    /// Shape-function values and gradients at the element center, in the
    /// node order of [`Grid::element_nodes`].
    #[inline]
    pub fn center_shape(&self) -> ([f64; 4], [Grad; 4]) {
        let h = self.h;
        match self.dim {
            1 => (
                [0.5, 0.5, 0.0, 0.0],
                [[-1.0 / h, 0.0], [1.0 / h, 0.0], [0.0; 2], [0.0; 2]],
            ),
            _ => {
                let g = 0.5 / h;
                ([0.25; 4], [[-g, -g], [g, -g], [-g, g], [g, g]])
            }
        }
    }

    #[inline]
    pub fn element_value(&self, values: &[f64], e: usize) -> f64 {
        let (nodes, count) = self.element_nodes(e);
        let sum: f64 = nodes[..count].iter().map(|&k| values[k]).sum();
        sum / count as f64
    }

    #[inline]
    pub fn element_gradient(&self, values: &[f64], e: usize) -> Grad {
        let (nodes, _) = self.element_nodes(e);
        match self.dim {
            1 => [(values[nodes[1]] - values[nodes[0]]) / self.h, 0.0],
            _ => {
                let [a, b, c, d] = nodes.map(|k| values[k]);
                let g = 0.5 / self.h;
                [g * ((b + d) - (a + c)), g * ((c + d) - (a + b))]
            }
        }
    }

    /// Midpoint quadrature of a function of position.
    pub fn integrate<F: Fn([f64; 2]) -> f64>(&self, f: F) -> f64 {
        self.integrate_elements(|e| f(self.element_center(e)))
    }

    /// Midpoint quadrature of an element-wise integrand `f(e)`.
    pub fn integrate_elements<F: FnMut(usize) -> f64>(&self, mut f: F) -> f64 {
        let mut sum = 0.0;
        for e in 0..self.element_count() {
            sum += f(e);
        }
        sum * self.element_volume()
    }

    /// Discrete `H^1_0` inner product `int grad a . grad b`.
    pub fn h1_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.integrate_elements(|e| {
            let ga = self.element_gradient(a, e);
            let gb = self.element_gradient(b, e);
            ga[0] * gb[0] + ga[1] * gb[1]
        })
    }

    fn assemble_stiffness(&self) -> BandedSpd {
        let bw = if self.dim == 1 { 1 } else { self.n - 1 };
        let mut k = BandedSpd::zeros(self.interior_count(), bw);
        let (_, grads) = self.center_shape();
        let vol = self.element_volume();
        for e in 0..self.element_count() {
            let (nodes, count) = self.element_nodes(e);
            for a in 0..count {
                let Some(ia) = self.interior_index(nodes[a]) else {
                    continue;
                };
                for b in 0..=a {
                    let Some(ib) = self.interior_index(nodes[b]) else {
                        continue;
                    };
                    let val = vol * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
                    if val == 0.0 {
                        continue;
                    }
                    if a == b {
                        k.add(ia, ia, val);
                    } else {
                        k.add(ia, ib, val);
                    }
                }
            }
        }
        k
    }

    /// Unfactored discrete Laplacian on the interior nodes.
    pub fn stiffness(&self) -> BandedSpd {
        self.assemble_stiffness()
    }

    fn stiffness_factor(&self) -> Result<&BandedSpd> {
        self.stiffness
            .get_or_init(|| {
                let mut k = self.assemble_stiffness();
                k.factor().map(|_| k)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Solves `K x = rhs` for the interior discrete Laplacian `K`.
    pub fn solve_laplacian(&self, rhs: &mut [f64]) -> Result<()> {
        self.stiffness_factor()?.solve_in_place(rhs);
        Ok(())
    }
}

/// Nodal field with zero Dirichlet trace.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other) && self.values == other.values
    }
}

impl Index<usize> for GridFunction {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

impl GridFunction {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.node_count()],
        }
    }

    /// Nodal interpolant of `f`; boundary nodes are set to zero.
    pub fn from_fn<F: Fn([f64; 2]) -> f64>(grid: &Arc<Grid>, f: F) -> Self {
        let values = (0..grid.node_count())
            .map(|k| {
                if grid.is_boundary(k) {
                    0.0
                } else {
                    f(grid.node_coords(k))
                }
            })
            .collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch("value count differs from node count"));
        }
        if (0..values.len()).any(|k| grid.is_boundary(k) && values[k] != 0.0) {
            return Err(Error::GridMismatch("nonzero boundary value"));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    /// Builds a field from interior unknowns (see [`Grid::interior_index`]).
    pub fn from_interior(grid: &Arc<Grid>, interior: &[f64]) -> Self {
        assert_eq!(interior.len(), grid.interior_count());
        let mut gf = Self::zeros(grid);
        for (k, slot) in grid.interior_nodes().zip(interior) {
            gf.values[k] = *slot;
        }
        gf
    }

    pub fn interior_values(&self) -> Vec<f64> {
        self.grid.interior_nodes().map(|k| self.values[k]).collect()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.dim == other.grid.dim && self.grid.n == other.grid.n)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert!(self.same_grid(x));
        for (s, xv) in self.values.iter_mut().zip(&x.values) {
            *s += a * xv;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for s in &mut self.values {
            *s *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self + a * x`
    pub fn plus(&self, a: f64, x: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(a, x);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Element-center values.
    pub fn midpoint_values(&self) -> Vec<f64> {
        (0..self.grid.element_count())
            .map(|e| self.grid.element_value(&self.values, e))
            .collect()
    }

    /// Element-constant gradients at the quadrature points.
    pub fn gradient_at_quadrature(&self) -> Vec<Grad> {
        (0..self.grid.element_count())
            .map(|e| self.grid.element_gradient(&self.values, e))
            .collect()
    }

    fn check_p(p: f64) -> Result<()> {
        if p >= 1.0 && p.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "norm exponent must be finite and >= 1",
            })
        }
    }

    /// `int |grad f|^p` by midpoint quadrature.
    pub fn grad_power_integral(&self, p: f64) -> f64 {
        let g = &self.grid;
        g.integrate_elements(|e| {
            let d = g.element_gradient(&self.values, e);
            (d[0] * d[0] + d[1] * d[1]).sqrt().powf(p)
        })
    }

    /// `int |f|^p` by midpoint quadrature.
    pub fn power_integral(&self, p: f64) -> f64 {
        let g = &self.grid;
        g.integrate_elements(|e| g.element_value(&self.values, e).abs().powf(p))
    }

    /// `(int |grad f|^p)^(1/p)`
    pub fn norm_w(&self, p: f64) -> Result<f64> {
        Self::check_p(p)?;
        Ok(self.grad_power_integral(p).powf(1.0 / p))
    }

    /// `(int |f|^p)^(1/p)`
    pub fn norm_lp(&self, p: f64) -> Result<f64> {
        Self::check_p(p)?;
        Ok(self.power_integral(p).powf(1.0 / p))
    }

    /// Maximum absolute nodal value.
    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Nodal map `t -> |t|^s t`.
    pub fn power_map(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s,
                reason: "power-map exponent must be finite and >= 0",
            });
        }
        let mut out = self.clone();
        if s != 0.0 {
            for v in &mut out.values {
                *v *= v.abs().powf(s);
            }
        }
        Ok(out)
    }

    /// Nodal truncation `t -> t` if `|t| <= k`, else `k t/|t|`.
    pub fn truncate(&self, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k,
                reason: "truncation level must be > 0",
            });
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v = v.clamp(-k, k);
        }
        Ok(out)
    }

    /// Writes one line per node, `x y value` (`x value` in 1D), row-major.
    pub fn dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        let g = &self.grid;
        for k in 0..g.node_count() {
            let [x, y] = g.node_coords(k);
            match g.dim {
                1 => writeln!(w, "{:.16e} {:.16e}", x, self.values[k])?,
                _ => writeln!(w, "{:.16e} {:.16e} {:.16e}", x, y, self.values[k])?,
            }
        }
        Ok(())
    }
}

impl Neg for GridFunction {
    type Output = GridFunction;
    fn neg(mut self) -> GridFunction {
        for v in &mut self.values {
            *v = -*v;
        }
        self
    }
}

/// The pair `(u, v)` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub u: GridFunction,
    pub v: GridFunction,
}

impl FieldPair {
    pub fn new(u: GridFunction, v: GridFunction) -> Result<Self> {
        if !u.same_grid(&v) {
            return Err(Error::GridMismatch("u and v live on different grids"));
        }
        Ok(Self { u, v })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            u: GridFunction::zeros(grid),
            v: GridFunction::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        self.u.axpy(a, &x.u);
        self.v.axpy(a, &x.v);
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            u: self.u.scaled(a),
            v: self.v.scaled(a),
        }
    }

    pub fn plus(&self, a: f64, x: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(a, x);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// Sum of the two discrete `H^1_0` inner products.
    pub fn h1_inner(&self, other: &Self) -> f64 {
        let g = self.grid();
        g.h1_inner(self.u.values(), other.u.values())
            + g.h1_inner(self.v.values(), other.v.values())
    }

    /// `||u||_{W_1} + ||v||_{W_2}`
    pub fn norm_w(&self, p1: f64, p2: f64) -> Result<f64> {
        Ok(self.u.norm_w(p1)? + self.v.norm_w(p2)?)
    }

    /// `||(u, v)||_W + |u|_inf + |v|_inf`
    pub fn norm_x(&self, p1: f64, p2: f64) -> Result<f64> {
        Ok(self.norm_w(p1, p2)? + self.u.norm_linf() + self.v.norm_linf())
    }

    pub fn truncate_pair(&self, k: f64) -> Result<Self> {
        Ok(Self {
            u: self.u.truncate(k)?,
            v: self.v.truncate(k)?,
        })
    }
}

impl Neg for FieldPair {
    type Output = FieldPair;
    fn neg(self) -> FieldPair {
        FieldPair {
            u: -self.u,
            v: -self.v,
        }
    }
}

/// `l_i(y) = max{ ||y||_{W_i}, || |y|^{s_i} y ||_{W_i} }`
pub fn ell_component(y: &GridFunction, p: f64, s: f64) -> Result<f64> {
    Ok(y.norm_w(p)?.max(y.power_map(s)?.norm_w(p)?))
}

/// `l(u, v) = max{ ||(u,v)||_W, ||(|u|^{s1} u, |v|^{s2} v)||_W }`
pub fn ell_norm(fp: &FieldPair, cfg: &ExponentConfig) -> Result<f64> {
    let plain = fp.norm_w(cfg.p1, cfg.p2)?;
    let powered =
        fp.u.power_map(cfg.s1)?.norm_w(cfg.p1)? + fp.v.power_map(cfg.s2)?.norm_w(cfg.p2)?;
    Ok(plain.max(powered))
}
