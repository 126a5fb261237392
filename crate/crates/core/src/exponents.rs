//! Exponent arithmetic and admissibility inequalities for the model class
//!
//! ```text
//! A(t, xi) = (1/p1) (1 + |t|^{s1 p1}) |xi|^{p1}
//! B(t, xi) = (1/p2) (1 + |t|^{s2 p2}) |xi|^{p2}
//! G(u, v)  = |u|^{q1}/q1 + |v|^{q2}/q2 + c* |u|^{g1} |v|^{g2}
//! ```
//!
//! Every inequality is decided in exact rational arithmetic: each `f64` input
//! is a dyadic rational and is converted without loss, so margins such as
//! `8.25 - 7 = 5/4` are exact and strictness at a zero margin is decided
//! without rounding. Infinite critical exponents (`p >= N`) are carried as an
//! explicit `+inf`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serial;

type Q = BigRational;

/// One problem instance: dimension and the full exponent tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentConfig {
    /// Spatial dimension of the theory (not necessarily the grid dimension).
    pub n: u32,
    pub p1: f64,
    pub p2: f64,
    pub s1: f64,
    pub s2: f64,
    pub q1: f64,
    pub q2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub c_star: f64,
}

impl ExponentConfig {
    /// Checks the type invariants (not the admissibility inequalities).
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p1", self.p1),
            ("p2", self.p2),
            ("s1", self.s1),
            ("s2", self.s2),
            ("q1", self.q1),
            ("q2", self.q2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("c_star", self.c_star),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter {
                name: "N",
                value: self.n as f64,
                reason: "dimension must be >= 1",
            });
        }
        let checks = [
            ("p1", self.p1, self.p1 > 1.0, "must be > 1"),
            ("p2", self.p2, self.p2 > 1.0, "must be > 1"),
            ("s1", self.s1, self.s1 >= 0.0, "must be >= 0"),
            ("s2", self.s2, self.s2 >= 0.0, "must be >= 0"),
            ("theta1", self.theta1, self.theta1 > 0.0, "must be > 0"),
            ("theta2", self.theta2, self.theta2 > 0.0, "must be > 0"),
            ("c_star", self.c_star, self.c_star >= 0.0, "must be >= 0"),
        ];
        for (name, value, ok, reason) in checks {
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason,
                });
            }
        }
        Ok(())
    }

    /// The same problem with the roles of the two components exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            n: self.n,
            p1: self.p2,
            p2: self.p1,
            s1: self.s2,
            s2: self.s1,
            q1: self.q2,
            q2: self.q1,
            gamma1: self.gamma2,
            gamma2: self.gamma1,
            theta1: self.theta2,
            theta2: self.theta1,
            c_star: self.c_star,
        }
    }

    pub fn p(&self, i: usize) -> f64 {
        [self.p1, self.p2][i]
    }
    pub fn s(&self, i: usize) -> f64 {
        [self.s1, self.s2][i]
    }
    pub fn q(&self, i: usize) -> f64 {
        [self.q1, self.q2][i]
    }
    pub fn gamma(&self, i: usize) -> f64 {
        [self.gamma1, self.gamma2][i]
    }
    pub fn theta(&self, i: usize) -> f64 {
        [self.theta1, self.theta2][i]
    }

    pub fn is_coupled(&self) -> bool {
        self.c_star > 0.0
    }
}

/// Options for [`check_model_hypotheses`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Use `g1 th1 + g1 th2 >= 1` exactly as printed instead of the symmetric
    /// `g1 th1 + g2 th2 >= 1`.
    pub exj01_literal: bool,
}

/// Auxiliary exponents of the growth estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedExponents {
    #[serde(serialize_with = "serial::ext_f64")]
    pub pstar1: f64,
    #[serde(serialize_with = "serial::ext_f64")]
    pub pstar2: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
    pub t6: f64,
    pub qbar1: f64,
    pub qbar2: f64,
    /// Open interval `t3` was chosen from.
    #[serde(serialize_with = "serial::ext_pair")]
    pub t3_interval: (f64, f64),
    #[serde(serialize_with = "serial::ext_pair")]
    pub t5_interval: (f64, f64),
}

/// Structural constants of the model class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelConstants {
    pub eta1: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub mu2_1: f64,
    pub mu2_2: f64,
    pub r: f64,
}

impl ModelConstants {
    pub fn mu2(&self, i: usize) -> f64 {
        [self.mu2_1, self.mu2_2][i]
    }
}

/// Outcome of a single inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisRecord {
    pub id: String,
    pub relation: String,
    pub satisfied: bool,
    /// Signed slack `rhs - lhs`; positive means strictly satisfied.
    #[serde(serialize_with = "serial::ext_f64")]
    pub margin: f64,
    /// Exact value of the margin as `num/den`, `inf`, `-inf` or `undefined`.
    pub exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub records: Vec<HypothesisRecord>,
    pub derived: Option<DerivedExponents>,
    pub constants: Option<ModelConstants>,
}

/// Records tied to the supercritical and dimensional setting that play no
/// role in the mountain-pass geometry of a discretized problem.
const GEOMETRY_EXEMPT: [&str; 3] = ["exj0.s[1]", "exj0.s[2]", "dimension"];

impl HypothesisReport {
    pub fn admissible(&self) -> bool {
        self.records.iter().all(|r| r.satisfied)
    }

    /// Every record except the `1 + p_i < p_i (s_i + 1)` links and the
    /// `p_1 < N or p_2 < N` requirement holds.
    pub fn geometry_admissible(&self) -> bool {
        self.records
            .iter()
            .filter(|r| !GEOMETRY_EXEMPT.contains(&r.id.as_str()))
            .all(|r| r.satisfied)
    }

    pub fn failing(&self) -> Vec<String> {
        self.records
            .iter()
            .filter(|r| !r.satisfied)
            .map(|r| r.id.clone())
            .collect()
    }

    pub fn record(&self, id: &str) -> Option<&HypothesisRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

// ---------------------------------------------------------------------------
// Extended rationals

#[derive(Debug, Clone, PartialEq)]
enum Ext {
    Fin(Q),
    PosInf,
    NegInf,
    /// Quantity whose defining formula does not apply (e.g. `q_i <= g_i`).
    Undefined,
}

impl Ext {
    fn to_f64(&self) -> f64 {
        match self {
            Ext::Fin(q) => q.to_f64().unwrap_or(f64::NAN),
            Ext::PosInf => f64::INFINITY,
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::Undefined => f64::NAN,
        }
    }

    fn finite(&self) -> Option<&Q> {
        match self {
            Ext::Fin(q) => Some(q),
            _ => None,
        }
    }

    /// Multiplication by a strictly positive rational.
    fn scale(&self, k: &Q) -> Ext {
        debug_assert!(k.is_positive());
        match self {
            Ext::Fin(q) => Ext::Fin(q * k),
            other => other.clone(),
        }
    }

    /// `1 / self` for strictly positive values (`1/inf = 0`).
    fn recip_pos(&self) -> Ext {
        match self {
            Ext::Fin(q) => Ext::Fin(q.recip()),
            Ext::PosInf => Ext::Fin(Q::zero()),
            _ => Ext::Undefined,
        }
    }

    fn sub(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Undefined, _) | (_, Ext::Undefined) => Ext::Undefined,
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a - b),
            (Ext::PosInf, Ext::PosInf) | (Ext::NegInf, Ext::NegInf) => Ext::Undefined,
            (Ext::PosInf, _) | (_, Ext::NegInf) => Ext::PosInf,
            (Ext::NegInf, _) | (_, Ext::PosInf) => Ext::NegInf,
        }
    }

    fn sign(&self) -> Option<Ordering> {
        match self {
            Ext::Fin(q) => Some(q.cmp(&Q::zero())),
            Ext::PosInf => Some(Ordering::Greater),
            Ext::NegInf => Some(Ordering::Less),
            Ext::Undefined => None,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Fin(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Ext::PosInf => f.write_str("inf"),
            Ext::NegInf => f.write_str("-inf"),
            Ext::Undefined => f.write_str("undefined"),
        }
    }
}

fn rat(x: f64) -> Q {
    Q::from_float(x).expect("finite input")
}

fn int(n: u32) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn qmax(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn critical_exact(p: &Q, n: u32) -> Ext {
    let nq = int(n);
    if p < &nq {
        Ext::Fin(&nq * p / (&nq - p))
    } else {
        Ext::PosInf
    }
}

/// Critical Sobolev exponent `N p / (N - p)`, or `+inf` when `p >= N`.
pub fn critical_exponent(p: f64, n: u32) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "must be finite and > 1",
        });
    }
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "N",
            value: n as f64,
            reason: "dimension must be >= 1",
        });
    }
    Ok(critical_exact(&rat(p), n).to_f64())
}

/// Exact quantities shared by the derivation and the hypothesis check.
struct Exact {
    n: Q,
    p: [Q; 2],
    s: [Q; 2],
    q: [Q; 2],
    gamma: [Q; 2],
    theta: [Q; 2],
    c_star: Q,
    pstar: [Ext; 2],
    /// `p_i^* (s_i + 1)`
    crit: [Ext; 2],
    /// Cross-growth exponents; `Undefined` when `q_i <= g_i` with coupling on.
    t: [Ext; 2],
}

impl Exact {
    fn new(cfg: &ExponentConfig) -> Self {
        let p = [rat(cfg.p1), rat(cfg.p2)];
        let s = [rat(cfg.s1), rat(cfg.s2)];
        let q = [rat(cfg.q1), rat(cfg.q2)];
        let gamma = [rat(cfg.gamma1), rat(cfg.gamma2)];
        let theta = [rat(cfg.theta1), rat(cfg.theta2)];
        let c_star = rat(cfg.c_star);
        let pstar = [critical_exact(&p[0], cfg.n), critical_exact(&p[1], cfg.n)];
        let crit = [
            pstar[0].scale(&(&s[0] + Q::one())),
            pstar[1].scale(&(&s[1] + Q::one())),
        ];
        let coupled = c_star.is_positive();
        let t = std::array::from_fn(|i| {
            let j = 1 - i;
            if !coupled {
                Ext::Fin(Q::zero())
            } else if q[i] > gamma[i] {
                // t_i = g_j (q_i - 1) / (q_i - g_i)
                Ext::Fin(&gamma[j] * (&q[i] - Q::one()) / (&q[i] - &gamma[i]))
            } else {
                Ext::Undefined
            }
        });
        Self {
            n: int(cfg.n),
            p,
            s,
            q,
            gamma,
            theta,
            c_star,
            pstar,
            crit,
            t,
        }
    }

    /// `(p_i / N) (1 - 1/(p_i^*(s_i+1))) p_j^*(s_j+1)`, the bound on `t_i`.
    fn cross_bound(&self, i: usize) -> Ext {
        let j = 1 - i;
        let inv = self.crit[i].recip_pos();
        let Some(inv) = inv.finite() else {
            return Ext::Undefined;
        };
        let factor = &self.p[i] / &self.n * (Q::one() - inv);
        if factor.is_positive() {
            self.crit[j].scale(&factor)
        } else {
            Ext::Fin(Q::zero())
        }
    }

    /// Young-split interval for `t3` (i = 0) or `t5` (i = 1).
    fn split_interval(&self, i: usize) -> (Ext, Ext) {
        let j = 1 - i;
        let upper = self.crit[i].clone();
        let lower = match (&self.crit[j], &self.t[i]) {
            (_, Ext::Undefined) => Ext::Undefined,
            // p_i P_j / (p_i P_j - N t_i) -> 1 as P_j -> inf
            (Ext::PosInf, _) => Ext::Fin(Q::one()),
            (Ext::Fin(pj), Ext::Fin(ti)) => {
                let num = &self.p[i] * pj;
                let den = &num - &self.n * ti;
                if den.is_positive() {
                    Ext::Fin(num / den)
                } else {
                    Ext::PosInf
                }
            }
            _ => Ext::Undefined,
        };
        (lower, upper)
    }
}

/// Midpoint of a finite open interval, or `lower + 1` when unbounded above.
fn choose_in(lower: &Q, upper: &Ext) -> Q {
    match upper {
        Ext::Fin(u) => (lower + u) / Q::from_integer(BigInt::from(2)),
        _ => lower + Q::one(),
    }
}

struct ExactDerived {
    t3: Q,
    t4: Q,
    t5: Q,
    t6: Q,
    qbar: [Q; 2],
    intervals: [(Ext, Ext); 2],
}

fn derive_exact(ex: &Exact) -> Result<ExactDerived> {
    const NAMES: [&str; 2] = ["t3", "t5"];
    let mut chosen = Vec::with_capacity(2);
    let mut intervals = Vec::with_capacity(2);
    for i in 0..2 {
        let (lower, upper) = ex.split_interval(i);
        let feasible =
            lower.finite().is_some() && upper.sub(&lower).sign() == Some(Ordering::Greater);
        if !feasible {
            return Err(Error::InfeasibleInterval {
                which: NAMES[i],
                lower: lower.to_f64(),
                upper: upper.to_f64(),
            });
        }
        chosen.push(choose_in(lower.finite().unwrap(), &upper));
        intervals.push((lower, upper));
    }
    let t1 = ex.t[0].finite().expect("feasible implies defined").clone();
    let t2 = ex.t[1].finite().expect("feasible implies defined").clone();
    let (t3, t5) = (chosen[0].clone(), chosen[1].clone());
    let t4 = &t1 * &t3 / (&t3 - Q::one());
    let t6 = &t2 * &t5 / (&t5 - Q::one());
    let qbar = [
        qmax(&qmax(&ex.q[0], &t3), &t6),
        qmax(&qmax(&ex.q[1], &t4), &t5),
    ];
    let mut it = intervals.into_iter();
    Ok(ExactDerived {
        t3,
        t4,
        t5,
        t6,
        qbar,
        intervals: [it.next().unwrap(), it.next().unwrap()],
    })
}

fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Cross-growth and Young-split exponents together with the dominating growth
/// exponents `qbar_i`.
pub fn derive_auxiliary_exponents(cfg: &ExponentConfig) -> Result<DerivedExponents> {
    cfg.validate()?;
    let ex = Exact::new(cfg);
    let d = derive_exact(&ex)?;
    Ok(DerivedExponents {
        pstar1: ex.pstar[0].to_f64(),
        pstar2: ex.pstar[1].to_f64(),
        t1: ex.t[0].to_f64(),
        t2: ex.t[1].to_f64(),
        t3: to_f64(&d.t3),
        t4: to_f64(&d.t4),
        t5: to_f64(&d.t5),
        t6: to_f64(&d.t6),
        qbar1: to_f64(&d.qbar[0]),
        qbar2: to_f64(&d.qbar[1]),
        t3_interval: (d.intervals[0].0.to_f64(), d.intervals[0].1.to_f64()),
        t5_interval: (d.intervals[1].0.to_f64(), d.intervals[1].1.to_f64()),
    })
}

struct Recorder {
    records: Vec<HypothesisRecord>,
}

impl Recorder {
    fn push(&mut self, id: String, relation: String, margin: Ext, strict: bool) {
        let satisfied = match margin.sign() {
            Some(Ordering::Greater) => true,
            Some(Ordering::Equal) => !strict,
            _ => false,
        };
        self.records.push(HypothesisRecord {
            id,
            relation,
            satisfied,
            margin: margin.to_f64(),
            exact: margin.to_string(),
        });
    }

    /// `lhs < rhs`
    fn lt(&mut self, id: String, relation: String, lhs: &Ext, rhs: &Ext) {
        self.push(id, relation, rhs.sub(lhs), true);
    }

    /// `lhs <= rhs`
    fn le(&mut self, id: String, relation: String, lhs: &Ext, rhs: &Ext) {
        self.push(id, relation, rhs.sub(lhs), false);
    }

    fn vacuous(&mut self, id: String, relation: String) {
        self.push(id, relation, Ext::PosInf, false);
    }
}

/// Evaluates every admissibility inequality for the model class.
///
/// Coupling records are vacuous (margin `+inf`) when `c* = 0`. Strict
/// inequalities with a zero margin are reported as failures.
pub fn check_model_hypotheses(cfg: &ExponentConfig, opts: CheckOptions) -> HypothesisReport {
    if cfg.validate().is_err() {
        return HypothesisReport {
            records: vec![HypothesisRecord {
                id: "config".into(),
                relation: "type invariants of the configuration".into(),
                satisfied: false,
                margin: f64::NAN,
                exact: "undefined".into(),
            }],
            derived: None,
            constants: None,
        };
    }
    let ex = Exact::new(cfg);
    let mut rec = Recorder {
        records: Vec::new(),
    };
    let f = |q: &Q| Ext::Fin(q.clone());
    let one = Q::one();
    let coupled = ex.c_star.is_positive();

    for i in 0..2 {
        let k = i + 1;
        let p = &ex.p[i];
        let s1 = &ex.s[i] + &one;
        let ps = p * &s1;
        let inv_theta = ex.theta[i].recip();
        rec.lt(
            format!("exj0.base[{k}]"),
            format!("2 < 1 + p{k}"),
            &f(&Q::from_integer(BigInt::from(2))),
            &f(&(p + &one)),
        );
        rec.lt(
            format!("exj0.s[{k}]"),
            format!("1 + p{k} < p{k}(s{k}+1)"),
            &f(&(p + &one)),
            &f(&ps),
        );
        rec.lt(
            format!("exj0.theta[{k}]"),
            format!("p{k}(s{k}+1) < 1/theta{k}"),
            &f(&ps),
            &f(&inv_theta),
        );
        rec.le(
            format!("exj0.q[{k}]"),
            format!("1/theta{k} <= q{k}"),
            &f(&inv_theta),
            &f(&ex.q[i]),
        );
        rec.lt(
            format!("exj0.crit[{k}]"),
            format!("q{k} < p{k}*(s{k}+1)"),
            &f(&ex.q[i]),
            &ex.crit[i],
        );
    }

    // either p1 < N or p2 < N
    {
        let m = qmax(&(&ex.n - &ex.p[0]), &(&ex.n - &ex.p[1]));
        rec.push(
            "dimension".into(),
            "p1 < N or p2 < N".into(),
            Ext::Fin(m),
            true,
        );
    }

    for i in 0..2 {
        let k = i + 1;
        if coupled {
            rec.lt(
                format!("exj01.gamma_lo[{k}]"),
                format!("1 < gamma{k}"),
                &f(&one),
                &f(&ex.gamma[i]),
            );
            rec.lt(
                format!("exj01.gamma_hi[{k}]"),
                format!("gamma{k} < q{k}"),
                &f(&ex.gamma[i]),
                &f(&ex.q[i]),
            );
        } else {
            rec.vacuous(format!("exj01.gamma_lo[{k}]"), format!("1 < gamma{k}"));
            rec.vacuous(format!("exj01.gamma_hi[{k}]"), format!("gamma{k} < q{k}"));
        }
    }
    if coupled {
        let (sum, relation) = if opts.exj01_literal {
            (
                &ex.gamma[0] * &ex.theta[0] + &ex.gamma[0] * &ex.theta[1],
                "gamma1 theta1 + gamma1 theta2 >= 1",
            )
        } else {
            (
                &ex.gamma[0] * &ex.theta[0] + &ex.gamma[1] * &ex.theta[1],
                "gamma1 theta1 + gamma2 theta2 >= 1",
            )
        };
        rec.le("exj01.ar".into(), relation.into(), &f(&one), &f(&sum));
    } else {
        rec.vacuous(
            "exj01.ar".into(),
            "gamma1 theta1 + gamma2 theta2 >= 1".into(),
        );
    }

    for i in 0..2 {
        let (k, l) = (i + 1, 2 - i);
        let relation = format!(
            "gamma{l} (q{k}-1)/(q{k}-gamma{k}) < (p{k}/N)(1 - 1/(p{k}*(s{k}+1))) p{l}*(s{l}+1)"
        );
        if coupled {
            rec.lt(
                format!("exj02[{k},{l}]"),
                relation,
                &ex.t[i],
                &ex.cross_bound(i),
            );
        } else {
            rec.vacuous(format!("exj02[{k},{l}]"), relation);
        }
    }

    for i in 0..2 {
        let k = i + 1;
        rec.lt(
            format!("thi<pi[{k}]"),
            format!("theta{k} < 1/p{k}"),
            &f(&ex.theta[i]),
            &f(&ex.p[i].recip()),
        );
    }
    for i in 0..2 {
        let k = i + 1;
        rec.lt(
            format!("si_pi[{k}]"),
            format!("s{k} < 1/(theta{k} p{k})"),
            &f(&ex.s[i]),
            &f(&(&ex.theta[i] * &ex.p[i]).recip()),
        );
    }
    for i in 0..2 {
        let k = i + 1;
        rec.le(
            format!("crit_exp.lo[{k}]"),
            format!("1 <= q{k}"),
            &f(&one),
            &f(&ex.q[i]),
        );
        rec.lt(
            format!("crit_exp.hi[{k}]"),
            format!("q{k} < p{k}*(s{k}+1)"),
            &f(&ex.q[i]),
            &ex.crit[i],
        );
    }
    for i in 0..2 {
        let k = i + 1;
        rec.lt(
            format!("crit_expi[{k}]"),
            format!(
                "t{k} < (p{k}/N)(1 - 1/(p{k}*(s{k}+1))) p{}*(s{}+1)",
                2 - i,
                2 - i
            ),
            &ex.t[i],
            &ex.cross_bound(i),
        );
    }

    let derived = derive_exact(&ex);
    match &derived {
        Ok(d) => {
            for i in 0..2 {
                let name = ["t3", "t5"][i];
                let (lo, hi) = &d.intervals[i];
                rec.lt(
                    format!("crits11[{}]", i + 1),
                    format!("{name} interval is non-empty"),
                    lo,
                    hi,
                );
            }
            let t46 = [&d.t4, &d.t6];
            for i in 0..2 {
                let j = 1 - i;
                let bound = ex.crit[j].scale(&(&ex.p[i] / &ex.n));
                rec.lt(
                    format!("crits21[{}]", i + 1),
                    format!(
                        "{} < (p{}/N) p{}*(s{}+1)",
                        ["t4", "t6"][i],
                        i + 1,
                        j + 1,
                        j + 1
                    ),
                    &f(t46[i]),
                    &bound,
                );
            }
            for i in 0..2 {
                let k = i + 1;
                let ratio = &d.qbar[i] / (&ex.s[i] + &one);
                rec.lt(
                    format!("minmaxPerera1.lo[{k}]"),
                    format!("p{k} < qbar{k}/(s{k}+1)"),
                    &f(&ex.p[i]),
                    &f(&ratio),
                );
                rec.lt(
                    format!("minmaxPerera1.hi[{k}]"),
                    format!("qbar{k}/(s{k}+1) < p{k}*"),
                    &f(&ratio),
                    &ex.pstar[i],
                );
            }
        }
        Err(_) => {
            for i in 0..2 {
                let (lo, hi) = ex.split_interval(i);
                rec.lt(
                    format!("crits11[{}]", i + 1),
                    format!("{} interval is non-empty", ["t3", "t5"][i]),
                    &lo,
                    &hi,
                );
            }
        }
    }

    let mut report = HypothesisReport {
        records: rec.records,
        derived: None,
        constants: None,
    };
    report.derived = derive_auxiliary_exponents(cfg).ok();
    if report.geometry_admissible() {
        report.constants = Some(model_constants_unchecked(cfg));
    }
    report
}

fn model_constants_unchecked(cfg: &ExponentConfig) -> ModelConstants {
    // a(t, xi).xi = (1 + |t|^{sp}) |xi|^p, so the `h3` records hold with equality: mu0 = 1.
    // A_t(t, xi) t = s |t|^{sp} |xi|^p >= 0, so the `h4` records hold with mu1 = 1.
    // A = (1/p) a.xi gives the `h2` records for any eta1 >= 1/p.
    // A - th a.xi - th A_t t = [(1/p - th)(1 + |t|^{sp}) - th s |t|^{sp}] |xi|^p;
    // dividing by a.xi and letting |t| -> inf gives the infimum 1/p - th (s + 1).
    let mu2 = |p: f64, s: f64, th: f64| 1.0 / p - th * (s + 1.0);
    ModelConstants {
        eta1: (1.0 / cfg.p1).max(1.0 / cfg.p2),
        mu0: 1.0,
        mu1: 1.0,
        mu2_1: mu2(cfg.p1, cfg.s1, cfg.theta1),
        mu2_2: mu2(cfg.p2, cfg.s2, cfg.theta2),
        r: 1.0,
    }
}

/// Closed-form structural constants of the model class.
///
/// Requires the configuration to pass every record that bears on the
/// mountain-pass structure (see [`HypothesisReport::geometry_admissible`]).
pub fn compute_model_constants(cfg: &ExponentConfig, opts: CheckOptions) -> Result<ModelConstants> {
    cfg.validate()?;
    let report = check_model_hypotheses(cfg, opts);
    if !report.geometry_admissible() {
        return Err(Error::NotAdmissible(report.failing()));
    }
    Ok(model_constants_unchecked(cfg))
}
