//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use quasivar::{
    certify_geometry, check_model_hypotheses, compute_model_constants, default_fd_steps,
    derive_auxiliary_exponents, dj_apply, finite_difference_check, first_eigenpair,
    mountain_pass_search, multiplicity_search, sample_structural_hypotheses, seeded_test_pair,
    verify_candidate, CriticalPointCandidate, EigenOptions, EigenPair, FieldPair, Grid,
    GridFunction, ModelFunctions, SamplerParams,
};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::RunConfig;
use crate::output::{record, Emitter};

#[derive(Debug, Error)]
pub enum CmdError {
    #[error(transparent)]
    Core(#[from] quasivar::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

/// Command outcome: `true` maps to exit 0, `false` to exit 1.
pub type Outcome = Result<bool, CmdError>;

/// Resolved settings shared by all subcommands.
pub struct Run {
    pub cfg: RunConfig,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub threads: usize,
}

type Out<'a> = Emitter<Box<dyn Write + 'a>>;

impl Run {
    fn model(&self) -> ModelFunctions {
        ModelFunctions::new(self.cfg.exponents()).with_epsilon(self.cfg.epsilon_reg)
    }

    fn grid(&self) -> Result<Arc<Grid>, CmdError> {
        Ok(Grid::new(self.cfg.dimension, self.cfg.n)?)
    }

    fn eigen_options(&self) -> EigenOptions {
        EigenOptions {
            tol: self.cfg.eigen_tol,
            max_iter: self.cfg.eigen_max_iter,
            epsilon_reg: self.cfg.epsilon_reg,
        }
    }

    fn dump(&self, name: &str, f: &GridFunction) -> Result<Option<String>, CmdError> {
        let Some(dir) = &self.out_dir else {
            return Ok(None);
        };
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        f.dump(&mut w)?;
        w.flush()?;
        Ok(Some(display(&path)))
    }

    fn dump_pair(&self, stem: &str, fp: &FieldPair) -> Result<Value, CmdError> {
        let u = self.dump(&format!("{stem}_u.txt"), &fp.u)?;
        let v = self.dump(&format!("{stem}_v.txt"), &fp.v)?;
        Ok(json!({ "u": u, "v": v }))
    }

    fn eigen(&self, grid: &Arc<Grid>) -> Result<EigenPair, CmdError> {
        Ok(first_eigenpair(self.cfg.p1, grid, &self.eigen_options())?)
    }
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn eigen_record(component: usize, ep: &EigenPair, dump: Option<String>) -> Value {
    record(
        "eigen",
        &json!({
            "component": component,
            "p": ep.p,
            "lambda1": ep.lambda1,
            "iterations": ep.iterations,
            "residual": ep.residual,
            "converged": ep.converged,
            "phi1": dump,
        }),
    )
}

pub fn check(run: &Run, em: &mut Out) -> Outcome {
    let report = check_model_hypotheses(&run.cfg.exponents(), run.cfg.check_options());
    for r in &report.records {
        em.emit(record("hypothesis", r))?;
    }
    let ok = report.admissible();
    em.emit(record(
        "check",
        &json!({
            "admissible": ok,
            "geometry_admissible": report.geometry_admissible(),
            "failing": report.failing(),
        }),
    ))?;
    Ok(ok)
}

pub fn derive(run: &Run, em: &mut Out) -> Outcome {
    let derived = derive_auxiliary_exponents(&run.cfg.exponents())?;
    em.emit(record("derived", &derived))?;
    Ok(true)
}

pub fn constants(run: &Run, em: &mut Out) -> Outcome {
    let report = check_model_hypotheses(&run.cfg.exponents(), run.cfg.check_options());
    if !report.geometry_admissible() {
        em.emit(record(
            "constants",
            &json!({ "admissible": false, "failing": report.failing() }),
        ))?;
        return Ok(false);
    }
    let constants = compute_model_constants(&run.cfg.exponents(), run.cfg.check_options())?;
    em.emit(record("constants", &constants))?;
    let params = SamplerParams {
        samples: run.cfg.samples,
        seed: run.seed,
        ..SamplerParams::default()
    };
    let mf = ModelFunctions::exact(run.cfg.exponents());
    let sample = sample_structural_hypotheses(&mf, &constants, &params);
    for b in &sample.bounds {
        em.emit(record("bound", b))?;
    }
    for t in &sample.trends {
        em.emit(record("trend", t))?;
    }
    let failing: Vec<&str> = sample
        .bounds
        .iter()
        .filter(|b| !b.holds())
        .map(|b| b.id.as_str())
        .collect();
    let ok = failing.is_empty();
    em.emit(record(
        "sampling",
        &json!({ "samples": run.cfg.samples, "all_hold": ok, "failing": failing }),
    ))?;
    Ok(ok)
}

pub fn gradcheck(run: &Run, em: &mut Out) -> Outcome {
    const SLOPE_RANGE: (f64, f64) = (1.8, 2.2);
    let grid = run.grid()?;
    let mf = ModelFunctions::exact(run.cfg.exponents());
    let steps = default_fd_steps();
    let mut ok = true;
    let mut slopes = Vec::new();
    for i in 0..run.cfg.fd_fields {
        let seed = run.seed.wrapping_add(i as u64);
        let (point, dir) = seeded_test_pair(&grid, seed);
        let gc = finite_difference_check(&point, &dir, &mf, &steps)?;
        let pass = gc.slope >= SLOPE_RANGE.0 && gc.slope <= SLOPE_RANGE.1;
        ok &= pass;
        slopes.push(gc.slope);
        let mut r = record("gradcheck", &gc);
        r["seed"] = json!(seed);
        r["pass"] = json!(pass);
        em.emit(r)?;
    }

    let (point, dir) = seeded_test_pair(&grid, run.seed);
    let zero = FieldPair {
        u: GridFunction::zeros(&grid),
        v: GridFunction::zeros(&grid),
    };
    let at_zero = dj_apply(&zero, &dir, &mf)?;
    let zero_pass = at_zero == 0.0;
    ok &= zero_pass;
    em.emit(record(
        "zero_field",
        &json!({ "directional": at_zero, "pass": zero_pass }),
    ))?;

    let (_, other) = seeded_test_pair(&grid, run.seed.wrapping_add(run.cfg.fd_fields as u64));
    let sum = dir.plus(1.0, &other);
    let lhs = dj_apply(&point, &sum, &mf)?;
    let rhs = dj_apply(&point, &dir, &mf)? + dj_apply(&point, &other, &mf)?;
    let add_err = (lhs - rhs).abs() / (lhs.abs() + rhs.abs()).max(f64::MIN_POSITIVE);
    let add_pass = add_err <= 1e-10;
    ok &= add_pass;
    em.emit(record(
        "additivity",
        &json!({ "lhs": lhs, "rhs": rhs, "relative_error": add_err, "pass": add_pass }),
    ))?;

    em.emit(record(
        "gradcheck_summary",
        &json!({ "slopes": slopes, "range": [SLOPE_RANGE.0, SLOPE_RANGE.1], "pass": ok }),
    ))?;
    Ok(ok)
}

pub fn eigen(run: &Run, em: &mut Out) -> Outcome {
    let grid = run.grid()?;
    let opts = run.eigen_options();
    let mut ok = true;
    let mut previous: Option<EigenPair> = None;
    for (component, p) in [(1, run.cfg.p1), (2, run.cfg.p2)] {
        let ep = match previous.take() {
            Some(ep) if ep.p == p => ep,
            _ => first_eigenpair(p, &grid, &opts)?,
        };
        let dump = run.dump(&format!("phi1_{component}.txt"), &ep.phi1)?;
        ok &= ep.converged;
        em.emit(eigen_record(component, &ep, dump))?;
        previous = Some(ep);
    }
    Ok(ok)
}

pub fn certify(run: &Run, em: &mut Out) -> Outcome {
    let grid = run.grid()?;
    let mf = run.model();
    let eig = run.eigen(&grid)?;
    em.emit(eigen_record(1, &eig, None))?;
    let cert = certify_geometry(&mf, &eig, run.cfg.r0, run.cfg.n_samples, run.seed)?;
    em.emit(record("certificate", &cert.summary()))?;
    Ok(cert.validated)
}

fn candidate_record(
    run: &Run,
    mf: &ModelFunctions,
    cand: &CriticalPointCandidate,
    stem: &str,
) -> Result<(Value, bool), CmdError> {
    let ver = verify_candidate(cand, mf, run.cfg.nontrivial_floor)?;
    let pass = cand.converged && ver.passes(run.cfg.tol);
    let mut r = record("candidate", &cand.summary());
    r["verification"] = serde_json::to_value(&ver).unwrap_or(Value::Null);
    r["verified"] = json!(pass);
    r["fields"] = run.dump_pair(stem, &cand.fields)?;
    Ok((r, pass))
}

pub fn solve(run: &Run, em: &mut Out) -> Outcome {
    let report = check_model_hypotheses(&run.cfg.exponents(), run.cfg.check_options());
    if !report.geometry_admissible() {
        em.emit(record(
            "solve",
            &json!({ "geometry_admissible": false, "failing": report.failing() }),
        ))?;
        return Ok(false);
    }
    let grid = run.grid()?;
    let mf = run.model();
    let eig = run.eigen(&grid)?;
    em.emit(eigen_record(1, &eig, None))?;
    let cert = certify_geometry(&mf, &eig, run.cfg.r0, run.cfg.n_samples, run.seed)?;
    em.emit(record("certificate", &cert.summary()))?;
    let cand = mountain_pass_search(&mf, &cert, &run.cfg.mp_params(run.threads))?;
    let (r, pass) = candidate_record(run, &mf, &cand, "solve")?;
    em.emit(r)?;
    Ok(pass)
}

pub fn multi(run: &Run, em: &mut Out) -> Outcome {
    let grid = run.grid()?;
    let mf = run.model();
    let found = multiplicity_search(
        &mf,
        &grid,
        run.cfg.count,
        run.seed,
        &run.cfg.mp_params(run.threads),
    )?;
    let mut levels = Vec::with_capacity(found.len());
    let mut all_verified = true;
    for (i, cand) in found.iter().enumerate() {
        let (mut r, pass) = candidate_record(run, &mf, cand, &format!("multi_{i}"))?;
        r["index"] = json!(i);
        all_verified &= pass;
        levels.push(cand.level);
        em.emit(r)?;
    }
    em.emit(record(
        "multi",
        &json!({
            "starts": run.cfg.count,
            "distinct": found.len(),
            "levels": levels,
            "all_verified": all_verified,
        }),
    ))?;
    Ok(!found.is_empty() && all_verified)
}

pub fn dump(run: &Run, em: &mut Out) -> Outcome {
    em.emit(record("config", &run.cfg))?;
    Ok(true)
}
