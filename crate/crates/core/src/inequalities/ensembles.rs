//! Seeded ensembles. Trial `t` draws from `trial_rng(seed, t)` and trials are
//! merged in index order, so reports are identical with or without threads.

use serde::{Deserialize, Serialize};

use super::{
    assemble, check_d2_theorem_b, check_other_inequality, check_power_inequality, check_theorem_b,
    check_weaker_lemma, check_weaker_lemma_general, estimate_c1, power_constant, weaker_lemma_constant, Bound,
    Branch, IneqReport, Sample, TrialResult,
};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::invariants::{
    d2_length_three, max_relative_deviation, procesi_map, tau, tau_rho_bound, trace_identity_residual,
    trace_word_count, tuple_norm,
};
use crate::matrix::{CMatrix, MatrixSet, C64};
use crate::norms::NormSpec;
use crate::random::{
    gaussian_matrix, gaussian_set, normalize_euclidean, positive_diagonal, strictly_upper, trial_rng,
    well_conditioned,
};
use crate::semigroup::{berger_wang_gap, MONOTONICITY_TOL};

/// Tolerance on conjugation invariance of trace vectors (relative).
pub const CONJUGATION_TOL: f64 = 1e-8;
/// Tolerance on homogeneity of `τ` and on trace cyclicity.
pub const HOMOGENEITY_TOL: f64 = 1e-10;
/// Largest condition number of the conjugating matrices.
pub const CONJUGATION_MAX_COND: f64 = 1e3;
/// Largest product tree used for the `τ` versus spectral radius check.
const TAU_RHO_MAX_NODES: usize = 20_000;
/// Log-spread of the random positive diagonal matrices.
const DIAGONAL_SPREAD: f64 = 4.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub dim: usize,
    /// Matrices per set (or tuple length for trace-word checks).
    pub set_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub depth: usize,
    pub tol: f64,
    pub parallel: bool,
}

impl EnsembleConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        Self {
            dim,
            set_size: 2,
            trials,
            seed,
            depth: 8,
            tol: 1e-9,
            parallel: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.set_size == 0 {
            return Err(Error::EmptySet);
        }
        if self.depth == 0 {
            return Err(Error::usage("depth must be at least 1"));
        }
        Ok(())
    }

    fn run<F>(&self, f: F) -> Vec<Result<TrialResult>>
    where
        F: Fn(usize, &mut rand_chacha::ChaCha8Rng) -> Result<TrialResult> + Sync,
    {
        map_indexed(self.trials, self.parallel, |t| {
            let mut rng = trial_rng(self.seed, t as u64);
            f(t, &mut rng)
        })
    }
}

/// `‖Aᵈ‖ ≤ (2ᵈ − 1) ρ(A) ‖A‖^{d−1}` on Gaussian matrices in each norm. Every
/// sixteenth trial draws a strictly upper-triangular matrix to exercise the
/// nilpotent branch.
pub fn power_inequality_ensemble(cfg: &EnsembleConfig, specs: &[NormSpec]) -> Result<IneqReport> {
    cfg.validate()?;
    let bound = power_constant(cfg.dim);
    let results = cfg.run(|t, rng| {
        let a = if t % 16 == 15 {
            strictly_upper(rng, cfg.dim)
        } else {
            gaussian_matrix(rng, cfg.dim)
        };
        let mut out = TrialResult::default();
        for spec in specs {
            let c = check_power_inequality(&a, spec, 1e-8)?;
            out.samples.push(Sample::from_check(spec.label(), &c));
        }
        Ok(out)
    });
    assemble("power-ineq", cfg.seed, Bound::Explicit(bound), 1e-8, results)
}

/// Entry-sup ratio with random positive diagonal `S`, against `d^{d−1}`.
pub fn weaker_lemma_ensemble(cfg: &EnsembleConfig) -> Result<IneqReport> {
    cfg.validate()?;
    let results = cfg.run(|_, rng| {
        let set = gaussian_set(rng, cfg.dim, cfg.set_size, false);
        let s = positive_diagonal(rng, cfg.dim, DIAGONAL_SPREAD);
        let c = check_weaker_lemma(&set, &s, 1e-8)?;
        Ok(TrialResult {
            samples: vec![Sample::from_check("entry-sup", &c)],
            ..TrialResult::default()
        })
    });
    assemble(
        "weaker-lemma",
        cfg.seed,
        Bound::Explicit(weaker_lemma_constant(cfg.dim)),
        1e-8,
        results,
    )
}

/// Euclidean ratio with general well-conditioned `S`; reported only.
pub fn weaker_lemma_general_ensemble(cfg: &EnsembleConfig) -> Result<IneqReport> {
    cfg.validate()?;
    let results = cfg.run(|_, rng| {
        let set = gaussian_set(rng, cfg.dim, cfg.set_size, false);
        let s = well_conditioned(rng, cfg.dim, CONJUGATION_MAX_COND);
        let c = check_weaker_lemma_general(&set, &s)?;
        Ok(TrialResult {
            samples: vec![Sample::from_check("euclidean", &c)],
            ..TrialResult::default()
        })
    });
    assemble("weaker-lemma-general", cfg.seed, Bound::Empirical, 0.0, results)
}

/// Normalized residual of the trace identity on `d` Gaussian `d×d` matrices.
pub fn trace_identity_ensemble(cfg: &EnsembleConfig) -> Result<IneqReport> {
    cfg.validate()?;
    let results = cfg.run(|_, rng| {
        let tuple: Vec<CMatrix> = (0..cfg.dim).map(|_| gaussian_matrix(rng, cfg.dim)).collect();
        let r = trace_identity_residual(&tuple)?;
        Ok(TrialResult {
            samples: vec![Sample::value("residual", r, !(r < cfg.tol))],
            ..TrialResult::default()
        })
    });
    assemble("trace-identity", cfg.seed, Bound::Explicit(0.0), cfg.tol, results)
}

/// Trace vectors of normalized Gaussian tuples of length `set_size`:
/// conjugation invariance (the reported ratio), homogeneity of `τ` for
/// `t ∈ {2, i, −1/2}`, cyclicity, `τ ≤ d·max ρ(Σʲ)^{1/j}` and, for 2×2 pairs,
/// reconstruction of the length-3 words.
pub fn procesi_ensemble(cfg: &EnsembleConfig) -> Result<IneqReport> {
    cfg.validate()?;
    let k = crate::invariants::procesi_length(cfg.dim);
    let check_tau_rho = trace_word_count(cfg.set_size, k) <= TAU_RHO_MAX_NODES;
    let scalars = [C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(-0.5, 0.0)];
    let results = cfg.run(|_, rng| {
        let set = gaussian_set(rng, cfg.dim, cfg.set_size, true);
        let tuple = set.members().to_vec();
        let s = well_conditioned(rng, cfg.dim, CONJUGATION_MAX_COND);
        let conj = set.conjugate(&s)?;
        let tv = procesi_map(&tuple)?;
        let nu = tuple_norm(&tuple)?;
        let conj_dev = max_relative_deviation(&tv, &procesi_map(conj.members())?, nu)?;

        let t0 = tau(&tv);
        let mut hom_dev: f64 = 0.0;
        for t in scalars {
            let scaled: Vec<CMatrix> = tuple.iter().map(|a| a.scale(t)).collect();
            let expect = t.norm() * t0;
            let got = tau(&procesi_map(&scaled)?);
            hom_dev = hom_dev.max((got - expect).abs() / expect.max(f64::MIN_POSITIVE));
        }
        let cyc = tv.cyclicity_defect() / nu.powi(k as i32).max(1.0);

        let mut out = TrialResult::default();
        let violation = !(conj_dev <= CONJUGATION_TOL) || !(hom_dev <= HOMOGENEITY_TOL) || !(cyc <= HOMOGENEITY_TOL);
        out.samples.push(Sample::value("conjugation", conj_dev, violation));
        out.maxima.push(("homogeneity_deviation", hom_dev));
        out.maxima.push(("cyclicity_defect", cyc));
        out.counts.push(("conjugation_violations", f64::from(u8::from(!(conj_dev <= CONJUGATION_TOL)))));
        out.counts.push(("homogeneity_violations", f64::from(u8::from(!(hom_dev <= HOMOGENEITY_TOL)))));
        out.counts.push(("cyclicity_violations", f64::from(u8::from(!(cyc <= HOMOGENEITY_TOL)))));
        if check_tau_rho {
            let chk = tau_rho_bound(&tuple, cfg.tol)?;
            out.counts.push(("tau_rho_checked", 1.0));
            out.counts.push(("tau_rho_failures", f64::from(u8::from(!chk.holds))));
            out.maxima.push(("tau_over_rho_bound", if chk.bound > 0.0 { chk.tau / chk.bound } else { 0.0 }));
            if !chk.holds {
                out.samples.push(Sample::failure("tau-rho"));
            }
        }
        if cfg.dim == 2 && cfg.set_size == 2 {
            let err = d2_length_three(&tv)?
                .iter()
                .map(|(w, v)| (tv.get(w.letters()).expect("stored word") - v).norm())
                .fold(0.0, f64::max);
            out.maxima.push(("d2_reconstruction_error", err));
            if !(err <= CONJUGATION_TOL) {
                out.samples.push(Sample::failure("d2-reconstruction"));
            }
        }
        Ok(out)
    });
    assemble("procesi", cfg.seed, Bound::Explicit(0.0), CONJUGATION_TOL, results)
}

/// `‖Σᵈ‖ / (R ‖Σ‖^{d−1})` on normalized Gaussian sets in the Euclidean, sup and a
/// random ellipsoidal norm; violations are failures of `‖Σᵈ‖^{1/d} ≥ R_lb`.
pub fn c1_ensemble(cfg: &EnsembleConfig) -> Result<IneqReport> {
    cfg.validate()?;
    let results = cfg.run(|_, rng| {
        let set = gaussian_set(rng, cfg.dim, cfg.set_size, true);
        let w = well_conditioned(rng, cfg.dim, CONJUGATION_MAX_COND);
        let norms = [NormSpec::Euclidean, NormSpec::VectorSup, NormSpec::ellipsoidal(w)?];
        let est = estimate_c1(&set, &norms, cfg.depth, cfg.tol)?;
        let mut out = TrialResult::default();
        for n in &est.per_norm {
            out.samples.push(Sample {
                label: n.norm.clone(),
                ratio: n.ratio,
                violation: !n.power_root_ok || n.ratio.is_some_and(|r| !r.is_finite()),
                degenerate: n.degenerate,
                skipped: n.skipped,
            });
            if let Some(c) = n.certified {
                out.maxima.push(("certified_max_ratio", c));
                out.counts.push(("certified_instances", 1.0));
            }
        }
        out.series.push(("relative_gap", est.relative_gap));
        Ok(out)
    });
    assemble("theorem-a", cfg.seed, Bound::Empirical, cfg.tol, results)
}

/// `R_ub / max_{j≤k} ρ(Σʲ)^{1/j}` on normalized Gaussian sets; for 2×2 sets
/// also the ratio against `ρ(Σ²)^{1/2}`, the even-power sequence and the
/// bound gap at depth 2 versus the full depth.
///
/// Violations: `q ≈ 0` with a nonzero upper bound, or the restricted range
/// `k/2 < j ≤ k` missing the maximum.
pub fn theorem_b_ensemble(cfg: &EnsembleConfig, k_override: Option<usize>) -> Result<IneqReport> {
    cfg.validate()?;
    let results = cfg.run(|_, rng| {
        let set = gaussian_set(rng, cfg.dim, cfg.set_size, true);
        theorem_b_trial(&set, cfg, k_override)
    });
    assemble("theorem-b", cfg.seed, Bound::Empirical, cfg.tol, results)
}

fn theorem_b_trial(set: &MatrixSet, cfg: &EnsembleConfig, k_override: Option<usize>) -> Result<TrialResult> {
    let c = check_theorem_b(set, cfg.depth, k_override, cfg.tol)?;
    let mut out = TrialResult::default();
    out.samples.push(Sample {
        label: format!("k={}", c.k),
        ratio: c.ratio,
        violation: c.flagged || !c.restricted_matches,
        degenerate: c.branch != Branch::Ratio,
        skipped: false,
    });
    out.counts.push(("flagged", f64::from(u8::from(c.flagged))));
    out.counts.push(("restricted_range_mismatches", f64::from(u8::from(!c.restricted_matches))));
    if let Some(r) = c.ratio {
        out.series.push(("ratio", r));
    }
    if set.dim() == 2 {
        let d2 = check_d2_theorem_b(set, cfg.depth, cfg.tol)?;
        if let Some(r) = d2.ratio {
            out.maxima.push(("d2_max_ratio", r));
            out.series.push(("d2_ratio", r));
        }
        out.counts.push(("d2_flagged", f64::from(u8::from(d2.flagged))));
        out.counts.push(("even_power_nonmonotone", f64::from(u8::from(!d2.monotone))));
        out.counts.push(("even_power_unbounded", f64::from(u8::from(!d2.bounded))));
        if cfg.depth >= 2 {
            let g = berger_wang_gap(set, &NormSpec::Euclidean, &[2, cfg.depth])?;
            out.series.push(("gap_depth_2", g[0].gap));
            out.series.push(("gap_full_depth", g[1].gap));
            out.counts.push(("gap_increases", f64::from(u8::from(g[1].gap > g[0].gap + MONOTONICITY_TOL))));
        }
    }
    Ok(out)
}

/// `‖P(A₁, …, A_d)‖ / (‖Σ‖^{d−1} max_{j≤d} ρ(Σʲ)^{1/j})` on Gaussian tuples;
/// every fourth trial is a strictly upper-triangular tuple, which takes the
/// degenerate branch.
pub fn other_inequality_ensemble(cfg: &EnsembleConfig, spec: &NormSpec) -> Result<IneqReport> {
    cfg.validate()?;
    let results = cfg.run(|t, rng| {
        let tuple: Vec<CMatrix> = if t % 4 == 3 {
            (0..cfg.dim).map(|_| strictly_upper(rng, cfg.dim)).collect()
        } else {
            let raw: Vec<CMatrix> = (0..cfg.dim).map(|_| gaussian_matrix(rng, cfg.dim)).collect();
            normalize_euclidean(&MatrixSet::new(raw)?).members().to_vec()
        };
        let c = check_other_inequality(&tuple, spec)?;
        let mut out = TrialResult::default();
        out.samples.push(Sample::from_check(spec.label(), &c));
        if c.branch == Branch::Degenerate {
            out.counts.push(("degenerate_failures", f64::from(u8::from(!c.holds))));
        }
        Ok(out)
    });
    assemble("other-ineq", cfg.seed, Bound::Empirical, cfg.tol, results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dim: usize, trials: usize) -> EnsembleConfig {
        EnsembleConfig {
            depth: 6,
            ..EnsembleConfig::new(dim, trials, 7)
        }
    }

    #[test]
    fn power_small_run() {
        let r = power_inequality_ensemble(&small(3, 64), &[NormSpec::Euclidean, NormSpec::VectorSup]).unwrap();
        assert_eq!(r.trials, 64);
        assert_eq!(r.violations, 0);
        assert!(r.degenerate >= 8);
        assert!(r.max_ratio <= 7.0 + 1e-8);
    }

    #[test]
    fn parallel_matches_sequential() {
        let seq = small(2, 40);
        let par = EnsembleConfig { parallel: true, ..seq.clone() };
        let a = theorem_b_ensemble(&seq, None).unwrap();
        let b = theorem_b_ensemble(&par, None).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn small_runs_have_no_violations() {
        assert!(weaker_lemma_ensemble(&small(3, 50)).unwrap().passed());
        assert!(trace_identity_ensemble(&small(3, 20)).unwrap().passed());
        assert!(procesi_ensemble(&small(2, 20)).unwrap().passed());
        assert!(c1_ensemble(&small(2, 20)).unwrap().passed());
        assert!(other_inequality_ensemble(&small(3, 20), &NormSpec::Euclidean).unwrap().passed());
    }
}
