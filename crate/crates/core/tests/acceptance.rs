//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use jsrlab_core::exec::parallel_available;
use jsrlab_core::inequalities::{
    check_other_inequality, check_theorem_b, other_inequality_ensemble, power_inequality_ensemble,
    procesi_ensemble, theorem_b_ensemble, trace_identity_ensemble, weaker_lemma_ensemble, Branch, EnsembleConfig,
    IneqReport,
};
use jsrlab_core::matcore::{cayley_hamilton_residual, char_poly, eigenvalues};
use jsrlab_core::norms::NormSpec;
use jsrlab_core::random::{gaussian_matrix, trial_rng};
use jsrlab_core::semigroup::{jsr_bounds, spectral_radii_by_depth, BoundsConfig};
use jsrlab_core::{CMatrix, MatrixSet, C64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn extra(r: &IneqReport, key: &str) -> f64 {
    r.extra.get(key).copied().unwrap_or(0.0)
}

fn config(dim: usize, trials: usize, seed: u64) -> EnsembleConfig {
    EnsembleConfig {
        parallel: parallel_available(),
        ..EnsembleConfig::new(dim, trials, seed)
    }
}

fn gripenberg() -> Outcome {
    let g = MatrixSet::gripenberg();
    let start = Instant::now();
    let radii = spectral_radii_by_depth(&g, 12, 1 << 20).map_err(|e| e.to_string())?;
    for (i, r) in radii.iter().enumerate() {
        let n = i + 1;
        let expect = if n % 2 == 0 { 1.0 } else { 0.0 };
        ensure((r - expect).abs() <= 1e-9, || format!("rho(Sigma^{n}) = {r}, expected {expect}"))?;
    }
    let report = jsr_bounds(&g, &NormSpec::Euclidean, &BoundsConfig { max_depth: 4, ..BoundsConfig::default() })
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure((report.best_upper - 1.0).abs() <= 1e-9, || format!("upper {}", report.best_upper))?;
    ensure((report.best_lower - 1.0).abs() <= 1e-9, || format!("lower {}", report.best_lower))?;
    ensure(elapsed < 1.0, || format!("took {elapsed:.3} s"))?;
    Ok(format!(
        "rho(Sigma^n) alternates 0/1 for n <= 12; bounds ({}, {}) in {elapsed:.4} s",
        report.best_lower, report.best_upper
    ))
}

fn trace_identity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        let r = trace_identity_ensemble(&config(d, 1000, 100 + d as u64)).map_err(|e| e.to_string())?;
        ensure(r.violations == 0 && r.trials == 1000, || {
            format!("d={d}: {} residuals over 1e-9 (max {:e})", r.violations, r.max_ratio)
        })?;
        worst = worst.max(r.max_ratio);
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 30.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!("3000 tuples, max residual {worst:e}, {elapsed:.2} s"))
}

fn power_inequality() -> Outcome {
    let mut parts = Vec::new();
    for d in 2..=5 {
        let r = power_inequality_ensemble(&config(d, 10_000, 200 + d as u64), &[NormSpec::Euclidean, NormSpec::VectorSup])
            .map_err(|e| e.to_string())?;
        let bound = (1u64 << d) as f64 - 1.0;
        ensure(r.violations == 0 && r.max_ratio <= bound + 1e-8, || {
            format!("d={d}: {} violations, max ratio {}", r.violations, r.max_ratio)
        })?;
        parts.push(format!("d={d} max {:.4}/{bound}", r.max_ratio));
    }
    Ok(parts.join(", "))
}

fn weaker_lemma() -> Outcome {
    let mut parts = Vec::new();
    for d in 2..=3 {
        let r = weaker_lemma_ensemble(&config(d, 1000, 300 + d as u64)).map_err(|e| e.to_string())?;
        let bound = (d as f64).powi(d as i32 - 1);
        ensure(r.violations == 0 && r.max_ratio <= bound + 1e-8, || {
            format!("d={d}: {} violations, max ratio {}", r.violations, r.max_ratio)
        })?;
        parts.push(format!("d={d} max {:.4}/{bound}", r.max_ratio));
    }
    Ok(parts.join(", "))
}

fn procesi() -> Outcome {
    let mut parts = Vec::new();
    for d in 2..=3 {
        let r = procesi_ensemble(&config(d, 1000, 400 + d as u64)).map_err(|e| e.to_string())?;
        for key in ["conjugation_violations", "homogeneity_violations", "cyclicity_violations"] {
            ensure(extra(&r, key) == 0.0, || format!("d={d}: {key} = {}", extra(&r, key)))?;
        }
        ensure(r.violations == 0, || format!("d={d}: {} violations", r.violations))?;
        parts.push(format!(
            "d={d} conj {:.1e}, homog {:.1e}, cyclic {:.1e}",
            r.max_ratio,
            extra(&r, "homogeneity_deviation"),
            extra(&r, "cyclicity_defect")
        ));
    }
    Ok(parts.join("; "))
}

fn pair_ensemble() -> Result<IneqReport, String> {
    let cfg = EnsembleConfig {
        depth: 10,
        ..config(2, 100, 600)
    };
    theorem_b_ensemble(&cfg, None).map_err(|e| e.to_string())
}

fn gap_convergence() -> Outcome {
    let r = pair_ensemble()?;
    let (g2, g10) = (extra(&r, "median_gap_depth_2"), extra(&r, "median_gap_full_depth"));
    let info = format!("median gap depth 2 = {g2:.4e}, depth 10 = {g10:.4e}");
    ensure(extra(&r, "gap_increases") == 0.0, || {
        format!("{} pairs with larger gap at depth 10; {info}", extra(&r, "gap_increases"))
    })?;
    ensure(extra(&r, "even_power_nonmonotone") == 0.0, || {
        format!(
            "{} pairs where rho(Sigma^2n)^(1/2n) decreases for some n <= 5; {info}",
            extra(&r, "even_power_nonmonotone")
        )
    })?;
    Ok(info)
}

fn theorem_b() -> Outcome {
    let r = pair_ensemble()?;
    ensure(r.violations == 0, || format!("{} flagged or restricted-range mismatches", r.violations))?;
    ensure(extra(&r, "restricted_range_mismatches") == 0.0, || "restricted range mismatch".into())?;
    ensure(r.evaluated + r.degenerate == r.trials, || "missing ratios".into())?;
    let g = check_theorem_b(&MatrixSet::gripenberg(), 10, None, 1e-9).map_err(|e| e.to_string())?;
    let gr = g.ratio.unwrap_or(f64::NAN);
    ensure((gr - 1.0).abs() <= 1e-9, || format!("Gripenberg ratio {gr}"))?;
    Ok(format!(
        "{} finite ratios, median {:.4}, max {:.4}; Gripenberg ratio {gr}",
        r.evaluated,
        r.median_ratio.unwrap_or(0.0),
        r.max_ratio
    ))
}

fn degenerate_branch() -> Outcome {
    let mut degenerate = 0;
    for d in 2..=4 {
        let r = other_inequality_ensemble(&config(d, 400, 800 + d as u64), &NormSpec::Euclidean)
            .map_err(|e| e.to_string())?;
        ensure(r.violations == 0 && extra(&r, "degenerate_failures") == 0.0, || {
            format!("d={d}: {} degenerate tuples with ||P|| above 1e-9 ||Sigma||^d", r.violations)
        })?;
        degenerate += r.degenerate;
    }
    let n = CMatrix::from_real([[0.0, 1.0], [0.0, 0.0]]);
    let c = check_other_inequality(&[n.clone(), n], &NormSpec::Euclidean).map_err(|e| e.to_string())?;
    ensure(c.branch == Branch::Degenerate && c.holds, || "nilpotent commuting pair".into())?;
    ensure(degenerate > 0, || "no degenerate tuples sampled".into())?;
    Ok(format!("{degenerate} degenerate tuples, all with ||P|| <= 1e-9 ||Sigma||^d; hand case exact"))
}

/// `e_i(λ)` from the expansion of `Π (z − λ_j)`.
fn elementary_symmetric(lambda: &[C64]) -> Vec<C64> {
    let mut e = vec![C64::new(0.0, 0.0); lambda.len() + 1];
    e[0] = C64::new(1.0, 0.0);
    for (k, l) in lambda.iter().enumerate() {
        for i in (1..=k + 1).rev() {
            let prev = e[i - 1];
            e[i] += prev * l;
        }
    }
    e
}

fn cayley_hamilton() -> Outcome {
    let mut worst_ch: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    for d in 1..=5 {
        for t in 0..1000 {
            let mut rng = trial_rng(900 + d as u64, t);
            let a = gaussian_matrix(&mut rng, d);
            let ch = cayley_hamilton_residual(&a).map_err(|e| e.to_string())?;
            ensure(ch < 1e-9, || format!("d={d} trial {t}: residual {ch:e}"))?;
            worst_ch = worst_ch.max(ch);
            let spec = eigenvalues(&a).map_err(|e| e.to_string())?;
            let e = elementary_symmetric(&spec.eigenvalues);
            let scale = 1.0 + spec.radius;
            for (i, s) in char_poly(&a).coeffs.iter().enumerate() {
                let dev = (s - e[i + 1]).norm() / scale.powi(i as i32 + 1);
                ensure(dev <= 1e-9, || format!("d={d} trial {t}: sigma_{} off by {dev:e}", i + 1))?;
                worst_sym = worst_sym.max(dev);
            }
        }
    }
    Ok(format!("5000 matrices, max residual {worst_ch:e}, max coefficient gap {worst_sym:e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 Gripenberg pair", gripenberg),
        ("2 trace identity", trace_identity),
        ("3 power inequality", power_inequality),
        ("4 weaker lemma", weaker_lemma),
        ("5 trace-word invariance", procesi),
        ("6 bound gap convergence", gap_convergence),
        ("7 spectral-radius comparison", theorem_b),
        ("8 symmetrized product degenerate branch", degenerate_branch),
        ("9 Cayley-Hamilton", cayley_hamilton),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
