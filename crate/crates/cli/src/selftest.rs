//! The `selftest` verb: fast built-in invariant checks.

use std::sync::Arc;

use funshap::datagen::{apply_transform, gen_toy_parabola, TransformKind};
use funshap::models::OraclePredictor;
use funshap::payoff::{PayoffCache, PayoffContext};
use funshap::{
    pseudo_inverse_psd, reconstruct, reconstruct_fpca_form, sample_permutations, shapley_exact,
    shapley_monte_carlo, trapezoid_quadrature, Coalition, FunctionalSample, GaussianMoments, Grid,
    Partition, PermutationBatch, ReconstructionPlan,
};
use funshap::nalgebra::DMatrix;

type Check = (&'static str, fn() -> Result<(), String>);

fn quadrature_exact_on_linear() -> Result<(), String> {
    let grid = Grid::uniform(0.0, 1.0, 101).map_err(|e| e.to_string())?;
    let f: Vec<f64> = grid.points().iter().map(|t| 3.0 * t - 1.0).collect();
    let q = trapezoid_quadrature(&grid, &f).map_err(|e| e.to_string())?;
    if (q - 0.5).abs() > 1e-12 {
        return Err(format!("integral of 3t-1 over [0,1] came out as {q}"));
    }
    Ok(())
}

fn coalition_indices_partition_grid() -> Result<(), String> {
    let grid = Grid::uniform(0.0, 1.0, 101).map_err(|e| e.to_string())?;
    let partition = Partition::equal((0.0, 1.0), 7).map_err(|e| e.to_string())?;
    for mask in [0u64, 0b1010101, 0b0110010, 0b1111111] {
        let c = Coalition::new(mask, 7).map_err(|e| e.to_string())?;
        let inside =
            funshap::coalition_grid_indices(&partition, &c, &grid).map_err(|e| e.to_string())?;
        let outside = funshap::coalition_grid_indices(&partition, &c.complement(), &grid)
            .map_err(|e| e.to_string())?;
        if inside.len() + outside.len() != grid.len() {
            return Err(format!("mask {mask:#b}: indices do not partition the grid"));
        }
        if inside.iter().any(|h| outside.contains(h)) {
            return Err(format!("mask {mask:#b}: index sets overlap"));
        }
    }
    Ok(())
}

fn moore_penrose_identities() -> Result<(), String> {
    let b = DMatrix::from_fn(8, 3, |r, c| (((r * 7 + c * 13) as f64) * 0.83).sin());
    let m = &b * b.transpose();
    let m = (&m + m.transpose()) / 2.0;
    let p = pseudo_inverse_psd(&m, None).map_err(|e| e.to_string())?;
    if (&m * &p * &m - &m).abs().max() > 1e-8 {
        return Err("M P M != M".into());
    }
    if (&p * &m * &p - &p).abs().max() > 1e-8 {
        return Err("P M P != P".into());
    }
    Ok(())
}

fn reconstruction_routes_agree() -> Result<(), String> {
    let grid = Grid::uniform(0.0, 1.0, 25).map_err(|e| e.to_string())?;
    let mut rows: Vec<Vec<f64>> = (0..10)
        .map(|j| {
            (0..25)
                .map(|h| ((j as f64 + 1.0) * (h as f64) * 0.21).sin())
                .collect()
        })
        .collect();
    rows.push(rows[0].clone()); // rank deficiency
    let sample = FunctionalSample::from_rows(grid, &rows).map_err(|e| e.to_string())?;
    let moments = GaussianMoments::fit(&sample).map_err(|e| e.to_string())?;
    let observed: Vec<usize> = (0..25).filter(|h| h % 3 != 1).collect();
    let plan = ReconstructionPlan::new(&moments, &observed).map_err(|e| e.to_string())?;
    let a = reconstruct(&plan, &moments, &sample).map_err(|e| e.to_string())?;
    let b = reconstruct_fpca_form(&moments, &sample, &observed).map_err(|e| e.to_string())?;
    let diff = (a.values() - b.values()).abs().max();
    if diff > 1e-8 {
        return Err(format!("batched and score-form completions differ by {diff}"));
    }
    Ok(())
}

fn exact_shapley_axioms() -> Result<(), String> {
    let weights = [1.0, 2.0, 3.0, 0.0];
    let payoff = |c: Coalition| Ok(c.members().map(|i| weights[i]).sum::<f64>());
    let result = shapley_exact(payoff, 4).map_err(|e| e.to_string())?;
    for (i, (phi, expect)) in result.phi().iter().zip(&weights).enumerate() {
        if (phi - expect).abs() > 1e-12 {
            return Err(format!("additive game: phi[{i}] = {phi}, expected {expect}"));
        }
    }
    if result.phi()[3] != 0.0 {
        return Err("dummy player got non-zero value".into());
    }
    if result.efficiency_gap() > 1e-10 {
        return Err(format!("efficiency gap {}", result.efficiency_gap()));
    }
    Ok(())
}

fn monte_carlo_matches_exact_on_full_coverage() -> Result<(), String> {
    let payoff = |c: Coalition| Ok((c.mask() as f64 * 0.59).sin());
    let perms = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    let batch = PermutationBatch::from_permutations(3, perms, 0).map_err(|e| e.to_string())?;
    let mc = shapley_monte_carlo(payoff, &batch).map_err(|e| e.to_string())?;
    let exact = shapley_exact(payoff, 3).map_err(|e| e.to_string())?;
    for (a, b) in mc.phi().iter().zip(exact.phi()) {
        if (a - b).abs() > 1e-12 {
            return Err(format!("Monte Carlo {a} vs exact {b}"));
        }
    }
    Ok(())
}

fn toy_pipeline_is_deterministic_and_efficient() -> Result<(), String> {
    let run = || -> Result<(Vec<f64>, u64, f64), String> {
        let grid = Grid::uniform(0.0, 1.0, 41).map_err(|e| e.to_string())?;
        let sample = gen_toy_parabola(&grid, 30, 0.01, 77).map_err(|e| e.to_string())?;
        let targets = apply_transform(&sample, TransformKind::MinValue).map_err(|e| e.to_string())?;
        let moments = GaussianMoments::fit(&sample).map_err(|e| e.to_string())?;
        let partition = Partition::equal((0.0, 1.0), 4).map_err(|e| e.to_string())?;
        let ctx = PayoffContext::new(
            Arc::new(OraclePredictor::new(TransformKind::MinValue)),
            moments,
            sample,
            targets,
            partition,
        )
        .map_err(|e| e.to_string())?;
        let cache = PayoffCache::new();
        let game = ctx.game(&cache);
        let batch = sample_permutations(4, 50, 123).map_err(|e| e.to_string())?;
        let result = shapley_monte_carlo(&game, &batch).map_err(|e| e.to_string())?;
        Ok((
            result.phi().to_vec(),
            cache.hits(),
            result.efficiency_gap(),
        ))
    };
    let (phi_a, hits, gap) = run()?;
    let (phi_b, _, _) = run()?;
    if gap > 1e-10 {
        return Err(format!("efficiency gap {gap}"));
    }
    if hits == 0 {
        return Err("memoization produced no cache hits".into());
    }
    if phi_a
        .iter()
        .zip(&phi_b)
        .any(|(a, b)| a.to_bits() != b.to_bits())
    {
        return Err("two identical runs produced different values".into());
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    ("trapezoid quadrature exact on linear functions", quadrature_exact_on_linear),
    ("coalition index sets partition the grid", coalition_indices_partition_grid),
    ("Moore-Penrose identities", moore_penrose_identities),
    ("batched and score-form reconstructions agree", reconstruction_routes_agree),
    ("exact Shapley axioms (additive, dummy, efficiency)", exact_shapley_axioms),
    ("Monte Carlo equals exact on full coverage", monte_carlo_matches_exact_on_full_coverage),
    ("toy pipeline deterministic, memoized, efficient", toy_pipeline_is_deterministic_and_efficient),
];

/// Run every check, print one line each; returns the number of failures.
pub fn run_selftest() -> usize {
    let mut failures = 0;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => println!("ok     {name}"),
            Err(detail) => {
                failures += 1;
                println!("FAILED {name}: {detail}");
            }
        }
    }
    if failures == 0 {
        println!("selftest: all {} checks passed", CHECKS.len());
    } else {
        println!("selftest: {failures} of {} checks failed", CHECKS.len());
    }
    failures
}
