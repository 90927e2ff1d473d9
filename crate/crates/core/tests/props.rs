//! Property tests for the core invariants.

use funshap::payoff::PayoffCache;
use funshap::{
    coalition_grid_indices, l2_distance, pseudo_inverse_psd, sample_permutations,
    trapezoid_quadrature, Coalition, Grid, Partition,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = Grid> {
    // random strictly increasing grids over [0, 1] with 5..40 points
    proptest::collection::vec(0.01f64..1.0, 4..39).prop_map(|gaps| {
        let mut points = vec![0.0];
        let total: f64 = gaps.iter().sum();
        let mut acc = 0.0;
        for g in &gaps {
            acc += g / total;
            points.push(acc.min(1.0));
        }
        let last = points.len() - 1;
        points[last] = 1.0;
        Grid::new(points).expect("strictly increasing by construction")
    })
}

proptest! {
    #[test]
    fn quadrature_is_linear(
        grid in grid_strategy(),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
        seed in 0u64..1000,
    ) {
        let t = grid.len();
        let f: Vec<f64> = (0..t).map(|i| ((i as f64 + seed as f64) * 0.7).sin()).collect();
        let g: Vec<f64> = (0..t).map(|i| ((i as f64) * 1.3 + 0.2).cos()).collect();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = trapezoid_quadrature(&grid, &combo).unwrap();
        let rhs = alpha * trapezoid_quadrature(&grid, &f).unwrap()
            + beta * trapezoid_quadrature(&grid, &g).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn l2_satisfies_the_triangle_inequality(
        grid in grid_strategy(),
        s1 in 0u64..500,
        s2 in 0u64..500,
        s3 in 0u64..500,
    ) {
        let t = grid.len();
        let mk = |s: u64| -> Vec<f64> {
            (0..t).map(|i| ((i as f64 + 1.0) * (s as f64 + 1.0) * 0.01).sin() * 2.0).collect()
        };
        let (f, g, h) = (mk(s1), mk(s2 + 600), mk(s3 + 1300));
        let fg = l2_distance(&grid, &f, &g).unwrap();
        let gh = l2_distance(&grid, &g, &h).unwrap();
        let fh = l2_distance(&grid, &f, &h).unwrap();
        prop_assert!(fh <= fg + gh + 1e-10);
    }

    #[test]
    fn coalition_indices_partition_the_grid(
        grid in grid_strategy(),
        n in 1usize..12,
        mask_seed in 0u64..u64::MAX,
    ) {
        let partition = Partition::equal((0.0, 1.0), n).unwrap();
        let mask = if n == 64 { mask_seed } else { mask_seed % (1 << n) };
        let coalition = Coalition::new(mask, n).unwrap();
        let inside = coalition_grid_indices(&partition, &coalition, &grid).unwrap();
        let outside = coalition_grid_indices(&partition, &coalition.complement(), &grid).unwrap();
        let mut union: Vec<usize> = inside.iter().chain(outside.iter()).copied().collect();
        union.sort_unstable();
        prop_assert_eq!(union, (0..grid.len()).collect::<Vec<_>>());
    }

    #[test]
    fn equal_partition_widths_match(
        a in -5.0f64..5.0,
        span in 0.1f64..10.0,
        n in 1usize..=64,
    ) {
        let b = a + span;
        let p = Partition::equal((a, b), n).unwrap();
        let expect = span / n as f64;
        for i in 0..n {
            prop_assert!((p.width(i) - expect).abs() <= 1e-15 * span.max(1.0) * 4.0);
        }
    }

    #[test]
    fn sampled_permutations_are_bijections(
        n in 1usize..20,
        k in 1usize..30,
        seed in 0u64..10_000,
    ) {
        let batch = sample_permutations(n, k, seed).unwrap();
        for p in batch.permutations() {
            let mut seen = vec![false; n];
            for &v in p {
                prop_assert!(v < n && !seen[v]);
                seen[v] = true;
            }
        }
    }

    #[test]
    fn pseudo_inverse_satisfies_moore_penrose(
        dim in 2usize..10,
        rank_hint in 1usize..10,
        seed in 0u64..1000,
    ) {
        let rank = rank_hint.min(dim);
        let b = DMatrix::from_fn(dim, rank, |r, c| {
            (((r * 31 + c * 17) as f64 + seed as f64) * 0.37).sin()
        });
        let m = &b * b.transpose();
        let m = (&m + m.transpose()) / 2.0;
        let p = pseudo_inverse_psd(&m, None).unwrap();
        let scale = m.abs().max().max(1.0);
        prop_assert!((&m * &p * &m - &m).abs().max() < 1e-8 * scale);
        prop_assert!((&p * &m * &p - &p).abs().max() < 1e-8 * scale.max(p.abs().max()));
        let mp = &m * &p;
        prop_assert!((&mp - mp.transpose()).abs().max() < 1e-8);
    }

    #[test]
    fn cache_is_transparent_and_growth_is_monotone(
        n in 1usize..10,
        requests in proptest::collection::vec(0u64..1024, 1..200),
    ) {
        let game = |c: Coalition| Ok(((c.mask() as f64) * 0.61).sin());
        let cache = PayoffCache::new();
        let mut issued = 0usize;
        for &raw in &requests {
            let mask = if n == 64 { raw } else { raw % (1 << n) };
            let c = Coalition::new(mask, n).unwrap();
            let cached = cache.get_or_compute(c.mask(), || game(c)).unwrap();
            let direct = game(c).unwrap();
            prop_assert_eq!(cached.to_bits(), direct.to_bits());
            issued += 1;
            prop_assert!(cache.len() <= (1usize << n).min(issued));
        }
        prop_assert_eq!(cache.requests() as usize, issued);
        prop_assert_eq!(cache.hits() + cache.misses(), cache.requests());
    }
}
