use super::*;
use crate::grid::{DiscreteSet, Grid, ScalarField};

fn grid2(cells: usize) -> Grid {
    Grid::new(2, &[(-2.0, 2.0), (-2.0, 2.0)], cells).unwrap()
}

fn disk_set(grid: Grid, center: [f64; 2], radius: f64) -> DiscreteSet {
    crate::testbed::ball_set(grid, &center, radius).unwrap()
}

fn block_set(grid: Grid, lo: usize, hi: usize) -> DiscreteSet {
    let cells = grid
        .indices()
        .filter(|&i| {
            let m = grid.index_to_multi(i);
            (lo..hi).contains(&m[0]) && (lo..hi).contains(&m[1])
        })
        .collect();
    DiscreteSet::new(grid, cells).unwrap()
}

#[test]
fn single_cell_cover_costs() {
    let grid = grid2(16);
    let h = grid.h();
    let e = DiscreteSet::new(grid, vec![grid.multi_to_index([8, 8, 0])]).unwrap();

    let greedy = greedy_upper(&e, 1.0).unwrap();
    assert!(greedy.cost <= 2.0 * h, "greedy cost {} vs 2h {}", greedy.cost, 2.0 * h);
    greedy.validate(&e).unwrap();

    // the enclosing-ball candidate sits at the cell centre: radius h·√2/2
    let exact = exact_small(&e, 1.0, 10_000).unwrap();
    assert!(exact.optimal);
    let best = h * std::f64::consts::SQRT_2 / 2.0;
    assert!((exact.cover.cost - best).abs() < 1e-12);
}

#[test]
fn block_has_an_enclosing_candidate() {
    let grid = grid2(16);
    let e = block_set(grid, 6, 10); // 4×4 cells
    let family = candidate_balls(&e, 2.0).unwrap();
    let all = family
        .balls
        .iter()
        .find(|c| c.covered.len() == e.len())
        .expect("an enclosing ball candidate");
    let h = grid.h();
    assert!(all.ball.radius >= 2.0 * std::f64::consts::SQRT_2 * h);
}

#[test]
fn candidate_count_stays_within_documented_bound() {
    let grid = grid2(64);
    let e = disk_set(grid, [0.0, 0.0], 1.0);
    let family = candidate_balls(&e, 1.0).unwrap();
    let cells = e.len() as f64;
    assert!(
        (family.balls.len() as f64) <= cells * cells.log2(),
        "{} candidates for {} cells",
        family.balls.len(),
        e.len()
    );
}

#[test]
fn unit_disk_bracket_contains_r_to_delta() {
    let grid = grid2(64);
    let e = disk_set(grid, [0.0, 0.0], 1.0);
    for &delta in &[1.0, 2.0] {
        let b = content_bracket(&e, delta).unwrap();
        assert!(b.lower <= 1.0 && 1.0 <= b.upper, "delta {delta}: [{}, {}]", b.lower, b.upper);
        assert!(b.upper <= 1.3, "delta {delta}: upper {}", b.upper);
        assert!(b.lower >= 1.0 / b.slack, "delta {delta}: lower {} slack {}", b.lower, b.slack);
    }
}

#[test]
fn volume_bound_drives_the_full_dimension_lower() {
    let grid = grid2(64);
    let e = disk_set(grid, [0.0, 0.0], 1.0);
    let b = content_bracket(&e, 2.0).unwrap();
    assert_eq!(b.lower_method, LowerMethod::VolumeBound);
    assert!(b.lower >= 0.8);
}

#[test]
fn empty_set_brackets_to_zero() {
    let grid = grid2(16);
    let e = DiscreteSet::empty(grid);
    let b = content_bracket(&e, 1.5).unwrap();
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
    assert_eq!(b.lower_method, LowerMethod::Exact);
}

#[test]
fn degenerate_delta_is_rejected() {
    let grid = grid2(16);
    let e = block_set(grid, 4, 6);
    assert!(matches!(
        content_bracket(&e, 0.05),
        Err(crate::error::Error::BadDelta { .. })
    ));
    assert!(matches!(
        content_bracket(&e, 2.5),
        Err(crate::error::Error::BadDelta { .. })
    ));
}

#[test]
fn exact_sandwich_on_small_instances() {
    let grid = grid2(32);
    // an L-shaped blob of 48 cells
    let mut cells = Vec::new();
    for j in 10..14 {
        for i in 10..18 {
            cells.push(grid.multi_to_index([i, j, 0]));
        }
    }
    for j in 14..18 {
        for i in 10..14 {
            cells.push(grid.multi_to_index([i, j, 0]));
        }
    }
    let e = DiscreteSet::new(grid, cells).unwrap();
    for &delta in &[1.0, 1.5, 2.0] {
        let lower = frostman_lower(&e, delta, &BracketOptions::default()).unwrap();
        let exact = exact_small(&e, delta, 100_000).unwrap();
        let greedy = greedy_upper(&e, delta).unwrap();
        assert!(
            lower.value <= exact.cover.cost * (1.0 + 1e-9),
            "delta {delta}: lower {} > exact {}",
            lower.value,
            exact.cover.cost
        );
        assert!(
            exact.cover.cost <= greedy.cost * (1.0 + 1e-9),
            "delta {delta}: exact {} > greedy {}",
            exact.cover.cost,
            greedy.cost
        );
    }
}

#[test]
fn zero_budget_returns_greedy_incumbent_unflagged() {
    let grid = grid2(32);
    let e = block_set(grid, 8, 16);
    let greedy = greedy_upper(&e, 1.5).unwrap();
    let out = exact_small(&e, 1.5, 0).unwrap();
    assert!(!out.optimal);
    assert!((out.cover.cost - greedy.cost).abs() < 1e-12);
}

#[test]
fn oversized_instance_is_rejected() {
    let grid = grid2(64);
    let e = disk_set(grid, [0.0, 0.0], 1.0);
    assert!(matches!(
        exact_small(&e, 1.0, 1_000),
        Err(crate::error::Error::InstanceTooLarge { .. })
    ));
}

#[test]
fn union_upper_is_subadditive() {
    let grid = grid2(64);
    let a = disk_set(grid, [-1.0, -1.0], 0.5);
    let b = disk_set(grid, [1.0, 1.0], 0.5);
    let delta = 2.0;
    let ca = greedy_upper(&a, delta).unwrap();
    let cb = greedy_upper(&b, delta).unwrap();
    let (u, cu) = union_upper(&[&a, &b], delta).unwrap();
    assert_eq!(u.len(), a.len() + b.len());
    assert!(cu.cost <= ca.cost + cb.cost + 1e-12);
    cu.validate(&u).unwrap();
}

#[test]
fn nested_brackets_are_monotone() {
    let grid = grid2(48);
    let big = disk_set(grid, [0.0, 0.0], 1.2);
    let small = disk_set(grid, [0.3, 0.0], 0.5);
    assert!(small.is_subset_of(&big));
    for &delta in &[1.0, 1.7] {
        let bs = content_brackets_nested(
            &[big.clone(), small.clone()],
            delta,
            &BracketOptions::default(),
        )
        .unwrap();
        assert!(bs[1].lower <= bs[0].lower + 1e-12);
        assert!(bs[1].upper <= bs[0].upper + 1e-12);
    }
}

#[test]
fn brackets_scale_like_lambda_to_delta() {
    let small = Grid::new(2, &[(-1.0, 1.0), (-1.0, 1.0)], 48).unwrap();
    let large = Grid::new(2, &[(-2.0, 2.0), (-2.0, 2.0)], 48).unwrap();
    let e_small = disk_set(small, [0.1, -0.2], 0.6);
    let e_large = disk_set(large, [0.2, -0.4], 1.2);
    assert_eq!(e_small.len(), e_large.len());
    for &delta in &[0.8, 1.5, 2.0] {
        let b1 = content_bracket(&e_small, delta).unwrap();
        let b2 = content_bracket(&e_large, delta).unwrap();
        let factor = 2.0f64.powf(delta);
        assert!(
            (b2.lower - factor * b1.lower).abs() <= 1e-9 * b2.lower.max(1e-12),
            "delta {delta}: lower {} vs {}",
            b2.lower,
            factor * b1.lower
        );
        assert!(
            (b2.upper - factor * b1.upper).abs() <= 1e-9 * b2.upper,
            "delta {delta}: upper {} vs {}",
            b2.upper,
            factor * b1.upper
        );
    }
}

#[test]
fn bracket_is_deterministic() {
    let grid = grid2(48);
    let e = disk_set(grid, [0.2, 0.1], 0.8);
    let a = content_bracket(&e, 1.3).unwrap();
    let b = content_bracket(&e, 1.3).unwrap();
    let ja = serde_json::to_string(&a).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn frostman_segment_lower_bound_in_dimension_one() {
    // a 1d interval of length 1: content at δ = 1 is 1/2 (covers pay radii)
    let grid = Grid::new(1, &[(0.0, 4.0)], 256).unwrap();
    let h = grid.h();
    let start = (1.0 / h) as usize;
    let cells: Vec<usize> = (start..start + (1.0 / h) as usize).collect();
    let e = DiscreteSet::new(grid, cells).unwrap();
    let b = content_bracket(&e, 1.0).unwrap();
    // single interval of length 1 is covered by one ball of radius 1/2
    assert!(b.upper <= 0.55, "upper {}", b.upper);
    assert!(b.lower >= 0.5 / b.slack, "lower {} slack {}", b.lower, b.slack);
    assert!(b.lower <= b.upper);
}
