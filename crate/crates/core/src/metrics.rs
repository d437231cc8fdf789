//! Front comparison metrics: spacing, diversity, non-dominated filtering
//! and coverage against a reference front.
//!
//! Direction conventions are deliberately NOT baked in here; the reporting
//! layer labels which direction counts as better for each metric.

use crate::model::ObjectiveVector;

fn euclidean(a: &ObjectiveVector, b: &ObjectiveVector) -> f64 {
    let d1 = a.obj1 - b.obj1;
    let d2 = a.obj2 - b.obj2;
    (d1 * d1 + d2 * d2).sqrt()
}

/// Normalized mean absolute deviation of consecutive-solution gaps along
/// the front (ordered by rising first objective):
/// `sum_i |d_mean - d_i| / ((N-1) * d_mean)`.
///
/// Returns `None` when fewer than two points exist or when the mean gap is
/// zero, where the metric is undefined.
pub fn spacing(front: &[ObjectiveVector]) -> Option<f64> {
    if front.len() < 2 {
        return None;
    }
    let mut ordered: Vec<&ObjectiveVector> = front.iter().collect();
    ordered.sort_by(|a, b| a.obj1.total_cmp(&b.obj1).then(a.obj2.total_cmp(&b.obj2)));
    let gaps: Vec<f64> = ordered.windows(2).map(|w| euclidean(w[0], w[1])).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    if mean == 0.0 {
        return None;
    }
    let deviation: f64 = gaps.iter().map(|d| (mean - d).abs()).sum();
    Some(deviation / (gaps.len() as f64 * mean))
}

/// Spread of the front across objective space: the Euclidean norm of the
/// per-objective ranges. Zero iff all points coincide.
pub fn diversity(front: &[ObjectiveVector]) -> f64 {
    if front.is_empty() {
        return 0.0;
    }
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for p in front {
        for (k, v) in [p.obj1, p.obj2].into_iter().enumerate() {
            min[k] = min[k].min(v);
            max[k] = max[k].max(v);
        }
    }
    let r1 = max[0] - min[0];
    let r2 = max[1] - min[1];
    (r1 * r1 + r2 * r2).sqrt()
}

/// Indices of the points not strictly dominated by any other point.
/// Duplicates are all kept (equal vectors do not dominate each other).
pub fn filter_non_dominated(points: &[ObjectiveVector]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().enumerate().any(|(j, p)| j != i && p.dominates(&points[i])))
        .collect()
}

/// Fraction of the reference front `b` matched by some vector of `a`
/// within a component-wise tolerance.
pub fn coverage_fraction(a: &[ObjectiveVector], b: &[ObjectiveVector], tol: f64) -> f64 {
    if b.is_empty() {
        return 1.0;
    }
    let matched = b
        .iter()
        .filter(|target| {
            a.iter().any(|point| {
                (point.obj1 - target.obj1).abs() <= tol && (point.obj2 - target.obj2).abs() <= tol
            })
        })
        .count();
    matched as f64 / b.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(a: f64, b: f64) -> ObjectiveVector {
        ObjectiveVector::new(a, b)
    }

    #[test]
    fn spacing_equally_spaced_is_zero() {
        let front = vec![v(0.0, 6.0), v(2.0, 4.0), v(4.0, 2.0), v(6.0, 0.0)];
        assert_eq!(spacing(&front), Some(0.0));
    }

    #[test]
    fn spacing_two_points_is_zero() {
        assert_eq!(spacing(&[v(0.0, 1.0), v(1.0, 0.0)]), Some(0.0));
    }

    #[test]
    fn spacing_gaps_one_and_three() {
        // consecutive Euclidean gaps 1 and 3: (|2-1| + |2-3|) / (2 * 2)
        let front = vec![v(0.0, 0.0), v(1.0, 0.0), v(4.0, 0.0)];
        assert_eq!(spacing(&front), Some(0.5));
    }

    #[test]
    fn spacing_undefined_cases() {
        assert_eq!(spacing(&[]), None);
        assert_eq!(spacing(&[v(1.0, 1.0)]), None);
        // coincident points: mean gap zero
        assert_eq!(spacing(&[v(1.0, 1.0), v(1.0, 1.0)]), None);
    }

    #[test]
    fn spacing_ignores_input_order() {
        let sorted = vec![v(0.0, 0.0), v(1.0, 0.0), v(4.0, 0.0)];
        let shuffled = vec![v(4.0, 0.0), v(0.0, 0.0), v(1.0, 0.0)];
        assert_eq!(spacing(&sorted), spacing(&shuffled));
    }

    #[test]
    fn diversity_fixture() {
        assert_eq!(diversity(&[v(0.0, 1.0), v(3.0, 5.0)]), 5.0);
    }

    #[test]
    fn diversity_degenerate() {
        assert_eq!(diversity(&[v(2.0, 3.0)]), 0.0);
        assert_eq!(diversity(&[]), 0.0);
    }

    #[test]
    fn diversity_translation_invariant() {
        let front = vec![v(0.0, 1.0), v(3.0, 5.0), v(1.0, 2.0)];
        let moved: Vec<_> = front.iter().map(|p| v(p.obj1 + 10.0, p.obj2 - 4.0)).collect();
        assert_eq!(diversity(&front), diversity(&moved));
    }

    #[test]
    fn filter_fixtures() {
        assert_eq!(filter_non_dominated(&[v(1.0, 2.0), v(2.0, 1.0), v(3.0, 3.0)]), vec![0, 1]);
        assert_eq!(filter_non_dominated(&[v(1.0, 1.0), v(1.0, 1.0)]), vec![0, 1]);
        assert_eq!(filter_non_dominated(&[v(1.0, 1.0), v(2.0, 2.0), v(3.0, 3.0)]), vec![0]);
    }

    #[test]
    fn coverage_fixtures() {
        let b = vec![v(1.0, 1.0), v(2.0, 2.0)];
        assert_eq!(coverage_fraction(&b, &b, 1e-9), 1.0);
        assert_eq!(coverage_fraction(&[], &b, 1e-9), 0.0);
        assert_eq!(coverage_fraction(&[v(1.0, 1.0)], &b, 1e-9), 0.5);
    }

    proptest! {
        #[test]
        fn spacing_is_scale_invariant(scale in 0.1f64..50.0, points in front_strategy()) {
            let scaled: Vec<_> = points.iter().map(|p| v(p.obj1 * scale, p.obj2 * scale)).collect();
            match (spacing(&points), spacing(&scaled)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0)),
                (None, None) => {}
                other => prop_assert!(false, "definedness changed under scaling: {other:?}"),
            }
        }

        #[test]
        fn diversity_scales_linearly(scale in 0.1f64..50.0, points in front_strategy()) {
            let scaled: Vec<_> = points.iter().map(|p| v(p.obj1 * scale, p.obj2 * scale)).collect();
            let base = diversity(&points);
            prop_assert!((diversity(&scaled) - scale * base).abs() <= 1e-9 * (scale * base).max(1.0));
        }

        #[test]
        fn filter_is_idempotent(points in front_strategy()) {
            let first = filter_non_dominated(&points);
            let survivors: Vec<_> = first.iter().map(|&i| points[i]).collect();
            let second = filter_non_dominated(&survivors);
            prop_assert_eq!(second.len(), survivors.len());
        }
    }

    fn front_strategy() -> impl Strategy<Value = Vec<ObjectiveVector>> {
        proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0), 2..12)
            .prop_map(|pts| pts.into_iter().map(|(a, b)| v(a, b)).collect())
    }
}
