//! Pareto dominance (minimisation), individual ranking and front extraction.

use serde::{Deserialize, Serialize};

use crate::error::{MoropError, Result};

/// An objective vector tagged with its solution id and feasibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub id: String,
    pub f: Vec<f64>,
    pub feasible: bool,
}

impl ObjectivePoint {
    pub fn new(id: impl Into<String>, f: Vec<f64>, feasible: bool) -> Self {
        Self { id: id.into(), f, feasible }
    }
}

/// `a` dominates `b`: no worse in every component and strictly better in at least one.
///
/// Slices must have equal length; this is the unchecked inner routine.
pub fn dominates_slice(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

pub fn dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> Result<bool> {
    if a.f.len() != b.f.len() {
        return Err(MoropError::DimensionMismatch {
            what: "objective vector",
            expected: a.f.len(),
            actual: b.f.len(),
        });
    }
    Ok(dominates_slice(&a.f, &b.f))
}

/// Ranks aligned with the input points: `rank = 1 + number of dominators`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub ids: Vec<String>,
    pub ranks: Vec<usize>,
}

impl RankResult {
    pub fn get(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id).map(|k| self.ranks[k])
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

/// Counts, for every point, how many points dominate it, plus one.
///
/// With `include_infeasible = true` every point may act as a dominator; otherwise only
/// feasible points do. Infeasible points still receive a rank in both modes.
pub fn rank_individuals(points: &[ObjectivePoint], include_infeasible: bool) -> Result<RankResult> {
    check_dims(points)?;
    let ranks = points
        .iter()
        .map(|s| {
            1 + points
                .iter()
                .filter(|t| (include_infeasible || t.feasible) && dominates_slice(&t.f, &s.f))
                .count()
        })
        .collect();
    Ok(RankResult {
        ids: points.iter().map(|p| p.id.clone()).collect(),
        ranks,
    })
}

/// Indices of feasible points not dominated by any feasible point, in input order.
pub fn pareto_front_indices(points: &[ObjectivePoint]) -> Result<Vec<usize>> {
    check_dims(points)?;
    Ok((0..points.len())
        .filter(|&i| points[i].feasible)
        .filter(|&i| {
            !points
                .iter()
                .any(|t| t.feasible && dominates_slice(&t.f, &points[i].f))
        })
        .collect())
}

/// Ids of the feasible non-dominated points, in input order.
pub fn pareto_front(points: &[ObjectivePoint]) -> Result<Vec<String>> {
    Ok(pareto_front_indices(points)?
        .into_iter()
        .map(|i| points[i].id.clone())
        .collect())
}

fn check_dims(points: &[ObjectivePoint]) -> Result<()> {
    if let Some(first) = points.first() {
        let m = first.f.len();
        if let Some(bad) = points.iter().find(|p| p.f.len() != m) {
            return Err(MoropError::DimensionMismatch {
                what: "objective vector",
                expected: m,
                actual: bad.f.len(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(id: &str, f: &[f64]) -> ObjectivePoint {
        ObjectivePoint::new(id, f.to_vec(), true)
    }

    // Numerical example at p = 3: f1 = x + 1.5, f2 = (x - 3)^2 for x = 1..5;
    // A (x = 1) violates f1 >= 3.
    fn numerical_at_p3() -> Vec<ObjectivePoint> {
        vec![
            ObjectivePoint::new("A", vec![2.5, 4.0], false),
            pt("B", &[3.5, 1.0]),
            pt("C", &[4.5, 0.0]),
            pt("D", &[5.5, 1.0]),
            pt("E", &[6.5, 4.0]),
        ]
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&pt("B", &[3.5, 1.0]), &pt("D", &[5.5, 1.0])).unwrap());
        assert!(dominates(&pt("A", &[2.5, 4.0]), &pt("E", &[6.5, 4.0])).unwrap());
        assert!(!dominates(&pt("a", &[1.0, 2.0]), &pt("b", &[1.0, 2.0])).unwrap());
    }

    #[test]
    fn dominance_dimension_mismatch() {
        let e = dominates(&pt("a", &[1.0, 2.0]), &pt("b", &[1.0, 2.0, 3.0])).unwrap_err();
        assert_eq!(e.kind(), "dimension-mismatch");
    }

    #[test]
    fn ranks_with_infeasible_dominators() {
        let r = rank_individuals(&numerical_at_p3(), true).unwrap();
        assert_eq!(r.ranks, vec![1, 1, 1, 3, 5]);
        assert_eq!(r.get("E"), Some(5));
    }

    #[test]
    fn ranks_without_infeasible_dominators() {
        let r = rank_individuals(&numerical_at_p3(), false).unwrap();
        // A no longer counts against E.
        assert_eq!(r.ranks, vec![1, 1, 1, 3, 4]);
    }

    #[test]
    fn numerical_example_at_p8_all_rank_one() {
        let pts: Vec<_> = (1..=5)
            .map(|x| {
                let x = x as f64;
                pt(&x.to_string(), &[x + 4.0, (x - 8.0).powi(2)])
            })
            .collect();
        let r = rank_individuals(&pts, true).unwrap();
        assert!(r.ranks.iter().all(|&k| k == 1));
    }

    #[test]
    fn single_point_rank_one() {
        let r = rank_individuals(&[pt("only", &[1.0, 1.0])], true).unwrap();
        assert_eq!(r.ranks, vec![1]);
    }

    #[test]
    fn duplicates_keep_rank_one() {
        let r = rank_individuals(&[pt("a", &[1.0, 1.0]), pt("b", &[1.0, 1.0])], true).unwrap();
        assert_eq!(r.ranks, vec![1, 1]);
    }

    #[test]
    fn front_examples() {
        let at_p5: Vec<_> = (1..=5)
            .map(|x| {
                let x = x as f64;
                pt(&format!("x{x}"), &[x + 2.5, (x - 5.0).powi(2)])
            })
            .collect();
        assert_eq!(pareto_front(&at_p5).unwrap().len(), 5);
        assert_eq!(
            pareto_front(&[pt("a", &[1.0, 1.0]), pt("b", &[2.0, 2.0])]).unwrap(),
            vec!["a".to_string()]
        );
        let curve: Vec<_> = (0..10).map(|i| pt(&i.to_string(), &[i as f64, 10.0 - i as f64])).collect();
        assert_eq!(pareto_front(&curve).unwrap().len(), 10);
    }

    #[test]
    fn infeasible_points_never_on_front() {
        let pts = numerical_at_p3();
        assert_eq!(pareto_front(&pts).unwrap(), vec!["B", "C"]);
    }

    fn arb_vec(m: usize) -> impl Strategy<Value = Vec<f64>> {
        // coarse grid so ties and duplicates show up
        proptest::collection::vec((0i32..6).prop_map(|v| v as f64), m)
    }

    proptest! {
        #[test]
        fn antisymmetry(a in arb_vec(3), b in arb_vec(3)) {
            prop_assert!(!(dominates_slice(&a, &b) && dominates_slice(&b, &a)));
        }

        #[test]
        fn transitivity(a in arb_vec(2), b in arb_vec(2), c in arb_vec(2)) {
            if dominates_slice(&a, &b) && dominates_slice(&b, &c) {
                prop_assert!(dominates_slice(&a, &c));
            }
        }

        #[test]
        fn front_matches_definition(
            pts in proptest::collection::vec((arb_vec(2), any::<bool>()), 1..40)
        ) {
            let points: Vec<_> = pts
                .into_iter()
                .enumerate()
                .map(|(i, (f, feas))| ObjectivePoint::new(i.to_string(), f, feas))
                .collect();
            let front = pareto_front_indices(&points).unwrap();
            for (i, s) in points.iter().enumerate() {
                let dominated = points.iter().any(|t| t.feasible && dominates_slice(&t.f, &s.f));
                prop_assert_eq!(front.contains(&i), s.feasible && !dominated);
            }
        }
    }
}
