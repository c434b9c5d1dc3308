/// `a` dominates `b` (minimization): no worse in every objective and strictly
/// better in at least one.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Fast non-dominated sort.
///
/// Returns the fronts as index lists; front 0 holds the non-dominated points
/// and each later front is non-dominated once the earlier fronts are
/// removed. Indices within a front are in ascending order.
pub fn nondominated_sort<T: AsRef<[f64]>>(objectives: &[T]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    if n == 0 {
        return Vec::new();
    }
    let m = objectives[0].as_ref().len();
    assert!(
        objectives.iter().all(|o| o.as_ref().len() == m),
        "objective vectors differ in length"
    );

    // dominated[p]: points p dominates; dominators[p]: how many dominate p.
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dominators = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            let (a, b) = (objectives[p].as_ref(), objectives[q].as_ref());
            if dominates(a, b) {
                dominated[p].push(q);
                dominators[q] += 1;
            } else if dominates(b, a) {
                dominated[q].push(p);
                dominators[p] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&p| dominators[p] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated[p] {
                dominators[q] -= 1;
                if dominators[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(
            nondominated_sort(&[[1.0, 1.0], [2.0, 2.0]]),
            vec![vec![0], vec![1]]
        );
        assert_eq!(
            nondominated_sort(&[[1.0, 3.0], [3.0, 1.0]]),
            vec![vec![0, 1]]
        );
        assert_eq!(
            nondominated_sort(&[[0.0, 0.0], [1.0, 1.0], [0.0, 2.0], [2.0, 0.0]]),
            vec![vec![0], vec![1, 2, 3]]
        );
        assert!(nondominated_sort::<Vec<f64>>(&[]).is_empty());
    }

    #[test]
    fn equal_points_share_a_front() {
        assert_eq!(
            nondominated_sort(&[[1.0, 1.0], [1.0, 1.0]]),
            vec![vec![0, 1]]
        );
    }

    /// Peels fronts by repeatedly taking every point no remaining point
    /// dominates.
    fn peel(objs: &[Vec<f64>]) -> Vec<Vec<usize>> {
        let mut left: Vec<usize> = (0..objs.len()).collect();
        let mut out = Vec::new();
        while !left.is_empty() {
            let front: Vec<usize> = left
                .iter()
                .copied()
                .filter(|&p| !left.iter().any(|&q| dominates(&objs[q], &objs[p])))
                .collect();
            left.retain(|p| !front.contains(p));
            out.push(front);
        }
        out
    }

    proptest! {
        #[test]
        fn agrees_with_peeling(
            objs in (1usize..4).prop_flat_map(|m| proptest::collection::vec(
                proptest::collection::vec((0i32..6).prop_map(f64::from), m), 0..40))
        ) {
            prop_assert_eq!(nondominated_sort(&objs), peel(&objs));
        }
    }
}
