/// Crowding value of boundary points; compares above every finite distance.
pub const INFINITE_CROWDING: f64 = f64::INFINITY;

/// Crowding distance of each point of one front.
///
/// For every objective the front is sorted by that objective, both extremes
/// get [`INFINITE_CROWDING`], and each interior point accumulates the gap
/// between its neighbours divided by the objective's span. An objective with
/// zero span contributes nothing. Fronts of one or two points are all
/// boundary.
pub fn crowding_distance<T: AsRef<[f64]>>(front: &[T]) -> Vec<f64> {
    let r = front.len();
    if r <= 2 {
        return vec![INFINITE_CROWDING; r];
    }
    let m = front[0].as_ref().len();
    let mut dist = vec![0.0; r];
    let mut order: Vec<usize> = (0..r).collect();
    for obj in 0..m {
        let f = |i: usize| front[i].as_ref()[obj];
        order.sort_by(|&a, &b| f(a).total_cmp(&f(b)).then(a.cmp(&b)));
        let (lo, hi) = (f(order[0]), f(order[r - 1]));
        dist[order[0]] = INFINITE_CROWDING;
        dist[order[r - 1]] = INFINITE_CROWDING;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            dist[w[1]] += (f(w[2]) - f(w[0])).abs() / span;
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes_only() {
        assert_eq!(
            crowding_distance(&[[0.0, 2.0], [2.0, 0.0]]),
            vec![INFINITE_CROWDING; 2]
        );
        assert_eq!(crowding_distance(&[[0.0, 2.0]]), vec![INFINITE_CROWDING]);
    }

    #[test]
    fn hand_traced_middle_point() {
        let d = crowding_distance(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
        assert_eq!(d[1], 2.0);
        assert!(d[0].is_infinite() && d[2].is_infinite());
    }

    #[test]
    fn zero_span_objective_contributes_nothing() {
        let d = crowding_distance(&[[0.0, 5.0], [1.0, 5.0], [3.0, 5.0], [4.0, 5.0]]);
        // First objective: point 1 gets (3-0)/4, point 2 gets (4-1)/4.
        assert_eq!(d[1], 0.75);
        assert_eq!(d[2], 0.75);
        // Second objective has no span; its sort order still marks two extremes.
        assert_eq!(d.iter().filter(|x| x.is_infinite()).count(), 2);
    }

    #[test]
    fn infinity_outranks_finite() {
        assert!(INFINITE_CROWDING > f64::MAX);
    }
}
