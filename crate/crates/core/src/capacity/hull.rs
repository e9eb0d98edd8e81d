//! Upper concave envelopes of downward-closed rate regions.

/// Vertices, sorted by abscissa, of the upper concave envelope of the
/// downward closure of `points` in the nonnegative quadrant.
///
/// The first vertex sits on the vertical axis at the largest ordinate and the
/// last one on the horizontal axis at the largest abscissa, so the envelope is
/// concave and non-increasing.
pub fn concave_envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let finite: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|&(x, y)| (x.max(0.0), y.max(0.0)))
        .collect();
    let x_max = finite.iter().map(|p| p.0).fold(0.0, f64::max);
    let y_max = finite.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut pts = finite;
    pts.push((0.0, y_max));
    pts.push((x_max, 0.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    pts.dedup_by(|b, a| a.0 == b.0);

    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop `b` unless it lies strictly above the chord from `a` to `p`.
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Envelope height at `x`, or `None` beyond its support.
pub fn envelope_value(envelope: &[(f64, f64)], x: f64) -> Option<f64> {
    let first = envelope.first()?;
    let last = envelope.last()?;
    if x < 0.0 || x > last.0 {
        return None;
    }
    if x <= first.0 {
        return Some(first.1);
    }
    let k = envelope.partition_point(|p| p.0 < x);
    let (a, b) = (envelope[k - 1], envelope[k]);
    if b.0 == a.0 {
        return Some(a.1.max(b.1));
    }
    let t = (x - a.0) / (b.0 - a.0);
    Some(a.1 + t * (b.1 - a.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_from_endpoints() {
        let env = concave_envelope(&[(1.0, 0.0), (0.0, 0.5)]);
        assert_eq!(env, vec![(0.0, 0.5), (1.0, 0.0)]);
        assert_eq!(envelope_value(&env, 0.5), Some(0.25));
        assert_eq!(envelope_value(&env, 1.5), None);
        assert_eq!(envelope_value(&env, 0.0), Some(0.5));
    }

    #[test]
    fn interior_points_are_dropped() {
        let env = concave_envelope(&[(1.0, 0.0), (0.0, 1.0), (0.3, 0.3), (0.5, 0.8)]);
        assert_eq!(env, vec![(0.0, 1.0), (0.5, 0.8), (1.0, 0.0)]);
        // Collinear points disappear too.
        let env = concave_envelope(&[(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]);
        assert_eq!(env.len(), 2);
    }

    #[test]
    fn envelope_is_concave_and_dominates() {
        let pts: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let t = i as f64 / 49.0;
                (t, (1.0 - t * t).sqrt() * (1.0 + 0.1 * ((i * 7) % 5) as f64))
            })
            .collect();
        let env = concave_envelope(&pts);
        for &(x, y) in &pts {
            assert!(envelope_value(&env, x).unwrap() >= y - 1e-12);
        }
        for w in env.windows(3) {
            let s1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            assert!(s2 < s1 && s1 <= 0.0);
        }
    }

    #[test]
    fn empty_input_is_origin() {
        assert_eq!(concave_envelope(&[]), vec![(0.0, 0.0)]);
        assert_eq!(envelope_value(&[], 0.0), None);
    }
}
