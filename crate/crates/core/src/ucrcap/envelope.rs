//! Upper concave envelope of `(gap, rate)` points, i.e. the best rate
//! reachable by time-sharing between two achievers.

/// A candidate achiever as a point in the `(gap, rate)` plane. `id` is an
/// opaque handle the caller uses to reconstruct the auxiliary channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate<I> {
    pub gap: f64,
    pub rate: f64,
    pub id: I,
}

/// Result of evaluating an envelope at a constraint level: either a single
/// point or a mixture `weight * left + (1 - weight) * right`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum EnvelopeValue<I> {
    Pure(Candidate<I>),
    Mixed {
        left: Candidate<I>,
        right: Candidate<I>,
        weight: f64,
    },
}

impl<I: Copy> EnvelopeValue<I> {
    pub(crate) fn rate(&self) -> f64 {
        match *self {
            EnvelopeValue::Pure(c) => c.rate,
            EnvelopeValue::Mixed { left, right, weight } => {
                weight * left.rate + (1.0 - weight) * right.rate
            }
        }
    }

    pub(crate) fn gap(&self) -> f64 {
        match *self {
            EnvelopeValue::Pure(c) => c.gap,
            EnvelopeValue::Mixed { left, right, weight } => {
                weight * left.gap + (1.0 - weight) * right.gap
            }
        }
    }
}

fn cross<I>(o: &Candidate<I>, a: &Candidate<I>, b: &Candidate<I>) -> f64 {
    (a.gap - o.gap) * (b.rate - o.rate) - (a.rate - o.rate) * (b.gap - o.gap)
}

/// Vertices of the upper hull, ordered by increasing gap. Collinear and
/// dominated points are dropped; among equal gaps the highest rate wins.
pub(crate) fn upper_hull<I: Copy>(mut pts: Vec<Candidate<I>>) -> Vec<Candidate<I>> {
    pts.retain(|p| p.gap.is_finite() && p.rate.is_finite());
    pts.sort_by(|a, b| a.gap.total_cmp(&b.gap).then(b.rate.total_cmp(&a.rate)));
    pts.dedup_by(|b, a| a.gap == b.gap);
    let mut hull: Vec<Candidate<I>> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Best rate with average gap at most `c`, over all pure points and
/// pairwise mixtures of the hull vertices. `None` if no point has gap
/// `<= c + feas_tol`.
pub(crate) fn evaluate<I: Copy>(
    hull: &[Candidate<I>],
    c: f64,
    feas_tol: f64,
) -> Option<EnvelopeValue<I>> {
    // Best pure point under the (tolerant) constraint.
    let pure = hull
        .iter()
        .filter(|p| p.gap <= c + feas_tol)
        .max_by(|a, b| a.rate.total_cmp(&b.rate))
        .copied()?;
    let mut best = EnvelopeValue::Pure(pure);
    // Segment straddling c, mixed so the average gap is exactly c.
    let k = hull.partition_point(|p| p.gap <= c);
    if k > 0 && k < hull.len() {
        let (left, right) = (hull[k - 1], hull[k]);
        let weight = (right.gap - c) / (right.gap - left.gap);
        let mixed = EnvelopeValue::Mixed { left, right, weight };
        if mixed.rate() > best.rate() {
            best = mixed;
        }
    }
    Some(best)
}
