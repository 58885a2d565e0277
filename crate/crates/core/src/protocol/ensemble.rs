//! Type counting for the random-coding ensemble.
//!
//! A word drawn uniformly from the type class `T` of counts `c` is jointly
//! typical with a fixed sequence `s` with probability
//! `|{u in T : (u, s) typical}| / |T|`, which depends on `s` only through
//! its counts. The numerator is a sum over contingency tables `N(u, a)`
//! with row sums `c`, column sums equal to the counts of `s`, and every
//! cell inside the typicality window; a table accounts for
//! `prod_a m_a! / prod_{u,a} N(u,a)!` words.

use rand::seq::SliceRandom;
use rand::Rng;

/// `ln k!` for `k <= n`.
#[derive(Debug, Clone)]
pub(crate) struct LnFactorial(Vec<f64>);

impl LnFactorial {
    pub(crate) fn new(n: usize) -> Self {
        let mut v = Vec::with_capacity(n + 1);
        v.push(0.0);
        for k in 1..=n {
            v.push(v[k - 1] + (k as f64).ln());
        }
        LnFactorial(v)
    }

    pub(crate) fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// `ln` of the multinomial `n! / prod c!`.
    pub(crate) fn ln_multinomial(&self, counts: &[usize]) -> f64 {
        let n: usize = counts.iter().sum();
        self.get(n) - counts.iter().map(|&c| self.get(c)).sum::<f64>()
    }
}

/// Typical tables compatible with the margins, each with the natural log
/// of the number of `u` sequences it represents.
#[derive(Debug, Clone)]
pub(crate) struct TableSet {
    pub cols: usize,
    pub tables: Vec<(Vec<usize>, f64)>,
    /// `ln` of the hit probability; `-inf` when no table exists.
    pub ln_prob: f64,
}

fn allowed(c: usize, p: f64, n: usize, eps: f64) -> bool {
    if p == 0.0 {
        c == 0
    } else {
        (c as f64 / n as f64 - p).abs() <= eps * p
    }
}

pub(crate) fn log_sum_exp(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Enumerates tables with row sums `rows`, column sums `cols`, under the
/// reference law `reference` (row-major, `rows.len() x cols.len()`).
pub(crate) fn typical_tables(
    rows: &[usize],
    cols: &[usize],
    reference: &[f64],
    eps: f64,
    lf: &LnFactorial,
) -> TableSet {
    let (k, m) = (rows.len(), cols.len());
    let n: usize = rows.iter().sum();
    let mut tables = Vec::new();
    if cols.iter().sum::<usize>() == n {
        let mut table = vec![0usize; k * m];
        let mut row_left = rows.to_vec();
        let mut col_left = cols.to_vec();
        fill(
            0,
            k,
            m,
            n,
            reference,
            eps,
            &mut table,
            &mut row_left,
            &mut col_left,
            &mut tables,
        );
    }
    let base: f64 = cols.iter().map(|&c| lf.get(c)).sum();
    let tables: Vec<(Vec<usize>, f64)> = tables
        .into_iter()
        .map(|t: Vec<usize>| {
            let w = base - t.iter().map(|&c| lf.get(c)).sum::<f64>();
            (t, w)
        })
        .collect();
    let ln_class = lf.ln_multinomial(rows);
    let ln_prob = log_sum_exp(tables.iter().map(|t| t.1)) - ln_class;
    TableSet {
        cols: m,
        tables,
        ln_prob,
    }
}

#[allow(clippy::too_many_arguments)]
fn fill(
    cell: usize,
    k: usize,
    m: usize,
    n: usize,
    reference: &[f64],
    eps: f64,
    table: &mut [usize],
    row_left: &mut [usize],
    col_left: &mut [usize],
    out: &mut Vec<Vec<usize>>,
) {
    if cell == k * m {
        out.push(table.to_vec());
        return;
    }
    let (u, a) = (cell / m, cell % m);
    let p = reference[cell];
    let (lo, hi) = if u == k - 1 {
        // Last row is forced by the column sums.
        (col_left[a], col_left[a])
    } else if a == m - 1 {
        (row_left[u], row_left[u])
    } else {
        (0, row_left[u].min(col_left[a]))
    };
    if lo > row_left[u] || lo > col_left[a] {
        return;
    }
    // Narrow to the typicality window before testing each value.
    let (wlo, whi) = if p == 0.0 {
        (0, 0)
    } else {
        let c = n as f64 * p;
        (
            ((c * (1.0 - eps)).floor() as usize).saturating_sub(1),
            (c * (1.0 + eps)).ceil() as usize + 1,
        )
    };
    let (lo, hi) = (lo.max(wlo), hi.min(whi));
    for v in lo..=hi {
        if !allowed(v, p, n, eps) {
            continue;
        }
        table[cell] = v;
        row_left[u] -= v;
        col_left[a] -= v;
        fill(cell + 1, k, m, n, reference, eps, table, row_left, col_left, out);
        row_left[u] += v;
        col_left[a] += v;
    }
    table[cell] = 0;
}

impl TableSet {
    /// A uniformly random typical partner of `s`, sampled by picking a
    /// table proportionally to its count and then an arrangement. The set
    /// must not be empty.
    pub(crate) fn sample_partner<R: Rng + ?Sized>(&self, s: &[usize], rng: &mut R) -> Vec<u8> {
        let top = self.tables.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = self.tables.iter().map(|t| (t.1 - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut pick = rng.gen::<f64>() * total;
        let mut idx = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if pick < *w {
                idx = i;
                break;
            }
            pick -= w;
        }
        let table = &self.tables[idx].0;
        let k = table.len() / self.cols;
        let mut out = vec![0u8; s.len()];
        for a in 0..self.cols {
            let mut symbols: Vec<u8> = (0..k)
                .flat_map(|u| std::iter::repeat(u as u8).take(table[u * self.cols + a]))
                .collect();
            symbols.shuffle(rng);
            let mut it = symbols.into_iter();
            for (o, _) in out.iter_mut().zip(s).filter(|(_, &x)| x == a) {
                *o = it.next().expect("table column matches symbol count");
            }
        }
        out
    }
}

/// `ln(-ln(1 - p))` given `ln p`, accurate for tiny `p`.
fn ln_neg_ln1m(ln_p: f64) -> f64 {
    if ln_p < -30.0 {
        ln_p
    } else if ln_p >= 0.0 {
        f64::INFINITY
    } else {
        (-(-ln_p.exp()).ln_1p()).ln()
    }
}

/// Probability that none of `count` independent trials with success
/// probability `exp(ln_p)` succeeds, for `count = exp(ln_count) >= 1`.
pub(crate) fn prob_none(ln_count: f64, ln_p: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY {
        return 1.0;
    }
    (-(ln_count + ln_neg_ln1m(ln_p)).exp()).exp()
}

/// `(P[B = 0], P[B = 1])` for `B ~ Binomial(count, exp(ln_p))`, where
/// `count` is given by its natural log and is zero when `ln_count` is
/// `-inf`.
pub(crate) fn binomial_low(ln_count: f64, ln_p: f64) -> (f64, f64) {
    if ln_count == f64::NEG_INFINITY || ln_p == f64::NEG_INFINITY {
        return (1.0, 0.0);
    }
    if ln_p >= 0.0 {
        return (0.0, if ln_count == 0.0 { 1.0 } else { 0.0 });
    }
    let p0 = prob_none(ln_count, ln_p);
    // count p (1-p)^{count-1} = count p (1-p)^count / (1-p)
    let ln1m = if ln_p < -30.0 { -ln_p.exp() } else { (-ln_p.exp()).ln_1p() };
    let p1 = if p0 > 0.0 {
        (ln_count + ln_p + p0.ln() - ln1m).exp()
    } else {
        0.0
    };
    (p0, p1.min(1.0 - p0).max(0.0))
}
