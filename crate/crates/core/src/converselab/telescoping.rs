use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probspace::MultiPmf;

pub const MAX_BLOCK: usize = 4;
pub const MAX_ALPHABET: usize = 3;

/// Joint law of `(S, R, X_1..X_n, Y_1..Y_n)`, in that axis order. An
/// absent `R` is an axis of size one.
#[derive(Debug, Clone, PartialEq)]
pub struct TelescopingInstance {
    n: usize,
    pmf: MultiPmf,
}

impl TelescopingInstance {
    pub fn new(n: usize, pmf: MultiPmf) -> Result<Self> {
        if n == 0 || n > MAX_BLOCK {
            return Err(Error::Validation(format!("n must lie in 1..={MAX_BLOCK}, got {n}")));
        }
        if pmf.n_axes() != 2 + 2 * n {
            return Err(Error::Dimension(format!(
                "expected {} axes for n = {n}, got {}",
                2 + 2 * n,
                pmf.n_axes()
            )));
        }
        if pmf.dims().iter().any(|&d| d > MAX_ALPHABET) {
            return Err(Error::Validation(format!(
                "alphabets are limited to {MAX_ALPHABET} symbols, got {:?}",
                pmf.dims()
            )));
        }
        Ok(TelescopingInstance { n, pmf })
    }

    /// Flat Dirichlet(1) draw over all cells.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        s_card: usize,
        r_card: usize,
        xy_card: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let dims = Self::layout(n, s_card, r_card, xy_card);
        let cells: usize = dims.iter().product();
        let w: Vec<f64> = (0..cells).map(|_| Exp1.sample(rng)).collect();
        Self::new(n, MultiPmf::from_weights(dims, w)?)
    }

    /// Random instance with `S` independent of `(R, X^n, Y^n)`.
    pub fn random_independent_s<R: Rng + ?Sized>(
        n: usize,
        s_card: usize,
        r_card: usize,
        xy_card: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let dims = Self::layout(n, s_card, r_card, xy_card);
        let rest: usize = dims[1..].iter().product();
        let ps: Vec<f64> = (0..s_card).map(|_| Exp1.sample(rng)).collect();
        let pr: Vec<f64> = (0..rest).map(|_| Exp1.sample(rng)).collect();
        let w = ps.iter().flat_map(|a| pr.iter().map(move |b| a * b)).collect();
        Self::new(n, MultiPmf::from_weights(dims, w)?)
    }

    fn layout(n: usize, s_card: usize, r_card: usize, xy_card: usize) -> Vec<usize> {
        let mut dims = vec![s_card, r_card];
        dims.extend(std::iter::repeat(xy_card).take(2 * n));
        dims
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pmf(&self) -> &MultiPmf {
        &self.pmf
    }

    fn x_axis(&self, i: usize) -> usize {
        2 + i
    }

    fn y_axis(&self, i: usize) -> usize {
        2 + self.n + i
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelescopingReport {
    /// `I(S; X^n | R) - I(S; Y^n | R)`.
    pub lhs: f64,
    /// Sum over `i` of the per-coordinate differences.
    pub sum: f64,
    /// `n [I(S; X_J | V) - I(S; Y_J | V)]` from the explicit `(J, V)`.
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
}

pub const TELESCOPING_TOL: f64 = 1e-10;

pub fn telescoping_identity_check(inst: &TelescopingInstance) -> Result<TelescopingReport> {
    let n = inst.n;
    let p = &inst.pmf;
    let xs: Vec<usize> = (0..n).map(|i| inst.x_axis(i)).collect();
    let ys: Vec<usize> = (0..n).map(|i| inst.y_axis(i)).collect();
    let lhs = p.conditional_mutual_information(&[0], &xs, &[1])?
        - p.conditional_mutual_information(&[0], &ys, &[1])?;

    let mut sum = 0.0;
    for i in 0..n {
        let mut cond: Vec<usize> = xs[..i].to_vec();
        cond.extend_from_slice(&ys[i + 1..]);
        cond.push(1);
        sum += p.conditional_mutual_information(&[0], &[xs[i]], &cond)?
            - p.conditional_mutual_information(&[0], &[ys[i]], &cond)?;
    }

    let jv = with_time_sharing(inst)?;
    let rhs = n as f64
        * (jv.conditional_mutual_information(&[0], &[1], &[3])?
            - jv.conditional_mutual_information(&[0], &[2], &[3])?);
    let gap = (lhs - rhs).abs();
    Ok(TelescopingReport {
        lhs,
        sum,
        rhs,
        gap,
        holds: gap <= TELESCOPING_TOL,
    })
}

/// Joint law of `(S, X_J, Y_J, V)` with `J` uniform on `1..=n` and
/// independent, `V = (X_1..X_{J-1}, Y_{J+1}..Y_n, R, J)` flattened to one
/// axis.
fn with_time_sharing(inst: &TelescopingInstance) -> Result<MultiPmf> {
    let n = inst.n;
    let p = &inst.pmf;
    let dims = p.dims();
    let (cs, cx, cy) = (dims[0], dims[inst.x_axis(0)], dims[inst.y_axis(0)]);
    let mut v_index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut mass: Vec<(usize, usize, usize, usize, f64)> = Vec::new();
    let mut coords = vec![0usize; dims.len()];
    for (cell, &q) in p.probs().iter().enumerate() {
        if q == 0.0 {
            continue;
        }
        p.coords(cell, &mut coords);
        for j in 0..n {
            let mut v: Vec<usize> = vec![j, coords[1]];
            v.extend((0..j).map(|i| coords[inst.x_axis(i)]));
            v.extend((j + 1..n).map(|i| coords[inst.y_axis(i)]));
            let next = v_index.len();
            let vi = *v_index.entry(v).or_insert(next);
            mass.push((
                coords[0],
                coords[inst.x_axis(j)],
                coords[inst.y_axis(j)],
                vi,
                q / n as f64,
            ));
        }
    }
    let nv = v_index.len();
    let mut probs = vec![0.0; cs * cx * cy * nv];
    for (s, x, y, v, q) in mass {
        probs[((s * cx + x) * cy + y) * nv + v] += q;
    }
    MultiPmf::from_weights(vec![cs, cx, cy, nv], probs)
}
