//! Probability mass functions on finite alphabets.
//!
//! Symbols are plain `usize` indices into an alphabet; labels only exist in
//! the JSON documents (see [`super::io`]).

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a distribution.
pub const SUM_TOL: f64 = 1e-12;

fn check_entries(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Validation(format!("{what}: empty alphabet")));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::Validation(format!(
                "{what}: entry {i} = {p} is not a nonnegative finite number"
            )));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::Validation(format!(
            "{what}: entries sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Distribution over `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_entries(&probs, "pmf")?;
        Ok(Pmf { probs })
    }

    /// Normalizes nonnegative weights. Used for distributions computed
    /// internally, where the mass may drift by a few ulps.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || total <= 0.0 {
            return Err(Error::Validation(
                "weights must be nonnegative with positive total".into(),
            ));
        }
        Ok(Pmf {
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Validation("uniform pmf over empty alphabet".into()));
        }
        Ok(Pmf {
            probs: vec![1.0 / size as f64; size],
        })
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::Dimension(format!(
                "point mass at {at} outside alphabet of size {size}"
            )));
        }
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Ok(Pmf { probs })
    }

    /// Two-point distribution `{1 - p, p}`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Pmf::new(vec![1.0 - p, p])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }
}

/// Joint distribution of a pair `(X, Y)`, stored row-major with `x` as the
/// row index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    nx: usize,
    ny: usize,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(nx: usize, ny: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != nx * ny {
            return Err(Error::Dimension(format!(
                "joint pmf with {} entries does not fit a {nx}x{ny} table",
                probs.len()
            )));
        }
        check_entries(&probs, "joint pmf")?;
        Ok(JointPmf { nx, ny, probs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ny) {
            return Err(Error::Dimension("ragged joint pmf rows".into()));
        }
        JointPmf::new(nx, ny, rows.concat())
    }

    /// `P(x, y) = p(x) q(y)`.
    pub fn product(p: &Pmf, q: &Pmf) -> Self {
        let probs = p
            .probs()
            .iter()
            .flat_map(|&a| q.probs().iter().map(move |&b| a * b))
            .collect();
        JointPmf {
            nx: p.len(),
            ny: q.len(),
            probs,
        }
    }

    /// `P(x, y) = p(x) W(y | x)`.
    pub fn from_input_and_channel(input: &Pmf, channel: &ConditionalPmf) -> Result<Self> {
        if input.len() != channel.n_in() {
            return Err(Error::Dimension(format!(
                "input alphabet {} does not match channel input alphabet {}",
                input.len(),
                channel.n_in()
            )));
        }
        let probs = (0..channel.n_in())
            .flat_map(|x| channel.row(x).iter().map(move |&w| input.probs()[x] * w))
            .collect();
        Ok(JointPmf {
            nx: channel.n_in(),
            ny: channel.n_out(),
            probs,
        })
    }

    /// Doubly symmetric binary source: uniform `X`, `Y` equal to `X` flipped
    /// with probability `p`.
    pub fn dsbs(p: f64) -> Result<Self> {
        JointPmf::new(
            2,
            2,
            vec![(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0],
        )
    }

    /// `X = Y` with marginal `p`.
    pub fn diagonal(p: &Pmf) -> Self {
        let k = p.len();
        let mut probs = vec![0.0; k * k];
        for (i, &pi) in p.probs().iter().enumerate() {
            probs[i * k + i] = pi;
        }
        JointPmf {
            nx: k,
            ny: k,
            probs,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.ny + y]
    }

    pub fn marginal_x(&self) -> Pmf {
        let probs = self
            .probs
            .chunks(self.ny)
            .map(|row| row.iter().sum())
            .collect();
        Pmf { probs }
    }

    pub fn marginal_y(&self) -> Pmf {
        let mut probs = vec![0.0; self.ny];
        for row in self.probs.chunks(self.ny) {
            for (acc, &p) in probs.iter_mut().zip(row) {
                *acc += p;
            }
        }
        Pmf { probs }
    }

    /// View as a two-axis [`MultiPmf`] with axes `[X, Y]`.
    pub fn to_multi(&self) -> MultiPmf {
        MultiPmf {
            dims: vec![self.nx, self.ny],
            probs: self.probs.clone(),
        }
    }
}

/// Stochastic matrix `W(out | in)`, one row per input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPmf {
    n_in: usize,
    n_out: usize,
    probs: Vec<f64>,
}

impl ConditionalPmf {
    pub fn new(n_in: usize, n_out: usize, probs: Vec<f64>) -> Result<Self> {
        if n_in == 0 || n_out == 0 || probs.len() != n_in * n_out {
            return Err(Error::Dimension(format!(
                "conditional pmf with {} entries does not fit {n_in} rows of {n_out}",
                probs.len()
            )));
        }
        for (i, row) in probs.chunks(n_out).enumerate() {
            check_entries(row, &format!("conditional pmf row {i}"))?;
        }
        Ok(ConditionalPmf { n_in, n_out, probs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_in = rows.len();
        let n_out = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_out) {
            return Err(Error::Dimension("ragged conditional pmf rows".into()));
        }
        ConditionalPmf::new(n_in, n_out, rows.concat())
    }

    /// Rows renormalized individually; for matrices produced by numerical
    /// search.
    pub(crate) fn from_rows_normalized(n_in: usize, n_out: usize, mut probs: Vec<f64>) -> Self {
        for row in probs.chunks_mut(n_out) {
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
        }
        ConditionalPmf { n_in, n_out, probs }
    }

    pub fn identity(k: usize) -> Self {
        let mut probs = vec![0.0; k * k];
        for i in 0..k {
            probs[i * k + i] = 1.0;
        }
        ConditionalPmf {
            n_in: k,
            n_out: k,
            probs,
        }
    }

    /// Every row equal to `row`: the output is independent of the input.
    pub fn constant(n_in: usize, row: &Pmf) -> Self {
        ConditionalPmf {
            n_in,
            n_out: row.len(),
            probs: row.probs().repeat(n_in),
        }
    }

    /// Deterministic map `in -> map[in]` into an alphabet of size `n_out`.
    pub fn deterministic(map: &[usize], n_out: usize) -> Result<Self> {
        let mut probs = vec![0.0; map.len() * n_out];
        for (x, &u) in map.iter().enumerate() {
            if u >= n_out {
                return Err(Error::Dimension(format!(
                    "map sends {x} to {u}, outside output alphabet {n_out}"
                )));
            }
            probs[x * n_out + u] = 1.0;
        }
        ConditionalPmf::new(map.len(), n_out, probs)
    }

    pub fn bsc(p: f64) -> Result<Self> {
        ConditionalPmf::new(2, 2, vec![1.0 - p, p, p, 1.0 - p])
    }

    /// Binary erasure channel with outputs `{0, 1, erasure}`.
    pub fn bec(e: f64) -> Result<Self> {
        ConditionalPmf::new(2, 3, vec![1.0 - e, 0.0, e, 0.0, 1.0 - e, e])
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.probs[input * self.n_out..(input + 1) * self.n_out]
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.probs[input * self.n_out + output]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Output law obtained by feeding `input` through the channel.
    pub fn output_distribution(&self, input: &Pmf) -> Result<Pmf> {
        let joint = JointPmf::from_input_and_channel(input, self)?;
        Ok(joint.marginal_y())
    }

    /// Matrix product `self` followed by `next`.
    pub fn cascade(&self, next: &ConditionalPmf) -> Result<ConditionalPmf> {
        if self.n_out != next.n_in {
            return Err(Error::Dimension("cascade alphabets do not match".into()));
        }
        let mut probs = vec![0.0; self.n_in * next.n_out];
        for a in 0..self.n_in {
            for b in 0..self.n_out {
                let w = self.get(a, b);
                for c in 0..next.n_out {
                    probs[a * next.n_out + c] += w * next.get(b, c);
                }
            }
        }
        Ok(ConditionalPmf::from_rows_normalized(self.n_in, next.n_out, probs))
    }
}

/// Joint distribution over several finite axes, row-major in axis order.
///
/// Used wherever more than two variables are involved: the `(U, X, Y)`
/// triple of an auxiliary construction and the converse identities.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPmf {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl MultiPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let cells: usize = dims.iter().product();
        if dims.is_empty() || cells != probs.len() {
            return Err(Error::Dimension(format!(
                "{} entries do not fit axes {dims:?}",
                probs.len()
            )));
        }
        check_entries(&probs, "multi-axis pmf")?;
        Ok(MultiPmf { dims, probs })
    }

    /// Builds from unnormalized nonnegative weights.
    pub fn from_weights(dims: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let cells: usize = dims.iter().product();
        if dims.is_empty() || cells != weights.len() {
            return Err(Error::Dimension("weights do not fit axes".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Validation("weights must be nonnegative".into()));
        }
        Ok(MultiPmf {
            dims,
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_axes(&self) -> usize {
        self.dims.len()
    }

    /// Decodes a flat cell index into per-axis coordinates.
    pub fn coords(&self, mut cell: usize, out: &mut [usize]) {
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = cell % d;
            cell /= d;
        }
    }

    /// Probability of one cell given its coordinates.
    pub fn get(&self, coords: &[usize]) -> f64 {
        let idx = coords
            .iter()
            .zip(&self.dims)
            .fold(0usize, |acc, (&c, &d)| acc * d + c);
        self.probs[idx]
    }

    /// Marginal over `axes`, in the order given. Axes may not repeat.
    pub fn marginal(&self, axes: &[usize]) -> Result<MultiPmf> {
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.dims.len() || axes[..i].contains(&a) {
                return Err(Error::Dimension(format!("bad marginal axes {axes:?}")));
            }
        }
        if axes.is_empty() {
            return Ok(MultiPmf {
                dims: vec![1],
                probs: vec![self.probs.iter().sum()],
            });
        }
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let mut probs = vec![0.0; dims.iter().product()];
        let mut coords = vec![0usize; self.dims.len()];
        for (cell, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            self.coords(cell, &mut coords);
            let idx = axes
                .iter()
                .fold(0usize, |acc, &a| acc * self.dims[a] + coords[a]);
            probs[idx] += p;
        }
        Ok(MultiPmf { dims, probs })
    }
}
