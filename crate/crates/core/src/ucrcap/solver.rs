//! Practical solver: envelope of deterministic maps, refined by a
//! random-restart local search over stochastic matrices.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::envelope::{evaluate, upper_hull, Candidate};
use super::objective::{check_u_card, AuxiliaryChannel, Evaluator, UcrPoint};
use super::{Method, UcrSolution, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::probspace::{conditional_entropy_x_given_y, ConditionalPmf, JointPmf};
use crate::rng::{derive_seed, stream_rng};

/// Deterministic maps are enumerated only up to this many.
const MAX_DETERMINISTIC: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub restarts: usize,
    pub stages: usize,
    pub proposals_per_stage: usize,
    pub step_start: f64,
    pub step_end: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            restarts: 48,
            stages: 30,
            proposals_per_stage: 40,
            step_start: 0.1,
            step_end: 1e-3,
            seed: 0x5eed,
        }
    }
}

/// [`ucr_capacity_solve_with`] under default options.
pub fn ucr_capacity_solve(source: &JointPmf, c: f64, u_card: usize) -> Result<UcrSolution> {
    ucr_capacity_solve_with(source, c, u_card, &SolveOptions::default())
}

/// Maximizes `I(U;X)` subject to `I(U;X) - I(U;Y) <= c`.
///
/// Returns `U = X` when `c >= H(X|Y)` up to the feasibility tolerance. Otherwise starts from the upper
/// concave envelope of all deterministic maps and adds the best feasible
/// point of each local-search restart before evaluating the envelope at
/// `c`.
pub fn ucr_capacity_solve_with(
    source: &JointPmf,
    c: f64,
    u_card: usize,
    opts: &SolveOptions,
) -> Result<UcrSolution> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Validation(format!("constraint level must be a finite C >= 0, got {c}")));
    }
    check_u_card(u_card)?;
    let nx = source.nx();
    let eval = Evaluator::new(source);
    let hxy = conditional_entropy_x_given_y(source);
    if c >= hxy - FEASIBILITY_TOL {
        let aux = AuxiliaryChannel::identity(nx);
        let point = UcrPoint {
            rate: eval.hx(),
            gap: hxy,
        };
        return Ok(UcrSolution::pure(aux, point, c, Method::Envelope));
    }

    let mut matrices: Vec<Vec<f64>> = Vec::new();
    let mut points: Vec<Candidate<usize>> = Vec::new();
    let mut push = |m: Vec<f64>, p: UcrPoint| {
        points.push(Candidate {
            gap: p.gap,
            rate: p.rate,
            id: matrices.len(),
        });
        matrices.push(m);
    };
    for m in deterministic_maps(nx, u_card) {
        let p = eval.eval(&m, u_card);
        push(m, p);
    }
    let seed = derive_seed(opts.seed, "solver-restarts");
    let found: Vec<(Vec<f64>, UcrPoint)> = (0..opts.restarts as u64)
        .into_par_iter()
        .map(|r| local_search(&eval, u_card, c, opts, &mut stream_rng(seed, r)))
        .collect();
    for (m, p) in found {
        push(m, p);
    }
    let hull = upper_hull(points);
    let value = evaluate(&hull, c, FEASIBILITY_TOL)
        .ok_or_else(|| Error::Invariant("constant map missing from the candidate set".into()))?;
    Ok(UcrSolution::from_envelope(value, c, Method::Envelope, |i| {
        AuxiliaryChannel::new(ConditionalPmf::from_rows_normalized(
            nx,
            u_card,
            matrices[i].clone(),
        ))
    }))
}

fn deterministic_maps(nx: usize, k: usize) -> Vec<Vec<f64>> {
    let total = (k as u64).checked_pow(nx as u32).unwrap_or(u64::MAX);
    let one_hot = |code: &dyn Fn(usize) -> usize| {
        let mut m = vec![0.0; nx * k];
        for x in 0..nx {
            m[x * k + code(x)] = 1.0;
        }
        m
    };
    if total <= MAX_DETERMINISTIC {
        (0..total)
            .map(|i| one_hot(&|x| ((i / (k as u64).pow(x as u32)) % k as u64) as usize))
            .collect()
    } else {
        // Constant and the "clipped identity" map.
        vec![one_hot(&|_| 0), one_hot(&|x| x.min(k - 1))]
    }
}

fn random_matrix(nx: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut m: Vec<f64> = (0..nx * k).map(|_| Exp1.sample(rng)).collect();
    for row in m.chunks_mut(k) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
    m
}

/// Moves `m` toward the constant matrix with rows `P_U` until the gap is at
/// most `c`. The gap is convex in the matrix and zero at the constant end,
/// so the feasible part of the segment is an interval ending there.
fn retract(eval: &Evaluator, m: &mut [f64], k: usize, c: f64) -> UcrPoint {
    let p = eval.eval(m, k);
    if p.gap <= c {
        return p;
    }
    let mut pu = vec![0.0; k];
    for (x, &px) in eval.px().iter().enumerate() {
        for u in 0..k {
            pu[u] += px * m[x * k + u];
        }
    }
    let orig = m.to_vec();
    let blend = |t: f64, out: &mut [f64]| {
        for (i, v) in out.iter_mut().enumerate() {
            *v = (1.0 - t) * orig[i] + t * pu[i % k];
        }
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        blend(mid, m);
        if eval.eval(m, k).gap <= c {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    blend(hi, m);
    eval.eval(m, k)
}

fn local_search(
    eval: &Evaluator,
    k: usize,
    c: f64,
    opts: &SolveOptions,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, UcrPoint) {
    let nx = eval.nx();
    let mut cur = random_matrix(nx, k, rng);
    let mut cur_p = retract(eval, &mut cur, k, c);
    if k < 2 {
        return (cur, cur_p);
    }
    let mut trial = cur.clone();
    let stages = opts.stages.max(1);
    let ratio = if stages > 1 {
        (opts.step_end / opts.step_start).powf(1.0 / (stages - 1) as f64)
    } else {
        1.0
    };
    let mut step = opts.step_start;
    for _ in 0..stages {
        for _ in 0..opts.proposals_per_stage {
            trial.copy_from_slice(&cur);
            let x = rng.gen_range(0..nx);
            let from = rng.gen_range(0..k);
            let mut to = rng.gen_range(0..k - 1);
            if to >= from {
                to += 1;
            }
            let delta = (step * rng.gen::<f64>()).min(trial[x * k + from]);
            if delta <= 0.0 {
                continue;
            }
            trial[x * k + from] -= delta;
            trial[x * k + to] += delta;
            let p = retract(eval, &mut trial, k, c);
            if p.gap <= c && p.rate > cur_p.rate {
                std::mem::swap(&mut cur, &mut trial);
                cur_p = p;
            }
        }
        step *= ratio;
    }
    (cur, cur_p)
}
