use rand::Rng;
use serde::{Deserialize, Serialize};
use ucr_core::converselab::{
    beta_for_mu, derive_params, interval_lemma, set_bound_checks, telescoping_identity_check,
    variance_bound_check, ConverseParams, KeyPreconditions, TelescopingInstance, TELESCOPING_TOL,
};
use ucr_core::probspace::{JointPmf, Pmf};
use ucr_core::protocol::{exact_analyze, KIndex, KYJoint, ProtocolConfig};
use ucr_core::rng::{derive_seed, stream_rng};
use ucr_core::ucrcap::AuxiliaryChannel;

use super::CommandResult;
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmasConfig {
    /// Random parameter draws for the interval lemma.
    pub instances: usize,
    /// Random joint laws for the telescoping identity.
    pub telescoping_instances: usize,
    pub seed: u64,
    /// Parameters for the variance and set checks.
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl Status {
    fn of(verdict: Option<bool>) -> Self {
        match verdict {
            Some(true) => Status::Pass,
            Some(false) => Status::Fail,
            None => Status::NotApplicable,
        }
    }
}

#[derive(Serialize)]
struct IntervalSuite {
    draws: usize,
    passed: usize,
    pass_rate: f64,
    /// Smallest `(1 - sqrt(alpha)) - 4 mu / gamma^2` seen.
    min_margin: f64,
    boundary_probe_holds: bool,
    status: Status,
}

#[derive(Serialize)]
struct TelescopingSuite {
    instances: usize,
    block_lengths: Vec<usize>,
    max_gap: f64,
    tolerance: f64,
    status: Status,
}

#[derive(Serialize)]
struct VarianceEntry {
    case: &'static str,
    n: usize,
    lhs: f64,
    rhs: f64,
    margin: f64,
    preconditions: KeyPreconditions,
    status: Status,
}

#[derive(Serialize)]
struct SetEntry {
    case: &'static str,
    n: usize,
    p_in_l: f64,
    bound_l: f64,
    p_in_d: f64,
    bound_d: f64,
    finite_n_bound_d: f64,
    preconditions: KeyPreconditions,
    status_l: Status,
    status_d: Status,
}

#[derive(Serialize)]
struct Summary {
    params: ConverseParams,
    interval: IntervalSuite,
    telescoping: TelescopingSuite,
    variance: Vec<VarianceEntry>,
    set_bounds: Vec<SetEntry>,
}

fn uniform_independent_joint(keys: usize, ys: usize) -> KYJoint {
    KYJoint {
        y_count: ys,
        k_values: (1..=keys as u64).map(|j| KIndex::Word { i: 1, j }).collect(),
        cells: (0..keys)
            .flat_map(|k| (0..ys).map(move |y| (k, y, 1.0 / (keys * ys) as f64)))
            .collect(),
    }
}

impl LemmasConfig {
    fn interval_suite(&self) -> CliResult<IntervalSuite> {
        let mut rng = stream_rng(derive_seed(self.seed, "lemmas-interval"), 0);
        let mut passed = 0;
        let mut min_margin = f64::INFINITY;
        let mut drawn = 0;
        while drawn < self.instances {
            let alpha = rng.gen_range(1e-6..0.5);
            let c = rng.gen_range(0.0..4.0);
            let beta = rng.gen_range(1e-9..0.2);
            let p = derive_params(alpha, beta, c)?;
            if !p.is_valid() {
                continue;
            }
            drawn += 1;
            let chk = interval_lemma(&p);
            if chk.holds {
                passed += 1;
            }
            min_margin = min_margin.min(chk.upper - chk.ratio);
        }
        let probe = derive_params(0.3, beta_for_mu(1.0 - 1e-12, 0.0)?, 0.0)?;
        let boundary_probe_holds = interval_lemma(&probe).holds;
        let ok = passed == self.instances && boundary_probe_holds;
        Ok(IntervalSuite {
            draws: self.instances,
            passed,
            pass_rate: if self.instances == 0 { 1.0 } else { passed as f64 / self.instances as f64 },
            min_margin,
            boundary_probe_holds,
            status: if ok { Status::Pass } else { Status::Fail },
        })
    }

    fn telescoping_suite(&self) -> CliResult<TelescopingSuite> {
        let seed = derive_seed(self.seed, "lemmas-telescoping");
        let mut max_gap: f64 = 0.0;
        let mut lengths = Vec::new();
        for k in 0..self.telescoping_instances {
            let mut rng = stream_rng(seed, k as u64);
            let n = 2 + k % 2;
            let inst = TelescopingInstance::random(n, 2, 2, 2, &mut rng)?;
            max_gap = max_gap.max(telescoping_identity_check(&inst)?.gap);
            if !lengths.contains(&n) {
                lengths.push(n);
            }
        }
        Ok(TelescopingSuite {
            instances: self.telescoping_instances,
            block_lengths: lengths,
            max_gap,
            tolerance: TELESCOPING_TOL,
            status: if max_gap <= TELESCOPING_TOL { Status::Pass } else { Status::Fail },
        })
    }

    pub fn run(&self) -> CliResult<CommandResult> {
        let params = derive_params(self.alpha, self.beta, self.c)?;
        let interval = self.interval_suite()?;
        let telescoping = self.telescoping_suite()?;

        let cfg = ProtocolConfig::new(
            JointPmf::dsbs(0.1)?,
            AuxiliaryChannel::identity(2),
            8,
            0.1,
            0.0,
            0.15,
            self.seed,
        )?;
        let rep = exact_analyze(&cfg)?;
        let protocol_key = Pmf::new(rep.joint_ky.k_pmf())?;

        let mut variance = Vec::new();
        let mut push_var = |case, k: &Pmf, n| -> CliResult<()> {
            let v = variance_bound_check(k, n, &params)?;
            variance.push(VarianceEntry {
                case,
                n,
                lhs: v.lhs,
                rhs: v.rhs,
                margin: v.margin,
                preconditions: v.preconditions,
                status: Status::of(v.holds),
            });
            Ok(())
        };
        push_var("uniform-32-keys", &Pmf::uniform(32)?, 10)?;
        push_var("protocol-key-dsbs-n8", &protocol_key, 8)?;

        let mut set_bounds = Vec::new();
        let mut push_set = |case, joint: &KYJoint, n, log2_card: f64| -> CliResult<()> {
            let r = set_bound_checks(joint, n, log2_card, &params)?;
            set_bounds.push(SetEntry {
                case,
                n,
                p_in_l: r.p_in_l,
                bound_l: r.bound_l,
                p_in_d: r.p_in_d,
                bound_d: r.bound_d,
                finite_n_bound_d: r.finite_n_bound_d,
                preconditions: r.preconditions,
                status_l: Status::of(r.holds_l),
                status_d: Status::of(r.holds_d),
            });
            Ok(())
        };
        push_set("uniform-8-keys-independent", &uniform_independent_joint(8, 4), 3, 3.0)?;
        push_set("protocol-key-dsbs-n8", &rep.joint_ky, 8, rep.dims.k_card.log2)?;

        let mut failure = Vec::new();
        if interval.status != Status::Pass {
            failure.push(format!(
                "interval lemma failed on {} of {} draws",
                interval.draws - interval.passed,
                interval.draws
            ));
        }
        if telescoping.status != Status::Pass {
            failure.push(format!("telescoping gap {:e} above tolerance", telescoping.max_gap));
        }
        let mut r = CommandResult::new(&Summary {
            params,
            interval,
            telescoping,
            variance,
            set_bounds,
        });
        r.invariant_failure = (!failure.is_empty()).then(|| failure.join("; "));
        Ok(r)
    }
}
