//! Finite-alphabet probability: distributions, information measures,
//! sampling, type classes and typicality tests.

pub mod info;
pub mod io;
pub mod pmf;
pub mod sampling;
pub mod typicality;

pub use info::{
    binary_entropy, channel_mutual_information, compose_aux, conditional_entropy_x_given_y,
    entropy, entropy_of, mutual_information, AXIS_U, AXIS_X, AXIS_Y,
};
pub use io::{ConditionalPmfDoc, JointPmfDoc, PmfDoc};
pub use pmf::{ConditionalPmf, JointPmf, MultiPmf, Pmf};
pub use sampling::{quantized_counts, sample_iid, sample_type_class, Categorical};
pub use typicality::{is_jointly_typical, TypicalityParams};

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn pmf_strategy(k: usize) -> impl Strategy<Value = Pmf> {
        proptest::collection::vec(0.0f64..1.0, k).prop_filter_map("zero mass", |w| {
            Pmf::from_weights(w).ok()
        })
    }

    fn joint_strategy(nx: usize, ny: usize) -> impl Strategy<Value = JointPmf> {
        proptest::collection::vec(0.0f64..1.0, nx * ny).prop_filter_map("zero mass", move |w| {
            let t: f64 = w.iter().sum();
            if t <= 0.0 {
                return None;
            }
            JointPmf::new(nx, ny, w.iter().map(|v| v / t).collect()).ok()
        })
    }

    fn conditional_strategy(ni: usize, no: usize) -> impl Strategy<Value = ConditionalPmf> {
        proptest::collection::vec(0.001f64..1.0, ni * no)
            .prop_map(move |w| ConditionalPmf::from_rows_normalized(ni, no, w))
    }

    proptest! {
        #[test]
        fn entropy_range(p in (1usize..6).prop_flat_map(pmf_strategy)) {
            let h = entropy(&p);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (p.support_size() as f64).log2() + 1e-12);
        }

        #[test]
        fn mutual_information_range(j in joint_strategy(3, 4)) {
            let i = mutual_information(&j);
            prop_assert!(i >= 0.0);
            let bound = entropy(&j.marginal_x()).min(entropy(&j.marginal_y()));
            prop_assert!(i <= bound + 1e-9);
        }

        #[test]
        fn composed_triple_is_markov(j in joint_strategy(3, 2), aux in conditional_strategy(3, 4)) {
            let t = compose_aux(&j, &aux).unwrap();
            let cmi = t.conditional_mutual_information(&[AXIS_U], &[AXIS_Y], &[AXIS_X]).unwrap();
            prop_assert!(cmi.abs() < 1e-10);
        }

        #[test]
        fn typicality_monotone_in_tolerance(seed in 0u64..500, eps in 0.01f64..0.5, extra in 0.0f64..0.4) {
            let j = JointPmf::dsbs(0.2).unwrap();
            let (x, y) = sample_iid(&j, 200, seed).unwrap();
            let r = j.to_multi();
            let lo = TypicalityParams::new(eps).unwrap();
            let hi = TypicalityParams::new((eps + extra).min(0.99)).unwrap();
            if is_jointly_typical(&[&x, &y], &r, &lo).unwrap() {
                prop_assert!(is_jointly_typical(&[&x, &y], &r, &hi).unwrap());
            }
        }

        #[test]
        fn type_class_sampling_deterministic(seed in 0u64..1000, n in 3usize..40) {
            let p = Pmf::new(vec![0.2, 0.5, 0.3]).unwrap();
            let a = sample_type_class(&p, n, seed).unwrap();
            let b = sample_type_class(&p, n, seed).unwrap();
            prop_assert_eq!(&a, &b);
            let counts = quantized_counts(&p, n).unwrap();
            for (u, &c) in counts.iter().enumerate() {
                prop_assert_eq!(a.iter().filter(|&&s| s == u).count(), c);
            }
        }
    }
}
