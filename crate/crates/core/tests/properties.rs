//! Property tests over random spaces, operators and seeds. The search-based
//! invariants are costlier and run in the acceptance target instead.

mod common;

use proptest::prelude::*;

macro_rules! properties {
    ($($name:ident),* $(,)?) => {
        proptest! {
            #![proptest_config(ProptestConfig {
                cases: 100,
                failure_persistence: None,
                ..ProptestConfig::default()
            })]
            $(
                #[test]
                fn $name(seed in any::<u64>()) {
                    if let Err(msg) = common::$name(seed) {
                        prop_assert!(false, "seed {}: {}", seed, msg);
                    }
                }
            )*
        }
    };
}

properties!(
    norm_axioms,
    absoluteness,
    l1_linf_sandwich,
    duality_pair_contract,
    radius_below_norm,
    radius_homogeneity,
    closed_vs_sampled,
    adjoint_radius,
    radius_invariant_under_lie,
    block_diagonal_lie,
    hilbert_lie_dimension,
    lie_reproducible,
    quotient_sandwich,
    coset_invariance,
    lifting_equalities,
    suite_deterministic,
    cli_outputs_are_versioned,
);
