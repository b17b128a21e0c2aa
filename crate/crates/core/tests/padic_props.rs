mod common;

use std::collections::BTreeSet;

use fermat_pr_core::padic::padic_coloring;
use fermat_pr_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use common::equation;

#[test]
fn decomposition_reconstructs_every_value() {
    for p in [2u64, 3, 5, 7] {
        for n in 1..=100_000u64 {
            let d = p_adic_decompose(n, p);
            assert_eq!(d.reconstruct(p), n);
            assert_eq!(d.rho, n % p);
            assert_eq!(d.nu.is_none(), n < p);
            assert_eq!(d.nu.is_none(), d.zeta.is_none());
            if let (Some(nu), Some(zeta)) = (d.nu, d.zeta) {
                assert!(nu >= 1);
                assert_ne!(zeta % p, 0);
            }
        }
    }
}

fn params() -> impl Strategy<Value = PAdicParams> {
    (prop::sample::select(vec![2u64, 3, 5, 7]), 1u32..=4, 0u32..=2)
        .prop_map(|(p, m, d)| PAdicParams::new(p, m, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn colors_respect_the_bound(params in params(), n in 1u32..=3000) {
        let colors: BTreeSet<u32> = (1..=n as u64).map(|v| padic_color(v, &params)).collect();
        let bound = params.p as u32 * params.m * (params.p as u32).pow(params.d) + params.p as u32;
        prop_assert_eq!(params.color_bound(), bound);
        prop_assert!(colors.len() as u32 <= bound);
        prop_assert!(colors.iter().all(|&c| (1..=bound).contains(&c)));
    }

    #[test]
    fn distinct_triples_get_distinct_colors(params in params(), a in 1u64..=5000, b in 1u64..=5000) {
        let key = |n: u64| {
            let d = p_adic_decompose(n, params.p);
            let unit = params.p.pow(params.d);
            (d.rho, d.nu.map(|nu| nu % params.m), d.zeta.map(|z| z % unit))
        };
        prop_assert_eq!(key(a) == key(b), padic_color(a, &params) == padic_color(b, &params));
    }

    #[test]
    fn failure_persists_for_larger_windows(eq in equation(2..=3, 3, 2), params in params(), n in 1u32..=60) {
        if !verify_padic(&eq, &params, n).unwrap().valid {
            for larger in [n + 1, n + 7, 2 * n + 3] {
                prop_assert!(!verify_padic(&eq, &params, larger).unwrap().valid);
            }
        }
    }
}

#[test]
fn verify_padic_matches_materialized_coloring() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(6);
    let pool = ["x + y = z", "x + y = z^2", "x + y = 3z^2", "x^2 + y^2 = 3z", "x + y^2 = z^3", "x + 2y = z"];
    for _ in 0..10 {
        let eq = parse_equation(pool[rng.gen_range(0..pool.len())]).unwrap();
        let params =
            PAdicParams::new([2, 3, 5, 7][rng.gen_range(0..4)], rng.gen_range(1..=4), rng.gen_range(0..=2)).unwrap();
        let n = rng.gen_range(1..=500);
        let colors: Vec<u32> = (1..=n as u64).map(|v| padic_color(v, &params)).collect();
        let coloring = Coloring::new(params.color_bound(), colors).unwrap();
        assert_eq!(coloring, padic_coloring(&params, n));
        let constraints = build_constraints(&eq, n, &EnumOptions::new(n as u64)).unwrap();
        assert_eq!(verify_padic(&eq, &params, n).unwrap(), verify_coloring(&coloring, &constraints).unwrap());
    }
}
