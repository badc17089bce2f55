use proptest::prelude::*;
use xsrisk_core::bounds::{sweep, Method, Model, SubGaussProfile, SweepOptions};
use xsrisk_core::discrete::{bound_terms_discrete, chain_joint, excess_risk_01, ChannelMatrix, MarkovChainSpec};
use xsrisk_core::divergence::{
    binary_entropy, js_alpha, kl, renyi, sibson_mi, sibson_mi_routes, AlphaOrder, JointPmf, Pmf,
};

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    // occasional exact zeros exercise the support rules
    prop::collection::vec(prop_oneof![1 => Just(0.0), 6 => 0.01f64..1.0], n)
        .prop_filter("needs mass", |w| w.iter().any(|&x| x > 0.0))
}

fn positive(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n)
}

fn pmf_pair() -> impl Strategy<Value = (Pmf, Pmf)> {
    (2usize..7).prop_flat_map(|n| (weights(n), positive(n))).prop_map(|(a, b)| {
        (Pmf::renormalize(a).unwrap(), Pmf::renormalize(b).unwrap())
    })
}

fn joint() -> impl Strategy<Value = JointPmf> {
    (2usize..6, 2usize..6).prop_flat_map(|(r, c)| (Just(r), Just(c), weights(r * c))).prop_map(|(r, c, w)| {
        JointPmf::renormalize(r, c, w).unwrap()
    })
}

fn channel(r: usize, c: usize) -> impl Strategy<Value = ChannelMatrix> {
    prop::collection::vec(weights(c), r).prop_map(|rows| {
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|w| {
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            })
            .collect();
        ChannelMatrix::from_rows(&rows).unwrap()
    })
}

fn chain() -> impl Strategy<Value = MarkovChainSpec> {
    (2usize..5, 2usize..5, 2usize..5)
        .prop_flat_map(|(qy, qx, qz)| (positive(qy), channel(qy, qx), channel(qx, qz)))
        .prop_map(|(p, w1, w2)| MarkovChainSpec::new(Pmf::renormalize(p).unwrap(), w1, w2).unwrap())
}

fn unit(a: f64) -> AlphaOrder {
    AlphaOrder::unit(a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn renyi_nondecreasing_in_order((p, q) in pmf_pair(), a in 0.05f64..3.0, da in 0.01f64..1.0) {
        let lo = renyi(&p, &q, AlphaOrder::new(a).unwrap()).unwrap();
        let hi = renyi(&p, &q, AlphaOrder::new(a + da).unwrap()).unwrap();
        prop_assert!(lo >= 0.0);
        prop_assert!(hi >= lo - 1e-12 * (1.0 + lo.abs()), "{lo} > {hi}");
    }

    #[test]
    fn renyi_tends_to_kl((p, q) in pmf_pair()) {
        let k = kl(&p, &q).unwrap();
        let r = renyi(&p, &q, unit(1.0 - 1e-6)).unwrap();
        prop_assert!((r - k).abs() <= 1e-4 * (1.0 + k), "{r} vs {k}");
    }

    #[test]
    fn js_skew_symmetric_and_bounded((p, q) in pmf_pair(), a in 0.001f64..0.999) {
        let f = js_alpha(&p, &q, unit(a)).unwrap();
        let b = js_alpha(&q, &p, unit(1.0 - a)).unwrap();
        prop_assert!((f - b).abs() <= 1e-12);
        prop_assert!(f >= 0.0 && f <= binary_entropy(a) + 1e-12);
    }

    #[test]
    fn self_divergences_vanish((p, _q) in pmf_pair(), a in 0.01f64..0.99) {
        prop_assert_eq!(renyi(&p, &p, unit(a)).unwrap(), 0.0);
        prop_assert_eq!(kl(&p, &p).unwrap(), 0.0);
        prop_assert!(js_alpha(&p, &p, unit(a)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn sibson_between_zero_and_product_renyi(j in joint(), a in 0.05f64..0.95) {
        let (closed, via) = sibson_mi_routes(&j, unit(a)).unwrap();
        prop_assert!((closed - via).abs() <= 1e-10);
        let p = Pmf::new(j.flat().to_vec()).unwrap();
        let q = Pmf::new(j.marginal_product().flat().to_vec()).unwrap();
        let upper = renyi(&p, &q, unit(a)).unwrap();
        prop_assert!(closed >= -1e-12 && closed <= upper + 1e-10, "{closed} vs {upper}");
    }

    #[test]
    fn sibson_nondecreasing_in_order(j in joint(), a in 0.05f64..0.9, da in 0.01f64..0.09) {
        let lo = sibson_mi(&j, unit(a)).unwrap();
        let hi = sibson_mi(&j, unit(a + da)).unwrap();
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn bound_terms_permutation_invariant(spec in chain(), a in 0.05f64..0.95, seed in any::<u64>()) {
        let t = chain_joint(&spec).unwrap();
        let (qy, qx, qz) = t.shape();
        let rot = |n: usize, k: u64| -> Vec<usize> { (0..n).map(|i| (i + k as usize) % n).collect() };
        let p = t.permuted(&rot(qy, seed), &rot(qx, seed >> 8), &rot(qz, seed >> 16)).unwrap();
        let x = bound_terms_discrete(&t, unit(a)).unwrap();
        let y = bound_terms_discrete(&p, unit(a)).unwrap();
        for (u, v) in [(x.renyi, y.renyi), (x.js, y.js), (x.sibson, y.sibson), (x.mi_gap, y.mi_gap)] {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()), "{u} vs {v}");
        }
        prop_assert!((excess_risk_01(&t).unwrap() - excess_risk_01(&p).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn chain_terms_nonnegative(spec in chain(), a in 0.05f64..0.95) {
        let t = chain_joint(&spec).unwrap();
        let d = bound_terms_discrete(&t, unit(a)).unwrap();
        prop_assert!(d.renyi >= 0.0 && d.js >= 0.0 && d.sibson >= 0.0 && d.mi_gap >= 0.0);
        prop_assert!(d.js <= binary_entropy(a) + 1e-12);
        prop_assert!(excess_risk_01(&t).unwrap() >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn every_bound_dominates_exact_excess(spec in chain()) {
        let t = chain_joint(&spec).unwrap();
        let excess = excess_risk_01(&t).unwrap();
        let grid: Vec<f64> = (1..20).map(|k| k as f64 * 0.05).collect();
        let c = sweep(&Model::Discrete(spec), &Method::ALL, &grid, &SubGaussProfile::bounded(1.0).unwrap(),
            &SweepOptions::default()).unwrap();
        for (m, vals) in &c.curves {
            for (al, v) in grid.iter().zip(vals) {
                prop_assert!(*v >= excess - 1e-12, "{m} at {al}: {v} < {excess}");
            }
        }
        prop_assert!(c.mi >= excess - 1e-12);
        prop_assert!(c.lautum >= excess - 1e-12);
    }

    #[test]
    fn sweep_is_deterministic(spec in chain()) {
        let grid = [0.1, 0.5, 0.9];
        let prof = SubGaussProfile::bounded(1.0).unwrap();
        let m = Model::Discrete(spec);
        let a = sweep(&m, &Method::ALL, &grid, &prof, &SweepOptions::default()).unwrap();
        let b = sweep(&m, &Method::ALL, &grid, &prof, &SweepOptions::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}
