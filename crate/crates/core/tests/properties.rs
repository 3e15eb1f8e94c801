use fockcodes::bounds::{self, ChannelParams};
use fockcodes::certify::{self, LambdaMode, Orthogonality, DEFAULT_PATTERN_CAP};
use fockcodes::classical::{self, ClassicalCode, Ensemble};
use fockcodes::fock::{self, FockCode, Partition, PartitionPolicy};
use fockcodes::simplex::{
    binomial, enumerate_simplex, l1_distance, loss_patterns, simplex_size, LossPattern, SimplexPoint, SimplexShape,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn shape_strategy(max_q: usize, max_n: u32) -> impl Strategy<Value = SimplexShape> {
    (1..=max_q, 0..=max_n).prop_map(|(q, n)| SimplexShape::new(q, n).unwrap())
}

/// Random point of S_{q,N} as an ordered composition.
fn point_in(q: usize, n: u32) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(0..=n, q.saturating_sub(1)).prop_map(move |mut cuts| {
        cuts.sort_unstable();
        let mut prev = 0;
        let mut c = Vec::with_capacity(q);
        for x in cuts {
            c.push(x - prev);
            prev = x;
        }
        c.push(n - prev);
        SimplexPoint::from_counts(c)
    })
}

fn triple(q: usize, n: u32) -> impl Strategy<Value = (SimplexPoint, SimplexPoint, SimplexPoint)> {
    (point_in(q, n), point_in(q, n), point_in(q, n))
}

/// Distinct-word code, K blocks, on a small simplex.
fn fock_strategy() -> impl Strategy<Value = FockCode> {
    (2usize..=3, 2u32..=6, any::<u64>(), 1usize..=3).prop_map(|(q, n, seed, k)| {
        let s = SimplexShape::new(q, n).unwrap();
        let mut all: Vec<SimplexPoint> = enumerate_simplex(s, 1 << 20).unwrap().collect();
        use rand::seq::SliceRandom;
        all.shuffle(&mut fockcodes::rng::stream(seed, 0));
        let len = (seed as usize % all.len()).max(k);
        all.truncate(len);
        let part = Partition::new(len, k, PartitionPolicy::Sequential).unwrap();
        fock::build_fock_code(ClassicalCode::explicit(s, all).unwrap(), part, None).unwrap()
    })
}

fn exact_p_loss(num: i64, den: i64, n: u32, t: u32) -> f64 {
    let g = BigRational::new(BigInt::from(num), BigInt::from(den));
    let one = BigRational::from_integer(BigInt::from(1));
    let mut acc = BigRational::from_integer(BigInt::from(0));
    for k in 0..=t.min(n) {
        let c = BigRational::from_integer(BigInt::from(binomial(n as u64, k as u64)));
        acc += c * num_traits::pow(g.clone(), k as usize) * num_traits::pow(&one - &g, (n - k) as usize);
    }
    let num: f64 = acc.numer().to_string().parse().unwrap();
    let den: f64 = acc.denom().to_string().parse().unwrap();
    num / den
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_is_sorted_complete_and_on_simplex(s in shape_strategy(4, 7)) {
        let pts: Vec<SimplexPoint> = enumerate_simplex(s, 1 << 20).unwrap().collect();
        prop_assert_eq!(pts.len().to_string(), simplex_size(s).to_string());
        for w in pts.windows(2) {
            prop_assert!(w[0].coords() < w[1].coords());
        }
        for p in &pts {
            prop_assert_eq!(p.total(), s.n);
            prop_assert_eq!(p.q(), s.q);
        }
    }

    #[test]
    fn distance_is_a_metric((a, b, c) in triple(4, 9)) {
        let ab = l1_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, l1_distance(&b, &a).unwrap());
        prop_assert_eq!(ab == 0, a == b);
        prop_assert!(ab <= l1_distance(&a, &c).unwrap() + l1_distance(&c, &b).unwrap());
        let pos: u32 = a.coords().iter().zip(b.coords()).map(|(x, y)| x.saturating_sub(*y)).sum();
        prop_assert_eq!(ab, pos);
    }

    #[test]
    fn loss_pattern_count_matches_kraus_count(q in 1usize..=5, t in 0u32..=5) {
        let pats = loss_patterns(q, t);
        prop_assert_eq!(pats.len().to_string(), bounds::kraus_count(q, t).unwrap().to_string());
        for w in pats.windows(2) {
            prop_assert!(w[0].weight() <= w[1].weight());
        }
    }

    #[test]
    fn p_loss_matches_exact_rational(num in 0i64..=64, n in 0u32..=40, t in 0u32..=40) {
        let gamma = num as f64 / 64.0;
        let p = bounds::p_loss(&ChannelParams::new(gamma, n, t).unwrap());
        let exact = exact_p_loss(num, 64, n, t);
        prop_assert!((p - exact).abs() <= 1e-13 * exact.max(1e-300) + 1e-300, "{} vs {}", p, exact);
    }

    #[test]
    fn p_loss_is_monotone_in_t(gamma in 0.0f64..=1.0, n in 1u32..=200) {
        let mut prev = 0.0;
        for t in 0..=n {
            let p = bounds::p_loss(&ChannelParams::new(gamma, n, t).unwrap());
            prop_assert!(p + 1e-15 >= prev);
            prop_assert!(p <= 1.0 + 1e-15);
            prev = p;
        }
        prop_assert!((prev - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn h2_symmetric_and_bounded(x in 0.0f64..=1.0) {
        let a = bounds::h2(x).unwrap();
        prop_assert!((a - bounds::h2(1.0 - x).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&a));
    }

    #[test]
    fn delta_alpha_paths_agree(alpha in 0.2f64..50.0) {
        let a = bounds::delta_alpha(alpha).unwrap();
        let b = bounds::delta_alpha_bessel(alpha).unwrap();
        prop_assert!((a - b).abs() <= 1e-8);
        prop_assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn gv_dominates_uniform_rate(delta in 0.0f64..0.5, alpha in 0.2f64..5.0) {
        // only claimed where the uniform rate is still positive
        prop_assume!(bounds::rate_u(delta, alpha).unwrap() >= 0.0);
        prop_assert!(bounds::rate_gv(delta, alpha).unwrap() + 1e-12 >= bounds::rate_u(delta, alpha).unwrap());
    }

    #[test]
    fn eps_conversion_round_trip(eps in 0.0f64..=1.0, p in 0.01f64..=1.0) {
        let ad = bounds::eps_to_ad(eps, p).unwrap();
        prop_assert!(ad + 1e-15 >= eps);
        prop_assert!(ad <= 1.0);
        let back = (1.0 - (1.0 - ad * ad) / p).max(0.0).sqrt();
        prop_assert!((back - eps).abs() <= 1e-6);
    }

    #[test]
    fn sampling_is_seed_deterministic(q in 1usize..=6, n in 0u32..=20, len in 1usize..40, seed: u64) {
        let s = SimplexShape::new(q, n).unwrap();
        for ens in [Ensemble::Uniform, Ensemble::Multinomial] {
            let f = |sd| match ens {
                Ensemble::Uniform => classical::sample_uniform(s, len, sd).unwrap(),
                _ => classical::sample_multinomial(s, len, sd).unwrap(),
            };
            let a = f(seed);
            prop_assert_eq!(&a.words, &f(seed).words);
            prop_assert!(a.words.iter().all(|w| w.total() == n && w.q() == q));
            prop_assert_eq!(a.ensemble, ens);
        }
    }

    #[test]
    fn code_json_round_trip(q in 1usize..=4, n in 0u32..=8, len in 1usize..10, seed: u64) {
        let s = SimplexShape::new(q, n).unwrap();
        let c = classical::sample_uniform(s, len, seed).unwrap();
        let text = c.to_json().unwrap();
        let back = ClassicalCode::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn greedy_meets_distance(q in 2usize..=3, n in 1u32..=7, t in 1u32..=4, seed: u64) {
        let g = classical::greedy_gv(SimplexShape::new(q, n).unwrap(), t, None, seed, 1 << 20).unwrap();
        if g.code.len() >= 2 {
            prop_assert!(classical::min_distance(&g.code).unwrap() >= t);
        }
        prop_assert!(!g.code.is_empty());
    }

    #[test]
    fn partition_blocks_are_disjoint_and_equal(len in 1usize..60, k in 1usize..8, seed: u64) {
        prop_assume!(k <= len);
        let p = Partition::new(len, k, PartitionPolicy::Shuffled(seed)).unwrap();
        let mut seen = vec![false; len];
        for b in p.blocks() {
            prop_assert_eq!(b.len(), len / k);
            for &i in b {
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
        for &i in p.discarded() {
            prop_assert!(!seen[i]);
            seen[i] = true;
        }
        prop_assert!(seen.iter().all(|&x| x));
        prop_assert_eq!(p.discarded().len(), len % k);
    }

    #[test]
    fn fock_json_round_trip(fc in fock_strategy()) {
        let text = fc.to_json().unwrap();
        let back = FockCode::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn y_value_is_permutation_covariant(n in point_in(4, 9), r in point_in(4, 3), gamma in 0.01f64..0.99, seed: u64) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..4).collect();
        perm.shuffle(&mut fockcodes::rng::stream(seed, 0));
        let r = LossPattern::new(r.into_coords());
        let mut pc = vec![0; 4];
        for (i, &v) in n.coords().iter().enumerate() {
            pc[perm[i]] = v;
        }
        let pn = SimplexPoint::from_counts(pc);
        let a = certify::y_value(&n, &r, gamma, 0.7);
        let b = certify::y_value(&pn, &r.permuted(&perm), gamma, 0.7);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lambda_sums_to_one_over_all_weights(fc in fock_strategy(), gamma in 0.01f64..0.99) {
        let n = fc.shape().n;
        for mode in [LambdaMode::AnalyticUniform, LambdaMode::AnalyticMultinomial, LambdaMode::EmpiricalCodeMean] {
            let d = certify::deformation_bound(&fc, n, gamma, mode, DEFAULT_PATTERN_CAP).unwrap();
            prop_assert!((d.lambda_sum - 1.0).abs() <= 1e-9);
            prop_assert!(d.eps_max >= 0.0);
            prop_assert!(d.eps_certified >= 0.0);
        }
    }

    #[test]
    fn orthogonality_verdict_matches_distance(fc in fock_strategy(), t in 0u32..=3) {
        prop_assume!(t <= fc.shape().n);
        let retained: Vec<&SimplexPoint> = fc
            .partition
            .blocks()
            .iter()
            .flatten()
            .map(|&i| &fc.classical.words[i])
            .collect();
        let mut close = false;
        for i in 0..retained.len() {
            for j in i + 1..retained.len() {
                close |= l1_distance(retained[i], retained[j]).unwrap() <= t;
            }
        }
        let v = certify::orthogonality_check(&fc, t).unwrap();
        prop_assert_eq!(v.holds(), !close);
        if let Orthogonality::Failed { witness } = v {
            // both words reach the same point after their losses
            let a: Vec<u32> = witness.n_a.coords().iter().zip(witness.r_a.r()).map(|(x, r)| x - r).collect();
            let b: Vec<u32> = witness.n_b.coords().iter().zip(witness.r_b.r()).map(|(x, r)| x - r).collect();
            prop_assert_eq!(a, b);
            prop_assert!(witness.r_a.weight() <= t);
        }
    }

    #[test]
    fn sampled_eps_never_exceeds_exact(fc in fock_strategy(), seed: u64) {
        let t = fc.shape().n.min(2);
        let exact = certify::deformation_bound(&fc, t, 0.2, LambdaMode::EmpiricalCodeMean, DEFAULT_PATTERN_CAP).unwrap();
        let est = certify::estimate_eps(&fc, t, 0.2, LambdaMode::EmpiricalCodeMean, 50, seed).unwrap();
        prop_assert!(est.eps_max_lower_bound <= exact.eps_max + 1e-15);
        prop_assert!(!est.certifying);
    }

    #[test]
    fn quantum_rate_is_log_ratio(k in 1usize..100, q in 2usize..6, n in 1u32..20) {
        let s = SimplexShape::new(q, n).unwrap();
        let r = fock::quantum_rate(k, s).unwrap();
        let dim: f64 = simplex_size(s).to_string().parse().unwrap();
        prop_assert!((r - (k as f64).log2() / dim.log2()).abs() <= 1e-12);
    }
}
