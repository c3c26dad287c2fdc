use cred_core::tuner::{tune_threshold, Objective};
use cred_core::*;
use proptest::prelude::*;

fn counts() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..60, 1..80)
}

fn smoothing() -> impl Strategy<Value = SmoothingConfig> {
    (0.0f64..5.0, prop_oneof![Just(0.0), 0.0f64..0.05], prop::option::of(1usize..100))
        .prop_map(|(lambda, epsilon, top_k)| SmoothingConfig { lambda, epsilon, top_k })
}

fn probs(counts: &[usize]) -> SmoothedDistribution {
    let dist = FrequencyDistribution::from_counts(counts.to_vec()).unwrap();
    smooth_and_clip(&dist, &SmoothingConfig::default()).unwrap()
}

fn nonlinearity() -> impl Strategy<Value = Nonlinearity> {
    prop_oneof![
        (1u32..40).prop_map(|k| Nonlinearity::Power(k as f64 / 4.0)),
        Just(Nonlinearity::Entropy),
        Just(Nonlinearity::SquaredEntropy),
    ]
}

fn delta() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1e-12), (1e-300f64..1.0)]
}

fn distance() -> impl Strategy<Value = Distance> {
    prop_oneof![
        Just(Distance::Squared),
        Just(Distance::Jsd),
        Just(Distance::Abs),
        delta().prop_map(|delta| Distance::LogAbs { delta }),
        delta().prop_map(|delta| Distance::LogSquared { delta }),
        delta().prop_map(|delta| Distance::Kl { delta }),
    ]
}

fn kind() -> impl Strategy<Value = ScoreKind> {
    prop_oneof![
        Just(ScoreKind::Ttr),
        nonlinearity().prop_map(ScoreKind::Moment),
        (distance(), any::<bool>()).prop_map(|(distance, renormalize)| ScoreKind::Zipf { distance, renormalize }),
    ]
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -10.0f64..10.0]
}

fn config() -> impl Strategy<Value = ScoreConfig> {
    let ngrams = (prop_oneof![Just(Unit::Character), Just(Unit::Token)], prop::collection::btree_set(1usize..20, 1..4))
        .prop_map(|(unit, lengths)| NgramSpec::new(unit, lengths).unwrap());
    let norm = prop_oneof![
        Just(LengthNorm::Off),
        Just(LengthNorm::Unbounded),
        (1e-3f64..1e7).prop_map(LengthNorm::Asymptote),
    ];
    let smooth = (
        prop_oneof![Just(0.0), Just(1.0), finite().prop_map(f64::abs)],
        prop_oneof![Just(0.0), 0.0f64..1.0],
        prop::option::of(1usize..100_000),
    )
        .prop_map(|(lambda, epsilon, top_k)| SmoothingConfig { lambda, epsilon, top_k });
    let threshold = prop::option::of(prop_oneof![finite(), Just(f64::INFINITY), Just(f64::NEG_INFINITY)]);
    (kind(), ngrams, smooth, norm, threshold).prop_map(|(kind, ngrams, smoothing, lengthnorm, threshold)| {
        ScoreConfig::new(kind, ngrams).with_smoothing(smoothing).with_lengthnorm(lengthnorm).with_threshold(threshold)
    })
}

proptest! {
    #[test]
    fn smoothing_is_normalised_and_sorted(counts in counts(), cfg in smoothing()) {
        let dist = FrequencyDistribution::from_counts(counts).unwrap();
        match smooth_and_clip(&dist, &cfg) {
            Ok(p) => {
                let sum: f64 = p.probs().iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-9);
                prop_assert!(p.probs().windows(2).all(|w| w[0] >= w[1]));
                // rank order follows counts
                for (i, j) in (0..p.len()).flat_map(|i| (0..p.len()).map(move |j| (i, j))) {
                    let (ci, cj) = (dist.counts()[i], dist.counts()[j]);
                    if ci > cj { prop_assert!(p.probs()[i] > p.probs()[j]); }
                    if ci == cj { prop_assert_eq!(p.probs()[i], p.probs()[j]); }
                }
            }
            Err(e) => prop_assert_eq!(e, Error::EmptyAfterClipping),
        }
    }

    #[test]
    fn default_smoothing_is_count_normalisation(counts in counts()) {
        let dist = FrequencyDistribution::from_counts(counts).unwrap();
        let p = smooth_and_clip(&dist, &SmoothingConfig::default()).unwrap();
        let total = dist.total_tokens() as f64;
        for (&c, &q) in dist.counts().iter().zip(p.probs()) {
            prop_assert_eq!(q, c as f64 / total);
        }
    }

    #[test]
    fn ngram_count_identity(text in "\\PC{0,40}", n in 1usize..8) {
        let units = text.chars().count();
        prop_assert_eq!(extract_ngrams(&text, Unit::Character, n).len(), (units + 1).saturating_sub(n));
        let words = text.split_whitespace().count();
        prop_assert_eq!(extract_ngrams(&text, Unit::Token, n).len(), (words + 1).saturating_sub(n));
        let dist = distribution(&text, Unit::Character, n);
        prop_assert_eq!(dist.total_tokens(), (units + 1).saturating_sub(n));
        prop_assert_eq!(&dist, &distribution(&text, Unit::Character, n));
    }

    #[test]
    fn moment_bounds(counts in counts(), k in 1.01f64..6.0) {
        let p = probs(&counts);
        let g = Nonlinearity::Power(k);
        let m = p.len() as f64;
        let v = moment_score(&p, g).unwrap();
        prop_assert!(m * g.apply(1.0 / m) <= v * (1.0 + 1e-12));
        prop_assert!(v <= g.apply(1.0) * (1.0 + 1e-12));
    }

    #[test]
    fn moving_mass_to_a_larger_entry_never_lowers_moment(counts in prop::collection::vec(1usize..60, 2..40), k in 1.01f64..6.0, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), frac in 0.0f64..1.0) {
        let p = probs(&counts);
        let (a, b) = (i.index(p.len()), j.index(p.len()));
        prop_assume!(a != b && p.probs()[a] >= p.probs()[b]);
        let mut q = p.probs().to_vec();
        let moved = q[b] * frac * 0.999;
        q[a] += moved;
        q[b] -= moved;
        let q = SmoothedDistribution::from_probs(q).unwrap();
        let g = Nonlinearity::Power(k);
        prop_assert!(moment_score(&q, g).unwrap() >= moment_score(&p, g).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn ttr_range(text in "[ab ]{1,60}", n in 1usize..4) {
        let dist = distribution(&text, Unit::Character, n);
        prop_assume!(!dist.is_empty());
        let v = ttr_score(&dist).unwrap();
        prop_assert!((0.0..1.0).contains(&v));
        prop_assert_eq!(v == 0.0, dist.num_types() == dist.total_tokens());
    }

    #[test]
    fn scores_ignore_the_alphabet(text in "[a-e ]{10,80}", n in 1usize..5, k in kind(), shift in 1u32..5000) {
        // a bijective remap of every code point
        let remapped: String = text.chars().map(|c| char::from_u32(0x4E00 + c as u32 * 7 + shift).unwrap()).collect();
        let cfg = ScoreConfig::new(k, NgramSpec::chars(n).unwrap()).with_lengthnorm(LengthNorm::Off);
        let a = score_value(&text, &cfg);
        let b = score_value(&remapped, &cfg);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!(a == b || (a.is_nan() && b.is_nan())),
            (a, b) => prop_assert_eq!(a.err(), b.err()),
        }
    }

    #[test]
    fn uniform_documents_normalise_to_one(k in 1.01f64..4.0, m in 1usize..3000) {
        let p = SmoothedDistribution::from_probs(vec![1.0 / m as f64; m]).unwrap();
        let g = Nonlinearity::Power(k);
        let raw = moment_score(&p, g).unwrap();
        let base = uniform_baseline(ScoreKind::Moment(g), 1, scaled_length(m as f64, None)).unwrap();
        prop_assert!((normalize(raw, base).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scaled_length_is_increasing_and_bounded(a in 1.0f64..1e6, m1 in 1.0f64..1e7, step in 1.0f64..1e3) {
        let s1 = scaled_length(m1, Some(a));
        let s2 = scaled_length(m1 + step, Some(a));
        prop_assert!(s2 > s1);
        prop_assert!(s2 < a);
    }

    #[test]
    fn squared_zipf_distance_vanishes_on_the_reference(n in 1usize..10, len in 1usize..200) {
        let f = zipf_reference(n, len).unwrap();
        let p = SmoothedDistribution::from_probs(f.clone()).unwrap();
        prop_assert_eq!(zipf_score(&p, n, Distance::Squared).unwrap(), 0.0);
        let mut off = f;
        off[0] *= 0.5;
        let q = SmoothedDistribution::from_probs(off).unwrap();
        prop_assert!(zipf_score(&q, n, Distance::Squared).unwrap() > 0.0);
    }

    #[test]
    fn signature_round_trip(cfg in config()) {
        let sig = signature(&cfg);
        let parsed = parse_signature(&sig).unwrap();
        prop_assert_eq!(signature(&parsed), sig);
        prop_assert_eq!(parsed, cfg);
    }

    #[test]
    fn classification_is_monotone(v in finite(), bump in 0.0f64..1e6, tau in finite()) {
        if classify_value(v, tau) == Decision::Noisy {
            prop_assert_eq!(classify_value(v + bump, tau), Decision::Noisy);
        }
    }

    #[test]
    fn threshold_search_is_optimal(pairs in prop::collection::vec((0u8..12, any::<bool>()), 2..50)) {
        let scores: Vec<(f64, bool)> = pairs.iter().map(|&(v, g)| (v as f64 / 4.0, g)).collect();
        prop_assume!(scores.iter().any(|s| s.1) && scores.iter().any(|s| !s.1));
        for objective in [Objective::F1, Objective::p4_weighted()] {
            let got = tune_threshold(&scores, objective).unwrap();
            // brute force: every observed value, every midpoint, and both infinities
            let mut candidates = vec![f64::NEG_INFINITY, f64::INFINITY];
            for &(a, _) in &scores {
                candidates.push(a);
                for &(b, _) in &scores {
                    candidates.push((a + b) / 2.0);
                }
            }
            let confusion_at = |tau: f64| {
                let gold: Vec<bool> = scores.iter().map(|s| s.1).collect();
                let pred: Vec<bool> = scores.iter().map(|s| classify_value(s.0, tau).is_clean()).collect();
                Confusion::from_decisions(&gold, &pred)
            };
            let best = candidates.iter().map(|&t| objective.evaluate(&confusion_at(t)).unwrap()).fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(got.objective, best);
            prop_assert_eq!(confusion_at(got.tau), got.confusion);
            prop_assert_eq!(objective.evaluate(&got.confusion).unwrap(), best);
        }
    }
}
