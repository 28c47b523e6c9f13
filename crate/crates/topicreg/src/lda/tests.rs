use super::*;
use crate::corpus::{Corpus, Document, Vocabulary};
use crate::math::{sample_dirichlet_sym, seeded_stream, total_variation};
use crate::topics::aligned_tv_distances;

fn quick_config(k: usize) -> LdaConfig {
    LdaConfig::new(k).with_schedule(100, 100, 10).with_seed(7)
}

fn doc(tokens: &[usize], v: usize) -> Document {
    Document::new(tokens.to_vec(), v).unwrap()
}

/// Two topics with disjoint support over an even vocabulary.
fn disjoint_phi(v: usize) -> TopicMatrix {
    let half = v / 2;
    let mut rows = vec![vec![0.0; v], vec![0.0; v]];
    for w in 0..half {
        rows[0][w] = 1.0 / half as f64;
    }
    for w in half..v {
        rows[1][w] = 1.0 / (v - half) as f64;
    }
    TopicMatrix::from_rows(rows).unwrap()
}

#[test]
fn defaults_match_reference_schedule() {
    let c = LdaConfig::new(26);
    assert_eq!((c.burnin, c.iterations, c.keep), (1000, 1000, 50));
    assert!((c.alpha - 50.0 / 26.0).abs() < 1e-12);
}

#[test]
fn simulation_k1_is_degenerate() {
    let config = LdaConfig { xi: 20.0, ..quick_config(1) };
    let sim = simulate_corpus(&config, 10, 5, None).unwrap();
    for j in 0..10 {
        assert_eq!(sim.theta[[j, 0]], 1.0);
    }
    assert_eq!(sim.corpus.len(), 10);
    assert!(sim.corpus.docs.iter().all(|d| !d.is_empty()));
}

#[test]
fn simulation_is_deterministic_for_a_seed() {
    let config = quick_config(3);
    let a = simulate_corpus(&config, 8, 20, None).unwrap();
    let b = simulate_corpus(&config, 8, 20, None).unwrap();
    for (da, db) in a.corpus.docs.iter().zip(&b.corpus.docs) {
        assert_eq!(da.tokens(), db.tokens());
    }
    assert_eq!(a.theta, b.theta);
    let c = simulate_corpus(&config.clone().with_seed(8), 8, 20, None).unwrap();
    assert_ne!(
        a.corpus.docs[0].tokens(),
        c.corpus.docs[0].tokens(),
        "different seeds should differ"
    );
}

#[test]
fn simulation_reproduces_reference_design() {
    // Two topics, 500-word vocabulary, 500 documents of 5,000-10,000 words.
    let config = LdaConfig::new(2).with_seed(11);
    let lengths = uniform_lengths(500, 5_000, 10_000, 11);
    let sim = simulate_corpus_with_lengths(&config, &lengths, 500, None).unwrap();
    assert_eq!(sim.corpus.len(), 500);
    assert_eq!(sim.corpus.vocabulary.len(), 500);
    assert!(sim
        .corpus
        .docs
        .iter()
        .all(|d| (5_000..=10_000).contains(&d.len())));
    assert_eq!(sim.phi.num_topics(), 2);
}

#[test]
fn gibbs_k1_gives_smoothed_frequencies() {
    let v = 3;
    let vocab = Vocabulary::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
    let docs = vec![doc(&[0, 0, 1], v), doc(&[2, 0], v)];
    let corpus = Corpus::new(vec!["1".into(), "2".into()], docs, vocab, None).unwrap();
    let config = quick_config(1);
    let model = fit_lda_gibbs(&corpus, &config).unwrap();
    for j in 0..2 {
        assert!((model.theta[[j, 0]] - 1.0).abs() < 1e-12);
    }
    // With one topic the counts never move: phi is exactly the smoothed
    // empirical term frequency.
    let beta = config.beta;
    let denom = 5.0 + 3.0 * beta;
    let expect = [(3.0 + beta) / denom, (1.0 + beta) / denom, (1.0 + beta) / denom];
    for w in 0..3 {
        assert!((model.phi.prob(0, w) - expect[w]).abs() < 1e-12);
    }
}

#[test]
fn gibbs_recovers_disjoint_topics() {
    let phi_true = disjoint_phi(20);
    let config = LdaConfig {
        alpha: 1.0,
        ..LdaConfig::new(2).with_schedule(150, 150, 15).with_seed(42)
    };
    let lengths = vec![60; 100];
    let sim = simulate_corpus_with_lengths(&config, &lengths, 20, Some(&phi_true)).unwrap();
    let model = fit_lda_gibbs(&sim.corpus, &config).unwrap();
    let tv = aligned_tv_distances(&model.phi, &phi_true).unwrap();
    assert!(tv.iter().all(|&d| d < 0.1), "tv distances {tv:?}");
}

#[test]
fn gibbs_rejects_more_topics_than_tokens() {
    let vocab = Vocabulary::new(vec!["a".into()]).unwrap();
    let docs = vec![doc(&[0, 0], 1)];
    let corpus = Corpus::new(vec!["1".into()], docs, vocab, None).unwrap();
    let err = fit_lda_gibbs(&corpus, &quick_config(5)).unwrap_err();
    assert!(matches!(err, crate::Error::MoreTopicsThanTokens { .. }));
}

#[test]
fn gibbs_count_tables_stay_consistent() {
    let config = quick_config(3);
    let sim = simulate_corpus(&LdaConfig { xi: 30.0, ..config.clone() }, 6, 12, None).unwrap();
    let mut rng = seeded_stream(1, 99);
    let mut state = GibbsState::init(&sim.corpus, 3, &mut rng);
    assert!(state.is_consistent(&sim.corpus));
    for _ in 0..5 {
        state.sweep(&sim.corpus, config.alpha, config.beta, &mut rng);
        assert!(state.is_consistent(&sim.corpus));
    }
}

#[test]
fn log_likelihood_hand_instance() {
    // phi = [[0.8, 0.2], [0.3, 0.7]], N = (6, 4), theta = (0.6, 0.4):
    // mixture probabilities are (0.6*0.8 + 0.4*0.3, 0.6*0.2 + 0.4*0.7)
    // = (0.60, 0.40), so l = 6 ln 0.6 + 4 ln 0.4.
    let phi = TopicMatrix::from_rows(vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
    let d = doc(&[0, 0, 0, 0, 0, 0, 1, 1, 1, 1], 2);
    let expected = 6.0 * 0.6f64.ln() + 4.0 * 0.4f64.ln();
    let got = log_likelihood_theta(&d, &[0.6, 0.4], &phi).unwrap();
    assert!((got - expected).abs() < 1e-12, "got {got}, expected {expected}");
    assert!((expected + 6.730116670092563).abs() < 1e-12);
}

#[test]
fn log_likelihood_single_topic_reduces_to_multinomial() {
    let phi = TopicMatrix::from_rows(vec![vec![0.25, 0.75]]).unwrap();
    let d = doc(&[0, 1, 1], 2);
    let got = log_likelihood_theta(&d, &[1.0], &phi).unwrap();
    let expected = 0.25f64.ln() + 2.0 * 0.75f64.ln();
    assert!((got - expected).abs() < 1e-12);
}

#[test]
fn log_likelihood_identical_rows_ignores_theta() {
    let phi = TopicMatrix::from_rows(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
    let d = doc(&[0, 1, 1, 0], 2);
    let uniform = log_likelihood_theta(&d, &[0.5, 0.5], &phi).unwrap();
    let skewed = log_likelihood_theta(&d, &[0.9, 0.1], &phi).unwrap();
    let multinomial = 2.0 * 0.3f64.ln() + 2.0 * 0.7f64.ln();
    assert!((uniform - multinomial).abs() < 1e-12);
    assert!((skewed - multinomial).abs() < 1e-12);
}

#[test]
fn log_likelihood_impossible_word_is_negative_infinity() {
    let phi = TopicMatrix::from_rows(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
    let d = doc(&[0, 1], 2);
    assert_eq!(
        log_likelihood_theta(&d, &[0.5, 0.5], &phi).unwrap(),
        f64::NEG_INFINITY
    );
    // Zero-count terms contribute nothing even with zero probability.
    let d = doc(&[0, 0], 2);
    let got = log_likelihood_theta(&d, &[0.5, 0.5], &phi).unwrap();
    assert!((got - 0.0).abs() < 1e-12);
}

#[test]
fn mle_k1_is_trivial() {
    let phi = TopicMatrix::from_rows(vec![vec![0.5, 0.5]]).unwrap();
    let d = doc(&[0, 1], 2);
    let theta = estimate_theta_mle(&d, &phi, 1e-10).unwrap();
    assert_eq!(theta.as_slice(), &[1.0]);
}

#[test]
fn mle_hand_instance() {
    // Stationarity of 6 ln(0.3 + 0.5 t) + 4 ln(0.7 - 0.5 t) gives t = 0.6.
    let phi = TopicMatrix::from_rows(vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
    let d = doc(&[0, 0, 0, 0, 0, 0, 1, 1, 1, 1], 2);
    let theta = estimate_theta_mle(&d, &phi, 1e-10).unwrap();
    assert!((theta[0] - 0.6).abs() < 1e-6, "theta = {:?}", theta.as_slice());
    assert!((theta[1] - 0.4).abs() < 1e-6);
}

#[test]
fn mle_errors_without_usable_tokens() {
    let phi = TopicMatrix::from_rows(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
    let d = doc(&[1, 1], 2);
    assert!(matches!(
        estimate_theta_mle(&d, &phi, 1e-8),
        Err(crate::Error::NoInVocabularyTokens)
    ));
}

#[test]
fn mle_beats_random_simplex_points() {
    let mut rng = seeded_stream(13, 0);
    for trial in 0..5 {
        let k = 2 + trial % 2;
        let phi_rows: Vec<Vec<f64>> =
            (0..k).map(|_| sample_dirichlet_sym(&mut rng, 0.5, 6)).collect();
        let phi = TopicMatrix::from_rows(phi_rows).unwrap();
        let truth = sample_dirichlet_sym(&mut rng, 1.0, k);
        let d = simulate_documents_with_theta(&phi, &truth, &[400], 77 + trial as u64)
            .unwrap()
            .remove(0);
        let opt = estimate_theta_mle(&d, &phi, 1e-10).unwrap();
        let best = log_likelihood_theta(&d, opt.as_slice(), &phi).unwrap();
        for _ in 0..100 {
            let point = sample_dirichlet_sym(&mut rng, 1.0, k);
            let ll = log_likelihood_theta(&d, &point, &phi).unwrap();
            assert!(
                ll <= best + 1e-9,
                "random point beat the MLE: {ll} > {best}"
            );
        }
    }
}

#[test]
fn mle_is_invariant_to_token_order() {
    let phi = TopicMatrix::from_rows(vec![vec![0.6, 0.3, 0.1], vec![0.1, 0.2, 0.7]]).unwrap();
    let a = doc(&[0, 1, 2, 2, 0, 1], 3);
    let b = doc(&[2, 2, 1, 1, 0, 0], 3);
    let ta = estimate_theta_mle(&a, &phi, 1e-10).unwrap();
    let tb = estimate_theta_mle(&b, &phi, 1e-10).unwrap();
    assert_eq!(ta.as_slice(), tb.as_slice());
}

#[test]
fn mle_matches_coarse_grid_on_small_instances() {
    let mut rng = seeded_stream(29, 0);
    for _ in 0..10 {
        let phi_rows: Vec<Vec<f64>> =
            (0..2).map(|_| sample_dirichlet_sym(&mut rng, 1.0, 4)).collect();
        let phi = TopicMatrix::from_rows(phi_rows).unwrap();
        let truth = sample_dirichlet_sym(&mut rng, 1.0, 2);
        let d = simulate_documents_with_theta(&phi, &truth, &[200], 5).unwrap().remove(0);
        let est = estimate_theta_mle(&d, &phi, 1e-10).unwrap();
        // Exhaustive grid on the 2-simplex at step 0.01.
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let ll = log_likelihood_theta(&d, &[t, 1.0 - t], &phi).unwrap();
            if ll > best.0 {
                best = (ll, t);
            }
        }
        assert!(
            (est[0] - best.1).abs() <= 0.02,
            "estimate {} vs grid {}",
            est[0],
            best.1
        );
    }
}

#[test]
fn estimates_cluster_around_truth() {
    // Reduced version of the clustering experiment: the acceptance suite
    // runs the full-scale one.
    let mut rng = seeded_stream(3, 0);
    let phi_rows: Vec<Vec<f64>> = (0..2).map(|_| sample_dirichlet_sym(&mut rng, 0.1, 50)).collect();
    let phi = TopicMatrix::from_rows(phi_rows).unwrap();
    let docs =
        simulate_documents_with_theta(&phi, &[0.2, 0.8], &vec![600; 30], 123).unwrap();
    let ests: Vec<f64> = docs
        .iter()
        .map(|d| estimate_theta_mle(d, &phi, 1e-8).unwrap()[0])
        .collect();
    let mean = crate::math::mean(&ests);
    assert!((mean - 0.2).abs() < 0.05, "mean {mean}");
}

#[test]
fn model_serde_round_trip() {
    let config = quick_config(2);
    let sim = simulate_corpus(&LdaConfig { xi: 15.0, ..config.clone() }, 5, 8, None).unwrap();
    let model = fit_lda_gibbs(&sim.corpus, &config).unwrap();
    let json = serde_json::to_string(&model).unwrap();
    let back: LdaModel = serde_json::from_str(&json).unwrap();
    assert_eq!(back.phi, model.phi);
    assert_eq!(back.theta, model.theta);
    assert_eq!(back.config, model.config);
}

#[test]
fn simulated_topics_stay_separated() {
    // Sanity check on the synthetic design used by recovery tests.
    let phi = disjoint_phi(10);
    assert!(total_variation(
        phi.row(0).as_slice().unwrap(),
        phi.row(1).as_slice().unwrap()
    ) > 0.99);
}
