//! Property tests over the data-handling and numerical invariants.

use std::collections::BTreeMap;

use ndsl_core::classifiers::{logreg_predict, nb_predict, train_logreg, train_nb, LogRegConfig};
use ndsl_core::corpus::{clean_sentence, is_accepted, stratified_sample, train_test_split, Pools, Sentence};
use ndsl_core::eval::EvalReport;
use ndsl_core::features::{build_ngram_vocab, extract_char_ngrams, vectorize, FeatureVector};
use ndsl_core::neural::{cce_loss, softmax};
use ndsl_core::reduce::{covariance, top_eigenpairs, tsne_affinities};
use ndsl_core::{Label, NUM_LABELS};
use proptest::prelude::*;

fn label() -> impl Strategy<Value = Label> {
    (0..NUM_LABELS).prop_map(|i| Label::ALL[i])
}

/// Cleaned text over a small alphabet so n-grams repeat.
fn clean_text() -> impl Strategy<Value = String> {
    "[abcæøþ ]{0,30}".prop_map(|s| clean_sentence(&s))
}

fn sentences() -> impl Strategy<Value = Vec<Sentence>> {
    prop::collection::vec((label(), "[abcdåö][abcdåö ]{1,24}"), 1..30)
        .prop_map(|v| v.into_iter().filter_map(|(l, t)| Sentence::from_raw(l, &t)).collect())
}

fn pools() -> impl Strategy<Value = Pools> {
    prop::collection::vec(prop::collection::vec("[a-z]{2,10}", 3..12), NUM_LABELS).prop_map(|per| {
        Label::ALL
            .iter()
            .zip(per)
            .map(|(&l, texts)| (l, texts.iter().map(|t| Sentence::from_clean(l, t).unwrap()).collect()))
            .collect()
    })
}

fn matrix(rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    cols.prop_flat_map(move |d| prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), rows.clone()))
}

proptest! {
    #[test]
    fn cleaning_is_idempotent_and_closed(s in "\\PC{0,60}") {
        let once = clean_sentence(&s);
        prop_assert_eq!(clean_sentence(&once), once.clone());
        prop_assert!(once.chars().all(is_accepted));
        prop_assert!(!once.starts_with(' '));
        prop_assert!(!once.contains("  "));
    }

    #[test]
    fn stratified_sampling_and_split_keep_counts_equal(p in pools(), n in 1usize..4, seed in any::<u64>()) {
        let d = stratified_sample(&p, n, seed).unwrap();
        prop_assert!(d.is_stratified());
        prop_assert_eq!(d.per_class_count(), [n; NUM_LABELS]);
        prop_assert_eq!(&d, &stratified_sample(&p, n, seed).unwrap());
        let (train, test) = train_test_split(&d, 0.5, seed).unwrap();
        prop_assert!(train.is_stratified() && test.is_stratified());
        prop_assert_eq!(train.len() + test.len(), d.len());
        prop_assert_eq!((train.clone(), test.clone()), train_test_split(&d, 0.5, seed).unwrap());
    }

    #[test]
    fn ngram_count_matches_length(t in clean_text(), n in 1usize..6) {
        let len = t.chars().count();
        prop_assert_eq!(extract_char_ngrams(&t, n).len(), (len + 1).saturating_sub(n));
    }

    #[test]
    fn vectors_match_brute_force_recount(corpus in sentences(), q in clean_text(), n in 1usize..4, norm in any::<bool>()) {
        prop_assume!(!corpus.is_empty());
        let vocab = build_ngram_vocab(&corpus, n);
        prop_assert_eq!(&vocab, &build_ngram_vocab(&corpus, n));
        let v = vectorize(&q, &vocab, false);
        let chars: Vec<char> = q.chars().collect();
        let mut expected: BTreeMap<usize, f64> = BTreeMap::new();
        for w in chars.windows(n) {
            let g: String = w.iter().collect();
            if let Some(i) = vocab.get(&g) {
                *expected.entry(i).or_default() += 1.0;
            }
        }
        for (i, c) in v.iter() {
            prop_assert!(i < vocab.len());
            prop_assert!(c > 0.0);
            prop_assert_eq!(expected.get(&i).copied(), Some(c));
        }
        prop_assert_eq!(v.nnz(), expected.len());
        if norm && v.nnz() > 0 {
            let nv = vectorize(&q, &vocab, true);
            prop_assert!((nv.sum() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn softmax_normalises_and_cce_is_non_negative(z in prop::collection::vec(-500.0f64..500.0, NUM_LABELS), y in label()) {
        let p = softmax(&z);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
        prop_assert!(cce_loss(&p, y) >= 0.0);
    }

    #[test]
    fn confusion_trace_over_total_is_accuracy(preds in prop::collection::vec((label(), label(), 1usize..50), 1..80)) {
        let r = EvalReport::from_predictions(preds.clone(), "d", "m");
        let correct = preds.iter().filter(|(t, p, _)| t == p).count();
        prop_assert_eq!(r.confusion.trace(), correct as u64);
        prop_assert_eq!(r.confusion.total(), preds.len() as u64);
        prop_assert_eq!(r.accuracy, r.confusion.trace() as f64 / r.confusion.total() as f64);
        for l in Label::ALL {
            prop_assert_eq!(r.confusion.row_sum(l), preds.iter().filter(|(t, _, _)| *t == l).count() as u64);
            let m = &r.per_label[l.index()];
            prop_assert!((0.0..=1.0).contains(&m.precision) && (0.0..=1.0).contains(&m.recall));
        }
        let ls = r.length_stats();
        let sizes = ls.correct.map_or(0, |g| g.count) + ls.misclassified.map_or(0, |g| g.count);
        prop_assert_eq!(sizes, preds.len());
        prop_assert!(ls.all.unwrap().std >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariance_is_symmetric_psd_and_eigenpairs_hold(data in matrix(2..15, 1..6)) {
        let d = data[0].len();
        let c = covariance(&data).unwrap();
        for i in 0..d {
            for j in 0..d {
                prop_assert!((c.values[i * d + j] - c.values[j * d + i]).abs() <= 1e-9);
            }
        }
        let frob = c.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let pairs = top_eigenpairs(&c.values, d, d).unwrap();
        for w in pairs.windows(2) {
            prop_assert!(w[0].value >= w[1].value);
        }
        for p in &pairs {
            prop_assert!(p.value >= -1e-9 * frob.max(1.0));
            prop_assert!((p.vector.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() <= 1e-9);
            let res = (0..d)
                .map(|i| ((0..d).map(|j| c.values[i * d + j] * p.vector[j]).sum::<f64>() - p.value * p.vector[i]).powi(2))
                .sum::<f64>()
                .sqrt();
            prop_assert!(res <= 1e-6 * frob.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn affinities_are_a_symmetric_distribution(data in matrix(8..25, 2..5), perp in 2.0f64..5.0) {
        let n = data.len();
        let a = tsne_affinities(&data, perp).unwrap();
        let mut total = 0.0;
        for i in 0..n {
            prop_assert_eq!(a.joint[i * n + i], 0.0);
            prop_assert!(a.sigma[i] > 0.0);
            for j in 0..n {
                let p = a.joint[i * n + j];
                prop_assert!(p >= 0.0);
                prop_assert!((p - a.joint[j * n + i]).abs() <= 1e-15);
                total += p;
            }
        }
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn nb_and_logreg_ignore_training_order(
        rows in prop::collection::vec((prop::collection::vec(0u8..4, 4), label()), 2..12),
        rot in 0usize..12,
    ) {
        let ex: Vec<(FeatureVector, Label)> = rows
            .iter()
            .map(|(c, l)| (FeatureVector::from_dense(&c.iter().map(|&x| x as f64).collect::<Vec<_>>()), *l))
            .collect();
        // logreg sees frequencies; at eta 0.5 raw counts make descent unstable
        // and rounding noise from the summation order then grows without bound
        let normalized: Vec<(FeatureVector, Label)> = ex
            .iter()
            .map(|(x, l)| {
                let mut x = x.clone();
                x.l1_normalize();
                (x, *l)
            })
            .collect();
        let mut shuffled_norm = normalized.clone();
        shuffled_norm.reverse();
        let k = rot % shuffled_norm.len();
        shuffled_norm.rotate_left(k);
        let mut shuffled = ex.clone();
        shuffled.reverse();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        let cfg = LogRegConfig { epochs: 30, ..LogRegConfig::default() };
        let (nb_a, nb_b) = (train_nb(&ex, 1.0).unwrap(), train_nb(&shuffled, 1.0).unwrap());
        let (lr_a, lr_b) = (train_logreg(&normalized, &cfg).unwrap(), train_logreg(&shuffled_norm, &cfg).unwrap());
        for (x, _) in &ex {
            prop_assert_eq!(nb_predict(&nb_a, x).unwrap(), nb_predict(&nb_b, x).unwrap());
        }
        for (x, _) in &normalized {
            let (pa, pb) = (logreg_predict(&lr_a, x).unwrap().1, logreg_predict(&lr_b, x).unwrap().1);
            for k in 0..NUM_LABELS {
                prop_assert!((pa[k] - pb[k]).abs() <= 1e-9);
            }
            // purity
            prop_assert_eq!(logreg_predict(&lr_a, x).unwrap(), logreg_predict(&lr_a, x).unwrap());
        }
    }
}
