//! Character n-gram CNN on a corpus where only adjacency carries the class.

use ndsl_core::neural::{cnn_train, CnnConfig};
use ndsl_core::synth::adjacency_dataset;

pub fn only_a_bigram_cnn_sees_adjacency() {
    let train = adjacency_dataset(150, 10, 1);
    let test = adjacency_dataset(100, 10, 2);
    let accuracy = |gram: usize, kernel: usize| {
        let cfg = CnnConfig { gram, kernel, max_len: 16, ..CnnConfig::default() };
        let (m, h) = cnn_train(&train, Some(&test), &cfg).unwrap();
        let acc = *h.test_accuracy.last().unwrap();
        let direct = test.iter().filter(|s| m.predict(s.text()).unwrap().0 == s.label()).count() as f64 / test.len() as f64;
        assert_eq!(acc, direct);
        acc
    };
    for kernel in [1, 2, 3] {
        assert_eq!(accuracy(2, kernel), 1.0, "bigram kernel {kernel}");
    }
    let unigram = accuracy(1, 1);
    assert!((unigram - 0.5).abs() <= 0.1, "unigram h=1 accuracy {unigram}");
}
