//! Seeded synthetic corpora.
//!
//! [`synth_dataset`] draws sentences in six artificial languages that share a
//! proto-lexicon and differ by spelling rules, endings and function words, so
//! close pairs (dk/nb, nb/nn, is/fo) are hard to tell apart. Two genres share
//! the languages but differ in sentence length, vocabulary ranking and
//! pronoun use. The languages are fixed; only sampling depends on the seed.
//!
//! [`adjacency_dataset`] is a two-class corpus where the class is carried by
//! the order of two adjacent characters and by nothing else.

use alloc::string::String;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;

use crate::corpus::{Dataset, Pools, Sentence};
use crate::math::pow;
use crate::{rng, Label, NUM_LABELS};

const LEXICON_SEED: u64 = 0x6e64_736c;
const LEXICON_SIZE: usize = 1500;
const ZIPF_EXPONENT: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Genre {
    /// Long, name-heavy, topical sentences.
    Encyclopedic,
    /// Short first- and second-person sentences and questions.
    Conversational,
}

const FUNCTION_WORDS: [&[&str]; NUM_LABELS] = [
    &["og", "i", "er", "det", "af", "til", "en", "på", "som", "med", "den", "for", "har", "ikke", "et", "de", "blev", "fra", "var", "efter"],
    &["och", "i", "är", "det", "av", "till", "en", "på", "som", "med", "den", "för", "har", "inte", "ett", "de", "blev", "från", "var", "efter"],
    &["og", "i", "er", "det", "av", "til", "ein", "på", "som", "med", "den", "for", "har", "ikkje", "eit", "dei", "vart", "frå", "var", "etter"],
    &["og", "i", "er", "det", "av", "til", "en", "på", "som", "med", "den", "for", "har", "ikke", "et", "de", "ble", "fra", "var", "etter"],
    &["og", "í", "er", "tað", "av", "til", "ein", "á", "sum", "við", "tann", "fyri", "hevur", "ikki", "eitt", "teir", "varð", "frá", "var", "eftir"],
    &["og", "í", "er", "það", "af", "til", "einn", "á", "sem", "með", "sá", "fyrir", "hefur", "ekki", "eitt", "þeir", "varð", "frá", "var", "eftir"],
];

const PRONOUNS: [&[&str]; NUM_LABELS] = [
    &["jeg", "du", "vi", "han", "hun", "mig", "hvad", "hvor", "kan", "vil"],
    &["jag", "du", "vi", "han", "hon", "mig", "vad", "var", "kan", "vill"],
    &["eg", "du", "vi", "han", "ho", "meg", "kva", "kvar", "kan", "vil"],
    &["jeg", "du", "vi", "han", "hun", "meg", "hva", "hvor", "kan", "vil"],
    &["eg", "tú", "vit", "hann", "hon", "meg", "hvat", "hvar", "kann", "vil"],
    &["ég", "þú", "við", "hann", "hún", "mig", "hvað", "hvar", "get", "vil"],
];

const NAMES: &[&str] = &[
    "anders", "maria", "olsen", "london", "berlin", "amerika", "paris", "johansen", "erik", "karin", "europa",
    "tokyo", "einar", "sigrid", "hansen", "oslo",
];

const ONSETS: &[&str] = &["b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "st", "sk", "br", "fr", "T", "C", "j", "gr", "kl", "sp"];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "A", "O", "Q", "E", "Y", "I", "U", "a", "e", "i", "o"];
const CODAS: &[&str] = &["", "", "", "n", "r", "l", "s", "t", "k", "D", "nd", "rt", "ng", "m", "ll"];
const ENDINGS: &[&str] = &["", "", "N", "R", "G", "X"];

fn render_symbol(sym: char, lang: usize, hash: u32) -> &'static str {
    use Label::*;
    let l = Label::ALL[lang];
    match sym {
        'A' => if l == Sv { "ä" } else { "æ" },
        'O' => if matches!(l, Sv | Is) { "ö" } else { "ø" },
        'Q' => if matches!(l, Is | Fo) { "á" } else { "å" },
        'E' => match l {
            Dk | Sv => "e",
            Nb => if hash % 2 == 0 { "ei" } else { "e" },
            _ => "ei",
        },
        'Y' => if matches!(l, Is | Fo) { "ý" } else { "y" },
        'I' => if matches!(l, Is | Fo) { "í" } else { "i" },
        'U' => match l {
            Sv => "o",
            Is | Fo => "ú",
            _ => "u",
        },
        'o' => if l == Is && hash % 3 == 0 { "ó" } else { "o" },
        'T' => match l {
            Is => "þ",
            Fo => "t",
            _ => "t",
        },
        'D' => if matches!(l, Is | Fo) { "ð" } else { "d" },
        'C' => match l {
            Sv | Is => "sk",
            _ => "skj",
        },
        'N' => match l {
            Is => "inn",
            Fo => "in",
            _ => "en",
        },
        'R' => if matches!(l, Dk | Nb) { "er" } else { "ar" },
        'G' => if matches!(l, Dk | Nb) { "e" } else { "a" },
        'X' => if matches!(l, Is | Fo) { "ið" } else { "et" },
        _ => "",
    }
}

fn is_vowel(c: char) -> bool {
    "aeiouyæøåäöáéíóúýAOQEYIU".contains(c)
}

/// Spells a proto word (lowercase letters plus placeholder capitals) in one
/// language. Danish softens intervocalic p, t, k.
fn render(proto: &str, lang: usize, hash: u32) -> String {
    let chars: Vec<char> = proto.chars().collect();
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_ascii_uppercase() {
            out.push_str(render_symbol(c, lang, hash));
            continue;
        }
        let between_vowels = i > 0 && i + 1 < chars.len() && is_vowel(chars[i - 1]) && is_vowel(chars[i + 1]);
        if Label::ALL[lang] == Label::Dk && between_vowels {
            if let Some(soft) = match c {
                'p' => Some('b'),
                't' => Some('d'),
                'k' => Some('g'),
                _ => None,
            } {
                out.push(soft);
                continue;
            }
        }
        out.push(if c == 'o' { render_symbol('o', lang, hash).chars().next().unwrap() } else { c });
    }
    out
}

const TOPICS: usize = 8;

struct Languages {
    /// `words[r][lang]`: lexicon entry of rank `r` spelled in `lang`.
    words: Vec<[String; NUM_LABELS]>,
    /// Per-topic rank permutations of the lexicon for the encyclopedic genre.
    topic_orders: Vec<Vec<usize>>,
    /// How often each language writes about each topic.
    topic_weights: [[f64; TOPICS]; NUM_LABELS],
    /// Rank permutation used by the conversational genre.
    conversational_order: Vec<usize>,
}

fn languages() -> Languages {
    let mut rng = rng::seeded(LEXICON_SEED);
    let mut words = Vec::with_capacity(LEXICON_SIZE);
    while words.len() < LEXICON_SIZE {
        let syllables = rng.random_range(1..=3);
        let mut proto = String::new();
        for _ in 0..syllables {
            proto.push_str(ONSETS.choose(&mut rng).unwrap());
            proto.push_str(NUCLEI.choose(&mut rng).unwrap());
            proto.push_str(CODAS.choose(&mut rng).unwrap());
        }
        proto.push_str(ENDINGS.choose(&mut rng).unwrap());
        let hash = crate::embeddings::fnv1a(&proto);
        words.push(core::array::from_fn(|l| render(&proto, l, hash)));
    }
    let mut shuffled = || {
        let mut order: Vec<usize> = (0..LEXICON_SIZE).collect();
        order.shuffle(&mut rng);
        order
    };
    let topic_orders = (0..TOPICS).map(|_| shuffled()).collect();
    let conversational_order = shuffled();
    let mut topic_weights = [[0.0; TOPICS]; NUM_LABELS];
    for row in &mut topic_weights {
        for w in row.iter_mut() {
            *w = pow(rng.random_range(0.1..1.0), 3.0);
        }
    }
    Languages { words, topic_orders, topic_weights, conversational_order }
}

fn zipf(n: usize) -> WeightedIndex<f64> {
    WeightedIndex::new((0..n).map(|r| 1.0 / pow(r as f64 + 1.0, ZIPF_EXPONENT))).expect("positive weights")
}

struct GenreParams {
    min_words: usize,
    max_words: usize,
    function_share: f64,
    pronoun_share: f64,
    name_share: f64,
    foreign_share: f64,
    repeat_topic: f64,
    question_share: f64,
}

fn params(genre: Genre) -> GenreParams {
    match genre {
        Genre::Encyclopedic => GenreParams {
            min_words: 2,
            max_words: 32,
            function_share: 0.40,
            pronoun_share: 0.0,
            name_share: 0.05,
            foreign_share: 0.03,
            repeat_topic: 0.15,
            question_share: 0.0,
        },
        Genre::Conversational => GenreParams {
            min_words: 2,
            max_words: 10,
            function_share: 0.30,
            pronoun_share: 0.25,
            name_share: 0.02,
            foreign_share: 0.01,
            repeat_topic: 0.0,
            question_share: 0.3,
        },
    }
}

/// `per_label` sentences of each language and genre `genre`.
pub fn synth_pools(per_label: usize, genre: Genre, seed: u64) -> Pools {
    let langs = languages();
    let p = params(genre);
    let content = zipf(LEXICON_SIZE);
    let function = zipf(FUNCTION_WORDS[0].len());
    let pronoun = zipf(PRONOUNS[0].len());
    let topic_pick: Vec<WeightedIndex<f64>> =
        langs.topic_weights.iter().map(|w| WeightedIndex::new(w).expect("positive weights")).collect();
    let mut rng = rng::seeded(seed);
    let mut pools = Pools::new();
    for (lang, &label) in Label::ALL.iter().enumerate() {
        let mut out = Vec::with_capacity(per_label);
        while out.len() < per_label {
            // skewed towards short sentences, like real corpora
            let span = p.max_words - p.min_words;
            let u: f64 = rng.random();
            let words = p.min_words + (u * u * span as f64) as usize;
            let topic = topic_pick[lang].sample(&mut rng);
            let pick_content = |rng: &mut rng::Rng| {
                let r = content.sample(rng);
                match genre {
                    Genre::Encyclopedic => langs.topic_orders[topic][r],
                    Genre::Conversational => langs.conversational_order[r],
                }
            };
            let topic_word = pick_content(&mut rng);
            let topic_names = &NAMES[2 * topic..2 * topic + 2];
            let mut last_name: Option<&str> = None;
            let mut raw = String::new();
            for w in 0..words {
                let x: f64 = rng.random();
                let token: &str = if x < p.function_share {
                    FUNCTION_WORDS[lang][function.sample(&mut rng)]
                } else if x < p.function_share + p.pronoun_share {
                    PRONOUNS[lang][pronoun.sample(&mut rng)]
                } else if x < p.function_share + p.pronoun_share + p.name_share {
                    // names recur within a sentence and cluster by topic
                    let name = match last_name {
                        Some(n) if rng.random_bool(0.6) => n,
                        _ if genre == Genre::Encyclopedic => topic_names.choose(&mut rng).unwrap(),
                        _ => NAMES.choose(&mut rng).unwrap(),
                    };
                    last_name = Some(name);
                    name
                } else if x < p.function_share + p.pronoun_share + p.name_share + p.foreign_share {
                    let other = rng.random_range(0..NUM_LABELS);
                    &langs.words[pick_content(&mut rng)][other]
                } else if rng.random_bool(p.repeat_topic) {
                    &langs.words[topic_word][lang]
                } else {
                    &langs.words[pick_content(&mut rng)][lang]
                };
                if w > 0 {
                    raw.push(' ');
                }
                if w == 0 {
                    let mut cs = token.chars();
                    if let Some(c) = cs.next() {
                        raw.extend(c.to_uppercase());
                        raw.push_str(cs.as_str());
                    }
                } else {
                    raw.push_str(token);
                }
                if w + 1 < words && rng.random_bool(0.05) {
                    raw.push(',');
                }
            }
            raw.push(if rng.random_bool(p.question_share) { '?' } else { '.' });
            if let Some(s) = Sentence::from_raw(label, &raw) {
                out.push(s);
            }
        }
        pools.insert(label, out);
    }
    pools
}

/// Balanced dataset in label order.
pub fn synth_dataset(per_label: usize, genre: Genre, seed: u64) -> Dataset {
    let pools = synth_pools(per_label, genre, seed);
    Dataset::new(pools.into_values().flatten().collect(), seed)
}

/// Strings over `{c, d}` of length `len` with `ab` inserted (label dk) or
/// `ba` inserted (label sv) at a random position. Both classes contain the
/// same characters, so only adjacency separates them.
pub fn adjacency_dataset(per_label: usize, len: usize, seed: u64) -> Dataset {
    let mut rng = rng::seeded(seed);
    let mut out = Vec::with_capacity(2 * per_label);
    for (label, marker) in [(Label::Dk, "ab"), (Label::Sv, "ba")] {
        for _ in 0..per_label {
            let mut s: String = (0..len).map(|_| if rng.random_bool(0.5) { 'c' } else { 'd' }).collect();
            s.insert_str(rng.random_range(0..=len), marker);
            out.push(Sentence::from_clean(label, &s).expect("alphabet is accepted"));
        }
    }
    Dataset::new(out, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CHARSET;

    #[test]
    fn balanced_clean_and_deterministic() {
        let d = synth_dataset(20, Genre::Encyclopedic, 7);
        assert_eq!(d.per_class_count(), [20; NUM_LABELS]);
        assert!(d.iter().all(|s| s.text().chars().all(|c| CHARSET.contains(c))));
        assert_eq!(d, synth_dataset(20, Genre::Encyclopedic, 7));
        assert_ne!(d, synth_dataset(20, Genre::Encyclopedic, 8));
    }

    #[test]
    fn conversational_sentences_are_shorter() {
        let mean = |g| {
            let d = synth_dataset(200, g, 3);
            d.iter().map(|s| s.length()).sum::<usize>() as f64 / d.len() as f64
        };
        assert!(mean(Genre::Conversational) < mean(Genre::Encyclopedic));
    }

    #[test]
    fn adjacency_classes_share_characters() {
        let d = adjacency_dataset(10, 12, 5);
        for s in &d {
            let t = s.text();
            assert_eq!(t.len(), 14);
            assert_eq!(t.matches('a').count(), 1);
            assert_eq!(t.matches('b').count(), 1);
            assert_eq!(t.contains("ab"), s.label() == Label::Dk);
        }
    }
}
