//! Seeded generators for clean-looking prose and several kinds of redundant text.
//!
//! Prose draws pseudo-words from a vocabulary with Zipfian word frequencies,
//! so character ngram statistics look roughly like natural language without
//! shipping a corpus. Noisy generators cover the usual web junk: one line
//! repeated, templated log records and boilerplate listings.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::{Split, TaskExample};

const ONSETS: [&str; 20] = ["b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "br", "st", "tr", "ch"];
const VOWELS: [&str; 8] = ["a", "e", "i", "o", "u", "ai", "ea", "ou"];
const CODAS: [&str; 8] = ["", "", "", "n", "r", "s", "t", "ng"];

/// Share of prose tokens drawn from the document's topic words.
pub const TOPIC_RATE: f64 = 0.05;
const TOPIC_WORDS: usize = 20;

/// Pseudo-words with Zipfian sampling weights.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: Vec<String>,
    cumulative: Vec<f64>,
}

impl Vocabulary {
    /// `size` distinct words; the word at zero-based rank `r` has weight `1 / (r + 2)`.
    pub fn new(size: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        let mut words = Vec::with_capacity(size);
        while words.len() < size.max(1) {
            // frequent words are short, as in real text
            let max_syllables = 2 + (words.len() * 3) / size.max(1);
            let syllables = rng.random_range(1..=max_syllables.min(4));
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
                w.push_str(VOWELS[rng.random_range(0..VOWELS.len())]);
                w.push_str(CODAS[rng.random_range(0..CODAS.len())]);
            }
            if seen.insert(w.clone()) {
                words.push(w);
            }
        }
        let mut total = 0.0;
        let cumulative = (0..words.len())
            .map(|r| {
                total += 1.0 / (r as f64 + 2.0);
                total
            })
            .collect();
        Self { words, cumulative }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &str {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let x = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= x).min(self.words.len() - 1);
        &self.words[i]
    }

    /// One capitalised sentence of 5 to 18 words.
    pub fn sentence<R: Rng + ?Sized>(&self, rng: &mut R) -> String {
        self.topical_sentence(rng, &[])
    }

    /// Like [`Vocabulary::sentence`], but a share of the words come from `topic`.
    fn topical_sentence<R: Rng + ?Sized>(&self, rng: &mut R, topic: &[usize]) -> String {
        let len = rng.random_range(5..=18);
        let mut s = String::new();
        for i in 0..len {
            let w = if !topic.is_empty() && rng.random::<f64>() < TOPIC_RATE {
                &self.words[topic[rng.random_range(0..topic.len())]]
            } else {
                self.sample(rng)
            };
            if i == 0 {
                let mut chars = w.chars();
                if let Some(c) = chars.next() {
                    s.extend(c.to_uppercase());
                    s.push_str(chars.as_str());
                }
            } else {
                s.push(' ');
                s.push_str(w);
                if i + 1 < len && rng.random_range(0..10) == 0 {
                    s.push(',');
                }
            }
        }
        s.push(if rng.random_range(0..8) == 0 { '?' } else { '.' });
        s
    }

    /// Sentences until the text reaches `target_chars` characters.
    ///
    /// Each document has its own handful of topic words that keep coming
    /// back, the way content words recur within real documents.
    pub fn prose<R: Rng + ?Sized>(&self, rng: &mut R, target_chars: usize) -> String {
        let lo = 50.min(self.words.len() - 1);
        let topic: Vec<usize> = (0..TOPIC_WORDS).map(|_| rng.random_range(lo..self.words.len())).collect();
        let mut out = String::new();
        while out.chars().count() < target_chars {
            if !out.is_empty() {
                out.push(if rng.random_range(0..6) == 0 { '\n' } else { ' ' });
            }
            out.push_str(&self.topical_sentence(rng, &topic));
        }
        out
    }
}

/// Kinds of redundant document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisyKind {
    RepeatedLine,
    LogRecords,
    PriceList,
}

impl NoisyKind {
    pub const ALL: [NoisyKind; 3] = [NoisyKind::RepeatedLine, NoisyKind::LogRecords, NoisyKind::PriceList];
}

/// One sentence repeated on separate lines.
pub fn repeated_line<R: Rng + ?Sized>(vocab: &Vocabulary, rng: &mut R, target_chars: usize) -> String {
    let line = vocab.sentence(rng);
    fill_lines(target_chars, |_| line.clone())
}

/// Timestamped station records sharing one template.
pub fn log_records<R: Rng + ?Sized>(vocab: &Vocabulary, rng: &mut R, target_chars: usize) -> String {
    let station = vocab.sample(rng).to_uppercase();
    let day = rng.random_range(1..=20);
    let mut state: (u32, u32, u32) = (rng.random_range(0..24), rng.random_range(0..60), 0);
    fill_lines(target_chars, |i| {
        state.2 = (state.2 + 7) % 60;
        state.1 = (state.1 + 3) % 60;
        let miles = 3.5 + (i % 5) as f64 / 10.0;
        format!(
            "2020-01-{:02} {:02}:{:02}:{:02} {} > {}-13 {:.1} miles 181 deg",
            day + (i / 20) % 5,
            state.0,
            state.1,
            state.2,
            station,
            station,
            miles
        )
    })
}

/// Product listing with a fixed call to action on every line.
pub fn price_list<R: Rng + ?Sized>(vocab: &Vocabulary, rng: &mut R, target_chars: usize) -> String {
    let shop = vocab.sample(rng);
    let items: Vec<String> = (0..4).map(|_| String::from(vocab.sample(rng))).collect();
    fill_lines(target_chars, |i| {
        format!(
            "{} {} - only ${}.99 at {} store, call now for pricing and availability",
            items[i % items.len()],
            10 + i % 3,
            5 + i % 4,
            shop
        )
    })
}

fn fill_lines(target_chars: usize, mut line: impl FnMut(usize) -> String) -> String {
    let mut out = String::new();
    let mut i = 0;
    while out.chars().count() < target_chars {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&line(i));
        i += 1;
    }
    out
}

pub fn noisy_document<R: Rng + ?Sized>(kind: NoisyKind, vocab: &Vocabulary, rng: &mut R, target_chars: usize) -> String {
    match kind {
        NoisyKind::RepeatedLine => repeated_line(vocab, rng, target_chars),
        NoisyKind::LogRecords => log_records(vocab, rng, target_chars),
        NoisyKind::PriceList => price_list(vocab, rng, target_chars),
    }
}

/// Balanced-ish labelled examples: `n_clean` prose documents and `n_noisy`
/// redundant ones cycling through [`NoisyKind::ALL`]. Lengths are uniform in
/// `[min_chars, max_chars]`; every fifth document of each class is a test one.
pub fn synthetic_examples(n_clean: usize, n_noisy: usize, min_chars: usize, max_chars: usize, seed: u64) -> Vec<TaskExample> {
    let vocab = Vocabulary::new(5000, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let split = |i: usize| if i % 5 == 4 { Split::Test } else { Split::Tune };
    let mut out = Vec::with_capacity(n_clean + n_noisy);
    for i in 0..n_clean {
        let len = rng.random_range(min_chars..=max_chars);
        out.push(TaskExample { id: format!("clean-{i}"), text: vocab.prose(&mut rng, len), split: split(i), clean: true });
    }
    for i in 0..n_noisy {
        let len = rng.random_range(min_chars..=max_chars);
        let kind = NoisyKind::ALL[i % NoisyKind::ALL.len()];
        out.push(TaskExample {
            id: format!("noisy-{i}"),
            text: noisy_document(kind, &vocab, &mut rng, len),
            split: split(i),
            clean: false,
        });
    }
    out
}
