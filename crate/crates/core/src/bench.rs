//! Labelled benchmark documents, the two binary tasks built from them, and
//! the classification metrics used to score a threshold classifier.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::floor;

/// Annotation classes kept after loading. `unk` rows never become a `Label`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Natural text.
    Ok,
    /// Repetitive boilerplate.
    Rep,
    /// Boilerplate or noise that is not necessarily repetitive.
    Boil,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ok => "OK",
            Label::Rep => "REP",
            Label::Boil => "BOIL",
        }
    }

    /// Case-insensitive. `Ok(None)` means the row is labelled `unk` and is to be discarded.
    pub fn parse(s: &str) -> Result<Option<Label>> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ok" => Ok(Some(Label::Ok)),
            "rep" => Ok(Some(Label::Rep)),
            "boil" => Ok(Some(Label::Boil)),
            "unk" => Ok(None),
            _ => Err(Error::InvalidArgument("unknown label (expected OK, REP, BOIL or unk)")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Tune,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Tune => "tune",
            Split::Test => "test",
        }
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tune" | "dev" | "validation" => Ok(Split::Tune),
            "test" => Ok(Split::Test),
            _ => Err(Error::InvalidArgument("unknown split (expected tune or test)")),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One benchmark record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDocument {
    pub id: String,
    pub text: String,
    pub label: Label,
    pub split: Split,
    pub language: Option<String>,
}

/// Seeded 50/50 tune/test assignment for data without a split column.
pub fn seeded_splits(len: usize, seed: u64) -> Vec<Split> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = alloc::vec![Split::Test; len];
    for &i in &order[..len / 2] {
        out[i] = Split::Tune;
    }
    out
}

/// The two binary problems. OK is always the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    /// OK vs REP; BOIL documents are excluded.
    Repeat,
    /// OK vs REP and BOIL.
    Noisy,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Repeat => "bread-repeat",
            TaskKind::Noisy => "bread-noisy",
        }
    }

    /// Gold class of a label: `Some(true)` clean, `Some(false)` noisy, `None` excluded.
    pub fn gold(self, label: Label) -> Option<bool> {
        match (self, label) {
            (_, Label::Ok) => Some(true),
            (_, Label::Rep) => Some(false),
            (TaskKind::Noisy, Label::Boil) => Some(false),
            (TaskKind::Repeat, Label::Boil) => None,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bread-repeat" | "repeat" => Ok(TaskKind::Repeat),
            "bread-noisy" | "noisy" => Ok(TaskKind::Noisy),
            _ => Err(Error::InvalidArgument("unknown task (expected bread-repeat or bread-noisy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskExample {
    pub id: String,
    pub text: String,
    pub split: Split,
    /// Gold label: true for the positive (clean) class.
    pub clean: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTask {
    pub kind: TaskKind,
    pub examples: Vec<TaskExample>,
}

/// Builds a task from loaded documents; both classes must be present.
pub fn make_task(docs: &[LabeledDocument], kind: TaskKind) -> Result<BinaryTask> {
    let examples: Vec<TaskExample> = docs
        .iter()
        .filter_map(|d| {
            kind.gold(d.label).map(|clean| TaskExample {
                id: d.id.clone(),
                text: d.text.clone(),
                split: d.split,
                clean,
            })
        })
        .collect();
    let task = BinaryTask { kind, examples };
    if task.positives() == 0 {
        return Err(Error::EmptyPositiveClass);
    }
    if task.negatives() == 0 {
        return Err(Error::EmptyNegativeClass);
    }
    Ok(task)
}

impl BinaryTask {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.examples.iter().filter(|e| e.clean).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    /// Examples of one split (classes may be empty).
    pub fn split(&self, split: Split) -> BinaryTask {
        BinaryTask {
            kind: self.kind,
            examples: self.examples.iter().filter(|e| e.split == split).cloned().collect(),
        }
    }

    pub fn gold(&self) -> Vec<bool> {
        self.examples.iter().map(|e| e.clean).collect()
    }
}

/// Confusion matrix with OK (clean) as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl Confusion {
    /// `gold[i]` and `predicted[i]` are true for the clean class.
    pub fn from_decisions(gold: &[bool], predicted: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&g, &p) in gold.iter().zip(predicted) {
            c.add(g, p);
        }
        c
    }

    pub fn add(&mut self, gold_clean: bool, predicted_clean: bool) {
        match (gold_clean, predicted_clean) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn weighted(&self) -> WeightedConfusion {
        WeightedConfusion {
            tp: self.tp as f64,
            fp: self.fp as f64,
            tn: self.tn as f64,
            fn_: self.fn_ as f64,
        }
    }
}

/// Confusion matrix with real-valued (possibly reweighted) cell masses.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeightedConfusion {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    pub fn_: f64,
}

impl WeightedConfusion {
    /// Harmonic mean of precision and recall, `2tp / (2tp + fp + fn)`; 0 when `tp = 0`.
    pub fn f1(&self) -> Result<f64> {
        if self.tp + self.fn_ <= 0.0 || (self.tp + self.fn_).is_nan() {
            return Err(Error::NoPositiveGold);
        }
        if self.tp == 0.0 {
            return Ok(0.0);
        }
        Ok(2.0 * self.tp / (2.0 * self.tp + self.fp + self.fn_))
    }

    /// Harmonic mean of precision, recall, specificity and negative predictive
    /// value, `4 tp tn / (4 tp tn + (tp + tn)(fp + fn))`; 0 when `tp = 0` or `tn = 0`.
    pub fn p4(&self) -> f64 {
        if self.tp == 0.0 || self.tn == 0.0 {
            return 0.0;
        }
        let agree = 4.0 * self.tp * self.tn;
        agree / (agree + (self.tp + self.tn) * (self.fp + self.fn_))
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn specificity(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    pub fn npv(&self) -> f64 {
        ratio(self.tn, self.tn + self.fn_)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// F1 of the clean class.
pub fn f1(c: &Confusion) -> Result<f64> {
    c.weighted().f1()
}

/// P4 score; 0 by convention when `tp = 0` or `tn = 0`.
pub fn p4(c: &Confusion) -> f64 {
    c.weighted().p4()
}

/// Rescales the positive (clean) cells so that positives carry
/// `clean_weight` of the total mass. Negative cells are unchanged.
pub fn class_weighted_counts(c: &Confusion, clean_weight: f64) -> Result<WeightedConfusion> {
    if !(clean_weight > 0.0 && clean_weight < 1.0) {
        return Err(Error::DegenerateWeights);
    }
    let pos = (c.tp + c.fn_) as f64;
    let neg = (c.tn + c.fp) as f64;
    if pos == 0.0 || neg == 0.0 {
        return Err(Error::DegenerateWeights);
    }
    let factor = clean_weight / (1.0 - clean_weight) * (neg / pos);
    let mut w = c.weighted();
    w.tp *= factor;
    w.fn_ *= factor;
    Ok(w)
}

/// Percentile bootstrap interval (2.5%, 97.5%) of F1 over document resamples.
///
/// Iteration `i` draws from its own ChaCha stream, so the result depends only
/// on `seed` and could be computed in any order. Resamples without a clean
/// gold document have no F1 and are skipped. The interval is widened to
/// contain the point estimate if needed.
pub fn bootstrap_ci(gold: &[bool], predicted: &[bool], iters: usize, seed: u64) -> Result<(f64, f64)> {
    const MIN_DOCS: usize = 10;
    if gold.len() != predicted.len() {
        return Err(Error::InvalidArgument("gold and predicted lengths differ"));
    }
    if gold.len() < MIN_DOCS {
        return Err(Error::TooFewDocuments { need: MIN_DOCS, got: gold.len() });
    }
    if iters == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one iteration"));
    }
    let point = f1(&Confusion::from_decisions(gold, predicted))?;
    let n = gold.len();
    let mut stats = Vec::with_capacity(iters);
    for i in 0..iters {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut c = Confusion::default();
        for _ in 0..n {
            let j = rng.random_range(0..n);
            c.add(gold[j], predicted[j]);
        }
        if let Ok(v) = f1(&c) {
            stats.push(v);
        }
    }
    if stats.is_empty() {
        return Ok((point, point));
    }
    stats.sort_unstable_by(f64::total_cmp);
    let lo = quantile(&stats, 0.025).min(point);
    let hi = quantile(&stats, 0.975).max(point);
    Ok((lo, hi))
}

/// Linear interpolation between closest ranks of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn doc(label: Label, split: Split) -> LabeledDocument {
        LabeledDocument { id: "x".into(), text: "text".into(), label, split, language: None }
    }

    fn full_release() -> Vec<LabeledDocument> {
        let mut docs = Vec::new();
        for (label, count) in [(Label::Ok, 863), (Label::Rep, 449), (Label::Boil, 499)] {
            docs.extend((0..count).map(|i| doc(label, if i % 2 == 0 { Split::Tune } else { Split::Test })));
        }
        docs
    }

    #[test]
    fn labels() {
        assert_eq!(Label::parse("OK").unwrap(), Some(Label::Ok));
        assert_eq!(Label::parse("boil").unwrap(), Some(Label::Boil));
        assert_eq!(Label::parse("unk").unwrap(), None);
        assert!(Label::parse("spam").is_err());
    }

    #[test]
    fn task_sizes_on_release_counts() {
        let docs = full_release();
        let repeat = make_task(&docs, TaskKind::Repeat).unwrap();
        assert_eq!((repeat.len(), repeat.positives(), repeat.negatives()), (1312, 863, 449));
        let noisy = make_task(&docs, TaskKind::Noisy).unwrap();
        assert_eq!((noisy.len(), noisy.positives(), noisy.negatives()), (1811, 863, 948));
        let halves = noisy.split(Split::Tune).len() + noisy.split(Split::Test).len();
        assert_eq!(halves, noisy.len());
    }

    #[test]
    fn degenerate_tasks() {
        let only_ok = vec![doc(Label::Ok, Split::Tune); 3];
        assert_eq!(make_task(&only_ok, TaskKind::Noisy), Err(Error::EmptyNegativeClass));
        let only_boil = vec![doc(Label::Ok, Split::Tune), doc(Label::Boil, Split::Test)];
        assert_eq!(make_task(&only_boil, TaskKind::Repeat), Err(Error::EmptyNegativeClass));
        let no_ok = vec![doc(Label::Rep, Split::Tune)];
        assert_eq!(make_task(&no_ok, TaskKind::Repeat), Err(Error::EmptyPositiveClass));
    }

    #[test]
    fn f1_examples() {
        let perfect = Confusion { tp: 5, fp: 0, tn: 7, fn_: 0 };
        assert_eq!(f1(&perfect).unwrap(), 1.0);
        let all_clean = Confusion { tp: 863, fp: 449, tn: 0, fn_: 0 };
        let p = 863.0 / 1312.0;
        let expected = 2.0 * p / (p + 1.0);
        assert!((f1(&all_clean).unwrap() - expected).abs() < 1e-15);
        assert!((f1(&all_clean).unwrap() - 0.7936).abs() < 5e-5);
        assert_eq!(f1(&Confusion { tp: 0, fp: 3, tn: 1, fn_: 4 }).unwrap(), 0.0);
        assert_eq!(f1(&Confusion { tp: 0, fp: 3, tn: 1, fn_: 0 }), Err(Error::NoPositiveGold));
    }

    #[test]
    fn p4_examples() {
        assert_eq!(p4(&Confusion { tp: 4, fp: 0, tn: 9, fn_: 0 }), 1.0);
        for k in [1, 7, 100] {
            assert_eq!(p4(&Confusion { tp: k, fp: k, tn: k, fn_: k }), 0.5);
        }
        assert_eq!(p4(&Confusion { tp: 0, fp: 2, tn: 5, fn_: 1 }), 0.0);
        assert_eq!(p4(&Confusion { tp: 3, fp: 2, tn: 0, fn_: 1 }), 0.0);
    }

    #[test]
    fn class_weighting() {
        let balanced = Confusion { tp: 40, fp: 10, tn: 40, fn_: 10 };
        assert_eq!(class_weighted_counts(&balanced, 0.5).unwrap(), balanced.weighted());

        let c = Confusion { tp: 800, fp: 100, tn: 848, fn_: 63 };
        let w = class_weighted_counts(&c, 0.75).unwrap();
        let factor = 0.75 / 0.25 * (948.0 / 863.0);
        assert_eq!(w.tp, 800.0 * factor);
        assert_eq!(w.fn_, 63.0 * factor);
        assert_eq!((w.fp, w.tn), (100.0, 848.0));
        assert!(((w.tp + w.fn_) / (w.tp + w.fn_ + w.fp + w.tn) - 0.75).abs() < 1e-12);

        assert_eq!(class_weighted_counts(&c, 1.0), Err(Error::DegenerateWeights));
        let no_neg = Confusion { tp: 3, fp: 0, tn: 0, fn_: 1 };
        assert_eq!(class_weighted_counts(&no_neg, 0.75), Err(Error::DegenerateWeights));
    }

    #[test]
    fn bootstrap_properties() {
        let gold = vec![true; 20];
        assert_eq!(bootstrap_ci(&gold, &gold, 200, 1).unwrap(), (1.0, 1.0));

        let gold: Vec<bool> = (0..60).map(|i| i % 3 != 0).collect();
        let pred: Vec<bool> = (0..60).map(|i| i % 5 != 0).collect();
        let point = f1(&Confusion::from_decisions(&gold, &pred)).unwrap();
        let (lo, hi) = bootstrap_ci(&gold, &pred, 1000, 42).unwrap();
        assert!(lo <= point && point <= hi && lo < hi);
        assert_eq!(bootstrap_ci(&gold, &pred, 1000, 42).unwrap(), (lo, hi));

        assert_eq!(
            bootstrap_ci(&gold[..5], &pred[..5], 10, 0),
            Err(Error::TooFewDocuments { need: 10, got: 5 })
        );
    }

    #[test]
    fn seeded_split_is_half_and_deterministic() {
        let a = seeded_splits(101, 7);
        assert_eq!(a, seeded_splits(101, 7));
        assert_eq!(a.iter().filter(|s| **s == Split::Tune).count(), 50);
        assert_ne!(a, seeded_splits(101, 8));
        assert_eq!("validation".parse::<Split>().unwrap().to_string(), "tune");
    }
}
