//! Count corpora and the probability models derived from them: a
//! unigram word model, a bigram model for consecutive-word
//! probabilities, and a first-order character transition model over
//! a-z.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

use crate::scalar::Real;

pub const ALPHABET: usize = 26;

/// Default cap on the number of unigram records read from a
/// frequency-sorted corpus file.
pub const DEFAULT_UNIGRAM_CAP: usize = 333_333;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("i/o error reading corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot build a character model from an empty word model")]
    EmptyModel,
    #[error("character model row for {0:?} does not sum to one (sum {1})")]
    InvalidDistribution(char, f64),
}

fn parse_err(line: usize, reason: impl Into<String>) -> CorpusError {
    CorpusError::Parse {
        line,
        reason: reason.into(),
    }
}

fn check_token(tok: &str, line: usize) -> Result<(), CorpusError> {
    if tok.is_empty() {
        return Err(parse_err(line, "empty word"));
    }
    if !tok
        .bytes()
        .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
    {
        return Err(parse_err(
            line,
            format!("word {tok:?} is not lowercase alphanumeric"),
        ));
    }
    Ok(())
}

fn parse_count(field: &str, line: usize) -> Result<u64, CorpusError> {
    let count: u64 = field
        .parse()
        .map_err(|_| parse_err(line, format!("count {field:?} is not a positive integer")))?;
    if count == 0 {
        return Err(parse_err(line, "count must be positive"));
    }
    Ok(count)
}

/// Unigram counts. `total` is always the sum of the stored counts.
#[derive(Debug, Clone, Default)]
pub struct WordModel {
    counts: HashMap<String, u64>,
    total: u64,
}

impl WordModel {
    /// Load `word<TAB>count` records. Duplicate words sum their counts.
    pub fn load<R: BufRead>(reader: R) -> Result<Self, CorpusError> {
        Self::load_capped(reader, None)
    }

    /// Load at most `cap` records from a frequency-sorted corpus file.
    pub fn load_capped<R: BufRead>(reader: R, cap: Option<usize>) -> Result<Self, CorpusError> {
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut total: u64 = 0;
        let mut read = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            if cap.is_some_and(|c| read >= c) {
                break;
            }
            let line_no = idx + 1;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (word, count_field) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(line_no, "expected word<TAB>count"))?;
            check_token(word, line_no)?;
            let count = parse_count(count_field, line_no)?;
            *counts.entry(word.to_string()).or_insert(0) += count;
            total += count;
            read += 1;
        }
        Ok(WordModel { counts, total })
    }

    pub fn from_counts<I: IntoIterator<Item = (String, u64)>>(items: I) -> Self {
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut total = 0;
        for (w, c) in items {
            *counts.entry(w).or_insert(0) += c;
            total += c;
        }
        WordModel { counts, total }
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, c)| (w.as_str(), *c))
    }
}

/// Bigram counts keyed by the left word. Zero-count pairs are absent.
#[derive(Debug, Clone, Default)]
pub struct BigramModel {
    counts: HashMap<String, HashMap<String, u64>>,
    pair_count: usize,
}

impl BigramModel {
    /// Load `word1 word2<TAB>count` records (single space between the
    /// two tokens).
    pub fn load<R: BufRead>(reader: R) -> Result<Self, CorpusError> {
        let mut model = BigramModel::default();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (pair, count_field) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(line_no, "expected token1 token2<TAB>count"))?;
            let (w1, w2) = pair
                .split_once(' ')
                .ok_or_else(|| parse_err(line_no, "expected two space-separated tokens"))?;
            check_token(w1, line_no)?;
            check_token(w2, line_no)?;
            let count = parse_count(count_field, line_no)?;
            model.insert(w1.to_string(), w2.to_string(), count);
        }
        Ok(model)
    }

    pub fn from_pairs<I: IntoIterator<Item = ((String, String), u64)>>(items: I) -> Self {
        let mut model = BigramModel::default();
        for ((w1, w2), c) in items {
            if c > 0 {
                model.insert(w1, w2, c);
            }
        }
        model
    }

    fn insert(&mut self, w1: String, w2: String, count: u64) {
        let inner = self.counts.entry(w1).or_default();
        let slot = inner.entry(w2).or_insert(0);
        if *slot == 0 {
            self.pair_count += 1;
        }
        *slot += count;
    }

    pub fn count(&self, w1: &str, w2: &str) -> Option<u64> {
        self.counts.get(w1).and_then(|inner| inner.get(w2)).copied()
    }

    pub fn pair_count(&self) -> usize {
        self.pair_count
    }
}

/// The word to the left of the one being scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prev<'a> {
    /// Sentence start: the token is the first in its string.
    Start,
    Word(&'a str),
}

/// Conditional log-probability of `word` given its predecessor.
///
/// Uses the bigram ratio count(prev, word)/count(prev) when both are
/// known, the unigram probability otherwise, and a length-dependent
/// penalty log(10 / (total * 10^len)) for words outside the corpus.
pub fn word_logprob<T: Real>(word: &str, prev: Prev<'_>, wm: &WordModel, bm: &BigramModel) -> T {
    debug_assert!(!word.is_empty());
    if let Prev::Word(p) = prev {
        if let (Some(pair), Some(prev_count)) = (bm.count(p, word), wm.count(p)) {
            return T::from_count(pair).ln() - T::from_count(prev_count).ln();
        }
    }
    match wm.count(word) {
        Some(c) => T::from_count(c).ln() - T::from_count(wm.total()).ln(),
        None => unknown_word_logprob(word.chars().count(), wm.total()),
    }
}

/// log(10 / (total * 10^len)), evaluated in log space so long words do
/// not overflow the count type.
pub fn unknown_word_logprob<T: Real>(len: usize, total: u64) -> T {
    let len = T::from_usize(len).expect("length fits scalar");
    T::ln_10() - T::from_count(total.max(1)).ln() - len * T::ln_10()
}

/// First-order character model over a-z: a start distribution and a
/// 26x26 transition table, both stored as log-probabilities.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CharMarkovModel<T> {
    first_char_logprob: [T; ALPHABET],
    transition_logprob: [[T; ALPHABET]; ALPHABET],
}

/// How corpus words are turned into character-transition counts.
#[derive(Debug, Clone, Copy)]
pub struct MarkovOptions<T> {
    /// Add-alpha smoothing pseudo-count; must be positive.
    pub alpha: T,
    /// Weight each word's transitions by its corpus count (default);
    /// when false every word contributes once.
    pub weight_by_count: bool,
}

impl<T: Real> Default for MarkovOptions<T> {
    fn default() -> Self {
        MarkovOptions {
            alpha: T::one(),
            weight_by_count: true,
        }
    }
}

fn letter_index(c: char) -> Option<usize> {
    if c.is_ascii_lowercase() {
        Some(c as usize - 'a' as usize)
    } else {
        None
    }
}

impl<T: Real> CharMarkovModel<T> {
    /// Accumulate first-letter and adjacent-letter-pair counts over the
    /// word model (non-letter characters are skipped, so `a1b`
    /// contributes the pair (a, b)), apply add-alpha smoothing over the
    /// 26-letter alphabet, and normalize.
    pub fn build(model: &WordModel, opts: MarkovOptions<T>) -> Result<Self, CorpusError> {
        if model.is_empty() {
            return Err(CorpusError::EmptyModel);
        }
        assert!(opts.alpha > T::zero(), "smoothing alpha must be positive");
        let mut first = [T::zero(); ALPHABET];
        let mut trans = [[T::zero(); ALPHABET]; ALPHABET];
        for (word, count) in model.words() {
            let weight = if opts.weight_by_count {
                T::from_count(count)
            } else {
                T::one()
            };
            let mut prev: Option<usize> = None;
            for c in word.chars() {
                let Some(idx) = letter_index(c) else { continue };
                match prev {
                    None => first[idx] = first[idx] + weight,
                    Some(p) => trans[p][idx] = trans[p][idx] + weight,
                }
                prev = Some(idx);
            }
        }
        let normalize = |row: &mut [T; ALPHABET]| {
            let total = row.iter().fold(T::zero(), |acc, v| acc + *v)
                + opts.alpha * T::from_usize(ALPHABET).unwrap();
            for v in row.iter_mut() {
                *v = ((*v + opts.alpha) / total).ln();
            }
        };
        normalize(&mut first);
        for row in trans.iter_mut() {
            normalize(row);
        }
        let built = CharMarkovModel {
            first_char_logprob: first,
            transition_logprob: trans,
        };
        built.validate()?;
        Ok(built)
    }

    /// Check that every row exponentiates to a distribution summing to
    /// one within 1e-9 and that all entries are finite and non-positive.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let check_row = |label: char, row: &[T; ALPHABET]| -> Result<(), CorpusError> {
            let mut sum = 0f64;
            for v in row {
                if !v.is_finite() || *v > T::zero() {
                    return Err(CorpusError::InvalidDistribution(
                        label,
                        v.to_f64().unwrap_or(f64::NAN),
                    ));
                }
                sum += v.exp().to_f64().unwrap();
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(CorpusError::InvalidDistribution(label, sum));
            }
            Ok(())
        };
        check_row('^', &self.first_char_logprob)?;
        for (i, row) in self.transition_logprob.iter().enumerate() {
            check_row((b'a' + i as u8) as char, row)?;
        }
        Ok(())
    }

    pub fn first_char_logprob(&self, c: char) -> Option<T> {
        letter_index(c).map(|i| self.first_char_logprob[i])
    }

    pub fn transition_logprob(&self, from: char, to: char) -> Option<T> {
        match (letter_index(from), letter_index(to)) {
            (Some(i), Some(j)) => Some(self.transition_logprob[i][j]),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Cursor;

    fn wm(text: &str) -> WordModel {
        WordModel::load(Cursor::new(text.to_string())).unwrap()
    }

    #[test]
    fn loads_published_count_format() {
        let model = wm("the\t23135851162");
        assert_eq!(model.count("the"), Some(23_135_851_162));
        assert_eq!(model.total(), 23_135_851_162);
        assert_eq!(model.vocab_size(), 1);
    }

    #[test]
    fn duplicate_words_merge() {
        let model = wm("a\t2\na\t3");
        assert_eq!(model.count("a"), Some(5));
        assert_eq!(model.total(), 5);
    }

    #[test]
    fn rejects_bad_counts_and_words() {
        assert!(WordModel::load(Cursor::new("x\t-1")).is_err());
        assert!(WordModel::load(Cursor::new("x\t0")).is_err());
        assert!(WordModel::load(Cursor::new("\t3")).is_err());
        assert!(WordModel::load(Cursor::new("no tab 3")).is_err());
        let err = WordModel::load(Cursor::new("ok\t1\nBad\t2")).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn cap_limits_records() {
        let model = WordModel::load_capped(Cursor::new("a\t5\nb\t4\nc\t3"), Some(2)).unwrap();
        assert_eq!(model.vocab_size(), 2);
        assert!(model.contains("a") && model.contains("b"));
        assert!(!model.contains("c"));
    }

    #[test]
    fn bigram_load_and_lookup() {
        let model = BigramModel::load(Cursor::new("of the\t2766332391\nto be\t100")).unwrap();
        assert_eq!(model.count("of", "the"), Some(2_766_332_391));
        assert_eq!(model.count("the", "of"), None);
        assert_eq!(model.pair_count(), 2);
        assert!(BigramModel::load(Cursor::new("oftthe\t3")).is_err());
    }

    #[test]
    fn markov_degenerate_single_word() {
        let model = wm("ab\t1");
        let cm: CharMarkovModel<f64> = CharMarkovModel::build(
            &model,
            MarkovOptions {
                alpha: 1e-12,
                weight_by_count: true,
            },
        )
        .unwrap();
        assert_relative_eq!(cm.first_char_logprob('a').unwrap(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(cm.transition_logprob('a', 'b').unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn markov_symmetric_two_words() {
        let model = wm("ab\t1\nba\t1");
        let cm: CharMarkovModel<f64> = CharMarkovModel::build(
            &model,
            MarkovOptions {
                alpha: 1e-12,
                weight_by_count: true,
            },
        )
        .unwrap();
        let half = (0.5f64).ln();
        assert_relative_eq!(cm.first_char_logprob('a').unwrap(), half, epsilon = 1e-9);
        assert_relative_eq!(cm.first_char_logprob('b').unwrap(), half, epsilon = 1e-9);
    }

    #[test]
    fn markov_weighted_transitions() {
        let model = wm("aa\t3\nab\t1");
        let cm: CharMarkovModel<f64> = CharMarkovModel::build(
            &model,
            MarkovOptions {
                alpha: 1e-12,
                weight_by_count: true,
            },
        )
        .unwrap();
        assert_relative_eq!(
            cm.transition_logprob('a', 'a').unwrap(),
            (0.75f64).ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn markov_unweighted_option() {
        let model = wm("aa\t3\nab\t1");
        let cm: CharMarkovModel<f64> = CharMarkovModel::build(
            &model,
            MarkovOptions {
                alpha: 1e-12,
                weight_by_count: false,
            },
        )
        .unwrap();
        assert_relative_eq!(
            cm.transition_logprob('a', 'a').unwrap(),
            (0.5f64).ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn markov_skips_non_letters() {
        // "a1b" compresses to "ab": one first-char 'a', one (a, b) pair
        let model = wm("a1b\t1");
        let cm: CharMarkovModel<f64> = CharMarkovModel::build(
            &model,
            MarkovOptions {
                alpha: 1e-12,
                weight_by_count: true,
            },
        )
        .unwrap();
        assert_relative_eq!(cm.transition_logprob('a', 'b').unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn markov_rejects_empty_model() {
        let model = WordModel::default();
        assert!(matches!(
            CharMarkovModel::<f64>::build(&model, MarkovOptions::default()),
            Err(CorpusError::EmptyModel)
        ));
    }

    #[test]
    fn word_logprob_paths() {
        let model = wm("the\t900\nof\t100");
        let bi = BigramModel::load(Cursor::new("of the\t60")).unwrap();
        // unigram fallback: prev unknown
        let lp: f64 = word_logprob("the", Prev::Word("zzz"), &model, &bi);
        assert_relative_eq!(lp, (900f64 / 1000f64).ln(), epsilon = 1e-12);
        // bigram path
        let lp: f64 = word_logprob("the", Prev::Word("of"), &model, &bi);
        assert_relative_eq!(lp, (60f64 / 100f64).ln(), epsilon = 1e-12);
        // sentence start ignores bigrams
        let lp: f64 = word_logprob("the", Prev::Start, &model, &bi);
        assert_relative_eq!(lp, (900f64 / 1000f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn unknown_word_penalty_formula() {
        let model = wm("the\t900\nof\t100");
        let bi = BigramModel::default();
        let lp: f64 = word_logprob("wxyz", Prev::Start, &model, &bi);
        // direct arithmetic oracle for log(10 / (N * 10^4))
        let expected = (10.0f64 / (1000.0 * 1e4)).ln();
        assert_relative_eq!(lp, expected, epsilon = 1e-9);
    }

    #[test]
    fn unknown_penalty_strictly_decreasing_in_length() {
        let mut last = f64::INFINITY;
        for len in 1..=40 {
            let lp: f64 = unknown_word_logprob(len, 1_000_000);
            assert!(lp < last, "penalty not decreasing at length {len}");
            last = lp;
        }
    }
}
