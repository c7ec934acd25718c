//! Most-likely word segmentation of domain-name cores.
//!
//! The search maximizes the sum of conditional token log-probabilities
//! (each token conditioned on its predecessor, sentence start for the
//! first). The dynamic program's state is the span of the last token,
//! so the table is O(len * max_token_len) and scoring stays exact under
//! the bigram model.

use std::cmp::Ordering;

use thiserror::Error;

use crate::corpus::{word_logprob, BigramModel, Prev, WordModel};
use crate::scalar::Real;

pub const DEFAULT_MAX_TOKEN_LEN: usize = 20;

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("cannot segment an empty string")]
    Empty,
    #[error("segmentation input {0:?} contains non-alphanumeric characters")]
    NonAlphanumeric(String),
    #[error("core {0:?} contains characters other than alphanumerics and hyphens")]
    InvalidCore(String),
}

/// A segmentation of one string: the ordered tokens and their total
/// conditional log-probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation<T> {
    pub tokens: Vec<String>,
    pub logprob: T,
}

/// Best segmentation of some prefix s[..end] whose last token spans
/// s[start..end]; `parent_start` is the start of the token before that
/// (`usize::MAX` for sentence start).
#[derive(Clone, Copy)]
struct StateValue<T> {
    score: T,
    token_count: u32,
    parent_start: usize,
}

struct Table<T> {
    // states[end][end - start - 1], capped at max token length
    states: Vec<Vec<Option<StateValue<T>>>>,
}

impl<T: Real> Table<T> {
    fn get(&self, start: usize, end: usize) -> Option<StateValue<T>> {
        self.states[end][end - start - 1]
    }

    /// Token spans of the stored segmentation ending at state
    /// (start, end), in order.
    fn chain(&self, mut start: usize, mut end: usize) -> Vec<(usize, usize)> {
        let mut bounds = Vec::new();
        loop {
            bounds.push((start, end));
            let state = self.get(start, end).expect("chained state exists");
            if state.parent_start == usize::MAX {
                break;
            }
            end = start;
            start = state.parent_start;
        }
        bounds.reverse();
        bounds
    }

    /// Lexicographic order of the token sequences stored at two states.
    fn seq_cmp(&self, s: &str, a: (usize, usize), b: (usize, usize)) -> Ordering {
        let seq_a = self.chain(a.0, a.1);
        let seq_b = self.chain(b.0, b.1);
        let tok = |&(lo, hi): &(usize, usize)| &s[lo..hi];
        seq_a.iter().map(tok).cmp(seq_b.iter().map(tok))
    }
}

/// Higher score wins, then fewer tokens; `Equal` means the caller must
/// break the tie on the token sequences themselves.
fn score_cmp<T: Real>(a: &StateValue<T>, b: &StateValue<T>) -> Ordering {
    match a.score.partial_cmp(&b.score).expect("NaN score") {
        Ordering::Equal => b.token_count.cmp(&a.token_count),
        ord => ord,
    }
}

/// Segment a hyphen-free lowercase alphanumeric string into its most
/// likely token sequence.
///
/// Deterministic tie-break: equal log-probabilities prefer fewer
/// tokens, then the lexicographically earliest token sequence.
pub fn segment<T: Real>(
    s: &str,
    wm: &WordModel,
    bm: &BigramModel,
    max_token_len: usize,
) -> Result<Segmentation<T>, SegmentError> {
    if s.is_empty() {
        return Err(SegmentError::Empty);
    }
    if !s.bytes().all(|b| b.is_ascii_alphanumeric()) {
        return Err(SegmentError::NonAlphanumeric(s.to_string()));
    }
    let n = s.len();
    let cap = max_token_len.max(1);
    let mut table = Table {
        states: (0..=n).map(|end| vec![None; end.min(cap)]).collect(),
    };

    for end in 1..=n {
        for start in end.saturating_sub(cap)..end {
            let token = &s[start..end];
            let value = if start == 0 {
                Some(StateValue {
                    score: word_logprob(token, Prev::Start, wm, bm),
                    token_count: 1,
                    parent_start: usize::MAX,
                })
            } else {
                let mut chosen: Option<StateValue<T>> = None;
                for prev_start in start.saturating_sub(cap)..start {
                    let Some(prev) = table.get(prev_start, start) else {
                        continue;
                    };
                    let step: T = word_logprob(token, Prev::Word(&s[prev_start..start]), wm, bm);
                    let cand = StateValue {
                        score: prev.score + step,
                        token_count: prev.token_count + 1,
                        parent_start: prev_start,
                    };
                    let wins = match &chosen {
                        None => true,
                        Some(inc) => match score_cmp(&cand, inc) {
                            Ordering::Greater => true,
                            Ordering::Less => false,
                            // same count and same last token, so the
                            // prefix sequences decide
                            Ordering::Equal => {
                                table.seq_cmp(
                                    s,
                                    (cand.parent_start, start),
                                    (inc.parent_start, start),
                                ) == Ordering::Less
                            }
                        },
                    };
                    if wins {
                        chosen = Some(cand);
                    }
                }
                chosen
            };
            table.states[end][end - start - 1] = value;
        }
    }

    let mut final_state: Option<(usize, StateValue<T>)> = None;
    for start in n.saturating_sub(cap)..n {
        let Some(value) = table.get(start, n) else { continue };
        let wins = match &final_state {
            None => true,
            Some((inc_start, inc)) => match score_cmp(&value, inc) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    table.seq_cmp(s, (start, n), (*inc_start, n)) == Ordering::Less
                }
            },
        };
        if wins {
            final_state = Some((start, value));
        }
    }

    let (start, value) = final_state.expect("non-empty input always segments");
    let tokens = table
        .chain(start, n)
        .into_iter()
        .map(|(lo, hi)| s[lo..hi].to_string())
        .collect();
    Ok(Segmentation {
        tokens,
        logprob: value.score,
    })
}

/// Split a domain core on hyphens and segment each non-empty piece
/// independently, concatenating the token lists. A core of only
/// hyphens yields an empty token list.
pub fn segment_core<T: Real>(
    core: &str,
    wm: &WordModel,
    bm: &BigramModel,
    max_token_len: usize,
) -> Result<Vec<String>, SegmentError> {
    if !core.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-') {
        return Err(SegmentError::InvalidCore(core.to_string()));
    }
    let mut tokens = Vec::new();
    for piece in core.split('-').filter(|p| !p.is_empty()) {
        tokens.extend(segment::<T>(piece, wm, bm, max_token_len)?.tokens);
    }
    Ok(tokens)
}
