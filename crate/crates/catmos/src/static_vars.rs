//! Reversible substitution of recurring query phrases by single reserved
//! characters, applied to query text before compression.
//!
//! Query text is printable ASCII, so bytes 0x80-0xFF are free to act as
//! tokens. Candidate phrases are word n-grams of the corpus plus the
//! grammar keywords; candidates are ranked once on the original corpus by
//! savings score (occurrences x (length - 1)) with a longest-first
//! tie-break. Substitution applies the longest phrases first, left to
//! right, non-overlapping, which keeps the mapping unambiguous even when
//! one selected phrase contains another.

use std::collections::HashMap;

use thiserror::Error;

use crate::query_model::{QueryError, QueryText};

/// First reserved token byte; entries use 0x80, 0x81, ... in rank order.
pub const TOKEN_BASE: u8 = 0x80;

/// Largest dictionary: one entry per reserved byte.
pub const MAX_ENTRIES: usize = 128;

/// Grammar keywords that are always scored as candidates.
pub const GRAMMAR_KEYWORDS: [&str; 5] = [
    "SELECT",
    "FROM sensors WHERE",
    "SAMPLE PERIOD",
    "FOR",
    "EPOCHS",
];

#[derive(Debug, Error, PartialEq)]
pub enum StaticVarError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("max_entries {0} exceeds the {MAX_ENTRIES} reserved tokens")]
    TooManyEntries(usize),
    #[error("reserved byte {0:#04x} appears in input text")]
    ReservedByteInInput(u8),
    #[error("token {0:#04x} is not in the dictionary")]
    UnknownToken(u8),
    #[error("malformed dictionary line {0}")]
    MalformedLine(usize),
    #[error("restored text is not valid query text: {0}")]
    BadRestoredText(#[from] QueryError),
}

/// Ordered phrase-to-token mapping. Entry order is rank order; tokens are
/// assigned sequentially from [`TOKEN_BASE`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StaticVarDictionary {
    entries: Vec<(String, u8)>,
}

impl StaticVarDictionary {
    pub fn empty() -> Self {
        StaticVarDictionary::default()
    }

    pub fn entries(&self) -> &[(String, u8)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_phrase(&self, phrase: &str) -> bool {
        self.entries.iter().any(|(p, _)| p == phrase)
    }

    fn phrase_of(&self, token: u8) -> Option<&str> {
        self.entries
            .iter()
            .find(|&&(_, t)| t == token)
            .map(|(p, _)| p.as_str())
    }

    /// Entries ordered for substitution: longest phrase first, rank breaking
    /// ties.
    fn substitution_order(&self) -> Vec<&(String, u8)> {
        let mut order: Vec<&(String, u8)> = self.entries.iter().collect();
        order.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
        order
    }

    /// One `token_hex<TAB>phrase` line per entry.
    pub fn serialized(&self) -> String {
        let mut out = String::new();
        for (phrase, token) in &self.entries {
            out.push_str(&format!("{token:02x}\t{phrase}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, StaticVarError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (hex, phrase) = line
                .split_once('\t')
                .ok_or(StaticVarError::MalformedLine(i + 1))?;
            let token =
                u8::from_str_radix(hex, 16).map_err(|_| StaticVarError::MalformedLine(i + 1))?;
            if token < TOKEN_BASE
                || phrase.len() < 2
                || !phrase.bytes().all(|b| b < TOKEN_BASE)
                || entries.iter().any(|&(_, t): &(String, u8)| t == token)
            {
                return Err(StaticVarError::MalformedLine(i + 1));
            }
            entries.push((phrase.to_string(), token));
        }
        Ok(StaticVarDictionary { entries })
    }

    /// Serialized size, which is what dictionary installation transmits.
    pub fn serialized_bytes(&self) -> usize {
        self.serialized().len()
    }
}

/// Word n-grams (space-joined runs of words) of at least two characters.
fn word_ngrams<'a>(text: &'a str, out: &mut HashMap<&'a str, u64>) {
    let bytes = text.as_bytes();
    let mut starts = Vec::new();
    let mut in_word = false;
    for (i, &b) in bytes.iter().enumerate() {
        if b != b' ' && !in_word {
            starts.push(i);
        }
        in_word = b != b' ';
    }
    for (wi, &start) in starts.iter().enumerate() {
        for &next in &starts[wi..] {
            let end = match bytes[next..].iter().position(|&b| b == b' ') {
                Some(off) => next + off,
                None => bytes.len(),
            };
            let phrase = &text[start..end];
            if phrase.len() >= 2 {
                *out.entry(phrase).or_insert(0) += 1;
            }
        }
    }
}

/// Picks up to `max_entries` phrases from the corpus, ranked by savings
/// score with longest-first tie-break. Grammar keywords always compete.
pub fn build_dictionary(
    corpus: &[QueryText],
    max_entries: usize,
) -> Result<StaticVarDictionary, StaticVarError> {
    if corpus.is_empty() {
        return Err(StaticVarError::EmptyCorpus);
    }
    if max_entries > MAX_ENTRIES {
        return Err(StaticVarError::TooManyEntries(max_entries));
    }
    if max_entries == 0 {
        return Ok(StaticVarDictionary::empty());
    }

    let mut counts: HashMap<&str, u64> = HashMap::new();
    for text in corpus {
        word_ngrams(text.as_str(), &mut counts);
    }
    for keyword in GRAMMAR_KEYWORDS {
        counts.entry(keyword).or_insert(0);
    }

    let mut scored: Vec<(&str, u64)> = counts
        .into_iter()
        .map(|(phrase, occurrences)| (phrase, occurrences * (phrase.len() as u64 - 1)))
        .filter(|&(_, score)| score > 0)
        .collect();
    scored.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(b.0.len().cmp(&a.0.len()))
            .then(a.0.cmp(b.0))
    });

    // Keywords hold reserved seats so a corpus rich in one-off phrases
    // cannot crowd them out.
    let mut selected: Vec<(&str, u64)> = Vec::with_capacity(max_entries);
    for &(phrase, score) in &scored {
        if selected.len() < max_entries && GRAMMAR_KEYWORDS.contains(&phrase) {
            selected.push((phrase, score));
        }
    }
    for &(phrase, score) in &scored {
        if selected.len() == max_entries {
            break;
        }
        if !GRAMMAR_KEYWORDS.contains(&phrase) {
            selected.push((phrase, score));
        }
    }
    selected.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(b.0.len().cmp(&a.0.len()))
            .then(a.0.cmp(b.0))
    });

    let entries = selected
        .into_iter()
        .enumerate()
        .map(|(rank, (phrase, _))| (phrase.to_string(), TOKEN_BASE + rank as u8))
        .collect();
    Ok(StaticVarDictionary { entries })
}

/// Replaces every phrase occurrence with its token, longest phrase first,
/// left to right, non-overlapping.
pub fn substitute(text: &QueryText, dict: &StaticVarDictionary) -> Vec<u8> {
    let mut data = text.as_bytes().to_vec();
    for (phrase, token) in dict.substitution_order() {
        data = replace_all(&data, phrase.as_bytes(), *token);
    }
    data
}

fn replace_all(data: &[u8], phrase: &[u8], token: u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len());
    let mut i = 0;
    while i < data.len() {
        if data[i..].starts_with(phrase) {
            out.push(token);
            i += phrase.len();
        } else {
            out.push(data[i]);
            i += 1;
        }
    }
    out
}

/// Expands every token back to its phrase, recovering the exact original
/// text.
pub fn restore(data: &[u8], dict: &StaticVarDictionary) -> Result<QueryText, StaticVarError> {
    let mut out = String::with_capacity(data.len() * 2);
    for &b in data {
        if b < TOKEN_BASE {
            out.push(b as char);
        } else {
            let phrase = dict
                .phrase_of(b)
                .ok_or(StaticVarError::UnknownToken(b))?;
            out.push_str(phrase);
        }
    }
    Ok(QueryText::new(out)?)
}
