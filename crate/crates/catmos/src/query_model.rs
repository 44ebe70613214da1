//! Range-query data model and its canonical text form.
//!
//! The grammar is TinyDB-flavoured and deliberately rigid so query text has
//! a well-defined byte size:
//!
//! ```text
//! SELECT <attr> FROM sensors WHERE <attr> >= <num> AND <attr> <= <num>
//!     SAMPLE PERIOD <int> FOR <int> EPOCHS
//! ```
//!
//! One attribute per query, inclusive bounds, all tokens separated by a
//! single space. The id of a query is base-station bookkeeping and is not
//! part of the wire text.

use std::fmt;
use thiserror::Error;

/// Default lifetime applied when a scenario omits one.
pub const DEFAULT_LIFETIME_EPOCHS: u32 = 100;

#[derive(Debug, Error, PartialEq)]
pub enum QueryError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("invalid range: min {min} exceeds max {max}")]
    InvalidRange { min: f64, max: f64 },
    #[error("bound must be a finite number")]
    NonFiniteBound,
    #[error("sampling period must be a positive integer")]
    InvalidEpoch,
    #[error("lifetime must be a positive integer")]
    InvalidLifetime,
    #[error("query text must be printable ASCII")]
    NonAscii,
}

/// Sensor attribute a query ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attribute {
    Temp,
    Light,
    Humidity,
}

impl Attribute {
    pub fn keyword(self) -> &'static str {
        match self {
            Attribute::Temp => "temp",
            Attribute::Light => "light",
            Attribute::Humidity => "humidity",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "temp" => Some(Attribute::Temp),
            "light" => Some(Attribute::Light),
            "humidity" => Some(Attribute::Humidity),
            _ => None,
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A user range query: one attribute, an inclusive value range, a sampling
/// period in seconds and a lifetime in sampling rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeQuery {
    pub id: u64,
    pub attribute: Attribute,
    pub min_value: f64,
    pub max_value: f64,
    pub epoch_s: u32,
    pub lifetime_epochs: u32,
}

impl RangeQuery {
    pub fn new(
        id: u64,
        attribute: Attribute,
        min_value: f64,
        max_value: f64,
        epoch_s: u32,
        lifetime_epochs: u32,
    ) -> Result<Self, QueryError> {
        if !min_value.is_finite() || !max_value.is_finite() {
            return Err(QueryError::NonFiniteBound);
        }
        if min_value > max_value {
            return Err(QueryError::InvalidRange {
                min: min_value,
                max: max_value,
            });
        }
        if epoch_s < 1 {
            return Err(QueryError::InvalidEpoch);
        }
        if lifetime_epochs < 1 {
            return Err(QueryError::InvalidLifetime);
        }
        Ok(RangeQuery {
            id,
            attribute,
            min_value,
            max_value,
            epoch_s,
            lifetime_epochs,
        })
    }

    /// True when `value` falls inside the inclusive range.
    pub fn contains_value(&self, value: f64) -> bool {
        self.min_value <= value && value <= self.max_value
    }

    /// True when `other`'s range lies inside this query's range.
    pub fn contains_range(&self, other: &RangeQuery) -> bool {
        self.attribute == other.attribute
            && self.min_value <= other.min_value
            && other.max_value <= self.max_value
    }

    /// Seconds spanned by the remaining sampling rounds.
    pub fn horizon_s(&self) -> u64 {
        self.lifetime_epochs as u64 * self.epoch_s as u64
    }
}

/// Canonical query text. Printable ASCII by construction, so byte length
/// and character length coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryText(String);

impl QueryText {
    pub fn new(text: impl Into<String>) -> Result<Self, QueryError> {
        let text = text.into();
        if !text.bytes().all(|b| (0x20..=0x7e).contains(&b)) {
            return Err(QueryError::NonAscii);
        }
        Ok(QueryText(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn size_bytes(&self) -> usize {
        self.0.len()
    }

    pub fn size_bits(&self) -> usize {
        self.0.len() * 8
    }
}

impl fmt::Display for QueryText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Renders a query in the canonical grammar. Numbers use the shortest
/// decimal form that parses back to the same value.
pub fn serialize(q: &RangeQuery) -> QueryText {
    let attr = q.attribute.keyword();
    let text = format!(
        "SELECT {attr} FROM sensors WHERE {attr} >= {} AND {attr} <= {} \
         SAMPLE PERIOD {} FOR {} EPOCHS",
        q.min_value, q.max_value, q.epoch_s, q.lifetime_epochs
    );
    QueryText(text)
}

/// Parses canonical query text, assigning id 0.
pub fn parse(text: &str) -> Result<RangeQuery, QueryError> {
    parse_with_id(text, 0)
}

/// Parses canonical query text, attaching the given id. The id is not part
/// of the wire text, so it is supplied by the caller at injection time.
pub fn parse_with_id(text: &str, id: u64) -> Result<RangeQuery, QueryError> {
    if !text.bytes().all(|b| (0x20..=0x7e).contains(&b)) {
        return Err(QueryError::NonAscii);
    }
    let mut tokens = Tokens::new(text);
    tokens.expect_keyword("SELECT")?;
    let (attr_pos, attr_word) = tokens.next_token("attribute")?;
    let attribute = Attribute::from_keyword(attr_word).ok_or_else(|| QueryError::Syntax {
        position: attr_pos,
        message: format!("unknown attribute `{attr_word}`"),
    })?;
    tokens.expect_keyword("FROM")?;
    tokens.expect_keyword("sensors")?;
    tokens.expect_keyword("WHERE")?;
    tokens.expect_attr(attribute)?;
    tokens.expect_keyword(">=")?;
    let min_value = tokens.expect_number()?;
    tokens.expect_keyword("AND")?;
    tokens.expect_attr(attribute)?;
    tokens.expect_keyword("<=")?;
    let max_value = tokens.expect_number()?;
    tokens.expect_keyword("SAMPLE")?;
    tokens.expect_keyword("PERIOD")?;
    let (epoch_pos, epoch) = tokens.expect_integer()?;
    tokens.expect_keyword("FOR")?;
    let (life_pos, lifetime) = tokens.expect_integer()?;
    tokens.expect_keyword("EPOCHS")?;
    tokens.expect_end()?;

    if epoch == 0 {
        return Err(QueryError::Syntax {
            position: epoch_pos,
            message: "sampling period must be at least 1".into(),
        });
    }
    if lifetime == 0 {
        return Err(QueryError::Syntax {
            position: life_pos,
            message: "lifetime must be at least 1".into(),
        });
    }
    RangeQuery::new(id, attribute, min_value, max_value, epoch, lifetime)
}

struct Tokens<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { text, pos: 0 }
    }

    fn skip_spaces(&mut self) {
        while self.text.as_bytes().get(self.pos) == Some(&b' ') {
            self.pos += 1;
        }
    }

    fn next_token(&mut self, what: &str) -> Result<(usize, &'a str), QueryError> {
        self.skip_spaces();
        if self.pos >= self.text.len() {
            return Err(QueryError::Syntax {
                position: self.pos,
                message: format!("expected {what}, found end of input"),
            });
        }
        let start = self.pos;
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos] != b' ' {
            self.pos += 1;
        }
        Ok((start, &self.text[start..self.pos]))
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<(), QueryError> {
        let (pos, word) = self.next_token(&format!("`{keyword}`"))?;
        if word != keyword {
            return Err(QueryError::Syntax {
                position: pos,
                message: format!("expected `{keyword}`, found `{word}`"),
            });
        }
        Ok(())
    }

    fn expect_attr(&mut self, attribute: Attribute) -> Result<(), QueryError> {
        let (pos, word) = self.next_token("attribute")?;
        if word != attribute.keyword() {
            return Err(QueryError::Syntax {
                position: pos,
                message: format!(
                    "expected attribute `{}`, found `{word}`",
                    attribute.keyword()
                ),
            });
        }
        Ok(())
    }

    fn expect_number(&mut self) -> Result<f64, QueryError> {
        let (pos, word) = self.next_token("number")?;
        let value: f64 = word.parse().map_err(|_| QueryError::Syntax {
            position: pos,
            message: format!("expected number, found `{word}`"),
        })?;
        if !value.is_finite() {
            return Err(QueryError::Syntax {
                position: pos,
                message: format!("expected finite number, found `{word}`"),
            });
        }
        Ok(value)
    }

    fn expect_integer(&mut self) -> Result<(usize, u32), QueryError> {
        let (pos, word) = self.next_token("integer")?;
        let value: u32 = word.parse().map_err(|_| QueryError::Syntax {
            position: pos,
            message: format!("expected positive integer, found `{word}`"),
        })?;
        Ok((pos, value))
    }

    fn expect_end(&mut self) -> Result<(), QueryError> {
        self.skip_spaces();
        if self.pos < self.text.len() {
            return Err(QueryError::Syntax {
                position: self.pos,
                message: format!("unexpected trailing input `{}`", &self.text[self.pos..]),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ROW1: &str = "SELECT temp FROM sensors WHERE temp >= 10 AND temp <= 50 \
                        SAMPLE PERIOD 5 FOR 100 EPOCHS";

    #[test]
    fn parses_table_style_query() {
        let q = parse(ROW1).unwrap();
        assert_eq!(q.attribute, Attribute::Temp);
        assert_eq!(q.min_value, 10.0);
        assert_eq!(q.max_value, 50.0);
        assert_eq!(q.epoch_s, 5);
        assert_eq!(q.lifetime_epochs, 100);
    }

    #[test]
    fn point_query_is_allowed() {
        let text = "SELECT temp FROM sensors WHERE temp >= 30 AND temp <= 30 \
                    SAMPLE PERIOD 5 FOR 100 EPOCHS";
        let q = parse(text).unwrap();
        assert_eq!(q.min_value, q.max_value);
    }

    #[test]
    fn inverted_range_is_rejected() {
        let text = "SELECT temp FROM sensors WHERE temp >= 50 AND temp <= 10 \
                    SAMPLE PERIOD 5 FOR 100 EPOCHS";
        assert_eq!(
            parse(text),
            Err(QueryError::InvalidRange {
                min: 50.0,
                max: 10.0
            })
        );
    }

    #[test]
    fn zero_epoch_is_rejected() {
        let text = "SELECT temp FROM sensors WHERE temp >= 10 AND temp <= 50 \
                    SAMPLE PERIOD 0 FOR 100 EPOCHS";
        assert!(matches!(parse(text), Err(QueryError::Syntax { .. })));
    }

    #[test]
    fn zero_lifetime_is_rejected() {
        let text = "SELECT temp FROM sensors WHERE temp >= 10 AND temp <= 50 \
                    SAMPLE PERIOD 5 FOR 0 EPOCHS";
        assert!(matches!(parse(text), Err(QueryError::Syntax { .. })));
    }

    #[test]
    fn syntax_error_reports_position() {
        let text = "SELECT temp FROM motes WHERE temp >= 10 AND temp <= 50 \
                    SAMPLE PERIOD 5 FOR 100 EPOCHS";
        match parse(text) {
            Err(QueryError::Syntax { position, .. }) => assert_eq!(position, 17),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_attribute_is_rejected() {
        let text = "SELECT temp FROM sensors WHERE light >= 10 AND temp <= 50 \
                    SAMPLE PERIOD 5 FOR 100 EPOCHS";
        assert!(matches!(parse(text), Err(QueryError::Syntax { .. })));
    }

    #[test]
    fn serialize_matches_canonical_text() {
        let q = RangeQuery::new(0, Attribute::Temp, 10.0, 50.0, 5, 100).unwrap();
        let text = serialize(&q);
        assert_eq!(text.as_str(), ROW1);
        assert_eq!(text.size_bits(), 8 * ROW1.len());
    }

    #[test]
    fn serialize_table_row_seven_values() {
        let q = RangeQuery::new(7, Attribute::Temp, 5.0, 55.0, 120, 100).unwrap();
        let text = serialize(&q);
        assert!(text.as_str().contains(">= 5 "));
        assert!(text.as_str().contains("<= 55 "));
        assert!(text.as_str().contains("PERIOD 120 "));
    }

    #[test]
    fn parse_accepts_extra_spaces_and_canonicalizes() {
        let sloppy = "SELECT  temp FROM sensors  WHERE temp >= 10 AND temp <= 50 \
                      SAMPLE PERIOD 5 FOR 100 EPOCHS";
        let q = parse(sloppy).unwrap();
        assert_eq!(serialize(&q).as_str(), ROW1);
    }

    #[test]
    fn non_ascii_text_is_rejected() {
        assert_eq!(parse("SELECT t\u{00e9}mp"), Err(QueryError::NonAscii));
        assert!(QueryText::new("tab\there").is_err());
    }

    fn arb_query() -> impl Strategy<Value = RangeQuery> {
        (
            any::<u64>(),
            prop_oneof![
                Just(Attribute::Temp),
                Just(Attribute::Light),
                Just(Attribute::Humidity)
            ],
            -1.0e6..1.0e6f64,
            -1.0e6..1.0e6f64,
            1u32..=10_000,
            1u32..=10_000,
        )
            .prop_map(|(id, attribute, a, b, epoch_s, lifetime_epochs)| RangeQuery {
                id,
                attribute,
                min_value: a.min(b),
                max_value: a.max(b),
                epoch_s,
                lifetime_epochs,
            })
    }

    proptest! {
        #[test]
        fn round_trip(q in arb_query()) {
            let text = serialize(&q);
            prop_assert_eq!(text.size_bits(), 8 * text.size_bytes());
            let back = parse_with_id(text.as_str(), q.id).unwrap();
            prop_assert_eq!(back, q);
        }

        #[test]
        fn serialize_after_parse_is_identity(q in arb_query()) {
            let text = serialize(&q);
            let back = parse(text.as_str()).unwrap();
            prop_assert_eq!(serialize(&back), text);
        }
    }
}
