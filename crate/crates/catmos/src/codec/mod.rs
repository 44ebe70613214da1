//! Lossless codecs and the compression-factor metric.
//!
//! All three codecs are self-written: Huffman with canonical codes, LZW
//! with variable-width codes, and a Deflate-style LZ77 + fixed prefix
//! coder. Two size-accounting modes exist because reported sizes may or
//! may not include code tables: payload-only (default) counts just the
//! coded bits, self-contained adds the transmissible header (the 256
//! Huffman code lengths). The Deflate envelope is charged in both modes;
//! it models the stream container rather than a code table.

pub mod bits;
pub mod deflate;
pub mod huffman;
pub mod lzw;

use bits::BitBuf;
pub use huffman::HuffmanCodebook;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("input is empty")]
    EmptyInput,
    #[error("payload ends before the declared original length is decoded")]
    TruncatedPayload,
    #[error("payload has bits left over after the declared original length")]
    TrailingBits,
    #[error("bit pattern does not map to any symbol")]
    UnknownCode,
    #[error("code lengths do not describe a full prefix-code tree")]
    InvalidCodebook,
    #[error("blob carries no codebook")]
    MissingCodebook,
    #[error("code {0} lies beyond the dictionary frontier")]
    CodeBeyondDictionary(u32),
    #[error("byte {0:#04x} is not in the configured alphabet")]
    SymbolOutsideAlphabet(u8),
    #[error("back-reference distance {distance} exceeds the {produced} bytes produced")]
    InvalidDistance { distance: usize, produced: usize },
    #[error("original size must be positive")]
    ZeroOriginalSize,
    #[error("unknown codec `{0}`")]
    UnknownCodec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodecId {
    Huffman,
    Lzw,
    Deflate,
}

impl CodecId {
    pub const ALL: [CodecId; 3] = [CodecId::Huffman, CodecId::Lzw, CodecId::Deflate];

    pub fn name(self) -> &'static str {
        match self {
            CodecId::Huffman => "huffman",
            CodecId::Lzw => "lzw",
            CodecId::Deflate => "deflate",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, CodecError> {
        match name {
            "huffman" => Ok(CodecId::Huffman),
            "lzw" => Ok(CodecId::Lzw),
            "deflate" => Ok(CodecId::Deflate),
            other => Err(CodecError::UnknownCodec(other.to_string())),
        }
    }
}

/// Whether reported sizes count code tables alongside the payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SizeMode {
    #[default]
    PayloadOnly,
    SelfContained,
}

impl SizeMode {
    pub fn name(self) -> &'static str {
        match self {
            SizeMode::PayloadOnly => "payload",
            SizeMode::SelfContained => "self-contained",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, CodecError> {
        match name {
            "payload" | "payload-only" => Ok(SizeMode::PayloadOnly),
            "self-contained" => Ok(SizeMode::SelfContained),
            other => Err(CodecError::UnknownCodec(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    pub mode: SizeMode,
    /// Container overhead charged on every Deflate blob.
    pub deflate_envelope_bytes: usize,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            mode: SizeMode::PayloadOnly,
            deflate_envelope_bytes: 64,
        }
    }
}

/// Output of any codec: the coded bits plus enough side data to invert and
/// to account for sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedBlob {
    pub codec: CodecId,
    pub payload: BitBuf,
    pub original_bytes: usize,
    /// Code-table / dictionary / envelope overhead in bits; zero is valid.
    pub header_bits: usize,
    /// Huffman side channel; canonical, so lengths alone reconstruct it.
    pub codebook: Option<HuffmanCodebook>,
}

impl CompressedBlob {
    pub fn payload_bits(&self) -> usize {
        self.payload.len()
    }

    pub fn total_bits(&self) -> usize {
        self.header_bits + self.payload.len()
    }

    pub fn total_bytes(&self) -> usize {
        self.total_bits().div_ceil(8)
    }
}

pub fn encode(codec: CodecId, input: &[u8], cfg: &CodecConfig) -> Result<CompressedBlob, CodecError> {
    match codec {
        CodecId::Huffman => huffman::encode(input, cfg),
        CodecId::Lzw => lzw::encode(input, cfg),
        CodecId::Deflate => deflate::encode(input, cfg),
    }
}

pub fn decode(blob: &CompressedBlob) -> Result<Vec<u8>, CodecError> {
    match blob.codec {
        CodecId::Huffman => huffman::decode(blob),
        CodecId::Lzw => lzw::decode(blob),
        CodecId::Deflate => deflate::decode(blob),
    }
}

/// Compressed size as a percentage of the original size; values above 100
/// mean expansion.
pub fn compression_factor(original_bytes: usize, compressed_bytes: usize) -> Result<f64, CodecError> {
    if original_bytes == 0 {
        return Err(CodecError::ZeroOriginalSize);
    }
    Ok(compressed_bytes as f64 / original_bytes as f64 * 100.0)
}
