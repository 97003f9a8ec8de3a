//! Lowercasing word and sub-word tokenization of class labels.

use std::collections::HashSet;

use crate::error::Result;

pub const CONTINUATION_PREFIX: &str = "##";

/// Word tokenizer, optionally refined into sub-words with a vocabulary.
///
/// With a vocabulary each word is segmented greedily by longest match. At a
/// non-initial position a `##`-prefixed piece is preferred over a bare piece
/// of the same length. A word that cannot be fully segmented is kept whole.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    vocab: Option<HashSet<String>>,
    max_piece_chars: usize,
}

impl Tokenizer {
    pub fn words() -> Self {
        Self::default()
    }

    pub fn with_vocab<S: AsRef<str>>(tokens: impl IntoIterator<Item = S>) -> Self {
        let vocab: HashSet<String> = tokens
            .into_iter()
            .map(|t| t.as_ref().trim().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        let max_piece_chars = vocab
            .iter()
            .map(|t| t.trim_start_matches(CONTINUATION_PREFIX).chars().count())
            .max()
            .unwrap_or(0);
        Self {
            vocab: Some(vocab),
            max_piece_chars,
        }
    }

    /// Reads a vocabulary file: UTF-8, one token per line.
    pub fn from_vocab_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::with_vocab(text.lines()))
    }

    pub fn has_vocab(&self) -> bool {
        self.vocab.is_some()
    }

    pub fn tokenize<S: AsRef<str>>(&self, labels: &[S]) -> Vec<String> {
        let mut out = Vec::new();
        for label in labels {
            let lowered = label.as_ref().to_lowercase();
            for word in lowered
                .split(|c: char| !c.is_alphanumeric())
                .filter(|w| !w.is_empty())
            {
                match &self.vocab {
                    None => out.push(word.to_string()),
                    Some(vocab) => self.segment(vocab, word, &mut out),
                }
            }
        }
        out
    }

    fn segment(&self, vocab: &HashSet<String>, word: &str, out: &mut Vec<String>) {
        let chars: Vec<char> = word.chars().collect();
        let mut pieces = Vec::new();
        let mut start = 0;
        while start < chars.len() {
            let longest = self.max_piece_chars.min(chars.len() - start);
            let mut found = None;
            for len in (1..=longest).rev() {
                let piece: String = chars[start..start + len].iter().collect();
                if start > 0 {
                    let cont = format!("{}{}", CONTINUATION_PREFIX, piece);
                    if vocab.contains(&cont) {
                        found = Some((cont, len));
                        break;
                    }
                }
                if vocab.contains(&piece) {
                    found = Some((piece, len));
                    break;
                }
            }
            match found {
                Some((piece, len)) => {
                    pieces.push(piece);
                    start += len;
                }
                None => {
                    out.push(word.to_string());
                    return;
                }
            }
        }
        out.extend(pieces);
    }
}
