use std::fmt;

use crate::error::{Error, Result};

/// Letter index into an [`Alphabet`].
pub type Letter = usize;

/// A word over an alphabet, as letter indices.
pub type Word = Vec<Letter>;

/// Ordered, nonempty list of distinct letter names.
///
/// The listed order is the total order used for every `Σ_{a∈A}` and for
/// length-then-alphabet enumeration of words.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Alphabet {
    letters: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        for (i, l) in letters.iter().enumerate() {
            if l.is_empty() || l.contains(char::is_whitespace) || l == "_" {
                return Err(Error::InvalidAlphabet(format!("bad letter name `{l}`")));
            }
            if letters[..i].contains(l) {
                return Err(Error::InvalidAlphabet(format!("letter `{l}` listed twice")));
            }
        }
        Ok(Alphabet { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.letters[a]
    }

    pub fn names(&self) -> &[String] {
        &self.letters
    }

    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.letters.iter().position(|l| l == name)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.letters.len()
    }

    pub fn check(&self, a: Letter) -> Result<()> {
        if a < self.letters.len() {
            Ok(())
        } else {
            Err(Error::UnknownLetter(format!("#{a}")))
        }
    }

    fn single_char(&self) -> bool {
        self.letters.iter().all(|l| l.chars().count() == 1)
    }

    /// Parses a word. `_` and the empty string denote ε. When every letter is
    /// a single character the word may be written without separators,
    /// otherwise letters are separated by whitespace.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "_" {
            return Ok(Vec::new());
        }
        let tokens: Vec<String> = if text.contains(char::is_whitespace) || !self.single_char() {
            text.split_whitespace().map(str::to_owned).collect()
        } else {
            text.chars().map(String::from).collect()
        };
        tokens
            .iter()
            .map(|t| self.index_of(t).ok_or_else(|| Error::UnknownLetter(t.clone())))
            .collect()
    }

    /// Renders a word; ε is rendered as `_`.
    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "_".to_owned();
        }
        let sep = if self.single_char() { "" } else { " " };
        word.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(sep)
    }

    /// All words of length at most `maxlen` in length-then-alphabet order.
    pub fn words_up_to(&self, maxlen: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        let mut start = 0;
        for _ in 0..maxlen {
            let end = out.len();
            for i in start..end {
                for a in self.letters() {
                    let mut w = out[i].clone();
                    w.push(a);
                    out.push(w);
                }
            }
            start = end;
        }
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letters.join(" "))
    }
}
