//! Words over a finite alphabet `X = {x0, ..., xm}`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{FpaError, Result};

/// Letter `x_i` is stored as the index `i`.
pub type Letter = u8;

/// A finite word. Ordered length-first, then lexicographically by letter index.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: Letter) -> Self {
        Word(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// `x_i` followed by `self`.
    pub fn prepend(&self, i: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(i);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Number of occurrences of letter `i`.
    pub fn count(&self, i: Letter) -> usize {
        self.0.iter().filter(|&&l| l == i).count()
    }

    pub fn max_letter(&self) -> Option<Letter> {
        self.0.iter().copied().max()
    }

    /// Parses `e` (empty word) or a concatenation such as `x0x1x12`.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "e" || s == "∅" {
            return Ok(Word::empty());
        }
        let bad = |msg: &str| FpaError::Parse { line: 0, column: 0, msg: format!("word `{s}`: {msg}") };
        let mut letters = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] != b'x' {
                return Err(bad("expected `x`"));
            }
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(bad("missing letter index"));
            }
            let idx: u32 = s[start..i].parse().map_err(|_| bad("bad letter index"))?;
            if idx > Letter::MAX as u32 {
                return Err(bad("letter index too large"));
            }
            letters.push(idx as Letter);
        }
        if letters.is_empty() {
            return Err(bad("empty token"));
        }
        Ok(Word(letters))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for l in &self.0 {
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

/// All words of length exactly `n` over `{x0..xm}`, in lexicographic order.
pub fn enumerate_words(m: usize, n: usize) -> Vec<Word> {
    let k = m + 1;
    let total = k.checked_pow(n as u32).expect("word count overflows usize");
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0 as Letter; n];
    for _ in 0..total {
        out.push(Word(cur.clone()));
        for pos in (0..n).rev() {
            if (cur[pos] as usize) < m {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 0;
        }
    }
    out
}

/// All words of length `<= n`, in length-lex order.
pub fn enumerate_words_upto(m: usize, n: usize) -> Vec<Word> {
    (0..=n).flat_map(|k| enumerate_words(m, k)).collect()
}
