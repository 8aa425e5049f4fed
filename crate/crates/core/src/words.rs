//! Finite words over small alphabets: square detection, subsampling,
//! factor extraction, and squarefree enumeration.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A letter is a small unsigned integer, `0..alphabet.size()`.
pub type Letter = u8;

/// An alphabet of `size` letters `0..size`. Ternary `{0,1,2}` is the default
/// throughout; size 4 exists only for the quaternary interleaving remark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Alphabet(u8);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);
    pub const TERNARY: Alphabet = Alphabet(3);
    pub const QUATERNARY: Alphabet = Alphabet(4);

    pub fn new(size: usize) -> Result<Self> {
        if (2..=4).contains(&size) {
            Ok(Alphabet(size as u8))
        } else {
            Err(Error::AlphabetSize(size))
        }
    }

    pub fn size(self) -> usize {
        self.0 as usize
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        0..self.0
    }

    pub fn contains(self, letter: Letter) -> bool {
        letter < self.0
    }
}

/// A square occurrence `w[start..start+2*period)` with equal halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Square {
    pub start: usize,
    pub period: usize,
}

impl Square {
    pub fn end(&self) -> usize {
        self.start + 2 * self.period
    }
}

/// A finite word over an [`Alphabet`], stored as contiguous letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(alphabet: Alphabet, letters: Vec<Letter>) -> Result<Self> {
        if let Some(&l) = letters.iter().find(|&&l| !alphabet.contains(l)) {
            return Err(Error::LetterRange { letter: l, size: alphabet.size() });
        }
        Ok(Word { alphabet, letters })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Word { alphabet, letters: Vec::new() }
    }

    /// Parse an ASCII digit string like `"012021"`.
    pub fn from_digits(alphabet: Alphabet, digits: &str) -> Result<Self> {
        let mut letters = Vec::with_capacity(digits.len());
        for c in digits.chars() {
            let l = c.to_digit(10).ok_or(Error::BadDigit(c))? as Letter;
            if !alphabet.contains(l) {
                return Err(Error::LetterRange { letter: l, size: alphabet.size() });
            }
            letters.push(l);
        }
        Ok(Word { alphabet, letters })
    }

    /// Ternary convenience used pervasively in tests.
    pub fn ternary(digits: &str) -> Self {
        Word::from_digits(Alphabet::TERNARY, digits).expect("valid ternary digits")
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    /// The square occurrence with smallest end index, ties broken by smallest
    /// period; `None` iff the word is squarefree.
    pub fn find_square(&self) -> Option<Square> {
        find_square(&self.letters)
    }

    pub fn is_squarefree(&self) -> bool {
        is_squarefree(&self.letters)
    }

    /// Smallest period `p` such that the suffix of length `2p` is a square.
    /// If `self` minus its last letter is squarefree, then `self` is
    /// squarefree iff this returns `None`.
    pub fn square_ending_at_end(&self) -> Option<usize> {
        square_end_period(&self.letters)
    }

    /// `[w]_p` starting at `offset`: letters at `offset, offset+p, ...`,
    /// truncated at the last in-range index.
    pub fn subsample(&self, p: usize, offset: usize) -> Word {
        assert!(p >= 1, "subsample modulus must be >= 1");
        let letters = self.letters.iter().skip(offset).step_by(p).copied().collect();
        Word { alphabet: self.alphabet, letters }
    }

    /// All distinct factors of length `n`, sorted.
    pub fn factors(&self, n: usize) -> BTreeSet<Word> {
        let mut set = BTreeSet::new();
        if n > self.letters.len() {
            return set;
        }
        for win in self.letters.windows(n.max(1)) {
            if n == 0 {
                break;
            }
            set.insert(Word { alphabet: self.alphabet, letters: win.to_vec() });
        }
        if n == 0 {
            set.insert(Word::empty(self.alphabet));
        }
        set
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.letters.starts_with(&prefix.letters)
    }

    pub fn ends_with(&self, suffix: &Word) -> bool {
        self.letters.ends_with(&suffix.letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses with the smallest alphabet (>= ternary) that fits the digits.
    fn from_str(s: &str) -> Result<Self> {
        let mut max = 2u8;
        for c in s.chars() {
            let l = c.to_digit(10).ok_or(Error::BadDigit(c))? as u8;
            max = max.max(l);
        }
        Word::from_digits(Alphabet::new(max as usize + 1)?, s)
    }
}

/// Slice-level search for the square with the smallest end index, ties broken
/// by smallest period. The naive end-ordered scan is the normative oracle.
pub fn find_square(w: &[Letter]) -> Option<Square> {
    let n = w.len();
    for end in 2..=n {
        for period in 1..=end / 2 {
            let start = end - 2 * period;
            if w[start..start + period] == w[start + period..end] {
                return Some(Square { start, period });
            }
        }
    }
    None
}

pub fn is_squarefree(w: &[Letter]) -> bool {
    // Equivalent to find_square(w).is_none() but ordered for early mismatch:
    // most candidate periods fail at the final-letter comparison.
    let n = w.len();
    for end in 2..=n {
        if square_end_period(&w[..end]).is_some() {
            return false;
        }
    }
    true
}

/// Smallest period `p >= 1` such that `w`'s suffix of length `2p` is a square.
pub fn square_end_period(w: &[Letter]) -> Option<usize> {
    let n = w.len();
    if n < 2 {
        return None;
    }
    let last = w[n - 1];
    for p in 1..=n / 2 {
        if w[n - 1 - p] == last && w[n - 2 * p..n - p] == w[n - p..n] {
            return Some(p);
        }
    }
    None
}

/// Length of the longest common prefix of a set of slices.
pub fn common_prefix_len<S: AsRef<[Letter]>>(words: &[S]) -> usize {
    let Some(first) = words.first() else { return 0 };
    let mut n = first.as_ref().len();
    for w in &words[1..] {
        let w = w.as_ref();
        let mut i = 0;
        while i < n && i < w.len() && w[i] == first.as_ref()[i] {
            i += 1;
        }
        n = n.min(i);
    }
    n
}

/// Length of the longest common suffix of a set of slices.
pub fn common_suffix_len<S: AsRef<[Letter]>>(words: &[S]) -> usize {
    let Some(first) = words.first() else { return 0 };
    let first = first.as_ref();
    let mut n = first.len();
    for w in &words[1..] {
        let w = w.as_ref();
        let mut i = 0;
        while i < n && i < w.len() && w[w.len() - 1 - i] == first[first.len() - 1 - i] {
            i += 1;
        }
        n = n.min(i);
    }
    n
}

pub const DEFAULT_ENUM_CAP: u128 = 100_000_000;

/// All squarefree words of length `n`, lexicographically sorted.
pub fn enumerate_squarefree(alphabet: Alphabet, n: usize) -> Result<Vec<Word>> {
    enumerate_squarefree_capped(alphabet, n, DEFAULT_ENUM_CAP)
}

/// As [`enumerate_squarefree`], guarded: errors out if the number of
/// candidate extensions examined would exceed `cap`.
pub fn enumerate_squarefree_capped(alphabet: Alphabet, n: usize, cap: u128) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    let mut buf: Vec<Letter> = Vec::with_capacity(n);
    let mut nodes: u128 = 0;
    // depth-first extension in ascending letter order yields lex order
    let mut branch: Vec<Letter> = vec![0];
    loop {
        let depth = buf.len();
        if depth == n {
            out.push(Word { alphabet, letters: buf.clone() });
            if buf.pop().is_none() {
                break; // n == 0
            }
            branch.pop();
            continue;
        }
        let next = branch[depth];
        if next as usize >= alphabet.size() {
            branch.pop();
            if buf.pop().is_none() {
                break;
            }
            continue;
        }
        branch[depth] += 1;
        nodes += 1;
        if nodes > cap {
            return Err(Error::EnumerationCap { count: nodes, cap });
        }
        buf.push(next);
        if square_end_period(&buf).is_some() {
            buf.pop();
        } else {
            branch.push(0);
        }
    }
    Ok(out)
}

/// A uniformly-backtracked random squarefree word: letters are tried in a
/// random order at each position, with backtracking when a position admits
/// no squarefree extension.
pub fn random_squarefree<R: rand::Rng>(alphabet: Alphabet, len: usize, rng: &mut R) -> Word {
    let size = alphabet.size();
    let mut buf: Vec<Letter> = Vec::with_capacity(len);
    let mut orders: Vec<Vec<Letter>> = Vec::with_capacity(len + 1);
    let mut fresh_order = |rng: &mut R| {
        let mut order: Vec<Letter> = (0..size as Letter).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        order
    };
    orders.push(fresh_order(rng));
    loop {
        if buf.len() == len {
            return Word { alphabet, letters: buf };
        }
        let depth = buf.len();
        match orders[depth].pop() {
            None => {
                orders.pop();
                buf.pop().expect("squarefree words exist at every length");
            }
            Some(l) => {
                buf.push(l);
                if square_end_period(&buf).is_some() {
                    buf.pop();
                } else {
                    orders.push(fresh_order(rng));
                }
            }
        }
    }
}
