//! Lazily extended infinite (or finite) words with a materialized prefix
//! cache. Extension is serialized behind a mutex so concurrent readers
//! always observe a consistent prefix; `prefix(n)` is deterministic and
//! idempotent.

use std::sync::{Arc, Mutex};

use crate::words::{Alphabet, Letter, Word};

/// Pull-based letter producer. `fill` appends letters to `cache` until its
/// length reaches `want` or the source is exhausted (finite streams).
pub trait LetterSource: Send {
    fn fill(&mut self, cache: &mut Vec<Letter>, want: usize);
}

struct Inner {
    cache: Vec<Letter>,
    exhausted: bool,
    source: Box<dyn LetterSource>,
}

/// An infinite word `w_0 w_1 w_2 ...` materialized on demand.
pub struct WordStream {
    alphabet: Alphabet,
    inner: Mutex<Inner>,
}

impl WordStream {
    pub fn from_source(alphabet: Alphabet, source: Box<dyn LetterSource>) -> Self {
        WordStream {
            alphabet,
            inner: Mutex::new(Inner { cache: Vec::new(), exhausted: false, source }),
        }
    }

    /// Infinite stream computed pointwise from the index.
    pub fn from_fn<F>(alphabet: Alphabet, f: F) -> Self
    where
        F: FnMut(usize) -> Letter + Send + 'static,
    {
        struct FnSource<F>(F);
        impl<F: FnMut(usize) -> Letter + Send> LetterSource for FnSource<F> {
            fn fill(&mut self, cache: &mut Vec<Letter>, want: usize) {
                while cache.len() < want {
                    let i = cache.len();
                    cache.push((self.0)(i));
                }
            }
        }
        WordStream::from_source(alphabet, Box::new(FnSource(f)))
    }

    pub fn constant(alphabet: Alphabet, letter: Letter) -> Self {
        assert!(alphabet.contains(letter));
        WordStream::from_fn(alphabet, move |_| letter)
    }

    /// Infinite periodic repetition of a nonempty finite word.
    pub fn periodic(word: Word) -> Self {
        assert!(!word.is_empty(), "periodic stream needs a nonempty period");
        let alphabet = word.alphabet();
        let letters = word.into_letters();
        WordStream::from_fn(alphabet, move |i| letters[i % letters.len()])
    }

    /// A finite stream backed by a materialized word.
    pub fn from_word(word: Word) -> Self {
        struct Exhausted;
        impl LetterSource for Exhausted {
            fn fill(&mut self, _: &mut Vec<Letter>, _: usize) {}
        }
        let alphabet = word.alphabet();
        let stream = WordStream::from_source(alphabet, Box::new(Exhausted));
        {
            let mut inner = stream.inner.lock().unwrap();
            inner.cache = word.into_letters();
            inner.exhausted = true;
        }
        stream
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// First `n` letters (fewer if the stream is finite and shorter).
    pub fn prefix(&self, n: usize) -> Word {
        self.with_prefix(n, |letters| {
            Word::new(self.alphabet, letters[..letters.len().min(n)].to_vec())
                .expect("cached letters are validated on entry")
        })
    }

    /// Run `f` over the cached prefix of length `min(n, available)` without
    /// copying. `f` must not call back into this stream.
    pub fn with_prefix<R>(&self, n: usize, f: impl FnOnce(&[Letter]) -> R) -> R {
        let mut inner = self.inner.lock().unwrap();
        self.extend_locked(&mut inner, n);
        let upto = inner.cache.len().min(n);
        f(&inner.cache[..upto])
    }

    /// Letter at index `i`; panics if a finite stream is too short.
    pub fn letter(&self, i: usize) -> Letter {
        let mut inner = self.inner.lock().unwrap();
        if inner.cache.len() <= i {
            // geometric growth keeps repeated point queries amortized-linear
            let want = (i + 1).max(inner.cache.len() * 2).max(64);
            self.extend_locked(&mut inner, want);
        }
        assert!(i < inner.cache.len(), "stream exhausted before index {}", i);
        inner.cache[i]
    }

    pub fn try_letter(&self, i: usize) -> Option<Letter> {
        let mut inner = self.inner.lock().unwrap();
        if inner.cache.len() <= i {
            let want = (i + 1).max(inner.cache.len() * 2).max(64);
            self.extend_locked(&mut inner, want);
        }
        inner.cache.get(i).copied()
    }

    /// Known-materialized length so far (grows monotonically).
    pub fn cached_len(&self) -> usize {
        self.inner.lock().unwrap().cache.len()
    }

    pub fn is_exhausted(&self) -> bool {
        self.inner.lock().unwrap().exhausted
    }

    fn extend_locked(&self, inner: &mut Inner, want: usize) {
        if inner.exhausted || inner.cache.len() >= want {
            return;
        }
        let before = inner.cache.len();
        let Inner { cache, source, .. } = inner;
        source.fill(cache, want);
        debug_assert!(inner.cache[before..].iter().all(|&l| self.alphabet.contains(l)));
        if inner.cache.len() < want {
            inner.exhausted = true;
        }
    }

    /// Serialize as prefix length plus digit string.
    pub fn serialize_prefix(&self, n: usize) -> String {
        let w = self.prefix(n);
        format!("{} {}", w.len(), w)
    }

    /// `[w]_p` at `offset` as a stream.
    pub fn subsample(self: &Arc<Self>, p: usize, offset: usize) -> WordStream {
        assert!(p >= 1, "subsample modulus must be >= 1");
        let src = Arc::clone(self);
        let alphabet = self.alphabet;
        struct Sub {
            src: Arc<WordStream>,
            p: usize,
            offset: usize,
        }
        impl LetterSource for Sub {
            fn fill(&mut self, cache: &mut Vec<Letter>, want: usize) {
                while cache.len() < want {
                    let i = self.offset + cache.len() * self.p;
                    match self.src.try_letter(i) {
                        Some(l) => cache.push(l),
                        None => return,
                    }
                }
            }
        }
        WordStream::from_source(alphabet, Box::new(Sub { src, p, offset }))
    }

    /// Letters at a strictly increasing sequence of positions.
    pub fn subsequence<I>(self: &Arc<Self>, positions: I) -> WordStream
    where
        I: Iterator<Item = usize> + Send + 'static,
    {
        let src = Arc::clone(self);
        let alphabet = self.alphabet;
        struct Seq<I> {
            src: Arc<WordStream>,
            positions: I,
            last: Option<usize>,
        }
        impl<I: Iterator<Item = usize> + Send> LetterSource for Seq<I> {
            fn fill(&mut self, cache: &mut Vec<Letter>, want: usize) {
                while cache.len() < want {
                    match self.positions.next() {
                        Some(p) => {
                            assert!(
                                self.last.is_none_or(|prev| p > prev),
                                "positions must be strictly increasing"
                            );
                            self.last = Some(p);
                            match self.src.try_letter(p) {
                                Some(l) => cache.push(l),
                                None => return,
                            }
                        }
                        None => return,
                    }
                }
            }
        }
        WordStream::from_source(alphabet, Box::new(Seq { src, positions, last: None }))
    }
}

impl std::fmt::Debug for WordStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WordStream")
            .field("alphabet", &self.alphabet)
            .field("cached_len", &self.cached_len())
            .finish()
    }
}
