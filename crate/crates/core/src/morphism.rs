//! Morphism algebra: application, composition, fixed points, subsampled
//! morphisms `h_p`, conjugation, cyclic-shift construction, and the
//! multi-valued variant.
//!
//! Text format (bit-exact for assets and CLI files): one line per letter,
//! `<letter> -> <image digits>`; `#` starts a comment; blank lines are
//! ignored. A multi-valued morphism repeats lines per letter, one per
//! alternative.

use std::fmt;
use std::sync::Arc;

use crate::stream::{LetterSource, WordStream};
use crate::words::{Alphabet, Letter, Word};
use crate::{Error, Result};

/// A bijection of an alphabet's letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Permutation {
    alphabet: Alphabet,
    map: [Letter; 4],
}

impl Permutation {
    pub fn new(alphabet: Alphabet, mapping: &[Letter]) -> Result<Self> {
        if mapping.len() != alphabet.size() {
            return Err(Error::AlphabetSize(mapping.len()));
        }
        let mut seen = [false; 4];
        let mut map = [0; 4];
        for (i, &l) in mapping.iter().enumerate() {
            if !alphabet.contains(l) || seen[l as usize] {
                return Err(Error::LetterRange { letter: l, size: alphabet.size() });
            }
            seen[l as usize] = true;
            map[i] = l;
        }
        Ok(Permutation { alphabet, map })
    }

    /// The ternary cycle (0 1 2): 0 -> 1 -> 2 -> 0.
    pub fn cycle012() -> Self {
        Permutation { alphabet: Alphabet::TERNARY, map: [1, 2, 0, 3] }
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        Permutation { alphabet, map: [0, 1, 2, 3] }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn apply_letter(&self, l: Letter) -> Letter {
        debug_assert!(self.alphabet.contains(l));
        self.map[l as usize]
    }

    pub fn apply_word(&self, w: &Word) -> Word {
        let letters = w.letters().iter().map(|&l| self.apply_letter(l)).collect();
        Word::new(w.alphabet(), letters).expect("permutation preserves the alphabet")
    }

    pub fn pow(&self, k: usize) -> Permutation {
        let mut out = Permutation::identity(self.alphabet);
        for _ in 0..k {
            out = out.then(self);
        }
        out
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.alphabet, other.alphabet);
        let mut map = [0; 4];
        for l in 0..4 {
            map[l] = if l < self.alphabet.size() {
                other.map[self.map[l] as usize]
            } else {
                l as Letter
            };
        }
        Permutation { alphabet: self.alphabet, map }
    }

    /// Letterwise image of a stream.
    pub fn apply_stream(&self, src: &Arc<WordStream>) -> WordStream {
        let perm = *self;
        let src = Arc::clone(src);
        WordStream::from_fn(src.alphabet(), move |i| perm.apply_letter(src.letter(i)))
    }
}

/// A morphism `h: A* -> B*` given by one image word per domain letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    domain: Alphabet,
    codomain: Alphabet,
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(domain: Alphabet, codomain: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != domain.size() {
            return Err(Error::MissingImage(images.len() as Letter));
        }
        for (a, im) in images.iter().enumerate() {
            if im.is_empty() {
                return Err(Error::EmptyImage(a as Letter));
            }
            if let Some(&l) = im.letters().iter().find(|&&l| !codomain.contains(l)) {
                return Err(Error::LetterRange { letter: l, size: codomain.size() });
            }
        }
        Ok(Morphism { domain, codomain, images })
    }

    /// Ternary-to-ternary convenience constructor.
    pub fn ternary(images: [&str; 3]) -> Self {
        let images = images.iter().map(|s| Word::ternary(s)).collect();
        Morphism::new(Alphabet::TERNARY, Alphabet::TERNARY, images).expect("valid ternary images")
    }

    pub fn domain(&self) -> Alphabet {
        self.domain
    }

    pub fn codomain(&self) -> Alphabet {
        self.codomain
    }

    pub fn image(&self, a: Letter) -> &Word {
        &self.images[a as usize]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Common image length, if uniform.
    pub fn uniform_len(&self) -> Option<usize> {
        let n = self.images[0].len();
        self.images.iter().all(|im| im.len() == n).then_some(n)
    }

    /// Image of a finite word: concatenation of letter images in order.
    ///
    /// Panics if `w` contains letters outside the domain; CLI paths validate
    /// first via [`Morphism::check_domain`].
    pub fn apply(&self, w: &Word) -> Word {
        let total: usize = w.letters().iter().map(|&a| self.image_len(a)).sum();
        let mut letters = Vec::with_capacity(total);
        for &a in w.letters() {
            assert!(self.domain.contains(a), "letter {} outside morphism domain", a);
            letters.extend_from_slice(self.images[a as usize].letters());
        }
        Word::new(self.codomain, letters).expect("images are validated at construction")
    }

    fn image_len(&self, a: Letter) -> usize {
        assert!(self.domain.contains(a), "letter {} outside morphism domain", a);
        self.images[a as usize].len()
    }

    pub fn check_domain(&self, w: &Word) -> Result<()> {
        if w.alphabet().size() > self.domain.size() {
            if let Some(&l) = w.letters().iter().find(|&&l| !self.domain.contains(l)) {
                return Err(Error::DomainMismatch { word: l as usize + 1, domain: self.domain.size() });
            }
        }
        Ok(())
    }

    /// Image of a stream, as a stream.
    pub fn apply_stream(&self, src: &Arc<WordStream>) -> WordStream {
        struct ImageSource {
            h: Morphism,
            src: Arc<WordStream>,
            consumed: usize,
        }
        impl LetterSource for ImageSource {
            fn fill(&mut self, cache: &mut Vec<Letter>, want: usize) {
                while cache.len() < want {
                    match self.src.try_letter(self.consumed) {
                        Some(a) => {
                            cache.extend_from_slice(self.h.images[a as usize].letters());
                            self.consumed += 1;
                        }
                        None => return,
                    }
                }
            }
        }
        WordStream::from_source(
            self.codomain,
            Box::new(ImageSource { h: self.clone(), src: Arc::clone(src), consumed: 0 }),
        )
    }

    /// `(self . other)(a) = self(other(a))`.
    pub fn compose(&self, other: &Morphism) -> Morphism {
        assert!(
            other.codomain.size() <= self.domain.size(),
            "inner codomain exceeds outer domain"
        );
        let images = other.images.iter().map(|im| self.apply(im)).collect();
        Morphism { domain: other.domain, codomain: self.codomain, images }
    }

    /// `h_p(a) = [h(a)]_p`; requires `p` to divide every image length.
    pub fn subsample(&self, p: usize) -> Result<Morphism> {
        assert!(p >= 1);
        for (a, im) in self.images.iter().enumerate() {
            if im.len() % p != 0 {
                return Err(Error::Divisibility { p, letter: a as Letter, len: im.len() });
            }
        }
        let images = self.images.iter().map(|im| im.subsample(p, 0)).collect();
        Ok(Morphism { domain: self.domain, codomain: self.codomain, images })
    }

    /// `conj(a) = c^-1 h(a) c`; requires every image to begin with `c`.
    pub fn conjugate(&self, c: Letter) -> Result<Morphism> {
        let mut images = Vec::with_capacity(self.images.len());
        for (a, im) in self.images.iter().enumerate() {
            if im.letters().first() != Some(&c) {
                return Err(Error::ConjugacyPrefix(a as Letter, c));
            }
            let mut letters = im.letters()[1..].to_vec();
            letters.push(c);
            images.push(Word::new(self.codomain, letters).expect("same alphabet"));
        }
        Ok(Morphism { domain: self.domain, codomain: self.codomain, images })
    }

    /// Ternary morphism with `h(0) = image0`, `h(1) = pi(h(0))`,
    /// `h(2) = pi(h(1))` for the cycle `pi = (0 1 2)`.
    pub fn cyclic_shift(image0: Word) -> Morphism {
        let pi = Permutation::cycle012();
        let img1 = pi.apply_word(&image0);
        let img2 = pi.apply_word(&img1);
        Morphism {
            domain: Alphabet::TERNARY,
            codomain: image0.alphabet(),
            images: vec![image0, img1, img2],
        }
    }

    /// Length of the longest common prefix of the letter images.
    pub fn lcp(&self) -> usize {
        let slices: Vec<&[Letter]> = self.images.iter().map(|im| im.letters()).collect();
        crate::words::common_prefix_len(&slices)
    }

    /// The fixed point `h^w(a)` for `h(a) = a u`, `|h(a)| >= 2`.
    pub fn fixed_point(&self, a: Letter) -> Result<WordStream> {
        let im = &self.images[a as usize];
        if im.letters().first() != Some(&a) || im.len() < 2 {
            return Err(Error::NotProlongable(a));
        }
        struct FixedPoint {
            h: Morphism,
            seed: Letter,
            ptr: usize,
        }
        impl LetterSource for FixedPoint {
            fn fill(&mut self, cache: &mut Vec<Letter>, want: usize) {
                if cache.is_empty() {
                    cache.extend_from_slice(self.h.images[self.seed as usize].letters());
                    self.ptr = 1;
                }
                while cache.len() < want {
                    let a = cache[self.ptr];
                    cache.extend_from_slice(self.h.images[a as usize].letters());
                    self.ptr += 1;
                }
            }
        }
        Ok(WordStream::from_source(
            self.codomain,
            Box::new(FixedPoint { h: self.clone(), seed: a, ptr: 0 }),
        ))
    }

    pub fn parse(text: &str) -> Result<Morphism> {
        let multi = MultiMorphism::parse(text)?;
        multi.into_single()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, im) in self.images.iter().enumerate() {
            out.push_str(&format!("{} -> {}\n", a, im));
        }
        out
    }
}

/// A letter-to-set-of-words map; image alternatives are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiMorphism {
    domain: Alphabet,
    codomain: Alphabet,
    alternatives: Vec<Vec<Word>>,
}

impl MultiMorphism {
    pub fn new(domain: Alphabet, codomain: Alphabet, alternatives: Vec<Vec<Word>>) -> Result<Self> {
        if alternatives.len() != domain.size() {
            return Err(Error::MissingImage(alternatives.len() as Letter));
        }
        for (a, alts) in alternatives.iter().enumerate() {
            if alts.is_empty() {
                return Err(Error::MissingImage(a as Letter));
            }
            for (i, alt) in alts.iter().enumerate() {
                if alt.is_empty() {
                    return Err(Error::EmptyImage(a as Letter));
                }
                if alts[..i].contains(alt) {
                    return Err(Error::MorphismParse {
                        line: 0,
                        msg: format!("duplicate alternative for letter {}", a),
                    });
                }
            }
        }
        Ok(MultiMorphism { domain, codomain, alternatives })
    }

    pub fn domain(&self) -> Alphabet {
        self.domain
    }

    pub fn codomain(&self) -> Alphabet {
        self.codomain
    }

    pub fn alternatives(&self, a: Letter) -> &[Word] {
        &self.alternatives[a as usize]
    }

    pub fn alternative_counts(&self) -> Vec<usize> {
        self.alternatives.iter().map(|alts| alts.len()).collect()
    }

    /// Image of `w` under one choice assignment: `choices[i]` selects the
    /// alternative for position `i`.
    pub fn apply_with_choices(&self, w: &Word, choices: &[usize]) -> Word {
        assert_eq!(w.len(), choices.len());
        let mut letters = Vec::new();
        for (&a, &c) in w.letters().iter().zip(choices) {
            letters.extend_from_slice(self.alternatives[a as usize][c].letters());
        }
        Word::new(self.codomain, letters).expect("alternatives validated at construction")
    }

    /// The single-valued morphism picking alternative `index` for every letter.
    pub fn select(&self, index: usize) -> Result<Morphism> {
        let images = self
            .alternatives
            .iter()
            .map(|alts| alts.get(index).cloned().ok_or(Error::MissingImage(index as Letter)))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(self.domain, self.codomain, images)
    }

    pub fn into_single(self) -> Result<Morphism> {
        for (a, alts) in self.alternatives.iter().enumerate() {
            if alts.len() != 1 {
                return Err(Error::MorphismParse {
                    line: 0,
                    msg: format!("letter {} has {} alternatives, expected 1", a, alts.len()),
                });
            }
        }
        let images = self.alternatives.into_iter().map(|mut alts| alts.pop().unwrap()).collect();
        Morphism::new(self.domain, self.codomain, images)
    }

    pub fn parse(text: &str) -> Result<MultiMorphism> {
        let mut per_letter: Vec<Vec<Word>> = Vec::new();
        let mut max_letter: Option<Letter> = None;
        let mut max_image_letter: Letter = 1;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::MorphismParse { line: lineno + 1, msg: msg.to_string() };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected `letter -> image`"))?;
            let letter: Letter = lhs.trim().parse().map_err(|_| err("bad letter"))?;
            if letter > 3 {
                return Err(err("letter out of range"));
            }
            let digits = rhs.trim();
            if digits.is_empty() {
                return Err(err("empty image"));
            }
            let mut letters = Vec::with_capacity(digits.len());
            for c in digits.chars() {
                let l = c.to_digit(10).ok_or(Error::BadDigit(c))? as Letter;
                if l > 3 {
                    return Err(err("image digit out of range"));
                }
                max_image_letter = max_image_letter.max(l);
                letters.push(l);
            }
            while per_letter.len() <= letter as usize {
                per_letter.push(Vec::new());
            }
            max_letter = Some(max_letter.map_or(letter, |m| m.max(letter)));
            let word = Word::new(Alphabet::QUATERNARY, letters).expect("digits <= 3");
            per_letter[letter as usize].push(word);
        }
        let max_letter = max_letter.ok_or(Error::MorphismParse { line: 0, msg: "no images".into() })?;
        let domain = Alphabet::new((max_letter as usize + 1).max(2))?;
        let codomain = Alphabet::new((max_image_letter as usize + 1).max(2))?;
        let alternatives = per_letter
            .into_iter()
            .map(|alts| {
                alts.into_iter()
                    .map(|w| Word::new(codomain, w.into_letters()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MultiMorphism::new(domain, codomain, alternatives)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, alts) in self.alternatives.iter().enumerate() {
            for alt in alts {
                out.push_str(&format!("{} -> {}\n", a, alt));
            }
        }
        out
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// The Hall-Thue morphism tau: 0 -> 012, 1 -> 02, 2 -> 1.
pub fn tau() -> Morphism {
    Morphism::ternary(["012", "02", "1"])
}

/// tau^3, validated against composing tau three times.
pub fn tau_cubed() -> Morphism {
    let t = tau();
    let cubed = t.compose(&t.compose(&t));
    let expected = Morphism::ternary(["012021012102", "01202102", "0121"]);
    assert_eq!(cubed, expected, "tau^3 drifted from its literal images");
    cubed
}

/// The Thue word vtm = tau^w(0) = 012021012102012...
pub fn vtm() -> WordStream {
    tau().fixed_point(0).expect("tau is prolongable on 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tau_images() {
        assert_eq!(tau().apply(&Word::ternary("0")), Word::ternary("012"));
        assert_eq!(tau().apply(&Word::ternary("012")), Word::ternary("012021"));
    }

    #[test]
    fn identity_apply() {
        let id = Morphism::ternary(["0", "1", "2"]);
        let w = Word::ternary("0120212");
        assert_eq!(id.apply(&w), w);
        assert_eq!(id.compose(&tau()), tau());
        assert_eq!(tau().compose(&id), tau());
    }

    #[test]
    fn tau_cubed_images() {
        let t3 = tau_cubed();
        assert_eq!(t3.image(0), &Word::ternary("012021012102"));
        assert_eq!(t3.image(1), &Word::ternary("01202102"));
        assert_eq!(t3.image(2), &Word::ternary("0121"));
    }

    #[test]
    fn vtm_prefix() {
        assert_eq!(vtm().prefix(15), Word::ternary("012021012102012"));
    }

    #[test]
    fn fixed_point_invariance() {
        let s = Arc::new(vtm());
        let t = tau();
        for n in [1usize, 10, 100, 10_000] {
            let p = s.prefix(n);
            assert!(t.apply(&p).starts_with(&p));
        }
        // a second, binary fixture: a -> ab, b -> a (Fibonacci word)
        let alpha = Alphabet::BINARY;
        let fib = Morphism::new(
            alpha,
            alpha,
            vec![
                Word::from_digits(alpha, "01").unwrap(),
                Word::from_digits(alpha, "0").unwrap(),
            ],
        )
        .unwrap();
        let s = fib.fixed_point(0).unwrap();
        let p = s.prefix(500);
        assert!(fib.apply(&p).starts_with(&p));
    }

    #[test]
    fn fixed_point_requires_prolongable() {
        assert!(matches!(tau().fixed_point(2), Err(Error::NotProlongable(2))));
        assert!(matches!(tau().fixed_point(1), Err(Error::NotProlongable(1))));
    }

    #[test]
    fn vtm_ones_mod_four() {
        let s = vtm();
        s.with_prefix(100_000, |w| {
            for i in (1..w.len()).step_by(4) {
                assert_eq!(w[i], 1, "position {}", i);
            }
        });
    }

    #[test]
    fn subsample_morphism_lengths() {
        let t = tau_cubed();
        let t3_sub = t.subsample(4).unwrap();
        assert_eq!(t3_sub.image(0).len(), 3);
        assert!(matches!(tau().subsample(2), Err(Error::Divisibility { .. })));
        assert_eq!(t.subsample(1).unwrap(), t);
    }

    #[test]
    fn conjugate_shifts_leading_letter() {
        let h = Morphism::ternary(["012", "021", "0120"]);
        let conj = h.conjugate(0).unwrap();
        assert_eq!(conj.image(0), &Word::ternary("120"));
        assert_eq!(conj.image(1), &Word::ternary("210"));
        assert_eq!(conj.image(2), &Word::ternary("1200"));
        assert!(matches!(tau().conjugate(0), Err(Error::ConjugacyPrefix(2, 0))));
        // degenerate: all images "0" conjugate to themselves
        let z = Morphism::ternary(["0", "0", "0"]);
        assert_eq!(z.conjugate(0).unwrap(), z);
    }

    #[test]
    fn cyclic_shift_images() {
        let h = Morphism::cyclic_shift(Word::ternary("012"));
        assert_eq!(h.image(1), &Word::ternary("120"));
        assert_eq!(h.image(2), &Word::ternary("201"));
        // pi^3 = identity: pi(h(2)) = h(0)
        let pi = Permutation::cycle012();
        assert_eq!(pi.apply_word(h.image(2)), *h.image(0));
        assert_eq!(h.lcp(), 0);
    }

    #[test]
    fn permutation_cycle_order() {
        let pi = Permutation::cycle012();
        assert_eq!(pi.pow(3), Permutation::identity(Alphabet::TERNARY));
        assert_eq!(pi.pow(1).apply_letter(2), 0);
    }

    #[test]
    fn apply_stream_matches_apply() {
        let s = Arc::new(vtm());
        let t3 = tau_cubed();
        let img = Arc::new(t3.apply_stream(&s));
        let direct = t3.apply(&s.prefix(100));
        assert_eq!(img.prefix(direct.len()), direct);
    }

    #[test]
    fn format_parse_errors() {
        // domain is inferred from the largest letter on the left-hand side
        assert_eq!(Morphism::parse("0 -> 012\n1 -> 02\n").unwrap().domain(), Alphabet::BINARY);
        assert!(Morphism::parse("").is_err());
        assert!(Morphism::parse("0 - 012").is_err());
        assert!(Morphism::parse("5 -> 012").is_err());
        assert!(Morphism::parse("0 -> 0x2").is_err());
    }

    #[test]
    fn multi_parse_and_choices() {
        let text = "# demo\n0 -> 01\n0 -> 012\n1 -> 10\n2 -> 2\n";
        let m = MultiMorphism::parse(text).unwrap();
        assert_eq!(m.alternative_counts(), vec![2, 1, 1]);
        let w = Word::ternary("010");
        assert_eq!(m.apply_with_choices(&w, &[0, 0, 1]), Word::ternary("0110012"));
        assert_eq!(m.to_text(), "0 -> 01\n0 -> 012\n1 -> 10\n2 -> 2\n");
    }

    proptest! {
        #[test]
        fn morphism_text_roundtrip(a in "[0-2]{1,12}", b in "[0-2]{1,12}", c in "[0-2]{1,12}") {
            // codomain is re-inferred from the digits, so compare via text
            let h = Morphism::ternary([&a, &b, &c]);
            let parsed = Morphism::parse(&h.to_text()).unwrap();
            prop_assert_eq!(parsed.to_text(), h.to_text());
            prop_assert_eq!(parsed.images().to_vec().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                            vec![a, b, c]);
        }

        #[test]
        fn conjugation_telescopes(s in "[0-2]{0,20}") {
            // c . conj(w) = h(w) . c whenever every image starts with c
            let h = Morphism::ternary(["012", "021", "00121"]);
            let conj = h.conjugate(0).unwrap();
            let w = Word::ternary(&s);
            let mut lhs = vec![0u8];
            lhs.extend_from_slice(conj.apply(&w).letters());
            let mut rhs = h.apply(&w).into_letters();
            rhs.push(0);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn subsample_morphism_commutes(s in "[0-2]{0,16}") {
            let t3 = tau_cubed();
            let h4 = t3.subsample(4).unwrap();
            let w = Word::ternary(&s);
            prop_assert_eq!(h4.apply(&w), t3.apply(&w).subsample(4, 0));
        }

        #[test]
        fn cyclic_shift_commutes_with_pi(s in "[0-2]{0,16}") {
            let h = Morphism::cyclic_shift(Word::ternary("001221"));
            let pi = Permutation::cycle012();
            let w = Word::ternary(&s);
            prop_assert_eq!(h.apply(&pi.apply_word(&w)), pi.apply_word(&h.apply(&w)));
        }
    }
}
