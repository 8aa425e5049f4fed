//! Base-2 automatic-sequence machinery: a DFAO that reads the binary
//! expansion of `n` most-significant-digit first, synthesis of such an
//! automaton from a stream by closing the family of subtree subsequences,
//! and the bounded combinatorial checks used on the Thue word.

use std::collections::HashMap;

use crate::stream::WordStream;
use crate::words::{Alphabet, Letter, Word};
use crate::{Error, Result};

/// Deterministic finite automaton with output, reading base-2 digits
/// msd-first. Evaluation of `n = 0` uses the empty input: the output of the
/// initial state. Leading zeros are harmless because the initial state loops
/// on digit 0 in every synthesized automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    initial: usize,
    transitions: Vec<[usize; 2]>,
    outputs: Vec<Letter>,
    alphabet: Alphabet,
}

impl Dfao {
    pub fn new(
        initial: usize,
        transitions: Vec<[usize; 2]>,
        outputs: Vec<Letter>,
        alphabet: Alphabet,
    ) -> Result<Self> {
        let n = transitions.len();
        if outputs.len() != n || initial >= n {
            return Err(Error::DfaoParse { line: 0, msg: "inconsistent state count".into() });
        }
        for t in &transitions {
            if t[0] >= n || t[1] >= n {
                return Err(Error::DfaoParse { line: 0, msg: "transition target out of range".into() });
            }
        }
        for &o in &outputs {
            if !alphabet.contains(o) {
                return Err(Error::LetterRange { letter: o, size: alphabet.size() });
            }
        }
        Ok(Dfao { initial, transitions, outputs, alphabet })
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Output on the canonical (no leading zeros, empty for 0) expansion of `n`.
    pub fn eval(&self, n: u64) -> Letter {
        let mut state = self.initial;
        if n > 0 {
            let bits = 64 - n.leading_zeros();
            for i in (0..bits).rev() {
                let d = ((n >> i) & 1) as usize;
                state = self.transitions[state][d];
            }
        }
        self.outputs[state]
    }

    /// The stream `n -> eval(n)`.
    pub fn stream(&self) -> WordStream {
        let dfao = self.clone();
        WordStream::from_fn(self.alphabet, move |i| dfao.eval(i as u64))
    }

    /// True iff `eval(n) = w[n]` for all `n < upto`.
    pub fn agrees_with(&self, w: &WordStream, upto: usize) -> bool {
        w.with_prefix(upto, |letters| {
            letters.len() >= upto && (0..upto).all(|n| self.eval(n as u64) == letters[n])
        })
    }

    /// Text format: header `states N init I`, then `S d -> T` per transition
    /// and `out S -> letter` per state.
    pub fn to_text(&self) -> String {
        let mut out = format!("states {} init {}\n", self.state_count(), self.initial);
        for (s, t) in self.transitions.iter().enumerate() {
            out.push_str(&format!("{} 0 -> {}\n{} 1 -> {}\n", s, t[0], s, t[1]));
        }
        for (s, &o) in self.outputs.iter().enumerate() {
            out.push_str(&format!("out {} -> {}\n", s, o));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Dfao> {
        let mut states = None;
        let mut init = 0usize;
        let mut transitions: Vec<[Option<usize>; 2]> = Vec::new();
        let mut outputs: Vec<Option<Letter>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::DfaoParse { line: lineno + 1, msg: msg.into() };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["states", n, "init", i] => {
                    let n: usize = n.parse().map_err(|_| err("bad state count"))?;
                    init = i.parse().map_err(|_| err("bad initial state"))?;
                    transitions = vec![[None; 2]; n];
                    outputs = vec![None; n];
                    states = Some(n);
                }
                ["out", s, "->", o] => {
                    let s: usize = s.parse().map_err(|_| err("bad state"))?;
                    let o: Letter = o.parse().map_err(|_| err("bad output"))?;
                    *outputs.get_mut(s).ok_or_else(|| err("state out of range"))? = Some(o);
                }
                [s, d, "->", t] => {
                    let s: usize = s.parse().map_err(|_| err("bad state"))?;
                    let d: usize = d.parse().map_err(|_| err("bad digit"))?;
                    let t: usize = t.parse().map_err(|_| err("bad target"))?;
                    if d > 1 {
                        return Err(err("digit must be 0 or 1"));
                    }
                    transitions.get_mut(s).ok_or_else(|| err("state out of range"))?[d] = Some(t);
                }
                _ => return Err(err("unrecognized line")),
            }
        }
        let n = states.ok_or(Error::DfaoParse { line: 0, msg: "missing header".into() })?;
        let transitions = transitions
            .into_iter()
            .enumerate()
            .map(|(s, t)| match (t[0], t[1]) {
                (Some(a), Some(b)) => Ok([a, b]),
                _ => Err(Error::DfaoParse { line: 0, msg: format!("state {} missing transition", s) }),
            })
            .collect::<Result<Vec<_>>>()?;
        let outputs = outputs
            .into_iter()
            .enumerate()
            .map(|(s, o)| o.ok_or(Error::DfaoParse { line: 0, msg: format!("state {} missing output", s) }))
            .collect::<Result<Vec<_>>>()?;
        let max_letter = outputs.iter().copied().max().unwrap_or(0);
        let alphabet = Alphabet::new((max_letter as usize + 1).max(2))?;
        let _ = n;
        Dfao::new(init, transitions, outputs, alphabet)
    }
}

pub const DEFAULT_COMPARE_LEN: usize = 1 << 16;
pub const DEFAULT_STATE_CAP: usize = 64;
const PREFIX_HARD_CAP: u64 = 1 << 28;

/// Synthesize the msd-first DFAO of a (presumed) 2-automatic stream.
///
/// States correspond to binary subtrees of indices: reading the msd prefix
/// with value `m` determines the family of subsequences
/// `y -> w[m * 2^j + y]`, `0 <= y < 2^j`. Two values of `m` are identified
/// when the first `compare_len` letters of that family (concatenated level
/// by level) agree. The result is heuristic in `compare_len` and must be
/// validated downstream against the stream itself.
pub fn kernel_synthesize(w: &WordStream, compare_len: usize) -> Result<Dfao> {
    kernel_synthesize_capped(w, compare_len, DEFAULT_STATE_CAP)
}

pub fn kernel_synthesize_capped(w: &WordStream, compare_len: usize, state_cap: usize) -> Result<Dfao> {
    assert!(compare_len >= 1);
    let signature = |m: u64| -> Result<Vec<Letter>> {
        let mut sig = Vec::with_capacity(compare_len);
        let mut level = 0u32;
        while sig.len() < compare_len {
            let width = 1u64 << level;
            let base = m
                .checked_mul(width)
                .filter(|&b| b + width <= PREFIX_HARD_CAP)
                .ok_or(Error::PrefixCap { needed: u64::MAX, cap: PREFIX_HARD_CAP })?;
            let take = (compare_len - sig.len()).min(width as usize);
            w.with_prefix((base + take as u64) as usize, |letters| {
                if letters.len() < (base + take as u64) as usize {
                    return Err(Error::PrefixCap { needed: base + take as u64, cap: letters.len() as u64 });
                }
                sig.extend_from_slice(&letters[base as usize..base as usize + take]);
                Ok(())
            })?;
            level += 1;
        }
        Ok(sig)
    };

    let mut class_of: HashMap<Vec<Letter>, usize> = HashMap::new();
    let mut reps: Vec<u64> = Vec::new();
    let mut transitions: Vec<[usize; 2]> = Vec::new();
    let mut outputs: Vec<Letter> = Vec::new();

    let mut intern = |m: u64,
                      class_of: &mut HashMap<Vec<Letter>, usize>,
                      reps: &mut Vec<u64>,
                      transitions: &mut Vec<[usize; 2]>,
                      outputs: &mut Vec<Letter>|
     -> Result<usize> {
        let sig = signature(m)?;
        if let Some(&id) = class_of.get(&sig) {
            return Ok(id);
        }
        let id = reps.len();
        if id >= state_cap {
            return Err(Error::StateCap { cap: state_cap });
        }
        outputs.push(sig[0]);
        class_of.insert(sig, id);
        reps.push(m);
        transitions.push([usize::MAX; 2]);
        Ok(id)
    };

    intern(0, &mut class_of, &mut reps, &mut transitions, &mut outputs)?;
    let mut next = 0usize;
    while next < reps.len() {
        let m = reps[next];
        for d in 0..2u64 {
            let child = intern(2 * m + d, &mut class_of, &mut reps, &mut transitions, &mut outputs)?;
            transitions[next][d as usize] = child;
        }
        next += 1;
    }
    Dfao::new(0, transitions, outputs, w.alphabet())
}

/// Per-gap result of the bounded first-equals-last search.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SflEntry {
    pub k: usize,
    /// Least `i <= bound` with `w[i] = w[i+k] in {0, 2}`.
    pub witness: Option<usize>,
    /// Least such `i` that is also `= 0 (mod k)`.
    pub aligned_witness: Option<usize>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SflReport {
    pub bound: usize,
    pub entries: Vec<SflEntry>,
}

impl SflReport {
    pub fn all_witnessed(&self) -> bool {
        self.entries.iter().all(|e| e.witness.is_some())
    }
}

/// For each gap `2 <= k <= max_k`, the least position `i <= bound` at which
/// the letters `i` and `i + k` are both 0 or both 2.
pub fn same_first_last_bounded(w: &WordStream, max_k: usize, bound: usize) -> SflReport {
    w.with_prefix(bound + max_k + 1, |letters| {
        let entries = (2..=max_k)
            .map(|k| {
                let hit = |i: usize| {
                    let (a, b) = (letters[i], letters[i + k]);
                    a == b && (a == 0 || a == 2)
                };
                let limit = bound.min(letters.len().saturating_sub(k + 1));
                let witness = (0..=limit).find(|&i| hit(i));
                let aligned_witness = (0..=limit).step_by(k).find(|&i| hit(i));
                SflEntry { k, witness, aligned_witness }
            })
            .collect();
        SflReport { bound, entries }
    })
}

/// First occurrence position of `u` in each residue class modulo `k`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResidueReport {
    pub factor: Word,
    pub modulus: usize,
    /// Index `r` holds the least occurrence position `= r (mod k)`, if any
    /// below the bound.
    pub first_occurrence: Vec<Option<usize>>,
}

impl ResidueReport {
    pub fn all_covered(&self) -> bool {
        self.first_occurrence.iter().all(|o| o.is_some())
    }
}

/// Scan for occurrences of the factor `u` below `bound`, recording the first
/// occurrence in each congruence class modulo odd `k`.
pub fn residue_coverage(w: &WordStream, u: &Word, k: usize, bound: usize) -> ResidueReport {
    assert!(k >= 1 && k % 2 == 1, "modulus must be odd");
    let pat = u.letters();
    w.with_prefix(bound + pat.len(), |letters| {
        let mut first: Vec<Option<usize>> = vec![None; k];
        let mut missing = k;
        let limit = bound.min(letters.len().saturating_sub(pat.len()));
        for i in 0..limit {
            if first[i % k].is_none() && letters[i..i + pat.len()] == *pat {
                first[i % k] = Some(i);
                missing -= 1;
                if missing == 0 {
                    break;
                }
            }
        }
        ResidueReport { factor: u.clone(), modulus: k, first_occurrence: first }
    })
}

/// Result of checking `w[i] in {0,2}  =>  w[2i] = w[i]` below a bound.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DoublingReport {
    pub bound: usize,
    /// First violating index, if any.
    pub violation: Option<usize>,
}

impl DoublingReport {
    pub fn clean(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn doubling_check(w: &WordStream, bound: usize) -> DoublingReport {
    w.with_prefix(2 * bound, |letters| {
        let limit = bound.min(letters.len() / 2);
        let violation = (0..limit)
            .find(|&i| (letters[i] == 0 || letters[i] == 2) && letters[2 * i] != letters[i]);
        DoublingReport { bound, violation }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{vtm, Permutation};
    use std::sync::Arc;

    fn thue_morse() -> WordStream {
        WordStream::from_fn(Alphabet::BINARY, |i| (i.count_ones() % 2) as u8)
    }

    #[test]
    fn constant_stream_gives_one_state() {
        let w = WordStream::constant(Alphabet::TERNARY, 0);
        let dfao = kernel_synthesize(&w, 256).unwrap();
        assert_eq!(dfao.state_count(), 1);
        assert_eq!(dfao.eval(12345), 0);
    }

    #[test]
    fn thue_morse_gives_two_states() {
        let dfao = kernel_synthesize(&thue_morse(), 1024).unwrap();
        assert_eq!(dfao.state_count(), 2);
        assert!(dfao.agrees_with(&thue_morse(), 1 << 14));
    }

    #[test]
    fn vtm_synthesis_validates() {
        let w = vtm();
        let dfao = kernel_synthesize(&w, 1 << 12).unwrap();
        assert!(dfao.agrees_with(&vtm(), 1 << 16));
        assert_eq!(dfao.eval(0), 0);
        assert_eq!(dfao.eval(2), 2);
        assert_eq!(dfao.eval(4), 2);
        // permuted outputs must disagree
        let pi = Permutation::cycle012();
        let permuted = pi.apply_stream(&Arc::new(vtm()));
        assert!(!dfao.agrees_with(&permuted, 100));
    }

    #[test]
    fn synthesis_fixpoint_state_count() {
        let dfao = kernel_synthesize(&vtm(), 1 << 12).unwrap();
        let again = kernel_synthesize(&dfao.stream(), 1 << 12).unwrap();
        assert_eq!(dfao.state_count(), again.state_count());
    }

    #[test]
    fn doubling_structure_of_eval() {
        let dfao = kernel_synthesize(&vtm(), 1 << 12).unwrap();
        // appending digit 0 is exactly doubling
        for n in 1u64..512 {
            let mut state = dfao.initial;
            let bits = 64 - n.leading_zeros();
            for i in (0..bits).rev() {
                state = dfao.transitions[state][((n >> i) & 1) as usize];
            }
            let doubled = dfao.transitions[state][0];
            assert_eq!(dfao.outputs[doubled], dfao.eval(2 * n));
        }
    }

    #[test]
    fn state_cap_errors() {
        // a stream that is not 2-automatic at this compare length: random-ish
        let w = WordStream::from_fn(Alphabet::TERNARY, |i| {
            let x = (i as u64).wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 33) % 3) as u8
        });
        assert!(matches!(
            kernel_synthesize_capped(&w, 64, 8),
            Err(Error::StateCap { cap: 8 })
        ));
    }

    #[test]
    fn text_roundtrip() {
        let dfao = kernel_synthesize(&thue_morse(), 1024).unwrap();
        let parsed = Dfao::parse(&dfao.to_text()).unwrap();
        assert_eq!(parsed, dfao);
        assert!(Dfao::parse("states 1 init 0\n0 0 -> 0\n").is_err()); // missing digit-1 and output
    }

    #[test]
    fn same_first_last_small_cases() {
        let zeros = WordStream::constant(Alphabet::TERNARY, 0);
        let report = same_first_last_bounded(&zeros, 6, 100);
        assert!(report.entries.iter().all(|e| e.witness == Some(0)));

        let cyc = WordStream::periodic(Word::ternary("012"));
        let report = same_first_last_bounded(&cyc, 3, 100);
        let k3 = report.entries.iter().find(|e| e.k == 3).unwrap();
        assert_eq!(k3.witness, Some(0));
    }

    #[test]
    fn residue_coverage_on_vtm() {
        let w = vtm();
        let report = residue_coverage(&w, &Word::ternary("0"), 3, 10_000);
        assert!(report.all_covered());
        let trivial = residue_coverage(&w, &Word::ternary("012"), 1, 100);
        assert!(trivial.all_covered());
    }

    #[test]
    fn doubling_on_vtm_and_mutant() {
        let report = doubling_check(&vtm(), 1 << 12);
        assert!(report.clean());

        // flip one letter: the check must localize a violation at the flip
        // or its half
        let flip_at = 1000usize;
        let base = Arc::new(vtm());
        let orig = base.letter(flip_at);
        let mutated = WordStream::from_fn(Alphabet::TERNARY, move |i| {
            let l = base.letter(i);
            if i == flip_at {
                (l + 1) % 3
            } else {
                l
            }
        });
        let report = doubling_check(&mutated, 1 << 11);
        let v = report.violation.expect("mutation must be caught");
        assert!(v == flip_at || v == flip_at / 2, "violation at {}", v);
        let _ = orig;
    }
}
