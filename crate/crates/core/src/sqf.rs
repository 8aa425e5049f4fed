//! Squarefreeness verdicts for morphisms: the two length-bounded criteria
//! (length-5 words for ternary morphisms, length-3 for uniform ones), the
//! multi-valued extension, the three-condition checker for images of the
//! Thue word, and the prime-length premise checker with its bounded
//! zero-progression falsifier.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::morphism::{vtm, Morphism, MultiMorphism};
use crate::stream::WordStream;
use crate::words::{enumerate_squarefree, Alphabet, Letter, Square, Word};
use crate::{Error, Result};

/// A failing input together with the square its image contains.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Counterexample {
    pub input: Word,
    /// Per-position alternative indices, for multi-valued morphisms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choices: Option<Vec<usize>>,
    pub image: Word,
    pub square: Square,
}

/// Outcome of a squarefreeness test. A failing verdict carries the first
/// counterexample in length-then-lexicographic input order, so runs are
/// reproducible.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Verdict {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { pass: true, counterexample: None, note: None }
    }

    pub fn fail(cex: Counterexample) -> Self {
        Verdict { pass: false, counterexample: Some(cex), note: None }
    }

    pub fn fail_note(note: String) -> Self {
        Verdict { pass: false, counterexample: None, note: Some(note) }
    }
}

/// All squarefree words of length `1..=max_len`, in length-then-lex order.
pub fn sqf_inputs(alphabet: Alphabet, max_len: usize) -> Vec<Word> {
    (1..=max_len)
        .flat_map(|n| enumerate_squarefree(alphabet, n).expect("tiny enumeration"))
        .collect()
}

fn check_images<'a>(
    h: &Morphism,
    inputs: impl IntoIterator<Item = &'a Word>,
) -> Verdict {
    for x in inputs {
        let image = h.apply(x);
        if let Some(square) = image.find_square() {
            return Verdict::fail(Counterexample { input: x.clone(), choices: None, image, square });
        }
    }
    Verdict::pass()
}

/// A ternary morphism is squarefree iff it preserves squarefreeness of all
/// squarefree words of length five. Shorter words are included so the
/// counterexample is as small as possible.
pub fn ternary_sqf_test(h: &Morphism) -> Verdict {
    assert_eq!(h.domain().size(), 3, "test applies to ternary-domain morphisms");
    check_images(h, &sqf_inputs(h.domain(), 5))
}

/// A uniform morphism is squarefree iff it preserves squarefreeness of all
/// squarefree words of length three.
pub fn uniform_sqf_test(h: &Morphism) -> Result<Verdict> {
    if h.uniform_len().is_none() {
        return Err(Error::NotUniform(h.images().iter().map(|im| im.len()).collect()));
    }
    Ok(check_images(h, &sqf_inputs(h.domain(), 3)))
}

/// Failing inputs of length `<= max_len` that are minimal: every proper
/// factor maps to a squarefree word. (If a word fails, so does every word
/// containing it, so the minimal set characterizes the failure.)
pub fn minimal_failures(h: &Morphism, max_len: usize) -> Vec<Word> {
    let fails = |w: &[Letter]| {
        let word = Word::new(h.domain(), w.to_vec()).expect("sub-slice of a valid word");
        h.apply(&word).find_square().is_some()
    };
    sqf_inputs(h.domain(), max_len)
        .into_iter()
        .filter(|x| {
            let w = x.letters();
            fails(w) && (w.len() == 1 || (!fails(&w[..w.len() - 1]) && !fails(&w[1..])))
        })
        .collect()
}

/// Verdict plus the number of choice assignments examined.
#[derive(Debug, Clone)]
pub struct MultiVerdict {
    pub verdict: Verdict,
    pub assignments_checked: u64,
}

/// Multi-valued analogue of [`ternary_sqf_test`]: every choice assignment
/// over every squarefree word of length `<= 5` must have a squarefree image.
pub fn multi_sqf_test(h: &MultiMorphism) -> MultiVerdict {
    assert_eq!(h.domain().size(), 3, "test applies to ternary-domain morphisms");
    let mut assignments = 0u64;
    for x in sqf_inputs(h.domain(), 5) {
        let radices: Vec<usize> = x.letters().iter().map(|&a| h.alternatives(a).len()).collect();
        let mut choices = vec![0usize; x.len()];
        loop {
            assignments += 1;
            let image = h.apply_with_choices(&x, &choices);
            if let Some(square) = image.find_square() {
                let cex =
                    Counterexample { input: x, choices: Some(choices), image, square };
                return MultiVerdict { verdict: Verdict::fail(cex), assignments_checked: assignments };
            }
            // next mixed-radix assignment
            let mut i = 0;
            while i < choices.len() {
                choices[i] += 1;
                if choices[i] < radices[i] {
                    break;
                }
                choices[i] = 0;
                i += 1;
            }
            if i == choices.len() {
                break;
            }
        }
    }
    MultiVerdict { verdict: Verdict::pass(), assignments_checked: assignments }
}

/// Configuration for extracting the stabilized factor set of the Thue word.
pub const VTM_FACTOR_LEN: usize = 5;
pub const VTM_FACTOR_BASE_PREFIX: usize = 10_000;
pub const VTM_FACTOR_CHECK_PREFIX: usize = 1_000_000;

struct VtmFactorCache {
    factors: Vec<Word>,
    short: usize,
    long: usize,
}

fn vtm_factor_cache() -> &'static VtmFactorCache {
    static CACHE: OnceLock<VtmFactorCache> = OnceLock::new();
    CACHE.get_or_init(|| {
        let stream = vtm();
        let base = stream.prefix(VTM_FACTOR_BASE_PREFIX).factors(VTM_FACTOR_LEN);
        let check = stream.prefix(VTM_FACTOR_CHECK_PREFIX).factors(VTM_FACTOR_LEN);
        VtmFactorCache {
            factors: base.iter().cloned().collect(),
            short: base.len(),
            long: check.len(),
        }
    })
}

/// The length-5 factors of the Thue word, from a 10^4 prefix, cross-checked
/// for stabilization against a 10^6 prefix. A mismatch is a hard error.
pub fn vtm_factors_len5() -> Result<&'static [Word]> {
    let cache = vtm_factor_cache();
    if cache.short != cache.long {
        return Err(Error::FactorSetUnstable {
            short: cache.short,
            long: cache.long,
            short_len: VTM_FACTOR_BASE_PREFIX,
            long_len: VTM_FACTOR_CHECK_PREFIX,
        });
    }
    Ok(&cache.factors)
}

/// Condition 1: `g(u)` is squarefree for every length-5 factor `u` of the
/// Thue word.
pub fn vtm_cond1(g: &Morphism) -> Result<Verdict> {
    assert_eq!(g.domain().size(), 3);
    Ok(check_images(g, vtm_factors_len5()?))
}

/// Condition 2: enumerate all letter triples `(a,b,c)` admitting a
/// factorization `g(a)=uv`, `g(b)=zv`, `g(c)=zw` with `v != w` and `u != z`.
/// Passes iff the solution set is exactly `{(0,1,0)}`.
pub fn vtm_cond2(g: &Morphism) -> (Verdict, BTreeSet<[Letter; 3]>) {
    assert_eq!(g.domain().size(), 3);
    let mut solutions = BTreeSet::new();
    for a in 0..3u8 {
        for b in 0..3u8 {
            for c in 0..3u8 {
                let (ga, gb, gc) = (g.image(a).letters(), g.image(b).letters(), g.image(c).letters());
                for z_len in 0..=gb.len() {
                    let (z, v) = gb.split_at(z_len);
                    // v a suffix of g(a) defines u; z a prefix of g(c) defines w
                    if ga.len() < v.len() || !ga.ends_with(v) {
                        continue;
                    }
                    if gc.len() < z.len() || !gc.starts_with(z) {
                        continue;
                    }
                    let u = &ga[..ga.len() - v.len()];
                    let w = &gc[z.len()..];
                    if u != z && v != w {
                        solutions.insert([a, b, c]);
                        break;
                    }
                }
            }
        }
    }
    let expected: BTreeSet<[Letter; 3]> = [[0, 1, 0]].into_iter().collect();
    let verdict = if solutions == expected {
        Verdict::pass()
    } else {
        Verdict::fail_note(format!("solution set {:?}, expected {{[0, 1, 0]}}", solutions))
    };
    (verdict, solutions)
}

/// Per-letter suffix witnesses for condition 3.
#[derive(Debug, Clone)]
pub struct CondThreeWitness {
    suffixes: Vec<Word>,
}

impl CondThreeWitness {
    /// One suffix word per domain letter, in letter order.
    pub fn new(suffixes: Vec<Word>) -> Self {
        CondThreeWitness { suffixes }
    }

    pub fn uniform(v: Word, domain: Alphabet) -> Self {
        CondThreeWitness { suffixes: vec![v; domain.size()] }
    }

    pub fn suffix(&self, a: Letter) -> &Word {
        &self.suffixes[a as usize]
    }
}

/// Condition 3, as a boundary-alignment check: for every squarefree word `w`
/// of length `<= 4`, every occurrence of a witness `v_a` in `g(w)` must end
/// exactly at an image boundary of the decomposition. Occurrences ending on
/// a boundary have `z in g(T*)` by construction, so this is a sufficient
/// check for the stated condition; length 4 covers every occurrence window
/// because the witnesses are no longer than the longest image.
pub fn vtm_cond3(g: &Morphism, witness: &CondThreeWitness) -> Result<Verdict> {
    assert_eq!(g.domain().size(), 3);
    for a in g.domain().letters() {
        let v = witness.suffix(a);
        if v.is_empty() || !g.image(a).ends_with(v) {
            return Err(Error::WitnessNotSuffix(a));
        }
    }
    for x in sqf_inputs(g.domain(), 4) {
        let image = g.apply(&x);
        let img = image.letters();
        let mut boundaries = BTreeSet::new();
        let mut acc = 0usize;
        for &letter in x.letters() {
            acc += g.image(letter).len();
            boundaries.insert(acc);
        }
        for a in g.domain().letters() {
            let v = witness.suffix(a).letters();
            if img.len() < v.len() {
                continue;
            }
            for start in 0..=img.len() - v.len() {
                let end = start + v.len();
                if &img[start..end] == v && !boundaries.contains(&end) {
                    return Ok(Verdict::fail_note(format!(
                        "witness v_{} occurs in g({}) ending at offset {}, not an image boundary",
                        a, x, end
                    )));
                }
            }
        }
    }
    Ok(Verdict::pass())
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Premises of the prime-length no-zero-progression theorem.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Theorem10Report {
    pub uniform_len: Option<usize>,
    pub prime_length: bool,
    pub squarefree: bool,
    /// 0 is a prefix of h(0) but not of h(1) or h(2).
    pub zero_prefix_condition: bool,
    pub pass: bool,
}

/// Checks that `h` is uniform of prime length, squarefree, and that `0` is
/// a prefix of `h(0)` but not of `h(1)` or `h(2)`.
pub fn theorem10_premises(h: &Morphism) -> Theorem10Report {
    assert_eq!(h.domain().size(), 3);
    let uniform_len = h.uniform_len();
    let prime_length = uniform_len.is_some_and(is_prime);
    let squarefree = match uniform_sqf_test(h) {
        Ok(v) => v.pass,
        Err(_) => ternary_sqf_test(h).pass,
    };
    let zero_prefix_condition = h.image(0).letters().first() == Some(&0)
        && h.image(1).letters().first() != Some(&0)
        && h.image(2).letters().first() != Some(&0);
    let pass = uniform_len.is_some() && prime_length && squarefree && zero_prefix_condition;
    Theorem10Report { uniform_len, prime_length, squarefree, zero_prefix_condition, pass }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ZeroApEntry {
    pub p: usize,
    /// Least `i <= bound` with `w[i*p] != 0`, or `None` if unrefuted.
    pub refuted_at: Option<usize>,
}

/// Bounded falsification of infinite zero progressions: for each modulus
/// `p <= max_p`, the least index `i <= bound` with `w[i*p] != 0`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ZeroApReport {
    pub bound: usize,
    pub entries: Vec<ZeroApEntry>,
}

impl ZeroApReport {
    pub fn all_refuted(&self) -> bool {
        self.entries.iter().all(|e| e.refuted_at.is_some())
    }
}

pub fn bounded_no_zero_ap(w: &WordStream, max_p: usize, bound: usize) -> ZeroApReport {
    let entries = (1..=max_p)
        .map(|p| {
            let refuted_at = w.with_prefix(bound * p + 1, |letters| {
                (0..=bound).find(|&i| letters.get(i * p).is_some_and(|&l| l != 0))
            });
            ZeroApEntry { p, refuted_at }
        })
        .collect();
    ZeroApReport { bound, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::tau;
    use crate::words::random_squarefree;
    use rand::SeedableRng;

    #[test]
    fn tau_fails_with_canonical_counterexamples() {
        let verdict = ternary_sqf_test(&tau());
        assert!(!verdict.pass);
        let cex = verdict.counterexample.unwrap();
        assert_eq!(cex.input, Word::ternary("010"));
        assert_eq!(cex.image, Word::ternary("01202012"));
        // re-execute the counterexample: it must reproduce the square
        let img = tau().apply(&cex.input);
        assert_eq!(img, cex.image);
        assert_eq!(img.find_square(), Some(cex.square));

        let minimal = minimal_failures(&tau(), 5);
        assert_eq!(minimal, vec![Word::ternary("010"), Word::ternary("02120")]);
    }

    #[test]
    fn identity_is_squarefree_uniform() {
        let id = Morphism::ternary(["0", "1", "2"]);
        assert!(uniform_sqf_test(&id).unwrap().pass);
        assert!(ternary_sqf_test(&id).pass);
    }

    #[test]
    fn non_uniform_input_rejected() {
        assert!(matches!(uniform_sqf_test(&tau()), Err(Error::NotUniform(_))));
    }

    #[test]
    fn ternary_pass_implies_random_spot_check() {
        // squarefree verdict extends beyond the test lengths
        let x11 = Morphism::ternary(["0201021", "012021", "20121"]);
        assert!(ternary_sqf_test(&x11).pass);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let x = random_squarefree(Alphabet::TERNARY, 50, &mut rng);
            assert!(x11.apply(&x).is_squarefree());
        }
    }

    #[test]
    fn multi_degenerate_matches_single() {
        let single = MultiMorphism::new(
            Alphabet::TERNARY,
            Alphabet::TERNARY,
            vec![
                vec![Word::ternary("0201021")],
                vec![Word::ternary("012021")],
                vec![Word::ternary("20121")],
            ],
        )
        .unwrap();
        let mv = multi_sqf_test(&single);
        assert!(mv.verdict.pass);
        assert_eq!(
            mv.verdict.pass,
            ternary_sqf_test(&single.select(0).unwrap()).pass
        );
    }

    #[test]
    fn multi_corrupted_alternative_fails() {
        let bad = MultiMorphism::new(
            Alphabet::TERNARY,
            Alphabet::TERNARY,
            vec![
                vec![Word::ternary("0201021"), Word::ternary("02020")],
                vec![Word::ternary("012021")],
                vec![Word::ternary("20121")],
            ],
        )
        .unwrap();
        let mv = multi_sqf_test(&bad);
        assert!(!mv.verdict.pass);
        let cex = mv.verdict.counterexample.unwrap();
        let image = bad.apply_with_choices(&cex.input, cex.choices.as_ref().unwrap());
        assert_eq!(image.find_square(), Some(cex.square));
    }

    #[test]
    fn vtm_factors_stabilize() {
        let factors = vtm_factors_len5().unwrap();
        assert!(!factors.is_empty());
        // the Thue word avoids 010 and 212, so no factor may contain them
        for f in factors {
            let s = f.to_string();
            assert!(!s.contains("010") && !s.contains("212"), "{}", s);
        }
    }

    #[test]
    fn vtm_cond1_tau_passes_vacuously() {
        // tau is not a squarefree morphism, but its bad words (010, 02120)
        // never occur in the fixed point, so every factor image is clean
        let verdict = vtm_cond1(&tau()).unwrap();
        assert!(verdict.pass);
        assert_eq!(vtm_factors_len5().unwrap().len(), 16);
        assert!(!vtm_factors_len5().unwrap().contains(&Word::ternary("02120")));
    }

    #[test]
    fn vtm_cond2_degenerate_identical_images() {
        let g = Morphism::ternary(["012", "012", "012"]);
        let (verdict, solutions) = vtm_cond2(&g);
        assert!(!verdict.pass);
        assert!(solutions.is_empty());
    }

    #[test]
    fn vtm_cond3_witness_must_be_suffix() {
        let g = Morphism::ternary(["012", "021", "201"]);
        let w = CondThreeWitness::uniform(Word::ternary("00"), Alphabet::TERNARY);
        assert!(matches!(vtm_cond3(&g, &w), Err(Error::WitnessNotSuffix(_))));
    }

    #[test]
    fn theorem10_tau_not_uniform() {
        let report = theorem10_premises(&tau());
        assert!(!report.pass);
        assert_eq!(report.uniform_len, None);
    }

    #[test]
    fn zero_ap_on_constant_and_vtm() {
        let zeros = WordStream::constant(Alphabet::TERNARY, 0);
        let report = bounded_no_zero_ap(&zeros, 5, 100);
        assert!(report.entries.iter().all(|e| e.refuted_at.is_none()));

        let stream = vtm();
        let report = bounded_no_zero_ap(&stream, 4, 100);
        let p4 = &report.entries[3];
        assert_eq!(p4.p, 4);
        assert_eq!(p4.refuted_at, Some(1)); // w[4] = 2
    }

    #[test]
    fn is_prime_small_values() {
        let primes: Vec<usize> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
