//! Positive/negative sample-set generation.
//!
//! Two generators feed the evolutionary runs:
//!
//! - `bss` ("balanced short strings") walks all ternary strings in shortlex
//!   order (by length, then `a < b < c`) and takes members and non-members
//!   alternately, so both sets fill with the earliest possible strings while
//!   staying balanced. It is fully deterministic.
//! - `rle:<n>` ("random, length at most n") draws strings of length `0..=n`
//!   uniformly from that pool — a length `L` is chosen with probability
//!   proportional to `3^L`, the number of strings of that length — and keeps
//!   drawing until both sets hold `D/2` distinct strings.
//!
//! Sample sets persist to a two-column text file `label,string` with labels
//! `+`/`-`; the empty string is written as an empty field.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::fsm::{format_symbols, parse_symbols, Fsm, Symbol};
use crate::rng::RandomSource;
use crate::witness::{census, MAX_CENSUS_LEN};

/// Length bound on the `bss` enumeration; a target language must hold
/// enough members and non-members within this bound.
pub const BSS_LENGTH_CAP: usize = 32;

/// Hard bound on strings the `bss` walk may visit. Any target that passes
/// the census precheck finishes far below this.
pub const BSS_ENUM_CAP: u64 = 100_000_000;

/// Upper bound on rejected draws in `rle` before the generator reports a
/// pathological configuration.
pub const RLE_DRAW_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("sample total must be even, got {0}")]
    OddTotal(usize),
    #[error(
        "infeasible sample set: need {need} members and {need} non-members of \
         length <= {max_len}, but the language has {members} members and \
         {non_members} non-members there"
    )]
    Infeasible {
        max_len: usize,
        need: u64,
        members: u64,
        non_members: u64,
    },
    #[error("rle max length {0} exceeds the supported bound {MAX_CENSUS_LEN}")]
    LengthTooLarge(usize),
    #[error(
        "degenerate target: only {members} members and {non_members} non-members of \
         length <= {BSS_LENGTH_CAP} exist, need {need} of each"
    )]
    DegenerateTarget {
        need: u64,
        members: u64,
        non_members: u64,
    },
    #[error("balanced enumeration gave up after visiting {BSS_ENUM_CAP} strings")]
    EnumerationCapExceeded,
    #[error("gave up after {RLE_DRAW_CAP} draws without filling the sets")]
    DrawCapExceeded,
    #[error("sample file line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("string {string:?} is labeled '{label}' but the reference machine disagrees")]
    LabelMismatch { label: char, string: String },
    #[error("string {0:?} appears more than once")]
    Duplicate(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Which generator produced a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleMethod {
    Bss,
    Rle { max_len: usize },
}

impl SampleMethod {
    /// File- and column-safe name: `bss`, `rle7`, ...
    pub fn label(self) -> String {
        match self {
            SampleMethod::Bss => "bss".to_string(),
            SampleMethod::Rle { max_len } => format!("rle{max_len}"),
        }
    }
}

impl std::fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleMethod::Bss => write!(f, "bss"),
            SampleMethod::Rle { max_len } => write!(f, "rle:{max_len}"),
        }
    }
}

impl std::str::FromStr for SampleMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("bss") {
            return Ok(SampleMethod::Bss);
        }
        if let Some(n) = s.strip_prefix("rle:").or_else(|| s.strip_prefix("RLE:")) {
            let max_len = n
                .parse::<usize>()
                .map_err(|_| format!("bad rle length in {s:?}"))?;
            return Ok(SampleMethod::Rle { max_len });
        }
        Err(format!("unknown sampler {s:?}; expected bss or rle:<n>"))
    }
}

/// Paired positive (`accept`) and negative (`reject`) example strings.
///
/// Both sets are duplicate-free, disjoint, and label-correct with respect to
/// the machine they were generated from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    method: SampleMethod,
    target_total: usize,
    accept: Vec<Vec<Symbol>>,
    reject: Vec<Vec<Symbol>>,
}

impl SampleSet {
    pub fn method(&self) -> SampleMethod {
        self.method
    }

    /// The requested total size D.
    pub fn target_total(&self) -> usize {
        self.target_total
    }

    pub fn accept(&self) -> &[Vec<Symbol>] {
        &self.accept
    }

    pub fn reject(&self) -> &[Vec<Symbol>] {
        &self.reject
    }

    pub fn len(&self) -> usize {
        self.accept.len() + self.reject.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accept.is_empty() && self.reject.is_empty()
    }

    /// Check label correctness against `witness` plus duplicate-freeness.
    pub fn validate_against(&self, witness: &Fsm) -> Result<(), SampleError> {
        let mut seen = HashSet::new();
        for (strings, positive) in [(&self.accept, true), (&self.reject, false)] {
            for s in strings.iter() {
                if !seen.insert(s.clone()) {
                    return Err(SampleError::Duplicate(format_symbols(s)));
                }
                if witness.accepts(s) != positive {
                    return Err(SampleError::LabelMismatch {
                        label: if positive { '+' } else { '-' },
                        string: format_symbols(s),
                    });
                }
            }
        }
        Ok(())
    }

    /// Write the two-column `label,string` file.
    pub fn save(&self, path: &Path) -> Result<(), SampleError> {
        let mut out = String::new();
        for s in &self.accept {
            out.push_str(&format!("+,{}\n", format_symbols(s)));
        }
        for s in &self.reject {
            out.push_str(&format!("-,{}\n", format_symbols(s)));
        }
        let mut file = fs::File::create(path)?;
        file.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Read a two-column `label,string` file saved by [`SampleSet::save`].
    /// The method descriptor is supplied by the caller (the file does not
    /// record it).
    pub fn load(path: &Path, method: SampleMethod) -> Result<SampleSet, SampleError> {
        let text = fs::read_to_string(path)?;
        let mut accept = Vec::new();
        let mut reject = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let malformed = |reason: &str| SampleError::Malformed {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (label, word) = line
                .split_once(',')
                .ok_or_else(|| malformed("expected label,string"))?;
            let word = parse_symbols(word).map_err(|e| malformed(&e.to_string()))?;
            if !seen.insert(word.clone()) {
                return Err(SampleError::Duplicate(format_symbols(&word)));
            }
            match label {
                "+" => accept.push(word),
                "-" => reject.push(word),
                other => return Err(malformed(&format!("unknown label {other:?}"))),
            }
        }
        let target_total = accept.len() + reject.len();
        Ok(SampleSet {
            method,
            target_total,
            accept,
            reject,
        })
    }
}

/// All ternary strings of length at most `max_len` in shortlex order.
pub fn shortlex(max_len: usize) -> impl Iterator<Item = Vec<Symbol>> {
    (0..=max_len).flat_map(strings_of_length)
}

fn strings_of_length(len: usize) -> impl Iterator<Item = Vec<Symbol>> {
    let mut digits = vec![0usize; len];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out: Vec<Symbol> = digits
            .iter()
            .map(|&d| Symbol::from_index(d).unwrap())
            .collect();
        // odometer increment, most significant digit first
        done = true;
        for d in digits.iter_mut().rev() {
            if *d + 1 < Symbol::COUNT {
                *d += 1;
                done = false;
                break;
            }
            *d = 0;
        }
        Some(out)
    })
}

/// Balanced short strings: walk shortlex order, adding members to the accept
/// set when it is not ahead of the reject set and non-members to the reject
/// set when it is not ahead of the accept set, until `total` strings are
/// collected. Deterministic; `total` must be even.
pub fn generate_bss(witness: &Fsm, total: usize) -> Result<SampleSet, SampleError> {
    if !total.is_multiple_of(2) {
        return Err(SampleError::OddTotal(total));
    }
    // A degenerate target (too few members or non-members below the length
    // cap) would send the walk into the astronomically large tail of the
    // enumeration; rule it out with the census before starting.
    let need = (total / 2) as u64;
    let reachable = *census(witness, BSS_LENGTH_CAP)
        .last()
        .expect("census is never empty");
    let non_members = reachable.total_strings - reachable.members;
    if reachable.members < need || non_members < need {
        return Err(SampleError::DegenerateTarget {
            need,
            members: reachable.members,
            non_members,
        });
    }

    let mut accept = Vec::with_capacity(total / 2);
    let mut reject = Vec::with_capacity(total / 2);
    let mut visited = 0u64;
    for s in shortlex(BSS_LENGTH_CAP) {
        if accept.len() + reject.len() >= total {
            break;
        }
        visited += 1;
        if visited > BSS_ENUM_CAP {
            return Err(SampleError::EnumerationCapExceeded);
        }
        let member = witness.accepts(&s);
        if member && accept.len() <= reject.len() {
            accept.push(s);
        } else if !member && accept.len() >= reject.len() {
            reject.push(s);
        }
    }
    if accept.len() + reject.len() < total {
        return Err(SampleError::EnumerationCapExceeded);
    }
    // The alternation guard keeps the sets within one of each other, so an
    // even total always lands exactly balanced.
    assert_eq!(accept.len(), total / 2);
    assert_eq!(reject.len(), total / 2);
    let set = SampleSet {
        method: SampleMethod::Bss,
        target_total: total,
        accept,
        reject,
    };
    debug_assert!(set.validate_against(witness).is_ok());
    Ok(set)
}

/// Draw a length in `0..=max_len` with probability proportional to the
/// number of ternary strings of that length.
pub(crate) fn sample_length(rng: &mut RandomSource, max_len: usize) -> usize {
    // total = 3^0 + 3^1 + ... + 3^max_len
    let mut weight = 1u64;
    let mut total = 1u64;
    for _ in 0..max_len {
        weight *= Symbol::COUNT as u64;
        total += weight;
    }
    let mut x = rng.below_u64(total);
    let mut weight = 1u64;
    for len in 0..=max_len {
        if x < weight {
            return len;
        }
        x -= weight;
        weight *= Symbol::COUNT as u64;
    }
    unreachable!("cumulative weights cover the draw range")
}

/// Random strings of length at most `max_len`: fill both sets to `total / 2`
/// distinct strings each, drawing uniformly from the pool of all strings up
/// to that length and skipping anything already sampled.
///
/// Fails fast with [`SampleError::Infeasible`] when the language (or its
/// complement) does not contain enough strings of length at most `max_len`.
pub fn generate_rle(
    witness: &Fsm,
    max_len: usize,
    total: usize,
    rng: &mut RandomSource,
) -> Result<SampleSet, SampleError> {
    if !total.is_multiple_of(2) {
        return Err(SampleError::OddTotal(total));
    }
    if max_len > MAX_CENSUS_LEN {
        return Err(SampleError::LengthTooLarge(max_len));
    }
    let need = (total / 2) as u64;
    let last = *census(witness, max_len)
        .last()
        .expect("census is never empty");
    let non_members = last.total_strings - last.members;
    if last.members < need || non_members < need {
        return Err(SampleError::Infeasible {
            max_len,
            need,
            members: last.members,
            non_members,
        });
    }

    let half = total / 2;
    let mut accept = Vec::with_capacity(half);
    let mut reject = Vec::with_capacity(half);
    let mut seen: HashSet<Vec<Symbol>> = HashSet::with_capacity(total);
    let mut draws = 0u64;
    while accept.len() + reject.len() < total {
        if draws >= RLE_DRAW_CAP {
            return Err(SampleError::DrawCapExceeded);
        }
        draws += 1;
        let len = sample_length(rng, max_len);
        let s: Vec<Symbol> = (0..len)
            .map(|_| Symbol::from_index(rng.index(Symbol::COUNT)).unwrap())
            .collect();
        if seen.contains(&s) {
            continue;
        }
        let member = witness.accepts(&s);
        if member && accept.len() < half {
            seen.insert(s.clone());
            accept.push(s);
        } else if !member && reject.len() < half {
            seen.insert(s.clone());
            reject.push(s);
        }
    }
    let set = SampleSet {
        method: SampleMethod::Rle { max_len },
        target_total: total,
        accept,
        reject,
    };
    debug_assert!(set.validate_against(witness).is_ok());
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{build_witness, WitnessSpec};

    fn u(n: u32) -> Fsm {
        build_witness(WitnessSpec::new(n).unwrap())
    }

    fn words(set: &[Vec<Symbol>]) -> Vec<String> {
        set.iter().map(|s| format_symbols(s)).collect()
    }

    #[test]
    fn shortlex_starts_with_the_expected_prefix() {
        let first: Vec<String> = shortlex(2).take(6).map(|s| format_symbols(&s)).collect();
        assert_eq!(first, ["", "a", "b", "c", "aa", "ab"]);
        assert_eq!(shortlex(2).count(), 13); // 1 + 3 + 9
    }

    #[test]
    fn bss_hand_trace_for_u3() {
        let set = generate_bss(&u(3), 4).unwrap();
        assert_eq!(words(set.accept()), ["aa", "ba"]);
        assert_eq!(words(set.reject()), ["", "ab"]);
    }

    #[test]
    fn bss_full_size_set_is_balanced_and_short() {
        let set = generate_bss(&u(3), 1000).unwrap();
        assert_eq!(set.accept().len(), 500);
        assert_eq!(set.reject().len(), 500);
        let max_len = set
            .accept()
            .iter()
            .chain(set.reject())
            .map(Vec::len)
            .max()
            .unwrap();
        assert!(max_len <= 9, "bss strings unexpectedly long: {max_len}");
        set.validate_against(&u(3)).unwrap();
    }

    #[test]
    fn bss_is_deterministic() {
        assert_eq!(
            generate_bss(&u(4), 200).unwrap(),
            generate_bss(&u(4), 200).unwrap()
        );
    }

    #[test]
    fn bss_empty_and_odd_totals() {
        let set = generate_bss(&u(3), 0).unwrap();
        assert!(set.is_empty());
        assert!(matches!(
            generate_bss(&u(3), 3),
            Err(SampleError::OddTotal(3))
        ));
    }

    #[test]
    fn bss_gives_up_on_degenerate_languages() {
        // reject-all has no members at any length
        assert!(matches!(
            generate_bss(&Fsm::reject_all(), 4),
            Err(SampleError::DegenerateTarget { members: 0, .. })
        ));
        // accept-all has no non-members
        let mut accept_all = Fsm::reject_all();
        accept_all.set_accepting(crate::fsm::StateId::new(0), true);
        assert!(matches!(
            generate_bss(&accept_all, 4),
            Err(SampleError::DegenerateTarget { non_members: 0, .. })
        ));
    }

    #[test]
    fn rle_feasibility_guard() {
        let mut rng = RandomSource::from_seed(1);
        match generate_rle(&u(4), 7, 1000, &mut rng) {
            Err(SampleError::Infeasible { members: 490, .. }) => {}
            other => panic!("expected infeasibility with 490 members, got {other:?}"),
        }
        assert!(generate_rle(&u(4), 8, 1000, &mut rng).is_ok());
    }

    #[test]
    fn rle_fills_both_sets_within_the_length_bound() {
        let mut rng = RandomSource::from_seed(11);
        let set = generate_rle(&u(3), 7, 1000, &mut rng).unwrap();
        assert_eq!(set.accept().len(), 500);
        assert_eq!(set.reject().len(), 500);
        assert!(set
            .accept()
            .iter()
            .chain(set.reject())
            .all(|s| s.len() <= 7));
        set.validate_against(&u(3)).unwrap();
    }

    #[test]
    fn rle_is_reproducible_per_seed() {
        let a = generate_rle(&u(3), 7, 2, &mut RandomSource::from_seed(5)).unwrap();
        let b = generate_rle(&u(3), 7, 2, &mut RandomSource::from_seed(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.accept().len(), 1);
        assert_eq!(a.reject().len(), 1);
    }

    #[test]
    fn rle_length_distribution_favors_the_longest_strings() {
        let mut rng = RandomSource::from_seed(9);
        let draws = 10_000;
        let sevens = (0..draws)
            .filter(|_| sample_length(&mut rng, 7) == 7)
            .count();
        let freq = sevens as f64 / draws as f64;
        let expected = 2187.0 / 3280.0;
        assert!(
            (freq - expected).abs() < 0.02,
            "length-7 frequency {freq} too far from {expected}"
        );
    }

    #[test]
    fn save_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.txt");
        let mut rng = RandomSource::from_seed(3);
        let set = generate_rle(&u(3), 5, 40, &mut rng).unwrap();
        set.save(&path).unwrap();
        let loaded = SampleSet::load(&path, set.method()).unwrap();
        assert_eq!(loaded, set);
        loaded.validate_against(&u(3)).unwrap();
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "+,aa\n?,b\n").unwrap();
        assert!(matches!(
            SampleSet::load(&path, SampleMethod::Bss),
            Err(SampleError::Malformed { line: 2, .. })
        ));
        std::fs::write(&path, "+,aa\n-,aa\n").unwrap();
        assert!(matches!(
            SampleSet::load(&path, SampleMethod::Bss),
            Err(SampleError::Duplicate(_))
        ));
    }

    #[test]
    fn validate_catches_wrong_labels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mislabeled.txt");
        std::fs::write(&path, "+,a\n").unwrap(); // "a" is not in U_3
        let set = SampleSet::load(&path, SampleMethod::Bss).unwrap();
        assert!(matches!(
            set.validate_against(&u(3)),
            Err(SampleError::LabelMismatch { .. })
        ));
    }

    #[test]
    fn method_parsing_round_trips() {
        for m in [SampleMethod::Bss, SampleMethod::Rle { max_len: 11 }] {
            assert_eq!(m.to_string().parse::<SampleMethod>().unwrap(), m);
        }
        assert_eq!(SampleMethod::Rle { max_len: 7 }.label(), "rle7");
        assert!("rle".parse::<SampleMethod>().is_err());
        assert!("rle:x".parse::<SampleMethod>().is_err());
    }
}
