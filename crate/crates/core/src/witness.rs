//! The universal-witness languages U_n and their exact member census.
//!
//! For every n >= 3 there is one witness language of state complexity
//! exactly n, recognized by an n-state machine: `a` advances cyclically
//! through the states, `b` swaps the first two states, and `c` sends the
//! accepting state back to the start. The census walks per-state string
//! counts one length at a time, so member counts are exact without
//! enumerating strings.

use thiserror::Error;

use crate::fsm::{Fsm, Symbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness languages are defined for n >= 3, got n = {0}")]
    TooSmall(u32),
}

/// Choice of witness language, i.e. the target state complexity `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WitnessSpec {
    n: u32,
}

impl WitnessSpec {
    pub fn new(n: u32) -> Result<WitnessSpec, WitnessError> {
        if n < 3 {
            return Err(WitnessError::TooSmall(n));
        }
        Ok(WitnessSpec { n })
    }

    pub fn n(self) -> u32 {
        self.n
    }
}

impl std::fmt::Display for WitnessSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "U{}", self.n)
    }
}

impl std::str::FromStr for WitnessSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix('U')
            .or_else(|| s.strip_prefix('u'))
            .ok_or_else(|| format!("expected a language like U3, got {s:?}"))?;
        let n: u32 = digits
            .parse()
            .map_err(|_| format!("expected a language like U3, got {s:?}"))?;
        WitnessSpec::new(n).map_err(|e| e.to_string())
    }
}

/// Build the n-state witness machine for `spec`.
///
/// States are `q_0..q_{n-1}`, the start is `q_0`, and `q_{n-1}` is the only
/// accepting state. `a` maps `q_i` to `q_{(i+1) mod n}`; `b` swaps `q_0` and
/// `q_1` and fixes everything else; `c` maps `q_{n-1}` to `q_0` and fixes
/// everything else.
pub fn build_witness(spec: WitnessSpec) -> Fsm {
    let n = spec.n;
    let rows = (0..n)
        .map(|i| {
            let on_a = (i + 1) % n;
            let on_b = match i {
                0 => 1,
                1 => 0,
                _ => i,
            };
            let on_c = if i == n - 1 { 0 } else { i };
            [on_a, on_b, on_c]
        })
        .collect();
    Fsm::from_parts(rows, 0, [n - 1]).expect("witness construction is closed over 0..n")
}

/// Cumulative census line: how many of the ternary strings of length at most
/// `max_len` the machine accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusRow {
    pub max_len: usize,
    /// All ternary strings of length <= `max_len`: `(3^(max_len+1) - 1) / 2`.
    pub total_strings: u64,
    pub members: u64,
}

impl CensusRow {
    pub fn fraction(&self) -> f64 {
        self.members as f64 / self.total_strings as f64
    }

    /// Percentage rounded to the nearest integer (half away from zero).
    pub fn percent(&self) -> u32 {
        let m = self.members as u128;
        let t = self.total_strings as u128;
        ((200 * m + t) / (2 * t)) as u32
    }
}

/// Counts stay within u64 up to this length bound.
pub const MAX_CENSUS_LEN: usize = 40;

/// Exact member counts for every length bound `0..=max_len`.
///
/// One pass per length over a per-state occupancy vector: `counts[q]` is the
/// number of strings of the current length that drive the machine from the
/// start state to `q`.
pub fn census(m: &Fsm, max_len: usize) -> Vec<CensusRow> {
    assert!(
        max_len <= MAX_CENSUS_LEN,
        "census overflows u64 beyond length {MAX_CENSUS_LEN}"
    );
    let states = m.state_count();
    let mut counts = vec![0u64; states];
    counts[m.start().index()] = 1;

    let accepted =
        |counts: &[u64]| -> u64 { m.accepting_states().map(|q| counts[q.index()]).sum() };

    let mut rows = Vec::with_capacity(max_len + 1);
    let mut members = accepted(&counts);
    let mut total = 1u64;
    rows.push(CensusRow {
        max_len: 0,
        total_strings: total,
        members,
    });
    let mut strings_of_len = 1u64;
    for len in 1..=max_len {
        let mut next = vec![0u64; states];
        for (q, &n) in counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let q = crate::fsm::StateId::new(q as u32);
            for c in Symbol::ALL {
                next[m.step(q, c).index()] += n;
            }
        }
        counts = next;
        strings_of_len *= Symbol::COUNT as u64;
        total += strings_of_len;
        members += accepted(&counts);
        rows.push(CensusRow {
            max_len: len,
            total_strings: total,
            members,
        });
    }
    rows
}

/// Number of language members among all strings of length <= `max_len`.
pub fn member_count_up_to(m: &Fsm, max_len: usize) -> u64 {
    census(m, max_len)
        .last()
        .expect("census is never empty")
        .members
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::parse_symbols;
    use crate::sampling::shortlex;

    fn u(n: u32) -> Fsm {
        build_witness(WitnessSpec::new(n).unwrap())
    }

    #[test]
    fn spec_requires_n_at_least_three() {
        assert_eq!(WitnessSpec::new(2), Err(WitnessError::TooSmall(2)));
        assert!(WitnessSpec::new(3).is_ok());
        assert!("U2".parse::<WitnessSpec>().is_err());
        assert_eq!(
            "u4".parse::<WitnessSpec>().unwrap(),
            WitnessSpec::new(4).unwrap()
        );
    }

    #[test]
    fn u3_accepts_aa_and_rejects_short_strings() {
        let u3 = u(3);
        assert!(u3.accepts(&parse_symbols("aa").unwrap()));
        assert!(!u3.accepts(&parse_symbols("").unwrap()));
        assert!(!u3.accepts(&parse_symbols("a").unwrap()));
    }

    #[test]
    fn witness_machines_are_already_minimal() {
        for n in 3..=6 {
            assert_eq!(u(n).minimize().state_count(), n as usize);
        }
    }

    #[test]
    fn a_power_n_minus_one_is_always_accepted() {
        for n in 3..=9 {
            let s = vec![Symbol::A; (n - 1) as usize];
            assert!(u(n as u32).accepts(&s));
        }
    }

    #[test]
    fn census_matches_reference_counts() {
        let rows = census(&u(3), 7);
        assert_eq!(
            rows[7],
            CensusRow {
                max_len: 7,
                total_strings: 3280,
                members: 656
            }
        );
        assert_eq!(rows[7].percent(), 20);
        let rows = census(&u(5), 10);
        assert_eq!(rows[10].members, 11_040);
        assert_eq!(rows[10].total_strings, 88_573);
    }

    #[test]
    fn census_of_the_empty_language_is_zero() {
        let rows = census(&Fsm::reject_all(), 12);
        assert!(rows.iter().all(|r| r.members == 0));
    }

    #[test]
    fn member_count_examples() {
        assert_eq!(member_count_up_to(&u(4), 7), 490);
        assert_eq!(member_count_up_to(&u(4), 8), 1_452);
        // bound 0 counts just the empty string
        assert_eq!(member_count_up_to(&u(3), 0), 0);
        let mut accepts_empty = Fsm::reject_all();
        accepts_empty.set_accepting(crate::fsm::StateId::new(0), true);
        assert_eq!(member_count_up_to(&accepts_empty, 0), 1);
    }

    #[test]
    fn census_agrees_with_enumeration_up_to_length_8() {
        for n in [3, 4, 5] {
            let m = u(n);
            let rows = census(&m, 8);
            let mut members = 0u64;
            let mut total = 0u64;
            let mut len = 0usize;
            for s in shortlex(8) {
                if s.len() > len {
                    assert_eq!(rows[len].members, members, "U{n} length {len}");
                    assert_eq!(rows[len].total_strings, total);
                    len = s.len();
                }
                total += 1;
                if m.accepts(&s) {
                    members += 1;
                }
            }
            assert_eq!(rows[8].members, members);
            assert_eq!(rows[8].total_strings, total);
        }
    }
}
