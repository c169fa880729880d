//! All-odd five-square representations of `4m + 1`, and the signed
//! arrangements of them whose entries sum to 1.
//!
//! These are the magnitude profiles a length-5 compression of a conjecture
//! form Legendre pair can have.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Five odd positive integers in ascending order with `Σ v² = target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiophSolution {
    pub values: [i32; 5],
    pub target: i64,
}

/// An ordered, signed arrangement of a [`DiophSolution`] with entry sum 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedTuple {
    pub values: [i32; 5],
}

/// Every canonical solution of `a₁² + … + a₅² = 4m + 1` in odd positive
/// integers, sorted lexicographically.
pub fn odd_five_squares(m: i64) -> Result<Vec<DiophSolution>> {
    if m < 1 || m % 2 == 0 {
        return Err(Error::Domain(format!("m = {m} must be odd and positive")));
    }
    let target = 4 * m + 1;
    let mut out = Vec::new();
    let mut stack = [0i32; 5];
    // largest value first, each later value no larger than the previous one
    descend(target, 5, largest_odd_at_most(isqrt(target)), &mut stack, &mut out);
    for sol in &mut out {
        sol.reverse();
    }
    let mut out: Vec<DiophSolution> = out
        .into_iter()
        .map(|values| DiophSolution { values, target })
        .collect();
    out.sort();
    Ok(out)
}

fn descend(rest: i64, slots: usize, cap: i32, stack: &mut [i32; 5], out: &mut Vec<[i32; 5]>) {
    if slots == 0 {
        if rest == 0 {
            out.push(*stack);
        }
        return;
    }
    // the remaining slots each need at least 1
    if rest < slots as i64 {
        return;
    }
    let mut v = largest_odd_at_most(isqrt(rest)).min(cap);
    while v >= 1 {
        let sq = v as i64 * v as i64;
        // all remaining slots at most v²
        if sq * (slots as i64) < rest {
            break;
        }
        stack[5 - slots] = v;
        descend(rest - sq, slots - 1, v, stack, out);
        v -= 2;
    }
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn largest_odd_at_most(n: i64) -> i32 {
    (if n % 2 == 0 { n - 1 } else { n }) as i32
}

/// Whether some choice of signs makes the values sum to exactly 1.
pub fn admits_unit_sum(sol: &DiophSolution) -> bool {
    (0u32..32).any(|mask| signed_sum(&sol.values, mask) == 1)
}

fn signed_sum(values: &[i32; 5], mask: u32) -> i64 {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| if mask >> i & 1 == 1 { -(v as i64) } else { v as i64 })
        .sum()
}

/// All distinct ordered signed arrangements with sum 1, sorted.
pub fn signed_orderings(sol: &DiophSolution) -> Vec<SignedTuple> {
    let mut signings = BTreeSet::new();
    for mask in 0u32..32 {
        if signed_sum(&sol.values, mask) == 1 {
            let mut v = sol.values;
            for (i, x) in v.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *x = -*x;
                }
            }
            v.sort();
            signings.insert(v);
        }
    }
    let mut out = BTreeSet::new();
    for multiset in signings {
        for perm in distinct_permutations(multiset) {
            out.insert(SignedTuple { values: perm });
        }
    }
    out.into_iter().collect()
}

/// Distinct permutations of a sorted array, in lexicographic order.
fn distinct_permutations(mut v: [i32; 5]) -> Vec<[i32; 5]> {
    let mut out = vec![v];
    while next_permutation(&mut v) {
        out.push(v);
    }
    out
}

fn next_permutation(v: &mut [i32]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vals(m: i64) -> Vec<[i32; 5]> {
        odd_five_squares(m).unwrap().into_iter().map(|s| s.values).collect()
    }

    fn sol(values: [i32; 5]) -> DiophSolution {
        let target = values.iter().map(|&v| v as i64 * v as i64).sum();
        DiophSolution { values, target }
    }

    /// Plain nested loops over every odd 5-tuple up to ⌊√target⌋.
    fn brute_force(m: i64) -> Vec<[i32; 5]> {
        let target = 4 * m + 1;
        let bound = (target as f64).sqrt() as i32;
        let odds: Vec<i32> = (1..=bound).filter(|v| v % 2 == 1).collect();
        let mut out = BTreeSet::new();
        for &a in &odds {
            for &b in &odds {
                for &c in &odds {
                    for &d in &odds {
                        for &e in &odds {
                            let t = [a, b, c, d, e];
                            if t.iter().map(|&v| v as i64 * v as i64).sum::<i64>() == target {
                                let mut s = t;
                                s.sort();
                                out.insert(s);
                            }
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn golden_small_cases() {
        assert_eq!(vals(3), vec![[1, 1, 1, 1, 3]]);
        assert_eq!(vals(17), vec![[1, 1, 3, 3, 7], [1, 3, 3, 5, 5]]);
        assert_eq!(
            vals(19),
            vec![[1, 1, 1, 5, 7], [1, 1, 5, 5, 5], [1, 3, 3, 3, 7], [3, 3, 3, 5, 5]]
        );
        assert_eq!(vals(23), vec![[1, 1, 1, 3, 9], [1, 3, 3, 5, 7], [3, 3, 5, 5, 5]]);
    }

    #[test]
    fn even_m_is_a_domain_error() {
        assert!(matches!(odd_five_squares(4), Err(Error::Domain(_))));
        assert!(matches!(odd_five_squares(-1), Err(Error::Domain(_))));
    }

    #[test]
    fn complete_against_brute_force() {
        for m in (1..=49).step_by(2) {
            assert_eq!(vals(m), brute_force(m), "m = {m}");
        }
    }

    #[test]
    fn alphabet_bound_up_to_19() {
        for m in (3..=19).step_by(2) {
            assert!(vals(m).iter().flatten().all(|&v| v <= 7), "m = {m}");
        }
    }

    #[test]
    fn unit_sum_rule_outs() {
        for ruled_out in [[3, 3, 3, 3, 3], [1, 1, 1, 1, 7], [1, 1, 5, 5, 5], [1, 1, 1, 3, 9]] {
            assert!(!admits_unit_sum(&sol(ruled_out)), "{ruled_out:?}");
        }
        assert!(admits_unit_sum(&sol([1, 1, 1, 1, 3])));
    }

    #[test]
    fn signed_orderings_match_brute_force() {
        for values in [[1, 1, 1, 1, 3], [1, 1, 3, 3, 7], [1, 3, 3, 5, 5], [1, 1, 1, 1, 1]] {
            // every sign pattern of every (possibly repeated) index permutation
            let mut expect = BTreeSet::new();
            let idx = [0usize, 1, 2, 3, 4];
            let mut perms = vec![];
            permute(&mut idx.clone(), 0, &mut perms);
            for p in perms {
                for mask in 0u32..32 {
                    let t: [i32; 5] = std::array::from_fn(|i| {
                        let v = values[p[i]];
                        if mask >> i & 1 == 1 { -v } else { v }
                    });
                    if t.iter().sum::<i32>() == 1 {
                        expect.insert(t);
                    }
                }
            }
            let got: Vec<[i32; 5]> = signed_orderings(&sol(values)).iter().map(|t| t.values).collect();
            assert_eq!(got, expect.into_iter().collect::<Vec<_>>(), "{values:?}");
        }
    }

    fn permute(v: &mut [usize; 5], k: usize, out: &mut Vec<[usize; 5]>) {
        if k == 5 {
            out.push(*v);
            return;
        }
        for i in k..5 {
            v.swap(k, i);
            permute(v, k + 1, out);
            v.swap(k, i);
        }
    }

    #[test]
    fn signed_orderings_satisfy_both_constraints() {
        let s = sol([1, 1, 3, 3, 7]);
        let t = signed_orderings(&s);
        assert!(!t.is_empty());
        for tuple in &t {
            let sq: i64 = tuple.values.iter().map(|&v| v as i64 * v as i64).sum();
            assert_eq!(sq, 69);
            assert_eq!(tuple.values.iter().sum::<i32>(), 1);
        }
        assert!(signed_orderings(&sol([3, 3, 3, 3, 3])).is_empty());
    }

    #[test]
    fn contains_expected_signings() {
        let t = signed_orderings(&sol([1, 1, 1, 1, 3]));
        assert!(t.contains(&SignedTuple { values: [1, 1, 1, 1, -3] }));
        assert!(t.contains(&SignedTuple { values: [-1, 1, -1, 3, -1] }));
        // 5 positions for −3, plus 5·4 placements of (+3, +1) among −1s
        assert_eq!(t.len(), 25);
    }
}
