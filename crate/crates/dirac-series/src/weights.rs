//! Exact weight arithmetic on the compact torus of `GL(n,R)`.
//!
//! All quantities here are vectors of half-integers, stored as doubled
//! integers so that every operation is exact. Norms land on the quarter-integer
//! grid and are kept exact as well. Nothing in this module is allowed to touch
//! floating point: the spin-norm criterion is an exact equality.

use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A vector of half-integers in the dual of the compact torus.
///
/// Coordinates are stored doubled (`twice[i]` is twice the actual value), and
/// all coordinates of one weight share the same integrality class: either all
/// integral or all half-odd-integral.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    twice: Vec<i64>,
}

impl Weight {
    /// Builds a weight from integer coordinates.
    pub fn ints(coords: &[i64]) -> Self {
        Weight {
            twice: coords.iter().map(|c| 2 * c).collect(),
        }
    }

    /// Builds a weight from doubled coordinates. Panics on mixed integrality.
    pub fn from_twice(twice: Vec<i64>) -> Self {
        let w = Weight { twice };
        assert!(w.uniform_class(), "mixed integrality classes in weight");
        w
    }

    /// Builds a weight whose coordinates are `numerators[i] / 2`.
    pub fn halves(numerators: &[i64]) -> Self {
        Weight::from_twice(numerators.to_vec())
    }

    fn uniform_class(&self) -> bool {
        self.twice
            .windows(2)
            .all(|w| (w[0] - w[1]).rem_euclid(2) == 0)
    }

    pub fn rank(&self) -> usize {
        self.twice.len()
    }

    pub fn twice_coords(&self) -> &[i64] {
        &self.twice
    }

    /// True when every coordinate is an integer.
    pub fn is_integral(&self) -> bool {
        self.twice.iter().all(|t| t % 2 == 0)
    }

    /// Integer coordinates, or an error when any coordinate is half-odd.
    pub fn to_ints(&self) -> Result<Vec<i64>, Error> {
        if !self.is_integral() {
            return Err(Error::InvalidInput(format!(
                "weight {self} has non-integral coordinates"
            )));
        }
        Ok(self.twice.iter().map(|t| t / 2).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.twice.iter().all(|t| *t == 0)
    }

    /// Coordinatewise sum. Panics on rank mismatch.
    pub fn add(&self, other: &Weight) -> Weight {
        assert_eq!(self.rank(), other.rank(), "rank mismatch in weight sum");
        Weight::from_twice(
            self.twice
                .iter()
                .zip(&other.twice)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Coordinatewise difference. Panics on rank mismatch.
    pub fn sub(&self, other: &Weight) -> Weight {
        assert_eq!(self.rank(), other.rank(), "rank mismatch in weight difference");
        Weight::from_twice(
            self.twice
                .iter()
                .zip(&other.twice)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Sum of the coordinates, doubled.
    pub fn twice_sum(&self) -> i64 {
        self.twice.iter().sum()
    }

    /// Exact squared norm.
    pub fn norm_sq(&self) -> NormSq {
        NormSq::from_quarters(self.twice.iter().map(|t| t * t).sum())
    }

    /// Weakly decreasing?
    pub fn is_weakly_decreasing(&self) -> bool {
        self.twice.windows(2).all(|w| w[0] >= w[1])
    }

    /// Weakly decreasing with all coordinates non-negative?
    pub fn is_dominant_nonneg(&self) -> bool {
        self.is_weakly_decreasing() && self.twice.last().map_or(true, |t| *t >= 0)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.twice.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if t % 2 == 0 {
                write!(f, "{}", t / 2)?;
            } else {
                write!(f, "{t}/2")?;
            }
        }
        write!(f, ")")
    }
}

/// An exact squared norm: an integer number of quarters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NormSq {
    quarters: i64,
}

impl NormSq {
    pub fn from_quarters(quarters: i64) -> Self {
        NormSq { quarters }
    }

    pub fn from_int(n: i64) -> Self {
        NormSq { quarters: 4 * n }
    }

    pub fn quarters(&self) -> i64 {
        self.quarters
    }
}

impl fmt::Display for NormSq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.quarters % 4 == 0 {
            write!(f, "{}", self.quarters / 4)
        } else if self.quarters % 2 == 0 {
            write!(f, "{}/2", self.quarters / 2)
        } else {
            write!(f, "{}/4", self.quarters)
        }
    }
}

impl fmt::Debug for NormSq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A full infinitesimal character: a weakly decreasing vector of `n`
/// half-integers on the fundamental Cartan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullInflChar {
    entries: Weight,
}

impl FullInflChar {
    pub fn new(entries: Weight) -> Result<Self, Error> {
        if !entries.is_weakly_decreasing() {
            return Err(Error::InvalidInput(format!(
                "infinitesimal character {entries} is not weakly decreasing"
            )));
        }
        Ok(FullInflChar { entries })
    }

    pub fn entries(&self) -> &Weight {
        &self.entries
    }
}

/// Rank of the compact torus: `floor(n/2)`.
pub fn torus_rank(n: usize) -> usize {
    n / 2
}

fn check_n(n: usize) -> Result<(), Error> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

/// Half sum of the compact positive roots: `(m-1, ..., 1, 0)` for `n = 2m`,
/// `(m-1/2, ..., 3/2, 1/2)` for `n = 2m+1`.
pub fn rho_c(n: usize) -> Result<Weight, Error> {
    check_n(n)?;
    let m = torus_rank(n);
    let twice = if n % 2 == 0 {
        (0..m).map(|i| 2 * (m - 1 - i) as i64).collect()
    } else {
        (0..m).map(|i| (2 * (m - i) - 1) as i64).collect()
    };
    Ok(Weight::from_twice(twice))
}

/// Highest weight of the spinor module: `(m, m-1, ..., 1)` for `n = 2m`
/// (the branch with positive last coordinate), `(m+1/2, ..., 3/2)` for
/// `n = 2m+1`.
pub fn sigma(n: usize) -> Result<Weight, Error> {
    check_n(n)?;
    let m = torus_rank(n);
    let twice = if n % 2 == 0 {
        (0..m).map(|i| 2 * (m - i) as i64).collect()
    } else {
        (0..m).map(|i| (2 * (m - i) + 1) as i64).collect()
    };
    Ok(Weight::from_twice(twice))
}

/// The other spinor highest weight for even `n`: last coordinate negated.
pub fn sigma_minus(n: usize) -> Result<Weight, Error> {
    let s = sigma(n)?;
    let mut twice = s.twice;
    if n % 2 == 0 {
        if let Some(last) = twice.last_mut() {
            *last = -*last;
        }
    }
    Ok(Weight::from_twice(twice))
}

/// Dominant representative under signed permutations: absolute values sorted
/// in weakly decreasing order.
pub fn dominant_conjugate(x: &Weight) -> Weight {
    let mut twice: Vec<i64> = x.twice.iter().map(|t| t.abs()).collect();
    twice.sort_unstable_by(|a, b| b.cmp(a));
    Weight::from_twice(twice)
}

/// Exact squared spin norm of a K-type highest weight:
/// `|| {tau - sigma} + rho_c ||^2`.
pub fn spin_norm_sq(tau: &Weight, n: usize) -> Result<NormSq, Error> {
    let s = sigma(n)?;
    if tau.rank() != s.rank() {
        return Err(Error::InvalidInput(format!(
            "weight {tau} has rank {}, expected {} for n={n}",
            tau.rank(),
            s.rank()
        )));
    }
    let prv = dominant_conjugate(&tau.sub(&s));
    Ok(prv.add(&rho_c(n)?).norm_sq())
}

/// Restriction of a full infinitesimal character to the compact torus and
/// its complement, together with the symmetry flag that detects when the
/// complement part vanishes identically.
pub fn restrict_full(ch: &FullInflChar) -> (Weight, Weight, bool) {
    let lam = ch.entries.twice_coords();
    let n = lam.len();
    let m = torus_rank(n);
    let t_part: Vec<i64> = (0..m).map(|i| lam[i] - lam[n - 1 - i]).collect();
    let mut a_part: Vec<i64> = (0..m).map(|i| lam[i] + lam[n - 1 - i]).collect();
    if n % 2 == 1 {
        a_part.push(lam[m]);
    }
    let a = Weight::from_twice(a_part);
    let symmetric = a.is_zero();
    (Weight::from_twice(t_part), a, symmetric)
}

/// Admissibility of an infinitesimal character on the compact torus:
/// integral, strictly decreasing, all positive for odd `n` and all
/// non-negative for even `n`.
pub fn admissible(lambda: &Weight, n: usize) -> bool {
    if n < 2 || lambda.rank() != torus_rank(n) {
        return false;
    }
    if !lambda.is_integral() {
        return false;
    }
    let t = lambda.twice_coords();
    if !t.windows(2).all(|w| w[0] > w[1]) {
        return false;
    }
    match t.last() {
        None => true,
        Some(&last) => {
            if n % 2 == 1 {
                last > 0
            } else {
                last >= 0
            }
        }
    }
}

/// All weakly decreasing non-negative integral `tau` such that `tau - base`
/// is a signed permutation of `v`, found by backtracking with dominance
/// pruning. `base` is the spinor weight (or its other branch), `v` the target.
fn solve_against(base: &[i64], v: &Weight) -> Vec<Weight> {
    // Entries of |v|, doubled, sorted descending, with multiplicities.
    let mut entries: Vec<i64> = v.twice_coords().iter().map(|t| t.abs()).collect();
    entries.sort_unstable_by(|a, b| b.cmp(a));
    let m = entries.len();
    let mut used = vec![false; m];
    let mut tau = Vec::with_capacity(m);
    let mut out = Vec::new();
    fn rec(
        base: &[i64],
        entries: &[i64],
        used: &mut Vec<bool>,
        tau: &mut Vec<i64>,
        out: &mut Vec<Weight>,
    ) {
        let pos = tau.len();
        let m = entries.len();
        if pos == m {
            out.push(Weight::from_twice(tau.clone()));
            return;
        }
        let prev = if pos == 0 { i64::MAX } else { tau[pos - 1] };
        let mut tried: Vec<i64> = Vec::new();
        for j in 0..m {
            if used[j] {
                continue;
            }
            let e = entries[j];
            for sign in [1i64, -1] {
                let cand = base[pos] + sign * e;
                // Duplicate entry values with the same sign give identical branches.
                if tried.contains(&cand) {
                    continue;
                }
                // Dominance and K-type constraints: weakly decreasing, >= 0,
                // and integral (doubled value even).
                if cand < 0 || cand > prev || cand % 2 != 0 {
                    continue;
                }
                tried.push(cand);
                used[j] = true;
                tau.push(cand);
                rec(base, entries, used, tau, out);
                tau.pop();
                used[j] = false;
            }
        }
    }
    // Work on doubled coordinates throughout; `tau` holds doubled values
    // that must be even so the label is integral.
    let base_twice: Vec<i64> = base.to_vec();
    rec(&base_twice, &entries, &mut used, &mut tau, &mut out);
    out.sort();
    out.dedup();
    out
}

/// The exact set of weakly decreasing, non-negative, integral `tau` with
/// `tau - sigma(n)` a signed permutation of `v = lambda - rho_c(n)`.
///
/// Requires `admissible(lambda, n)`. The empty set is a valid result.
pub fn solve_candidates(lambda: &Weight, n: usize) -> Result<Vec<Weight>, Error> {
    if !admissible(lambda, n) {
        return Err(Error::Inadmissible(format!(
            "infinitesimal character {lambda} is not admissible for n={n}"
        )));
    }
    let v = lambda.sub(&rho_c(n)?);
    Ok(solve_against(sigma(n)?.twice_coords(), &v))
}

/// Candidate labels that solve the criterion through the other spinor branch
/// for even `n` (equivalently, through the sign-flipped constituent of an
/// eta = 1/2 type). Returns the plain solver output for odd `n`.
pub fn solve_candidates_mirror(lambda: &Weight, n: usize) -> Result<Vec<Weight>, Error> {
    if n % 2 == 1 {
        return solve_candidates(lambda, n);
    }
    if !admissible(lambda, n) {
        return Err(Error::Inadmissible(format!(
            "infinitesimal character {lambda} is not admissible for n={n}"
        )));
    }
    let v = lambda.sub(&rho_c(n)?);
    Ok(solve_against(sigma_minus(n)?.twice_coords(), &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(coords: &[i64]) -> Weight {
        Weight::ints(coords)
    }

    #[test]
    fn dominant_conjugate_sorts_absolute_values() {
        assert_eq!(
            dominant_conjugate(&w(&[0, 0, 0, 0, 1, 2, 0, 0])),
            w(&[2, 1, 0, 0, 0, 0, 0, 0])
        );
        assert_eq!(dominant_conjugate(&w(&[0, 0, 0])), w(&[0, 0, 0]));
        assert_eq!(dominant_conjugate(&w(&[-3, 1, 2])), w(&[3, 2, 1]));
    }

    #[test]
    fn structure_constants() {
        assert_eq!(rho_c(6).unwrap(), w(&[2, 1, 0]));
        assert_eq!(rho_c(4).unwrap(), w(&[1, 0]));
        assert_eq!(rho_c(5).unwrap(), Weight::halves(&[3, 1]));
        assert_eq!(sigma(7).unwrap(), Weight::halves(&[7, 5, 3]));
        assert_eq!(sigma(4).unwrap(), w(&[2, 1]));
        assert_eq!(sigma_minus(4).unwrap(), w(&[2, -1]));
        assert!(rho_c(1).is_err());
        assert!(sigma(0).is_err());
    }

    #[test]
    fn spin_norms() {
        // GL(16): the norm of {tau - sigma} + rho_c at the known spin-lowest
        // K-type equals the squared infinitesimal character norm 185.
        let tau = w(&[8, 7, 6, 6, 6, 3, 2, 1]);
        assert_eq!(spin_norm_sq(&tau, 16).unwrap(), NormSq::from_int(185));
        // GL(3), trivial K-type.
        assert_eq!(spin_norm_sq(&w(&[0]), 3).unwrap(), NormSq::from_int(4));
        // tau = sigma for GL(4).
        assert_eq!(spin_norm_sq(&w(&[2, 1]), 4).unwrap(), NormSq::from_int(1));
        // Rank mismatch is rejected.
        assert!(spin_norm_sq(&w(&[1, 2, 3]), 4).is_err());
    }

    #[test]
    fn both_spinor_branches_give_equal_type_level_norms() {
        // The minimum over the two constituents of an O(n)-type is branch
        // independent: min over {tau, tau-with-flipped-last} against sigma
        // equals the same minimum against sigma_minus.
        for n in [4usize, 6, 8] {
            let s_plus = sigma(n).unwrap();
            let s_minus = sigma_minus(n).unwrap();
            let rc = rho_c(n).unwrap();
            let m = torus_rank(n);
            for max in 0..5i64 {
                let mut gamma: Vec<i64> = (0..m).map(|i| (max - i as i64).max(0)).collect();
                gamma[m - 1] = gamma[m - 1].min(gamma[m - 2].max(0));
                let tau = w(&gamma);
                let mut flipped = gamma.clone();
                flipped[m - 1] = -flipped[m - 1];
                let tauf = w(&flipped);
                let norm = |t: &Weight, s: &Weight| {
                    dominant_conjugate(&t.sub(s)).add(&rc).norm_sq()
                };
                let via_plus = norm(&tau, &s_plus).min(norm(&tauf, &s_plus));
                let via_minus = norm(&tau, &s_minus).min(norm(&tauf, &s_minus));
                assert_eq!(via_plus, via_minus);
            }
        }
    }

    #[test]
    fn restriction_to_torus() {
        let ch = FullInflChar::new(w(&[1, 0, -1])).unwrap();
        let (t, a, sym) = restrict_full(&ch);
        assert_eq!(t, w(&[2]));
        assert_eq!(a, w(&[0, 0]));
        assert!(sym);

        let ch = FullInflChar::new(w(&[1, -1])).unwrap();
        let (t, a, sym) = restrict_full(&ch);
        assert_eq!(t, w(&[2]));
        assert_eq!(a, w(&[0]));
        assert!(sym);

        let ch = FullInflChar::new(w(&[2, 1, 0])).unwrap();
        let (t, a, sym) = restrict_full(&ch);
        assert_eq!(t, w(&[2]));
        assert_eq!(a, w(&[2, 1]));
        assert!(!sym);
    }

    #[test]
    fn admissibility() {
        assert!(admissible(&w(&[11, 10, 9, 8, 6, 5, 4, 3, 2, 1, 0]), 22));
        assert!(!admissible(&w(&[3, 0]), 5));
        assert!(!admissible(&w(&[4, 4, 0]), 6));
        assert!(admissible(&w(&[3, 1]), 5));
        assert!(!admissible(&Weight::halves(&[5, 1]), 4));
    }

    #[test]
    fn candidate_solver_fixed_sets() {
        let got = solve_candidates(&w(&[1, 0]), 4).unwrap();
        assert_eq!(got, vec![w(&[2, 1])]);

        let mut got = solve_candidates(&w(&[2, 0]), 4).unwrap();
        got.sort();
        let mut want = vec![w(&[3, 1]), w(&[1, 1]), w(&[2, 2]), w(&[2, 0])];
        want.sort();
        assert_eq!(got, want);

        let mut got = solve_candidates(&w(&[2, 1]), 5).unwrap();
        got.sort();
        let mut want = vec![w(&[3, 2]), w(&[3, 1]), w(&[2, 2]), w(&[2, 1])];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn candidate_solver_rejects_inadmissible() {
        assert!(solve_candidates(&w(&[2, 2]), 4).is_err());
    }

    /// Brute-force reference: try every signed permutation of `v`.
    fn brute_candidates(lambda: &Weight, n: usize) -> Vec<Weight> {
        let v = lambda.sub(&rho_c(n).unwrap());
        let base = sigma(n).unwrap();
        let m = v.rank();
        let mut entries: Vec<i64> = v.twice_coords().to_vec();
        entries.sort_unstable();
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..m).collect();
        loop {
            for signs in 0..(1u32 << m) {
                let twice: Vec<i64> = (0..m)
                    .map(|i| {
                        let s = if signs & (1 << i) != 0 { -1 } else { 1 };
                        base.twice_coords()[i] + s * entries[perm[i]]
                    })
                    .collect();
                if twice.windows(2).all(|w| w[0] >= w[1])
                    && twice.last().map_or(true, |t| *t >= 0)
                    && twice.iter().all(|t| t % 2 == 0)
                {
                    out.push(Weight::from_twice(twice));
                }
            }
            // Next permutation in lexicographic order.
            let mut i = m.wrapping_sub(1);
            while i > 0 && perm[i - 1] >= perm[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = m - 1;
            while perm[j] <= perm[i - 1] {
                j -= 1;
            }
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn candidate_solver_matches_brute_force_small() {
        for (lambda, n) in [
            (w(&[2, 0]), 4),
            (w(&[3, 1]), 4),
            (w(&[4, 2, 0]), 6),
            (w(&[3, 1]), 5),
            (w(&[5, 3, 2]), 7),
        ] {
            assert_eq!(
                solve_candidates(&lambda, n).unwrap(),
                brute_candidates(&lambda, n),
                "mismatch at lambda={lambda} n={n}"
            );
        }
    }

    #[test]
    fn candidates_have_criterion_norm() {
        for (lambda, n) in [(w(&[2, 0]), 4), (w(&[2, 1]), 5), (w(&[4, 2, 0]), 6)] {
            for tau in solve_candidates(&lambda, n).unwrap() {
                assert!(tau.is_dominant_nonneg());
                assert_eq!(spin_norm_sq(&tau, n).unwrap(), lambda.norm_sq());
            }
        }
    }

    proptest! {
        #[test]
        fn dominant_conjugate_idempotent_and_sign_invariant(
            coords in proptest::collection::vec(-9i64..9, 1..7),
            signs in proptest::collection::vec(any::<bool>(), 7),
            shift in 0usize..7,
        ) {
            let x = w(&coords);
            let d = dominant_conjugate(&x);
            prop_assert_eq!(dominant_conjugate(&d).clone(), d.clone());
            // Apply a signed permutation: rotate and flip signs.
            let m = coords.len();
            let permuted: Vec<i64> = (0..m)
                .map(|i| {
                    let v = coords[(i + shift) % m];
                    if signs[i] { -v } else { v }
                })
                .collect();
            prop_assert_eq!(dominant_conjugate(&w(&permuted)), d);
        }

        #[test]
        fn solver_agrees_with_brute_force(
            gaps in proptest::collection::vec(1i64..4, 1..6),
            odd in any::<bool>(),
        ) {
            // Build a strictly decreasing admissible character from gaps.
            let m = gaps.len();
            let mut coords = vec![0i64; m];
            let mut acc = if odd { 1 } else { 0 };
            for i in (0..m).rev() {
                coords[i] = acc;
                acc += gaps[i];
            }
            let lambda = w(&coords);
            let n = if odd { 2 * m + 1 } else { 2 * m };
            if n >= 2 {
                prop_assert!(admissible(&lambda, n));
                prop_assert_eq!(solve_candidates(&lambda, n).unwrap(), brute_candidates(&lambda, n));
            }
        }
    }
}
