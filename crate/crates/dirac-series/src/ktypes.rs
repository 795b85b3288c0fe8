//! `O(n)` K-type labels, the one-step branching rule, and a small-rank
//! character oracle for `SO(n)`.
//!
//! K-types are pairs `(gamma; eta)`. Restricting to `SO(n)` gives one
//! irreducible (or a sign-flipped pair when `n` is even and the last
//! coordinate is positive), which is where the character oracle operates:
//! exact weight multiplicities by Freudenthal's recursion, tensor products,
//! restriction to `SO(a) x SO(b)`, and decomposition by highest-weight
//! peeling. The oracle backs brute-force membership tests; it refuses work
//! beyond its configured ceilings instead of approximating.

use crate::weights::Weight;
use crate::Error;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

/// The extension label of an `O(n)`-type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Eta {
    Zero,
    Half,
    One,
}

impl Eta {
    pub fn as_str(&self) -> &'static str {
        match self {
            Eta::Zero => "0",
            Eta::Half => "1/2",
            Eta::One => "1",
        }
    }

    pub fn parse(s: &str) -> Result<Eta, Error> {
        match s {
            "0" => Ok(Eta::Zero),
            "1/2" => Ok(Eta::Half),
            "1" => Ok(Eta::One),
            _ => Err(Error::InvalidInput(format!("bad eta value {s:?}"))),
        }
    }

    /// The epsilon bit for eta in {0, 1}; None for 1/2.
    pub fn bit(&self) -> Option<u8> {
        match self {
            Eta::Zero => Some(0),
            Eta::One => Some(1),
            Eta::Half => None,
        }
    }

    pub fn from_bit(b: u8) -> Eta {
        if b % 2 == 0 {
            Eta::Zero
        } else {
            Eta::One
        }
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An irreducible `O(n)`-representation label `(gamma; eta)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KTypeLabel {
    pub gamma: Weight,
    pub eta: Eta,
}

impl KTypeLabel {
    pub fn new(gamma: Weight, eta: Eta) -> Self {
        KTypeLabel { gamma, eta }
    }

    pub fn from_ints(gamma: &[i64], eta: Eta) -> Self {
        KTypeLabel::new(Weight::ints(gamma), eta)
    }

    /// Parity of the coordinate sum of `gamma`.
    pub fn parity(&self) -> u8 {
        (self.gamma.twice_sum() / 2).rem_euclid(2) as u8
    }
}

impl fmt::Display for KTypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self
            .gamma
            .twice_coords()
            .iter()
            .map(|t| (t / 2).to_string())
            .collect();
        write!(f, "({};{})", coords.join(","), self.eta)
    }
}

impl fmt::Debug for KTypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for KTypeLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let gamma: Vec<i64> = self.gamma.twice_coords().iter().map(|t| t / 2).collect();
        let mut st = serializer.serialize_struct("KTypeLabel", 2)?;
        st.serialize_field("gamma", &gamma)?;
        st.serialize_field("eta", self.eta.as_str())?;
        st.end()
    }
}

/// Validates `(gamma; eta)` as an `O(n)`-type: `gamma` weakly decreasing
/// non-negative integers of rank `floor(n/2)`; when `n` is even and the last
/// coordinate is positive the label must carry `eta = 1/2`, otherwise
/// `eta` is 0 or 1.
pub fn validate(label: &KTypeLabel, n: usize) -> bool {
    if n < 1 || label.gamma.rank() != n / 2 {
        return false;
    }
    if !label.gamma.is_integral() || !label.gamma.is_dominant_nonneg() {
        return false;
    }
    let last_positive = label.gamma.twice_coords().last().map_or(false, |t| *t > 0);
    if n % 2 == 0 && last_positive {
        label.eta == Eta::Half
    } else {
        label.eta != Eta::Half
    }
}

// ---------------------------------------------------------------------------
// Young-diagram picture of O(n)-types.
//
// An O(n)-type corresponds to a partition whose first two column lengths sum
// to at most n. Labels with eta = 1 use the associate diagram (first column
// replaced by its complement in n).
// ---------------------------------------------------------------------------

type Diagram = Vec<i64>;

fn conjugate(rows: &[i64]) -> Diagram {
    let width = rows.first().copied().unwrap_or(0);
    (1..=width)
        .map(|c| rows.iter().filter(|r| **r >= c).count() as i64)
        .collect()
}

fn diagram_is_valid(rows: &[i64], n: usize) -> bool {
    let cols = conjugate(rows);
    let c1 = cols.first().copied().unwrap_or(0);
    let c2 = cols.get(1).copied().unwrap_or(0);
    c1 + c2 <= n as i64
}

fn diagram_of(label: &KTypeLabel, n: usize) -> Diagram {
    let rows: Vec<i64> = label
        .gamma
        .twice_coords()
        .iter()
        .map(|t| t / 2)
        .filter(|r| *r > 0)
        .collect();
    match label.eta {
        Eta::Zero | Eta::Half => rows,
        Eta::One => {
            let h = rows.len() as i64;
            let mut cols = conjugate(&rows);
            if cols.is_empty() {
                cols.push(n as i64);
            } else {
                cols[0] = n as i64 - h;
            }
            conjugate(&cols)
        }
    }
}

fn label_of(rows: &[i64], n: usize) -> KTypeLabel {
    debug_assert!(diagram_is_valid(rows, n));
    let m = n / 2;
    let h = rows.len();
    if h <= m {
        let mut gamma = rows.to_vec();
        gamma.resize(m, 0);
        let eta = if n % 2 == 0 && h == m && m > 0 {
            Eta::Half
        } else {
            Eta::Zero
        };
        KTypeLabel::from_ints(&gamma, eta)
    } else {
        let mut cols = conjugate(rows);
        cols[0] = n as i64 - h as i64;
        let mut gamma = conjugate(&cols);
        gamma.resize(m, 0);
        KTypeLabel::from_ints(&gamma, Eta::One)
    }
}

/// Total number of boxes in the diagram of the label; its parity is conserved
/// under restriction to products of orthogonal subgroups.
pub fn diagram_size(label: &KTypeLabel, n: usize) -> i64 {
    diagram_of(label, n).iter().sum()
}

/// One-step branching `O(n)` to `O(n-1) x O(1)`.
///
/// Multiplicity-free: the diagrams of the constituents interlace the input
/// diagram row by row, and the `O(1)`-character is determined by the number
/// of removed boxes. Returns pairs of (label over `O(n-1)`, power of det on
/// the `O(1)` factor).
pub fn branch_to_on1(label: &KTypeLabel, n: usize) -> Result<Vec<(KTypeLabel, u8)>, Error> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("cannot branch O({n})")));
    }
    if !validate(label, n) {
        return Err(Error::InvalidInput(format!(
            "invalid O({n})-type label {label}"
        )));
    }
    let d = diagram_of(label, n);
    let total: i64 = d.iter().sum();
    let mut out = Vec::new();
    fn rec(
        d: &[i64],
        i: usize,
        mu: &mut Vec<i64>,
        total: i64,
        n: usize,
        out: &mut Vec<(KTypeLabel, u8)>,
    ) {
        if i == d.len() {
            let rows: Vec<i64> = mu.iter().copied().filter(|r| *r > 0).collect();
            if diagram_is_valid(&rows, n - 1) {
                let size: i64 = rows.iter().sum();
                out.push((label_of(&rows, n - 1), ((total - size) % 2) as u8));
            }
            return;
        }
        let lo = d.get(i + 1).copied().unwrap_or(0);
        for r in lo..=d[i] {
            mu.push(r);
            rec(d, i + 1, mu, total, n, out);
            mu.pop();
        }
    }
    let mut mu: Vec<i64> = Vec::new();
    rec(&d, 0, &mut mu, total, n, &mut out);
    out.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    Ok(out)
}

/// Highest weights of the `SO(n)`-constituents of the label: the weight
/// itself, plus the sign-flipped partner when `n` is even and the last
/// coordinate is positive.
pub fn so_constituents(label: &KTypeLabel, n: usize) -> Vec<Vec<i64>> {
    let gamma: Vec<i64> = label.gamma.twice_coords().iter().map(|t| t / 2).collect();
    let m = n / 2;
    if n % 2 == 0 && m > 0 && gamma[m - 1] > 0 {
        let mut flipped = gamma.clone();
        flipped[m - 1] = -flipped[m - 1];
        vec![gamma, flipped]
    } else {
        vec![gamma]
    }
}

/// Dimension of the `O(n)`-type.
pub fn o_dim(label: &KTypeLabel, n: usize) -> Result<u64, Error> {
    if !validate(label, n) {
        return Err(Error::InvalidInput(format!(
            "invalid O({n})-type label {label}"
        )));
    }
    let mut total = 0u64;
    for hw in so_constituents(label, n) {
        total += weyl_dim(&hw, n)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Root systems of SO(n) in standard coordinates.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum SoKind {
    B, // n odd
    D, // n even
}

struct RootSystem {
    kind: SoKind,
    rank: usize,
    positive: Vec<Vec<i64>>,
    /// rho doubled, so that all inner products stay integral.
    rho2: Vec<i64>,
}

impl RootSystem {
    fn for_so(n: usize) -> RootSystem {
        let m = n / 2;
        let kind = if n % 2 == 1 { SoKind::B } else { SoKind::D };
        let mut positive = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                let mut plus = vec![0i64; m];
                plus[i] = 1;
                plus[j] = 1;
                let mut minus = vec![0i64; m];
                minus[i] = 1;
                minus[j] = -1;
                positive.push(minus);
                positive.push(plus);
            }
        }
        if kind == SoKind::B {
            for i in 0..m {
                let mut e = vec![0i64; m];
                e[i] = 1;
                positive.push(e);
            }
        }
        let rho2: Vec<i64> = match kind {
            SoKind::B => (0..m).map(|i| 2 * (m - i) as i64 - 1).collect(),
            SoKind::D => (0..m).map(|i| 2 * (m - 1 - i) as i64).collect(),
        };
        RootSystem {
            kind,
            rank: m,
            positive,
            rho2,
        }
    }

    fn is_dominant(&self, w: &[i64]) -> bool {
        if self.rank == 0 {
            return true;
        }
        if !w.windows(2).all(|p| p[0] >= p[1]) {
            return false;
        }
        match self.kind {
            SoKind::B => w[self.rank - 1] >= 0,
            SoKind::D => {
                if self.rank >= 2 {
                    w[self.rank - 2] >= w[self.rank - 1].abs()
                } else {
                    true
                }
            }
        }
    }

    fn dominant_rep(&self, w: &[i64]) -> Vec<i64> {
        let mut abs: Vec<i64> = w.iter().map(|x| x.abs()).collect();
        abs.sort_unstable_by(|a, b| b.cmp(a));
        if self.kind == SoKind::D && self.rank > 0 {
            let negatives = w.iter().filter(|x| **x < 0).count();
            if negatives % 2 == 1 {
                let last = self.rank - 1;
                abs[last] = -abs[last];
            }
        }
        abs
    }

    /// Is `d` a non-negative integer combination of simple roots?
    fn in_root_cone(&self, d: &[i64]) -> bool {
        let m = self.rank;
        if m == 0 {
            return d.is_empty();
        }
        match self.kind {
            SoKind::B => {
                let mut partial = 0i64;
                for x in d {
                    partial += x;
                    if partial < 0 {
                        return false;
                    }
                }
                true
            }
            SoKind::D => {
                if m == 1 {
                    return d[0] == 0;
                }
                let mut partial = 0i64;
                for x in d.iter().take(m - 2) {
                    partial += x;
                    if partial < 0 {
                        return false;
                    }
                }
                let s = partial;
                let a = s + d[m - 2] - d[m - 1];
                let b = s + d[m - 2] + d[m - 1];
                a >= 0 && b >= 0 && a % 2 == 0 && b % 2 == 0
            }
        }
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact Weyl dimension of the `SO(n)`-irreducible with highest weight `hw`.
pub fn weyl_dim(hw: &[i64], n: usize) -> Result<u64, Error> {
    let sys = RootSystem::for_so(n);
    if hw.len() != sys.rank {
        return Err(Error::InvalidInput(format!(
            "highest weight rank {} does not match SO({n})",
            hw.len()
        )));
    }
    if !sys.is_dominant(hw) {
        return Err(Error::InvalidInput(format!(
            "weight {hw:?} is not dominant for SO({n})"
        )));
    }
    let lam2: Vec<i64> = hw.iter().zip(&sys.rho2).map(|(l, r)| 2 * l + r).collect();
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for alpha in &sys.positive {
        num *= dot(&lam2, alpha).unsigned_abs() as u128;
        den *= dot(&sys.rho2, alpha).unsigned_abs() as u128;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    debug_assert_eq!(den, 1);
    u64::try_from(num / den)
        .map_err(|_| Error::Infeasible(format!("dimension overflow for {hw:?} over SO({n})")))
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Ceilings for the character oracle. Work beyond them is refused with an
/// explicit error rather than approximated.
#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    pub max_rank: usize,
    pub max_dim: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_rank: 5,
            max_dim: 1_000_000,
        }
    }
}

impl OracleLimits {
    /// Defaults overridden by `DIRAC_ORACLE_MAX_RANK` / `DIRAC_ORACLE_MAX_DIM`.
    pub fn from_env() -> Self {
        let mut limits = OracleLimits::default();
        if let Some(v) = std::env::var("DIRAC_ORACLE_MAX_RANK")
            .ok()
            .and_then(|s| s.parse().ok())
        {
            limits.max_rank = v;
        }
        if let Some(v) = std::env::var("DIRAC_ORACLE_MAX_DIM")
            .ok()
            .and_then(|s| s.parse().ok())
        {
            limits.max_dim = v;
        }
        limits
    }
}

// ---------------------------------------------------------------------------
// Sparse torus characters.
// ---------------------------------------------------------------------------

/// Group a torus character lives on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Group {
    So(usize),
    /// `SO(a) x SO(b)`; torus coordinates are the first `a/2` then `b/2`.
    SplitSo(usize, usize),
}

impl Group {
    pub fn rank(&self) -> usize {
        match self {
            Group::So(n) => n / 2,
            Group::SplitSo(a, b) => a / 2 + b / 2,
        }
    }
}

/// Exact weight-multiplicity map of a (possibly virtual) torus character.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TorusCharacter {
    group: Group,
    weights: BTreeMap<Vec<i64>, i64>,
}

impl TorusCharacter {
    pub fn zero(group: Group) -> Self {
        TorusCharacter {
            group,
            weights: BTreeMap::new(),
        }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn weights(&self) -> &BTreeMap<Vec<i64>, i64> {
        &self.weights
    }

    pub fn dim(&self) -> i64 {
        self.weights.values().sum()
    }

    pub fn multiplicity(&self, w: &[i64]) -> i64 {
        self.weights.get(w).copied().unwrap_or(0)
    }

    fn insert(&mut self, w: Vec<i64>, mult: i64) {
        if mult == 0 {
            return;
        }
        match self.weights.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(mult);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += mult;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &TorusCharacter) {
        assert_eq!(self.group, other.group);
        for (w, m) in &other.weights {
            self.insert(w.clone(), *m);
        }
    }

    pub fn sub_mul(&mut self, other: &TorusCharacter, mult: i64) {
        assert_eq!(self.group, other.group);
        for (w, m) in &other.weights {
            self.insert(w.clone(), -mult * m);
        }
    }

    /// Pointwise product (character of the tensor product).
    pub fn tensor(&self, other: &TorusCharacter) -> TorusCharacter {
        assert_eq!(self.group, other.group);
        let mut out = TorusCharacter::zero(self.group);
        for (w1, m1) in &self.weights {
            for (w2, m2) in &other.weights {
                let w: Vec<i64> = w1.iter().zip(w2).map(|(a, b)| a + b).collect();
                out.insert(w, m1 * m2);
            }
        }
        out
    }

    /// External product on `SO(a) x SO(b)`.
    pub fn boxed(&self, other: &TorusCharacter) -> TorusCharacter {
        let (a, b) = match (self.group, other.group) {
            (Group::So(a), Group::So(b)) => (a, b),
            _ => panic!("boxed expects two plain SO characters"),
        };
        let mut out = TorusCharacter::zero(Group::SplitSo(a, b));
        for (w1, m1) in &self.weights {
            for (w2, m2) in &other.weights {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.insert(w, m1 * m2);
            }
        }
        out
    }
}

/// Exact weight multiplicities of the irreducible `SO(n)`-representation
/// with highest weight `hw`, by Freudenthal's recursion.
pub fn weyl_character(
    hw: &[i64],
    n: usize,
    limits: &OracleLimits,
) -> Result<TorusCharacter, Error> {
    let sys = RootSystem::for_so(n);
    if sys.rank > limits.max_rank {
        return Err(Error::Infeasible(format!(
            "SO({n}) has torus rank {} beyond the ceiling {}",
            sys.rank, limits.max_rank
        )));
    }
    let dim = weyl_dim(hw, n)?;
    if dim > limits.max_dim {
        return Err(Error::Infeasible(format!(
            "SO({n}) character of {hw:?} has dimension {dim} beyond the ceiling {}",
            limits.max_dim
        )));
    }

    // All weights: closure of the highest weight under subtracting positive
    // roots, kept when the dominant representative stays under `hw`.
    let mut weight_set: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    weight_set.insert(hw.to_vec());
    queue.push_back(hw.to_vec());
    while let Some(w) = queue.pop_front() {
        for alpha in &sys.positive {
            let cand: Vec<i64> = w.iter().zip(alpha).map(|(a, b)| a - b).collect();
            if weight_set.contains(&cand) {
                continue;
            }
            let dom = sys.dominant_rep(&cand);
            let diff: Vec<i64> = hw.iter().zip(&dom).map(|(a, b)| a - b).collect();
            if sys.in_root_cone(&diff) {
                weight_set.insert(cand.clone());
                queue.push_back(cand);
            }
        }
    }

    // Freudenthal recursion on dominant representatives.
    fn mult(
        mu: &[i64],
        hw: &[i64],
        sys: &RootSystem,
        weight_set: &HashSet<Vec<i64>>,
        memo: &mut HashMap<Vec<i64>, i64>,
    ) -> i64 {
        let dom = sys.dominant_rep(mu);
        if let Some(m) = memo.get(&dom) {
            return *m;
        }
        if !weight_set.contains(&dom) {
            return 0;
        }
        let lam2: Vec<i64> = hw.iter().zip(&sys.rho2).map(|(l, r)| 2 * l + r).collect();
        let mu2: Vec<i64> = dom.iter().zip(&sys.rho2).map(|(l, r)| 2 * l + r).collect();
        let den = dot(&lam2, &lam2) - dot(&mu2, &mu2);
        assert!(den > 0, "Freudenthal denominator must be positive");
        let mut num = 0i64;
        for alpha in &sys.positive {
            let mut k = 1i64;
            loop {
                let nu: Vec<i64> = dom.iter().zip(alpha).map(|(a, b)| a + k * b).collect();
                if !weight_set.contains(&sys.dominant_rep(&nu)) {
                    break;
                }
                let m = mult(&nu, hw, sys, weight_set, memo);
                num += m * dot(&nu, alpha);
                k += 1;
            }
        }
        // num carries plain inner products, den quadrupled ones.
        let value = 8 * num / den;
        assert_eq!(8 * num % den, 0, "Freudenthal division must be exact");
        memo.insert(dom, value);
        value
    }

    let mut memo: HashMap<Vec<i64>, i64> = HashMap::new();
    memo.insert(hw.to_vec(), 1);
    let mut chi = TorusCharacter::zero(Group::So(n));
    let weights: Vec<Vec<i64>> = weight_set.iter().cloned().collect();
    for w in weights {
        let m = mult(&w, hw, &sys, &weight_set, &mut memo);
        if m > 0 {
            chi.insert(w, m);
        }
    }
    debug_assert_eq!(chi.dim() as u64, dim);
    Ok(chi)
}

/// The `SO(n)`-restriction of an `O(n)`-type as a torus character (the sum
/// of the sign-flipped pair when `eta = 1/2`).
pub fn o_type_character(
    label: &KTypeLabel,
    n: usize,
    limits: &OracleLimits,
) -> Result<TorusCharacter, Error> {
    if !validate(label, n) {
        return Err(Error::InvalidInput(format!(
            "invalid O({n})-type label {label}"
        )));
    }
    let mut total = TorusCharacter::zero(Group::So(n));
    for hw in so_constituents(label, n) {
        total.add_assign(&weyl_character(&hw, n, limits)?);
    }
    Ok(total)
}

/// Re-indexes the torus of `SO(n)` onto `SO(a) x SO(b)`: the first `a/2`
/// coordinates go to the first factor, the next `b/2` to the second, and the
/// residual coordinate in the odd-by-odd case is evaluated at 1.
pub fn restrict_split(chi: &TorusCharacter, a: usize, b: usize) -> Result<TorusCharacter, Error> {
    let n = match chi.group {
        Group::So(n) => n,
        Group::SplitSo(..) => {
            return Err(Error::InvalidInput(
                "restrict_split expects a plain SO character".into(),
            ))
        }
    };
    if a + b != n || a == 0 || b == 0 {
        return Err(Error::InvalidInput(format!(
            "cannot split SO({n}) as SO({a}) x SO({b})"
        )));
    }
    let keep = a / 2 + b / 2;
    let mut out = TorusCharacter::zero(Group::SplitSo(a, b));
    for (w, m) in &chi.weights {
        out.insert(w[..keep].to_vec(), *m);
    }
    Ok(out)
}

fn irreducible_for(
    group: Group,
    hw: &[i64],
    limits: &OracleLimits,
) -> Result<TorusCharacter, Error> {
    match group {
        Group::So(n) => weyl_character(hw, n, limits),
        Group::SplitSo(a, b) => {
            let ma = a / 2;
            let chi_a = weyl_character(&hw[..ma], a, limits)?;
            let chi_b = weyl_character(&hw[ma..], b, limits)?;
            Ok(chi_a.boxed(&chi_b))
        }
    }
}

fn group_is_dominant(group: Group, w: &[i64]) -> bool {
    match group {
        Group::So(n) => RootSystem::for_so(n).is_dominant(w),
        Group::SplitSo(a, b) => {
            let ma = a / 2;
            RootSystem::for_so(a).is_dominant(&w[..ma])
                && RootSystem::for_so(b).is_dominant(&w[ma..])
        }
    }
}

/// Decomposes a genuine character into irreducibles by highest-weight
/// peeling: repeatedly extract the lexicographically greatest support weight
/// (necessarily the highest weight of a constituent) and subtract its
/// irreducible character. A negative multiplicity means the input was
/// virtual and is reported as an error.
pub fn decompose(chi: &TorusCharacter, limits: &OracleLimits) -> Result<Vec<(Vec<i64>, i64)>, Error> {
    let mut rest = chi.clone();
    let mut out: Vec<(Vec<i64>, i64)> = Vec::new();
    let mut cache: HashMap<Vec<i64>, TorusCharacter> = HashMap::new();
    while let Some((w, m)) = rest
        .weights
        .iter()
        .next_back()
        .map(|(w, m)| (w.clone(), *m))
    {
        if m < 0 {
            return Err(Error::VirtualCharacter(format!("{w:?}")));
        }
        if !group_is_dominant(rest.group, &w) {
            return Err(Error::Inconsistent(format!(
                "lex-greatest support weight {w:?} is not dominant"
            )));
        }
        let irr = match cache.get(&w) {
            Some(c) => c.clone(),
            None => {
                let c = irreducible_for(rest.group, &w, limits)?;
                cache.insert(w.clone(), c.clone());
                c
            }
        };
        rest.sub_mul(&irr, m);
        out.push((w, m));
    }
    out.sort();
    Ok(out)
}

/// Multiplicity of the `O(n)`-type `tau` in the module induced from a product
/// of two factors on `O(a) x O(b)`, measured at the `SO` level: the sum over
/// constituents `alpha (x) beta` of the restricted character of `tau` with
/// `alpha` in the first factor's K-type set and `beta` in the second's.
///
/// The factor sets are given as membership predicates on `SO`-level highest
/// weights.
pub fn so_multiplicity(
    a_contains: &dyn Fn(&[i64]) -> bool,
    a: usize,
    b_contains: &dyn Fn(&[i64]) -> bool,
    b: usize,
    tau: &KTypeLabel,
    n: usize,
    limits: &OracleLimits,
) -> Result<u64, Error> {
    let chi = o_type_character(tau, n, limits)?;
    let restricted = restrict_split(&chi, a, b)?;
    let ma = a / 2;
    let mut total = 0u64;
    for (hw, mult) in decompose(&restricted, limits)? {
        if a_contains(&hw[..ma]) && b_contains(&hw[ma..]) {
            total += mult as u64;
        }
    }
    Ok(total)
}
