//! The relevant unitary dual of `GL(n,R)`: Speh parameters, special
//! unipotent parameters, their chains and infinitesimal characters, explicit
//! K-type generators, parity, and enumeration of Dirac-series candidates.
//!
//! A module is a parabolically induced product of Speh factors `S_{k,b+1}`
//! on `GL(2k,R)` blocks and at most one special unipotent factor (trivial or
//! sign characters induced from a product of `GL(r_i,R)` blocks). Each factor
//! contributes a chain of infinitesimal-character coordinates; the module is
//! admissible exactly when the union of chain coordinates is repetition-free
//! and non-negative (positive for odd `n`).

use crate::ktypes::{Eta, KTypeLabel};
use crate::weights::Weight;
use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Chain flavor: `S` for a Speh factor, `U` for the unipotent factor.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ChainKind {
    S,
    U,
}

/// A descending sequence of infinitesimal-character coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    pub kind: ChainKind,
    pub coords: Vec<i64>,
}

impl Chain {
    pub fn new(kind: ChainKind, coords: Vec<i64>) -> Self {
        assert!(
            coords.windows(2).all(|w| w[0] > w[1]),
            "chain coordinates must be strictly decreasing"
        );
        Chain { kind, coords }
    }

    pub fn top(&self) -> Option<i64> {
        self.coords.first().copied()
    }

    pub fn bottom(&self) -> Option<i64> {
        self.coords.last().copied()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        let tag = match self.kind {
            ChainKind::S => "s",
            ChainKind::U => "u",
        };
        write!(f, "[{}]_{}", coords.join(","), tag)
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// Speh factors.
// ---------------------------------------------------------------------------

/// Parameters of the Speh representation `S_{k,b+1}` of `GL(2k,R)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SpehParams {
    pub k: u32,
    pub b: i64,
}

impl SpehParams {
    /// `b >= -k` keeps the parameter weakly fair; smaller `b` is rejected.
    pub fn new(k: u32, b: i64) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::InvalidInput("Speh factor needs k >= 1".into()));
        }
        if b < -(k as i64) {
            return Err(Error::InvalidInput(format!(
                "Speh parameter b={b} below the weakly fair bound -k={}",
                -(k as i64)
            )));
        }
        Ok(SpehParams { k, b })
    }

    pub fn gl_size(&self) -> usize {
        2 * self.k as usize
    }

    /// Infinitesimal character chain `[b+2k-1, b+2k-3, ..., b+1]`.
    pub fn infl_chain(&self) -> Chain {
        let k = self.k as i64;
        Chain::new(
            ChainKind::S,
            (0..k).map(|i| self.b + 2 * (k - i) - 1).collect(),
        )
    }

    /// Lowest K-type `((b+k+1, ..., b+k+1); 1/2)`.
    pub fn lkt(&self) -> KTypeLabel {
        let v = self.b + self.k as i64 + 1;
        KTypeLabel::from_ints(&vec![v; self.k as usize], Eta::Half)
    }

    /// All K-types with first coordinate at most `bound`:
    /// `((b+k+1+2a_1, ..., b+k+1+2a_k); 1/2)` over decreasing `a_i >= 0`.
    pub fn ktypes(&self, bound: i64) -> Vec<KTypeLabel> {
        let base = self.b + self.k as i64 + 1;
        let k = self.k as usize;
        let mut out = Vec::new();
        let mut gamma = vec![0i64; k];
        fn rec(i: usize, hi: i64, base: i64, gamma: &mut Vec<i64>, out: &mut Vec<KTypeLabel>) {
            if i == gamma.len() {
                out.push(KTypeLabel::from_ints(gamma, Eta::Half));
                return;
            }
            let mut v = base;
            while v <= hi {
                gamma[i] = v;
                rec(i + 1, v, base, gamma, out);
                v += 2;
            }
        }
        if base <= bound {
            rec(0, bound, base, &mut gamma, &mut out);
        }
        out.sort();
        out
    }

    /// Membership of an `SO(2k)`-dominant weight in the K-type set.
    pub fn so_contains(&self, w: &[i64]) -> bool {
        if w.len() != self.k as usize {
            return false;
        }
        let base = self.b + self.k as i64 + 1;
        w.iter()
            .map(|x| x.abs())
            .all(|v| v >= base && (v - base) % 2 == 0)
    }

    /// Parity of the coordinate sum of every K-type: `k (b + k + 1) mod 2`.
    pub fn ktype_parity(&self) -> u8 {
        ((self.k as i64) * (self.b + self.k as i64 + 1)).rem_euclid(2) as u8
    }
}

// ---------------------------------------------------------------------------
// Special unipotent factors.
// ---------------------------------------------------------------------------

/// Shape of a unipotent factor relevant to the Dirac series.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnipVariant {
    /// One block: trivial or sign character of `GL(r,R)`.
    Full,
    /// Two blocks (even, odd) with `r` odd.
    TwoBlockOdd,
    /// Blocks `(r-1, 1)` with `r` even, `r >= 4`.
    MinEven,
    /// Blocks (even, odd, 1) with `r` even.
    ThreeBlockEven,
}

/// A special unipotent factor: sign characters on a product of blocks.
///
/// Blocks are stored in variant order: the even block first for two- and
/// three-block shapes, the final `GL(1)` block last. Shapes whose chain
/// coordinates necessarily repeat (in particular blocks `(1,1)`, whose
/// representation already occurs as the Speh parameter `k=1, b=-1`) are
/// rejected.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct UnipParams {
    blocks: Vec<u32>,
    eps: Vec<u8>,
}

impl UnipParams {
    pub fn new(blocks: &[u32], eps: &[u8]) -> Result<Self, Error> {
        if blocks.len() != eps.len() {
            return Err(Error::InvalidInput(format!(
                "{} blocks but {} sign labels",
                blocks.len(),
                eps.len()
            )));
        }
        if blocks.iter().any(|b| *b == 0) || eps.iter().any(|e| *e > 1) {
            return Err(Error::InvalidInput(
                "unipotent blocks must be positive and signs 0/1".into(),
            ));
        }
        let reject = || {
            Err(Error::InvalidInput(format!(
                "unipotent blocks {blocks:?} are not a Dirac-series shape"
            )))
        };
        let mut pairs: Vec<(u32, u8)> = blocks.iter().copied().zip(eps.iter().copied()).collect();
        let ordered: Vec<(u32, u8)> = match pairs.len() {
            1 => pairs,
            2 => {
                let evens = pairs.iter().filter(|(b, _)| b % 2 == 0).count();
                match evens {
                    1 => {
                        // (even, odd): r odd.
                        pairs.sort_by_key(|(b, _)| b % 2);
                        pairs
                    }
                    0 => {
                        // (odd >= 3, 1): r even.
                        pairs.sort_by_key(|(b, _)| std::cmp::Reverse(*b));
                        if pairs[1].0 != 1 || pairs[0].0 == 1 {
                            return reject();
                        }
                        pairs
                    }
                    _ => return reject(),
                }
            }
            3 => {
                // (even, odd, 1): pull the even block first, a 1 last.
                let even_count = pairs.iter().filter(|(b, _)| b % 2 == 0).count();
                let even_pos = pairs.iter().position(|(b, _)| b % 2 == 0);
                let (Some(ei), 1) = (even_pos, even_count) else {
                    return reject();
                };
                let even = pairs.remove(ei);
                let Some(oi) = pairs.iter().rposition(|(b, _)| *b == 1) else {
                    return reject();
                };
                let one = pairs.remove(oi);
                vec![even, pairs[0], one]
            }
            _ => return reject(),
        };
        Ok(UnipParams {
            blocks: ordered.iter().map(|(b, _)| *b).collect(),
            eps: ordered.iter().map(|(_, e)| *e).collect(),
        })
    }

    pub fn variant(&self) -> UnipVariant {
        match self.blocks.len() {
            1 => UnipVariant::Full,
            2 if self.blocks[1] == 1 && self.blocks[0] % 2 == 1 => UnipVariant::MinEven,
            2 => UnipVariant::TwoBlockOdd,
            _ => UnipVariant::ThreeBlockEven,
        }
    }

    pub fn gl_size(&self) -> usize {
        self.blocks.iter().map(|b| *b as usize).sum()
    }

    pub fn rank(&self) -> usize {
        self.gl_size() / 2
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn eps(&self) -> &[u8] {
        &self.eps
    }

    /// Sorts the sign labels on the two `GL(1)` blocks of the `b = 1`
    /// three-block shape; induction does not depend on their order.
    pub fn canonical(&self) -> UnipParams {
        let mut out = self.clone();
        if self.variant() == UnipVariant::ThreeBlockEven && self.blocks[1] == 1 {
            let (a, b) = (out.eps[1], out.eps[2]);
            out.eps[1] = a.min(b);
            out.eps[2] = a.max(b);
        }
        out
    }

    /// For two- and three-block shapes: sizes of the two large blocks as
    /// (max, min).
    fn p_q(&self) -> (i64, i64) {
        let a = self.blocks[0] as i64;
        let c = self.blocks[1] as i64;
        (a.max(c), a.min(c))
    }

    /// Infinitesimal character chain of the factor.
    pub fn infl_chain(&self) -> Chain {
        let r = self.gl_size() as i64;
        let coords: Vec<i64> = match self.variant() {
            // For one block the doubled contents descend from r-1 in steps
            // of two, down to 1 (r even) or 2 (r odd).
            UnipVariant::Full => (0..r / 2).map(|i| r - 1 - 2 * i).collect(),
            UnipVariant::MinEven => (0..r / 2).map(|i| r - 2 - 2 * i).collect(),
            UnipVariant::TwoBlockOdd => {
                let (p, q) = self.p_q();
                let mut coords: Vec<i64> = (0..(p - q - 1) / 2).map(|i| p - 1 - 2 * i).collect();
                coords.extend((1..=q).rev());
                coords
            }
            UnipVariant::ThreeBlockEven => {
                let (p, q) = self.p_q();
                let mut coords: Vec<i64> = (0..(p - q - 1) / 2).map(|i| p - 1 - 2 * i).collect();
                coords.extend((0..=q).rev());
                coords
            }
        };
        Chain::new(ChainKind::U, coords)
    }

    /// The sign on the even block for two- and three-block shapes, the big
    /// block for the minimal shape, the only block for `Full`.
    fn eps1(&self) -> u8 {
        self.eps[0]
    }

    fn eps2(&self) -> u8 {
        self.eps[1]
    }

    fn eps3(&self) -> u8 {
        self.eps[2]
    }

    /// The eta carried by K-types with vanishing last coordinate: `eps_1`
    /// when the number of free coordinates is odd, `eps_2` otherwise.
    fn eps_prime(&self) -> u8 {
        match self.variant() {
            UnipVariant::Full | UnipVariant::MinEven => self.eps1(),
            UnipVariant::TwoBlockOdd | UnipVariant::ThreeBlockEven => {
                if self.p_q().1 % 2 == 1 {
                    self.eps1()
                } else {
                    self.eps2()
                }
            }
        }
    }

    fn finish_label(&self, gamma: Vec<i64>) -> KTypeLabel {
        let r = self.gl_size();
        let m = self.rank();
        let eta = if r % 2 == 0 && m > 0 && gamma[m - 1] > 0 {
            Eta::Half
        } else {
            Eta::from_bit(self.eps_prime())
        };
        KTypeLabel::from_ints(&gamma, eta)
    }

    /// Does a zero-tail coordinate vector pass the three-block constraints:
    /// an interlacing sequence of fixed parity exists and the total parity
    /// matches `eps_2 + eps_3`?
    fn three_block_accepts(&self, gamma: &[i64]) -> bool {
        let q = self.p_q().1 as usize;
        let p12 = (self.eps1() + self.eps2()) % 2;
        let p23 = (self.eps2() + self.eps3()) % 2;
        if gamma.iter().skip(q + 1).any(|x| *x != 0) {
            return false;
        }
        if gamma.iter().sum::<i64>().rem_euclid(2) as u8 != p23 {
            return false;
        }
        for j in 0..q {
            let hi = gamma[j];
            let lo = gamma.get(j + 1).copied().unwrap_or(0);
            // The closed interval [lo, hi] needs an integer of parity p12.
            if hi == lo && hi.rem_euclid(2) as u8 != p12 {
                return false;
            }
        }
        true
    }

    /// All K-types of the factor with first coordinate at most `bound`.
    pub fn ktypes(&self, bound: i64) -> Vec<KTypeLabel> {
        let m = self.rank();
        let mut out = Vec::new();
        match self.variant() {
            UnipVariant::Full => {
                out.push(KTypeLabel::from_ints(
                    &vec![0; m],
                    Eta::from_bit(self.eps1()),
                ));
            }
            UnipVariant::MinEven => {
                let par = ((self.eps1() + self.eps2()) % 2) as i64;
                let mut v = par;
                while v <= bound {
                    let mut gamma = vec![0i64; m];
                    gamma[0] = v;
                    out.push(self.finish_label(gamma));
                    v += 2;
                }
            }
            UnipVariant::TwoBlockOdd => {
                let par = ((self.eps1() + self.eps2()) % 2) as i64;
                let q = self.p_q().1 as usize;
                let mut gamma = vec![0i64; m];
                self.two_block_rec(0, bound, par, q, &mut gamma, &mut out);
            }
            UnipVariant::ThreeBlockEven => {
                let q = self.p_q().1 as usize;
                let mut gamma = vec![0i64; m];
                self.three_block_rec(0, bound, q, &mut gamma, &mut out);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn two_block_rec(
        &self,
        i: usize,
        hi: i64,
        par: i64,
        q: usize,
        gamma: &mut Vec<i64>,
        out: &mut Vec<KTypeLabel>,
    ) {
        if i == q {
            out.push(self.finish_label(gamma.clone()));
            return;
        }
        let mut v = par;
        while v <= hi {
            gamma[i] = v;
            self.two_block_rec(i + 1, v, par, q, gamma, out);
            gamma[i] = 0;
            v += 2;
        }
    }

    fn three_block_rec(
        &self,
        i: usize,
        hi: i64,
        q: usize,
        gamma: &mut Vec<i64>,
        out: &mut Vec<KTypeLabel>,
    ) {
        if i == q + 1 {
            if self.three_block_accepts(gamma) {
                out.push(self.finish_label(gamma.clone()));
            }
            return;
        }
        for v in 0..=hi {
            gamma[i] = v;
            self.three_block_rec(i + 1, v, q, gamma, out);
            gamma[i] = 0;
        }
    }

    /// The lowest K-type of the factor: the minimal member of the K-type
    /// stream under (coordinate sum, lexicographic) order.
    pub fn lkt(&self) -> KTypeLabel {
        let m = self.rank();
        match self.variant() {
            UnipVariant::Full => KTypeLabel::from_ints(&vec![0; m], Eta::from_bit(self.eps1())),
            UnipVariant::MinEven => {
                let mut gamma = vec![0i64; m];
                gamma[0] = ((self.eps1() + self.eps2()) % 2) as i64;
                self.finish_label(gamma)
            }
            UnipVariant::TwoBlockOdd => {
                let par = ((self.eps1() + self.eps2()) % 2) as i64;
                let q = self.p_q().1 as usize;
                let mut gamma = vec![0i64; m];
                for slot in gamma.iter_mut().take(q) {
                    *slot = par;
                }
                self.finish_label(gamma)
            }
            UnipVariant::ThreeBlockEven => {
                let q = self.p_q().1 as usize;
                let p12 = (self.eps1() + self.eps2()) % 2;
                let p23 = (self.eps2() + self.eps3()) % 2;
                let ones = if p12 == 0 {
                    p23 as usize
                } else if (q as u8) % 2 == p23 {
                    q
                } else {
                    q + 1
                };
                let mut gamma = vec![0i64; m];
                for slot in gamma.iter_mut().take(ones) {
                    *slot = 1;
                }
                self.finish_label(gamma)
            }
        }
    }

    /// Membership of an `SO(r)`-dominant weight in the K-type set.
    pub fn so_contains(&self, w: &[i64]) -> bool {
        let m = self.rank();
        if w.len() != m {
            return false;
        }
        let mut v: Vec<i64> = w.to_vec();
        if let Some(last) = v.last_mut() {
            *last = last.abs();
        }
        match self.variant() {
            UnipVariant::Full => v.iter().all(|x| *x == 0),
            UnipVariant::MinEven => {
                let par = ((self.eps1() + self.eps2()) % 2) as i64;
                v.iter().skip(1).all(|x| *x == 0) && v[0].rem_euclid(2) == par
            }
            UnipVariant::TwoBlockOdd => {
                let par = ((self.eps1() + self.eps2()) % 2) as i64;
                let q = self.p_q().1 as usize;
                v.iter().skip(q).all(|x| *x == 0)
                    && v.iter().take(q).all(|x| x.rem_euclid(2) == par)
            }
            UnipVariant::ThreeBlockEven => self.three_block_accepts(&v),
        }
    }

    /// K-type parity bit for even `r`: all K-types of the factor share the
    /// parity `eps_1 + eps_2` (minimal shape) or `eps_2 + eps_3` (three-block
    /// shape); the trivial/sign characters are even. Odd `r` is rejected:
    /// there the K-type parity is not a single bit.
    pub fn parity(&self) -> Result<u8, Error> {
        match self.variant() {
            UnipVariant::Full if self.gl_size() % 2 == 0 => Ok(0),
            UnipVariant::MinEven => Ok((self.eps1() + self.eps2()) % 2),
            UnipVariant::ThreeBlockEven => Ok((self.eps2() + self.eps3()) % 2),
            _ => Err(Error::InvalidInput(
                "K-type parity is a single bit only for even block totals".into(),
            )),
        }
    }

    /// Label in the tabulated style, e.g. `pi_{5,0}^{eps1,eps2}`.
    pub fn display_name(&self) -> String {
        let r = self.gl_size();
        match self.variant() {
            UnipVariant::Full => {
                if self.eps1() == 0 {
                    "triv".into()
                } else {
                    "sgn(det)".into()
                }
            }
            UnipVariant::MinEven => {
                format!("π_{{{r},min}}^{{({},{})}}", self.eps1(), self.eps2())
            }
            UnipVariant::TwoBlockOdd => {
                // Tabulated subscript convention: blocks (r-2b+1, 2b-1) are
                // written with subscript b-1.
                let b = (self.blocks[1] as i64 + 1) / 2;
                format!("π_{{{r},{}}}^{{({},{})}}", b - 1, self.eps1(), self.eps2())
            }
            UnipVariant::ThreeBlockEven => {
                let b = (self.blocks[1] as i64 + 1) / 2;
                format!(
                    "π_{{{r},{}}}^{{({},{},{})}}",
                    b,
                    self.eps1(),
                    self.eps2(),
                    self.eps3()
                )
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Composite modules.
// ---------------------------------------------------------------------------

/// A unitary module: Speh factors plus an optional unipotent factor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct UnitaryModule {
    pub speh: Vec<SpehParams>,
    pub unip: Option<UnipParams>,
}

impl UnitaryModule {
    pub fn new(speh: Vec<SpehParams>, unip: Option<UnipParams>) -> Self {
        UnitaryModule { speh, unip }
    }

    pub fn n(&self) -> usize {
        self.speh.iter().map(|p| p.gl_size()).sum::<usize>()
            + self.unip.as_ref().map_or(0, |u| u.gl_size())
    }

    pub fn rank(&self) -> usize {
        self.n() / 2
    }

    /// The nonempty chains of the module (a `GL(1)` unipotent factor carries
    /// no coordinates and hence no chain).
    pub fn chains(&self) -> Vec<Chain> {
        let mut out: Vec<Chain> = self.speh.iter().map(|p| p.infl_chain()).collect();
        if let Some(u) = &self.unip {
            let c = u.infl_chain();
            if !c.is_empty() {
                out.push(c);
            }
        }
        out
    }

    /// Sorted union (with repetitions) of all chain coordinates.
    pub fn infl_char(&self) -> Weight {
        let mut coords: Vec<i64> = self
            .chains()
            .iter()
            .flat_map(|c| c.coords.iter().copied())
            .collect();
        coords.sort_unstable_by(|a, b| b.cmp(a));
        Weight::ints(&coords)
    }

    /// Distinct coordinates, non-negative for even `n` and positive for odd
    /// `n`; the coordinate count then automatically fills the torus rank.
    pub fn admissible(&self) -> bool {
        let n = self.n();
        if n < 2 {
            return false;
        }
        let coords = self.infl_char();
        let t = coords.twice_coords();
        if t.len() != self.rank() {
            return false;
        }
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

    /// K-type parity bit for even `n`: the Speh factor parities
    /// `k_i (b_i + k_i + 1)` plus the unipotent factor parity.
    pub fn parity(&self) -> Result<u8, Error> {
        if self.n() % 2 != 0 {
            return Err(Error::InvalidInput(
                "module parity is a single bit only for even n".into(),
            ));
        }
        let mut p = 0u8;
        for s in &self.speh {
            p = (p + s.ktype_parity()) % 2;
        }
        if let Some(u) = &self.unip {
            p = (p + u.parity()?) % 2;
        }
        Ok(p)
    }

    /// Canonical form: Speh factors sorted by `(k+b, k)` descending, sign
    /// labels on interchangeable unipotent blocks sorted.
    pub fn canonical(&self) -> UnitaryModule {
        let mut speh = self.speh.clone();
        speh.sort_by(|a, b| {
            let ka = a.k as i64 + a.b;
            let kb = b.k as i64 + b.b;
            (kb, b.k).cmp(&(ka, a.k))
        });
        UnitaryModule {
            speh,
            unip: self.unip.as_ref().map(|u| u.canonical()),
        }
    }

    pub fn to_descriptor(&self) -> ModuleDescriptor {
        ModuleDescriptor {
            n: self.n(),
            speh: self
                .speh
                .iter()
                .map(|p| SpehDescriptor { k: p.k, b: p.b })
                .collect(),
            unip: self.unip.as_ref().map(|u| UnipDescriptor {
                blocks: u.blocks.clone(),
                eps: u.eps.clone(),
            }),
        }
    }

    pub fn from_descriptor(d: &ModuleDescriptor) -> Result<Self, Error> {
        let speh: Result<Vec<SpehParams>, Error> =
            d.speh.iter().map(|s| SpehParams::new(s.k, s.b)).collect();
        let unip = match &d.unip {
            None => None,
            Some(u) => Some(UnipParams::new(&u.blocks, &u.eps)?),
        };
        let module = UnitaryModule::new(speh?, unip);
        if module.n() != d.n {
            return Err(Error::InvalidInput(format!(
                "descriptor says n={} but the factors fill GL({})",
                d.n,
                module.n()
            )));
        }
        Ok(module)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_descriptor()).expect("descriptor serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        let d: ModuleDescriptor = serde_json::from_str(s)?;
        UnitaryModule::from_descriptor(&d)
    }
}

impl fmt::Display for UnitaryModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> =
            self.speh.iter().map(|p| p.infl_chain().to_string()).collect();
        if let Some(u) = &self.unip {
            let chain = u.infl_chain();
            let eps: Vec<String> = u.eps.iter().map(|e| e.to_string()).collect();
            parts.push(format!("{chain}:eps={}", eps.join(",")));
        }
        write!(f, "GL({}) {}", self.n(), parts.join(" + "))
    }
}

/// JSON-facing descriptor:
/// `{"n":..., "speh":[{"k":..,"b":..},...], "unip":{"blocks":[...],"eps":[...]}|null}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleDescriptor {
    pub n: usize,
    pub speh: Vec<SpehDescriptor>,
    pub unip: Option<UnipDescriptor>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpehDescriptor {
    pub k: u32,
    pub b: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnipDescriptor {
    pub blocks: Vec<u32>,
    pub eps: Vec<u8>,
}

// ---------------------------------------------------------------------------
// Enumeration of Dirac-series candidates.
// ---------------------------------------------------------------------------

/// All unipotent shapes over `GL(r,R)` relevant to the Dirac series, without
/// sign labels.
pub(crate) fn unip_shapes(r: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if r == 0 {
        return out;
    }
    out.push(vec![r]);
    if r % 2 == 1 {
        // (even, odd) splits of odd r.
        let mut b = 1;
        while 2 * b - 1 < r {
            out.push(vec![r - 2 * b + 1, 2 * b - 1]);
            b += 1;
        }
    } else {
        if r >= 4 {
            out.push(vec![r - 1, 1]);
        }
        let mut b = 1;
        while 2 * b < r {
            out.push(vec![r - 2 * b, 2 * b - 1, 1]);
            b += 1;
        }
    }
    out
}

/// Every admissible module for `GL(n,R)` whose largest chain coordinate is
/// at most `max_coord`, each exactly once in canonical form, in a
/// deterministic order.
pub fn enumerate_dirac_candidates(n: usize, max_coord: i64) -> Vec<UnitaryModule> {
    let mut out: Vec<UnitaryModule> = Vec::new();
    let lo = if n % 2 == 1 { 1i64 } else { 0 };
    // Unipotent part: none (even n only) or r matching the parity of n.
    let mut unip_options: Vec<Option<UnipParams>> = Vec::new();
    if n % 2 == 0 {
        unip_options.push(None);
    }
    let mut r = if n % 2 == 0 { 2 } else { 1 };
    while r <= n {
        for shape in unip_shapes(r as u32) {
            let s = shape.len();
            for bits in 0..(1u32 << s) {
                let eps: Vec<u8> = (0..s).map(|i| ((bits >> i) & 1) as u8).collect();
                if let Ok(u) = UnipParams::new(&shape, &eps) {
                    if u.canonical() != u {
                        continue;
                    }
                    let chain = u.infl_chain();
                    if chain.top().map_or(false, |t| t > max_coord) {
                        continue;
                    }
                    if chain.bottom().map_or(false, |b| b < lo) {
                        continue;
                    }
                    unip_options.push(Some(u));
                }
            }
        }
        r += 2;
    }
    for unip in unip_options {
        let budget = (n - unip.as_ref().map_or(0, |u| u.gl_size())) / 2;
        let mut used: Vec<i64> = unip
            .as_ref()
            .map(|u| u.infl_chain().coords.clone())
            .unwrap_or_default();
        let mut speh: Vec<SpehParams> = Vec::new();
        extend_speh(budget, max_coord, lo, &mut used, &mut speh, &mut |speh| {
            let module = UnitaryModule::new(speh.to_vec(), unip.clone()).canonical();
            debug_assert!(module.admissible());
            out.push(module);
        });
    }
    out.sort();
    out.dedup();
    out
}

/// Extends a module with Speh chains of strictly decreasing tops so that
/// every multiset of chains is produced exactly once.
fn extend_speh(
    budget: usize,
    max_top: i64,
    lo: i64,
    used: &mut Vec<i64>,
    speh: &mut Vec<SpehParams>,
    emit: &mut dyn FnMut(&[SpehParams]),
) {
    if budget == 0 {
        emit(speh);
        return;
    }
    for top in (lo..=max_top).rev() {
        for k in 1..=(budget as i64) {
            let bottom = top - 2 * (k - 1);
            if bottom < lo {
                break;
            }
            let coords: Vec<i64> = (0..k).map(|i| top - 2 * i).collect();
            if coords.iter().any(|c| used.contains(c)) {
                continue;
            }
            let params = SpehParams::new(k as u32, bottom - 1).expect("valid Speh parameters");
            used.extend(&coords);
            speh.push(params);
            extend_speh(budget - k as usize, top - 1, lo, used, speh, emit);
            speh.pop();
            used.truncate(used.len() - coords.len());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{dominant_conjugate, rho_c, sigma};

    fn speh(k: u32, b: i64) -> SpehParams {
        SpehParams::new(k, b).unwrap()
    }

    fn unip(blocks: &[u32], eps: &[u8]) -> UnipParams {
        UnipParams::new(blocks, eps).unwrap()
    }

    #[test]
    fn speh_chains() {
        assert_eq!(speh(2, 8).infl_chain().coords, vec![11, 9]);
        assert_eq!(speh(5, 0).infl_chain().coords, vec![9, 7, 5, 3, 1]);
        assert_eq!(speh(3, -1).infl_chain().coords, vec![4, 2, 0]);
        assert!(SpehParams::new(2, -3).is_err());
        assert!(SpehParams::new(0, 0).is_err());
    }

    #[test]
    fn speh_lowest_ktypes() {
        assert_eq!(
            speh(5, 0).lkt(),
            KTypeLabel::from_ints(&[6, 6, 6, 6, 6], Eta::Half)
        );
        assert_eq!(
            speh(3, -1).lkt(),
            KTypeLabel::from_ints(&[3, 3, 3], Eta::Half)
        );
        let got = speh(1, 0).ktypes(4);
        assert_eq!(
            got,
            vec![
                KTypeLabel::from_ints(&[2], Eta::Half),
                KTypeLabel::from_ints(&[4], Eta::Half),
            ]
        );
    }

    #[test]
    fn speh_lkt_is_one_above_chain_average() {
        for p in [speh(2, 8), speh(5, 0), speh(3, -1), speh(1, 2)] {
            let chain = p.infl_chain();
            let avg_twice = 2 * chain.coords.iter().sum::<i64>() / chain.len() as i64;
            let lkt_entry = p.lkt().gamma.twice_coords()[0];
            assert_eq!(lkt_entry, avg_twice + 2);
        }
    }

    #[test]
    fn speh_prv_parity_matches_infl_char() {
        // For every K-type of a Speh factor, {gamma - sigma} and
        // lambda - rho_c have the same coordinate-sum parity.
        for p in [speh(1, 0), speh(2, 1), speh(3, -1)] {
            let n = p.gl_size();
            let lambda = UnitaryModule::new(vec![p], None).infl_char();
            let target = lambda.sub(&rho_c(n).unwrap());
            let target_parity = target.twice_sum().rem_euclid(4);
            for tau in p.ktypes(p.b + p.k as i64 + 7) {
                let prv = dominant_conjugate(&tau.gamma.sub(&sigma(n).unwrap()));
                assert_eq!(
                    prv.twice_sum().rem_euclid(4),
                    target_parity,
                    "{tau} in S_{{{},{}}}",
                    p.k,
                    p.b + 1
                );
            }
        }
    }

    #[test]
    fn unip_recognition_and_chains() {
        assert_eq!(
            unip(&[6, 3, 1], &[0, 0, 0]).infl_chain().coords,
            vec![5, 3, 2, 1, 0]
        );
        assert_eq!(unip(&[5, 1], &[0, 0]).infl_chain().coords, vec![4, 2, 0]);
        assert_eq!(unip(&[4, 1], &[0, 0]).infl_chain().coords, vec![3, 1]);
        assert_eq!(unip(&[3], &[0]).infl_chain().coords, vec![2]);
        assert_eq!(unip(&[2], &[1]).infl_chain().coords, vec![1]);
        assert_eq!(unip(&[1], &[1]).infl_chain().coords, Vec::<i64>::new());
        assert_eq!(
            unip(&[2, 3, 1], &[0, 0, 0]).infl_chain().coords,
            vec![2, 1, 0]
        );
        // Variant recognition is input-order independent.
        assert_eq!(unip(&[3, 2], &[1, 0]).variant(), UnipVariant::TwoBlockOdd);
        assert_eq!(unip(&[3, 2], &[1, 0]).blocks(), &[2, 3]);
        assert_eq!(unip(&[3, 2], &[1, 0]).eps(), &[0, 1]);
        // Rejected shapes.
        assert!(UnipParams::new(&[1, 1], &[0, 1]).is_err());
        assert!(UnipParams::new(&[3, 3], &[0, 1]).is_err());
        assert!(UnipParams::new(&[2, 2, 1], &[0, 0, 0]).is_err());
        assert!(UnipParams::new(&[4, 3, 2, 1], &[0; 4]).is_err());
    }

    #[test]
    fn unip_ktype_streams() {
        let got = unip(&[3, 1], &[0, 0]).ktypes(4);
        assert_eq!(
            got,
            vec![
                KTypeLabel::from_ints(&[0, 0], Eta::Zero),
                KTypeLabel::from_ints(&[2, 0], Eta::Zero),
                KTypeLabel::from_ints(&[4, 0], Eta::Zero),
            ]
        );
        let got = unip(&[4, 1], &[0, 1]).ktypes(3);
        assert_eq!(
            got,
            vec![
                KTypeLabel::from_ints(&[1, 0], Eta::Zero),
                KTypeLabel::from_ints(&[3, 0], Eta::Zero),
            ]
        );
        // Every K-type of the three-block factor carries parity eps2+eps3.
        let u = unip(&[2, 3, 1], &[0, 0, 0]);
        let stream = u.ktypes(6);
        assert!(!stream.is_empty());
        for label in &stream {
            assert_eq!(label.parity(), 0, "{label}");
        }
        // Tabulated lowest K-types.
        assert_eq!(u.lkt(), KTypeLabel::from_ints(&[0, 0, 0], Eta::Zero));
        assert_eq!(
            unip(&[2, 3, 1], &[1, 0, 0]).lkt(),
            KTypeLabel::from_ints(&[1, 1, 0], Eta::Zero)
        );
        assert_eq!(
            unip(&[4, 1, 1], &[0, 0, 1]).lkt(),
            KTypeLabel::from_ints(&[1, 0, 0], Eta::Zero)
        );
    }

    #[test]
    fn unip_lkt_is_minimal_stream_member() {
        for (blocks, eps) in [
            (vec![3u32, 1], vec![0u8, 1]),
            (vec![4, 1], vec![1, 1]),
            (vec![2, 3, 1], vec![0, 1, 0]),
            (vec![4, 1, 1], vec![1, 0, 1]),
            (vec![5, 1], vec![0, 1]),
        ] {
            let u = unip(&blocks, &eps);
            let stream = u.ktypes(7);
            let min = stream
                .iter()
                .min_by_key(|l| (l.gamma.twice_sum(), l.gamma.clone()))
                .unwrap();
            assert_eq!(&u.lkt(), min, "blocks {blocks:?} eps {eps:?}");
        }
    }

    #[test]
    fn unip_parity_bits() {
        assert_eq!(unip(&[3, 1], &[0, 1]).parity().unwrap(), 1);
        assert_eq!(unip(&[2, 3, 1], &[1, 0, 0]).parity().unwrap(), 0);
        assert_eq!(unip(&[4], &[0]).parity().unwrap(), 0);
        assert!(unip(&[5, 1], &[0, 0]).parity().is_ok());
        assert!(unip(&[2, 1], &[0, 0]).parity().is_err());
    }

    #[test]
    fn module_infl_chars() {
        // Two Speh factors and a three-block unipotent factor on GL(22).
        let m = UnitaryModule::new(
            vec![speh(2, 8), speh(4, 3)],
            Some(unip(&[6, 3, 1], &[0, 0, 0])),
        );
        assert_eq!(m.n(), 22);
        assert_eq!(
            m.infl_char(),
            Weight::ints(&[11, 10, 9, 8, 6, 5, 4, 3, 2, 1, 0])
        );
        assert!(m.admissible());
        assert_eq!(m.parity().unwrap(), 0);

        // Two equal Speh factors repeat a coordinate.
        let m = UnitaryModule::new(vec![speh(1, 0), speh(1, 0)], None);
        assert!(!m.admissible());

        // Two Speh factors on GL(16).
        let m = UnitaryModule::new(vec![speh(5, 0), speh(3, -1)], None);
        assert_eq!(m.infl_char(), Weight::ints(&[9, 7, 5, 4, 3, 2, 1, 0]));
        assert!(m.admissible());
    }

    #[test]
    fn module_parity_bits() {
        let m = UnitaryModule::new(vec![speh(1, 0)], None);
        assert_eq!(m.parity().unwrap(), 0);
        let m = UnitaryModule::new(vec![], Some(unip(&[3, 1], &[0, 1])));
        assert_eq!(m.parity().unwrap(), 1);
    }

    #[test]
    fn canonical_dedupe() {
        let a = UnitaryModule::new(vec![], Some(unip(&[2, 1, 1], &[0, 0, 1])));
        let b = UnitaryModule::new(vec![], Some(unip(&[2, 1, 1], &[0, 1, 0])));
        assert_ne!(a, b);
        assert_eq!(a.canonical(), b.canonical());
        // Distinct blocks keep distinct sign labels.
        let a = UnitaryModule::new(vec![], Some(unip(&[5, 1], &[0, 1])));
        let b = UnitaryModule::new(vec![], Some(unip(&[5, 1], &[1, 0])));
        assert_ne!(a.canonical(), b.canonical());
        // Speh ordering.
        let a = UnitaryModule::new(vec![speh(4, 3), speh(2, 8)], None).canonical();
        assert_eq!(a.speh, vec![speh(2, 8), speh(4, 3)]);
    }

    #[test]
    fn descriptor_round_trip() {
        let m = UnitaryModule::new(
            vec![speh(2, 8), speh(4, 3)],
            Some(unip(&[6, 3, 1], &[0, 1, 1])),
        );
        let json = m.to_json();
        let back = UnitaryModule::from_json(&json).unwrap();
        assert_eq!(m, back);
        // n mismatch is rejected.
        let bad = r#"{"n": 8, "speh": [{"k": 1, "b": 0}], "unip": null}"#;
        assert!(UnitaryModule::from_json(bad).is_err());
    }

    #[test]
    fn enumeration_small_n() {
        let mods = enumerate_dirac_candidates(3, 4);
        // Full GL(3) characters appear.
        assert!(mods.iter().any(|m| {
            m.speh.is_empty()
                && m.unip
                    .as_ref()
                    .map_or(false, |u| u.blocks() == [3] && u.eps() == [0])
        }));
        // The two-block factor with chain [1] appears.
        assert!(mods
            .iter()
            .any(|m| m.unip.as_ref().map_or(false, |u| u.blocks() == [2, 1])));
        // Speh chains [b+1] with a GL(1) character appear up to the bound.
        for b in 0..=3i64 {
            assert!(mods.iter().any(|m| {
                m.speh == vec![speh(1, b)] && m.unip.as_ref().map_or(false, |u| u.blocks() == [1])
            }));
        }
        for m in &mods {
            assert!(m.admissible(), "{m}");
            assert_eq!(m.n(), 3);
        }

        let mods2 = enumerate_dirac_candidates(2, 3);
        assert!(mods2.iter().any(|m| {
            m.speh.is_empty() && m.unip.as_ref().map_or(false, |u| u.blocks() == [2])
        }));
        for b in -1..=2i64 {
            assert!(
                mods2
                    .iter()
                    .any(|m| m.speh == vec![speh(1, b)] && m.unip.is_none()),
                "missing Speh b={b}"
            );
        }
    }

    #[test]
    fn enumeration_has_no_duplicates_and_matches_brute_force() {
        for (n, max_coord) in [(2usize, 6i64), (3, 6), (4, 8), (5, 8), (6, 8)] {
            let mods = enumerate_dirac_candidates(n, max_coord);
            let mut seen = std::collections::HashSet::new();
            for m in &mods {
                assert!(seen.insert(m.clone()), "duplicate {m}");
                assert!(m.admissible());
            }
            let brute = brute_candidates(n, max_coord);
            assert_eq!(
                mods.len(),
                brute.len(),
                "count mismatch at n={n} max={max_coord}"
            );
            for m in &brute {
                assert!(seen.contains(m), "missing {m}");
            }
        }
    }

    /// Independent generator: loop over raw parameter tuples.
    fn brute_candidates(n: usize, max_coord: i64) -> Vec<UnitaryModule> {
        let lo = if n % 2 == 1 { 1i64 } else { 0 };
        let mut out = std::collections::HashSet::new();
        fn speh_sets(
            budget: usize,
            max_coord: i64,
            lo: i64,
            acc: &mut Vec<SpehParams>,
            out: &mut Vec<Vec<SpehParams>>,
        ) {
            if budget == 0 {
                out.push(acc.clone());
                return;
            }
            let start = acc
                .last()
                .map(|p| p.infl_chain().top().unwrap() - 1)
                .unwrap_or(max_coord);
            for top in lo..=start {
                for k in 1..=budget {
                    let bottom = top - 2 * (k as i64 - 1);
                    if bottom < lo {
                        continue;
                    }
                    acc.push(SpehParams::new(k as u32, bottom - 1).unwrap());
                    speh_sets(budget - k, max_coord, lo, acc, out);
                    acc.pop();
                }
            }
        }
        let mut r_values: Vec<usize> = Vec::new();
        if n % 2 == 0 {
            r_values.push(0);
        }
        let mut r = if n % 2 == 0 { 2 } else { 1 };
        while r <= n {
            r_values.push(r);
            r += 2;
        }
        for r in r_values {
            let unips: Vec<Option<UnipParams>> = if r == 0 {
                vec![None]
            } else {
                let mut v = Vec::new();
                for shape in unip_shapes(r as u32) {
                    for bits in 0..(1u32 << shape.len()) {
                        let eps: Vec<u8> =
                            (0..shape.len()).map(|i| ((bits >> i) & 1) as u8).collect();
                        if let Ok(u) = UnipParams::new(&shape, &eps) {
                            v.push(Some(u));
                        }
                    }
                }
                v
            };
            let mut sets = Vec::new();
            let mut acc = Vec::new();
            speh_sets((n - r) / 2, max_coord, lo, &mut acc, &mut sets);
            for u in &unips {
                for s in &sets {
                    let m = UnitaryModule::new(s.clone(), u.clone()).canonical();
                    if m.admissible()
                        && m.infl_char()
                            .twice_coords()
                            .first()
                            .map_or(true, |t| *t / 2 <= max_coord)
                    {
                        out.insert(m);
                    }
                }
            }
        }
        let mut v: Vec<UnitaryModule> = out.into_iter().collect();
        v.sort();
        v
    }
}
