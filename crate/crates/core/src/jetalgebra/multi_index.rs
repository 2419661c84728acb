use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Add;

use num_bigint::BigInt;

/// A multi-index `i = (i^1, …, i^m) ∈ ℤ^m_+`, stored sparsely.
///
/// Only strictly positive exponents are kept, sorted by direction, so two
/// multi-indices are equal exactly when their representations are. The
/// ordering is graded: first by `|i|`, then lexicographically on the dense
/// exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct MultiIndex {
    parts: Vec<(u32, u32)>,
}

impl MultiIndex {
    pub fn zero() -> Self {
        MultiIndex { parts: Vec::new() }
    }

    /// The unit multi-index `(μ)`.
    pub fn unit(mu: usize) -> Self {
        MultiIndex { parts: alloc::vec![(mu as u32, 1)] }
    }

    pub fn from_exponents(exponents: &[u32]) -> Self {
        let parts = exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(mu, &e)| (mu as u32, e))
            .collect();
        MultiIndex { parts }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn get(&self, mu: usize) -> u32 {
        match self.parts.binary_search_by_key(&(mu as u32), |&(m, _)| m) {
            Ok(pos) => self.parts[pos].1,
            Err(_) => 0,
        }
    }

    /// `|i| = Σ i^μ`.
    pub fn order(&self) -> u32 {
        self.parts.iter().map(|&(_, e)| e).sum()
    }

    /// Nonzero `(μ, i^μ)` pairs in increasing `μ`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.parts.iter().map(|&(mu, e)| (mu as usize, e))
    }

    /// One past the largest direction used, i.e. the smallest `m` this index fits.
    pub fn span(&self) -> usize {
        self.parts.last().map_or(0, |&(mu, _)| mu as usize + 1)
    }

    /// The largest direction with a positive exponent.
    pub fn last_direction(&self) -> Option<usize> {
        self.parts.last().map(|&(mu, _)| mu as usize)
    }

    pub fn to_dense(&self, m: usize) -> Vec<u32> {
        let mut out = alloc::vec![0; m.max(self.span())];
        for (mu, e) in self.iter() {
            out[mu] = e;
        }
        out
    }

    /// `i + (μ)`.
    pub fn incremented(&self, mu: usize) -> Self {
        self.shifted(mu, 1)
    }

    /// `i + k·(μ)`.
    pub fn shifted(&self, mu: usize, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let mut parts = self.parts.clone();
        match parts.binary_search_by_key(&(mu as u32), |&(m, _)| m) {
            Ok(pos) => parts[pos].1 += k,
            Err(pos) => parts.insert(pos, (mu as u32, k)),
        }
        MultiIndex { parts }
    }

    /// `i - (μ)`, if `i^μ > 0`.
    pub fn decremented(&self, mu: usize) -> Option<Self> {
        let pos = self.parts.binary_search_by_key(&(mu as u32), |&(m, _)| m).ok()?;
        let mut parts = self.parts.clone();
        if parts[pos].1 == 1 {
            parts.remove(pos);
        } else {
            parts[pos].1 -= 1;
        }
        Some(MultiIndex { parts })
    }

    /// Component-wise `i ≤ j`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.iter().all(|(mu, e)| other.get(mu) >= e)
    }

    /// `i - j` when `j ≤ i`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<Self> {
        if !other.le(self) {
            return None;
        }
        let parts = self
            .parts
            .iter()
            .filter_map(|&(mu, e)| {
                let d = e - other.get(mu as usize);
                (d > 0).then_some((mu, d))
            })
            .collect();
        Some(MultiIndex { parts })
    }

    /// All `j ≤ i`, in no particular order.
    pub fn lower_set(&self) -> Vec<MultiIndex> {
        let mut out = alloc::vec![MultiIndex::zero()];
        for (mu, e) in self.iter() {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for j in &out {
                for k in 0..=e {
                    next.push(j.shifted(mu, k));
                }
            }
            out = next;
        }
        out
    }

    /// `binom(i, j) = Π_μ binom(i^μ, j^μ)`; zero unless `j ≤ i`.
    pub fn binomial(&self, j: &MultiIndex) -> BigInt {
        if !j.le(self) {
            return BigInt::from(0);
        }
        let mut acc = BigInt::from(1);
        for (mu, n) in self.iter() {
            let k = j.get(mu);
            acc *= num_integer::binomial(BigInt::from(n), BigInt::from(k));
        }
        acc
    }

    /// All multi-indices of order exactly `n` in `m` directions.
    pub fn of_order(m: usize, n: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut buf = alloc::vec![0u32; m];
        fn rec(buf: &mut [u32], mu: usize, left: u32, out: &mut Vec<MultiIndex>) {
            if mu + 1 == buf.len() {
                buf[mu] = left;
                out.push(MultiIndex::from_exponents(buf));
                return;
            }
            for e in (0..=left).rev() {
                buf[mu] = e;
                rec(buf, mu + 1, left - e, out);
            }
            buf[mu] = 0;
        }
        if m > 0 {
            rec(&mut buf, 0, n, &mut out);
        } else if n == 0 {
            out.push(MultiIndex::zero());
        }
        out.sort();
        out
    }

    fn cmp_dense(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.parts.iter().peekable(), other.parts.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&&(ma, ea)), Some(&&(mb, eb))) => match ma.cmp(&mb) {
                    // `self` has a positive exponent where `other` has zero.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| self.cmp_dense(other))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        let mut out = self.clone();
        for (mu, e) in rhs.iter() {
            out = out.shifted(mu, e);
        }
        out
    }
}
