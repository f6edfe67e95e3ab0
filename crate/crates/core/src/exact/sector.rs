//! Enumeration of the sector `{τ ∈ {0,1,2}^n : #{i : τ_i = 2} = r}`.
//!
//! States are stored as base-3 codes with site 1 as the most significant
//! digit, so lexicographic order on occupancies is numeric order on codes and
//! lookup is a binary search.

use crate::error::{Error, Result};

/// Default bound on the number of states a sector may hold.
pub const DEFAULT_STATE_CAP: usize = 200_000;

/// Largest lattice whose codes fit in a `u64`.
pub const MAX_SITES: usize = 40;

#[derive(Debug, Clone)]
pub struct Sector {
    n: usize,
    r: usize,
    codes: Vec<u64>,
    pow3: Vec<u64>,
}

/// `C(n, r) · 2^(n−r)`.
pub fn sector_size(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let mut binom: u128 = 1;
    for i in 0..r as u128 {
        binom = binom * (n as u128 - i) / (i + 1);
    }
    binom << (n - r)
}

impl Sector {
    pub fn enumerate(n: usize, r: usize) -> Result<Self> {
        Self::enumerate_with_cap(n, r, DEFAULT_STATE_CAP)
    }

    pub fn enumerate_with_cap(n: usize, r: usize, cap: usize) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(Error::Param(format!("lattice size must lie in [1, {MAX_SITES}], got {n}")));
        }
        if r > n {
            return Err(Error::Param(format!("light count {r} exceeds lattice size {n}")));
        }
        let size = sector_size(n, r);
        if size > cap as u128 {
            return Err(Error::Resource { what: format!("sector (n = {n}, r = {r})"), needed: size, cap });
        }
        let pow3: Vec<u64> = (0..n).map(|i| 3u64.pow((n - 1 - i) as u32)).collect();
        let mut codes = Vec::with_capacity(size as usize);
        let mut digits = vec![0u8; n];
        fill(&mut digits, 0, r, &pow3, 0, &mut codes);
        debug_assert_eq!(codes.len() as u128, size);
        Ok(Sector { n, r, codes, pow3 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn code(&self, index: usize) -> u64 {
        self.codes[index]
    }

    /// Place value of site `site` (0-based) in a code.
    pub fn place(&self, site: usize) -> u64 {
        self.pow3[site]
    }

    pub fn decode_into(&self, index: usize, out: &mut [u8]) {
        let mut c = self.codes[index];
        for i in (0..self.n).rev() {
            out[i] = (c % 3) as u8;
            c /= 3;
        }
    }

    pub fn state(&self, index: usize) -> Vec<u8> {
        let mut v = vec![0; self.n];
        self.decode_into(index, &mut v);
        v
    }

    pub fn encode(&self, occupancy: &[u8]) -> u64 {
        occupancy.iter().zip(&self.pow3).map(|(&v, &p)| v as u64 * p).sum()
    }

    pub fn index_of_code(&self, code: u64) -> Option<usize> {
        self.codes.binary_search(&code).ok()
    }

    pub fn index_of(&self, occupancy: &[u8]) -> Option<usize> {
        if occupancy.len() != self.n || occupancy.iter().any(|&v| v > 2) {
            return None;
        }
        self.index_of_code(self.encode(occupancy))
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        (0..self.len()).map(|i| self.state(i))
    }
}

fn fill(digits: &mut [u8], pos: usize, lights_left: usize, pow3: &[u64], code: u64, out: &mut Vec<u64>) {
    let n = digits.len();
    if pos == n {
        out.push(code);
        return;
    }
    let sites_left = n - pos;
    for v in 0..3u8 {
        let need = if v == 2 { 1 } else { 0 };
        if need > lights_left {
            continue;
        }
        // remaining sites must still be able to host the remaining lights
        if lights_left - need > sites_left - 1 {
            continue;
        }
        digits[pos] = v;
        fill(digits, pos + 1, lights_left - need, pow3, code + v as u64 * pow3[pos], out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sectors() {
        let s = Sector::enumerate(1, 1).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![vec![2]]);

        let s = Sector::enumerate(2, 1).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![vec![0, 2], vec![1, 2], vec![2, 0], vec![2, 1]]);

        assert_eq!(Sector::enumerate(3, 0).unwrap().len(), 8);
    }

    #[test]
    fn sizes_and_lookup() {
        for n in 1..=7 {
            for r in 0..=n {
                let s = Sector::enumerate(n, r).unwrap();
                assert_eq!(s.len() as u128, sector_size(n, r));
                for i in 0..s.len() {
                    let st = s.state(i);
                    assert_eq!(st.iter().filter(|&&v| v == 2).count(), r);
                    assert_eq!(s.index_of(&st), Some(i));
                }
                let states: Vec<_> = s.iter().collect();
                assert!(states.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(Sector::enumerate_with_cap(10, 0, 1000), Err(Error::Resource { .. })));
        assert!(Sector::enumerate(3, 4).is_err());
        assert!(Sector::enumerate(0, 0).is_err());
    }
}
