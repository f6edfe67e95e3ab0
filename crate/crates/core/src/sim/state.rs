//! Configurations on an open segment or on a frozen-boundary window of the line.

use super::clock::{BoundaryChannel, Channel};
use crate::error::{Error, Result};

/// Position of a species in the order `0 ≺ 2 ≺ 1`.
pub(crate) const RANK: [u8; 3] = [0, 2, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeKind {
    /// Sites `1..=n` with reservoirs at both ends.
    Open { n: usize },
    /// Cells `−l..=l`; the two extreme cells never change.
    Window { l: i64 },
}

impl LatticeKind {
    pub fn offset(&self) -> i64 {
        match *self {
            LatticeKind::Open { .. } => 1,
            LatticeKind::Window { l } => -l,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            LatticeKind::Open { n } => n,
            LatticeKind::Window { l } => (2 * l + 1) as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Inclusive range of edge coordinates this lattice updates.
    pub fn edge_range(&self) -> (i64, i64) {
        match *self {
            LatticeKind::Open { n } => (1, n as i64 - 1),
            LatticeKind::Window { l } => (-l + 1, l - 2),
        }
    }
}

/// A configuration, the positions of its light (species-2) particles and optional colors.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    kind: LatticeKind,
    occ: Vec<u8>,
    /// Sorted indices (into `occ`) of species-2 sites.
    loc: Vec<usize>,
    colors: Option<Vec<u8>>,
    pub time: f64,
}

impl SimState {
    pub fn open(occ: Vec<u8>) -> Result<Self> {
        if occ.is_empty() {
            return Err(Error::Param("open segment needs at least one site".into()));
        }
        Self::build(LatticeKind::Open { n: occ.len() }, occ)
    }

    pub fn window(l: i64, occ: Vec<u8>) -> Result<Self> {
        if l < 2 {
            return Err(Error::Param(format!("window half-width must be at least 2, got {l}")));
        }
        if occ.len() as i64 != 2 * l + 1 {
            return Err(Error::Param(format!("window [-{l}, {l}] needs {} cells, got {}", 2 * l + 1, occ.len())));
        }
        Self::build(LatticeKind::Window { l }, occ)
    }

    fn build(kind: LatticeKind, occ: Vec<u8>) -> Result<Self> {
        if let Some(v) = occ.iter().find(|&&v| v > 2) {
            return Err(Error::Param(format!("species must be 0, 1 or 2, got {v}")));
        }
        let loc = occ.iter().enumerate().filter(|(_, &v)| v == 2).map(|(i, _)| i).collect();
        Ok(SimState { kind, occ, loc, colors: None, time: 0.0 })
    }

    /// Attaches one color in `{0, 1}` per light particle, left to right.
    pub fn with_colors(mut self, colors: Vec<u8>) -> Result<Self> {
        if colors.len() != self.loc.len() {
            return Err(Error::Param(format!("{} colors given for {} light particles", colors.len(), self.loc.len())));
        }
        if colors.iter().any(|&c| c > 1) {
            return Err(Error::Param("colors must be 0 or 1".into()));
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn occupancy(&self) -> &[u8] {
        &self.occ
    }

    pub fn offset(&self) -> i64 {
        self.kind.offset()
    }

    /// Species at coordinate `x`, if it lies on the lattice.
    pub fn at(&self, x: i64) -> Option<u8> {
        let i = x - self.offset();
        (i >= 0 && (i as usize) < self.occ.len()).then(|| self.occ[i as usize])
    }

    /// Coordinates of the light particles, increasing.
    pub fn light_positions(&self) -> Vec<i64> {
        let off = self.offset();
        self.loc.iter().map(|&i| i as i64 + off).collect()
    }

    /// Coordinates of the leftmost and rightmost light particles.
    pub fn light_extremes(&self) -> Option<(i64, i64)> {
        let off = self.offset();
        Some((*self.loc.first()? as i64 + off, *self.loc.last()? as i64 + off))
    }

    pub fn light_count(&self) -> usize {
        self.loc.len()
    }

    pub fn colors(&self) -> Option<&[u8]> {
        self.colors.as_deref()
    }

    /// The configuration with each light particle replaced by its color.
    pub fn projected(&self) -> Option<Vec<u8>> {
        let colors = self.colors.as_ref()?;
        let mut out = self.occ.clone();
        for (&i, &c) in self.loc.iter().zip(colors) {
            out[i] = c;
        }
        Some(out)
    }

    fn light_index(&self, i: usize) -> usize {
        self.loc.binary_search(&i).expect("light particle is indexed")
    }

    /// Applies one clock ring; returns whether the configuration or colors changed.
    #[inline]
    pub fn apply(&mut self, channel: Channel) -> bool {
        match channel {
            Channel::Edge { x, up } => self.apply_edge(x, up),
            Channel::Boundary(b) => match self.kind {
                LatticeKind::Open { .. } => self.apply_boundary(b),
                LatticeKind::Window { .. } => false,
            },
        }
    }

    #[inline]
    pub fn apply_edge(&mut self, x: i64, up: bool) -> bool {
        let (lo, hi) = self.kind.edge_range();
        if x < lo || x > hi {
            return false;
        }
        let i = (x - self.offset()) as usize;
        let (a, b) = (self.occ[i], self.occ[i + 1]);
        if a == b {
            if a == 2 {
                if let Some(colors) = self.colors.as_mut() {
                    let k = self.loc.binary_search(&i).expect("light particle is indexed");
                    let (c0, c1) = (colors[k], colors[k + 1]);
                    if (up && c0 > c1) || (!up && c0 < c1) {
                        colors.swap(k, k + 1);
                        return true;
                    }
                }
            }
            return false;
        }
        let (ra, rb) = (RANK[a as usize], RANK[b as usize]);
        if (up && ra > rb) || (!up && ra < rb) {
            self.occ.swap(i, i + 1);
            if a == 2 {
                let k = self.light_index(i);
                self.loc[k] = i + 1;
            } else if b == 2 {
                let k = self.light_index(i + 1);
                self.loc[k] = i;
            }
            true
        } else {
            false
        }
    }

    fn apply_boundary(&mut self, b: BoundaryChannel) -> bool {
        let last = self.occ.len() - 1;
        let (site, color_idx) = match b {
            BoundaryChannel::Alpha | BoundaryChannel::Gamma => (0, 0),
            BoundaryChannel::Beta | BoundaryChannel::Delta => (last, self.loc.len().wrapping_sub(1)),
        };
        let target = match b {
            BoundaryChannel::Alpha | BoundaryChannel::Delta => 1,
            BoundaryChannel::Gamma | BoundaryChannel::Beta => 0,
        };
        match self.occ[site] {
            2 => match self.colors.as_mut() {
                Some(colors) if colors[color_idx] != target => {
                    colors[color_idx] = target;
                    true
                }
                _ => false,
            },
            v if v != target => {
                self.occ[site] = target;
                true
            }
            _ => false,
        }
    }
}

/// Inclusive union of the edge ranges of several lattices.
pub(crate) fn union_edges(states: &[SimState]) -> (i64, i64) {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for s in states {
        let (a, b) = s.kind().edge_range();
        if a <= b {
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bulk_rules() {
        let mut s = SimState::open(vec![2, 0, 1, 0, 1, 2]).unwrap();
        assert!(s.apply_edge(1, true)); // 20 → 02
        assert_eq!(s.occupancy(), &[0, 2, 1, 0, 1, 2]);
        assert!(!s.apply_edge(2, true)); // 21 is already sorted up
        assert!(s.apply_edge(2, false)); // 21 → 12 on the q clock
        assert_eq!(s.occupancy(), &[0, 1, 2, 0, 1, 2]);
        assert!(s.apply_edge(5, true)); // 12 → 21
        assert_eq!(s.occupancy(), &[0, 1, 2, 0, 2, 1]);
        assert_eq!(s.light_positions(), vec![3, 5]);
        assert!(!s.apply_edge(0, true) && !s.apply_edge(6, true));
    }

    #[test]
    fn boundaries_skip_light_sites() {
        let mut s = SimState::open(vec![2, 0, 2]).unwrap();
        for b in [BoundaryChannel::Alpha, BoundaryChannel::Gamma, BoundaryChannel::Beta, BoundaryChannel::Delta] {
            assert!(!s.apply(Channel::Boundary(b)));
        }
        let mut s = SimState::open(vec![0, 1]).unwrap();
        assert!(s.apply(Channel::Boundary(BoundaryChannel::Alpha)));
        assert!(s.apply(Channel::Boundary(BoundaryChannel::Beta)));
        assert_eq!(s.occupancy(), &[1, 0]);
    }

    #[test]
    fn window_ends_are_frozen() {
        let mut s = SimState::window(3, vec![1, 0, 1, 0, 1, 0, 1]).unwrap();
        assert_eq!(s.kind().edge_range(), (-2, 1));
        assert!(!s.apply_edge(-3, true));
        assert!(!s.apply_edge(2, true));
        assert!(s.apply_edge(-1, true));
        assert_eq!(s.at(-3), Some(1));
        assert_eq!(s.at(3), Some(1));
        assert_eq!(s.at(4), None);
    }

    #[test]
    fn colors_follow_rules() {
        let mut s = SimState::open(vec![2, 2, 0]).unwrap().with_colors(vec![1, 0]).unwrap();
        assert!(s.apply_edge(1, true));
        assert_eq!(s.colors(), Some(&[0u8, 1][..]));
        assert!(s.apply(Channel::Boundary(BoundaryChannel::Alpha)));
        assert_eq!(s.projected().unwrap(), vec![1, 1, 0]);
        assert!(s.apply_edge(2, true));
        assert_eq!(s.projected().unwrap(), vec![1, 0, 1]);
        assert!(SimState::open(vec![2]).unwrap().with_colors(vec![]).is_err());
    }
}
