//! Sampled trajectories and their text encodings.

use std::fmt::Write as _;

use super::state::LatticeKind;
use crate::error::{Error, Result};

/// What to store at each sample time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleSpec {
    /// Coordinates whose species is recorded.
    pub sites: Vec<i64>,
    /// Store the full configuration.
    pub snapshots: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Sample {
    pub t: f64,
    /// Light-particle coordinates, increasing.
    pub loc: Vec<i64>,
    /// Species at the observed coordinates.
    pub sites: Vec<u8>,
    pub snapshot: Option<Vec<u8>>,
}

/// One simulated replica, reproducible from its seed.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub kind: LatticeKind,
    pub init: Vec<u8>,
    pub horizon: f64,
    pub sample_dt: f64,
    pub samples: Vec<Sample>,
    /// Clock rings processed.
    pub events: u64,
}

impl TrajectoryRecord {
    /// `rep,t,loc_1..loc_r,site_x…` header for `r` lights and the observed coordinates.
    pub fn csv_header(r: usize, sites: &[i64]) -> String {
        let mut h = String::from("rep,t");
        for i in 1..=r {
            write!(h, ",loc_{i}").unwrap();
        }
        for x in sites {
            write!(h, ",site_{x}").unwrap();
        }
        h
    }

    /// Appends one CSV row per sample.
    pub fn write_csv_rows(&self, rep: usize, out: &mut String) {
        for s in &self.samples {
            write!(out, "{rep},{}", fmt_f64(s.t)).unwrap();
            for x in &s.loc {
                write!(out, ",{x}").unwrap();
            }
            for v in &s.sites {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
    }

    /// `t <run-length encoding>` per sample that carries a snapshot.
    pub fn snapshot_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            if let Some(snap) = &s.snapshot {
                writeln!(out, "{} {}", fmt_f64(s.t), rle_encode(snap)).unwrap();
            }
        }
        out
    }
}

/// `x` with 17 significant digits in scientific notation; parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Run-length encoding over `{0,1,2}`: comma-separated `count:symbol` runs.
pub fn rle_encode(occ: &[u8]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < occ.len() {
        let v = occ[i];
        let mut j = i;
        while j < occ.len() && occ[j] == v {
            j += 1;
        }
        if !out.is_empty() {
            out.push(',');
        }
        write!(out, "{}:{v}", j - i).unwrap();
        i = j;
    }
    out
}

pub fn rle_decode(s: &str) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    if s.is_empty() {
        return Ok(out);
    }
    for run in s.split(',') {
        let (count, sym) = run.split_once(':').ok_or_else(|| Error::Param(format!("malformed run {run:?}")))?;
        let count: usize = count.parse().map_err(|_| Error::Param(format!("bad count in {run:?}")))?;
        let sym: u8 = sym.parse().map_err(|_| Error::Param(format!("bad symbol in {run:?}")))?;
        if sym > 2 {
            return Err(Error::Param(format!("symbol {sym} outside {{0,1,2}}")));
        }
        out.extend(std::iter::repeat_n(sym, count));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rle_round_trip() {
        let v = vec![0, 0, 1, 2, 2, 2, 1];
        assert_eq!(rle_encode(&v), "2:0,1:1,3:2,1:1");
        assert_eq!(rle_decode(&rle_encode(&v)).unwrap(), v);
        assert!(rle_decode("3:5").is_err());
        assert_eq!(rle_decode("").unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.0, 1.0, 0.1, 1.0 / 3.0, 2.5e-300, 123456.789, -7.25] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(2.0), "2.0000000000000000e0");
        assert_eq!(fmt_f64(-0.125), "-1.2500000000000000e-1");
    }
}
