//! Scaling reports, summary statistics and their CSV/JSON forms.

use std::io;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::sim::fmt_f64;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

/// Summary of one quantity at one value of the scan variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Value of the scan variable (`n` or `t`).
    pub x: f64,
    pub quantity: String,
    pub mean: f64,
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub count: usize,
}

impl Row {
    /// A deterministic value: zero standard error, degenerate interval.
    pub fn exact(x: f64, quantity: &str, value: f64) -> Self {
        Row {
            x,
            quantity: quantity.into(),
            mean: value,
            se: 0.0,
            ci_lo: value,
            ci_hi: value,
            q25: value,
            median: value,
            q75: value,
            count: 1,
        }
    }

    /// Mean with a normal 95% interval plus quartiles of `values`.
    pub fn from_samples(x: f64, quantity: &str, values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        Row {
            x,
            quantity: quantity.into(),
            mean,
            se,
            ci_lo: mean - Z95 * se,
            ci_hi: mean + Z95 * se,
            q25: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q75: quantile(&sorted, 0.75),
            count: n,
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Distribution-free 95% interval for the median from order statistics.
pub fn median_interval(sorted: &[f64]) -> (f64, f64) {
    let n = sorted.len() as f64;
    let half = Z95 * n.sqrt() / 2.0;
    let lo = ((n / 2.0 - half).floor().max(1.0) as usize).min(sorted.len()) - 1;
    let hi = ((n / 2.0 + half).ceil() as usize).clamp(1, sorted.len()) - 1;
    (sorted[lo], sorted[hi])
}

/// Least-squares slope with a normal 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub r_squared: f64,
}

impl Fit {
    pub fn linear(name: &str, xs: &[f64], ys: &[f64]) -> Result<Fit> {
        let n = xs.len();
        if n < 2 || n != ys.len() {
            return Err(Error::Param("a fit needs at least two points".into()));
        }
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::Degenerate("all abscissae coincide".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        let se = if n > 2 { (sse / (n - 2) as f64 / sxx).sqrt() } else { 0.0 };
        let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
        Ok(Fit { name: name.into(), slope, intercept, se, ci_lo: slope - Z95 * se, ci_hi: slope + Z95 * se, r_squared })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Verdict { name: name.into(), pass, detail: detail.into() }
    }
}

/// Per-replica (or per-site) values behind a report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl RawTable {
    pub fn new(header: &[&str]) -> Self {
        RawTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Param("empty CSV".into()))?;
        let header: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|_| Error::Param(format!("bad CSV cell {c:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != header.len() {
                return Err(Error::Param("ragged CSV row".into()));
            }
            rows.push(row);
        }
        Ok(RawTable { header, rows })
    }
}

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub experiment: String,
    /// Fully resolved configuration.
    pub config: ExperimentConfig,
    /// Name of the scan variable in `rows[..].x`.
    pub x_label: String,
    pub rows: Vec<Row>,
    pub fits: Vec<Fit>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub raw: RawTable,
}

impl ScalingReport {
    pub fn new(experiment: &str, config: ExperimentConfig, x_label: &str, raw: RawTable) -> Self {
        ScalingReport {
            experiment: experiment.into(),
            config,
            x_label: x_label.into(),
            rows: Vec::new(),
            fits: Vec::new(),
            verdicts: Vec::new(),
            raw,
        }
    }

    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn rows_of<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.quantity == quantity)
    }

    /// Summary as one JSON object, floats with 17 significant digits.
    pub fn to_json(&self) -> Result<String> {
        to_json17(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Summary rows as CSV.
    pub fn summary_csv(&self) -> String {
        let mut t = RawTable::new(&[&self.x_label, "mean", "se", "ci_lo", "ci_hi", "q25", "median", "q75", "count"]);
        t.header.insert(1, "quantity".into());
        let mut out = t.header.join(",");
        out.push('\n');
        for r in &self.rows {
            let nums = [r.mean, r.se, r.ci_lo, r.ci_hi, r.q25, r.median, r.q75];
            let cells: Vec<String> = nums.iter().map(|&v| fmt_f64(v)).collect();
            out.push_str(&format!("{},{},{},{}\n", fmt_f64(r.x), r.quantity, cells.join(","), r.count));
        }
        out
    }
}

struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Compact JSON with every float printed to 17 significant digits.
pub fn to_json17<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_and_rows() {
        let v = [3.0, 1.0, 2.0, 4.0];
        let r = Row::from_samples(10.0, "x", &v);
        assert_eq!(r.mean, 2.5);
        assert_eq!(r.median, 2.5);
        assert_eq!(r.q25, 1.75);
        assert!((r.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        let e = Row::exact(1.0, "y", 0.5);
        assert_eq!((e.ci_lo, e.ci_hi, e.se), (0.5, 0.5, 0.0));
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let f = Fit::linear("l", &xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!(f.se < 1e-14 && (f.r_squared - 1.0).abs() < 1e-14);
        assert!(Fit::linear("l", &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut rep = ScalingReport::new("demo", ExperimentConfig::default(), "n", RawTable::new(&["n", "v"]));
        rep.rows.push(Row::from_samples(50.0, "v", &[0.1, 1.0 / 3.0, 2.0e-9]));
        rep.rows.push(Row::exact(50.0, "third", 1.0 / 3.0));
        rep.fits.push(Fit::linear("s", &[1.0, 2.0, 3.0], &[0.3, 0.7, 1.3]).unwrap());
        rep.verdicts.push(Verdict::new("ok", true, "fine"));
        let text = rep.to_json().unwrap();
        assert!(text.contains("3.3333333333333331e-1"));
        // the raw table travels as its own CSV file
        rep.raw = RawTable::default();
        assert_eq!(ScalingReport::from_json(&text).unwrap(), rep);
    }

    #[test]
    fn csv_round_trip_and_empty_table() {
        let mut t = RawTable::new(&["n", "value"]);
        assert_eq!(t.to_csv(), "n,value\n");
        t.push(vec![4.0, 0.1]);
        t.push(vec![8.0, -1.0 / 7.0]);
        assert_eq!(RawTable::parse_csv(&t.to_csv()).unwrap(), t);
    }
}
