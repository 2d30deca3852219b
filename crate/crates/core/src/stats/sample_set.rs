use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Per-replica values of one side of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub label: String,
    /// Value of replica `i` at index `i`.
    pub values: Vec<f64>,
    /// Path of the manifest the values were produced under, if any.
    pub manifest: Option<String>,
}

impl SampleSet {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<SampleSet> {
        let label = label.into();
        if values.is_empty() {
            return Err(Error::invalid(format!("sample set `{label}` is empty")));
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::invalid(format!("sample set `{label}` has NaN at replica {i}")));
        }
        Ok(SampleSet {
            label,
            values,
            manifest: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// CSV with columns `replica,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "replica,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{i},{v}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(label: impl Into<String>, input: R) -> Result<SampleSet> {
        let mut lines = input.lines();
        match lines.next().transpose()? {
            Some(h) if h.trim_end() == "replica,value" => {}
            _ => return Err(Error::parse(1, 1, "expected header `replica,value`")),
        }
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (r, v) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(i + 2, 1, "expected two columns"))?;
            if r.parse::<usize>().ok() != Some(values.len()) {
                return Err(Error::parse(i + 2, 1, format!("expected replica {}", values.len())));
            }
            let v: f64 = v
                .trim_end()
                .parse()
                .map_err(|_| Error::parse(i + 2, r.len() + 2, format!("invalid value `{v}`")))?;
            values.push(v);
        }
        SampleSet::new(label, values)
    }
}

/// Pearson correlation of paired samples.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("correlation needs two samples of equal length >= 2"));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    Ok(sxy / (sxx * syy).sqrt())
}
