//! Coding paths of trees and operations on stopped paths.
//!
//! A [`LatticePath`] holds values on a uniform grid `0, dt, 2dt, ...` and is
//! interpolated linearly in between; its lifetime is the last grid time. After
//! its lifetime a path is considered stopped at its final value.
//!
//! The three tree encodings are
//!
//! * Lukaciewicz: `V_0 = 0`, `V_n = sum_{i<n} (k(v^i) - 1)`, ending at `-1`;
//! * height: `H(n)` = depth of `v^n`;
//! * contour: distance to the root of a unit-speed walker going around the tree.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::trees::PlaneTree;

/// A piecewise-linear path sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePath {
    values: Vec<f64>,
    dt: f64,
}

/// Anything that can be evaluated as a continuous stopped path.
pub trait StoppedPath {
    fn lifetime(&self) -> f64;
    /// Value at time `t`; clamped to the final value for `t` past the lifetime.
    fn eval(&self, t: f64) -> f64;
    /// Times at which the path may change slope, in increasing order.
    fn knots(&self) -> Vec<f64>;
}

impl LatticePath {
    /// A path on the integer grid.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_step(values, 1.0)
    }

    pub fn with_step(values: Vec<f64>, dt: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("a path needs at least one value"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("grid step must be positive, got {dt}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at index {i}")));
        }
        Ok(LatticePath { values, dt })
    }

    pub fn from_integers(values: &[i64]) -> Self {
        LatticePath {
            values: values.iter().map(|&v| v as f64).collect(),
            dt: 1.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    /// Minimum over the whole lifetime.
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Running infimum `s -> min_{u<=s} f(u)`.
    pub fn running_min(&self) -> LatticePath {
        let mut m = f64::INFINITY;
        let values = self
            .values
            .iter()
            .map(|&v| {
                m = m.min(v);
                m
            })
            .collect();
        LatticePath { values, dt: self.dt }
    }

    /// The path without its last grid step (`V'` in the grafting identity).
    pub fn drop_final_step(&self) -> Result<LatticePath> {
        if self.values.len() < 2 {
            return Err(Error::invalid("a zero-lifetime path has no final step"));
        }
        Ok(LatticePath {
            values: self.values[..self.values.len() - 1].to_vec(),
            dt: self.dt,
        })
    }

    /// Values as integers, failing on the first non-integer entry.
    pub fn to_integers(&self) -> Result<Vec<i64>> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v.fract() == 0.0 && v.abs() < 9.0e15 {
                    Ok(v as i64)
                } else {
                    Err(Error::decode(i, format!("value {v} is not an integer")))
                }
            })
            .collect()
    }

    /// Writes the path as CSV with columns `t,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv_rows(
            out,
            self.values.iter().enumerate().map(|(i, &v)| (i as f64 * self.dt, v)),
        )
    }

    /// Reads a path written by [`LatticePath::write_csv`]; times must form a
    /// uniform grid starting at 0.
    pub fn read_csv<R: BufRead>(input: R) -> Result<LatticePath> {
        let rows = read_csv_rows(input)?;
        if rows.is_empty() {
            return Err(Error::parse(2, 1, "path CSV has no rows"));
        }
        if rows[0].0 != 0.0 {
            return Err(Error::parse(2, 1, "first time must be 0"));
        }
        let dt = if rows.len() > 1 { rows[1].0 } else { 1.0 };
        for (i, &(t, _)) in rows.iter().enumerate() {
            let expect = i as f64 * dt;
            if (t - expect).abs() > 1e-9 * expect.abs().max(1.0) {
                return Err(Error::parse(i + 2, 1, format!("time {t} is off the grid of step {dt}")));
            }
        }
        LatticePath::with_step(rows.into_iter().map(|(_, v)| v).collect(), dt)
            .map_err(|e| Error::parse(2, 1, e.to_string()))
    }
}

impl StoppedPath for LatticePath {
    fn lifetime(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.values[0];
        }
        let x = t / self.dt;
        let i = x.floor() as usize;
        if i + 1 >= self.values.len() {
            return self.last();
        }
        let frac = x - i as f64;
        if frac == 0.0 {
            self.values[i]
        } else {
            self.values[i] + frac * (self.values[i + 1] - self.values[i])
        }
    }

    fn knots(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| i as f64 * self.dt).collect()
    }
}

pub(crate) fn write_csv_rows<W: Write>(mut out: W, rows: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    writeln!(out, "t,value")?;
    for (t, v) in rows {
        writeln!(out, "{t},{v}")?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn read_csv_rows<R: BufRead>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut lines = input.lines();
    match lines.next().transpose()? {
        Some(h) if h.trim_end() == "t,value" => {}
        _ => return Err(Error::parse(1, 1, "expected header `t,value`")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(i + 2, 1, "expected two columns"))?;
        let t: f64 = a
            .parse()
            .map_err(|_| Error::parse(i + 2, 1, format!("invalid time `{a}`")))?;
        let v: f64 = b
            .trim_end()
            .parse()
            .map_err(|_| Error::parse(i + 2, a.len() + 2, format!("invalid value `{b}`")))?;
        rows.push((t, v));
    }
    Ok(rows)
}

/// Lukaciewicz path as exact integers, `n + 1` values ending at `-1`.
pub fn lukaciewicz_steps(tree: &PlaneTree) -> Vec<i64> {
    let mut out = Vec::with_capacity(tree.n_vertices() + 1);
    let mut v = 0i64;
    out.push(0);
    for &k in tree.child_counts() {
        v += k as i64 - 1;
        out.push(v);
    }
    out
}

pub fn lukaciewicz(tree: &PlaneTree) -> LatticePath {
    LatticePath::from_integers(&lukaciewicz_steps(tree))
}

/// Lukaciewicz path of the concatenation of a sequence of trees, each one
/// started where the previous one ended.
pub fn forest_lukaciewicz<'a>(trees: impl IntoIterator<Item = &'a PlaneTree>) -> Vec<i64> {
    let mut out = vec![0i64];
    let mut v = 0i64;
    for t in trees {
        for &k in t.child_counts() {
            v += k as i64 - 1;
            out.push(v);
        }
    }
    out
}

/// Checks that `v` is a Lukaciewicz path prefix: starts at 0, increments are
/// integers `>= -1`, and it stays `>= 0` except possibly at its last value,
/// which may be `-1`. Returns whether the path is complete (ends at `-1`).
fn check_lukaciewicz(v: &[i64]) -> Result<bool> {
    if v.first() != Some(&0) {
        return Err(Error::decode(0, "path must start at 0"));
    }
    for i in 1..v.len() {
        if v[i] - v[i - 1] < -1 {
            return Err(Error::decode(i, format!("increment {} below -1", v[i] - v[i - 1])));
        }
        if v[i] < 0 && i + 1 < v.len() {
            return Err(Error::decode(i, "path reaches -1 before its end"));
        }
    }
    Ok(*v.last().expect("nonempty") == -1)
}

/// Inverse of [`lukaciewicz`].
pub fn decode_lukaciewicz(path: &LatticePath) -> Result<PlaneTree> {
    let v = path.to_integers()?;
    if !check_lukaciewicz(&v)? {
        return Err(Error::decode(v.len() - 1, "path does not end at -1"));
    }
    let counts = v.windows(2).map(|w| (w[1] - w[0] + 1) as u32).collect();
    Ok(PlaneTree::from_counts_unchecked(counts))
}

/// Height of every vertex from the Lukaciewicz values by counting, for each
/// `n`, the indices `k < n` with `V_k = min(V_k, ..., V_n)`. Those indices are
/// kept on a monotone stack, which makes the whole pass linear.
///
/// Works on complete paths (the final `-1` is not a vertex) and on prefixes.
pub fn heights_from_steps(v: &[i64]) -> Vec<u32> {
    let n = if v.last() == Some(&-1) { v.len() - 1 } else { v.len() };
    let mut out = Vec::with_capacity(n);
    let mut stack: Vec<i64> = Vec::new();
    for i in 0..n {
        if i > 0 {
            stack.push(v[i - 1]);
            while stack.last().is_some_and(|&top| top > v[i]) {
                stack.pop();
            }
        }
        out.push(stack.len() as u32);
    }
    out
}

/// Height function recovered from a Lukaciewicz path.
pub fn height_from_lukaciewicz(path: &LatticePath) -> Result<LatticePath> {
    let v = path.to_integers()?;
    check_lukaciewicz(&v)?;
    let h: Vec<i64> = heights_from_steps(&v).into_iter().map(i64::from).collect();
    Ok(LatticePath::from_integers(&h))
}

/// Height function `H(n)` = depth of `v^n`.
pub fn height_fn(tree: &PlaneTree) -> LatticePath {
    let h: Vec<i64> = tree.depths().into_iter().map(i64::from).collect();
    LatticePath::from_integers(&h)
}

/// Contour function, lifetime `2(#θ - 1)`.
pub fn contour_fn(tree: &PlaneTree) -> LatticePath {
    let depths = tree.depths();
    let mut out = Vec::with_capacity(2 * depths.len() - 1);
    out.push(0i64);
    let mut cur = 0i64;
    for &d in &depths[1..] {
        let d = d as i64;
        while cur > d - 1 {
            cur -= 1;
            out.push(cur);
        }
        cur += 1;
        out.push(cur);
    }
    while cur > 0 {
        cur -= 1;
        out.push(cur);
    }
    LatticePath::from_integers(&out)
}

/// Concatenation `P1 ⊕ P2`: run `P1`, then `P2` started from the end of `P1`.
pub fn concat_paths(p1: &LatticePath, p2: &LatticePath) -> Result<LatticePath> {
    if p2.values[0] != 0.0 {
        return Err(Error::invalid(format!(
            "second path must start at 0, starts at {}",
            p2.values[0]
        )));
    }
    if p1.dt != p2.dt {
        return Err(Error::invalid("paths live on different grids"));
    }
    let base = p1.last();
    let mut values = Vec::with_capacity(p1.len() + p2.len() - 1);
    values.extend_from_slice(&p1.values);
    values.extend(p2.values[1..].iter().map(|v| base + v));
    Ok(LatticePath { values, dt: p1.dt })
}

/// `f - f̲`, the path reflected at its running infimum.
pub fn reflect_at_infimum(p: &LatticePath) -> LatticePath {
    let m = p.running_min();
    let values = p.values.iter().zip(&m.values).map(|(a, b)| a - b).collect();
    LatticePath { values, dt: p.dt }
}

/// Lukaciewicz path of the backbone-rightmost sin-tree obtained by rooting
/// each tree of a sequence at successive backbone vertices, from the path `U`
/// coding the sequence: `V_n = U_n + 1 - min(U_0..U_{n-1})`, with the empty
/// minimum taken to be 1.
pub fn glue_backbone_path(u: &LatticePath) -> Result<LatticePath> {
    let u = u.to_integers()?;
    if u[0] != 0 {
        return Err(Error::decode(0, "path must start at 0"));
    }
    if let Some(i) = (1..u.len()).find(|&i| u[i] - u[i - 1] < -1) {
        return Err(Error::decode(i, "increment below -1"));
    }
    let mut prev_min = 1i64;
    let mut v = Vec::with_capacity(u.len());
    for &x in &u {
        v.push(x + 1 - prev_min);
        prev_min = prev_min.min(x);
    }
    Ok(LatticePath::from_integers(&v))
}

/// Distance on stopped paths: `|ζ(f) - ζ(g)| + sup_t |f(t ∧ ζ(f)) - g(t ∧ ζ(g))|`.
///
/// Both paths are piecewise linear, so the supremum is attained at a knot of
/// one of them and is computed exactly.
pub fn stopped_path_distance(f: &impl StoppedPath, g: &impl StoppedPath) -> f64 {
    let mut ts = f.knots();
    ts.extend(g.knots());
    let sup = ts
        .into_iter()
        .map(|t| (f.eval(t) - g.eval(t)).abs())
        .fold(0.0, f64::max);
    (f.lifetime() - g.lifetime()).abs() + sup
}

/// The view `t -> path(time_factor · t) / space_factor`. No values are copied.
#[derive(Debug, Clone, Copy)]
pub struct Rescaled<'a> {
    path: &'a LatticePath,
    time_factor: f64,
    space_factor: f64,
}

/// `t -> path(k^time_exponent · t) / k`.
pub fn rescale(path: &LatticePath, k: f64, time_exponent: f64) -> Result<Rescaled<'_>> {
    Rescaled::identity(path).rescale(k, time_exponent)
}

/// Contour convention `t -> C(2k² t) / k`.
pub fn rescale_contour(path: &LatticePath, k: f64) -> Result<Rescaled<'_>> {
    let r = rescale(path, k, 2.0)?;
    Ok(Rescaled {
        time_factor: r.time_factor * 2.0,
        ..r
    })
}

impl<'a> Rescaled<'a> {
    pub fn identity(path: &'a LatticePath) -> Self {
        Rescaled {
            path,
            time_factor: 1.0,
            space_factor: 1.0,
        }
    }

    /// Rescales the view again; factors compose multiplicatively.
    pub fn rescale(self, k: f64, time_exponent: f64) -> Result<Rescaled<'a>> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("scale k must be positive, got {k}")));
        }
        Ok(Rescaled {
            path: self.path,
            time_factor: self.time_factor * k.powf(time_exponent),
            space_factor: self.space_factor * k,
        })
    }

    pub fn time_factor(&self) -> f64 {
        self.time_factor
    }

    pub fn space_factor(&self) -> f64 {
        self.space_factor
    }

    /// Copies the view into a path on the grid `dt / time_factor`.
    pub fn materialize(&self) -> LatticePath {
        LatticePath {
            values: self.path.values.iter().map(|v| v / self.space_factor).collect(),
            dt: self.path.dt / self.time_factor,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv_rows(
            out,
            self.path
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as f64 * self.path.dt / self.time_factor, v / self.space_factor)),
        )
    }
}

impl StoppedPath for Rescaled<'_> {
    fn lifetime(&self) -> f64 {
        self.path.lifetime() / self.time_factor
    }

    fn eval(&self, t: f64) -> f64 {
        self.path.eval(self.time_factor * t) / self.space_factor
    }

    fn knots(&self) -> Vec<f64> {
        self.path.knots().into_iter().map(|t| t / self.time_factor).collect()
    }
}
