//! Random Gaussian layers and the ReLU forward map.
//!
//! Entry `(i, j)` of a layer with `m` rows and seed `s` is
//! `normal_at(s, i, j) / √m` (see [`crate::rng`]), so any subset of rows or
//! columns can be regenerated without materializing the rest. Regeneration
//! from `(m, n, seed)` is the canonical representation; the binary and CSV
//! dumps exist for fixtures.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;

/// Default cap on `m·n` for a materialized layer.
pub const DEFAULT_ELEMENT_CAP: usize = 1 << 28;

#[inline]
pub fn relu(t: f64) -> f64 {
    if t > 0.0 {
        t
    } else {
        0.0
    }
}

/// Entry `(row, col)` of the layer with `rows` rows and the given seed.
#[inline]
pub fn gaussian_entry(seed: u64, row: usize, col: usize, rows: usize) -> f64 {
    rng::normal_at(seed, row as u64, col as u64) / (rows as f64).sqrt()
}

fn check_sizes(rows: usize, cols: usize, cap: usize) -> Result<()> {
    if rows == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "layer needs at least one row".into(),
        });
    }
    if cols == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "layer needs at least one column".into(),
        });
    }
    match rows.checked_mul(cols) {
        Some(total) if total <= cap => Ok(()),
        _ => Err(Error::SizeOverflow { rows, cols, cap }),
    }
}

fn check_len(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: x.len(),
        });
    }
    Ok(())
}

/// An `m × n` matrix with i.i.d. `N(0, 1/m)` entries, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLayer {
    rows: usize,
    cols: usize,
    seed: u64,
    entries: Vec<f64>,
}

impl GaussianLayer {
    /// Samples an `m × n` layer (input dimension `n`, width `m`).
    pub fn sample(n: usize, m: usize, seed: u64) -> Result<Self> {
        Self::sample_with_cap(n, m, seed, DEFAULT_ELEMENT_CAP)
    }

    pub fn sample_with_cap(n: usize, m: usize, seed: u64, cap: usize) -> Result<Self> {
        check_sizes(m, n, cap)?;
        let mut entries = vec![0.0; m * n];
        entries
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| {
                for (j, e) in row.iter_mut().enumerate() {
                    *e = gaussian_entry(seed, i, j, m);
                }
            });
        Ok(Self {
            rows: m,
            cols: n,
            seed,
            entries,
        })
    }

    /// Wraps explicit row-major entries, e.g. a hand-written test matrix.
    pub fn from_entries(rows: usize, cols: usize, seed: u64, entries: Vec<f64>) -> Result<Self> {
        check_sizes(rows, cols, usize::MAX)?;
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            seed,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// `Mx`.
    pub fn linear(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x)?;
        Ok(self.entries.chunks_exact(self.cols).map(|r| row_dot(r, x)).collect())
    }

    /// `ρ(Mx)`.
    pub fn relu_forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.linear(x)?;
        out.iter_mut().for_each(|v| *v = relu(*v));
        Ok(out)
    }

    /// `‖ρ(Mx) − ρ(My)‖²`, summed over rows in ascending order.
    pub fn sq_dist_realization(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len(self.cols, x)?;
        check_len(self.cols, y)?;
        let mut total = 0.0;
        for r in self.entries.chunks_exact(self.cols) {
            let d = relu(row_dot(r, x)) - relu(row_dot(r, y));
            total += d * d;
        }
        Ok(total)
    }

    /// Little-endian binary dump: `m`, `n`, `seed` as `u64`, then the
    /// row-major entries as `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for e in &self.entries {
            w.write_all(&e.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut word)
                .map_err(|e| Error::Fixture(format!("truncated input: {e}")))?;
            Ok(word)
        };
        let rows = u64::from_le_bytes(next(&mut r)?) as usize;
        let cols = u64::from_le_bytes(next(&mut r)?) as usize;
        let seed = u64::from_le_bytes(next(&mut r)?);
        check_sizes(rows, cols, DEFAULT_ELEMENT_CAP)
            .map_err(|e| Error::Fixture(format!("bad header: {e}")))?;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            entries.push(f64::from_le_bytes(next(&mut r)?));
        }
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Fixture("trailing bytes after entries".into()));
        }
        Self::from_entries(rows, cols, seed, entries)
    }

    /// CSV dump: a `m,n,seed` header line followed by one line per row.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{},{},{}\n", self.rows, self.cols, self.seed);
        for r in self.entries.chunks_exact(self.cols) {
            let line: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Fixture("empty input".into()))?;
        let parts: Vec<&str> = header.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Fixture(format!("header must be m,n,seed: {header:?}")));
        }
        let bad = |e: std::num::ParseIntError| Error::Fixture(format!("bad header: {e}"));
        let rows: usize = parts[0].parse().map_err(bad)?;
        let cols: usize = parts[1].parse().map_err(bad)?;
        let seed: u64 = parts[2].parse().map_err(bad)?;
        let mut entries = Vec::with_capacity(rows.saturating_mul(cols).min(1 << 20));
        for (i, line) in lines.enumerate() {
            let before = entries.len();
            for tok in line.split(',') {
                let v: f64 = tok
                    .trim()
                    .parse()
                    .map_err(|e| Error::Fixture(format!("row {i}: {e}")))?;
                entries.push(v);
            }
            if entries.len() - before != cols {
                return Err(Error::Fixture(format!(
                    "row {i} has {} values, expected {cols}",
                    entries.len() - before
                )));
            }
        }
        Self::from_entries(rows, cols, seed, entries)
    }
}

#[inline]
fn row_dot(row: &[f64], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, b) in row.iter().zip(x) {
        s += a * b;
    }
    s
}

/// A layer described only by its shape and seed; entries are generated on
/// demand. Products skip columns where every input is zero, which leaves
/// results equal to the materialized layer's (up to the sign of zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImplicitLayer {
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

impl ImplicitLayer {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self> {
        check_sizes(m, n, usize::MAX)?;
        Ok(Self {
            rows: m,
            cols: n,
            seed,
        })
    }

    pub fn materialize(&self) -> Result<GaussianLayer> {
        GaussianLayer::sample(self.cols, self.rows, self.seed)
    }

    /// Columns where at least one of `inputs` is nonzero.
    fn support(&self, inputs: &[&[f64]]) -> Result<Vec<usize>> {
        for x in inputs {
            check_len(self.cols, x)?;
        }
        Ok((0..self.cols)
            .filter(|&j| inputs.iter().any(|x| x[j] != 0.0))
            .collect())
    }

    /// Pre-activations `(mᵢᵀx, mᵢᵀy)` for every row, in row order.
    pub fn project_pair(&self, x: &[f64], y: &[f64]) -> Result<Vec<(f64, f64)>> {
        let support = self.support(&[x, y])?;
        Ok((0..self.rows)
            .map(|i| {
                let (mut a, mut b) = (0.0, 0.0);
                for &j in &support {
                    let e = gaussian_entry(self.seed, i, j, self.rows);
                    a += e * x[j];
                    b += e * y[j];
                }
                (a, b)
            })
            .collect())
    }

    /// `ρ(Mx)`, rows computed in parallel.
    pub fn relu_forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let support = self.support(&[x])?;
        Ok((0..self.rows)
            .into_par_iter()
            .map(|i| {
                let mut a = 0.0;
                for &j in &support {
                    a += gaussian_entry(self.seed, i, j, self.rows) * x[j];
                }
                relu(a)
            })
            .collect())
    }

    /// `(ρ(Mx), ρ(My))` sharing one pass over the generated entries.
    pub fn relu_forward_pair(&self, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let support = self.support(&[x, y])?;
        Ok((0..self.rows)
            .into_par_iter()
            .map(|i| {
                let (mut a, mut b) = (0.0, 0.0);
                for &j in &support {
                    let e = gaussian_entry(self.seed, i, j, self.rows);
                    a += e * x[j];
                    b += e * y[j];
                }
                (relu(a), relu(b))
            })
            .unzip())
    }

    /// `‖ρ(Mx) − ρ(My)‖²`, rows summed in ascending order.
    pub fn sq_dist_realization(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (a, b) in self.project_pair(x, y)? {
            let d = relu(a) - relu(b);
            total += d * d;
        }
        Ok(total)
    }
}

/// Layers applied in sequence; the output width of each layer is the input
/// width of the next. An empty stack is the identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LayerStack {
    layers: Vec<GaussianLayer>,
}

impl LayerStack {
    pub fn new(layers: Vec<GaussianLayer>) -> Result<Self> {
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[1].cols() != pair[0].rows() {
                return Err(Error::LayerDimensionMismatch {
                    layer: k + 1,
                    expected: pair[0].rows(),
                    actual: pair[1].cols(),
                });
            }
        }
        Ok(Self { layers })
    }

    /// Layers of widths `widths[0], widths[1], ...` on input dimension `n`;
    /// layer `k` uses seed `derive_seed(seed, k)`.
    pub fn sample(n: usize, widths: &[usize], seed: u64) -> Result<Self> {
        let mut layers = Vec::with_capacity(widths.len());
        let mut input = n;
        for (k, &w) in widths.iter().enumerate() {
            layers.push(GaussianLayer::sample(input, w, rng::derive_seed(seed, k as u64))?);
            input = w;
        }
        Self::new(layers)
    }

    pub fn layers(&self) -> &[GaussianLayer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// `ρ(M_L ··· ρ(M_1 x))`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut h = x.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            h = layer.relu_forward(&h).map_err(|e| match e {
                Error::DimensionMismatch { expected, actual } => Error::LayerDimensionMismatch {
                    layer: k,
                    expected,
                    actual,
                },
                other => other,
            })?;
        }
        Ok(h)
    }

    /// Every intermediate representation: element `k` is the output after
    /// `k` layers (element 0 is `x` itself).
    pub fn forward_trace(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut trace = vec![x.to_vec()];
        for (k, layer) in self.layers.iter().enumerate() {
            let h = layer
                .relu_forward(trace.last().expect("trace starts non-empty"))
                .map_err(|e| match e {
                    Error::DimensionMismatch { expected, actual } => Error::LayerDimensionMismatch {
                        layer: k,
                        expected,
                        actual,
                    },
                    other => other,
                })?;
            trace.push(h);
        }
        Ok(trace)
    }
}
