//! Dataset ingestion, preprocessing, splitting, and synthetic generation.
//!
//! A [`Dataset`] is a dense row-major `n x d` feature matrix with one
//! integer label per row. CSV loading rejects malformed rows individually
//! (with row-numbered diagnostics) instead of failing the whole file, labels
//! are encoded lexicographically, and min-max normalization is fit on the
//! training split only and then applied to the test split.

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Magic bytes of the flat binary dataset cache.
pub const BINARY_MAGIC: &[u8; 8] = b"REDUSDS1";

/// Feature matrix plus integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<u32>,
    class_count: usize,
    feature_count: usize,
}

impl Dataset {
    pub fn new(
        features: Vec<f64>,
        labels: Vec<u32>,
        class_count: usize,
        feature_count: usize,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::data("dataset needs at least one row"));
        }
        if feature_count == 0 || class_count == 0 {
            return Err(Error::data("feature and class counts must be positive"));
        }
        if features.len() != labels.len() * feature_count {
            return Err(Error::data(format!(
                "feature matrix length {} does not match {} rows x {} features",
                features.len(),
                labels.len(),
                feature_count
            )));
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::data("non-finite feature value"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= class_count) {
            return Err(Error::data(format!(
                "label {bad} out of range for {class_count} classes"
            )));
        }
        Ok(Dataset {
            features,
            labels,
            class_count,
            feature_count,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.feature_count..(i + 1) * self.feature_count]
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    pub fn one_hot(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.class_count];
        v[self.labels[i] as usize] = 1.0;
        v
    }

    /// Materialize the rows at `indices` (in the given order) as a new
    /// dataset with the same class count.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::data("subset needs at least one row"));
        }
        let mut features = Vec::with_capacity(indices.len() * self.feature_count);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::data(format!("row index {i} out of bounds")));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset::new(features, labels, self.class_count, self.feature_count)
    }

    /// Per-class row counts, length `class_count`.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_count];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Classes with zero rows; used to warn about splits that lost a class.
    pub fn absent_classes(&self) -> Vec<u32> {
        self.class_histogram()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Flat binary cache: magic, `n: u64`, `d: u32`, `c: u32`, then
    /// row-major little-endian `f64` features and `u32` labels.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&(self.len() as u64).to_le_bytes())?;
        out.write_all(&(self.feature_count as u32).to_le_bytes())?;
        out.write_all(&(self.class_count as u32).to_le_bytes())?;
        for &x in &self.features {
            out.write_all(&x.to_le_bytes())?;
        }
        for &l in &self.labels {
            out.write_all(&l.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Dataset> {
        let io_err = |e: std::io::Error| Error::data(format!("binary dataset read: {e}"));
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(io_err)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::data("bad magic bytes in binary dataset"));
        }
        let mut u64buf = [0u8; 8];
        input.read_exact(&mut u64buf).map_err(io_err)?;
        let n = u64::from_le_bytes(u64buf) as usize;
        let mut u32buf = [0u8; 4];
        input.read_exact(&mut u32buf).map_err(io_err)?;
        let d = u32::from_le_bytes(u32buf) as usize;
        input.read_exact(&mut u32buf).map_err(io_err)?;
        let c = u32::from_le_bytes(u32buf) as usize;
        let mut features = Vec::with_capacity(n * d);
        for _ in 0..n * d {
            input.read_exact(&mut u64buf).map_err(io_err)?;
            features.push(f64::from_le_bytes(u64buf));
        }
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            input.read_exact(&mut u32buf).map_err(io_err)?;
            labels.push(u32::from_le_bytes(u32buf));
        }
        Dataset::new(features, labels, c, d)
    }

    /// Write as CSV with header `f0..f{d-1},label`. Features keep full
    /// round-trip precision so regeneration is byte-stable.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.feature_count)
            .map(|i| format!("f{i}"))
            .chain(std::iter::once("label".to_owned()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.len() {
            for &x in self.row(i) {
                write!(out, "{x},")?;
            }
            writeln!(out, "{}", self.labels[i])?;
        }
        Ok(())
    }
}

/// Per-feature min/max fitted on a training split.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
    /// Features whose training range was empty; they normalize to 0.
    pub constant: Vec<bool>,
}

/// Map each feature to `(x - min) / (max - min)` using training-split stats.
///
/// Constant features map to 0. When `stats` is supplied (test split) it is
/// applied as-is; out-of-range values are *not* clipped, so a test value
/// above the training max maps above 1.
pub fn fit_normalize(
    data: &Dataset,
    stats: Option<&NormalizationStats>,
) -> Result<(Dataset, NormalizationStats)> {
    let d = data.feature_count();
    let stats = match stats {
        Some(s) => {
            if s.mins.len() != d {
                return Err(Error::data("normalization stats width mismatch"));
            }
            s.clone()
        }
        None => {
            let mut mins = vec![f64::INFINITY; d];
            let mut maxs = vec![f64::NEG_INFINITY; d];
            for i in 0..data.len() {
                for (j, &x) in data.row(i).iter().enumerate() {
                    mins[j] = mins[j].min(x);
                    maxs[j] = maxs[j].max(x);
                }
            }
            let constant = mins.iter().zip(&maxs).map(|(a, b)| a == b).collect();
            NormalizationStats {
                mins,
                maxs,
                constant,
            }
        }
    };

    let mut features = Vec::with_capacity(data.features().len());
    for i in 0..data.len() {
        for (j, &x) in data.row(i).iter().enumerate() {
            if stats.constant[j] {
                features.push(0.0);
            } else {
                features.push((x - stats.mins[j]) / (stats.maxs[j] - stats.mins[j]));
            }
        }
    }
    let normalized = Dataset::new(
        features,
        data.labels().to_vec(),
        data.class_count(),
        data.feature_count(),
    )?;
    Ok((normalized, stats))
}

/// Seeded shuffle followed by a contiguous split. Fractions must be
/// positive and sum to 1; sizes are rounded to the nearest row. A warning
/// is logged if either side loses a class entirely.
pub fn split(data: &Dataset, fractions: (f64, f64), stream: &RngStream) -> Result<(Dataset, Dataset)> {
    let (train_frac, test_frac) = fractions;
    if train_frac <= 0.0 || test_frac <= 0.0 {
        return Err(Error::config("split fractions must be positive"));
    }
    if (train_frac + test_frac - 1.0).abs() > 1e-9 {
        return Err(Error::config("split fractions must sum to 1"));
    }
    let n = data.len();
    if n < 2 {
        return Err(Error::config("cannot split fewer than 2 rows"));
    }
    let train_size = ((n as f64 * train_frac).round() as usize).clamp(1, n - 1);

    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut stream.rng());
    let train = data.subset(&indices[..train_size])?;
    let test = data.subset(&indices[train_size..])?;
    for side in [("train", &train), ("test", &test)] {
        let absent = side.1.absent_classes();
        if !absent.is_empty() {
            log::warn!("{} split is missing classes {:?}", side.0, absent);
        }
    }
    Ok((train, test))
}

/// Synthetic classification task: one unit-variance Gaussian cluster per
/// class, means at `separation * u_c` for orthonormal directions `u_c`.
/// Labels cycle `i % class_count`, so counts differ by at most 1. With
/// `separation = 0` every class shares one cluster and accuracy cannot
/// beat chance. If `classes > d`, directions repeat (cycled), which makes
/// the repeated classes indistinguishable.
pub fn synth_generate(
    n: usize,
    d: usize,
    classes: usize,
    separation: f64,
    stream: &RngStream,
) -> Result<Dataset> {
    if classes == 0 || d == 0 {
        return Err(Error::config("class and feature counts must be positive"));
    }
    if n < classes {
        return Err(Error::config(format!(
            "need at least one row per class: n={n}, classes={classes}"
        )));
    }
    if !separation.is_finite() || separation < 0.0 {
        return Err(Error::config("separation must be finite and nonnegative"));
    }

    let mut rng = stream.rng();
    let normal = StandardNormal;

    // Orthonormal directions via Gram-Schmidt on Gaussian draws.
    let mut directions: Vec<Vec<f64>> = Vec::with_capacity(classes.min(d));
    while directions.len() < classes.min(d) {
        let mut v: Vec<f64> = (0..d).map(|_| normal.sample(&mut rng)).collect();
        for u in &directions {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (x, &y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            directions.push(v);
        }
    }

    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % classes;
        let mean = &directions[class % directions.len()];
        for j in 0..d {
            let noise: f64 = normal.sample(&mut rng);
            features.push(separation * mean[j] + noise);
        }
        labels.push(class as u32);
    }
    Dataset::new(features, labels, classes, d)
}

/// One row of a [`load_csv`] rejection report.
#[derive(Debug, Clone)]
pub struct DroppedRow {
    /// 1-based data-row number (header excluded).
    pub row: u64,
    pub reason: String,
}

/// Ordered distinct label strings mapped to contiguous codes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelEncoder {
    classes: Vec<String>,
}

impl LabelEncoder {
    /// Lexicographic encoding: deterministic across runs and platforms.
    pub fn fit(labels: &[String]) -> Self {
        let mut classes: Vec<String> = labels.to_vec();
        classes.sort();
        classes.dedup();
        LabelEncoder { classes }
    }

    pub fn encode(&self, label: &str) -> Option<u32> {
        self.classes
            .binary_search_by(|c| c.as_str().cmp(label))
            .ok()
            .map(|i| i as u32)
    }

    pub fn decode(&self, code: u32) -> Option<&str> {
        self.classes.get(code as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub has_header: bool,
    /// Header name of the label column. `None` means the last column; files
    /// without a header always use the last column.
    pub label_column: Option<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            label_column: Some("label".to_owned()),
        }
    }
}

#[derive(Debug)]
pub struct CsvLoad {
    pub dataset: Dataset,
    pub encoder: LabelEncoder,
    pub dropped: Vec<DroppedRow>,
}

/// Load a CSV dataset. Every column except the label column must parse as a
/// finite number; rows that do not are dropped individually and reported
/// with their row number.
pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<CsvLoad> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::data(format!("cannot open {}: {e}", path.display())))?;

    let label_index: usize;
    let mut width: usize;
    if opts.has_header {
        let headers = reader
            .headers()
            .map_err(|e| Error::data(format!("cannot read header: {e}")))?
            .clone();
        width = headers.len();
        label_index = match &opts.label_column {
            Some(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::data(format!("missing label column {name:?}")))?,
            None => width.checked_sub(1).ok_or_else(|| Error::data("empty header"))?,
        };
    } else {
        if opts.label_column.is_some() {
            return Err(Error::config(
                "label column names need a header; headerless files use the last column",
            ));
        }
        width = 0; // fixed by the first parsed row
        label_index = usize::MAX; // resolved per row as the last column
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut label_strings: Vec<String> = Vec::new();
    let mut dropped = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i as u64 + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                dropped.push(DroppedRow {
                    row: row_no,
                    reason: format!("unreadable record: {e}"),
                });
                continue;
            }
        };
        if width == 0 {
            width = record.len();
        }
        if record.len() != width {
            dropped.push(DroppedRow {
                row: row_no,
                reason: format!("expected {width} fields, found {}", record.len()),
            });
            continue;
        }
        let li = if opts.has_header {
            label_index
        } else {
            width - 1
        };
        let mut features = Vec::with_capacity(width - 1);
        let mut bad: Option<String> = None;
        for (j, field) in record.iter().enumerate() {
            if j == li {
                continue;
            }
            match field.trim().parse::<f64>() {
                Ok(x) if x.is_finite() => features.push(x),
                Ok(x) => {
                    bad = Some(format!("non-finite value {x} in column {j}"));
                    break;
                }
                Err(_) => {
                    bad = Some(format!("unparseable value {:?} in column {j}", field));
                    break;
                }
            }
        }
        if let Some(reason) = bad {
            dropped.push(DroppedRow {
                row: row_no,
                reason,
            });
            continue;
        }
        label_strings.push(record.get(li).unwrap_or("").trim().to_owned());
        rows.push(features);
    }

    if rows.is_empty() {
        return Err(Error::data(format!(
            "zero usable rows in {} ({} dropped)",
            path.display(),
            dropped.len()
        )));
    }
    for d in &dropped {
        log::warn!("{}: dropped row {}: {}", path.display(), d.row, d.reason);
    }

    let encoder = LabelEncoder::fit(&label_strings);
    let labels: Vec<u32> = label_strings
        .iter()
        .map(|s| encoder.encode(s).expect("label was fitted"))
        .collect();
    let feature_count = width - 1;
    let features: Vec<f64> = rows.into_iter().flatten().collect();
    let dataset = Dataset::new(features, labels, encoder.len(), feature_count)?;
    Ok(CsvLoad {
        dataset,
        encoder,
        dropped,
    })
}
