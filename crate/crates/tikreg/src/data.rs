//! Dataset loading and writing (LIBSVM and CSV formats), the data-driven
//! `mu` scaling rule, and ridge augmentation of a regression instance.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::linalg::norm_inf;
use crate::matrix::DesignMatrix;

/// A design matrix paired with its response vector.
#[derive(Clone, Debug)]
pub struct Dataset<F> {
    pub a: DesignMatrix<F>,
    pub b: Vec<F>,
}

fn parse_float<F: Float>(tok: &str, line: usize, what: &str) -> Result<F> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, msg: format!("{what} `{tok}` is not finite") });
    }
    Ok(cast::<F>(v))
}

/// Load a LIBSVM-format file: one sample per line, `label idx:val idx:val ...`
/// with 1-based, strictly ascending feature indices.  The feature count is
/// the largest index seen, unless `n_override` widens it.  Lines that are
/// empty after trimming are skipped; all errors carry the 1-based line number
/// (line 0 means the file as a whole).
pub fn load_libsvm<F: Float>(path: &Path, n_override: Option<usize>) -> Result<Dataset<F>> {
    let reader = BufReader::new(File::open(path)?);
    let mut b: Vec<F> = Vec::new();
    let mut triplets: Vec<(usize, usize, F)> = Vec::new();
    let mut max_index = 0usize; // 1-based

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let label_tok = toks.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "missing label".into(),
        })?;
        let label = parse_float::<F>(label_tok, lineno, "label")?;
        let row = b.len();
        b.push(label);

        let mut prev_index = 0usize;
        for tok in toks {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected `index:value`, got `{tok}`"),
            })?;
            let idx: usize = idx_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid feature index `{idx_str}`"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "feature indices are 1-based; got 0".into(),
                });
            }
            if idx <= prev_index {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!(
                        "feature indices must be strictly ascending: {idx} after {prev_index}"
                    ),
                });
            }
            prev_index = idx;
            max_index = max_index.max(idx);
            let val = parse_float::<F>(val_str, lineno, "feature value")?;
            triplets.push((row, idx - 1, val));
        }
    }

    if b.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no data rows found".into() });
    }
    let n = match n_override {
        Some(n) => {
            if n < max_index {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!(
                        "feature count override {n} is smaller than largest index {max_index}"
                    ),
                });
            }
            n
        }
        None => max_index,
    };
    if n == 0 {
        return Err(Error::Parse { line: 0, msg: "no features found".into() });
    }
    let a = DesignMatrix::sparse_from_triplets(b.len(), n, &triplets)?;
    Ok(Dataset { a, b })
}

/// Load a dense CSV file: each row holds the features followed by the
/// response as the final column.  All rows must have the same width (at
/// least two columns).  Blank lines are skipped.
pub fn load_csv<F: Float>(path: &Path) -> Result<Dataset<F>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows: Vec<Vec<F>> = Vec::new();
    let mut b: Vec<F> = Vec::new();
    let mut width = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut vals: Vec<F> = Vec::new();
        for tok in line.split(',') {
            vals.push(parse_float::<F>(tok.trim(), lineno, "value")?);
        }
        if vals.len() < 2 {
            return Err(Error::Parse {
                line: lineno,
                msg: "need at least one feature column and a response column".into(),
            });
        }
        if width == 0 {
            width = vals.len();
        } else if vals.len() != width {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {width} columns, got {}", vals.len()),
            });
        }
        let label = vals.pop().unwrap();
        b.push(label);
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no data rows found".into() });
    }
    let a = DesignMatrix::from_rows(&rows)?;
    Ok(Dataset { a, b })
}

/// Write a dataset in LIBSVM format.  Stored entries that are exactly zero
/// are dropped; values print in shortest form that reparses to the same
/// float, so a write/load cycle reproduces the matrix entries and responses
/// bit for bit.
pub fn write_libsvm<F: Float>(path: &Path, a: &DesignMatrix<F>, b: &[F]) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::Config(format!(
            "response length {} does not match row count {}",
            b.len(),
            a.rows()
        )));
    }
    let mut rows: Vec<Vec<(usize, F)>> = vec![Vec::new(); a.rows()];
    a.for_each_entry(|i, j, v| {
        if v != F::zero() {
            rows[i].push((j, v));
        }
    });
    // entries arrive in column order, so each per-row list is already sorted
    let mut out = BufWriter::new(File::create(path)?);
    for (i, row) in rows.iter().enumerate() {
        write!(out, "{}", b[i])?;
        for &(j, v) in row {
            write!(out, " {}:{}", j + 1, v)?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Data-driven sparsity weight: `mu = mu_c * ||A^T b||_inf`.  Errors when the
/// correlations are identically zero, since every positive `mu_c` would then
/// collapse to the same unweighted problem.
pub fn compute_mu<F: Float>(mu_c: F, a: &DesignMatrix<F>, b: &[F]) -> Result<F> {
    if !(mu_c > F::zero()) || !mu_c.is_finite() {
        return Err(Error::Config(format!("mu_c must be positive and finite, got {mu_c}")));
    }
    let mut w = vec![F::zero(); a.cols()];
    a.tr_matvec(b, &mut w);
    let scale = norm_inf(&w);
    if scale == F::zero() {
        return Err(Error::Config(
            "A^T b is identically zero; the data provides no scale for mu".into(),
        ));
    }
    Ok(mu_c * scale)
}

/// Stack `sqrt(lambda) * I` beneath the design matrix: returns
/// `([A; sqrt(lambda) I], [b; 0])`, which turns the ridge term into ordinary
/// least squares.  Sparseness of the input is preserved.
pub fn augment<F: Float>(
    a: &DesignMatrix<F>,
    b: &[F],
    lambda: F,
) -> Result<(DesignMatrix<F>, Vec<F>)> {
    if !(lambda > F::zero()) || !lambda.is_finite() {
        return Err(Error::Config(format!("lambda must be positive and finite, got {lambda}")));
    }
    if b.len() != a.rows() {
        return Err(Error::Config(format!(
            "response length {} does not match row count {}",
            b.len(),
            a.rows()
        )));
    }
    let m = a.rows();
    let n = a.cols();
    let root = lambda.sqrt();
    let mut bt = b.to_vec();
    bt.extend(std::iter::repeat(F::zero()).take(n));

    let at = if a.is_sparse() {
        let mut triplets: Vec<(usize, usize, F)> = Vec::with_capacity(a.stored_entries() + n);
        a.for_each_entry(|i, j, v| triplets.push((i, j, v)));
        for j in 0..n {
            triplets.push((m + j, j, root));
        }
        DesignMatrix::sparse_from_triplets(m + n, n, &triplets)?
    } else {
        let mut data = vec![F::zero(); (m + n) * n];
        a.for_each_entry(|i, j, v| data[j * (m + n) + i] = v);
        for j in 0..n {
            data[j * (m + n) + m + j] = root;
        }
        DesignMatrix::dense(m + n, n, data)?
    };
    Ok((at, bt))
}
