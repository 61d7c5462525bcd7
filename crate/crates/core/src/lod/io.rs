use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::coarse::CoarseOperators;
use crate::error::{Error, Result};
use crate::lod::correctors::Correctors;
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// Writes correctors as a coordinate matrix (`row i` = `φ̃_i`), preceded by
/// a `# computed` line listing the coarse dofs that were solved for.
pub fn write_correctors<T: Scalar, W: Write>(correctors: &Correctors<T>, mut out: W) -> Result<()> {
    let list: Vec<String> = correctors
        .computed()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(i, _)| i.to_string())
        .collect();
    writeln!(out, "# computed {}", list.join(" "))?;
    correctors.matrix().write_coordinate(out)
}

pub fn read_correctors<T: Scalar, R: BufRead>(
    mut input: R,
    ops: &CoarseOperators<T>,
) -> Result<Correctors<T>> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let list = first
        .trim_end()
        .strip_prefix("# computed")
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "expected `# computed` header".into(),
        })?;
    let m = ops.coarse_dofs();
    let mut computed = vec![false; m];
    for tok in list.split_whitespace() {
        let i: usize = tok.parse().map_err(|_| Error::Parse {
            line: 1,
            message: format!("bad coarse dof `{tok}`"),
        })?;
        if i >= m {
            return Err(Error::Parse {
                line: 1,
                message: format!("coarse dof {i} out of range for {m} coarse dofs"),
            });
        }
        computed[i] = true;
    }
    let rows = SparseMatrix::read_coordinate(input).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line: line + 1,
            message,
        },
        other => other,
    })?;
    if rows.shape() != (m, ops.fine_dim()) {
        return Err(Error::DimensionMismatch {
            expected: m * ops.fine_dim(),
            found: rows.nrows() * rows.ncols(),
            context: "stored corrector matrix shape",
        });
    }
    Correctors::new(rows, computed)
}

pub fn save_correctors<T: Scalar, P: AsRef<Path>>(
    correctors: &Correctors<T>,
    path: P,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_correctors(correctors, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_correctors<T: Scalar, P: AsRef<Path>>(
    path: P,
    ops: &CoarseOperators<T>,
) -> Result<Correctors<T>> {
    read_correctors(BufReader::new(File::open(path)?), ops)
}
