//! Catalog serialization: line-delimited records, CSV class tables, and DOT
//! graph export.
//!
//! Records store both the canonical index (machine key) and the matrix text
//! (human key); readers verify the two agree, so catalogs are self-checking.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::model::{AdjacencyMatrix, CatalogEntry, ClassSignature, ModelError};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_error(line: usize, message: impl Into<String>) -> CatalogError {
    CatalogError::Parse {
        line,
        message: message.into(),
    }
}

/// Write entries as tab-separated records behind a comment header.
pub fn write_records<W: Write>(entries: &[CatalogEntry], mut writer: W) -> io::Result<()> {
    writeln!(writer, "# mechcat catalog v1")?;
    writeln!(
        writer,
        "# columns: links\tdof\tclass\tcanonical_index\tmatrix\tengine_version\tcriteria_config_hash"
    )?;
    for entry in entries {
        writeln!(
            writer,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            entry.links,
            entry.dof,
            entry.class.label(),
            entry.canonical_index,
            entry.matrix.render_text(),
            entry.engine_version,
            entry.criteria_config_hash,
        )?;
    }
    Ok(())
}

/// Read records written by [`write_records`], verifying each line's
/// self-consistency (index, link count and class must match the matrix
/// text). Errors name the offending line.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut entries = Vec::new();
    for (line_index, line) in reader.lines().enumerate() {
        let line_number = line_index + 1;
        let line = line?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 7 {
            return Err(parse_error(
                line_number,
                format!("expected 7 tab-separated fields, got {}", fields.len()),
            ));
        }
        let links: usize = fields[0]
            .parse()
            .map_err(|_| parse_error(line_number, format!("bad link count {:?}", fields[0])))?;
        let dof: i32 = fields[1]
            .parse()
            .map_err(|_| parse_error(line_number, format!("bad DOF {:?}", fields[1])))?;
        let canonical_index: u64 = fields[3].parse().map_err(|_| {
            parse_error(line_number, format!("bad canonical index {:?}", fields[3]))
        })?;
        let matrix = AdjacencyMatrix::parse_text(fields[4])
            .map_err(|e: ModelError| parse_error(line_number, e.to_string()))?;
        if matrix.n() != links {
            return Err(parse_error(
                line_number,
                format!("link count {} disagrees with matrix size {}", links, matrix.n()),
            ));
        }
        if matrix.index() != canonical_index {
            return Err(parse_error(
                line_number,
                format!(
                    "canonical index {} disagrees with matrix text (index {})",
                    canonical_index,
                    matrix.index()
                ),
            ));
        }
        let class = matrix.classify();
        if class.label() != fields[2] {
            return Err(parse_error(
                line_number,
                format!(
                    "class {:?} disagrees with matrix joints ({})",
                    fields[2],
                    class.label()
                ),
            ));
        }
        entries.push(CatalogEntry {
            links,
            dof,
            class,
            canonical_index,
            matrix,
            engine_version: fields[5].to_string(),
            criteria_config_hash: fields[6].to_string(),
        });
    }
    Ok(entries)
}

/// Write a catalog file (see [`write_records`]).
pub fn save_catalog(entries: &[CatalogEntry], path: &Path) -> io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    write_records(entries, &mut writer)?;
    writer.flush()
}

/// Read a catalog file (see [`read_records`]).
pub fn load_catalog(path: &Path) -> Result<Vec<CatalogEntry>, CatalogError> {
    read_records(BufReader::new(File::open(path)?))
}

/// Write a class/count table as CSV with a trailing total row. The iteration
/// order of the input (class table order) is preserved.
pub fn write_class_table<'a, W, I>(rows: I, mut writer: W) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a ClassSignature, &'a u64)>,
{
    writeln!(writer, "class,count")?;
    let mut total = 0u64;
    for (class, count) in rows {
        writeln!(writer, "{},{}", class.label(), count)?;
        total += count;
    }
    writeln!(writer, "total,{total}")?;
    Ok(())
}

/// Render the link graph in DOT: node 0 is the base, node n−1 the
/// end-effector, edges carry joint letters. Output is deterministic.
pub fn to_dot(m: &AdjacencyMatrix) -> String {
    let n = m.n();
    let mut out = String::from("graph mechanism {\n");
    for v in 0..n {
        let label = node_label(v, n);
        out.push_str(&format!("  n{v} [label=\"{label}\"];\n"));
    }
    for (i, j, kind) in m.joints() {
        out.push_str(&format!("  n{i} -- n{j} [label=\"{}\"];\n", kind.letter()));
    }
    out.push_str("}\n");
    out
}

fn node_label(v: usize, n: usize) -> String {
    if v == 0 {
        "Base".to_string()
    } else if v == n - 1 {
        "EE".to_string()
    } else {
        format!("L{}", v + 1)
    }
}
