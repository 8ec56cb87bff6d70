//! Dense matrix ingestion from MatrixMarket and CSV, and matrix writers.
//!
//! Sparse inputs are densified; the dense size is capped by a cell budget
//! so that a large sparse file fails fast instead of exhausting memory.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use clap::ValueEnum;
use detlev::DenseMatrix;

use crate::error::{CliError, CliResult};

/// Largest `rows × cols` accepted when densifying.
pub const DEFAULT_CELL_BUDGET: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    #[value(name = "matrixmarket", alias = "mm", alias = "mtx")]
    #[serde(rename = "matrixmarket")]
    MatrixMarket,
    Csv,
}

impl MatrixFormat {
    /// `.mtx` and `.mm` are MatrixMarket; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("mtx" | "mm") => Self::MatrixMarket,
            _ => Self::Csv,
        }
    }
}

pub fn load_matrix(path: &Path, format: Option<MatrixFormat>, budget: usize) -> CliResult<DenseMatrix> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    match format.unwrap_or_else(|| MatrixFormat::from_path(path)) {
        MatrixFormat::MatrixMarket => read_matrix_market(reader, path, budget),
        MatrixFormat::Csv => read_csv(reader, path, budget),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

struct Header {
    layout: Layout,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str, path: &Path) -> CliResult<Header> {
    let bad = |msg: &str| CliError::parse(path, 1, msg);
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(bad("expected '%%MatrixMarket matrix <layout> <field> <symmetry>'"));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(bad(&format!("unsupported layout '{other}'"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(bad(&format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(bad(&format!("unsupported symmetry '{other}'"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(bad("pattern field requires coordinate layout"));
    }
    if symmetry != Symmetry::General && matches!(layout, Layout::Array) {
        return Err(bad("array layout is supported only with general symmetry"));
    }
    Ok(Header { layout, field, symmetry })
}

fn parse_usize(token: Option<&str>, what: &str, path: &Path, line: usize) -> CliResult<usize> {
    let token = token.ok_or_else(|| CliError::parse(path, line, format!("missing {what}")))?;
    token.parse().map_err(|_| CliError::parse(path, line, format!("invalid {what} '{token}'")))
}

fn parse_value(token: Option<&str>, path: &Path, line: usize) -> CliResult<f64> {
    let token = token.ok_or_else(|| CliError::parse(path, line, "missing value"))?;
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(CliError::parse(path, line, format!("non-finite value '{token}'"))),
        Err(_) => Err(CliError::parse(path, line, format!("invalid number '{token}'"))),
    }
}

fn check_budget(path: &Path, rows: usize, cols: usize, budget: usize) -> CliResult<()> {
    match rows.checked_mul(cols) {
        Some(cells) if cells <= budget => Ok(()),
        _ => Err(CliError::TooLarge { path: path.to_path_buf(), rows, cols, budget }),
    }
}

/// Reads a MatrixMarket `coordinate` (real, integer or pattern; general,
/// symmetric or skew-symmetric) or `array` (general) file. Coordinate
/// indices are 1-based; duplicate entries are summed; pattern entries are 1.
pub fn read_matrix_market<R: Read>(reader: BufReader<R>, path: &Path, budget: usize) -> CliResult<DenseMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next_line = |path: &Path| -> CliResult<Option<(usize, String)>> {
        match lines.next() {
            None => Ok(None),
            Some((n, Ok(l))) => Ok(Some((n, l))),
            Some((_, Err(e))) => Err(CliError::io(path, e)),
        }
    };

    let (_, first) = next_line(path)?.ok_or_else(|| CliError::parse(path, 1, "empty file"))?;
    let header = parse_header(&first, path)?;

    let mut last_line = 1;
    let data_line = |next_line: &mut dyn FnMut(&Path) -> CliResult<Option<(usize, String)>>,
                     last_line: &mut usize|
     -> CliResult<Option<(usize, String)>> {
        while let Some((n, l)) = next_line(path)? {
            *last_line = n;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Ok(Some((n, t.to_string())));
            }
        }
        Ok(None)
    };

    let (size_no, size_line) = data_line(&mut next_line, &mut last_line)?
        .ok_or_else(|| CliError::parse(path, last_line + 1, "missing size line"))?;
    let mut size = size_line.split_whitespace();
    let rows = parse_usize(size.next(), "row count", path, size_no)?;
    let cols = parse_usize(size.next(), "column count", path, size_no)?;
    if rows == 0 || cols == 0 {
        return Err(CliError::parse(path, size_no, "matrix dimensions must be positive"));
    }
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(CliError::parse(path, size_no, "symmetric storage requires a square matrix"));
    }
    let entries = match header.layout {
        Layout::Coordinate => parse_usize(size.next(), "entry count", path, size_no)?,
        Layout::Array => rows * cols,
    };
    check_budget(path, rows, cols, budget)?;

    let mut data = vec![0.0; rows * cols];
    for seen in 0..entries {
        let (no, line) = data_line(&mut next_line, &mut last_line)?.ok_or_else(|| {
            CliError::parse(path, last_line + 1, format!("expected {entries} entries, found {seen}"))
        })?;
        let mut tokens = line.split_whitespace();
        match header.layout {
            Layout::Array => {
                let value = parse_value(tokens.next(), path, no)?;
                let (i, j) = (seen % rows, seen / rows);
                data[i * cols + j] = value;
            }
            Layout::Coordinate => {
                let i = parse_usize(tokens.next(), "row index", path, no)?;
                let j = parse_usize(tokens.next(), "column index", path, no)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(CliError::parse(
                        path,
                        no,
                        format!("index ({i}, {j}) outside {rows}x{cols}"),
                    ));
                }
                let value = match header.field {
                    Field::Pattern => 1.0,
                    Field::Real | Field::Integer => parse_value(tokens.next(), path, no)?,
                };
                let (i, j) = (i - 1, j - 1);
                data[i * cols + j] += value;
                match header.symmetry {
                    Symmetry::General => {}
                    Symmetry::Symmetric if i != j => data[j * cols + i] += value,
                    Symmetry::Symmetric => {}
                    Symmetry::SkewSymmetric if i == j => {
                        return Err(CliError::parse(path, no, "skew-symmetric diagonal entry"));
                    }
                    Symmetry::SkewSymmetric => data[j * cols + i] -= value,
                }
            }
        }
        if tokens.next().is_some() {
            return Err(CliError::parse(path, no, "trailing tokens"));
        }
    }
    if let Some((no, _)) = data_line(&mut next_line, &mut last_line)? {
        return Err(CliError::parse(path, no, format!("more than {entries} entries")));
    }
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// Reads comma-separated rows of decimal reals; no header, `#` starts a
/// comment line, every row must have the same length.
pub fn read_csv<R: Read>(reader: BufReader<R>, path: &Path, budget: usize) -> CliResult<DenseMatrix> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut data = Vec::new();
    let mut cols = 0;
    let mut rows = 0;
    for record in csv_reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            CliError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if rows == 0 {
            cols = record.len();
        }
        check_budget(path, rows + 1, cols, budget)?;
        for field in record.iter() {
            data.push(parse_value(Some(field), path, line)?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::parse(path, 1, "no data rows"));
    }
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:?}")
}

/// Writes `a` as a MatrixMarket `array real general` file or as CSV.
pub fn write_matrix(path: &Path, a: &DenseMatrix, format: MatrixFormat) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let result = match format {
        MatrixFormat::MatrixMarket => write_matrix_market(&mut out, a),
        MatrixFormat::Csv => write_csv(&mut out, a),
    };
    result.and_then(|()| out.flush()).map_err(|e| CliError::io(path, e))
}

fn write_matrix_market<W: Write>(out: &mut W, a: &DenseMatrix) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix array real general")?;
    writeln!(out, "{} {}", a.rows(), a.cols())?;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            writeln!(out, "{}", format_value(a.get(i, j)))?;
        }
    }
    Ok(())
}

fn write_csv<W: Write>(out: &mut W, a: &DenseMatrix) -> std::io::Result<()> {
    for i in 0..a.rows() {
        let line: Vec<String> = a.row(i).iter().map(|&x| format_value(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mm(text: &str) -> CliResult<DenseMatrix> {
        read_matrix_market(BufReader::new(text.as_bytes()), Path::new("t.mtx"), DEFAULT_CELL_BUDGET)
    }

    fn csv(text: &str) -> CliResult<DenseMatrix> {
        read_csv(BufReader::new(text.as_bytes()), Path::new("t.csv"), DEFAULT_CELL_BUDGET)
    }

    #[test]
    fn coordinate_diagonal() {
        let a = mm("%%MatrixMarket matrix coordinate real general\n% c\n2 2 2\n1 1 3.0\n2 2 2.0\n")
            .unwrap();
        assert_eq!(a, DenseMatrix::from_diag(&[3.0, 2.0]).unwrap());
    }

    #[test]
    fn symmetric_is_mirrored() {
        let a = mm("%%MatrixMarket matrix coordinate real symmetric\n3 3 4\n1 1 4\n2 1 1\n3 2 -2\n3 3 5\n")
            .unwrap();
        let expected = DenseMatrix::from_rows(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 0.0, -2.0],
            vec![0.0, -2.0, 5.0],
        ])
        .unwrap();
        assert_eq!(a, expected);
    }

    #[test]
    fn skew_and_pattern() {
        let a = mm("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3\n").unwrap();
        assert_eq!(a, DenseMatrix::from_rows(&[vec![0.0, -3.0], vec![3.0, 0.0]]).unwrap());
        let p = mm("%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 3\n2 1\n").unwrap();
        assert_eq!(p, DenseMatrix::from_rows(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]).unwrap());
    }

    #[test]
    fn array_is_column_major() {
        let a = mm("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n").unwrap();
        assert_eq!(a, DenseMatrix::from_rows(&[vec![1.0, 3.0], vec![2.0, 4.0]]).unwrap());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = mm("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 3.0\n2 x 1\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 4, .. }), "{e}");
        let e = mm("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 3, .. }));
        let e = mm("%%MatrixMarket tensor coordinate real general\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 1, .. }));
        let e = mm("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { .. }));
    }

    #[test]
    fn budget_is_enforced() {
        let e = read_matrix_market(
            BufReader::new("%%MatrixMarket matrix coordinate real general\n1000 1000 0\n".as_bytes()),
            Path::new("big.mtx"),
            10_000,
        )
        .unwrap_err();
        assert!(matches!(e, CliError::TooLarge { rows: 1000, cols: 1000, .. }));
    }

    #[test]
    fn csv_identity_and_errors() {
        assert_eq!(csv("1,0\n0,1\n").unwrap(), DenseMatrix::identity(2));
        assert_eq!(csv("# note\n 1 , 2 \n3,4").unwrap().get(1, 0), 3.0);
        assert!(matches!(csv("1,2\n3\n").unwrap_err(), CliError::Parse { line: 2, .. }));
        assert!(matches!(csv("1,2\n3,abc\n").unwrap_err(), CliError::Parse { line: 2, .. }));
        assert!(matches!(csv("").unwrap_err(), CliError::Parse { .. }));
    }

    #[test]
    fn values_round_trip_through_text() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 7.0] {
            assert_eq!(format_value(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(MatrixFormat::from_path(Path::new("a.MTX")), MatrixFormat::MatrixMarket);
        assert_eq!(MatrixFormat::from_path(Path::new("a.csv")), MatrixFormat::Csv);
        assert_eq!(MatrixFormat::from_path(Path::new("a")), MatrixFormat::Csv);
    }
}
