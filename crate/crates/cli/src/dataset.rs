//! Dataset ingestion: the embedded Wheaton River series or a column of a
//! delimited text file.

use std::fs::File;
use std::io::Read;
use std::path::PathBuf;

use crate::error::{CliError, Result};

const WHEATON_CSV: &str = include_str!("../data/wheaton.csv");

/// Names accepted by [`DatasetSource::Embedded`].
pub const EMBEDDED: [&str; 1] = ["wheaton"];

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Embedded(&'static str),
    File(FileSource),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileSource {
    pub path: PathBuf,
    /// 0-based column holding the observations.
    pub column: usize,
    pub delimiter: u8,
    pub has_header: bool,
    pub filter: Option<YearFilter>,
}

/// Keep only rows whose `column` holds `year`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YearFilter {
    pub column: usize,
    pub year: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub values: Vec<f64>,
}

impl DatasetSource {
    /// An embedded dataset by name, or a file with default reading options.
    pub fn from_arg(arg: &str) -> Self {
        match EMBEDDED.iter().find(|name| name.eq_ignore_ascii_case(arg)) {
            Some(name) => DatasetSource::Embedded(name),
            None => DatasetSource::File(FileSource::new(arg)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            DatasetSource::Embedded(name) => (*name).to_string(),
            DatasetSource::File(f) => f.path.display().to_string(),
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        let rows = self.rows(None)?;
        let values: Vec<f64> = rows.into_iter().map(|(_, v)| v).collect();
        if values.is_empty() {
            return Err(CliError::Empty(self.name()));
        }
        Ok(Dataset {
            name: self.name(),
            values,
        })
    }

    /// Observations split by the value of `group_column`, groups in order of
    /// first appearance.
    pub fn load_groups(&self, group_column: usize) -> Result<Vec<Dataset>> {
        let mut groups: Vec<Dataset> = Vec::new();
        for (key, value) in self.rows(Some(group_column))? {
            let key = key.unwrap_or_default();
            match groups.iter_mut().find(|g| g.name == key) {
                Some(g) => g.values.push(value),
                None => groups.push(Dataset {
                    name: key,
                    values: vec![value],
                }),
            }
        }
        if groups.is_empty() {
            return Err(CliError::Empty(self.name()));
        }
        Ok(groups)
    }

    fn rows(&self, key_column: Option<usize>) -> Result<Vec<(Option<String>, f64)>> {
        match self {
            DatasetSource::Embedded(name) => {
                let opts = FileSource {
                    has_header: true,
                    ..FileSource::new(name)
                };
                read_rows(WHEATON_CSV.as_bytes(), name, &opts, key_column)
            }
            DatasetSource::File(f) => {
                let file = File::open(&f.path).map_err(|source| CliError::Io {
                    path: f.path.clone(),
                    source,
                })?;
                read_rows(file, &f.path.display().to_string(), f, key_column)
            }
        }
    }
}

impl FileSource {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            column: 0,
            delimiter: b',',
            has_header: false,
            filter: None,
        }
    }
}

fn read_rows<R: Read>(
    mut input: R,
    source_name: &str,
    opts: &FileSource,
    key_column: Option<usize>,
) -> Result<Vec<(Option<String>, f64)>> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf).map_err(|source| CliError::Io {
        path: PathBuf::from(source_name),
        source,
    })?;
    // the reader skips blank lines without counting them, so lines come from byte offsets
    let line_at = |byte: u64| {
        let mut start = byte as usize;
        while matches!(buf.get(start), Some(b'\n' | b'\r')) {
            start += 1;
        }
        1 + buf[..start].iter().filter(|&&b| b == b'\n').count() as u64
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .delimiter(opts.delimiter)
        .from_reader(&buf[..]);
    let mut out = Vec::new();
    let parse_error = |line: u64, message: String| CliError::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|source| CliError::Csv {
            source_name: source_name.to_string(),
            source,
        })?;
        if i == 0 && opts.has_header {
            continue;
        }
        let line = record.position().map_or(i as u64 + 1, |p| line_at(p.byte()));
        if record.iter().all(str::is_empty) {
            continue;
        }
        let cell = |column: usize| {
            record
                .get(column)
                .ok_or_else(|| parse_error(line, format!("no column {column} (row has {} fields)", record.len())))
        };
        if let Some(filter) = opts.filter {
            let year = cell(filter.column)?;
            let year: i64 = year
                .parse()
                .map_err(|_| parse_error(line, format!("year '{year}' is not an integer")))?;
            if year != filter.year {
                continue;
            }
        }
        let raw = cell(opts.column)?;
        let value: f64 = raw
            .parse()
            .map_err(|_| parse_error(line, format!("'{raw}' is not a number")))?;
        if !value.is_finite() {
            return Err(parse_error(line, format!("'{raw}' is not finite")));
        }
        let key = key_column.map(|k| cell(k).map(str::to_string)).transpose()?;
        out.push((key, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, opts: &FileSource) -> Result<Vec<f64>> {
        Ok(read_rows(text.as_bytes(), "test", opts, None)?
            .into_iter()
            .map(|(_, v)| v)
            .collect())
    }

    #[test]
    fn embedded_wheaton() {
        let d = DatasetSource::from_arg("Wheaton").load().unwrap();
        assert_eq!(d.name, "wheaton");
        assert_eq!(d.values.len(), 72);
        assert_eq!(d.values.iter().copied().fold(f64::INFINITY, f64::min), 0.1);
    }

    #[test]
    fn blank_lines_and_header() {
        let opts = FileSource {
            has_header: true,
            ..FileSource::new("x")
        };
        assert_eq!(parse("v\n1.5\n\n2\n \n3e0\n", &opts).unwrap(), vec![1.5, 2.0, 3.0]);
    }

    #[test]
    fn bad_cell_names_its_line() {
        let err = parse("1\n2\n\nabc\n", &FileSource::new("x")).unwrap_err();
        match err {
            CliError::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn column_delimiter_and_year_filter() {
        let opts = FileSource {
            column: 1,
            delimiter: b';',
            filter: Some(YearFilter { column: 0, year: 1990 }),
            ..FileSource::new("x")
        };
        let text = "1989;5.0\n1990;7.5\n1990;8.25\n1991;1.0\n";
        assert_eq!(parse(text, &opts).unwrap(), vec![7.5, 8.25]);
        let missing = FileSource {
            column: 3,
            ..FileSource::new("x")
        };
        assert!(matches!(parse("1,2\n", &missing), Err(CliError::Parse { line: 1, .. })));
    }

    #[test]
    fn groups_keep_first_appearance_order() {
        let opts = FileSource {
            column: 1,
            ..FileSource::new("x")
        };
        let rows = read_rows("b,1\na,2\nb,3\n".as_bytes(), "t", &opts, Some(0)).unwrap();
        assert_eq!(rows[0], (Some("b".into()), 1.0));
        assert_eq!(rows.len(), 3);
    }

    #[test]
    fn missing_file() {
        let err = DatasetSource::from_arg("definitely/missing.csv").load().unwrap_err();
        assert!(matches!(err, CliError::Io { .. }));
        assert!(err.to_string().contains("missing.csv"));
    }
}
