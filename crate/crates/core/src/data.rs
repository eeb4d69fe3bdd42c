//! Categorical data tables with explicit missing cells.
//!
//! A table stores the substantive columns (in graph index order) followed by
//! the fully observed columns. Indicator columns are never stored; they are
//! derived from the missing cells, which keeps consistency true by
//! construction.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use thiserror::Error;

use crate::identify::MissingnessPattern;
use crate::mgraph::{MGraph, VertexKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("column `{0}` is required by the graph but absent")]
    MissingColumn(String),
    #[error("column `{0}` does not name a graph vertex")]
    UnknownColumn(String),
    #[error("column `{0}` appears twice")]
    DuplicateColumn(String),
    #[error("row {row}: fully observed column `{column}` is missing")]
    MissingObserved { row: usize, column: String },
    #[error("row {row}: `{column}` disagrees with its indicator `{indicator}`")]
    Inconsistent { row: usize, column: String, indicator: String },
    #[error("row {row}: indicator `{column}` must be 0 or 1, got `{value}`")]
    BadIndicator { row: usize, column: String, value: String },
    #[error("row {row}: `{value}` is not a category of `{column}`")]
    UnknownCategory { row: usize, column: String, value: String },
    #[error("row has {actual} cells, table has {expected} columns")]
    RowLength { expected: usize, actual: usize },
    #[error("column `{0}` has more than 65535 categories")]
    TooManyCategories(String),
    #[error("column `{0}` has no categories")]
    NoCategories(String),
    #[error("tables have different schemas")]
    SchemaMismatch,
    #[error("graph has {0} substantive variables, beyond the pattern limit")]
    TooWide(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub categories: Vec<String>,
}

impl Column {
    pub fn new(name: impl Into<String>, categories: Vec<String>) -> Self {
        Column { name: name.into(), categories }
    }

    pub fn card(&self) -> usize {
        self.categories.len()
    }
}

/// Column layout shared by tables built for the same graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    /// One per substantive variable, in index order.
    pub substantive: Vec<Column>,
    pub observed: Vec<Column>,
    /// Indicator name per substantive index.
    pub indicators: Vec<String>,
}

impl Schema {
    /// Schema for `g` with the given category lists, looked up by name.
    pub fn from_graph(g: &MGraph, categories: &HashMap<String, Vec<String>>) -> Result<Schema, DataError> {
        let col = |v| {
            let name = g.name(v).to_string();
            let cats = categories.get(&name).cloned().ok_or_else(|| DataError::MissingColumn(name.clone()))?;
            check_categories(&name, &cats)?;
            Ok(Column::new(name, cats))
        };
        Ok(Schema {
            substantive: g.substantive_vertices().iter().map(|&v| col(v)).collect::<Result<_, _>>()?,
            observed: g.observed_vertices().iter().map(|&v| col(v)).collect::<Result<_, _>>()?,
            indicators: g.indicator_vertices().iter().map(|&v| g.name(v).to_string()).collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.substantive.len()
    }

    /// Substantive plus observed columns.
    pub fn width(&self) -> usize {
        self.substantive.len() + self.observed.len()
    }

    /// Stored column `c`: substantive columns first, then observed ones.
    pub fn column(&self, c: usize) -> &Column {
        if c < self.k() {
            &self.substantive[c]
        } else {
            &self.observed[c - self.k()]
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = &Column> {
        self.substantive.iter().chain(&self.observed)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns().position(|c| c.name == name)
    }

    pub fn cards(&self) -> Vec<usize> {
        self.columns().map(Column::card).collect()
    }
}

fn check_categories(name: &str, cats: &[String]) -> Result<(), DataError> {
    if cats.is_empty() {
        return Err(DataError::NoCategories(name.to_string()));
    }
    if cats.len() > u16::MAX as usize {
        return Err(DataError::TooManyCategories(name.to_string()));
    }
    Ok(())
}

/// Delimiter and missing token for text I/O.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub na_token: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { delimiter: b',', na_token: "NA".to_string() }
    }
}

/// `N` rows over a [`Schema`]; `None` marks a missing substantive cell.
///
/// Once a missing cell has been filled by imputation the row keeps its
/// original pattern, so the indicators written out are the ones read in.
#[derive(Debug, Clone)]
pub struct DataTable {
    schema: Schema,
    cells: Vec<Option<u16>>,
    rows: usize,
    recorded: Option<Vec<MissingnessPattern>>,
}

impl PartialEq for DataTable {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema
            && self.rows == other.rows
            && self.cells == other.cells
            && (0..self.rows).all(|n| self.pattern(n) == other.pattern(n))
    }
}

impl Eq for DataTable {}

impl DataTable {
    pub fn new(schema: Schema) -> Self {
        DataTable { schema, cells: Vec::new(), rows: 0, recorded: None }
    }

    pub fn with_capacity(schema: Schema, rows: usize) -> Self {
        let width = schema.width();
        DataTable { schema, cells: Vec::with_capacity(rows * width), rows: 0, recorded: None }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.schema.width()
    }

    /// Appends a row of category indices. Only substantive cells may be `None`.
    pub fn push_row(&mut self, row: &[Option<u16>]) -> Result<(), DataError> {
        let w = self.width();
        if row.len() != w {
            return Err(DataError::RowLength { expected: w, actual: row.len() });
        }
        for (c, cell) in row.iter().enumerate() {
            let col = self.schema.column(c);
            match cell {
                None if c >= self.schema.k() => {
                    return Err(DataError::MissingObserved { row: self.rows + 1, column: col.name.clone() })
                }
                Some(x) if *x as usize >= col.card() => {
                    return Err(DataError::UnknownCategory {
                        row: self.rows + 1,
                        column: col.name.clone(),
                        value: x.to_string(),
                    })
                }
                _ => {}
            }
        }
        self.cells.extend_from_slice(row);
        self.rows += 1;
        let r = self.derived_pattern(self.rows - 1);
        if let Some(rec) = &mut self.recorded {
            rec.push(r);
        }
        Ok(())
    }

    pub fn row(&self, n: usize) -> &[Option<u16>] {
        let w = self.width();
        &self.cells[n * w..(n + 1) * w]
    }

    /// Overwrites row `n` with complete values, keeping its pattern.
    pub(crate) fn fill_row(&mut self, n: usize, values: &[u16]) {
        if self.recorded.is_none() {
            self.recorded = Some((0..self.rows).map(|m| self.derived_pattern(m)).collect());
        }
        let w = self.width();
        for (cell, &v) in self.cells[n * w..(n + 1) * w].iter_mut().zip(values) {
            *cell = Some(v);
        }
    }

    pub fn get(&self, n: usize, c: usize) -> Option<u16> {
        self.cells[n * self.width() + c]
    }

    /// Missingness pattern of row `n` as read, even after imputation.
    pub fn pattern(&self, n: usize) -> MissingnessPattern {
        match &self.recorded {
            Some(rec) => rec[n],
            None => self.derived_pattern(n),
        }
    }

    fn derived_pattern(&self, n: usize) -> MissingnessPattern {
        let k = self.schema.k();
        let observed: Vec<bool> = self.row(n)[..k].iter().map(Option::is_some).collect();
        MissingnessPattern::from_observed(&observed).expect("width checked at construction")
    }

    /// Distinct patterns, descending.
    pub fn patterns(&self) -> Vec<MissingnessPattern> {
        let set: BTreeSet<MissingnessPattern> = (0..self.rows).map(|n| self.pattern(n)).collect();
        set.into_iter().rev().collect()
    }

    pub fn has_missing(&self) -> bool {
        self.cells.iter().any(Option::is_none)
    }

    pub fn missing_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    /// Category label of a stored value.
    pub fn label(&self, c: usize, value: u16) -> &str {
        &self.schema.column(c).categories[value as usize]
    }

    /// Rows grouped by pattern.
    pub fn rows_by_pattern(&self) -> HashMap<MissingnessPattern, Vec<usize>> {
        let mut map: HashMap<MissingnessPattern, Vec<usize>> = HashMap::new();
        for n in 0..self.rows {
            map.entry(self.pattern(n)).or_default().push(n);
        }
        map
    }

    /// Header order: substantive, indicators, observed.
    pub fn write_csv<W: Write>(&self, w: W, opts: &CsvOptions) -> Result<(), DataError> {
        let mut out = csv::WriterBuilder::new().delimiter(opts.delimiter).from_writer(w);
        let k = self.schema.k();
        let mut header: Vec<&str> = self.schema.substantive.iter().map(|c| c.name.as_str()).collect();
        header.extend(self.schema.indicators.iter().map(String::as_str));
        header.extend(self.schema.observed.iter().map(|c| c.name.as_str()));
        out.write_record(&header).map_err(csv_err)?;
        let mut record: Vec<&str> = Vec::with_capacity(header.len());
        for n in 0..self.rows {
            record.clear();
            let row = self.row(n);
            for (c, cell) in row[..k].iter().enumerate() {
                record.push(match cell {
                    Some(x) => self.label(c, *x),
                    None => opts.na_token.as_str(),
                });
            }
            let r = self.pattern(n);
            for i in 0..k {
                record.push(if r.is_observed(i) { "1" } else { "0" });
            }
            for (c, cell) in row.iter().enumerate().skip(k) {
                record.push(self.label(c, cell.expect("observed cells are present")));
            }
            out.write_record(&record).map_err(csv_err)?;
        }
        out.flush().map_err(|e| DataError::Csv(e.to_string()))?;
        Ok(())
    }

    /// Reads a table whose columns are matched to `g` by name. Categories
    /// are the sorted distinct values of each column (numeric order when
    /// every value parses as a number).
    pub fn read_csv<R: Read>(r: R, g: &MGraph, opts: &CsvOptions) -> Result<DataTable, DataError> {
        Self::read_csv_inner(r, g, opts, None)
    }

    /// Like [`DataTable::read_csv`] but with categories fixed up front.
    pub fn read_csv_with_categories<R: Read>(
        r: R,
        g: &MGraph,
        opts: &CsvOptions,
        categories: &HashMap<String, Vec<String>>,
    ) -> Result<DataTable, DataError> {
        Self::read_csv_inner(r, g, opts, Some(categories))
    }

    fn read_csv_inner<R: Read>(
        r: R,
        g: &MGraph,
        opts: &CsvOptions,
        fixed: Option<&HashMap<String, Vec<String>>>,
    ) -> Result<DataTable, DataError> {
        if g.k() > crate::identify::MAX_K {
            return Err(DataError::TooWide(g.k()));
        }
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(opts.delimiter)
            .trim(csv::Trim::All)
            .from_reader(r);
        let header: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();

        // column position of each graph role
        let k = g.k();
        let j = g.observed_vertices().len();
        let mut value_pos: Vec<Option<usize>> = vec![None; k + j];
        let mut indicator_pos: Vec<Option<usize>> = vec![None; k];
        let obs_index: HashMap<_, _> = g.observed_vertices().iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for (p, name) in header.iter().enumerate() {
            let v = g.id(name).map_err(|_| DataError::UnknownColumn(name.clone()))?;
            let slot = match g.kind(v) {
                VertexKind::Substantive(i) => &mut value_pos[i],
                VertexKind::Observed => &mut value_pos[k + obs_index[&v]],
                VertexKind::Indicator(i) => &mut indicator_pos[i],
            };
            if slot.replace(p).is_some() {
                return Err(DataError::DuplicateColumn(name.clone()));
            }
        }
        let col_names: Vec<String> = g
            .substantive_vertices()
            .iter()
            .chain(g.observed_vertices())
            .map(|&v| g.name(v).to_string())
            .collect();
        let value_pos: Vec<usize> = value_pos
            .iter()
            .zip(&col_names)
            .map(|(p, n)| p.ok_or_else(|| DataError::MissingColumn(n.clone())))
            .collect::<Result<_, _>>()?;

        let mut raw: Vec<Vec<Option<String>>> = Vec::new();
        for (n, rec) in reader.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let row = n + 1;
            let mut cells = Vec::with_capacity(k + j);
            for (c, &p) in value_pos.iter().enumerate() {
                let text = rec.get(p).unwrap_or("");
                let cell = if text == opts.na_token { None } else { Some(text.to_string()) };
                if c >= k && cell.is_none() {
                    return Err(DataError::MissingObserved { row, column: col_names[c].clone() });
                }
                cells.push(cell);
            }
            for (i, p) in indicator_pos.iter().enumerate() {
                let Some(p) = p else { continue };
                let text = rec.get(*p).unwrap_or("");
                let flag = match text {
                    "1" => true,
                    "0" => false,
                    _ => {
                        return Err(DataError::BadIndicator {
                            row,
                            column: header[*p].clone(),
                            value: text.to_string(),
                        })
                    }
                };
                if flag != cells[i].is_some() {
                    return Err(DataError::Inconsistent {
                        row,
                        column: col_names[i].clone(),
                        indicator: header[*p].clone(),
                    });
                }
            }
            raw.push(cells);
        }

        let mut categories: HashMap<String, Vec<String>> = HashMap::new();
        for (c, name) in col_names.iter().enumerate() {
            let cats = match fixed.and_then(|f| f.get(name)) {
                Some(cats) => cats.clone(),
                None => sorted_categories(raw.iter().filter_map(|r| r[c].as_deref())),
            };
            let cats = if cats.is_empty() { vec!["0".to_string()] } else { cats };
            categories.insert(name.clone(), cats);
        }
        let schema = Schema::from_graph(g, &categories)?;
        let lookup: Vec<HashMap<&str, u16>> = schema
            .columns()
            .map(|col| col.categories.iter().enumerate().map(|(i, s)| (s.as_str(), i as u16)).collect())
            .collect();
        let mut table = DataTable::with_capacity(schema.clone(), raw.len());
        let mut row_buf = Vec::with_capacity(k + j);
        for (n, cells) in raw.iter().enumerate() {
            row_buf.clear();
            for (c, cell) in cells.iter().enumerate() {
                row_buf.push(match cell {
                    None => None,
                    Some(s) => Some(*lookup[c].get(s.as_str()).ok_or_else(|| DataError::UnknownCategory {
                        row: n + 1,
                        column: col_names[c].clone(),
                        value: s.clone(),
                    })?),
                });
            }
            table.push_row(&row_buf)?;
        }
        Ok(table)
    }
}

fn csv_err(e: csv::Error) -> DataError {
    DataError::Csv(e.to_string())
}

fn sorted_categories<'a>(values: impl Iterator<Item = &'a str>) -> Vec<String> {
    let set: BTreeSet<&str> = values.collect();
    let mut cats: Vec<String> = set.into_iter().map(str::to_string).collect();
    let numeric: Option<Vec<f64>> = cats.iter().map(|s| s.parse::<f64>().ok()).collect();
    if let Some(nums) = numeric {
        let mut pairs: Vec<(f64, String)> = nums.into_iter().zip(cats).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        cats = pairs.into_iter().map(|p| p.1).collect();
    }
    cats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgraph::parse_mgraph;

    fn graph() -> MGraph {
        parse_mgraph("class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nobserved O\n").unwrap()
    }

    fn read(text: &str) -> Result<DataTable, DataError> {
        DataTable::read_csv(text.as_bytes(), &graph(), &CsvOptions::default())
    }

    #[test]
    fn reads_and_derives_patterns() {
        let t = read("O,X2,X1\n1,NA,0\n0,b,1\n1,a,NA\n").unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.pattern(0).to_string(), "10");
        assert_eq!(t.pattern(2).to_string(), "01");
        assert_eq!(t.schema().substantive[1].categories, ["a", "b"]);
        assert_eq!(t.patterns().iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["11", "10", "01"]);
        assert_eq!(t.missing_count(), 2);
    }

    #[test]
    fn writes_canonical_column_order() {
        let t = read("O,X2,X1\n1,NA,0\n").unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &CsvOptions { delimiter: b';', na_token: ".".into() }).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "X1;X2;R1;R2;O\n0;.;1;0;1\n");
    }

    #[test]
    fn round_trip_through_text() {
        let t = read("X1,X2,R1,R2,O\n10,2,1,1,0\nNA,2,0,1,1\n9,NA,1,0,1\n").unwrap();
        assert_eq!(t.schema().substantive[0].categories, ["9", "10"]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &CsvOptions::default()).unwrap();
        let again = DataTable::read_csv(buf.as_slice(), &graph(), &CsvOptions::default()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn indicator_disagreement_names_row() {
        let err = read("X1,X2,R1,R2,O\n0,0,1,1,0\n1,1,0,1,0\n").unwrap_err();
        assert_eq!(
            err,
            DataError::Inconsistent { row: 2, column: "X1".into(), indicator: "R1".into() }
        );
        assert!(err.to_string().contains("row 2"));
        assert!(matches!(read("X1,X2,R1,O\n0,0,2,0\n"), Err(DataError::BadIndicator { .. })));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(read("X1,X2,O\n0,0,NA\n"), Err(DataError::MissingObserved { row: 1, .. })));
        assert!(matches!(read("X1,X2\n0,0\n"), Err(DataError::MissingColumn(_))));
        assert!(matches!(read("X1,X2,O,Z\n0,0,0,0\n"), Err(DataError::UnknownColumn(_))));
        assert!(matches!(read("X1,X1,X2,O\n0,0,0,0\n"), Err(DataError::DuplicateColumn(_))));
    }

    #[test]
    fn filled_rows_keep_their_indicators() {
        let mut t = read("X1,X2,O\nNA,1,0\n0,1,0\n").unwrap();
        t.fill_row(0, &[0, 0, 0]);
        assert!(!t.has_missing());
        assert_eq!(t.pattern(0).to_string(), "01");
        t.push_row(&[None, Some(0), Some(0)]).unwrap();
        assert_eq!(t.pattern(2).to_string(), "01");
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &CsvOptions::default()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "X1,X2,R1,R2,O\n0,1,0,1,0\n0,1,1,1,0\nNA,1,0,1,0\n");
    }

    #[test]
    fn header_only() {
        let t = read("X1,X2,O\n").unwrap();
        assert_eq!(t.n_rows(), 0);
        assert!(t.patterns().is_empty());
    }

    #[test]
    fn push_row_validates() {
        let mut t = read("X1,X2,O\n0,0,0\n").unwrap();
        assert!(t.push_row(&[Some(0), None, None]).is_err());
        assert!(t.push_row(&[Some(5), None, Some(0)]).is_err());
        assert!(t.push_row(&[Some(0)]).is_err());
        t.push_row(&[None, None, Some(0)]).unwrap();
        assert_eq!(t.pattern(1).to_string(), "00");
    }
}
