//! Sequence files: CSV with header `n,P,G`, one row per degree.
//!
//! Degree 0 carries an empty `P` field. Strict files hold exact decimal
//! integers; analysis-mode files may hold decimals or `a/b` fractions.
//! Readers accept trailing extra columns so exported tables can be read back.

use std::io::{Read, Write};

use dashu_int::IBig;
use dashu_ratio::RBig;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::real::parse_rational;
use crate::semigroup::{ElementCounts, GeneratorCounts};

/// Raw `n,P,G` columns as read from disk, indexed by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SequenceTable {
    p: Vec<Option<String>>,
    g: Vec<Option<String>>,
}

impl SequenceTable {
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = csv.headers()?.clone();
        let names: Vec<&str> = headers.iter().take(3).collect();
        if names != ["n", "P", "G"] {
            return Err(Error::Parse(format!(
                "sequence file header must start with n,P,G, got {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let mut table = SequenceTable::default();
        for (row, record) in csv.records().enumerate() {
            let record = record?;
            let n: usize = record
                .get(0)
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad degree", row + 1)))?;
            if n != row {
                return Err(Error::Parse(format!(
                    "row {}: expected degree {row}, found {n}",
                    row + 1
                )));
            }
            let field = |i: usize| {
                record
                    .get(i)
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
            };
            table.p.push(field(1));
            table.g.push(field(2));
        }
        if table.p.len() < 2 {
            return Err(Error::Parse("sequence file needs rows for degrees 0 and 1".into()));
        }
        Ok(table)
    }

    pub fn read_path(path: &std::path::Path) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }

    pub fn n_max(&self) -> usize {
        self.p.len() - 1
    }

    fn column<'a>(&self, which: &'a [Option<String>], name: &str, from: usize) -> Result<Vec<&'a str>> {
        which[from..]
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_deref().ok_or_else(|| {
                    Error::Parse(format!("missing {name} value at degree {}", i + from))
                })
            })
            .collect()
    }

    pub fn generator_counts(&self) -> Result<GeneratorCounts> {
        let values = self
            .column(&self.p, "P", 1)?
            .into_iter()
            .map(|s| IBig::from_str(s).map_err(|_| Error::Parse(format!("P value {s:?} is not an integer"))))
            .collect::<Result<Vec<_>>>()?;
        GeneratorCounts::from_signed(values)
    }

    pub fn element_counts(&self) -> Result<ElementCounts> {
        let values = self
            .column(&self.g, "G", 0)?
            .into_iter()
            .map(|s| IBig::from_str(s).map_err(|_| Error::Parse(format!("G value {s:?} is not an integer"))))
            .collect::<Result<Vec<_>>>()?;
        ElementCounts::from_signed(values)
    }

    /// Analysis-mode `P(1..)` as exact rationals.
    pub fn generator_rationals(&self) -> Result<Vec<RBig>> {
        self.column(&self.p, "P", 1)?.into_iter().map(parse_rational).collect()
    }

    /// Analysis-mode `G(0..)` as exact rationals.
    pub fn element_rationals(&self) -> Result<Vec<RBig>> {
        self.column(&self.g, "G", 0)?.into_iter().map(parse_rational).collect()
    }

    pub fn has_p(&self) -> bool {
        self.p.iter().skip(1).all(Option::is_some)
    }

    pub fn has_g(&self) -> bool {
        self.g.iter().all(Option::is_some)
    }
}

/// Writes exact `P`, `G` as an `n,P,G` file.
pub fn write_sequences<W: Write>(writer: W, p: &GeneratorCounts, g: &ElementCounts) -> Result<()> {
    let n_max = p.n_max().min(g.n_max());
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["n", "P", "G"])?;
    for n in 0..=n_max {
        let pn = if n == 0 { String::new() } else { p.get(n).to_string() };
        csv.write_record([n.to_string(), pn, g.get(n).to_string()])?;
    }
    csv.flush()?;
    Ok(())
}
