//! Record output in `lines` (`field=value ...`) or CSV form.

use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Lines,
    Csv,
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Table {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let row: Vec<String> = row.into_iter().map(|v| v.to_string()).collect();
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Lines => {
                for row in &self.rows {
                    let fields: Vec<String> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, v)| format!("{h}={v}"))
                        .collect();
                    writeln!(out, "{}", fields.join(" "))?;
                }
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    pub fn print(&self, format: Format) -> io::Result<()> {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        self.write(format, &mut lock)?;
        lock.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(t: &Table, f: Format) -> String {
        let mut buf = Vec::new();
        t.write(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn both_formats() {
        let mut t = Table::new(&["engine", "muls"]);
        t.push(["matrix", "12"]);
        t.push(["trig", "1"]);
        assert_eq!(render(&t, Format::Lines), "engine=matrix muls=12\nengine=trig muls=1\n");
        assert_eq!(render(&t, Format::Csv), "engine,muls\nmatrix,12\ntrig,1\n");
    }

    #[test]
    fn empty_csv_keeps_header() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(render(&t, Format::Csv), "a,b\n");
        assert_eq!(render(&t, Format::Lines), "");
    }
}
