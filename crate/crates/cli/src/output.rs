use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// One CSV table, plus optional two-column series for plotting.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: &'static str,
    pub x: &'static str,
    pub y: &'static str,
    pub points: Vec<(f64, f64)>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self { name: name.into(), header: header.to_vec(), rows: Vec::new(), series: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn with_series(
        mut self,
        name: &'static str,
        x: &'static str,
        y: &'static str,
        points: Vec<(f64, f64)>,
    ) -> Self {
        self.series.push(Series { name, x, y, points });
        self
    }
}

pub trait Cell {
    fn cell(&self) -> String;
}

/// Shortest round-trip form; exponent notation outside `[1e-4, 1e15)`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Cell for f64 {
    fn cell(&self) -> String {
        fmt_f64(*self)
    }
}

impl Cell for bool {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for str {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for String {
    fn cell(&self) -> String {
        self.clone()
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        }
    )*};
}
int_cell!(usize, u64, u32, i64);

impl<T: Cell> Cell for Option<T> {
    fn cell(&self) -> String {
        self.as_ref().map(Cell::cell).unwrap_or_default()
    }
}

impl<T: Cell + ?Sized> Cell for &T {
    fn cell(&self) -> String {
        (**self).cell()
    }
}

#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => {
        vec![$($crate::output::Cell::cell(&$v)),*]
    };
}

fn render(table_rows: impl IntoIterator<Item = Vec<String>>, header: &[&str], provenance: &str) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "{provenance}")?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for row in table_rows {
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

pub struct Provenance<'a> {
    pub command: &'a str,
    pub seed: u64,
}

impl Provenance<'_> {
    fn line(&self, table: &str) -> String {
        format!("# compactum {} command={} table={} seed={}", env!("CARGO_PKG_VERSION"), self.command, table, self.seed)
    }
}

pub fn render_table(table: &Table, prov: &Provenance<'_>) -> io::Result<Vec<u8>> {
    render(table.rows.iter().cloned(), &table.header, &prov.line(&table.name))
}

fn render_series(table: &Table, s: &Series, prov: &Provenance<'_>) -> io::Result<Vec<u8>> {
    let name = format!("{}-{}", table.name, s.name);
    render(s.points.iter().map(|&(x, y)| vec![fmt_f64(x), fmt_f64(y)]), &[s.x, s.y], &prov.line(&name))
}

/// Writes every table into `dir` as `<name>.csv`, and with `plot` each
/// series as `plot/<name>-<series>.csv`. Returns the written paths.
pub fn write_dir(dir: &Path, tables: &[Table], prov: &Provenance<'_>, plot: bool) -> io::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        fs::write(&path, render_table(t, prov)?)?;
        written.push(path.display().to_string());
        if plot && !t.series.is_empty() {
            let plot_dir = dir.join("plot");
            fs::create_dir_all(&plot_dir)?;
            for s in &t.series {
                let path = plot_dir.join(format!("{}-{}.csv", t.name, s.name));
                fs::write(&path, render_series(t, s, prov)?)?;
                written.push(path.display().to_string());
            }
        }
    }
    Ok(written)
}

/// Tables separated by blank lines.
pub fn write_stream(out: &mut impl Write, tables: &[Table], prov: &Provenance<'_>) -> io::Result<()> {
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        out.write_all(&render_table(t, prov)?)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.0, 0.1, 1.0 / 3.0, 2f64.powi(-40), 1e300, -2.5e-7] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(0.25), "0.25");
        assert_eq!(fmt_f64(2f64.powi(-20)), "9.5367431640625e-7");
    }

    #[test]
    fn table_has_provenance_then_header() {
        let mut t = Table::new("demo", &["n", "note"]);
        t.push(row![1usize, "a, b"]);
        let bytes = render_table(&t, &Provenance { command: "entropy", seed: 3 }).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# compactum ") && lines[0].ends_with("command=entropy table=demo seed=3"));
        assert_eq!(lines[1], "n,note");
        assert_eq!(lines[2], "1,\"a, b\"");
    }
}
