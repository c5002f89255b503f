use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

/// Input the user got wrong: bad files, unknown ids, invalid parameters.
/// Maps to exit code 2.
#[derive(Debug)]
pub struct Invalid {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(code: &'static str, message: impl fmt::Display) -> anyhow::Error {
    Invalid {
        code,
        message: message.to_string(),
    }
    .into()
}

/// One command result in all three renderings.
pub struct Rendered {
    /// One JSON document per line.
    pub json: Vec<Value>,
    /// Header row first.
    pub tsv: Vec<Vec<String>>,
    pub pretty: String,
}

impl Rendered {
    pub fn single(json: Value, tsv: Vec<Vec<String>>, pretty: String) -> Self {
        Rendered {
            json: vec![json],
            tsv,
            pretty,
        }
    }
}

pub struct Output {
    pub format: Format,
    pub pretty: bool,
    sink: Box<dyn Write>,
}

impl Output {
    pub fn new(format: Format, pretty: bool, path: Option<&Path>) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Output {
            format,
            pretty,
            sink,
        })
    }

    pub fn emit(&mut self, r: &Rendered) -> Result<()> {
        if self.pretty {
            writeln!(self.sink, "{}", r.pretty.trim_end())?;
        } else {
            match self.format {
                Format::Json => {
                    for v in &r.json {
                        writeln!(self.sink, "{}", serde_json::to_string(v)?)?;
                    }
                }
                Format::Tsv => {
                    for row in &r.tsv {
                        writeln!(self.sink, "{}", row.join("\t"))?;
                    }
                }
            }
        }
        self.sink.flush()?;
        Ok(())
    }
}

/// Shortest decimal with at most 12 fractional digits, always with a
/// fractional part.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0');
    let s = if s.ends_with('.') { format!("{s}0") } else { s.to_string() };
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

/// JSON number, or `null` for non-finite values.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn row<I, S>(cells: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: ToString,
{
    cells.into_iter().map(|c| c.to_string()).collect()
}
