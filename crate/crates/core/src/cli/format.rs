//! Plot-ready series files: CSV (`t,re_g,im_g` / `omega,re_g,im_g`) and a
//! column-oriented JSON equivalent. Numbers use C `%.17g` formatting so
//! every `f64` round-trips and identical runs give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

/// Formats like C's `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Independent-variable axis of a series file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Time,
    Frequency,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Time => "t",
            Axis::Frequency => "omega",
        }
    }

    fn parse(s: &str) -> Option<Axis> {
        match s {
            "t" => Some(Axis::Time),
            "omega" => Some(Axis::Frequency),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!(
                "unknown output format '{s}' (csv | json)"
            ))),
        }
    }
}

/// A complex curve sampled on a real axis, as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesFile {
    pub stage: String,
    pub state: String,
    pub channel: String,
    pub axis: Axis,
    pub x: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SeriesFile {
    /// `{stage}_{state}_{channel}.{ext}`.
    pub fn file_name(&self, format: Format) -> String {
        format!(
            "{}_{}_{}.{}",
            self.stage,
            self.state,
            self.channel,
            format.extension()
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},re_g,im_g\n", self.axis.name());
        for i in 0..self.x.len() {
            out.push_str(&format_g17(self.x[i]));
            out.push(',');
            out.push_str(&format_g17(self.re[i]));
            out.push(',');
            out.push_str(&format_g17(self.im[i]));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let column = |v: &[f64]| {
            let items: Vec<String> = v
                .iter()
                .map(|&x| {
                    if x.is_finite() {
                        format_g17(x)
                    } else {
                        "null".into()
                    }
                })
                .collect();
            format!("[{}]", items.join(","))
        };
        format!(
            "{{\n  \"stage\": {},\n  \"state\": {},\n  \"channel\": {},\n  \"axis\": \"{}\",\n  \"x\": {},\n  \"re_g\": {},\n  \"im_g\": {}\n}}\n",
            serde_json::Value::from(self.stage.as_str()),
            serde_json::Value::from(self.state.as_str()),
            serde_json::Value::from(self.channel.as_str()),
            self.axis.name(),
            column(&self.x),
            column(&self.re),
            column(&self.im),
        )
    }

    pub fn write(&self, dir: &Path, format: Format) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let path = dir.join(self.file_name(format));
        let body = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        fs::write(&path, body).map_err(|e| io_error(&path, e))?;
        Ok(path)
    }

    /// Reads a CSV or JSON series, chosen by extension.
    pub fn read(path: &Path) -> Result<SeriesFile> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let (stage, state, channel) = split_file_stem(path);
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => parse_json(&text, path),
            _ => parse_csv(&text, path, stage, state, channel),
        }
    }
}

pub(crate) fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn split_file_stem(path: &Path) -> (String, String, String) {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    let mut parts = stem.splitn(3, '_');
    let a = parts.next().unwrap_or_default().to_string();
    let b = parts.next().unwrap_or_default().to_string();
    let c = parts.next().unwrap_or_default().to_string();
    (a, b, c)
}

fn parse_csv(
    text: &str,
    path: &Path,
    stage: String,
    state: String,
    channel: String,
) -> Result<SeriesFile> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_error(path, "empty file"))?;
    let axis = match header {
        "t,re_g,im_g" => Axis::Time,
        "omega,re_g,im_g" => Axis::Frequency,
        other => {
            return Err(parse_error(
                path,
                format!("line 1: unexpected header '{other}'"),
            ))
        }
    };
    let (mut x, mut re, mut im) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_error(
                path,
                format!("line {}: expected 3 fields", n + 2),
            ));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| parse_error(path, format!("line {}: bad number '{s}'", n + 2)))
        };
        x.push(num(fields[0])?);
        re.push(num(fields[1])?);
        im.push(num(fields[2])?);
    }
    Ok(SeriesFile {
        stage,
        state,
        channel,
        axis,
        x,
        re,
        im,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSeries {
    stage: String,
    state: String,
    channel: String,
    axis: String,
    x: Vec<f64>,
    re_g: Vec<Option<f64>>,
    im_g: Vec<Option<f64>>,
}

fn parse_json(text: &str, path: &Path) -> Result<SeriesFile> {
    let raw: JsonSeries = serde_json::from_str(text).map_err(|e| {
        parse_error(
            path,
            format!("line {} column {}: {e}", e.line(), e.column()),
        )
    })?;
    let axis = Axis::parse(&raw.axis)
        .ok_or_else(|| parse_error(path, format!("unknown axis '{}'", raw.axis)))?;
    if raw.re_g.len() != raw.x.len() || raw.im_g.len() != raw.x.len() {
        return Err(parse_error(path, "column lengths differ"));
    }
    let fill = |v: Vec<Option<f64>>| v.into_iter().map(|o| o.unwrap_or(f64::NAN)).collect();
    Ok(SeriesFile {
        stage: raw.stage,
        state: raw.state,
        channel: raw.channel,
        axis,
        x: raw.x,
        re: fill(raw.re_g),
        im: fill(raw.im_g),
    })
}
