//! Instance and output files: JSON with one matrix row per line.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{IntArray, IntMatrix, WitnessMask};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ProductRow,
    ProductCol,
    Conv,
    VerifyRow,
    VerifyCol,
    VerifyConv,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::ProductRow,
        Kind::ProductCol,
        Kind::Conv,
        Kind::VerifyRow,
        Kind::VerifyCol,
        Kind::VerifyConv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::ProductRow => "product-row",
            Kind::ProductCol => "product-col",
            Kind::Conv => "conv",
            Kind::VerifyRow => "verify-row",
            Kind::VerifyCol => "verify-col",
            Kind::VerifyConv => "verify-conv",
        }
    }

    pub fn is_array(self) -> bool {
        matches!(self, Kind::Conv | Kind::VerifyConv)
    }

    pub fn is_verification(self) -> bool {
        matches!(self, Kind::VerifyRow | Kind::VerifyCol | Kind::VerifyConv)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown kind {s:?}")))
    }
}

/// A matrix or an array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Matrix(Vec<Vec<i64>>),
    Array(Vec<i64>),
}

impl Grid {
    pub fn matrix(&self) -> Result<IntMatrix> {
        match self {
            Grid::Matrix(rows) if !rows.is_empty() => IntMatrix::from_rows(rows),
            Grid::Array(v) if v.is_empty() => Err(Error::Parse("empty matrix".into())),
            _ => Err(Error::Parse("expected a nested integer array".into())),
        }
    }

    pub fn array(&self) -> Result<IntArray> {
        match self {
            Grid::Array(v) => Ok(IntArray::new(v.clone())),
            Grid::Matrix(_) => Err(Error::Parse("expected a flat integer array".into())),
        }
    }
}

impl From<&IntMatrix> for Grid {
    fn from(m: &IntMatrix) -> Self {
        Grid::Matrix(m.to_rows())
    }
}

impl From<&IntArray> for Grid {
    fn from(a: &IntArray) -> Self {
        Grid::Array(a.as_slice().to_vec())
    }
}

impl From<&WitnessMask> for Grid {
    fn from(m: &WitnessMask) -> Self {
        let rows: Vec<Vec<i64>> = m
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(i64::from).collect())
            .collect();
        match m.shape() {
            crate::matrix::MaskShape::Grid { .. } => Grid::Matrix(rows),
            crate::matrix::MaskShape::Range { .. } => Grid::Array(rows.into_iter().flatten().collect()),
        }
    }
}

fn write_ints(out: &mut String, xs: &[i64]) {
    out.push('[');
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{x}");
    }
    out.push(']');
}

fn write_grid(out: &mut String, g: &Grid) {
    match g {
        Grid::Array(v) => write_ints(out, v),
        Grid::Matrix(rows) => {
            out.push_str("[\n");
            for (i, r) in rows.iter().enumerate() {
                out.push_str("    ");
                write_ints(out, r);
                out.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
            }
            out.push_str("  ]");
        }
    }
}

/// Writes `"key": value` lines of a flat object, one field per line.
fn write_object(fields: &[(&str, String)]) -> String {
    let mut out = String::from("{\n");
    for (i, (k, v)) in fields.iter().enumerate() {
        let _ = write!(out, "  \"{k}\": {v}");
        out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    out
}

fn grid_text(g: &Grid) -> String {
    let mut s = String::new();
    write_grid(&mut s, g);
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: u32,
    pub kind: Kind,
    /// `[rows of A, cols of A, cols of B]` for matrices, `[n]` for arrays.
    pub dims: Vec<usize>,
    pub entry_bound: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    pub a: Grid,
    pub b: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Grid>,
}

impl InstanceFile {
    pub fn product(kind: Kind, a: &IntMatrix, b: &IntMatrix, entry_bound: i64) -> Self {
        Self {
            format: FORMAT_VERSION,
            kind,
            dims: vec![a.rows(), a.cols(), b.cols()],
            entry_bound,
            m: None,
            a: a.into(),
            b: b.into(),
            c: None,
        }
    }

    pub fn conv(a: &IntArray, b: &IntArray, entry_bound: i64) -> Self {
        Self {
            format: FORMAT_VERSION,
            kind: Kind::Conv,
            dims: vec![a.len()],
            entry_bound,
            m: None,
            a: a.into(),
            b: b.into(),
            c: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text)?;
        f.check()?;
        Ok(f)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical())?;
        Ok(())
    }

    /// Structural checks that do not depend on the algorithms' promises.
    pub fn check(&self) -> Result<()> {
        if self.format != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported format version {}", self.format)));
        }
        if self.entry_bound < 1 {
            return Err(Error::Parse("entry_bound must be at least 1".into()));
        }
        if self.kind.is_verification() != self.c.is_some() {
            return Err(Error::Parse(format!(
                "kind {} {} a c field",
                self.kind,
                if self.c.is_some() { "does not take" } else { "needs" }
            )));
        }
        if self.kind.is_verification() != self.m.is_some() {
            return Err(Error::Parse(format!("field m goes with verification kinds only, got {}", self.kind)));
        }
        if self.kind.is_array() {
            let (a, b) = (self.a.array()?, self.b.array()?);
            let n = a.len();
            if self.dims != [n] || b.len() != n || n == 0 {
                return Err(Error::Parse(format!("array lengths do not match dims {:?}", self.dims)));
            }
            if let Some(c) = &self.c {
                if c.array()?.len() != 2 * n - 1 {
                    return Err(Error::Parse("c must have length 2n - 1".into()));
                }
            }
        } else {
            let (a, b) = (self.a.matrix()?, self.b.matrix()?);
            if self.dims != [a.rows(), a.cols(), b.cols()] || b.rows() != a.cols() {
                return Err(Error::Parse(format!("matrix shapes do not match dims {:?}", self.dims)));
            }
            if let Some(c) = &self.c {
                let c = c.matrix()?;
                if c.rows() != a.rows() || c.cols() != b.cols() {
                    return Err(Error::Parse("c shape does not match dims".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_canonical(&self) -> String {
        let dims: Vec<i64> = self.dims.iter().map(|&d| d as i64).collect();
        let mut fields = vec![
            ("format", self.format.to_string()),
            ("kind", format!("\"{}\"", self.kind)),
            ("dims", {
                let mut s = String::new();
                write_ints(&mut s, &dims);
                s
            }),
            ("entry_bound", self.entry_bound.to_string()),
        ];
        if let Some(m) = self.m {
            fields.push(("m", m.to_string()));
        }
        fields.push(("a", grid_text(&self.a)));
        fields.push(("b", grid_text(&self.b)));
        if let Some(c) = &self.c {
            fields.push(("c", grid_text(c)));
        }
        write_object(&fields)
    }
}

/// What a run produces: a product, a convolution or a witness mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub format: u32,
    pub kind: Kind,
    /// First index of array results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<usize>,
    pub result: Grid,
}

impl OutputFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical())?;
        Ok(())
    }

    pub fn to_canonical(&self) -> String {
        let mut fields = vec![
            ("format", self.format.to_string()),
            ("kind", format!("\"{}\"", self.kind)),
        ];
        if let Some(o) = self.origin {
            fields.push(("origin", o.to_string()));
        }
        fields.push(("result", grid_text(&self.result)));
        write_object(&fields)
    }
}
