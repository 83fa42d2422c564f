//! Instance and result documents (JSON) and SVG export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{colour_squares, colour_unit_squares, hit_greedy, ColouringRun, HittingRun};
use crate::hitters::HitterKind;
use crate::geometry::{Point, Square, SquareFamily, Tolerance};
use crate::solvers::{validate_witness, ExactResult, Param, Witness};

pub const FORMAT_VERSION: u32 = 1;

/// Environment variable that overrides the default tolerance for documents without one.
pub const TOLERANCE_ENV: &str = "SQUAREHIT_EPS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    ParseError { line: usize, column: usize, msg: String },
    #[error("schema error at line {line}, column {column}: {msg}")]
    SchemaError { line: usize, column: usize, msg: String },
    #[error("witness rejected: {0}")]
    WitnessRejected(String),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let (line, column, msg) = (e.line(), e.column(), e.to_string());
        // serde_json appends " at line L column C"; drop it since we report it ourselves.
        let msg = match msg.rfind(" at line ") {
            Some(i) => msg[..i].to_string(),
            None => msg,
        };
        if e.is_data() {
            IoError::SchemaError { line, column, msg }
        } else {
            IoError::ParseError { line, column, msg }
        }
    }
}

fn finite<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(serde::de::Error::custom("value must be finite"))
    }
}

fn positive<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("field `side` must be positive, got {v}")))
    }
}

fn version<'de, D: serde::Deserializer<'de>>(d: D) -> Result<u32, D::Error> {
    let v = u32::deserialize(d)?;
    if v == FORMAT_VERSION {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("unsupported version {v}, expected {FORMAT_VERSION}")))
    }
}

fn tolerance<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    match Option::<f64>::deserialize(d)? {
        None => Ok(None),
        Some(e) => Tolerance::new(e).map(|t| Some(t.eps())).map_err(serde::de::Error::custom),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareRecord {
    #[serde(deserialize_with = "finite")]
    pub cx: f64,
    #[serde(deserialize_with = "finite")]
    pub cy: f64,
    #[serde(deserialize_with = "positive")]
    pub side: f64,
    /// Rotation in radians; omitted means axis-parallel.
    #[serde(default, deserialize_with = "finite")]
    pub rot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(deserialize_with = "version")]
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub squares: Vec<SquareRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "tolerance")]
    pub tolerance: Option<f64>,
}

impl InstanceDocument {
    pub fn from_family(fam: &SquareFamily) -> Self {
        let squares = fam
            .iter()
            .map(|s| SquareRecord { cx: s.centre().x, cy: s.centre().y, side: s.side(), rot: s.rot() })
            .collect();
        let tol = (fam.tol != Tolerance::default()).then(|| fam.tol.eps());
        InstanceDocument { version: FORMAT_VERSION, name: None, squares, tolerance: tol }
    }

    pub fn to_family(&self) -> Result<SquareFamily, IoError> {
        let tol = match self.tolerance {
            Some(e) => Tolerance::new(e).map_err(|e| schema(format!("tolerance: {e}")))?,
            None => default_tolerance(),
        };
        let squares = self
            .squares
            .iter()
            .enumerate()
            .map(|(i, r)| {
                Square::new(Point::new(r.cx, r.cy), r.side, r.rot).map_err(|e| schema(format!("squares[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SquareFamily::with_tol(squares, tol))
    }
}

fn schema(msg: String) -> IoError {
    IoError::SchemaError { line: 0, column: 0, msg }
}

/// The default tolerance, or the value of `SQUAREHIT_EPS` when it is set and valid.
pub fn default_tolerance() -> Tolerance {
    std::env::var(TOLERANCE_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .and_then(|e| Tolerance::new(e).ok())
        .unwrap_or_default()
}

pub fn read_instance(bytes: &[u8]) -> Result<SquareFamily, IoError> {
    parse_instance(bytes)?.to_family()
}

pub fn parse_instance(bytes: &[u8]) -> Result<InstanceDocument, IoError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn write_instance(fam: &SquareFamily) -> Vec<u8> {
    write_document(&InstanceDocument::from_family(fam))
}

pub fn write_document<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("documents serialize");
    out.push(b'\n');
    out
}

/// FNV-1a over the canonical instance bytes, as 16 hex digits.
pub fn instance_hash(fam: &SquareFamily) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in write_instance(fam) {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub version: u32,
    pub instance_hash: String,
    /// e.g. `solve`, `approx-hit`, `approx-colour`.
    pub operation: String,
    /// Which quantity `value` bounds or equals; fixes how the witness is checked.
    pub quantity: Param,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    pub value: usize,
    /// True when `value` is the exact optimum.
    pub optimal: bool,
    pub witness: Witness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guarantee_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
    pub instance: InstanceDocument,
}

impl ResultDocument {
    pub fn new(fam: &SquareFamily, operation: &str, quantity: Param, value: usize, optimal: bool, witness: Witness) -> Self {
        ResultDocument {
            version: FORMAT_VERSION,
            instance_hash: instance_hash(fam),
            operation: operation.into(),
            quantity,
            parameters: BTreeMap::new(),
            value,
            optimal,
            witness,
            guarantee_bound: None,
            seed: None,
            runtime_ms: None,
            instance: InstanceDocument::from_family(fam),
        }
    }

    pub fn from_exact(fam: &SquareFamily, quantity: Param, r: &ExactResult) -> Self {
        ResultDocument::new(fam, "solve", quantity, r.value, r.optimal, r.witness.clone())
    }

    /// Checks the hash and re-validates the witness against the embedded instance.
    pub fn validate(&self) -> Result<SquareFamily, IoError> {
        let fam = self.instance.to_family()?;
        let h = instance_hash(&fam);
        if h != self.instance_hash {
            return Err(IoError::WitnessRejected(format!("instance hash {h} does not match {}", self.instance_hash)));
        }
        let res = ExactResult { value: self.value, witness: self.witness.clone(), optimal: self.optimal, nodes_explored: 0 };
        if !validate_witness(&fam, self.quantity, &res) {
            return Err(IoError::WitnessRejected(format!("{} witness does not certify value {}", self.quantity, self.value)));
        }
        if let Some(b) = self.guarantee_bound {
            if self.value > b {
                return Err(IoError::WitnessRejected(format!("value {} exceeds guarantee bound {b}", self.value)));
            }
        }
        self.replay(&fam)?;
        Ok(fam)
    }

    /// Greedy runs are deterministic, so their documents must match a fresh run exactly.
    fn replay(&self, fam: &SquareFamily) -> Result<(), IoError> {
        let reject = |what: &str| Err(IoError::WitnessRejected(format!("{what} differs from a fresh {} run", self.operation)));
        match self.operation.as_str() {
            "approx-hit" => {
                let mode: HitterKind = self
                    .parameters
                    .get("mode")
                    .ok_or_else(|| IoError::WitnessRejected("missing mode parameter".into()))?
                    .parse()
                    .map_err(IoError::WitnessRejected)?;
                let run = hit_greedy(fam, mode).map_err(|e| IoError::WitnessRejected(e.to_string()))?;
                if self.witness != Witness::Points(run.points.clone()) {
                    return reject("hitting set");
                }
                if self.guarantee_bound != Some(run.per_round * run.rounds.len()) {
                    return reject("guarantee bound");
                }
            }
            "approx-colour" => {
                let unit = colour_unit_squares(fam);
                let general = colour_squares(fam);
                let same = |r: &ColouringRun| {
                    self.witness == Witness::Colouring(r.colour_of.clone()) && self.guarantee_bound == Some(r.bound)
                };
                if !unit.as_ref().is_ok_and(same) && !same(&general) {
                    return reject("colouring");
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parses a result document and re-validates its witness.
pub fn read_result(bytes: &[u8]) -> Result<ResultDocument, IoError> {
    let doc: ResultDocument = serde_json::from_slice(bytes)?;
    doc.validate()?;
    Ok(doc)
}

/// Extra drawing on top of the squares.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overlay {
    /// Points with an optional label drawn next to each.
    pub points: Vec<(Point, String)>,
    /// Colour class per square.
    pub colouring: Option<Vec<usize>>,
    /// Squares drawn with a heavy outline.
    pub highlighted: Vec<usize>,
    /// Translucent disks `(centre, radius)`.
    pub disks: Vec<(Point, f64)>,
    /// Outlined half-disks `(centre, radius, start angle)` covering `[start, start + π]`.
    pub half_disks: Vec<(Point, f64, f64)>,
    pub triangles: Vec<[Point; 3]>,
}

impl Overlay {
    /// Pivots highlighted and every point labelled with its round number (from 1).
    pub fn from_run(run: &HittingRun) -> Self {
        let mut o = Overlay::default();
        for (k, r) in run.rounds.iter().enumerate() {
            o.highlighted.push(r.pivot);
            o.points.extend(r.points.iter().map(|&p| (p, (k + 1).to_string())));
        }
        o
    }
}

pub const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" { "0.0000".into() } else { s }
}

/// Deterministic SVG 1.1; y grows upwards in the drawing.
pub fn render_svg(fam: &SquareFamily, overlay: &Overlay) -> String {
    let mut lo = Point::new(-1.0, -1.0);
    let mut hi = Point::new(1.0, 1.0);
    if let Some((a, b)) = fam.bounds() {
        (lo, hi) = (a, b);
    }
    for &(p, _) in &overlay.points {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = 0.05 * (hi.x - lo.x).max(hi.y - lo.y).max(1e-6);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let scale = 600.0 / w.max(h);
    let tx = |p: Point| ((p.x - lo.x + pad) * scale, (hi.y + pad - p.y) * scale);
    let stroke = 1.5;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(w * scale),
        num(h * scale),
        num(w * scale),
        num(h * scale)
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, sq) in fam.iter().enumerate() {
        let pts: Vec<String> = sq
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = tx(v);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let (fill, opacity) = match &overlay.colouring {
            Some(c) => (PALETTE[c.get(i).copied().unwrap_or(0) % PALETTE.len()], 0.35),
            None => ("#4e79a7", 0.08),
        };
        let width = if overlay.highlighted.contains(&i) { 3.0 * stroke } else { stroke };
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{fill}" fill-opacity="{opacity}" stroke="black" stroke-width="{width}"/>"#,
            pts.join(" ")
        );
    }
    for &(c, r) in &overlay.disks {
        let (x, y) = tx(c);
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{}" fill="#59a14f" fill-opacity="0.2" stroke="#59a14f"/>"##,
            num(x),
            num(y),
            num(r * scale)
        );
    }
    for &(c, r, a) in &overlay.half_disks {
        let (x0, y0) = tx(c + Point::polar(r, a));
        let (x1, y1) = tx(c + Point::polar(r, a + std::f64::consts::PI));
        let rr = num(r * scale);
        let _ = writeln!(
            s,
            r##"<path d="M {} {} A {rr} {rr} 0 0 0 {} {} Z" fill="none" stroke="#e15759" stroke-dasharray="4 3"/>"##,
            num(x0),
            num(y0),
            num(x1),
            num(y1)
        );
    }
    for t in &overlay.triangles {
        let pts: Vec<String> = t
            .iter()
            .map(|&v| {
                let (x, y) = tx(v);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#edc948" fill-opacity="0.3" stroke="#edc948"/>"##,
            pts.join(" ")
        );
    }
    for (p, label) in &overlay.points {
        let (x, y) = tx(*p);
        let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="4" fill="black"/>"#, num(x), num(y));
        if !label.is_empty() {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{label}</text>"#,
                num(x + 5.0),
                num(y - 5.0)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
