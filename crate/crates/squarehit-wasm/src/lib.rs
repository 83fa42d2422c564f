//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Each export takes and returns JSON strings; the `*_impl` functions hold the logic so
//! they can be tested natively.

use serde_json::json;
use wasm_bindgen::prelude::*;

use squarehit::approx::{colour_squares, colour_unit_squares, hit_greedy};
use squarehit::constructions::{by_name, random_family, AngleMode, NamedOptions, NAMES};
use squarehit::hitters::HitterKind;
use squarehit::io::{read_instance, render_svg, write_document, InstanceDocument, Overlay};
use squarehit::solvers::{solve, Param, SolverLimits, Witness};
use squarehit::SquareFamily;

/// Largest family the page will hand to the exact solvers.
pub const DEMO_EXACT_LIMIT: usize = 40;

fn instance_json(fam: &SquareFamily, name: String) -> String {
    let mut d = InstanceDocument::from_family(fam);
    d.name = Some(name);
    String::from_utf8(write_document(&d)).expect("utf-8 json")
}

pub fn names_impl() -> String {
    NAMES.join(",")
}

pub fn generate_impl(name: &str, m: usize) -> Result<String, String> {
    let opts = NamedOptions { m: m.max(1), ..Default::default() };
    let c = by_name(name, &opts).map_err(|e| e.to_string())?;
    Ok(instance_json(&c.family, c.name))
}

pub fn random_impl(n: usize, mode: &str, seed: u64) -> Result<String, String> {
    let mode: AngleMode = mode.parse()?;
    let sides = if mode == AngleMode::UnitRotated { (1.0, 1.0) } else { (0.5, 2.0) };
    let fam = random_family(n, sides, mode, (n as f64).sqrt() * 1.2, seed);
    Ok(instance_json(&fam, format!("random n={n} seed={seed}")))
}

fn load(instance: &str) -> Result<SquareFamily, String> {
    read_instance(instance.as_bytes()).map_err(|e| e.to_string())
}

pub fn render_impl(instance: &str) -> Result<String, String> {
    Ok(render_svg(&load(instance)?, &Overlay::default()))
}

pub fn exact_impl(instance: &str, param: &str) -> Result<String, String> {
    let fam = load(instance)?;
    if fam.len() > DEMO_EXACT_LIMIT {
        return Err(format!("exact solvers are limited to {DEMO_EXACT_LIMIT} squares in the demo"));
    }
    let param: Param = param.parse()?;
    let r = solve(&fam, param, &SolverLimits::default()).map_err(|e| e.to_string())?;
    let mut o = Overlay::default();
    match &r.witness {
        Witness::Points(p) => o.points = p.iter().map(|&q| (q, String::new())).collect(),
        Witness::Point(p) => o.points = vec![(*p, String::new())],
        Witness::Subfamily(s) => o.highlighted = s.clone(),
        Witness::Colouring(c) => o.colouring = Some(c.clone()),
    }
    Ok(json!({ "param": param.to_string(), "value": r.value, "svg": render_svg(&fam, &o) }).to_string())
}

pub fn hit_impl(instance: &str, mode: &str) -> Result<String, String> {
    let fam = load(instance)?;
    let mode: HitterKind = mode.parse()?;
    let run = hit_greedy(&fam, mode).map_err(|e| e.to_string())?;
    Ok(json!({
        "points": run.points.len(),
        "rounds": run.rounds.len(),
        "bound": run.per_round * run.rounds.len(),
        "svg": render_svg(&fam, &Overlay::from_run(&run)),
    })
    .to_string())
}

pub fn colour_impl(instance: &str) -> Result<String, String> {
    let fam = load(instance)?;
    let (run, rule) = match colour_unit_squares(&fam) {
        Ok(r) => (r, "leftmost order (6Δ)"),
        Err(_) => (colour_squares(&fam), "min-degree order (9(Δ−1))"),
    };
    let o = Overlay { colouring: Some(run.colour_of.clone()), ..Default::default() };
    Ok(json!({ "colours": run.k_used, "bound": run.bound, "rule": rule, "svg": render_svg(&fam, &o) }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn construction_names() -> String {
    names_impl()
}

#[wasm_bindgen]
pub fn generate(name: &str, m: usize) -> Result<String, JsError> {
    js(generate_impl(name, m))
}

#[wasm_bindgen]
pub fn random_instance(n: usize, mode: &str, seed: u64) -> Result<String, JsError> {
    js(random_impl(n, mode, seed))
}

#[wasm_bindgen]
pub fn render(instance: &str) -> Result<String, JsError> {
    js(render_impl(instance))
}

#[wasm_bindgen]
pub fn exact(instance: &str, param: &str) -> Result<String, JsError> {
    js(exact_impl(instance, param))
}

#[wasm_bindgen]
pub fn greedy_hit(instance: &str, mode: &str) -> Result<String, JsError> {
    js(hit_impl(instance, mode))
}

#[wasm_bindgen]
pub fn colour(instance: &str) -> Result<String, JsError> {
    js(colour_impl(instance))
}
