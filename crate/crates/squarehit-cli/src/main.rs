use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use squarehit::approx::{colour_squares, colour_unit_squares, hit_greedy};
use squarehit::constructions::{by_name, random_family, AngleMode, NamedOptions, NAMES};
use squarehit::hitters::{
    cover_check, cover_square_side, falsify_hitter, hitter_points, nine_gon, six_point_hitter, six_point_offset,
    six_point_slacks, FalsifyBudget, HitterKind, NeighbourClass, TWELVE_DISK_CENTRES,
};
use squarehit::io::{
    default_tolerance, instance_hash, read_instance, read_result, render_svg, write_document, InstanceDocument,
    Overlay, ResultDocument,
};
use squarehit::solvers::{exact_chi, exact_nu, exact_tau, solve, Param, SolverLimits, Witness};
use squarehit::{Point, Square, SquareFamily};

#[derive(Parser)]
#[command(name = "squarehit", version, about = "Hitting sets, packings and colourings of squares")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a named construction or a random family as an instance document.
    Gen(GenArgs),
    /// Exact tau, nu, chi, omega or delta.
    Solve(SolveArgs),
    /// Greedy hitting set or degeneracy colouring with a guarantee.
    Approx(ApproxArgs),
    /// Re-check the witness in a result document.
    Verify(VerifyArgs),
    /// Check the stored hitter constants.
    Certify(CertifyArgs),
    /// Search for a neighbour a hitter misses.
    Falsify(FalsifyArgs),
    /// Run exact and greedy solvers on random instances and print a ratio table.
    Bench(BenchArgs),
    /// Draw an instance as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct Output {
    /// Print the full result document instead of the value.
    #[arg(long)]
    json: bool,
    /// Also write the result document to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock runtime in the document (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct GenArgs {
    /// One of the named constructions (see --list).
    #[arg(long, conflicts_with = "random")]
    name: Option<String>,
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    copies: usize,
    #[arg(long, default_value_t = 1.0)]
    shift: f64,
    /// Append the z square to a chain.
    #[arg(long)]
    edge: bool,
    /// Chain path as `x,y;x,y;...`.
    #[arg(long)]
    path: Option<String>,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    side_min: f64,
    #[arg(long, default_value_t = 1.0)]
    side_max: f64,
    #[arg(long, default_value = "unit-rotated")]
    angle_mode: String,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    param: Param,
    /// Instance file; stdin when omitted or `-`.
    input: Option<PathBuf>,
    /// Give up after this many search nodes.
    #[arg(long)]
    node_budget: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Hit,
    Colour,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long, value_enum)]
    op: Op,
    /// Hitter for `hit` (six-point, ten-point, axis4, axis2, twelve) or `unit`/`general` for `colour`.
    #[arg(long)]
    mode: Option<String>,
    input: Option<PathBuf>,
    /// Draw the run to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    input: Option<PathBuf>,
    /// Require the result to refer to this instance.
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Certifiable {
    NineGon,
    SixPoint,
    TwelveCover,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    hitter: Certifiable,
    /// Grid pitch for the cover check.
    #[arg(long, default_value_t = 2e-3)]
    pitch: f64,
}

#[derive(Args)]
struct FalsifyArgs {
    #[arg(long)]
    hitter: HitterKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Total neighbour evaluations, split across the pivot angles.
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
    #[arg(long, default_value_t = 100)]
    angles: usize,
    /// Largest neighbour side, relative to the pivot, for hitters that allow larger neighbours.
    #[arg(long, default_value_t = 4.0)]
    max_factor: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Number of instances.
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Squares per instance.
    #[arg(long, default_value_t = 12)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "unit-rotated")]
    angle_mode: String,
    /// Hitter; defaults to six-point for unit families and ten-point otherwise.
    #[arg(long)]
    mode: Option<HitterKind>,
}

#[derive(Args)]
struct RenderArgs {
    input: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Overlay a greedy hitting run.
    #[arg(long)]
    hit: Option<HitterKind>,
    /// Fill squares by a degeneracy colouring.
    #[arg(long)]
    colour: bool,
}

fn read_bytes(path: &Option<PathBuf>) -> Result<Vec<u8>> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).context("reading stdin")?;
            Ok(buf)
        }
    }
}

fn load(path: &Option<PathBuf>) -> Result<SquareFamily> {
    Ok(read_instance(&read_bytes(path)?)?)
}

fn emit(bytes: &[u8], out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(bytes).context("writing stdout"),
    }
}

fn finish(doc: ResultDocument, output: &Output) -> Result<ExitCode> {
    let bytes = write_document(&doc);
    if let Some(p) = &output.out {
        std::fs::write(p, &bytes).with_context(|| format!("writing {}", p.display()))?;
    }
    if output.json {
        emit(&bytes, &None)?;
    } else {
        println!("{}", doc.value);
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_path(s: &str) -> Result<Vec<Point>> {
    s.split(';')
        .map(|pair| {
            let (x, y) = pair.split_once(',').with_context(|| format!("bad path vertex '{pair}'"))?;
            Ok(Point::new(x.trim().parse()?, y.trim().parse()?))
        })
        .collect()
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    if a.list {
        for n in NAMES {
            println!("{n}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let doc = if a.random {
        let mode: AngleMode = a.angle_mode.parse().map_err(anyhow::Error::msg)?;
        let window = a.window.unwrap_or_else(|| (a.n as f64).sqrt() * 1.2);
        let mut fam = random_family(a.n, (a.side_min, a.side_max), mode, window, a.seed);
        fam.tol = default_tolerance();
        let mut d = InstanceDocument::from_family(&fam);
        d.name = Some(format!("random_{}_n{}_seed{}", a.angle_mode, a.n, a.seed));
        d
    } else {
        let Some(name) = a.name else { bail!("give --name, --random or --list") };
        let mut opts = NamedOptions { m: a.m, k: a.k, copies: a.copies, shift: a.shift, edge: a.edge, ..Default::default() };
        if let Some(p) = &a.path {
            opts.path = parse_path(p)?;
        }
        let c = by_name(&name, &opts)?;
        let mut d = InstanceDocument::from_family(&c.family);
        d.name = Some(c.name);
        d
    };
    emit(&write_document(&doc), &a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(a: SolveArgs) -> Result<ExitCode> {
    let fam = load(&a.input)?;
    let limits = SolverLimits { node_budget: a.node_budget, ..SolverLimits::default() };
    let t = Instant::now();
    let r = solve(&fam, a.param, &limits)?;
    let mut doc = ResultDocument::from_exact(&fam, a.param, &r);
    doc.parameters.insert("param".into(), a.param.to_string());
    doc.parameters.insert("nodes_explored".into(), r.nodes_explored.to_string());
    if a.output.timing {
        doc.runtime_ms = Some(t.elapsed().as_secs_f64() * 1e3);
    }
    finish(doc, &a.output)
}

fn approx_cmd(a: ApproxArgs) -> Result<ExitCode> {
    let fam = load(&a.input)?;
    let t = Instant::now();
    let (mut doc, overlay) = match a.op {
        Op::Hit => {
            let mode: HitterKind = a.mode.as_deref().unwrap_or("ten-point").parse().map_err(anyhow::Error::msg)?;
            let run = hit_greedy(&fam, mode)?;
            let mut doc = ResultDocument::new(
                &fam,
                "approx-hit",
                Param::Tau,
                run.points.len(),
                false,
                Witness::Points(run.points.clone()),
            );
            doc.guarantee_bound = Some(run.per_round * run.rounds.len());
            doc.parameters.insert("mode".into(), mode.to_string());
            doc.parameters.insert("rounds".into(), run.rounds.len().to_string());
            let pivots: Vec<String> = run.pivots().iter().map(|p| p.to_string()).collect();
            doc.parameters.insert("pivots".into(), pivots.join(","));
            (doc, Overlay::from_run(&run))
        }
        Op::Colour => {
            let run = match a.mode.as_deref() {
                Some("unit") => colour_unit_squares(&fam)?,
                Some("general") => colour_squares(&fam),
                Some(other) => bail!("unknown colour mode '{other}' (expected unit or general)"),
                None => colour_unit_squares(&fam).unwrap_or_else(|_| colour_squares(&fam)),
            };
            let mut doc = ResultDocument::new(
                &fam,
                "approx-colour",
                Param::Chi,
                run.k_used,
                false,
                Witness::Colouring(run.colour_of.clone()),
            );
            doc.guarantee_bound = Some(run.bound);
            let order: Vec<String> = run.order.iter().map(|p| p.to_string()).collect();
            doc.parameters.insert("order".into(), order.join(","));
            let overlay = Overlay { colouring: Some(run.colour_of), ..Default::default() };
            (doc, overlay)
        }
    };
    if let Some(p) = &a.svg {
        std::fs::write(p, render_svg(&fam, &overlay)).with_context(|| format!("writing {}", p.display()))?;
    }
    if a.output.timing {
        doc.runtime_ms = Some(t.elapsed().as_secs_f64() * 1e3);
    }
    finish(doc, &a.output)
}

fn verify_cmd(a: VerifyArgs) -> Result<ExitCode> {
    let bytes = read_bytes(&a.input)?;
    let doc = match read_result(&bytes) {
        Ok(d) => d,
        Err(e) => {
            println!("rejected: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    if let Some(p) = &a.instance {
        let fam = load(&Some(p.clone()))?;
        let h = instance_hash(&fam);
        if h != doc.instance_hash {
            println!("rejected: result is for instance {}, not {h}", doc.instance_hash);
            return Ok(ExitCode::from(1));
        }
    }
    println!("accepted: {} {} = {}", doc.operation, doc.quantity, doc.value);
    Ok(ExitCode::SUCCESS)
}

fn certify_cmd(a: CertifyArgs) -> Result<ExitCode> {
    let tol = default_tolerance();
    let (ok, report) = match a.hitter {
        Certifiable::NineGon => {
            let cfg = nine_gon();
            let r = cfg.certify(tol);
            let gaps = cfg.gaps();
            let widest = gaps.iter().cloned().fold(0.0, f64::max);
            let ok = r.is_certified() && r.margin() >= 1e-4 && widest < 1.0;
            (ok, json!({ "hitter": "nine-gon", "certified": r.is_certified(), "margin": r.margin(),
                         "angles": cfg.angles, "gaps": gaps, "widest_gap": widest }))
        }
        Certifiable::SixPoint => {
            let s = six_point_slacks();
            let ok = s.iter().all(|&x| x >= -1e-12);
            (ok, json!({ "hitter": "six-point", "offset": six_point_offset(), "slacks": s, "certified": ok }))
        }
        Certifiable::TwelveCover => {
            let c: Vec<Point> = TWELVE_DISK_CENTRES.iter().map(|&(x, y)| Point::new(x, y)).collect();
            let r = cover_check(&c, 0.5, cover_square_side(), a.pitch, tol)?;
            (r.covered, json!({ "hitter": "twelve-cover", "covered": r.covered, "margin": r.margin, "pitch": r.pitch }))
        }
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn falsify_cmd(a: FalsifyArgs) -> Result<ExitCode> {
    let tol = default_tolerance();
    let angles = a.angles.max(1);
    let per = FalsifyBudget::samples(a.budget / angles);
    let found: Vec<(usize, Square)> = (0..angles)
        .into_par_iter()
        .filter_map(|i| {
            let rot = std::f64::consts::FRAC_PI_2 * i as f64 / angles as f64;
            let pivot = Square::new(Point::ORIGIN, 1.0, rot).ok()?;
            let pts = match a.hitter {
                HitterKind::AxisParallel4 | HitterKind::AxisParallelLeftmost2 if i > 0 => return None,
                HitterKind::SixPointLeftmost => six_point_hitter(&pivot),
                k => hitter_points(k, &pivot, tol).ok()?,
            };
            let class = NeighbourClass::for_kind(a.hitter, &pivot, a.max_factor);
            falsify_hitter(&pivot, &pts, &class, per, a.seed.wrapping_add(i as u64), tol).map(|s| (i, s))
        })
        .collect();
    let samples = per.total() * angles;
    if let Some((i, s)) = found.first() {
        println!(
            "counterexample at pivot angle #{i}: square centre ({}, {}) side {} rot {} ({} of {} angles failed, {samples} samples)",
            s.centre().x,
            s.centre().y,
            s.side(),
            s.rot(),
            found.len(),
            angles
        );
        return Ok(ExitCode::from(1));
    }
    println!("no missed neighbour: {} over {angles} pivot angles, {samples} samples", a.hitter);
    Ok(ExitCode::SUCCESS)
}

struct BenchRow {
    n: usize,
    nu: usize,
    tau: usize,
    hit: usize,
    bound: usize,
    chi: usize,
    colours: usize,
}

fn bench_cmd(a: BenchArgs) -> Result<ExitCode> {
    let angle: AngleMode = a.angle_mode.parse().map_err(anyhow::Error::msg)?;
    let mode = a.mode.unwrap_or(match angle {
        AngleMode::UnitRotated => HitterKind::SixPointLeftmost,
        AngleMode::Axis => HitterKind::AxisParallel4,
        AngleMode::Free => HitterKind::TenPoint,
    });
    let sides = if angle == AngleMode::UnitRotated { (1.0, 1.0) } else { (0.5, 2.0) };
    let window = (a.size as f64).sqrt() * 1.2;
    let rows: Vec<Result<BenchRow>> = (0..a.n)
        .into_par_iter()
        .map(|i| {
            let mut fam = random_family(a.size, sides, angle, window, a.seed.wrapping_add(i as u64));
            fam.tol = default_tolerance();
            let run = hit_greedy(&fam, mode)?;
            let colours = if angle == AngleMode::UnitRotated { colour_unit_squares(&fam)? } else { colour_squares(&fam) };
            Ok(BenchRow {
                n: fam.len(),
                nu: exact_nu(&fam)?.value,
                tau: exact_tau(&fam)?.value,
                hit: run.points.len(),
                bound: mode.points_per_pivot(),
                chi: exact_chi(&fam)?.value,
                colours: colours.k_used,
            })
        })
        .collect();
    let mut bad = 0;
    println!("# mode {mode}, {} instances of {} squares, seed {}", a.n, a.size, a.seed);
    println!("idx\tn\tnu\ttau\thit\ttau/nu\thit/nu\tbound\tchi\tcolours");
    for (i, r) in rows.into_iter().enumerate() {
        let r = r?;
        let ok = r.hit >= r.tau && r.hit <= r.bound * r.nu && r.colours >= r.chi;
        if !ok {
            bad += 1;
        }
        println!(
            "{i}\t{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{}\t{}\t{}{}",
            r.n,
            r.nu,
            r.tau,
            r.hit,
            r.tau as f64 / r.nu as f64,
            r.hit as f64 / r.nu as f64,
            r.bound,
            r.chi,
            r.colours,
            if ok { "" } else { "\tVIOLATION" }
        );
    }
    Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn render_cmd(a: RenderArgs) -> Result<ExitCode> {
    let fam = load(&a.input)?;
    let mut overlay = match a.hit {
        Some(mode) => Overlay::from_run(&hit_greedy(&fam, mode)?),
        None => Overlay::default(),
    };
    if a.colour {
        overlay.colouring = Some(colour_squares(&fam).colour_of);
    }
    std::fs::write(&a.out, render_svg(&fam, &overlay)).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Solve(a) => solve_cmd(a),
        Cmd::Approx(a) => approx_cmd(a),
        Cmd::Verify(a) => verify_cmd(a),
        Cmd::Certify(a) => certify_cmd(a),
        Cmd::Falsify(a) => falsify_cmd(a),
        Cmd::Bench(a) => bench_cmd(a),
        Cmd::Render(a) => render_cmd(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
