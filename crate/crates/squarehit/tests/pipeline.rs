mod common;

use squarehit::approx::{colour_unit_squares, hit_greedy};
use squarehit::constructions::{by_name, k_chain, random_family, AngleMode, ConstructionError, NamedOptions, CHAIN_STEP, NAMES};
use squarehit::hitters::HitterKind;
use squarehit::io::{read_instance, read_result, render_svg, write_document, IoError, Overlay, ResultDocument};
use squarehit::solvers::{exact_tau, Param, Witness};
use squarehit::{Point, SquareFamily};

#[test]
fn named_constructions_verify() {
    for name in NAMES {
        match by_name(name, &NamedOptions::default()) {
            Ok(c) => c.verify().unwrap_or_else(|e| panic!("{name}: {e}")),
            Err(ConstructionError::Degenerate { .. }) if name == "thirteen_square_tau4" => {}
            Err(e) => panic!("{name}: {e}"),
        }
    }
    assert!(matches!(by_name("nope", &NamedOptions::default()), Err(ConstructionError::UnknownName(_))));
}

#[test]
fn four_chain_forces_equal_ends() {
    let path = [Point::ORIGIN, Point::new(2.0 * CHAIN_STEP, 0.0), Point::new(2.0 * CHAIN_STEP, 2.0 * CHAIN_STEP)];
    let c = k_chain(&path, 4, false).unwrap();
    let cols = common::all_colourings(&common::adjacency(&c.family), 4);
    let (x, y) = (c.marked("x").unwrap(), c.marked("y").unwrap());
    assert!(!cols.is_empty());
    assert!(cols.iter().all(|col| col[x] == col[y]));
}

fn hit_document(fam: &SquareFamily) -> ResultDocument {
    let run = hit_greedy(fam, HitterKind::SixPointLeftmost).unwrap();
    let mut doc = ResultDocument::new(fam, "approx-hit", Param::Tau, run.points.len(), false, Witness::Points(run.points.clone()));
    doc.guarantee_bound = Some(run.per_round * run.rounds.len());
    doc.parameters.insert("mode".into(), HitterKind::SixPointLeftmost.to_string());
    doc
}

#[test]
fn result_documents_survive_serialisation_and_reject_tampering() {
    let fam = random_family(18, (1.0, 1.0), AngleMode::UnitRotated, 4.0, 3);
    let doc = hit_document(&fam);
    let bytes = write_document(&doc);
    assert_eq!(read_result(&bytes).unwrap(), doc);

    let mut fewer = doc.clone();
    if let Witness::Points(p) = &mut fewer.witness {
        p.pop();
    }
    fewer.value -= 1;
    assert!(matches!(read_result(&write_document(&fewer)), Err(IoError::WitnessRejected(_))));

    let mut moved = doc.clone();
    moved.instance.squares[0].cx += 0.5;
    assert!(matches!(read_result(&write_document(&moved)), Err(IoError::WitnessRejected(_))));

    let exact = exact_tau(&fam).unwrap();
    let mut claim = ResultDocument::from_exact(&fam, Param::Tau, &exact);
    assert!(read_result(&write_document(&claim)).is_ok());
    claim.value += 1;
    assert!(read_result(&write_document(&claim)).is_err());
}

#[test]
fn colour_documents_replay() {
    let fam = random_family(20, (1.0, 1.0), AngleMode::UnitRotated, 4.0, 8);
    let run = colour_unit_squares(&fam).unwrap();
    let mut doc = ResultDocument::new(&fam, "approx-colour", Param::Chi, run.k_used, false, Witness::Colouring(run.colour_of.clone()));
    doc.guarantee_bound = Some(run.bound);
    assert!(read_result(&write_document(&doc)).is_ok());
    doc.guarantee_bound = Some(run.bound + 1);
    assert!(read_result(&write_document(&doc)).is_err());
}

#[test]
fn schema_errors_carry_positions() {
    let text = b"{\n  \"version\": 1,\n  \"squares\": [\n    {\"cx\": 0, \"cy\": 0, \"side\": 1, \"rot\": 2.0, \"colour\": 3}\n  ]\n}\n";
    match read_instance(text) {
        Err(IoError::SchemaError { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected schema error, got {other:?}"),
    }
    assert!(matches!(read_instance(b"{\"version\": 1, \"squares\": [}"), Err(IoError::ParseError { .. })));
}

fn six_point_figure() -> String {
    let fam = random_family(8, (1.0, 1.0), AngleMode::UnitRotated, 2.5, 11);
    let run = hit_greedy(&fam, HitterKind::SixPointLeftmost).unwrap();
    let mut overlay = Overlay::from_run(&run);
    let pivot = fam.squares[run.rounds[0].pivot];
    overlay.half_disks.push((pivot.centre(), 1.5, -std::f64::consts::FRAC_PI_2));
    render_svg(&fam, &overlay)
}

#[test]
fn six_point_figure_is_stable() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/six_point_overlay.svg");
    let svg = six_point_figure();
    if std::env::var_os("SQUAREHIT_BLESS").is_some() {
        std::fs::write(path, &svg).unwrap();
    }
    let frozen = std::fs::read_to_string(path).expect("run once with SQUAREHIT_BLESS=1 to create the reference");
    assert_eq!(svg, frozen);
    assert_eq!(svg, six_point_figure());
}
