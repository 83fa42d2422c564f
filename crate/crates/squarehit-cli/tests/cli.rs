use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squarehit")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn c5_chromatic_numbers() {
    for (m, chi) in [("1", "3"), ("2", "5")] {
        let inst = scratch(&format!("c5_{m}.json"));
        let g = run(&["gen", "--name", "c5_cycle", "--m", m, "--out", inst.to_str().unwrap()]);
        assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
        let s = run(&["solve", "--param", "chi", inst.to_str().unwrap()]);
        assert!(s.status.success());
        assert_eq!(stdout(&s).trim(), chi);
    }
}

#[test]
fn verify_accepts_untouched_and_rejects_edited_results() {
    let inst = scratch("rand.json");
    let res = scratch("rand_hit.json");
    assert!(run(&["gen", "--random", "--n", "20", "--seed", "4", "--out", inst.to_str().unwrap()]).status.success());
    let a = run(&["approx", "--op", "hit", "--mode", "six-point", inst.to_str().unwrap(), "--out", res.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(run(&["verify", res.to_str().unwrap()]).status.success());

    let mut doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&res).unwrap()).unwrap();
    doc["witness"]["data"].as_array_mut().unwrap().pop();
    doc["value"] = (doc["value"].as_u64().unwrap() - 1).into();
    let bad = scratch("rand_hit_bad.json");
    std::fs::write(&bad, serde_json::to_vec(&doc).unwrap()).unwrap();
    let v = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    let msg = stdout(&v);
    assert!(msg.starts_with("rejected:") && !msg.contains("hash"), "{msg}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--param", "kappa"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--name", "no_such_thing"]).status.code(), Some(1));
}

#[test]
fn outputs_are_reproducible() {
    let inst = scratch("det.json");
    let gen = |out: &PathBuf| run(&["gen", "--random", "--n", "15", "--angle-mode", "free", "--side-max", "2", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert!(gen(&inst).status.success());
    let first = std::fs::read(&inst).unwrap();
    assert!(gen(&inst).status.success());
    assert_eq!(first, std::fs::read(&inst).unwrap());

    let solve = || stdout(&run(&["solve", "--param", "tau", "--json", inst.to_str().unwrap()]));
    let (x, y) = (solve(), solve());
    assert_eq!(x, y);
    assert!(!x.contains("runtime_ms"));
}

#[test]
fn certify_and_short_falsify_succeed() {
    let c = run(&["certify", "--hitter", "nine-gon"]);
    assert!(c.status.success(), "{}", stdout(&c));
    let f = run(&["falsify", "--hitter", "six-point", "--budget", "20000", "--angles", "10"]);
    assert!(f.status.success(), "{}", stdout(&f));
}
