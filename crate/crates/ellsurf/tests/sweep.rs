use std::fs;

use ellsurf::sweep::{self, FamilySpec, CSV_COLUMNS};
use tempfile::TempDir;

fn family() -> FamilySpec {
    FamilySpec { p: 5, a4_degree: 1, a6_degree: 1, orbits: true, random: None, weights: vec![3] }
}

fn truncate_mid_record(path: &std::path::Path, keep_lines: usize) {
    let text = fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut cut: String = lines[..keep_lines].iter().map(|l| format!("{}\n", l)).collect();
    cut.push_str(&lines[keep_lines][..lines[keep_lines].len() / 2]);
    fs::write(path, cut).unwrap();
}

#[test]
fn jsonl_sweep_resumes_to_the_same_file() {
    let dir = TempDir::new().unwrap();
    let full = dir.path().join("full.jsonl");
    let s = sweep::sweep(&family(), &full, 4).unwrap();
    assert!(s.curves > 0);
    assert_eq!(s.computed, s.curves);
    assert_eq!(s.errors, 0);
    assert_eq!(s.all_pass, s.curves);
    let again = sweep::sweep(&family(), &full, 4).unwrap();
    assert_eq!((again.computed, again.resumed), (0, s.curves));

    let part = dir.path().join("part.jsonl");
    fs::copy(&full, &part).unwrap();
    truncate_mid_record(&part, s.curves / 2);
    let resumed = sweep::sweep(&family(), &part, 3).unwrap();
    assert_eq!(resumed.resumed, s.curves / 2);
    assert_eq!(fs::read(&full).unwrap(), fs::read(&part).unwrap());
}

#[test]
fn csv_sweep_resumes_to_the_same_file() {
    let dir = TempDir::new().unwrap();
    let full = dir.path().join("full.csv");
    let s = sweep::sweep(&family(), &full, 8).unwrap();
    let text = fs::read_to_string(&full).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(text.lines().count(), s.curves + 1);
    let part = dir.path().join("part.csv");
    fs::copy(&full, &part).unwrap();
    truncate_mid_record(&part, 3);
    sweep::sweep(&family(), &part, 8).unwrap();
    assert_eq!(fs::read(&full).unwrap(), fs::read(&part).unwrap());
}

#[test]
fn random_draws_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let fam = FamilySpec { p: 7, a4_degree: 1, a6_degree: 2, orbits: false, random: Some(sweep::RandomDraw { count: 3, seed: 9 }), weights: vec![] };
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    sweep::sweep(&fam, &a, 2).unwrap();
    sweep::sweep(&fam, &b, 1).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let parsed: FamilySpec = serde_json::from_str(&serde_json::to_string(&fam).unwrap()).unwrap();
    assert_eq!(parsed, fam);
}
