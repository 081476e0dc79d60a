use clap::Parser;

use super::*;

fn report(args: &[&str]) -> Report {
    let cli = Cli::try_parse_from(std::iter::once("lab").chain(args.iter().copied())).unwrap();
    run(&cli).unwrap()
}

fn status_of<'a>(r: &'a Report, name: &str) -> &'a Status {
    &r.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("no check {name}")).status
}

#[test]
fn settings_fall_back_to_the_file() {
    let s = Settings::parse("# comment\nseed = 9\nr-max=4\n\nformat = JSON\n").unwrap();
    assert_eq!(s.get(None, "seed", 0u64).unwrap(), 9);
    assert_eq!(s.get(Some(3u64), "seed", 0).unwrap(), 3);
    assert_eq!(s.get(None, "r_max", 0u64).unwrap(), 4);
    assert_eq!(s.get(None, "missing", 7u64).unwrap(), 7);
    assert_eq!(s.value_enum(None, "format", Format::Csv).unwrap(), Format::Json);
    assert!(Settings::parse("just a line").is_err());
    assert!(Settings::parse("seed = x").unwrap().get(None, "seed", 0u64).is_err());
}

#[test]
fn csv_has_two_tables() {
    let mut r = Report::new("demo", &["a", "b"]);
    r.row(vec!["1/2".into(), "x, y".into()]);
    r.check("ok", true, "fine");
    assert_eq!(r.to_csv().unwrap(), "a,b\n1/2,\"x, y\"\n\ncheck,status,detail\nok,pass,fine\n");
    assert_eq!(r.exit_code(), 0);
    r.note("search", Status::Unknown, "");
    assert_eq!(r.exit_code(), 2);
    r.check("bad", false, "");
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn info_does_not_change_the_status() {
    let mut r = Report::new("demo", &[]);
    r.note("slope", Status::Info, "3.9");
    assert_eq!(r.status(), Status::Pass);
    let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(json["status"], "pass");
    assert_eq!(json["checks"][0]["status"], "info");
}

#[test]
fn absorb_only_takes_budget_errors() {
    let mut r = Report::new("demo", &[]);
    r.absorb("x", Error::Exhausted { nodes: 3 }).unwrap();
    assert_eq!(r.status(), Status::Unknown);
    assert!(r.absorb("y", Error::Invalid("no".into())).is_err());
}

#[test]
fn balls_in_z2() {
    let r = report(&["balls", "--group", "zd", "--max", "6"]);
    assert_eq!(r.rows[3], vec!["3", "25"]);
    assert_eq!(status_of(&r, "matches_2n2_plus_2n_plus_1"), &Status::Pass);
}

#[test]
fn balls_in_the_free_group() {
    let r = report(&["balls", "--group", "free", "--max", "4"]);
    assert_eq!(r.rows[2], vec!["2", "17"]);
    assert_eq!(r.status(), Status::Pass);
}

#[test]
fn balls_over_budget_is_unknown() {
    let r = report(&["balls", "--max", "30", "--budget", "1000"]);
    assert_eq!(r.exit_code(), 2);
}

#[test]
fn avgseq_rows() {
    let r = report(&["avgseq"]);
    let n: Vec<&str> = r.rows.iter().map(|row| row[2].as_str()).collect();
    assert_eq!(n, ["1", "6", "9", "108", "135", "162", "189", "4536"]);
    assert_eq!(r.status(), Status::Pass);
}

#[test]
fn mset_rows() {
    let r = report(&["mset", "--r-hi", "3"]);
    assert_eq!(r.rows[0], vec!["0", "1", "0", "0", "-", "-", "-"]);
    assert_eq!(r.rows[2][1], "9");
    assert_eq!(r.status(), Status::Pass);
}

#[test]
fn mset_needs_heisenberg() {
    let cli = Cli::try_parse_from(["lab", "mset", "--group", "zd"]).unwrap();
    assert!(matches!(run(&cli), Err(Error::GroupMismatch(_))));
}

#[test]
fn incremental_in_z_needs_k_at_most_two() {
    let r = report(&["incremental", "--group", "zd", "--rank", "1", "--k", "2", "--r-max", "3"]);
    assert_eq!(r.status(), Status::Pass);
    let r = report(&["incremental", "--group", "zd", "--rank", "1", "--k", "3", "--r-max", "3"]);
    assert_eq!(r.exit_code(), 2);
}

#[test]
fn hopf_identical_functions() {
    let r = report(&["hopf", "--phi", "0:1,2:3", "--psi", "0:1,2:3", "--hi", "5"]);
    assert!(r.rows.iter().all(|row| row[4] == "1"));
    assert_eq!(r.status(), Status::Pass);
}

#[test]
fn hopf_random_systems_follow_the_seed() {
    let a = report(&["hopf", "--systems", "3", "--seed", "5"]);
    let b = report(&["hopf", "--systems", "3", "--seed", "5"]);
    let c = report(&["hopf", "--systems", "3", "--seed", "6"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.status(), Status::Pass);
}

#[test]
fn maximal_equal_functions_give_full_mass_below_one() {
    let r = report(&["maximal", "--phi", "0:1,1:2", "--psi", "0:1,1:2", "--grid", "1/2,1,2"]);
    assert_eq!(r.rows[0][1], "3");
    assert_eq!(r.rows[1][1], "0");
    assert_eq!(r.status(), Status::Pass);
}

#[test]
fn maximal_rejects_signed_functions() {
    let cli = Cli::try_parse_from(["lab", "maximal", "--phi", "0:-1"]).unwrap();
    assert!(matches!(run(&cli), Err(Error::Invalid(_))));
}

#[test]
fn stack_two_stages() {
    let r = report(&["stack", "--stages", "2"]);
    assert_eq!(r.rows[1][1], "4");
    assert_eq!(r.rows[1][7], "3/2");
    assert_eq!(r.status(), Status::Pass);
}

#[test]
fn snapshot_paths() {
    let out = Path::new("/x/run.csv");
    assert_eq!(snapshot_path(None, Some(out), 2), Some(PathBuf::from("/x/run-stage2.json")));
    assert_eq!(snapshot_path(Some(Path::new("/d")), Some(out), 1), Some(PathBuf::from("/d/stage1.json")));
    assert_eq!(snapshot_path(None, None, 1), None);
}

#[test]
fn exit_codes_from_main() {
    assert_eq!(main_from(["lab", "avgseq", "--hi", "3", "--out", "/dev/null"]), 0);
    assert_eq!(main_from(["lab", "avgseq", "--lo", "0", "--out", "/dev/null"]), 2);
    assert_eq!(main_from(["lab", "nonsense"]), 2);
}
