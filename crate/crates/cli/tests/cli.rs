use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bdz_core::codec::EncodedStreams;
use bdz_core::{read_bdd_text, write_bdd_text};
use tempfile::TempDir;

const FIXTURE: &str = include_str!("../../core/tests/data/fixture20.bdd");

fn bdz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdz")).args(args).output().expect("bdz runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work { dir: TempDir::new().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, data: impl AsRef<[u8]>) -> PathBuf {
        let path = self.path(name);
        fs::write(&path, data).unwrap();
        path
    }
}

#[test]
fn compress_fixture_reports_node_count() {
    let w = Work::new();
    let input = w.write("f.bdd", FIXTURE);
    let out = w.path("f.bdz");
    let o = bdz(&["compress", "-i", p(&input), "-o", p(&out), "--th", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("20 nodes -> "), "{}", stdout(&o));
    assert!(stdout(&o).contains("bits/node"));
}

#[test]
fn no_delta_keeps_raw_tail() {
    let w = Work::new();
    let input = w.write("f.bdd", FIXTURE);
    let out = w.path("f.bdz");
    let args = ["compress", "-i", p(&input), "-o", p(&out), "--tf", "2", "--no-delta", "--backend", "store"];
    assert!(bdz(&args).status.success());
    let s = EncodedStreams::from_bytes(&fs::read(&out).unwrap()).unwrap();
    assert!(!s.delta_enabled);
    assert_eq!(s.tail, vec![9, 12, 14, 15, 16, 17, 18, 20]);
}

#[test]
fn store_backend_roundtrip_is_identity() {
    let w = Work::new();
    let canonical = write_bdd_text(&read_bdd_text(FIXTURE).unwrap());
    let input = w.write("f.bdd", &canonical);
    let (bz, back) = (w.path("f.bdz"), w.path("back.bdd"));
    assert!(bdz(&["compress", "-i", p(&input), "-o", p(&bz), "--backend", "store"]).status.success());
    let o = bdz(&["decompress", "-i", p(&bz), "-o", p(&back)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&back).unwrap(), canonical);
}

#[test]
fn queens_compress_decompress_verify() {
    let w = Work::new();
    let q = w.path("q8.bdd");
    assert!(bdz(&["gen", "queens", "8", "-o", p(&q)]).status.success());
    let b = read_bdd_text(&fs::read_to_string(&q).unwrap()).unwrap();
    assert_eq!(b.count_solutions().to_string(), "92");
    let (bz, back) = (w.path("q8.bdz"), w.path("back.bdd"));
    assert!(bdz(&["compress", "-i", p(&q), "-o", p(&bz)]).status.success());
    assert!(bdz(&["decompress", "-i", p(&bz), "-o", p(&back)]).status.success());
    let back = read_bdd_text(&fs::read_to_string(&back).unwrap()).unwrap();
    assert!(back.is_isomorphic(&b));
    let o = bdz(&["verify", p(&q), p(&bz)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn compress_is_deterministic_end_to_end() {
    let w = Work::new();
    let q = w.path("r.bdd");
    assert!(bdz(&["gen", "rook", "6", "7", "-o", p(&q)]).status.success());
    let (a, back, b) = (w.path("a.bdz"), w.path("back.bdd"), w.path("b.bdz"));
    assert!(bdz(&["compress", "-i", p(&q), "-o", p(&a)]).status.success());
    assert!(bdz(&["decompress", "-i", p(&a), "-o", p(&back)]).status.success());
    assert!(bdz(&["compress", "-i", p(&back), "-o", p(&b)]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn wrong_magic_is_rejected_without_output() {
    let w = Work::new();
    let junk = w.write("junk.bdz", b"NOPE\x00\x01\x02");
    let out = w.path("out.bdd");
    let o = bdz(&["decompress", "-i", p(&junk), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unrecognized container"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn corrupt_container_leaves_no_file() {
    let w = Work::new();
    let input = w.write("f.bdd", FIXTURE);
    let bz = w.path("f.bdz");
    assert!(bdz(&["compress", "-i", p(&input), "-o", p(&bz), "--backend", "deflate"]).status.success());
    let mut bytes = fs::read(&bz).unwrap();
    bytes.truncate(bytes.len() - 3);
    let bad = w.write("bad.bdz", bytes);
    let out = w.path("out.bdd");
    let o = bdz(&["decompress", "-i", p(&bad), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(w.dir.path()).unwrap().count(), 3);
}

#[test]
fn naive_container_dispatch() {
    let w = Work::new();
    let input = w.write("f.bdd", FIXTURE);
    let (bn, back) = (w.path("f.bdn"), w.path("back.bdd"));
    assert!(bdz(&["compress", "-i", p(&input), "-o", p(&bn), "--naive"]).status.success());
    assert_eq!(&fs::read(&bn).unwrap()[..4], b"BDN1");
    assert!(bdz(&["decompress", "-i", p(&bn), "-o", p(&back)]).status.success());
    assert_eq!(bdz(&["verify", p(&input), p(&bn)]).status.code(), Some(0));
}

#[test]
fn verify_reports_mismatch() {
    let w = Work::new();
    let input = w.write("f.bdd", FIXTURE);
    let other = w.path("q.bdd");
    assert!(bdz(&["gen", "queens", "4", "-o", p(&other)]).status.success());
    let bz = w.path("q.bdz");
    assert!(bdz(&["compress", "-i", p(&other), "-o", p(&bz)]).status.success());
    let o = bdz(&["verify", p(&input), p(&bz)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mismatch"), "{}", stderr(&o));
}

#[test]
fn verify_same_shape_different_terminal() {
    let w = Work::new();
    let a = w.write("a.bdd", "bdd 3 1 1\n1 1 2 3\n2 2 T0\n3 2 T1\n");
    let b = w.write("b.bdd", "bdd 3 1 1\n1 1 2 3\n2 2 T1\n3 2 T0\n");
    let bz = w.path("b.bdz");
    assert!(bdz(&["compress", "-i", p(&b), "-o", p(&bz)]).status.success());
    let o = bdz(&["verify", p(&a), p(&bz)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("first mismatch: terminal value differs"), "{}", stderr(&o));
}

#[test]
fn verify_small_pair_checks_every_assignment() {
    let w = Work::new();
    let input = w.write("f.bdd", FIXTURE);
    let bz = w.path("f.bdz");
    assert!(bdz(&["compress", "-i", p(&input), "-o", p(&bz)]).status.success());
    let o = bdz(&["verify", p(&input), p(&bz)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all 64 assignments agree"), "{}", stdout(&o));
}

#[test]
fn generators_and_guards() {
    let o = bdz(&["gen", "rook", "8", "8"]);
    assert!(o.status.success());
    let b = read_bdd_text(&stdout(&o)).unwrap();
    assert_eq!(b.count_solutions().to_string(), "40320");

    let a = bdz(&["gen", "random", "--vars", "20", "--nodes", "3000", "--seed", "42"]);
    let b = bdz(&["gen", "random", "--vars", "20", "--nodes", "3000", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = bdz(&["gen", "random", "--vars", "20", "--nodes", "3000", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);

    assert_eq!(bdz(&["gen", "queens", "10"]).status.code(), Some(2));
    assert_eq!(bdz(&["gen", "rook", "11", "11"]).status.code(), Some(2));
    assert_eq!(bdz(&["gen", "random", "--nodes", "1000001"]).status.code(), Some(2));
}

#[test]
fn bench_queens_directory() {
    let w = Work::new();
    assert!(bdz(&["gen", "queens", "8", "-o", p(&w.path("queens8.bdd"))]).status.success());
    let dir = p(w.dir.path());
    let a = bdz(&["bench", dir, "--csv"]);
    assert!(a.status.success(), "{}", stderr(&a));
    let csv = stdout(&a);
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "queens8.bdd");
    let ratio: f64 = fields[6].parse().unwrap();
    assert!(ratio > 2.0, "{row}");
    assert_eq!(bdz(&["bench", dir, "--csv"]).stdout, a.stdout);
    assert!(stdout(&bdz(&["bench", dir])).contains("queens8.bdd"));
}

#[test]
fn bench_empty_and_unreadable() {
    let w = Work::new();
    let dir = p(w.dir.path());
    assert_eq!(bdz(&["bench", dir]).status.code(), Some(2));
    w.write("broken.bdd", "bdd 5 1 1\n");
    let o = bdz(&["bench", dir]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("warning"));
    w.write("ok.bdd", FIXTURE);
    let o = bdz(&["bench", dir, "--csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn missing_input_is_an_io_error() {
    let w = Work::new();
    let o = bdz(&["compress", "-i", p(&w.path("nope.bdd")), "-o", p(&w.path("x"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stats_lists_streams() {
    let w = Work::new();
    let input = w.write("f.bdd", FIXTURE);
    let o = bdz(&["stats", "-i", p(&input), "--tf", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("nodes            20"));
    assert!(s.contains("tree edges       19"));
    assert!(s.contains("forward        2"));
}
