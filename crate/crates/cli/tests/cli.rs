use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultrahier")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str], code: &str) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(1), "{args:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with(&format!("{code}: ")), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    err
}

fn file(dir: &Path, name: &str, text: &str) -> String {
    let path: PathBuf = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const IRIS7: &str = "label,SL,SW,PL,PW\n\
iris1,5.1,3.5,1.4,0.2\niris2,4.9,3.0,1.4,0.2\niris3,4.7,3.2,1.3,0.2\niris4,4.6,3.1,1.5,0.2\n\
iris5,5.0,3.6,1.4,0.2\niris6,5.4,3.9,1.7,0.4\niris7,4.6,3.4,1.4,0.3\n";

fn iris_tree(dir: &TempDir) -> String {
    let input = file(dir.path(), "iris7.csv", IRIS7);
    let tree = dir.path().join("tree.json").to_string_lossy().into_owned();
    ok(&["cluster", "--contiguous", &input, "-o", &tree]);
    tree
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["cluster", "--linkage", "nope", "x.csv"]).status.code(), Some(2));
}

#[test]
fn domain_errors_are_single_line() {
    let dir = TempDir::new().unwrap();
    fails(&["render", "/nonexistent/tree.json"], "E_IO");
    let bad = file(dir.path(), "bad.json", "{\n  \"n\": 2,\n  \"labels\": [\n");
    let err = fails(&["render", &bad], "E_PARSE");
    assert!(err.contains("line 4"), "{err}");
    fails(&["unpack", "(213)"], "E_DOMAIN");
    fails(&["enumerate-nlr", "11"], "E_RESOURCE");
    let tree = iris_tree(&dir);
    fails(&["padic-encode", "-p", "2", &tree], "E_DOMAIN");
    let short = file(dir.path(), "short.csv", "1,2\n3,4\n");
    fails(&["haar", "--tree", &tree, &short], "E_ALIGNMENT");
}

#[test]
fn cluster_then_cophenetic() {
    let dir = TempDir::new().unwrap();
    let tree = iris_tree(&dir);
    let table = ok(&["cophenetic", &tree]);
    assert!(table.starts_with(",iris1,iris2,"));
    assert!(table.contains("iris3,0.6480741,0.3316625,0,0.2449490,1.166190,"), "{table}");
    let newick = ok(&["cluster", "--contiguous", "--newick", &dir.path().join("iris7.csv").to_string_lossy()]);
    assert!(newick.trim_end().ends_with(';') && newick.contains("iris7:"), "{newick}");
}

#[test]
fn verify_and_canonical() {
    let dir = TempDir::new().unwrap();
    let tree = iris_tree(&dir);
    let um = file(dir.path(), "um.csv", &ok(&["cophenetic", "--full-precision", &tree]));
    assert_eq!(ok(&["verify-um", &um]), "i,j,k,lhs,rhs\n");
    let canon = ok(&["canonical", &um]);
    assert_eq!(canon.lines().count(), 8);
    let metric = file(dir.path(), "m.csv", "0,1,3\n1,0,1\n3,1,0\n");
    let out = run(&["verify-um", &metric]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1,2,3,3.000000,1.000000"));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("E_NOT_ULTRAMETRIC: not ultrametric: d(t1,t3) = 3"));
}

#[test]
fn padic_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let tree = iris_tree(&dir);
    let enc = dir.path().join("enc.json").to_string_lossy().into_owned();
    let dec = dir.path().join("dec.json").to_string_lossy().into_owned();
    ok(&["padic-encode", "-p", "3", &tree, "-o", &enc]);
    ok(&["padic-decode", &enc, "-o", &dec]);
    assert_eq!(ok(&["padic-encode", "-p", "3", &dec]), std::fs::read_to_string(&enc).unwrap());
    let decimal = ok(&["padic-encode", "--decimal", &tree]);
    assert!(decimal.starts_with("label,integer\niris1,"));
    let dist = ok(&["padic-dist", &enc]);
    assert_eq!(dist.lines().count(), 1 + 21);
    assert!(dist.contains("iris3,iris4,1,1/3,2/3"), "{dist}");
}

#[test]
fn packed_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let tree = dir.path().join("u.json").to_string_lossy().into_owned();
    ok(&["unpack", "(13625748)", "-o", &tree]);
    assert_eq!(ok(&["packed", &tree]), "(13625748)\n");
    let listing = ok(&["enumerate-nlr", "5"]);
    assert_eq!(listing.lines().count(), 6);
    assert_eq!(listing.lines().last(), Some("5"));
    assert_eq!(ok(&["enumerate-nlr", "--count", "8"]), "272\n");
}

#[test]
fn streams() {
    let dir = TempDir::new().unwrap();
    let stream = file(dir.path(), "stream.csv", "4,7,9,10,6,11,3\n");
    assert_eq!(ok(&["ordinal", "--order", "2", "--delay", "1", &stream]), "012 012 201 102 201\n");
    assert_eq!(ok(&["ordinal", "--classes", &stream]), "012 012 201 102 201\n012 2\n201 2\n102 1\n");
    let column = file(dir.path(), "column.csv", "4\n7\n9\n10\n6\n11\n3\n");
    assert_eq!(ok(&["rankperm", &column]), "(1345260)\n");
}

#[test]
fn baire_commands() {
    let dir = TempDir::new().unwrap();
    let strings = file(dir.path(), "s.txt", "a,241\nb,248\nc,311\n");
    let dist = ok(&["baire-dist", &strings]);
    assert!(dist.contains("a,0,0.01000000,1.000000"), "{dist}");
    let dump = ok(&["baire-cluster", "--dump", &strings]);
    assert!(dump.starts_with("* (3)\n  2 (2)\n"), "{dump}");
    let tree = dir.path().join("b.json").to_string_lossy().into_owned();
    ok(&["baire-cluster", &strings, "-o", &tree]);
    assert!(ok(&["cophenetic", &tree]).contains("a,0,0.01000000,1.000000"));
    let reals = file(dir.path(), "r.txt", "x,0.2415\ny,0.2489\n");
    assert!(ok(&["baire-dist", "--digitize", "3", &reals]).contains("x,0,0.01000000"));
    assert_eq!(ok(&["dna-encode", "--scheme", "4-adic", "ACGT", "AA"]), "0123\n00\n");
    fails(&["dna-encode", "AXG"], "E_PARSE");
}

#[test]
fn haar_commands() {
    let dir = TempDir::new().unwrap();
    let input = file(dir.path(), "iris7.csv", IRIS7);
    let wt = dir.path().join("wt.csv").to_string_lossy().into_owned();
    let tree = dir.path().join("t.json").to_string_lossy().into_owned();
    ok(&["haar", "--linkage", "median", &input, "-o", &wt, "--save-tree", &tree, "--full-precision"]);
    let coefficients = std::fs::read_to_string(&wt).unwrap();
    assert!(coefficients.starts_with("coordinate,s6,d6,d5,d4,d3,d2,d1\nSL,"), "{coefficients}");
    let rebuilt = ok(&["haar-inverse", "--tree", &tree, &wt]);
    assert_eq!(rebuilt.lines().nth(1), Some("iris1,5.100000,3.500000,1.400000,0.2000000"));
    let smooth = ok(&["haar-denoise", "--tree", &tree, "--epsilon", "1000", &wt]);
    let rows: Vec<&str> = smooth.lines().skip(1).map(|l| l.split_once(',').unwrap().1).collect();
    assert!(rows.windows(2).all(|w| w[0] == w[1]), "{smooth}");
}

#[test]
fn lattice_command() {
    let dir = TempDir::new().unwrap();
    let table = file(dir.path(), "t.csv", "obj,v1,v2,v3\na,1,0,1\nb,0,1,1\nc,1,0,1\ne,1,0,0\nf,0,0,1\n");
    let text = ok(&["lattice", &table]);
    assert!(text.contains("level 3\n  {v1,v2,v3}: (b,e) (e,f)\n"), "{text}");
    assert_eq!(ok(&["lattice", "--level", "2", &table]), "{a,b,c,f}\n{a,c,e}\n");
    let json = ok(&["lattice", "--json", &table]);
    assert!(json.contains("\"vertices\"") && json.contains("\"edges\""));
}

#[test]
fn clouds_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = ok(&["gen-cloud", "--n", "30", "--dim", "5", "--seed", "4"]);
    assert_eq!(a, ok(&["gen-cloud", "--n", "30", "--dim", "5", "--seed", "4"]));
    assert_ne!(a, ok(&["gen-cloud", "--n", "30", "--dim", "5", "--seed", "5"]));
    let cloud = file(dir.path(), "c.csv", &a);
    let report = ok(&["ultrametricity", "--seed", "1", &cloud]);
    assert!(report.contains("\"sampled\": 2000"), "{report}");
    assert_eq!(report, ok(&["ultrametricity", "--seed", "1", &cloud]));
}

#[test]
fn render_is_stable() {
    let dir = TempDir::new().unwrap();
    let pair = file(
        dir.path(),
        "pair.json",
        r#"{"n": 2, "labels": ["a", "b"], "nodes": [{"rank": 1, "height": 0.5, "left": "t2", "right": "t1"}]}"#,
    );
    let drawing = ok(&["render", &pair]);
    assert_eq!(drawing.lines().count(), 3);
    assert_eq!(drawing, ok(&["render", &pair]));
    let tree = iris_tree(&dir);
    let iris = ok(&["render", &tree]);
    assert_eq!(iris.lines().filter(|l| l.contains(" iris")).count(), 7);
    let order: Vec<&str> = iris.lines().filter_map(|l| l.split_whitespace().find(|w| w.starts_with('q'))).collect();
    assert_eq!(order, ["q6", "q4", "q2", "q1", "q5", "q3"]);
}
