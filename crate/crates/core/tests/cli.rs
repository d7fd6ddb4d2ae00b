use pavelka::cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pavelka").chain(args.iter().copied());
    let code = run(argv.map(std::ffi::OsString::from), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn theory_file(name: &str, lines: &[&str]) -> String {
    let path = std::env::temp_dir().join(format!("pavelka-cli-{}-{name}.txt", std::process::id()));
    std::fs::write(&path, lines.join("\n")).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, _) = call(&full);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{out}: {e}")))
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["decide", "x -> x"]).0, 0);
    assert_eq!(call(&["decide", "--logic", "RPL", "2/3 -> (x \\/ ~x)"]).0, 1);
    assert_eq!(call(&["decide", "--logic", "L", "1/2 -> x"]).0, 2);
    assert_eq!(call(&["parse", "x ->"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn countermodel_is_printed() {
    let (code, out, _) = call(&["decide", "--logic", "RPL", "2/3 -> (x \\/ ~x)"]);
    assert_eq!(code, 1);
    assert!(out.contains("fails"), "{out}");
    assert!(out.contains("value = 5/6"), "{out}");
    assert!(out.contains("x = 1/2"), "{out}");
}

#[test]
fn routes_agree() {
    for route in ["direct", "naive", "poly"] {
        assert_eq!(call(&["decide", "--logic", "RPL", "--route", route, "1/2 -> (x \\/ ~x)"]).0, 0);
        assert_eq!(call(&["decide", "--logic", "RPL", "--route", route, "1/3 -> 1/4"]).0, 1);
    }
}

#[test]
fn values_and_definitions() {
    assert_eq!(call(&["eval", "6/13 -> 5/13"]).1.trim(), "12/13");
    assert_eq!(call(&["eval", "x & y", "--assign", "x=2/3", "--assign", "y=1/2"]).1.trim(), "1/6");
    let (_, out, _) = call(&["define", "1/5", "--mode", "poly"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines,
        ["aux1_y0 <-> ~q<1/5>", "aux1_y1 <-> aux1_y0^2", "aux1_y2 <-> aux1_y1^2", "q<1/5> <-> aux1_y2"]
    );
}

#[test]
fn json_agrees_with_text() {
    let (code, v) = json(&["degree", "x \\/ ~x"]);
    assert_eq!(code, 0);
    let text = call(&["degree", "x \\/ ~x"]).1;
    let degree = v["degree"].as_str().unwrap();
    assert_eq!(degree, "1/2");
    assert!(text.contains(degree), "{text}");

    let (code, v) = json(&["def-check", "x <-> ~x", "--var", "x", "--value", "1/2"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "defines");
}

#[test]
fn irrational_brackets() {
    let (code, v) = json(&["irrational", "sqrt2over2", "--precision", "3", "--pair", "sqrt2minus1"]);
    assert_eq!(code, 0);
    assert_eq!(v["bracket"], serde_json::json!(["11/16", "3/4"]));
    assert_eq!(v["pair"]["degree"], "7/8");
}

#[test]
fn output_is_deterministic() {
    let t = theory_file("fifth", &["# x is a fifth", "x <-> y", "", "y <-> 1/5"]);
    assert_eq!(call(&["decide", "--logic", "RPL", "--theory", &t, "5*x"]).0, 0);
    for args in [
        &["decide", "--logic", "RPL", "--theory", &t, "4*x"][..],
        &["decide", "--logic", "RPL", "--theory", &t, "--route", "poly", "4*x"],
        &["translate", "1/3 -> x", "--mode", "poly"],
        &["reduce", "sat-to-def", "x & ~x"],
    ] {
        let first = call(args);
        assert_eq!(first, call(args));
    }
}
