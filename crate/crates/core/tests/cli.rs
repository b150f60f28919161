use std::process::{Command, Output};

fn denotate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_denotate")).args(args).env_remove("DATA_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compile_prints_timestamped_facts() {
    let dir = tempfile::tempdir().unwrap();
    let story = dir.path().join("story.txt");
    std::fs::write(
        &story,
        "1 John went to the kitchen.\n2 John grabbed the apple there.\n3 Where is John?\tkitchen\t1\n",
    )
    .unwrap();
    let out = denotate(&["compile", story.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("motion(t1,during(go),theme(john),destination(the_kitchen))."), "{text}");
    assert!(text.contains("contact(t2,during(grab),agent(john),theme(the_apple))."), "{text}");
    assert!(!text.contains("Where"));
}

#[test]
fn compile_from_bracketed_trees() {
    let dir = tempfile::tempdir().unwrap();
    let trees = dir.path().join("trees.txt");
    std::fs::write(&trees, "(S (NP (PROPN Mary)) (VP (V grabbed) (NP (DET the) (NOUN milk))) (PUNCT .))\n").unwrap();
    let out = denotate(&["compile", "unused", "--trees", trees.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("transfer(t1,during(grab),theme(the_milk))."));
}

#[test]
fn query_with_justification() {
    let dir = tempfile::tempdir().unwrap();
    let story = dir.path().join("story.txt");
    let queries = dir.path().join("q.txt");
    std::fs::write(&story, "Mary went to the garden.\nMary picked up the milk there.\n").unwrap();
    std::fs::write(&queries, "% where is the milk\nproperty(location,t2,the_milk,L)\n").unwrap();
    let out = denotate(&["query", story.to_str().unwrap(), queries.to_str().unwrap(), "--justify"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("L = the_garden"), "{text}");
    assert!(!text.contains("invalid justification"));
}

#[test]
fn benchmarks_on_smoke_data() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("qa.tsv");
    let out = denotate(&[
        "qa",
        "--task",
        "1",
        "--limit",
        "5",
        "--report",
        report.to_str().unwrap(),
        "--assert-accuracy",
        "100",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tsv = std::fs::read_to_string(&report).unwrap();
    assert!(tsv.lines().count() > 5);

    let out = denotate(&["dialog", "--task", "3", "--oov", "--assert-accuracy", "100"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("100"));
}

#[test]
fn exit_codes() {
    assert_eq!(denotate(&["qa", "--task", "99"]).status.code(), Some(64));
    assert_eq!(denotate(&["dialog", "--task", "6"]).status.code(), Some(64));
    assert_eq!(denotate(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(denotate(&["--help"]).status.code(), Some(0));
    assert_eq!(denotate(&["compile", "/no/such/story.txt"]).status.code(), Some(1));
    let bad = tempfile::tempdir().unwrap();
    std::fs::write(
        bad.path().join("qa1_single-supporting-fact_test.txt"),
        "1 Mary went to the garden.\n2 Where is Mary?\tkitchen\t1\n",
    )
    .unwrap();
    let out = denotate(&["qa", "--task", "1", "--data", bad.path().to_str().unwrap(), "--assert-accuracy", "100"]);
    assert_eq!(out.status.code(), Some(2));
}
