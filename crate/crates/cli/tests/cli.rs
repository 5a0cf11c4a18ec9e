use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_structmat"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("structmat-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_json(instance: &Path, task: &str) -> (Value, i32) {
    let out = run(&[
        "run",
        "--instance",
        instance.to_str().unwrap(),
        "--task",
        task,
        "--verify",
        "--json",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    (v, out.status.code().unwrap())
}

fn write(name: &str, v: &Value) -> PathBuf {
    let p = scratch(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn identity_instance(b: Vec<u64>) -> Value {
    // Z_{4,0} I - I Z_{4,1} = e_1 (-e_4)^t, so G = e_1, H = -e_4
    let p = 998_244_353u64;
    json!({
        "prime": "default",
        "operator": {
            "kind": "sylvester",
            "p": {"flavor": "single_power", "degree": 4, "phi": 0},
            "q": {"flavor": "single_power", "degree": 4, "phi": 1},
            "transpose_p": false,
            "transpose_q": false
        },
        "g": [[1], [0], [0], [0]],
        "h": [[0], [0], [0], [p - 1]],
        "b": b,
        "seed": 7
    })
}

#[test]
fn gen_is_deterministic() {
    let a = run(&[
        "gen", "--m", "9", "--n", "6", "--alpha", "6", "--seed", "11",
    ]);
    let b = run(&[
        "gen", "--m", "9", "--n", "6", "--alpha", "6", "--seed", "11",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let path = scratch("gen_det.json");
    let c = run(&[
        "gen",
        "--m",
        "9",
        "--n",
        "6",
        "--alpha",
        "6",
        "--seed",
        "11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(c.status.success());
    assert_eq!(fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn generated_instances_verify_for_every_task() {
    let configs: [&[&str]; 4] = [
        &["--m", "16", "--n", "16", "--alpha", "3", "--beta", "4"],
        &[
            "--m",
            "12",
            "--n",
            "12",
            "--alpha",
            "2",
            "--kind",
            "stein",
            "--p-flavor",
            "general",
            "--q-flavor",
            "geometric",
        ],
        &[
            "--m",
            "10",
            "--n",
            "10",
            "--alpha",
            "2",
            "--p-flavor",
            "geometric",
            "--transpose-p",
            "true",
            "--transpose-q",
            "false",
        ],
        &[
            "--m",
            "8",
            "--n",
            "8",
            "--alpha",
            "2",
            "--prime",
            "p62",
            "--p-flavor",
            "general",
        ],
    ];
    for (i, cfg) in configs.iter().enumerate() {
        let path = scratch(&format!("gen_{i}.json"));
        let mut args = vec!["gen", "--seed", "5", "--out", path.to_str().unwrap()];
        args.extend_from_slice(cfg);
        assert!(run(&args).status.success(), "config {i}");
        for task in ["mul", "inv", "solve"] {
            let (v, code) = run_json(&path, task);
            assert_eq!(v["verified"], json!(true), "config {i} task {task}: {v}");
            assert_eq!(code, 0);
            assert_eq!(v["tag"], json!("ok"));
        }
    }
}

#[test]
fn identity_solve_returns_rhs() {
    let path = write("identity.json", &identity_instance(vec![1, 0, 0, 0]));
    let (v, code) = run_json(&path, "solve");
    assert_eq!(code, 0);
    assert_eq!(v["tag"], json!("ok"));
    assert_eq!(v["result"]["x"], json!([1, 0, 0, 0]));
}

#[test]
fn cauchy_mul_matches_hand_result() {
    let inst = json!({
        "prime": "default",
        "operator": {
            "kind": "sylvester",
            "p": {"flavor": "general", "polys": [[998_244_351u64, 1], [998_244_350u64, 1]]},
            "q": {"flavor": "general", "polys": [[0, 1], [998_244_352u64, 1]]},
            "transpose_p": false,
            "transpose_q": true
        },
        "g": [[1], [1]],
        "h": [[1], [1]],
        "B": [[1, 0], [0, 1]],
        "seed": 0
    });
    let (v, code) = run_json(&write("cauchy.json", &inst), "mul");
    assert_eq!(code, 0);
    let inv2 = 998_244_353u64.div_ceil(2);
    // entries 1/(x_i - y_j) for x = (2, 3), y = (0, 1)
    let inv3 = 332_748_118u64;
    assert_eq!(v["result"]["matrix"], json!([[inv2, 1], [inv3, inv2]]));
    assert_eq!(v["verified"], json!(true));
}

#[test]
fn inconsistent_and_singular_tags() {
    // A = diag(1, 0): Z_{2,0} A - A Z_{2,1}^t = [[0, 0], [1, 0]] - [[0, 1], [0, 0]]
    let p = 998_244_353u64;
    let mut inst = json!({
        "prime": "default",
        "operator": {
            "kind": "sylvester",
            "p": {"flavor": "single_power", "degree": 2, "phi": 0},
            "q": {"flavor": "single_power", "degree": 2, "phi": 1},
            "transpose_p": false,
            "transpose_q": true
        },
        "g": [[1, 0], [0, 1]],
        "h": [[0, 1], [p - 1, 0]],
        "b": [0, 1],
        "seed": 3
    });
    let path = write("diag.json", &inst);
    let (v, code) = run_json(&path, "solve");
    assert_eq!(code, 0);
    assert_eq!(v["tag"], json!("no_solution"));
    assert_eq!(v["verified"], json!(true));
    let (v, code) = run_json(&path, "inv");
    assert_eq!(code, 0);
    assert_eq!(v["tag"], json!("singular"));
    inst["b"] = json!([0, 0]);
    let (v, _) = run_json(&write("diag0.json", &inst), "solve");
    assert_eq!(v["tag"], json!("ok"));
    assert_ne!(v["result"]["x"], json!([0, 0]));
}

#[test]
fn bad_input_exits_with_two() {
    let mut inst = identity_instance(vec![1, 0, 0]);
    let out = run(&[
        "run",
        "--instance",
        write("bad_b.json", &inst).to_str().unwrap(),
        "--task",
        "solve",
    ]);
    assert_eq!(out.status.code(), Some(2));
    inst["b"] = json!([1, 0, 0, 0]);
    inst["g"] = json!([[1], [0], [0]]);
    let out = run(&[
        "run",
        "--instance",
        write("bad_g.json", &inst).to_str().unwrap(),
        "--task",
        "solve",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "run",
        "--instance",
        write("no_b.json", &identity_instance(vec![1, 0, 0, 0]))
            .to_str()
            .unwrap(),
        "--task",
        "mul",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "gen",
        "--m",
        "4",
        "--n",
        "4",
        "--alpha",
        "2",
        "--p-flavor",
        "geometric",
        "--geom-ratio",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn bench_csv_round_trips() {
    let path = scratch("bench.csv");
    let out = run(&[
        "bench",
        "--sizes",
        "32,64",
        "--alphas",
        "2,4",
        "--beta",
        "2",
        "--reps",
        "2",
        "--task",
        "mul,solve",
        "--baseline",
        "--verify",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["task", "m", "n", "alpha", "beta", "seed", "wall_ns", "verified"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3 * 2 * 2 * 2);
    let mut again = csv::Writer::from_writer(Vec::new());
    again
        .write_record([
            "task", "m", "n", "alpha", "beta", "seed", "wall_ns", "verified",
        ])
        .unwrap();
    for r in &rows {
        again.write_record(r).unwrap();
        assert!(r[6].parse::<u128>().is_ok());
        assert!(r[7] == *"true" || r[7] == *"false" || r[7].is_empty());
    }
    assert_eq!(
        String::from_utf8(again.into_inner().unwrap()).unwrap(),
        fs::read_to_string(&path).unwrap()
    );
}

#[test]
fn pade_planted_and_file() {
    for seed in 0..4 {
        let out = run(&[
            "pade",
            "--moduli-degrees",
            "12,9",
            "--bounds",
            "6,7,8",
            "--seed",
            &seed.to_string(),
            "--json",
        ]);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(v["tag"], json!("ok"));
        assert_eq!(v["verified"], json!(true));
    }
    let p = 998_244_353u64;
    let file = json!({
        "prime": "default",
        "moduli": [[0, 0, 0, 0, 1]],
        "residuals": [[[1, 1, 1, 1], [p - 1]]],
        "bounds": [2, 1]
    });
    let out = run(&[
        "pade",
        "--instance",
        write("pade.json", &file).to_str().unwrap(),
        "--json",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tag"], json!("ok"));
    let f = v["f"].as_array().unwrap();
    let c = f[1][0].as_u64().unwrap();
    assert_eq!(f[0], json!([c, p - c]));
    let out = run(&["pade", "--moduli-degrees", "4", "--bounds", "0,2"]);
    assert_eq!(out.status.code(), Some(2));
}
