use std::time::Duration;

use tela::randbench::bench::{run_benchmark, BenchConfig, Family, Method, Metric, Outcome, Value};
use tela::randbench::{random_tela, RandomParams};
use tela::transforms::GbaMethod;

fn blowup_config(max_n: u32) -> BenchConfig {
    BenchConfig {
        instances: max_n as usize,
        family: Family::Blowup { max_n },
        methods: GbaMethod::ALL.iter().map(|&m| Method::Gba(m)).collect(),
        baseline: Method::Gba(GbaMethod::RemfinSplit),
        max_states: 4000,
        time_budget: Duration::from_secs(30),
        ..Default::default()
    }
}

#[test]
fn blowup_mark_columns() {
    let r = run_benchmark(&blowup_config(5)).unwrap();
    assert_eq!(r.mismatch_count(), 0);
    for inst in &r.instances {
        let n = inst.seed as u32;
        for (m, method) in r.methods.iter().enumerate() {
            let Outcome::Done { gba_marks: Some(k), .. } = inst.outcomes[m] else {
                panic!("{method} did not finish on n={n}");
            };
            match method {
                Method::Gba(GbaMethod::Cnf) => assert_eq!(k, 1 << n),
                _ => assert!(k <= 2, "{method} n={n}: {k}"),
            }
        }
    }
}

#[test]
fn reports_are_reproducible() {
    let cfg = BenchConfig {
        instances: 8,
        seed: 3,
        threads: 2,
        ..Default::default()
    };
    let a = run_benchmark(&cfg).unwrap();
    let b = run_benchmark(&BenchConfig { threads: 1, ..cfg }).unwrap();
    assert_eq!(a.mismatch_count(), 0);
    // everything but the timings
    let strip = |s: String| -> Vec<String> { s.lines().filter(|l| !l.contains("time_ms")).map(String::from).collect() };
    assert_eq!(strip(a.to_kv()), strip(b.to_kv()));
    assert!(a.to_table().contains("0 language mismatches"));
}

#[test]
fn generator_is_seeded() {
    let p = RandomParams {
        n_states: 10,
        seed: 99,
        ..Default::default()
    };
    assert_eq!(random_tela(&p).unwrap(), random_tela(&p).unwrap());
    assert_ne!(
        random_tela(&p).unwrap(),
        random_tela(&RandomParams { seed: 100, ..p.clone() }).unwrap()
    );
}

#[test]
fn tight_budget_records_timeouts() {
    let cfg = BenchConfig {
        max_states: 1,
        ..blowup_config(3)
    };
    let r = run_benchmark(&cfg).unwrap();
    assert!(r.instances.iter().all(|i| i.outcomes.iter().all(|o| *o == Outcome::Timeout)));
    assert_eq!(r.median(0, Metric::States), Some(Value::Infinite));
    assert!(r.to_kv().contains("timeouts.gba:cnf 3"));
}
