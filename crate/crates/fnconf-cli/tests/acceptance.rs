use std::time::{Duration, Instant};

use fnconf_cli::harness::{run_criterion, CRITERIA};

const SEED: u64 = 7;

fn time_limit(id: u8) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(10)),
        8 => Some(Duration::from_secs(30)),
        11 => Some(Duration::from_secs(60)),
        _ => None,
    }
}

#[test]
fn acceptance() {
    let mut failed = vec![];
    for (id, name) in CRITERIA {
        let start = Instant::now();
        let c = run_criterion(id, SEED).expect("known criterion");
        let elapsed = start.elapsed();
        let in_time = time_limit(id).map_or(true, |lim| elapsed <= lim);
        let ok = c.passed && in_time;
        println!(
            "[{}] C{id} {name}: {} checks, {:.1}s{}",
            if ok { "PASS" } else { "FAIL" },
            c.checks,
            elapsed.as_secs_f64(),
            if in_time { String::new() } else { " (over time limit)".into() }
        );
        for f in &c.failures {
            println!("    {f}");
        }
        if !ok {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
