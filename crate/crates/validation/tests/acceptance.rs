use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use eigenscale_validation::CRITERIA;

fn main() {
    let mut failed = 0;
    for (i, (name, f)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(d) => println!("PASS  {:>2}  {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
