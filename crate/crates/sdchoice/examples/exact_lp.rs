//! Use the exact-rational LP solver directly: optima land on exact vertex
//! coordinates, and infeasible or unbounded programs are recognized as
//! such.
//!
//! ```bash
//! cargo run --example exact_lp
//! ```

use sdchoice::exactlp::{solve, Cmp, LinearProgram, LpOutcome};
use sdchoice::ratio;

fn main() {
    // maximize x + y  subject to  x + 2y <= 1, 2x + y <= 1, x,y >= 0
    let mut lp = LinearProgram::new(vec!["x".into(), "y".into()], vec![ratio(1, 1), ratio(1, 1)]);
    lp.push(vec![ratio(1, 1), ratio(2, 1)], Cmp::Le, ratio(1, 1));
    lp.push(vec![ratio(2, 1), ratio(1, 1)], Cmp::Le, ratio(1, 1));
    lp.push(vec![ratio(1, 1), ratio(0, 1)], Cmp::Ge, ratio(0, 1));
    lp.push(vec![ratio(0, 1), ratio(1, 1)], Cmp::Ge, ratio(0, 1));

    print!("{lp}");
    match solve(&lp).unwrap() {
        LpOutcome::Optimal { value, point } => {
            println!(
                "optimal value {value} at x = {}, y = {}",
                point[0], point[1]
            );
        }
        other => println!("{other:?}"),
    }

    // An infeasible program.
    let mut bad = LinearProgram::new(vec!["x".into()], vec![ratio(1, 1)]);
    bad.push(vec![ratio(1, 1)], Cmp::Ge, ratio(1, 1));
    bad.push(vec![ratio(1, 1)], Cmp::Le, ratio(0, 1));
    println!("x >= 1 and x <= 0: {:?}", solve(&bad).unwrap());

    // Free variables make an unconstrained objective unbounded.
    let free = LinearProgram::new(vec!["x".into()], vec![ratio(1, 1)]);
    println!(
        "maximize x with no constraints: {:?}",
        solve(&free).unwrap()
    );
}
