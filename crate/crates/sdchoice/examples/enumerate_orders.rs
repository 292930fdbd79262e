//! Enumerate all weak orders (complete, transitive relations with ties)
//! over a small universe in the canonical order, and count them.
//!
//! ```bash
//! cargo run --example enumerate_orders
//! ```

use sdchoice::preferences::enumerate_weak_orders;
use sdchoice::Universe;

fn main() {
    let universe = Universe::parse("a,b,c").unwrap();
    println!("all weak orders over {{a,b,c}} in canonical order:");
    for order in enumerate_weak_orders(&universe) {
        println!("  {order}");
    }

    // Counts follow the ordered-set-partition recurrence
    // W(m) = sum_k C(m,k) W(m-k): 1, 3, 13, 75, 541, ...
    let tokens = ["a", "b", "c", "d", "e"];
    for m in 1..=5 {
        let u = Universe::parse(&tokens[..m].join(",")).unwrap();
        println!("m = {m}: {} weak orders", enumerate_weak_orders(&u).len());
    }
}
