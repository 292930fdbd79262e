//! Compare lotteries by stochastic dominance: strict dominance,
//! equivalence and incomparability, plus upper contour masses.
//!
//! ```bash
//! cargo run --example sd_dominance
//! ```

use sdchoice::lotteries::{sd_compare, upper_contour_mass};
use sdchoice::{Alternative, Lottery, PreferenceRelation, Universe};

fn main() {
    let universe = Universe::parse("a,b,c").unwrap();
    let relation = PreferenceRelation::parse("a > b > c", &universe).unwrap();

    let p = Lottery::parse("2/3*a + 1/3*c", &universe).unwrap();
    let q = Lottery::parse("1/3*a + 1/3*b + 1/3*c", &universe).unwrap();
    let b = Lottery::degenerate(&universe, &Alternative::new("b")).unwrap();

    println!("relation: {relation}");
    for alt in universe.alternatives() {
        println!(
            "  mass of {{y : y at least as good as {alt}}} under {p}: {}",
            upper_contour_mass(&relation, &p, alt).unwrap()
        );
    }

    for (x, y) in [(&p, &q), (&p, &b), (&q, &q)] {
        println!("{x}  {}  {y}", sd_compare(&relation, x, y).unwrap());
    }

    // With ties the comparison only sees indifference-class totals.
    let tied = PreferenceRelation::parse("a~b > c", &universe).unwrap();
    let r = Lottery::parse("1/2*a + 1/2*b", &universe).unwrap();
    let s = Lottery::parse("1*b", &universe).unwrap();
    println!(
        "under {tied}: {r}  {}  {s}",
        sd_compare(&tied, &r, &s).unwrap()
    );
}
