//! Evaluate random dictatorship, random serial dictatorship and the
//! uniform scheme on a four-agent profile with weak preferences.
//!
//! ```bash
//! cargo run --example eval_rsd
//! ```

use sdchoice::schemes::{rd, rsd, scheme_by_name};
use sdchoice::Profile;

fn main() {
    let profile = Profile::parse(
        "agent 1: a~c > b > d\n\
         agent 2: b~d > a > c\n\
         agent 3: a > d > b > c\n\
         agent 4: b > c > a > d\n",
        None,
    )
    .expect("profile parses");

    print!("profile:\n{profile}");
    println!("rsd: {}", rsd(&profile).expect("rsd is total"));

    // Random dictatorship is undefined here: agent 1's top class is {a, c}.
    match rd(&profile) {
        Ok(lottery) => println!("rd:  {lottery}"),
        Err(err) => println!("rd:  {err}"),
    }

    // Strict profiles are inside rd's domain, and there rsd agrees with it.
    let strict = Profile::parse(
        "agent 1: a > b > c > d\n\
         agent 2: b > a > c > d\n\
         agent 3: a > c > b > d\n",
        None,
    )
    .unwrap();
    println!("strict profile rd:  {}", rd(&strict).unwrap());
    println!("strict profile rsd: {}", rsd(&strict).unwrap());

    let uniform = scheme_by_name("uniform").unwrap();
    println!("uniform: {}", uniform.evaluate(&profile).unwrap());
}
