//! Times normal-form computation for the bundled 3x3 schemes.

use std::time::Instant;

use mms_core::scheme::fixtures;
use mms_core::{normal_form, Field};

fn main() {
    for p in [2, 3] {
        let f = Field::new(p).unwrap();
        for (name, s) in [("laderman", fixtures::laderman(f)), ("naive", fixtures::naive(f, 3).unwrap())] {
            let start = Instant::now();
            match normal_form(&s) {
                Ok(_) => println!("{name} mod {p}: {:?}", start.elapsed()),
                Err(e) => println!("{name} mod {p}: {e}"),
            }
        }
    }
}
