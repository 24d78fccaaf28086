use std::time::Instant;
use weilrep::fqm::parse_symbol;
use weilrep::intbasis::{integral_basis, verify_integrality};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let syms: Vec<&str> = if args.is_empty() {
        vec!["19^+1", "23^-1", "29^+1", "31^-1"]
    } else {
        args.iter().map(|s| s.as_str()).collect()
    };
    for sym in syms {
        let d = parse_symbol(&sym).unwrap();
        let t0 = Instant::now();
        let b = integral_basis(&d).unwrap();
        let r = verify_integrality(&d, &b);
        println!("{sym}: total {:?}, verdict {}", t0.elapsed(), r.verdict);
    }
}
