//! Time one family clique search: `oracle_probe n q d seconds`.

use std::time::Instant;

use delsarte::oracle::{max_code_size_family, FamilySpec, SearchBudget};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|s| s.parse().expect("integer argument")).collect();
    let [n, q, d, seconds] = args[..] else { panic!("usage: oracle_probe n q d seconds") };
    let start = Instant::now();
    let search = max_code_size_family(FamilySpec::Hamming { n, q }, d as usize, SearchBudget::seconds(seconds)).unwrap();
    println!("n={n} q={q} d={d}: size {} proven {} in {:.1?}", search.size, search.proven, start.elapsed());
}
