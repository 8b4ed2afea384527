fn main() { println!("toric"); }
