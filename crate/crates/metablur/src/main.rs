fn main() { println!("{}", metablur::placeholder()); }
