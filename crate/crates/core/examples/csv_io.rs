//! Write a prediction table to CSV and read it back bit-for-bit.
//!
//! cargo run -p baytta --example csv_io

use baytta::data::{parse_csv, write_csv};
use baytta::{load_csv, save_csv, synthesize, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = synthesize(&SyntheticConfig::new(5, 3, 42))?;

    let mut buf = Vec::new();
    write_csv(&table, &mut buf)?;
    print!("{}", String::from_utf8(buf)?);

    let dir = std::env::temp_dir().join("baytta-csv-io");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("table.csv");
    save_csv(&table, &path)?;
    let back = load_csv(&path)?;
    println!("round trip identical: {}", back == table);

    let bad = "label,pred_0,pred_1\n1,0.9,0.8\n0,0.3,1.7\n";
    match parse_csv(bad.as_bytes()) {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("malformed input: {e}"),
    }
    Ok(())
}
