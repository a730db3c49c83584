//! The "needle in the code" pressure test: generate cases, grade answers,
//! and run the length x depth accuracy matrix for two reference backends.
//!
//! ```bash
//! cargo run -p codecorpus --example needle_matrix
//! ```

use codecorpus::needle::{generate_case, grade, run_matrix, CoinBackend, OracleBackend};

fn main() -> codecorpus::Result<()> {
    let case = generate_case(2_000, 0.5, 42)?;
    println!(
        "haystack: {} chars, needle at offset {} (depth {})",
        case.haystack.len(),
        case.needle_offset,
        case.depth
    );
    println!("query:    {}", case.query);
    println!("expected: {}", case.expected);
    println!("grade(correct answer) = {}", grade(&case, &format!("it returns {}", case.expected)));
    println!("grade(wrong answer)   = {}", grade(&case, "probably forty-two"));

    let lengths = vec![1_000, 4_000, 16_000, 64_000];
    let depths = vec![0.0, 0.25, 0.5, 0.75, 1.0];

    let oracle = run_matrix(&OracleBackend, &lengths, &depths, 3, 1)?;
    println!("\nperfect-oracle accuracy grid:");
    print_grid(&oracle.lengths, &oracle.depths, &oracle.cells);

    let coin = run_matrix(&CoinBackend { accuracy: 0.5, seed: 9 }, &lengths, &depths, 40, 1)?;
    println!("\nfair-coin accuracy grid:");
    print_grid(&coin.lengths, &coin.depths, &coin.cells);

    let dir = tempfile::tempdir().expect("tempdir");
    let csv = dir.path().join("heatmap.csv");
    let png = dir.path().join("heatmap.png");
    oracle.write_csv(&csv)?;
    oracle.write_heatmap_png(&png)?;
    println!("\nwrote {} and {}", csv.display(), png.display());
    Ok(())
}

fn print_grid(lengths: &[usize], depths: &[f64], cells: &[Vec<f64>]) {
    print!("{:>8}", "chars");
    for d in depths {
        print!("{d:>7.2}");
    }
    println!();
    for (li, len) in lengths.iter().enumerate() {
        print!("{len:>8}");
        for cell in &cells[li] {
            print!("{cell:>7.2}");
        }
        println!();
    }
}
