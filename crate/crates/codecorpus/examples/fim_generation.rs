//! Fill-in-the-middle sample generation: character-level splits, SPM/PSM
//! serialization, and corpus emission at a target FIM ratio.
//!
//! ```bash
//! cargo run -p codecorpus --example fim_generation
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use codecorpus::corpus::CodeDocument;
use codecorpus::fim::{
    deserialize, emit_corpus, serialize_psm, serialize_spm, split_fim, EmitKind, FimMode,
};

fn main() -> codecorpus::Result<()> {
    let source = "def greet(name):\n    return f'hello {name}'\n";
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (prefix, middle, suffix) = split_fim(source, &mut rng);
    println!("prefix : {prefix:?}");
    println!("middle : {middle:?}");
    println!("suffix : {suffix:?}");
    assert_eq!(format!("{prefix}{middle}{suffix}"), source);

    let spm = serialize_spm(&prefix, &middle, &suffix);
    println!("\nSPM: {spm:?}");
    println!("PSM: {:?}", serialize_psm(&prefix, &middle, &suffix));
    let back = deserialize(FimMode::Spm, &spm).expect("round trip");
    assert_eq!(back.middle, middle);

    // Corpus-level emission: each document is FIM'd with probability ratio.
    let docs: Vec<CodeDocument> = (0..10_000)
        .map(|i| CodeDocument::new(format!("d{i:05}"), format!("d{i}.py"), format!("x = {i}\nprint(x)\n")))
        .collect();
    for ratio in [0.5, 0.1] {
        let stream = emit_corpus(&docs, ratio, FimMode::Spm, 7)?;
        let fim_count = stream.iter().filter(|t| t.kind == EmitKind::Fim).count();
        println!(
            "ratio {ratio}: {fim_count} of {} documents emitted as FIM ({:.4})",
            stream.len(),
            fim_count as f64 / stream.len() as f64
        );
    }
    Ok(())
}
