//! Repository-level long-context packing: dependency extraction,
//! topological concatenation, oversize decomposition, random packing.
//!
//! ```bash
//! cargo run -p codecorpus --example longctx_packing
//! ```

use codecorpus::pack::{
    decompose_oversize, extract_deps, random_pack, token_estimate, topo_pack, RepoFiles,
};

fn main() -> codecorpus::Result<()> {
    let repo = RepoFiles {
        repo_id: "acme/engine".into(),
        files: vec![
            ("engine/app.py".into(), "import engine.core\nfrom engine.io import load\nrun()\n".into()),
            ("engine/core.py".into(), "import engine.util\ndef run():\n    pass\n".into()),
            ("engine/io.py".into(), "import engine.util\ndef load():\n    pass\n".into()),
            ("engine/util.py".into(), "def shared():\n    pass\n".into()),
            ("engine/standalone.py".into(), "print('no imports here')\n".into()),
        ],
    };

    let graph = extract_deps(&repo.files, "Python")?;
    println!("dependency edges (importer -> imported):");
    for (a, b) in graph.edge_paths() {
        println!("  {a} -> {b}");
    }

    let sequences = topo_pack(&repo, &graph, 32_768)?;
    for seq in &sequences {
        println!(
            "\npacked sequence (~{} tokens, oversize={}):",
            seq.token_estimate, seq.oversize
        );
        for path in &seq.files {
            println!("  {path}");
        }
    }

    // A tiny cap forces decomposition into independent subgraphs.
    let sizes: Vec<u64> = graph
        .nodes
        .iter()
        .map(|p| {
            repo.files
                .iter()
                .find(|(q, _)| q == p)
                .map(|(_, c)| token_estimate(c.len()))
                .unwrap_or(0)
        })
        .collect();
    let subgraphs = decompose_oversize(&graph, &sizes, 25)?;
    println!("\ncap 25 decomposes into {} subgraphs:", subgraphs.len());
    for sub in &subgraphs {
        let names: Vec<&str> = sub.nodes.iter().map(|&i| graph.nodes[i].as_str()).collect();
        println!("  size {:>3} oversize={} {:?}", sub.size, sub.oversize, names);
    }

    // Languages without import rules use seeded random concatenation.
    let sql_repo = RepoFiles {
        repo_id: "acme/warehouse".into(),
        files: vec![
            ("schema.sql".into(), "create table launches (id int);\n".into()),
            ("load.sql".into(), "insert into launches values (1);\n".into()),
            ("query.sql".into(), "select count(*) from launches;\n".into()),
        ],
    };
    for seed in [1, 2] {
        let seqs = random_pack(&sql_repo, seed, 32_768)?;
        let order: Vec<&str> = seqs.iter().flat_map(|s| s.files.iter().map(|f| f.as_str())).collect();
        println!("random pack seed {seed}: {order:?}");
    }
    Ok(())
}
