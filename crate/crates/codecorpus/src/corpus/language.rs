//! Language inference from file paths.
//!
//! Minimal rules only: an extension table first, then a handful of special
//! filenames (Makefile, Dockerfile, CMakeLists.txt, ...). No content sniffing.

/// Language tag for files no rule matches.
pub const UNKNOWN: &str = "unknown";

pub struct LanguageRule {
    pub name: &'static str,
    pub extensions: &'static [&'static str],
    pub filenames: &'static [&'static str],
}

/// The supported-language table: 89 languages.
pub const SUPPORTED: &[LanguageRule] = &[
    lang("ANTLR", &["g4"]),
    lang("AWK", &["awk"]),
    lang("Ada", &["adb", "ads", "ada"]),
    lang("Agda", &["agda"]),
    lang("Alloy", &["als"]),
    lang("AppleScript", &["applescript", "scpt"]),
    lang("Assembly", &["asm", "s"]),
    lang("Augeas", &["aug"]),
    lang("Batchfile", &["bat", "cmd"]),
    lang("Bluespec", &["bsv"]),
    lang("C", &["c", "h"]),
    lang("C#", &["cs", "csx"]),
    lang("C++", &["cpp", "cc", "cxx", "c++", "hpp", "hh", "hxx", "h++", "inl"]),
    LanguageRule {
        name: "CMake",
        extensions: &["cmake"],
        filenames: &["CMakeLists.txt"],
    },
    lang("CSS", &["css"]),
    lang("CUDA", &["cu", "cuh"]),
    lang("Clojure", &["clj", "cljs", "cljc", "edn"]),
    lang("CoffeeScript", &["coffee"]),
    lang("Common Lisp", &["lisp", "lsp"]),
    lang("Dart", &["dart"]),
    LanguageRule {
        name: "Dockerfile",
        extensions: &["dockerfile"],
        filenames: &["Dockerfile"],
    },
    lang("Elixir", &["ex", "exs"]),
    lang("Elm", &["elm"]),
    lang("Emacs Lisp", &["el"]),
    lang("Erlang", &["erl", "hrl"]),
    lang("F#", &["fs", "fsi", "fsx"]),
    lang("Fortran", &["f", "f77", "f90", "f95", "f03", "for", "ftn"]),
    lang("GLSL", &["glsl", "vert", "frag"]),
    lang("Go", &["go"]),
    lang("Groovy", &["groovy", "gradle"]),
    lang("HTML", &["html", "htm", "xhtml"]),
    lang("Haskell", &["hs"]),
    lang("Idris", &["idr"]),
    lang("Isabelle", &["thy"]),
    lang("JSON", &["json", "geojson", "jsonl"]),
    lang("Java", &["java"]),
    lang("Java Server Pages", &["jsp"]),
    lang("JavaScript", &["js", "jsx", "mjs", "cjs"]),
    lang("Julia", &["jl"]),
    lang("Kotlin", &["kt", "kts"]),
    lang("Lean", &["lean", "hlean"]),
    lang("Literate Agda", &["lagda"]),
    lang("Literate CoffeeScript", &["litcoffee"]),
    lang("Literate Haskell", &["lhs"]),
    lang("Lua", &["lua"]),
    lang("MATLAB", &["m"]),
    LanguageRule {
        name: "Makefile",
        extensions: &["mk", "mak", "make"],
        filenames: &["Makefile", "makefile", "GNUmakefile"],
    },
    lang("Maple", &["mpl"]),
    lang("Markdown", &["md", "markdown", "mdown"]),
    lang("Mathematica", &["nb", "wl", "wls", "ma"]),
    lang("OCaml", &["ml", "mli"]),
    lang("PHP", &["php", "php3", "php4", "php5", "phps"]),
    lang("Pascal", &["pas", "pp", "lpr"]),
    lang("Perl", &["pl", "pm", "pod"]),
    lang("PowerShell", &["ps1", "psm1", "psd1"]),
    lang("Prolog", &["prolog", "pro", "yap"]),
    lang("Protocol Buffer", &["proto"]),
    lang("Python", &["py", "pyw", "pyi", "py3"]),
    lang("R", &["r", "rdata", "rds"]),
    lang("RMarkdown", &["rmd"]),
    lang("Racket", &["rkt", "rktl"]),
    LanguageRule {
        name: "Ruby",
        extensions: &["rb", "rake", "gemspec", "ru"],
        filenames: &["Rakefile", "Gemfile"],
    },
    lang("Rust", &["rs"]),
    lang("SAS", &["sas"]),
    lang("SPARQL", &["sparql", "rq"]),
    lang("SQL", &["sql", "ddl", "dml"]),
    lang("Scala", &["scala", "sc", "sbt"]),
    lang("Scheme", &["scm", "ss", "sld"]),
    lang("Shell", &["sh", "bash", "zsh", "ksh", "tmux"]),
    lang("Smalltalk", &["st"]),
    lang("Solidity", &["sol"]),
    lang("Stan", &["stan"]),
    lang("Standard ML", &["sml", "fun", "sig"]),
    lang("Stata", &["do", "ado"]),
    lang("Swift", &["swift"]),
    lang("SystemVerilog", &["sv", "svh"]),
    lang("TeX", &["tex", "sty", "dtx", "ins"]),
    lang("Tcl", &["tcl", "tm"]),
    lang("Tcsh", &["tcsh", "csh"]),
    lang("Thrift", &["thrift"]),
    lang("TypeScript", &["ts", "tsx", "mts", "cts"]),
    lang("VHDL", &["vhd", "vhdl"]),
    lang("Verilog", &["v", "veo", "vh"]),
    lang("Visual Basic", &["vb", "vbs", "bas", "frm"]),
    lang("XSLT", &["xsl", "xslt"]),
    lang("YAML", &["yml", "yaml"]),
    lang("Yacc", &["y", "yacc"]),
    lang("Zig", &["zig"]),
    lang("reStructuredText", &["rst", "rest"]),
];

const fn lang(name: &'static str, extensions: &'static [&'static str]) -> LanguageRule {
    LanguageRule {
        name,
        extensions,
        filenames: &[],
    }
}

/// Languages that are prose or markup rather than code; the fallback syntax
/// checker never drops these.
pub const PROSE: &[&str] = &["Markdown", "RMarkdown", "reStructuredText", "TeX"];

/// Infers a language tag from a file path. The extension table is consulted
/// first, then special filenames; returns [`UNKNOWN`] when nothing matches.
/// The content argument is accepted for interface stability but is never
/// inspected.
pub fn infer_language(path: &str, _content: &str) -> &'static str {
    let file_name = path.rsplit(['/', '\\']).next().unwrap_or(path);
    if let Some((_, ext)) = file_name.rsplit_once('.') {
        let ext = ext.to_ascii_lowercase();
        for rule in SUPPORTED {
            if rule.extensions.contains(&ext.as_str()) {
                return rule.name;
            }
        }
    }
    for rule in SUPPORTED {
        if rule.filenames.contains(&file_name) {
            return rule.name;
        }
    }
    UNKNOWN
}

pub fn is_supported(tag: &str) -> bool {
    tag == UNKNOWN || SUPPORTED.iter().any(|r| r.name == tag)
}

pub fn is_prose(tag: &str) -> bool {
    PROSE.contains(&tag)
}
