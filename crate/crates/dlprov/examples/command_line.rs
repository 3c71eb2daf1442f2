//! The command-line front end, driven in-process.

use dlprov::cli::run;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn run_example() -> String {
    let onto = fixture("dionysus.onto");
    let val = fixture("dionysus_fuzzy.val");
    let calls: Vec<Vec<&str>> = vec![
        vec!["check", &onto],
        vec![
            "provenance",
            &onto,
            "--axiom",
            "Deity(dionysus)",
            "--semiring",
            "fuzzy",
            "--valuation",
            &val,
        ],
        vec![
            "justify",
            &onto,
            "--axiom",
            "Deity(dionysus)",
            "--static",
            "y1,y2,y3",
        ],
    ];
    let mut out = String::new();
    for args in calls {
        let mut stdout = Vec::new();
        let mut stderr = Vec::new();
        let argv = std::iter::once("dlprov").chain(args.iter().copied());
        let code = run(argv, &mut stdout, &mut stderr);
        out += &format!("$ dlprov {} -> exit {code}\n", args[0]);
        out += &String::from_utf8_lossy(&stdout);
    }
    out
}

fn main() {
    print!("{}", run_example());
}
