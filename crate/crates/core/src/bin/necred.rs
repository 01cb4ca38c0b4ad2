fn main() {
    let (code, report) = nec_reduction::cli::run(std::env::args_os());
    let text = nec_reduction::io::to_canonical_json(&report).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}\n"));
    print!("{text}");
    std::process::exit(code);
}
