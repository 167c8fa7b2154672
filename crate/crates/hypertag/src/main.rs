fn main() {
    if let Err(e) = hypertag::cli::run() {
        eprintln!("error kind={} message={e}", e.kind());
        std::process::exit(1);
    }
}
