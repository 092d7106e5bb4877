//! Thin executable wrapper; everything lives in the library's `cli` module.

fn main() {
    std::process::exit(spinphase::cli::main_entry());
}
