use std::io::{stderr, stdout};

fn main() {
    let status = nhtopo::cli::main_with(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(status);
}
