use clap::Parser;

fn main() {
    let cli = crashlens::cli::Cli::parse();
    let code = crashlens::cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
