fn main() {
    let run = wordmap_cli::execute(std::env::args_os());
    print!("{}", run.stdout);
    eprint!("{}", run.stderr);
    std::process::exit(run.code);
}
