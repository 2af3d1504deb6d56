fn main() {
    std::process::exit(orbitlab::run());
}
