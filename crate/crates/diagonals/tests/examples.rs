//! Runs every example so that they keep compiling and succeeding.

#[allow(dead_code)]
#[path = "../examples/decide.rs"]
mod decide;
#[allow(dead_code)]
#[path = "../examples/explain.rs"]
mod explain;
#[allow(dead_code)]
#[path = "../examples/sequences.rs"]
mod sequences;
#[allow(dead_code)]
#[path = "../examples/majorization.rs"]
mod majorization;
#[allow(dead_code)]
#[path = "../examples/kernel.rs"]
mod kernel;
#[allow(dead_code)]
#[path = "../examples/schur_horn.rs"]
mod schur_horn;
#[allow(dead_code)]
#[path = "../examples/one_negative_chain.rs"]
mod one_negative_chain;
#[allow(dead_code)]
#[path = "../examples/infmove.rs"]
mod infmove;
#[allow(dead_code)]
#[path = "../examples/transformers.rs"]
mod transformers;
#[allow(dead_code)]
#[path = "../examples/oracle.rs"]
mod oracle;
#[allow(dead_code)]
#[path = "../examples/problem_files.rs"]
mod problem_files;

#[test]
fn examples_run() {
    decide::run_example().expect("decide");
    explain::run_example().expect("explain");
    sequences::run_example().expect("sequences");
    majorization::run_example().expect("majorization");
    kernel::run_example().expect("kernel");
    schur_horn::run_example().expect("schur_horn");
    one_negative_chain::run_example().expect("one_negative_chain");
    infmove::run_example().expect("infmove");
    transformers::run_example().expect("transformers");
    oracle::run_example().expect("oracle");
    problem_files::run_example().expect("problem_files");
}
