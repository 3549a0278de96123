//! Runs every example's `run_example` entry point.

mod fit_kernel_example {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/fit_kernel.rs"
    ));
}

#[test]
fn fit_kernel_runs() {
    fit_kernel_example::run_example().expect("fit_kernel example");
}

mod certify_table_example {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/certify_table.rs"
    ));
}

#[test]
fn certify_table_runs() {
    certify_table_example::run_example().expect("certify_table example");
}

mod scalar_memory_example {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/scalar_memory.rs"
    ));
}

#[test]
fn scalar_memory_runs() {
    scalar_memory_example::run_example().expect("scalar_memory example");
}

mod relaxation_example {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/relaxation.rs"
    ));
}

#[test]
fn relaxation_runs() {
    relaxation_example::run_example().expect("relaxation example");
}

mod convergence_study_example {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/convergence_study.rs"
    ));
}

#[test]
fn convergence_study_runs() {
    convergence_study_example::run_example().expect("convergence_study example");
}

mod nonlocal_oracle_example {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/nonlocal_oracle.rs"
    ));
}

#[test]
fn nonlocal_oracle_runs() {
    nonlocal_oracle_example::run_example().expect("nonlocal_oracle example");
}

mod energy_monitor_example {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/energy_monitor.rs"
    ));
}

#[test]
fn energy_monitor_runs() {
    energy_monitor_example::run_example().expect("energy_monitor example");
}
