//! Runs every acceptance criterion and prints one verdict line per criterion.
//! Criterion 10 additionally runs the built binary under one and four worker
//! threads and compares the written artifacts byte for byte.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use rscc::report::{self, Outcome};

fn artifacts_under(threads: &str, dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let status = Command::new(env!("CARGO_BIN_EXE_rscc"))
        .args(["report", "--only", "7,10", "--out"])
        .arg(dir)
        .env("RSCC_THREADS", threads)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("spawn rscc");
    assert!(status.success(), "rscc report exited with {status}");
    std::fs::read_dir(dir)
        .expect("report dir")
        .map(|e| {
            let e = e.expect("dir entry");
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).expect("artifact"))
        })
        .collect()
}

fn main() {
    let (mut outcomes, _) = report::run(&[], None, |_| {}).expect("report run");

    let tmp = tempfile::tempdir().expect("tempdir");
    let one = artifacts_under("1", &tmp.path().join("t1"));
    let four = artifacts_under("4", &tmp.path().join("t4"));
    let same_files = !one.is_empty() && one == four;
    let ten: &mut Outcome = outcomes.iter_mut().find(|o| o.id == 10).expect("criterion 10");
    ten.passed &= same_files;
    ten.detail = format!("{}; binary artifacts identical under RSCC_THREADS=1 and 4: {same_files}", ten.detail);

    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
