//! Compiles a small C program against the generated header and the static
//! library, then runs it. Skipped (with a note) when no C compiler is found.

use std::path::PathBuf;
use std::process::Command;

fn compiler() -> Option<String> {
    let candidates = [std::env::var("CC").ok(), Some("cc".into()), Some("clang".into()), Some("gcc".into())];
    candidates
        .into_iter()
        .flatten()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
}

/// Static library built alongside this test binary (in the profile
/// directory or its `deps/` subdirectory).
fn static_library() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let deps = exe.parent()?;
    [deps.to_path_buf(), deps.parent()?.to_path_buf()].into_iter().map(|d| d.join("libqd3_ffi.a")).find(|p| p.exists())
}

#[test]
fn c_program_links_and_runs() {
    if !cfg!(unix) {
        eprintln!("C smoke test only runs on Unix; skipping");
        return;
    }
    let Some(cc) = compiler() else {
        eprintln!("no C compiler available; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = static_library().expect("libqd3_ffi.a is built with the test");
    let out = tempfile::tempdir().expect("temp dir");
    let exe = out.path().join("smoke");
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("compiler runs");
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().expect("smoke program runs");
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "stdout: {stdout}\nstderr: {}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout.contains(&format!("ok {}", env!("CARGO_PKG_VERSION"))), "{stdout}");
}
