//! CLI behavior: exit codes and diagnostics.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catmos"))
}

#[test]
fn invalid_scenario_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scn");
    std::fs::write(&path, "query = temp,50,10,5,100\n").unwrap();
    let output = bin()
        .args(["run", "--scenario"])
        .arg(&path)
        .args(["--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("error:"), "stderr was: {stderr}");
    assert!(stderr.contains("invalid query"), "stderr was: {stderr}");
}

#[test]
fn unknown_scenario_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scn");
    std::fs::write(&path, "bandwidth = 9000\nquery = temp,10,50,5\n").unwrap();
    let output = bin()
        .args(["merge-demo", "--scenario"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown key"));
}

#[test]
fn missing_input_file_fails() {
    let output = bin()
        .args(["compress", "--codec", "huffman", "--in", "/nonexistent/x"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));
}

#[test]
fn unknown_codec_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data");
    std::fs::write(&path, b"abc").unwrap();
    let output = bin()
        .args(["compress", "--codec", "gzip", "--in"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown codec"));
}

#[test]
fn compress_prints_sizes_and_factor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data");
    std::fs::write(&path, b"abababababab").unwrap();
    let output = bin()
        .args(["compress", "--codec", "huffman", "--in"])
        .arg(&path)
        .args(["--mode", "self-contained"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("original_bytes: 12"));
    assert!(stdout.contains("compressed_bytes:"));
    assert!(stdout.contains("factor:"));
}

#[test]
fn tables_exits_zero_and_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["tables", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    for name in ["table1.csv", "table2.csv", "table3.csv"] {
        let data = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(data.lines().count(), 11, "{name} should have header + 10 rows");
        assert!(data.lines().next().unwrap().contains(','));
    }
}
