use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "fpa.h"

int main(void) {
    FpaSeries *c = NULL, *inv = NULL;
    if (fpa_series_parse("nc alphabet=2 components=1 maxdeg=4\ne 1\nx1 -1\n", &c) != FPA_STATUS_OK) return 1;
    if (fpa_shuffle_inverse(c, -1, &inv) != FPA_STATUS_OK) return 2;
    char *k = NULL;
    double approx = 0;
    if (fpa_series_coeff(inv, "x1x1x1", 0, &k, &approx) != FPA_STATUS_OK) return 3;
    if (strcmp(k, "6") != 0 || approx != 6.0) return 4;
    fpa_string_free(k);
    FpaSeries *bad = NULL;
    if (fpa_series_parse("garbage", &bad) != FPA_STATUS_PARSE || bad != NULL) return 5;
    if (strlen(fpa_last_error_message()) == 0) return 6;
    fpa_series_free(inv);
    fpa_series_free(c);
    puts("ok");
    return 0;
}
"#;

#[test]
fn header_compiles_and_links() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok()) else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libfpa_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("fpa_smoke.c");
    let bin = dir.join("fpa_smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
