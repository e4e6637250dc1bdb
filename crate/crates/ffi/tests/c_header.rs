//! Compiles and runs a small C program against the generated header and
//! the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "lineup.h"

int main(int argc, char **argv) {
    LineupDataset *data = NULL;
    if (lineup_dataset_load(argv[1], argv[2], &data) != LINEUP_STATUS_OK) {
        fprintf(stderr, "%s\n", lineup_last_error());
        return 1;
    }
    LineupLineup *lineup = NULL;
    LineupStatus st = lineup_generate(data, "{\"kind\":\"permutation\",\"target\":\"x2\"}",
                                      20, 5, "scatter", "Which one?", &lineup);
    if (st != LINEUP_STATUS_OK) return 2;
    LineupDifficulty diff;
    if (lineup_difficulty(lineup, "{\"kind\":\"BN\",\"p\":2,\"q\":2}", &diff) != LINEUP_STATUS_OK) return 3;
    char *svg = NULL;
    if (lineup_render_svg(lineup, false, &svg) != LINEUP_STATUS_OK) return 4;
    if (strstr(svg, "data-true") != NULL) return 5;
    if (lineup_generate(data, "{}", 20, 5, "scatter", NULL, &lineup) != LINEUP_STATUS_SCHEMA) return 6;
    printf("m=%zu easy=%d\n", lineup_lineup_m(lineup), (int)diff.easy);
    lineup_string_free(svg);
    lineup_lineup_free(lineup);
    lineup_dataset_free(data);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("liblineup_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler named cc");
    assert!(status.success());

    let csv = dir.path().join("d.csv");
    let schema = dir.path().join("s.json");
    let mut text = String::from("x1,x2\n");
    for i in 0..25 {
        text.push_str(&format!("{i},{}\n", i * 2));
    }
    std::fs::write(&csv, text).unwrap();
    std::fs::write(
        &schema,
        r#"{"columns":[{"name":"x1","kind":"continuous"},{"name":"x2","kind":"continuous"}]}"#,
    )
    .unwrap();
    let out = Command::new(&bin).arg(&csv).arg(&schema).output().unwrap();
    assert!(out.status.success(), "exit {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("m=20 easy="));
}
