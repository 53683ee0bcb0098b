// SPDX-License-Identifier: Apache-2.0

//! The files under `fixtures/` and `configs/` must match what the library
//! generates. Set `FABRIC_EST_BLESS=1` to rewrite them.

use std::fs;
use std::path::{Path, PathBuf};

use fabric_est::cost::{config_to_json, load_config, load_profile, PAPER_DEFAULT_PROFILE};
use fabric_est::fixtures::Fixture;
use fabric_est::text::{parse, print};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn check(path: &Path, expected: &str) {
    if std::env::var_os("FABRIC_EST_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, expected).unwrap();
    }
    let actual = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{} is stale", path.display());
}

pub fn fixture_path(f: Fixture) -> PathBuf {
    root()
        .join("fixtures")
        .join(format!("{}.scifr", f.function_name()))
}

#[test]
fn shipped_fixtures_match_generators() {
    for f in Fixture::ALL {
        let g = f.generate().unwrap();
        let path = fixture_path(f);
        check(&path, &print(&g));
        let parsed = parse(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(parsed.is_isomorphic(&g), "{f}");
    }
}

#[test]
fn shipped_config_matches_builtin_profile() {
    let (fabric, costs) = load_profile(PAPER_DEFAULT_PROFILE).unwrap();
    let path = root().join("configs").join("paper-default.json");
    check(&path, &config_to_json(&fabric, &costs));
    let (f2, c2) = load_config(&path).unwrap();
    assert_eq!(f2, fabric);
    assert_eq!(c2, costs);
}
