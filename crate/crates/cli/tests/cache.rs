use std::fs;

use bfun_cli::cache::{Cache, CacheEntry, VERSION_TAG};
use bfun_core::arith::MultiPoly;
use bfun_core::cyclic::cyclic_det;

#[test]
fn put_then_get_round_trips_f3() {
    let dir = tempfile::tempdir().unwrap();
    let c = Cache::open(Some(dir.path()));
    assert!(c.enabled());
    let f = cyclic_det(3).unwrap();
    c.put("cyclic_det", "n=3", &f.to_text());
    let back = MultiPoly::from_text(&c.get("cyclic_det", "n=3").unwrap()).unwrap();
    assert_eq!(back, f);
}

#[test]
fn version_tag_change_is_a_miss() {
    let dir = tempfile::tempdir().unwrap();
    Cache::with_tag(Some(dir.path()), "old").put("op", "p", "payload");
    assert_eq!(
        Cache::with_tag(Some(dir.path()), "old")
            .get("op", "p")
            .as_deref(),
        Some("payload")
    );
    assert!(Cache::with_tag(Some(dir.path()), "new")
        .get("op", "p")
        .is_none());
    assert_ne!(
        Cache::with_tag(None, "old").key("op", "p"),
        Cache::with_tag(None, "new").key("op", "p")
    );
}

#[test]
fn tampered_payload_is_a_miss_and_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let c = Cache::open(Some(dir.path()));
    c.put("op", "p", "good");
    let path = dir.path().join(format!("{}.json", c.key("op", "p")));
    let mut e: CacheEntry = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(e.version, VERSION_TAG);
    e.payload = "evil".into();
    fs::write(&path, serde_json::to_string(&e).unwrap()).unwrap();
    assert!(c.get("op", "p").is_none());

    let mut calls = 0;
    let v: Result<String, ()> = c.get_or(
        "op",
        "p",
        |s: &String| s.clone(),
        |s| Some(s.to_string()),
        || {
            calls += 1;
            Ok("good".to_string())
        },
    );
    assert_eq!((v.unwrap().as_str(), calls), ("good", 1));
    assert_eq!(c.get("op", "p").as_deref(), Some("good"));
}

#[test]
fn garbage_file_is_a_miss() {
    let dir = tempfile::tempdir().unwrap();
    let c = Cache::open(Some(dir.path()));
    fs::write(
        dir.path().join(format!("{}.json", c.key("op", "p"))),
        "not json",
    )
    .unwrap();
    assert!(c.get("op", "p").is_none());
}

#[test]
fn unwritable_directory_disables_cache() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let c = Cache::open(Some(&blocker.join("sub")));
    assert!(!c.enabled());
    c.put("op", "p", "v");
    assert!(c.get("op", "p").is_none());
}

#[test]
fn keys_separate_op_and_params() {
    let c = Cache::disabled();
    assert_ne!(c.key("ab", "c"), c.key("a", "bc"));
    assert_eq!(c.key("op", "p").len(), 64);
}
