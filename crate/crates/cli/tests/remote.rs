use std::process::Command;

use fosgraph_testkit::fixture_dir;
use serde_json::Value;

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fosgraph"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn server_mode_matches_local_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let snap = tmp.path().join("snap");
    let s = snap.to_str().unwrap();
    let ingest = run(&[
        "ingest",
        "--input",
        fixture_dir().to_str().unwrap(),
        "--snapshot",
        s,
    ]);
    assert_eq!(ingest.status.code(), Some(0));

    let rt = tokio::runtime::Runtime::new().unwrap();
    let config = fosgraph_server::ServerConfig {
        bind: "127.0.0.1:0".parse().unwrap(),
        snapshot_dir: snap.clone(),
        ..Default::default()
    };
    let server = rt.block_on(fosgraph_server::Server::bind(config)).unwrap();
    let url = format!("http://{}", server.local_addr());
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let handle = rt.spawn(server.run_until(async {
        let _ = stopped.await;
    }));

    let local = run(&["search", "knowledge graphs", "--snapshot", s]);
    let remote = run(&["search", "knowledge graphs", "--server", &url]);
    assert_eq!(
        remote.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&remote.stderr)
    );
    let a: Value = serde_json::from_slice(&local.stdout).unwrap();
    let b: Value = serde_json::from_slice(&remote.stdout).unwrap();
    assert_eq!(a, b);

    let local = run(&["trends", "--level", "1", "--snapshot", s]);
    let remote = run(&["trends", "--level", "1", "--server", &url]);
    assert_eq!(local.stdout, remote.stdout);

    let bad = run(&["trends", "--level", "9", "--server", &url]);
    assert_eq!(bad.status.code(), Some(1));

    stop.send(()).unwrap();
    rt.block_on(handle).unwrap().unwrap();
}
