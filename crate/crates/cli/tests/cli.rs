use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn waterway(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waterway"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("GARSA_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn dot_counts(dot: &str) -> (usize, usize) {
    (dot.matches("kind=").count(), dot.matches(" -- ").count())
}

#[test]
fn explore_writes_the_network() {
    let dir = tempfile::tempdir().unwrap();
    let o = waterway(&["explore", "builtin:corridor"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let dot = fs::read_to_string(dir.path().join("corridor_network.dot")).unwrap();
    assert_eq!(dot_counts(&dot), (2, 1));
    let svg = fs::read_to_string(dir.path().join("corridor_network.svg")).unwrap();
    assert!(svg.starts_with("<svg"));

    let o = waterway(&["explore", "builtin:tjunction", "--format", "dot"], dir.path());
    assert!(o.status.success());
    let dot = fs::read_to_string(dir.path().join("tjunction_network.dot")).unwrap();
    assert_eq!(dot_counts(&dot), (4, 3));
    assert!(!dir.path().join("tjunction_network.svg").exists());
}

#[test]
fn explore_accepts_a_bare_map_and_an_origin() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("chan.map");
    fs::write(&map, "# waterway map v1\nchain 1 open\nv 0 0\nv 300 0\nchain 2 open\nv 0 60\nv 300 60\n").unwrap();
    let o = waterway(&["explore", map.to_str().unwrap(), "--origin", "100,20"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("chan_network.dot").exists());

    // Without a reference point or --origin there is nowhere to start.
    let o = waterway(&["explore", map.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
}

#[test]
fn missing_input_fails_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = waterway(&["explore", "does/not/exist.map"], &out);
    assert!(!o.status.success());
    assert!(!out.exists());
    let o = waterway(&["assess", "builtin:nonesuch"], &out);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn malformed_map_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("bad.map");
    fs::write(&map, "chain 1 open\nv 0 0\nv 0 zero\nref 1 1\n").unwrap();
    let o = waterway(&["explore", map.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn ring_assessment_has_two_distinct_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = waterway(&["assess", "builtin:ring"], dir.path());
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("ring_assessment.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    let spi = |r: &str| r.rsplit(',').next().unwrap().to_string();
    assert_ne!(spi(rows[0]), spi(rows[1]));
    assert_eq!(spi(rows[0]), "inf");
    for id in [1, 2] {
        assert!(dir.path().join(format!("ring_route{id}_profile.csv")).exists());
    }
    assert!(stdout(&o).contains("chosen route: 1"));
}

#[test]
fn swapping_start_and_goal_gives_the_same_table() {
    let dir = tempfile::tempdir().unwrap();
    let fwd = dir.path().join("fwd");
    let back = dir.path().join("back");
    Command::new(env!("CARGO_BIN_EXE_waterway"))
        .args(["scenarios", "--write"])
        .arg(&fwd)
        .output()
        .unwrap();
    let text = fs::read_to_string(fwd.join("shortcut.scn")).unwrap();
    let swapped: String = text
        .lines()
        .map(|l| {
            if let Some(r) = l.strip_prefix("start ") {
                format!("goal {r}\n")
            } else if let Some(r) = l.strip_prefix("goal ") {
                format!("start {r}\n")
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    let swapped_path = dir.path().join("shortcut_swapped.scn");
    fs::write(&swapped_path, swapped).unwrap();

    assert!(waterway(&["assess", fwd.join("shortcut.scn").to_str().unwrap()], &fwd).status.success());
    assert!(waterway(&["assess", swapped_path.to_str().unwrap()], &back).status.success());
    let a = fs::read_to_string(fwd.join("shortcut_assessment.csv")).unwrap();
    let b = fs::read_to_string(back.join("shortcut_assessment.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lowering_the_threshold_clears_the_corridor() {
    let dir = tempfile::tempdir().unwrap();
    let o = waterway(&["assess", "builtin:corridor", "--xi", "40", "--format", "csv"], dir.path());
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("corridor_assessment.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",inf"));
}

#[test]
fn disconnected_goal_exits_with_no_route() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("split.scn");
    fs::write(
        &scn,
        "scenario split\nstart 50 50\ngoal 350 150\nref 200 40\n\
         chain 1 open\nv 0 0\nv 400 0\nchain 2 open\nv 0 100\nv 400 100\nchain 3 open\nv 0 200\nv 400 200\n",
    )
    .unwrap();
    let o = waterway(&["assess", scn.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("split_assessment.csv").exists());
}

#[test]
fn modify_reaches_every_waypoint_on_the_corridor() {
    let dir = tempfile::tempdir().unwrap();
    let o = waterway(&["modify", "builtin:corridor"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(!out.contains("controller failure"));
    let csv = fs::read_to_string(dir.path().join("corridor_route1_modified.csv")).unwrap();
    assert!(csv.starts_with("t_s,x,y,heading_rad,v_mps,omega_radps\n"));
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    // Deltas hold up to the six printed decimals.
    for w in rows.windows(2) {
        assert!((w[1][4] - w[0][4]).abs() <= 0.5 + 2e-6);
        assert!((w[1][5] - w[0][5]).abs() <= 0.1 + 2e-6);
    }
}

#[test]
fn modify_reports_a_stall_when_turning_is_impossible() {
    let dir = tempfile::tempdir().unwrap();
    Command::new(env!("CARGO_BIN_EXE_waterway"))
        .args(["scenarios", "--write"])
        .arg(dir.path())
        .output()
        .unwrap();
    let path = dir.path().join("bend.scn");
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("omega_max 0\n");
    fs::write(&path, text).unwrap();
    let o = waterway(&["modify", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("stalled at ("));
    // The partial path is still written for inspection.
    assert!(dir.path().join("bend_route1_modified.csv").exists());
}

const CORRIDOR: &str = "chain 1 open\nv 0 0\nv 500 0\nchain 2 open\nv 0 100\nv 500 100\nref 250 50\n";

#[test]
fn compare_writes_both_rows_and_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("straight.scn");
    fs::write(&scn, format!("scenario straight\nstart 20 50\ngoal 480 50\n{CORRIDOR}")).unwrap();
    let o = waterway(&["compare", scn.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let csv = fs::read_to_string(dir.path().join("straight_compare.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[1][0]), ("safest_route", "astar"));
    let min = |r: &Vec<&str>| r[3].parse::<f64>().unwrap();
    // Both follow the same channel; the grid path is off the centerline by at most a cell.
    assert!((min(&rows[0]) - min(&rows[1])).abs() <= 5.0 + 0.5, "{csv}");
    let pgm = fs::read_to_string(dir.path().join("straight_grid.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n"));
}

#[test]
fn compare_marks_a_missing_grid_path() {
    let dir = tempfile::tempdir().unwrap();
    // The start's grid cell touches the shore, so the grid search cannot leave it.
    let scn = dir.path().join("hug.scn");
    fs::write(&scn, format!("scenario hug\nstart 20 1\ngoal 480 50\n{CORRIDOR}")).unwrap();
    let o = waterway(&["compare", scn.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("hug_compare.csv")).unwrap();
    assert!(csv.contains("safest_route,ok,"));
    assert!(csv.contains("astar,no_path,,,"));
    assert!(!dir.path().join("hug_astar.csv").exists());
}

#[test]
fn garsa_out_is_the_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_waterway"))
        .args(["explore", "builtin:corridor", "--format", "csv"])
        .env("GARSA_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("corridor_edges.csv").exists());
}
