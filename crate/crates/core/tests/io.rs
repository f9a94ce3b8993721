use std::fs;

use waterway::map_io::{load_map, load_scenario_file, save_map, save_scenario};
use waterway::pipeline::assess_scenario;
use waterway::scenarios;
use waterway::Map;

#[test]
fn scenario_file_resolves_a_sibling_map() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenarios::ring::<f64>();
    fs::create_dir(dir.path().join("maps")).unwrap();
    fs::write(dir.path().join("maps/ring.map"), save_map(&s.map)).unwrap();
    let text = "# waterway scenario v1\nscenario ring\nmap maps/ring.map\nstart -700 0\ngoal 1700 0\nxi 70\n";
    let path = dir.path().join("ring.scn");
    fs::write(&path, text).unwrap();

    let loaded = load_scenario_file::<f64>(&path).unwrap();
    assert_eq!(loaded.map, s.map);
    let a = assess_scenario(&loaded).unwrap();
    let b = assess_scenario(&s).unwrap();
    let key = |x: &waterway::Assessed<f64>| x.ranked.iter().map(|r| (r.route, r.spi)).collect::<Vec<_>>();
    assert_eq!(key(&a), key(&b));
}

#[test]
fn missing_map_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.scn");
    fs::write(&path, "scenario x\nmap nowhere.map\nstart 0 0\ngoal 1 1\n").unwrap();
    let err = load_scenario_file::<f64>(&path).unwrap_err();
    assert!(err.0.iter().any(|e| e.line == 2), "{err}");
}

#[test]
fn saved_scenarios_reload_to_the_same_ranking() {
    for s in scenarios::builtin_scenarios::<f64>() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(format!("{}.scn", s.name));
        fs::write(&path, save_scenario(&s)).unwrap();
        let back = load_scenario_file::<f64>(&path).unwrap();
        assert_eq!(back.name, s.name);
        let a = assess_scenario(&back).unwrap();
        let b = assess_scenario(&s).unwrap();
        assert_eq!(a.ranked.len(), b.ranked.len(), "{}", s.name);
        for (x, y) in a.ranked.iter().zip(&b.ranked) {
            assert_eq!(x.route, y.route, "{}", s.name);
            assert!((x.min_width - y.min_width).abs() < 1e-3, "{}", s.name);
        }
    }
}

#[test]
fn hand_written_map_with_comments_and_blank_lines() {
    let text = "# waterway map v1\n\nname pond\n# the shore\nchain 1 closed\nv 0 0\nv 100 0\nv 100 100\nv 0 100\npoint 7 50 50\nref 20 20\n";
    let map: Map = load_map(text).unwrap();
    assert_eq!(map.name(), Some("pond"));
    assert_eq!(map.chains().len(), 1);
    assert_eq!(map.segment_count(), 4);
    assert_eq!(map.points().len(), 1);
    assert!((map.clearance(waterway::Point::new(50.0, 40.0)) - 10.0).abs() < 1e-12);
    // Canonical text is a fixed point.
    let saved = save_map(&map);
    assert_eq!(save_map(&load_map::<f64>(&saved).unwrap()), saved);
}
