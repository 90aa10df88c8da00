use std::path::PathBuf;

use franopt::config::{load_config, ConfigError, ScenarioConfig};
use franopt::model::{validate, NodeKind};

fn shipped() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json")
}

#[test]
fn shipped_config_is_the_reference_dump() {
    let text = std::fs::read_to_string(shipped()).unwrap();
    assert_eq!(text, ScenarioConfig::reference().resolved_json());
}

#[test]
fn shipped_config_describes_two_cells() {
    let c = load_config(&shipped()).unwrap();
    let inst = c.instance();
    let count = |k: NodeKind| inst.nodes.iter().filter(|n| n.kind == k).count();
    assert_eq!(
        [NodeKind::Olt, NodeKind::Onu, NodeKind::Enodeb, NodeKind::Ud].map(count),
        [1, 2, 2, 21]
    );
    assert_eq!(inst.requests.len(), 63);
    assert_eq!(c.profile.slots.len(), 24);
    assert!(validate(&inst).is_empty());
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_config(&shipped().with_file_name("absent.json")).unwrap_err();
    assert!(matches!(err, ConfigError::Io { .. }), "{err}");
}
