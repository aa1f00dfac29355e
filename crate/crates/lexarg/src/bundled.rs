//! Case files shipped with the crate.

pub const THREE_NODE: &str = include_str!("../cases/three_node.case");
pub const EXAMPLE1: &str = include_str!("../cases/example1.case");
pub const EXAMPLE2: &str = include_str!("../cases/example2.case");
pub const CAMERA: &str = include_str!("../cases/camera.case");

pub const NAMES: [&str; 4] = ["three_node", "example1", "example2", "camera"];

pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "three_node" => Some(THREE_NODE),
        "example1" => Some(EXAMPLE1),
        "example2" => Some(EXAMPLE2),
        "camera" => Some(CAMERA),
        _ => None,
    }
}
