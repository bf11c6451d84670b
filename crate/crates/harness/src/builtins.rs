//! Builtin scenario library, embedded from `configs/`.

pub const NAMES: [&str; 11] = [
    "appendix",
    "point-on-Z256",
    "subgroup-2Z256",
    "progression-Z256",
    "sphere-Z10^3",
    "r-infinity-Z256",
    "l2l2-Z64",
    "violation-Z64",
    "ckak-Z64",
    "union-Z256",
    "decompose-Z256",
];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "appendix" => include_str!("../configs/appendix.toml"),
        "point-on-Z256" => include_str!("../configs/point-on-Z256.toml"),
        "subgroup-2Z256" => include_str!("../configs/subgroup-2Z256.toml"),
        "progression-Z256" => include_str!("../configs/progression-Z256.toml"),
        "sphere-Z10^3" => include_str!("../configs/sphere-Z103.toml"),
        "r-infinity-Z256" => include_str!("../configs/r-infinity-Z256.toml"),
        "l2l2-Z64" => include_str!("../configs/l2l2-Z64.toml"),
        "violation-Z64" => include_str!("../configs/violation-Z64.toml"),
        "ckak-Z64" => include_str!("../configs/ckak-Z64.toml"),
        "union-Z256" => include_str!("../configs/union-Z256.toml"),
        "decompose-Z256" => include_str!("../configs/decompose-Z256.toml"),
        _ => return None,
    })
}
