//! Surface files shipped with the crate, embedded at compile time.

/// `(name, file text)` of every built-in surface.
pub const ALL: [(&str, &str); 7] = [
    ("clifford", include_str!("../fixtures/clifford.toml")),
    ("example1", include_str!("../fixtures/example1.toml")),
    ("example2", include_str!("../fixtures/example2.toml")),
    ("flat_family", include_str!("../fixtures/flat_family.toml")),
    ("peanut", include_str!("../fixtures/peanut.toml")),
    ("plane", include_str!("../fixtures/plane.toml")),
    ("sphere", include_str!("../fixtures/sphere.toml")),
];

/// Text of the built-in surface `name`.
pub fn get(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
