//! Scenario files shipped with the binary, addressable by name via `--example`.

/// A bundled scenario: its name and JSON source.
pub struct Bundled {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(Bundled { name: $name, source: include_str!(concat!("../scenarios/", $name, ".json")) }),*]
    };
}

pub const SCENARIOS: &[Bundled] = bundle!(
    "t3_obstructed",
    "t4_rank_two_obstructed",
    "t4_family_a",
    "t4_family_b",
    "t4_dgla_unobstructed",
    "t5_projection_obstructed",
    "t4_variation",
);

pub fn find(name: &str) -> Option<&'static Bundled> {
    SCENARIOS.iter().find(|b| b.name == name)
}

impl Bundled {
    /// The scenario's `description` field, or an empty string if it does not parse.
    pub fn description(&self) -> String {
        crate::Scenario::from_json(self.source).map(|s| s.description).unwrap_or_default()
    }
}
