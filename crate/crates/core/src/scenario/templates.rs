//! Small bilateral scenarios for human play.

use crate::scenario::{scenario_from_str, Scenario};

pub const TEMPLATE_NAMES: &[&str] = &["trade", "island", "grocery"];

fn source(name: &str) -> Option<&'static str> {
    match name {
        "trade" => Some(include_str!("../../templates/trade.json")),
        "island" => Some(include_str!("../../templates/island.json")),
        "grocery" => Some(include_str!("../../templates/grocery.json")),
        _ => None,
    }
}

pub fn pilot_template(name: &str) -> Option<Scenario> {
    source(name).map(|text| scenario_from_str(text).expect("bundled templates are valid"))
}

pub fn pilot_templates() -> Vec<Scenario> {
    TEMPLATE_NAMES.iter().filter_map(|n| pilot_template(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_templates_load() {
        let t = pilot_templates();
        assert_eq!(t.len(), 3);
        assert_eq!(t[2].subnegotiation(0).space.cardinality(), 81);
        for s in &t {
            assert_eq!(s.edge_count(), 1);
            assert!(s.metadata().contains_key("briefing"));
        }
    }
}
