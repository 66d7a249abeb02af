use std::path::Path;

use super::scenario::Scenario;
use crate::error::{Error, Result};

/// `(name, config text)` for every shipped scenario.
pub const BUILTIN_SCENARIOS: [(&str, &str); 9] = [
    ("fig2", include_str!("../../scenarios/fig2.cfg")),
    ("fig3", include_str!("../../scenarios/fig3.cfg")),
    (
        "fig3-quantum",
        include_str!("../../scenarios/fig3-quantum.cfg"),
    ),
    ("fig4", include_str!("../../scenarios/fig4.cfg")),
    ("fig4-mott", include_str!("../../scenarios/fig4-mott.cfg")),
    ("fig5", include_str!("../../scenarios/fig5.cfg")),
    ("fig6", include_str!("../../scenarios/fig6.cfg")),
    (
        "damped-cavity",
        include_str!("../../scenarios/damped-cavity.cfg"),
    ),
    (
        "bell-negativity",
        include_str!("../../scenarios/bell-negativity.cfg"),
    ),
];

pub fn builtin_scenario(name: &str) -> Option<Result<Scenario>> {
    BUILTIN_SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::from_config_str(text))
}

/// `(name, description)` pairs in catalogue order.
pub fn list_builtin_scenarios() -> Vec<(String, String)> {
    BUILTIN_SCENARIOS
        .iter()
        .map(|(name, text)| {
            let description = Scenario::from_config_str(text)
                .map(|s| s.description)
                .unwrap_or_else(|e| format!("(invalid: {e})"));
            (name.to_string(), description)
        })
        .collect()
}

/// An existing file path wins over a built-in name.
pub fn resolve_scenario(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.is_file() {
        return Scenario::load(path);
    }
    builtin_scenario(arg).unwrap_or_else(|| {
        Err(Error::ConfigField {
            field: "scenario".into(),
            message: format!(
                "`{arg}` is neither a readable file nor a built-in scenario (see `seesaw list`)"
            ),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Model;

    #[test]
    fn every_builtin_loads_and_round_trips() {
        for (name, text) in BUILTIN_SCENARIOS {
            let s = Scenario::from_config_str(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, name);
            assert!(!s.description.is_empty());
            let again = Scenario::from_config_str(&s.to_config_string()).unwrap();
            assert_eq!(again, s);
        }
        let names: Vec<_> = list_builtin_scenarios()
            .into_iter()
            .map(|(n, _)| n)
            .collect();
        for f in ["fig2", "fig3", "fig4", "fig5", "fig6"] {
            assert!(names.iter().any(|n| n == f));
        }
    }

    #[test]
    fn fig4_parameters() {
        let s = builtin_scenario("fig4").unwrap().unwrap();
        let Model::TwoSiteQuantum(p) = s.model else {
            panic!("fig4 model")
        };
        assert_eq!(
            (p.u0, p.delta_c, p.tunneling, p.jtilde, p.n_atoms),
            (-2.0, -6.0, 0.01, 1.6, 2)
        );
    }

    #[test]
    fn zero_photon_cutoff_names_the_field() {
        let text = BUILTIN_SCENARIOS[3]
            .1
            .replace("photon_cutoff = 16", "photon_cutoff = 0");
        match Scenario::from_config_str(&text).unwrap_err() {
            Error::ConfigField { field, .. } => assert_eq!(field, "params.photon_cutoff"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_name_is_a_config_error() {
        assert!(resolve_scenario("no-such-scenario")
            .unwrap_err()
            .is_config());
    }
}
