//! The bundled configurations must reproduce their pinned verdicts exactly.

use flexcore::builtins::reducible_corpus;
use flexcore::reducibility::{check_reducible, Mode};

#[test]
fn every_bundled_configuration_matches_its_pinned_verdict() {
    for case in reducible_corpus(8) {
        let mode = if case.expect_strong { Mode::Strong } else { Mode::Weak };
        let report = check_reducible(&case.config, case.k, &case.family, mode)
            .unwrap_or_else(|e| panic!("{}: {e}", case.name));
        assert_eq!(report.strong, case.expect_strong, "{} strong", case.name);
        assert_eq!(report.weak, case.expect_weak, "{} weak", case.name);
        let fix: Vec<_> = report.fix_set.iter().copied().collect();
        assert_eq!(fix, case.expect_fix, "{} fix set", case.name);
        if case.config.declared_fix().is_some() {
            assert_eq!(report.declared_fix_ok, Some(true), "{} declared fix", case.name);
        }
        assert!(report.witnesses.is_empty() == case.expect_strong, "{} witnesses", case.name);
    }
}
