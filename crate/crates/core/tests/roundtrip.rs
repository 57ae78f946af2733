mod common;

use proptest::prelude::*;
use tccp::syntax::{parse_agent, parse_formula};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn agents_print_then_parse_to_themselves(a in common::agent(&common::medium(), 4, vec!["p".into(), "rec".into()])) {
        let lat = common::medium();
        let text = a.display(&lat).to_string();
        let back = parse_agent(&lat, &text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &a, "{}", text);
        prop_assert_eq!(back.display(&lat).to_string(), text);
    }

    #[test]
    fn formulas_print_then_parse_to_themselves(f in common::formula(&common::medium(), 4)) {
        let lat = common::medium();
        let text = f.display(&lat).to_string();
        let back = parse_formula(&lat, &text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &f, "{}", text);
        prop_assert_eq!(back.display(&lat).to_string(), text);
    }
}
