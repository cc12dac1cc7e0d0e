use std::collections::BTreeMap;
use std::path::PathBuf;

use proptest::prelude::*;
use qhlab::config::build;
use qhlab::table::{read_columns, write_table, Cell};
use qhlab::Command;

proptest! {
    #[test]
    fn csv_floats_round_trip(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 1..40)) {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("t.csv");
        write_table(&path, &["v"], values.iter().map(|v| vec![Cell::from(*v)])).unwrap();
        let back = read_columns(&path, &["v"]).unwrap();
        prop_assert_eq!(&back[0], &values);
    }

    #[test]
    fn later_pairs_override_earlier(first in 2i64..50, second in 2i64..50, ell in 0.1f64..10.0) {
        let pairs = vec![
            ("N".to_string(), first.to_string()),
            ("ell".to_string(), ell.to_string()),
            ("N".to_string(), second.to_string()),
        ];
        let cfg = build(Command::Instability, pairs, PathBuf::from("o")).unwrap();
        prop_assert_eq!(cfg.int("N"), second);
        prop_assert_eq!(cfg.f64("ell"), ell);
    }

    #[test]
    fn unknown_keys_are_rejected(key in "[a-z]{3,10}") {
        let known: BTreeMap<&str, ()> = Command::Quantize.schema().iter().map(|k| (k.name, ())).collect();
        prop_assume!(!known.contains_key(key.as_str()));
        let e = build(Command::Quantize, vec![(key, "1".into())], PathBuf::from("o")).unwrap_err();
        prop_assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn exponents_below_two_are_rejected(n in -5i64..2) {
        let e = build(Command::Instability, vec![("N".into(), n.to_string())], PathBuf::from("o")).unwrap_err();
        prop_assert_eq!(e.exit_code(), 2);
    }
}
