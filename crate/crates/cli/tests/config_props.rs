use proptest::prelude::*;

use cmono_cli::{parse_config, Format, RunConfig};

proptest! {
    #[test]
    fn parse_config_never_panics(s in "[a-z_=# 0-9.\n-]{0,80}") {
        let _ = parse_config(&s);
    }

    #[test]
    fn rendered_settings_parse_back(
        precision in prop::option::of(32u32..=4096),
        order in prop::option::of(0usize..=40),
        grid in prop::option::of(1usize..=500),
        seed in prop::option::of(any::<u64>()),
        format in prop::option::of(prop_oneof![Just(Format::Json), Just(Format::Csv), Just(Format::Text)]),
        no_timestamp in any::<bool>(),
    ) {
        let want = RunConfig { precision, order, grid, seed, format, no_timestamp, ..RunConfig::default() };
        let mut text = String::from("# generated\n");
        if let Some(p) = precision { text += &format!("precision = {p}\n"); }
        if let Some(n) = order { text += &format!("order={n}\n"); }
        if let Some(g) = grid { text += &format!("  grid = {g}  # points\n"); }
        if let Some(s) = seed { text += &format!("seed = {s}\n"); }
        if let Some(f) = format { text += &format!("format = {f}\n"); }
        text += &format!("no-timestamp = {no_timestamp}\n");
        prop_assert_eq!(parse_config(&text).unwrap(), want);
    }

    #[test]
    fn merge_prefers_the_second(a in prop::option::of(0usize..50), b in prop::option::of(0usize..50)) {
        let x = RunConfig { order: a, ..RunConfig::default() };
        let y = RunConfig { order: b, ..RunConfig::default() };
        prop_assert_eq!(x.merged(&y).order, b.or(a));
    }
}
