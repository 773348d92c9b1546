use confex_core::active::{active_all, active_by_events, active_by_timestamps};
use confex_core::corpus::{AccessEvent, AccessFlags, FileEntry, InstanceSnapshot, SnapshotBuilder};
use proptest::prelude::*;

fn snapshot() -> impl Strategy<Value = InstanceSnapshot> {
    let files = prop::collection::btree_map("/[a-z]{1,6}", prop::option::weighted(0.9, 0i64..100), 0..20);
    let events = prop::collection::vec((0i64..100, any::<bool>(), 0usize..20), 0..40);
    (files, events).prop_map(|(files, mut events)| {
        let paths: Vec<String> = files.keys().cloned().collect();
        let mut b = SnapshotBuilder::new("i");
        for (p, atime) in &files {
            b.insert(FileEntry::text_file(p.as_str(), "x").with_times(0, *atime))
                .unwrap();
        }
        events.sort_by_key(|e| e.0);
        let log = events
            .into_iter()
            .filter(|_| !paths.is_empty())
            .map(|(t, read, i)| AccessEvent {
                timestamp: t,
                flags: if read { AccessFlags::Read } else { AccessFlags::Write },
                path: paths[i % paths.len()].clone(),
            })
            .collect();
        b.access_log(log);
        b.build()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn later_cutoff_selects_a_subset(s in snapshot(), a in 0i64..110, b in 0i64..110) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let low = active_by_timestamps(&s, lo).active_paths;
        let high = active_by_timestamps(&s, hi).active_paths;
        prop_assert!(high.is_subset(&low));
    }

    #[test]
    fn wider_window_selects_a_superset(s in snapshot(), a in 1u64..120, b in 1u64..120) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = active_by_events(&s, lo).unwrap().active_paths;
        let big = active_by_events(&s, hi).unwrap().active_paths;
        prop_assert!(small.is_subset(&big));
    }

    #[test]
    fn every_method_stays_within_the_snapshot(s in snapshot(), cutoff in 0i64..110, w in 1u64..120) {
        let all = active_all(&s).active_paths;
        prop_assert_eq!(all.len(), s.len());
        prop_assert!(active_by_timestamps(&s, cutoff).active_paths.is_subset(&all));
        prop_assert!(active_by_events(&s, w).unwrap().active_paths.is_subset(&all));
    }
}
