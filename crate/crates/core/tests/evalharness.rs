use std::path::PathBuf;

use navcon_core::evalharness::{
    aggregate, bundled_records, emit_report, load_corpus, load_records, load_scene_dir, parse_records, render_report,
    run_live_eval, table_csv, with_representation, AggregateTable, Category, CorpusEntry, EvalError, EvalReport,
    Grouping, Percent, ReportFormat, StageRecord, Stages,
};
use navcon_core::pipeline::{CodegenConfig, PipelineConfig};
use navcon_core::projection::Mode;
use navcon_core::DATA_DIR;
use proptest::prelude::*;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(DATA_DIR).join(rel)
}

fn cfg() -> PipelineConfig {
    PipelineConfig::new(CodegenConfig::fixtures(data("fixtures")), 0)
}

/// Rows rendered the way the published tables print them.
fn rows(t: &AggregateTable) -> Vec<String> {
    t.rows
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.percentages.iter().map(|p| p.to_string()).collect();
            format!("{} & {} & {}", r.group, r.count, cells.join(" & "))
        })
        .collect()
}

#[test]
fn representation_table_matches_the_published_one() {
    let t = aggregate(&bundled_records(), Grouping::Representation).unwrap();
    assert_eq!(t.columns, ["a_pct", "b_pct"]);
    assert_eq!(
        rows(&t),
        [
            "Generic & 12 & 100 & 100",
            "Specific & 12 & 91.67 & 66.67",
            "Relational & 15 & 86.67 & 53.33",
            "Contextual & 11 & 81.82 & 45.45",
            "Total & 50 & 90 & 66",
        ]
    );
}

#[test]
fn category_table_matches_the_published_one() {
    let t = aggregate(&bundled_records(), Grouping::Category).unwrap();
    assert_eq!(t.columns, ["code_pct", "od_pct", "wp_pct", "path_exec_pct"]);
    assert_eq!(
        rows(&t),
        [
            "Generic & 22 & 100 & 81.82 & 68.18 & 68.18",
            "Specific & 19 & 89.47 & 89.47 & 78.95 & 73.68",
            "Relational & 44 & 70.45 & 56.82 & 56.82 & 56.82",
            "Contextual & 29 & 65.52 & 41.38 & 41.38 & 41.38",
            "Total & 114 & 78.07 & 63.16 & 58.77 & 57.89",
        ]
    );
}

#[test]
fn scene_table_matches_the_published_one() {
    let t = aggregate(&bundled_records(), Grouping::Scene).unwrap();
    assert_eq!(
        rows(&t),
        [
            "Theater & 30 & 90 & 70 & 66.67 & 63.33",
            "Lobby & 29 & 65.52 & 48.28 & 44.83 & 44.83",
            "Outdoor & 24 & 87.5 & 79.17 & 70.83 & 70.83",
            "Courtyard & 31 & 70.97 & 58.06 & 54.84 & 54.84",
            "Total & 114 & 78.07 & 63.16 & 58.77 & 57.89",
        ]
    );
}

#[test]
fn bundled_records_shape() {
    let r = bundled_records();
    let four = r.iter().filter(|x| x.stages.is_four()).count();
    assert_eq!((four, r.len() - four), (114, 50));
    assert!(r.iter().all(|x| x.stages.is_monotone()));
    let classroom: Vec<&StageRecord> = r.iter().filter(|x| x.scene == "classroom").collect();
    assert_eq!(classroom.len(), 50);
    let counts: Vec<usize> = Category::ALL
        .iter()
        .map(|c| classroom.iter().filter(|x| x.category == *c).count())
        .collect();
    assert_eq!(counts, [12, 12, 15, 11]);
    assert!(classroom.iter().all(|x| !x.stages.is_four()));
    assert_eq!(load_records(data("records.json")).unwrap(), r);
}

#[test]
fn category_totals_are_sums_over_scenes() {
    let r = bundled_records();
    let by_cat = aggregate(&r, Grouping::Category).unwrap();
    let by_scene = aggregate(&r, Grouping::Scene).unwrap();
    let n: usize = by_cat.rows[..by_cat.rows.len() - 1].iter().map(|x| x.count).sum();
    let m: usize = by_scene.rows[..by_scene.rows.len() - 1].iter().map(|x| x.count).sum();
    assert_eq!((n, m), (114, 114));
    assert_eq!(by_cat.total(), by_scene.total());
}

#[test]
fn non_monotone_record_is_rejected_with_its_row() {
    let text = r#"[
        {"scene": "lobby", "category": "generic", "sentence": "ok", "stages": {"code": true, "od": true, "wp": false, "path_exec": false}},
        {"scene": "lobby", "category": "specific", "sentence": "Go to the red door", "stages": {"code": true, "od": false, "wp": true, "path_exec": false}}
    ]"#;
    match parse_records(text, "inline") {
        Err(EvalError::NonMonotone { row, scene, sentence }) => {
            assert_eq!((row, scene.as_str(), sentence.as_str()), (1, "lobby", "Go to the red door"));
        }
        other => panic!("{other:?}"),
    }
    let ab = r#"[{"scene": "classroom", "category": "generic", "sentence": "x", "stages": {"a": false, "b": true}}]"#;
    assert_eq!(parse_records(ab, "inline").unwrap()[0].stages, Stages::Rep { a: false, b: true });
}

#[test]
fn malformed_records_name_the_field() {
    let text = r#"[{"scene": "lobby", "category": "sideways", "sentence": "x", "stages": {"a": true, "b": true}}]"#;
    match parse_records(text, "inline") {
        Err(EvalError::Parse { path, message }) => {
            assert_eq!(path, "inline");
            assert!(message.contains("[0].category"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(load_records("/nonexistent/records.json"), Err(EvalError::Io { .. })));
}

#[test]
fn empty_groupings_are_errors() {
    assert!(matches!(aggregate(&[], Grouping::Category), Err(EvalError::Empty)));
    let only_ab: Vec<StageRecord> = bundled_records().into_iter().filter(|r| !r.stages.is_four()).collect();
    assert!(matches!(aggregate(&only_ab, Grouping::Scene), Err(EvalError::Empty)));
}

#[test]
fn csv_and_json_reports() {
    let r = bundled_records();
    let t = aggregate(&r, Grouping::Category).unwrap();
    let csv = table_csv(&t);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "group,count,code_pct,od_pct,wp_pct,path_exec_pct");
    assert_eq!(lines[1], "Generic,22,100,81.82,68.18,68.18");
    assert_eq!(lines[5], "Total,114,78.07,63.16,58.77,57.89");

    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    emit_report(&t, &r, ReportFormat::from_path(&json_path), &json_path).unwrap();
    let back: EvalReport = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(back.table, t);
    assert_eq!(back.records, r);
    let csv_path = dir.path().join("report.csv");
    emit_report(&t, &r, ReportFormat::from_path(&csv_path), &csv_path).unwrap();
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), csv);
    assert_eq!(render_report(&t, &r, ReportFormat::Csv), csv);
    let bad = dir.path().join("missing/report.csv");
    assert!(matches!(emit_report(&t, &r, ReportFormat::Csv, &bad), Err(EvalError::Io { .. })));
}

#[test]
fn fixed_width_percent_strings() {
    let cases = [((2, 3), "66.67"), ((7, 8), "87.50"), ((1, 1), "100"), ((0, 5), "0"), ((1, 8), "12.50")];
    for ((p, c), s) in cases {
        assert_eq!(Percent::of(p, c).fixed2(), s, "{p}/{c}");
    }
    assert_eq!(Percent::of(7, 8).to_string(), "87.5");
    assert_eq!(Percent::of(9, 10).to_string(), "90");
}

/// Half-up rounding of 100 p / c to two decimals by quotient and remainder.
fn percent_oracle(p: usize, c: usize) -> String {
    let n = 10_000 * p as u128;
    let (q, r) = (n / c as u128, n % c as u128);
    let h = if 2 * r >= c as u128 { q + 1 } else { q };
    let s = format!("{}.{:02}", h / 100, h % 100);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

proptest! {
    #[test]
    fn percent_display_matches_oracle(c in 1usize..2000, frac in 0.0f64..=1.0) {
        let p = ((c as f64) * frac).floor() as usize;
        let pc = Percent::of(p, c);
        prop_assert_eq!(pc.to_string(), percent_oracle(p, c));
        let json = serde_json::to_string(&pc).unwrap();
        prop_assert_eq!(serde_json::from_str::<Percent>(&json).unwrap(), pc);
    }

    #[test]
    fn aggregation_counts_add_up(flags in proptest::collection::vec((0usize..4, 0usize..5, 0usize..5), 1..60)) {
        let records: Vec<StageRecord> = flags
            .iter()
            .enumerate()
            .map(|(i, &(cat, scene, passed))| {
                let f = |k: usize| passed > k;
                StageRecord {
                    scene: format!("s{scene}"),
                    category: Category::ALL[cat],
                    sentence: format!("sentence {i}"),
                    stages: Stages::Four { code: f(0), od: f(1), wp: f(2), path_exec: f(3) },
                }
            })
            .collect();
        for g in [Grouping::Category, Grouping::Scene] {
            let t = aggregate(&records, g).unwrap();
            let total = t.total();
            prop_assert_eq!(total.count, records.len());
            prop_assert_eq!(t.rows[..t.rows.len() - 1].iter().map(|r| r.count).sum::<usize>(), records.len());
            // Stage rates never increase along the chain.
            for r in &t.rows {
                prop_assert!(r.percentages.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }
}

fn simulation() -> Vec<CorpusEntry> {
    load_corpus(data("corpus/simulation.json")).unwrap()
}

#[test]
fn live_evaluation_over_the_simulation_corpus() {
    let scenes = load_scene_dir(data("scenes")).unwrap();
    let c = cfg();
    let a = run_live_eval(&simulation(), &scenes, &c).unwrap();
    let b = run_live_eval(&simulation(), &scenes, &c).unwrap();
    assert_eq!(a, b);
    assert!(a.invalid.is_empty());
    assert_eq!(a.results.len(), 24);
    let ids: Vec<&str> = a.results.iter().map(|r| r.id.as_str()).collect();
    let corpus_ids: Vec<String> = simulation().into_iter().map(|e| e.id).collect();
    assert_eq!(ids, corpus_ids);
    assert!(a.results.iter().all(|r| r.stages.is_monotone()));
    let t = a.table.unwrap();
    assert_eq!(t.row("Generic").unwrap().percentages[0].to_string(), "100");
    assert_eq!(
        rows(&t),
        [
            "Generic & 9 & 100 & 88.89 & 88.89 & 88.89",
            "Specific & 5 & 100 & 100 & 100 & 80",
            "Relational & 6 & 100 & 100 & 100 & 100",
            "Contextual & 4 & 75 & 75 & 75 & 75",
            "Total & 24 & 95.83 & 91.67 & 91.67 & 87.5",
        ]
    );
}

#[test]
fn invalid_entries_are_listed_and_excluded() {
    let scenes = load_scene_dir(data("scenes")).unwrap();
    let mut corpus = simulation();
    corpus.truncate(3);
    corpus[0].target = "unicorn".into();
    corpus[1].fixture = "theater/missing".into();
    let mut ghost = corpus[2].clone();
    ghost.id = "ghost".into();
    ghost.scene = "atlantis".into();
    corpus.push(ghost);
    let e = run_live_eval(&corpus, &scenes, &cfg()).unwrap();
    let invalid: Vec<(&str, &str)> = e.invalid.iter().map(|i| (i.id.as_str(), i.reason.as_str())).collect();
    assert_eq!(
        invalid,
        [
            ("theater_go_to_fire_extinguisher", "target unicorn is not annotated in scene theater"),
            ("theater_go_to_vacuum", "missing fixture theater/missing"),
            ("ghost", "unknown scene atlantis"),
        ]
    );
    assert_eq!(e.results.len(), 1);
    assert_eq!(e.table.unwrap().total().count, 1);

    corpus.remove(2);
    let none = run_live_eval(&corpus, &scenes, &cfg()).unwrap();
    assert!(none.results.is_empty() && none.table.is_none());
    assert!(matches!(run_live_eval(&[], &scenes, &cfg()), Err(EvalError::EmptyCorpus)));
}

#[test]
fn panorama_beats_separate_frames_on_cross_frame_relations() {
    let scenes = load_scene_dir(data("scenes")).unwrap();
    let corpus = load_corpus(data("corpus/cross_frame.json")).unwrap();
    assert!(corpus.len() >= 10);
    assert!(corpus.iter().all(|e| e.category == Category::Relational && e.scene == "classroom"));
    let a = run_live_eval(&with_representation(&corpus, Mode::A), &scenes, &cfg()).unwrap();
    let b = run_live_eval(&with_representation(&corpus, Mode::B), &scenes, &cfg()).unwrap();
    assert!(a.invalid.is_empty() && b.invalid.is_empty());
    assert!(a.results.iter().all(|r| r.representation == Mode::A));
    assert!(b.results.iter().all(|r| r.representation == Mode::B));
    println!("OD passes: A {} / B {} of {}", a.od_passes(), b.od_passes(), corpus.len());
    assert!(a.od_passes() > b.od_passes());
    assert_eq!(a.od_passes(), corpus.len());
}
