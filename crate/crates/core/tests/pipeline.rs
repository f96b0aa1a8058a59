use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::mpsc;
use std::thread;

use navcon_core::evalharness::{load_corpus, load_scene_dir, CorpusEntry};
use navcon_core::navlang::Origin;
use navcon_core::navruntime::NavResult;
use navcon_core::pipeline::{
    assemble_prompt, default_fixture_id, generate_program, run_command, CodegenConfig, CodegenError, CodegenMode,
    CommandReport, NavCommand, PipelineConfig, ProgramSource, Session, DEFAULT_PROMPT_TEMPLATE, QUERY_MARKER,
};
use navcon_core::projection::WaypointStatus;
use navcon_core::worldsim::World;
use navcon_core::DATA_DIR;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(DATA_DIR).join(rel)
}

fn scenes() -> BTreeMap<String, World> {
    load_scene_dir(data("scenes")).unwrap()
}

fn corpus() -> Vec<CorpusEntry> {
    load_corpus(data("corpus/simulation.json")).unwrap()
}

fn cfg() -> PipelineConfig {
    PipelineConfig::new(CodegenConfig::fixtures(data("fixtures")), 0)
}

fn entry(id: &str) -> CorpusEntry {
    corpus().into_iter().find(|e| e.id == id).unwrap()
}

fn run_entry(id: &str) -> CommandReport {
    let e = entry(id);
    run_command(&e.command(), &scenes()[&e.scene], &cfg())
}

fn flags(r: &CommandReport) -> String {
    r.stages.flags().iter().map(|&f| if f { 'P' } else { 'F' }).collect()
}

#[test]
fn fire_extinguisher_passes_every_stage() {
    let r = run_entry("theater_go_to_fire_extinguisher");
    assert!(r.stages.all_pass(), "{:#?}", r.stages);
    let nav = r.nav_result.as_ref().unwrap();
    assert_eq!(nav.function, "navigate_to_object");
    assert_eq!(nav.frame.as_deref(), Some("panorama"));
    assert_eq!(r.target.as_deref(), Some("fire_extinguisher"));
    let wp = r.waypoint.as_ref().unwrap();
    assert_eq!(wp.status, WaypointStatus::Hit);
    let theater = &scenes()["theater"];
    let ext = theater.scene.object("fire_extinguisher").unwrap();
    assert!(ext.bbox.footprint_distance(wp.position.x, wp.position.y) <= 1.0);
    let path = r.path.as_ref().unwrap();
    assert!(path.reached_goal);
    let follow = r.follow.as_ref().unwrap();
    assert!(follow.success);
    assert_eq!(r.final_pose, *follow.trajectory.last().unwrap());
    let end = path.waypoints.last().unwrap();
    assert!((end.x - r.final_pose.x).hypot(end.y - r.final_pose.y) <= 0.3);
    assert!(r.timings.is_none());
}

#[test]
fn detector_confusion_fails_detection_only() {
    let r = run_entry("theater_go_to_vacuum");
    assert_eq!(flags(&r), "PFFF");
    assert!(r.stages.od.detail.ends_with("with vacuum"), "{}", r.stages.od.detail);
    // The detector reported the mop under the vacuum query.
    assert_eq!(r.target.as_deref(), Some("vacuum"));
    let trace = r.trace.as_ref().unwrap();
    let found: Vec<_> = trace.patch_registry.iter().filter_map(|p| p.source_object.as_deref()).collect();
    assert_eq!(found, ["mop"]);
    assert_eq!(r.stages.wp.detail, "not attempted: OD failed");
    assert_eq!(r.stages.path_exec.detail, "not attempted: WP failed");
    assert!(r.waypoint.is_none() && r.path.is_none() && r.follow.is_none());
    assert_eq!(r.final_pose, r.start_pose);
}

#[test]
fn second_floor_fails_code_with_the_program_error() {
    let r = run_entry("lobby_go_to_second_floor");
    assert_eq!(flags(&r), "FFFF");
    assert_eq!(
        r.nav_result,
        Some(NavResult::failure("Image does not contain at least two floors."))
    );
    assert_eq!(r.stages.code.detail, "Image does not contain at least two floors.");
    assert_eq!(r.stages.od.detail, "not attempted: Code failed");
}

#[test]
fn unreachable_stage_top_fails_only_path_and_execution() {
    let r = run_entry("theater_navigate_to_black_speaker");
    assert_eq!(flags(&r), "PPPF");
    assert!(r.stages.path_exec.detail.starts_with("goal not reached after"), "{}", r.stages.path_exec.detail);
    assert!(r.follow.is_none());
    assert_eq!(r.final_pose, r.start_pose);
}

#[test]
fn corpus_reports_are_monotone_and_deterministic() {
    let s = scenes();
    let c = cfg();
    let mut outcomes = Vec::new();
    for e in corpus() {
        let a = run_command(&e.command(), &s[&e.scene], &c);
        let b = run_command(&e.command(), &s[&e.scene], &c);
        assert!(a.stages.is_monotone(), "{}", e.id);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap(), "{}", e.id);
        outcomes.push(format!("{} {}", flags(&a), e.id));
    }
    let failing: Vec<&String> = outcomes.iter().filter(|o| !o.starts_with("PPPP")).collect();
    assert_eq!(
        failing,
        [
            "PFFF theater_go_to_vacuum",
            "PPPF theater_navigate_to_black_speaker",
            "FFFF lobby_go_to_second_floor"
        ]
    );
}

#[test]
fn report_round_trips_through_json() {
    let r = run_entry("courtyard_go_to_fountain");
    let text = serde_json::to_string_pretty(&r).unwrap();
    let back: CommandReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
}

#[test]
fn timings_are_recorded_only_on_request() {
    let e = entry("courtyard_go_to_fountain");
    let mut c = cfg();
    c.record_timings = true;
    let r = run_command(&e.command(), &scenes()[&e.scene], &c);
    let t = r.timings.unwrap();
    assert!(t.codegen_ms >= 0.0 && t.follow_ms > 0.0);
}

#[test]
fn target_is_inferred_from_the_detected_patch() {
    let w = &scenes()["theater"];
    let cmd = NavCommand::new("Go to the fire extinguisher", "theater");
    assert_eq!(cmd.program_source, ProgramSource::Default);
    let r = run_command(&cmd, w, &cfg());
    assert_eq!(r.target.as_deref(), Some("fire_extinguisher"));
    assert!(r.stages.all_pass(), "{:#?}", r.stages);
    assert_eq!(r.program.unwrap().origin, Origin::Fixture);
}

#[test]
fn session_commands_chain_poses() {
    let s = scenes();
    let mut session = Session::new(s["theater"].clone());
    let start = session.robot.pose;
    let c = cfg();
    let first = session.run(&entry("theater_go_to_fire_extinguisher").command(), &c);
    assert!(first.stages.all_pass());
    assert_eq!(session.robot.pose, first.final_pose);
    assert_ne!(session.robot.pose, start);

    let failed = session.run(&entry("theater_go_to_vacuum").command(), &c);
    assert_eq!(failed.start_pose, first.final_pose);
    assert_eq!(session.robot.pose, first.final_pose);

    let second = session.run(&entry("theater_walk_to_table").command(), &c);
    assert_eq!(second.start_pose, first.final_pose);
    assert_eq!(session.commands_run, 3);
    // The session's world is its own copy.
    assert_eq!(session.world.scene, s["theater"].scene);

    session.reset();
    assert_eq!(session.robot.pose, start);
    assert_eq!(session.commands_run, 0);
}

#[test]
fn fixture_programs_are_returned_verbatim() {
    let c = CodegenConfig::fixtures(data("fixtures"));
    let cmd = NavCommand::new("Go to the fire extinguisher", "theater").fixture("theater/go_to_fire_extinguisher");
    let p = generate_program(&cmd, &c).unwrap();
    let file = std::fs::read_to_string(data("fixtures/theater/go_to_fire_extinguisher.py")).unwrap();
    assert_eq!(p.text, file);
    assert_eq!(p.origin, Origin::Fixture);
}

#[test]
fn default_fixture_ids() {
    assert_eq!(
        default_fixture_id("theater", "Go to the fire extinguisher"),
        "theater/go_to_fire_extinguisher"
    );
    assert_eq!(default_fixture_id("lobby", "I want to sit down."), "lobby/i_want_to_sit_down");
    assert_eq!(default_fixture_id("lobby", "Walk to a chair, then an exit"), "lobby/walk_to_chair_then_exit");
}

#[test]
fn missing_fixture_is_a_code_failure() {
    let w = &scenes()["theater"];
    let r = run_command(&NavCommand::new("Dance", "theater"), w, &cfg());
    assert_eq!(flags(&r), "FFFF");
    assert!(r.stages.code.detail.starts_with("missing fixture theater/dance"), "{}", r.stages.code.detail);
    assert!(r.program.is_none());
}

#[test]
fn invalid_programs_fail_code_with_the_first_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("theater")).unwrap();
    std::fs::write(
        dir.path().join("theater/x.py"),
        "def execute_command(image):\n    return {'function': 'None', 'error': open('x')}\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("theater/y.py"), "import os\ndef execute_command(image):\n    return 1\n").unwrap();
    let c = PipelineConfig::new(CodegenConfig::fixtures(dir.path()), 0);
    let w = &scenes()["theater"];
    let r = run_command(&NavCommand::new("x", "theater").fixture("theater/x"), w, &c);
    assert!(r.stages.code.detail.starts_with("validation failed: "), "{}", r.stages.code.detail);
    assert!(r.stages.code.detail.contains("open"), "{}", r.stages.code.detail);
    assert!(!r.validation.unwrap().ok);
    // Constructs outside the language are rejected while parsing.
    let r = run_command(&NavCommand::new("y", "theater").fixture("theater/y"), w, &c);
    assert_eq!(r.stages.code.detail, "unsupported construct at 1:1: import");
    assert!(r.validation.is_none() && r.trace.is_none());
}

#[test]
fn prompt_assembly_substitutes_once() {
    assert_eq!(DEFAULT_PROMPT_TEMPLATE.matches(QUERY_MARKER).count(), 1);
    let p = assemble_prompt(DEFAULT_PROMPT_TEMPLATE, "Go to the door").unwrap();
    assert!(!p.contains(QUERY_MARKER));
    assert_eq!(p.matches("Go to the door").count(), 1);
    assert_eq!(p.len(), DEFAULT_PROMPT_TEMPLATE.len() - QUERY_MARKER.len() + "Go to the door".len());
    // A query containing the marker text is not substituted again.
    let q = assemble_prompt("a INSERT_QUERY_HERE b", "INSERT_QUERY_HERE").unwrap();
    assert_eq!(q, "a INSERT_QUERY_HERE b");
    assert_eq!(assemble_prompt("no marker", "x"), Err(CodegenError::Marker(0)));
    assert_eq!(
        assemble_prompt("INSERT_QUERY_HERE INSERT_QUERY_HERE", "x"),
        Err(CodegenError::Marker(2))
    );
}

fn live_cfg(endpoint: &str, token_env: &str) -> CodegenConfig {
    CodegenConfig {
        mode: CodegenMode::Live,
        endpoint: Some(endpoint.into()),
        token_env: Some(token_env.into()),
        model: Some("test-model".into()),
        prompt_template: None,
        fixture_dir: data("fixtures"),
        timeout_secs: 5,
    }
}

/// One-shot HTTP server: answers the first request with `status` and `body`
/// and hands back the raw request text.
fn mock_endpoint(status: u16, body: String) -> (String, mpsc::Receiver<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut head = String::new();
        let mut length = 0usize;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                length = v.trim().parse().unwrap();
            }
            head.push_str(&line);
            if line == "\r\n" || line.is_empty() {
                break;
            }
        }
        let mut content = vec![0u8; length];
        reader.read_exact(&mut content).unwrap();
        head.push_str(&String::from_utf8(content).unwrap());
        tx.send(head).unwrap();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
    });
    (url, rx)
}

fn completion(content: &str) -> String {
    serde_json::json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string()
}

const SECRET: &str = "sk-test-7f3a9c1e5b";

#[test]
fn live_codegen_posts_the_prompt_and_extracts_the_program() {
    std::env::set_var("NAVCON_TEST_TOKEN_OK", SECRET);
    let program = "def execute_command(image):\n    return {'function': 'None', 'error': 'nothing'}";
    let (url, rx) = mock_endpoint(200, completion(&format!("Here you go:\n```python\n{program}\n```\nDone.")));
    let c = live_cfg(&url, "NAVCON_TEST_TOKEN_OK");
    let cmd = NavCommand::new("Go to the door", "lobby");
    let p = generate_program(&cmd, &c).unwrap();
    assert_eq!(p.text.trim_end(), program);
    assert_eq!(p.origin, Origin::LiveCodegen);
    let request = rx.recv().unwrap();
    assert!(request.starts_with("POST /v1/chat/completions"));
    assert!(request.to_ascii_lowercase().contains(&format!("authorization: bearer {}", SECRET.to_ascii_lowercase())));
    let body: serde_json::Value = serde_json::from_str(&request[request.find("\r\n\r\n").unwrap() + 4..]).unwrap();
    assert_eq!(body["model"], "test-model");
    let prompt = body["messages"][0]["content"].as_str().unwrap();
    assert_eq!(prompt, assemble_prompt(DEFAULT_PROMPT_TEMPLATE, "Go to the door").unwrap());
}

#[test]
fn live_codegen_without_code_is_a_code_failure() {
    std::env::set_var("NAVCON_TEST_TOKEN_EMPTY", SECRET);
    let (url, _rx) = mock_endpoint(200, completion("I cannot help with that."));
    let mut c = cfg();
    c.codegen = live_cfg(&url, "NAVCON_TEST_TOKEN_EMPTY");
    let r = run_command(&NavCommand::new("Go to the door", "lobby"), &scenes()["lobby"], &c);
    assert_eq!(r.stages.code.detail, "no code extracted");
    assert_eq!(flags(&r), "FFFF");
    assert!(!serde_json::to_string(&r).unwrap().contains(SECRET));
}

#[test]
fn transport_failures_never_reveal_the_token() {
    std::env::set_var("NAVCON_TEST_TOKEN_FAIL", SECRET);
    let (url, _rx) = mock_endpoint(500, format!("{{\"error\": \"bad token {SECRET}\"}}"));
    let c = live_cfg(&url, "NAVCON_TEST_TOKEN_FAIL");
    let cmd = NavCommand::new("Go to the door", "lobby");
    let e = generate_program(&cmd, &c).unwrap_err();
    assert_eq!(e, CodegenError::Transport("HTTP status 500".into()));

    let closed = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/", closed.local_addr().unwrap());
    drop(closed);
    let e = generate_program(&cmd, &live_cfg(&url, "NAVCON_TEST_TOKEN_FAIL")).unwrap_err();
    assert!(matches!(e, CodegenError::Transport(_)), "{e:?}");
    assert!(!e.to_string().contains(SECRET) && !format!("{e:?}").contains(SECRET));
}

#[test]
fn live_configuration_is_validated() {
    let cmd = NavCommand::new("Go to the door", "lobby");
    let mut c = live_cfg("http://127.0.0.1:9/", "NAVCON_TEST_TOKEN_UNSET_6d2");
    assert_eq!(
        generate_program(&cmd, &c),
        Err(CodegenError::MissingToken("NAVCON_TEST_TOKEN_UNSET_6d2".into()))
    );
    c.endpoint = None;
    assert_eq!(c.validate(), Err(CodegenError::Config("an endpoint")));
    c.endpoint = Some("http://127.0.0.1:9/".into());
    c.token_env = Some(String::new());
    assert_eq!(c.validate(), Err(CodegenError::Config("a token environment variable")));
    assert!(CodegenConfig::fixtures("x").validate().is_ok());
    let fixture_cfg = CodegenConfig::fixtures(data("fixtures"));
    let mut live_cmd = cmd.clone();
    live_cmd.program_source = ProgramSource::Live;
    assert_eq!(generate_program(&live_cmd, &fixture_cfg), Err(CodegenError::Config("mode live")));

    std::env::set_var("NAVCON_TEST_TOKEN_TPL", SECRET);
    let dir = tempfile::tempdir().unwrap();
    let tpl = dir.path().join("t.txt");
    std::fs::write(&tpl, "no marker here").unwrap();
    let mut c = live_cfg("http://127.0.0.1:9/", "NAVCON_TEST_TOKEN_TPL");
    c.prompt_template = Some(tpl);
    assert_eq!(generate_program(&cmd, &c), Err(CodegenError::Marker(0)));
}
