use navcon_core::navlang::{parse_str, print_program, validate_program, Severity};
use proptest::prelude::*;

mod common;
use common::snippets::{check, docstring_scene, docstring_snippets};

#[test]
fn printed_snippets_meet_their_contracts() {
    let w = docstring_scene();
    let failures: Vec<String> = docstring_snippets().iter().filter_map(|s| check(&w, s).err()).collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn api_usage_of_firefighter_program() {
    let src = "def execute_command(image):
    image_patch = ImagePatch(image)
    for name in ['fire extinguisher', 'fire hydrant']:
        found = image_patch.find(name)
        if len(found) > 0:
            p = found[0]
            return navigate_to_object(p.horizontal_center, p.vertical_center)
    return {'function': 'None', 'error': 'nothing found'}
";
    let r = validate_program(&parse_str(src).unwrap());
    assert!(r.ok);
    for api in ["find", "navigate_to_object", "ImagePatch", "len"] {
        assert!(r.api_usage.iter().any(|a| a == api), "{api} missing from {:?}", r.api_usage);
    }
}

fn name() -> impl Strategy<Value = String> {
    prop_oneof![Just("a"), Just("b"), Just("xs"), Just("p"), Just("open"), Just("image")].prop_map(String::from)
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        name(),
        (-50i64..50).prop_map(|v| v.to_string()),
        (0.0f64..10.0).prop_map(|v| format!("{v:.3}")),
        "[a-z ]{0,6}".prop_map(|s| format!("'{s}'")),
        Just("True".to_string()),
        Just("None".to_string()),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), prop_oneof![Just("+"), Just("-"), Just("*"), Just("//"), Just("%"), Just("/")], inner.clone())
                .prop_map(|(a, op, b)| format!("({a} {op} {b})")),
            (inner.clone(), prop_oneof![Just("<"), Just("=="), Just("!="), Just(">=")], inner.clone())
                .prop_map(|(a, op, b)| format!("{a} {op} {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} and not {b})")),
            prop::collection::vec(inner.clone(), 0..3).prop_map(|v| format!("[{}]", v.join(", "))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}, {b})")),
            (inner.clone(), -3i64..3).prop_map(|(a, i)| format!("({a})[{i}]")),
            (inner.clone(), prop_oneof![Just("left"), Just("horizontal_center"), Just("pixels")])
                .prop_map(|(a, f)| format!("({a}).{f}")),
            (prop_oneof![Just("len"), Just("abs"), Just("sorted"), Just("ImagePatch"), Just("open")], inner.clone())
                .prop_map(|(f, a)| format!("{f}({a})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("p.find({a}, key=lambda q: {b})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("{{'function': {a}, 'error': {b}}}")),
        ]
    })
}

fn stmt() -> impl Strategy<Value = Vec<String>> {
    prop_oneof![
        (name(), expr()).prop_map(|(n, e)| vec![format!("{n} = {e}")]),
        (name(), name(), expr()).prop_map(|(a, b, e)| vec![format!("{a}, {b} = ({e}, 1)")]),
        expr().prop_map(|e| vec![e]),
        expr().prop_map(|e| vec![format!("return {e}")]),
        (expr(), expr(), expr()).prop_map(|(c, a, b)| vec![
            format!("if {c}:"),
            format!("    x = {a}"),
            "else:".into(),
            format!("    return {b}"),
        ]),
        (name(), expr(), expr()).prop_map(|(n, s, e)| vec![format!("for {n} in {s}:"), format!("    a = {e}")]),
    ]
}

fn program() -> impl Strategy<Value = String> {
    prop::collection::vec(stmt(), 1..6).prop_map(|stmts| {
        let mut out = String::from("def execute_command(image):\n");
        for line in stmts.concat() {
            out.push_str("    ");
            out.push_str(&line);
            out.push('\n');
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_a_fixed_point(src in program()) {
        let ast = parse_str(&src).unwrap();
        let printed = print_program(&ast);
        let again = parse_str(&printed).unwrap();
        prop_assert_eq!(print_program(&again), printed);
    }

    #[test]
    fn validation_is_idempotent_and_ok_iff_no_errors(src in program()) {
        let ast = parse_str(&src).unwrap();
        let a = validate_program(&ast);
        let b = validate_program(&ast);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.ok, !a.diagnostics.iter().any(|d| d.severity == Severity::Error));
        let reparsed = parse_str(&print_program(&ast)).unwrap();
        let c = validate_program(&reparsed);
        prop_assert_eq!(a.ok, c.ok);
        prop_assert_eq!(a.api_usage, c.api_usage);
    }
}
