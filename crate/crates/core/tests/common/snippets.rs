//! Every program printed with the ImagePatch API documentation, the outlet
//! sort and the second-floor block, with the outcome each one is contracted
//! to produce in a scene built to contain its nouns.

use navcon_core::navlang::{parse_str, validate_program, ParseError};
use navcon_core::navruntime::{execute_program, ExecConfig, NavResult};
use navcon_core::projection::Mode;
use navcon_core::worldsim::{render_views, World};
use serde_json::json;

use super::scenes::{obj, world_with};

pub enum Expect {
    /// Program returns this string (surfaced as a `None` result's error).
    Text(&'static str),
    /// Program returns patches produced for exactly these objects, in order.
    Patches(&'static [&'static str]),
    /// Program returns one patch (or a navigation mapping) for this object.
    Navigate(&'static str),
    /// The printed text is not valid syntax; the parser reports this line.
    SyntaxError(u32),
    /// Parses but validation rejects it with this message.
    Invalid(&'static str),
    Result(NavResult),
}

pub struct Snippet {
    pub name: &'static str,
    pub source: String,
    pub expect: Expect,
}

/// Strips the `>>> ` doctest prefix from each line.
fn doctest(s: &str) -> String {
    s.lines()
        .map(|l| l.trim_start().strip_prefix(">>>").map(|r| r.strip_prefix(' ').unwrap_or(r)).unwrap_or(l))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

fn wrap(body: &str) -> String {
    format!(
        "def execute_command(image):\n{}",
        body.lines().map(|l| format!("    {l}\n")).collect::<String>()
    )
}

/// Robot at (2, 10) facing +x; most objects stand 4 m ahead along a row.
pub fn docstring_scene() -> World {
    let at = |id: &str, label: &str, attrs: &[&str], x: f64, y: f64, z: [f64; 2]| {
        obj(id, label, attrs, [x - 0.2, y - 0.2, z[0]], [x + 0.2, y + 0.2, z[1]])
    };
    let ground = [0.1, 0.6];
    let objects = vec![
        at("foo_gold", "foo", &["gold"], 6.0, 12.6, ground),
        at("letters", "letters", &["blue"], 6.0, 11.9, ground),
        at("baz_fred", "baz", &["fredding"], 6.0, 11.2, ground),
        at("baz_plain", "baz", &["striped"], 6.0, 10.5, ground),
        at("garply", "garply bar", &[], 6.0, 9.8, ground),
        at("qux", "qux", &[], 6.0, 9.1, [0.1, 0.5]),
        at("foo_black", "foo", &["black"], 6.0, 9.1, [0.5, 0.9]),
        at("bar_near", "bar", &[], 4.5, 8.5, ground),
        at("bar_mid", "bar", &[], 6.0, 8.2, ground),
        at("bar_far", "bar", &[], 9.0, 7.6, ground),
        at("foo_blue", "foo", &["blue"], 6.0, 6.9, ground),
    ];
    let qa = json!({"qa_fixtures": [
        {"object_id": "baz_plain", "question": "what is this baz", "answer": "striped baz"},
        {"object_id": "foo_gold", "question": "what is the color", "answer": "gold"},
        {"object_id": "bar_mid", "question": "is the bar quuxy", "answer": "yes"}
    ]});
    world_with(objects, [2.0, 10.0, 0.0], qa)
}

pub fn docstring_snippets() -> Vec<Snippet> {
    let s = |name, source: &str, expect| Snippet {
        name,
        source: doctest(source),
        expect,
    };
    vec![
        s(
            "find",
            r#">>> def execute_command(image) -> List[ImagePatch]:
>>>     image_patch = ImagePatch(image)
>>>     foo_patches = image_patch.find("foo")
>>>     return foo_patches"#,
            Expect::Patches(&["foo_gold", "foo_black", "foo_blue"]),
        ),
        s(
            "exists",
            r#">>> def execute_command(image)->str:
>>>     image_patch = ImagePatch(image)
>>>     is_foo = image_patch.exists("foo")
>>>     is_garply_bar = image_patch.exists("garply bar")
>>>     return bool_to_yesno(is_foo and is_garply_bar)"#,
            Expect::Text("yes"),
        ),
        s(
            "verify_property",
            r#">>> def execute_command(image) -> str:
>>>     image_patch = ImagePatch(image)
>>>     letters_patches = image_patch.find("letters")
>>>     # Question assumes only one letter patch
>>>     return bool_to_yesno(letters_patches[0].verify_property("letters", "blue"))"#,
            Expect::Text("yes"),
        ),
        s(
            "best_text_match",
            r#">>> def execute_command(image)->str:
>>>     image_patch = ImagePatch(image)
>>>     foo_patches = image_patch.find("foo")
>>>     # Question assumes one foo patch
>>>     return foo_patches[0].best_text_match(["gold", "white"])"#,
            Expect::Text("gold"),
        ),
        s(
            "simple_query_baz",
            r#">>> def execute_command(image) -> str:
>>>     image_patch = ImagePatch(image)
>>>     baz_patches = image_patch.find("baz")
>>>     for baz_patch in baz_patches:
>>>         if not baz_patch.verify_property("baz", "fredding"):
>>>             return baz_patch.simple_query("What is this baz?")"#,
            Expect::Text("striped baz"),
        ),
        s(
            "simple_query_color",
            r#">>> def execute_command(image) -> str:
>>>     image_patch = ImagePatch(image)
>>>     foo_patches = image_patch.find("foo")
>>>     foo_patch = foo_patches[0]
>>>     return foo_patch.simple_query("What is the color?")"#,
            Expect::Text("gold"),
        ),
        s(
            "simple_query_second_bar",
            r#">>> def execute_command(image) -> str:
>>>     image_patch = ImagePatch(image)
>>>     bar_patches = image_patch.find("bar")
>>>     bar_patches.sort(key=lambda x: x.horizontal_center)
>>>     bar_patch = bar_patches[1]
>>>     return bar_patch.simple_query("Is the bar quuxy?")"#,
            Expect::Text("yes"),
        ),
        s(
            "compute_depth",
            r#">>> def execute_command(image)->ImagePatch:
>>>     image_patch = ImagePatch(image)
>>>     bar_patches = image_patch.find("bar")
>>>     bar_patches.sort(key=lambda bar: bar.compute_depth())
>>>     return bar_patches[-1]"#,
            Expect::Navigate("bar_far"),
        ),
        s(
            "overlaps_with_printed",
            r#">>> def execute_command(image) -> ImagePatch:
>>>     image_patch = ImagePatch(image)
>>>     qux_patches = image_patch.find("qux")
>>>     qux_patch = qux_patches[0]
>>>     foo_patches = image_patch.find("black foo")
>>>     for foo in foo_patches:
>>>         if foo.vertical_center > qux_patch.vertical_center
>>>             return foo"#,
            Expect::SyntaxError(7),
        ),
        s(
            "overlaps_with_corrected",
            r#"def execute_command(image) -> ImagePatch:
    image_patch = ImagePatch(image)
    qux_patches = image_patch.find("qux")
    qux_patch = qux_patches[0]
    foo_patches = image_patch.find("black foo")
    for foo in foo_patches:
        if foo.vertical_center > qux_patch.vertical_center:
            return foo"#,
            Expect::Navigate("foo_black"),
        ),
        s(
            "distance",
            r#">>> def execute_command(image):
>>>     image_patch = ImagePatch(image)
>>>     qux_patches = image_patch.find('qux')
>>>     foo_patches = image_patch.find('foo')
>>>     foo_patch = foo_patches[0]
>>>     qux_patches.sort(key=lambda x: distance(x, foo_patch))
>>>     return qux_patches[0]"#,
            Expect::Navigate("qux"),
        ),
        s(
            "nav_client_printed",
            r#">>> def execute_command(image)
>>>     image_patch = ImagePatch(image)
>>>     foo_patches = image_patch.find("foo")
>>>     # Verify visual property
>>>     blue_color_patches = []
>>>     for foo_patch in foo_patches:
>>>         if verify_property(blue, "color")
>>>            blue_color_patches.append(foo_patch)
>>>     inputs = (blue_color_patches[0].horizontal_center, blue_color_patches[0].vertical_center)
>>>     return {'function': 'nav_function', 'inputs': inputs, 'box': [blue_color_patches[0].left, blue_color_patches[0].lower, blue_color_patches[0].right, blue_color_patches.upper]}"#,
            Expect::SyntaxError(1),
        ),
        s(
            "nav_client_with_colons_only",
            r#"def execute_command(image):
    image_patch = ImagePatch(image)
    foo_patches = image_patch.find("foo")
    blue_color_patches = []
    for foo_patch in foo_patches:
        if verify_property(blue, "color"):
           blue_color_patches.append(foo_patch)
    inputs = (blue_color_patches[0].horizontal_center, blue_color_patches[0].vertical_center)
    return {'function': 'nav_function', 'inputs': inputs, 'box': [blue_color_patches[0].left, blue_color_patches[0].lower, blue_color_patches[0].right, blue_color_patches.upper]}"#,
            Expect::Invalid("disallowed global: verify_property"),
        ),
        s(
            "nav_client_corrected",
            r#"def execute_command(image):
    image_patch = ImagePatch(image)
    foo_patches = image_patch.find("foo")
    blue_color_patches = []
    for foo_patch in foo_patches:
        if foo_patch.verify_property("foo", "blue"):
           blue_color_patches.append(foo_patch)
    inputs = (blue_color_patches[0].horizontal_center, blue_color_patches[0].vertical_center)
    return {'function': 'nav_function', 'inputs': inputs, 'box': [blue_color_patches[0].left, blue_color_patches[0].lower, blue_color_patches[0].right, blue_color_patches[0].upper]}"#,
            Expect::Navigate("foo_blue"),
        ),
        Snippet {
            name: "second_floor",
            source: wrap(
                "floor_patches = ImagePatch(image).find('floor')
floor_patches.sort(key=lambda x: x.vertical_center)
if len(floor_patches) < 2:
    return {'function': 'None', 'error': 'Image does not contain at least two floors.'}
second_floor_patch = floor_patches[1]",
            ),
            expect: Expect::Result(NavResult::failure("Image does not contain at least two floors.")),
        },
    ]
}

/// Runs one snippet in mode A and compares it with its contract.
pub fn check(w: &World, s: &Snippet) -> Result<(), String> {
    let ast = match parse_str(&s.source) {
        Ok(a) => a,
        Err(e) => {
            return match s.expect {
                Expect::SyntaxError(line) if matches!(e, ParseError::Syntax { .. }) && e.span().line == line => Ok(()),
                _ => Err(format!("{}: unexpected parse error {e}", s.name)),
            }
        }
    };
    if let Expect::SyntaxError(line) = s.expect {
        return Err(format!("{}: expected a syntax error on line {line}", s.name));
    }
    let report = validate_program(&ast);
    if let Expect::Invalid(msg) = s.expect {
        return if !report.ok && report.diagnostics.iter().any(|d| d.message == msg) {
            Ok(())
        } else {
            Err(format!("{}: expected diagnostic {msg:?}, got {:?}", s.name, report.diagnostics))
        };
    }
    if !report.ok {
        return Err(format!("{}: validation failed {:?}", s.name, report.diagnostics));
    }
    let views = render_views(w, &w.scene.start_state());
    let (res, trace) = execute_program(&ast, w, &views, &ExecConfig::new(Mode::A));
    let source_of = |id: usize| trace.patch_registry[id].source_object.clone().unwrap_or_default();
    match &s.expect {
        Expect::Text(t) => (res.error.as_deref() == Some(*t) && res.function == "None")
            .then_some(())
            .ok_or(format!("{}: expected text {t:?}, got {res:?}", s.name)),
        Expect::Patches(ids) => {
            let want: Vec<String> = trace
                .patch_registry
                .iter()
                .filter(|p| p.created_by == "find")
                .map(|p| format!("<patch #{}>", p.id))
                .collect();
            let got_ids: Vec<String> = trace
                .patch_registry
                .iter()
                .filter(|p| p.created_by == "find")
                .map(|p| source_of(p.id))
                .collect();
            let ok = trace.returned.as_deref() == Some(&format!("[{}]", want.join(", ")))
                && got_ids == *ids
                && res == NavResult::failure("malformed result");
            ok.then_some(())
                .ok_or(format!("{}: got {:?} from {got_ids:?}, result {res:?}", s.name, trace.returned))
        }
        Expect::Navigate(id) => {
            let Some(b) = res.bbox else {
                return Err(format!("{}: no box in {res:?}", s.name));
            };
            let hit = trace
                .patch_registry
                .iter()
                .find(|p| p.bounds.as_array() == b && p.source_object.is_some())
                .map(|p| source_of(p.id));
            (res.function == "navigate_to_object" && hit.as_deref() == Some(*id))
                .then_some(())
                .ok_or(format!("{}: expected {id}, got {hit:?} in {res:?}", s.name))
        }
        Expect::Result(want) => (res == *want)
            .then_some(())
            .ok_or(format!("{}: expected {want:?}, got {res:?}", s.name)),
        Expect::SyntaxError(_) | Expect::Invalid(_) => unreachable!(),
    }
}
