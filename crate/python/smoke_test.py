"""Smoke test for the navcon extension module.

Build and install first:  maturin develop -m crates/py/Cargo.toml
Then run:                 python python/smoke_test.py   (or pytest)
"""

import json
import math

import navcon


def test_scene_loading():
    scene = navcon.Scene.load("theater")
    assert scene.name == "theater"
    assert "fire_extinguisher" in scene.object_ids
    same = navcon.Scene.from_json(json.dumps(scene.to_dict()))
    assert same.object_ids == scene.object_ids
    try:
        navcon.Scene.load("atlantis")
    except FileNotFoundError as e:
        assert "atlantis" in str(e)
    else:
        raise AssertionError("missing scene loaded")


def test_run_reports_every_stage():
    scene = navcon.Scene.load("theater")
    report = navcon.run(scene, "Go to the fire extinguisher", seed=3)
    stages = report["stages"]
    assert [stages[k]["pass"] for k in ("code", "od", "wp", "path_exec")] == [True] * 4
    assert report["target"] == "fire_extinguisher"
    again = navcon.run(scene, "Go to the fire extinguisher", seed=3)
    assert json.dumps(report, sort_keys=True) == json.dumps(again, sort_keys=True)

    failed = navcon.run(scene, "Go to the vacuum", target="vacuum", representation="b")
    assert failed["stages"]["od"]["pass"] is False
    assert failed["stages"]["path_exec"]["detail"] == "not attempted: WP failed"


def test_session_chains_commands():
    session = navcon.Session(navcon.Scene.load("theater"))
    start = session.pose
    report = session.run("walk to the table")
    assert session.commands_run == 1
    end = session.pose
    assert math.isclose(end[0], report["final_pose"]["x"])
    assert end != start
    session.reset()
    assert session.pose == start and session.commands_run == 0


def test_program_checks():
    ok = navcon.check_program(open(navcon.data_dir() + "/fixtures/theater/walk_to_table.py").read())
    assert ok["ok"] is True
    bad = navcon.check_program("def execute_command(image):\n    open('x')\n")
    assert bad["ok"] is False
    try:
        navcon.check_program("import os")
    except ValueError as e:
        assert "import" in str(e)
    else:
        raise AssertionError("import accepted")


def test_record_aggregation():
    table = navcon.aggregate_records("scene")
    total = table["rows"][-1]
    assert total["group"] == "Total" and total["count"] == 114
    text = navcon.format_table("representation")
    assert "Total       50     90     66" in text
    try:
        navcon.aggregate_records("colour")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown grouping accepted")


def test_corpus_evaluation():
    result = navcon.evaluate()
    assert len(result["results"]) >= 20
    assert result["table"]["rows"][-1]["group"] == "Total"
    a = navcon.evaluate(navcon.data_dir() + "/corpus/cross_frame.json", representation="A")
    b = navcon.evaluate(navcon.data_dir() + "/corpus/cross_frame.json", representation="B")
    od = lambda r: sum(e["stages"]["od"]["pass"] for e in r["results"])
    assert od(a) > od(b)


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print("ok", t.__name__)
    print(f"{len(tests)} passed")
