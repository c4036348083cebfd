import pytest

from core.errors import ScenarioError
from core.runner import SCENARIOS, canonical_name, resolve_config
from core.scenario_loader import ScenarioConfig, ScenarioLoader

CUSTOM = """# Name: custom
# Description: 自定义曲线
# Field: 101
# Seed: 7
# CertifySmooth: true

## Curve
variant: parametric
forms: s**3, s**2*u, s*u**2, u**3

## Plan
- sections-dimension
- vertex-witness-U
"""


def test_parse_front_matter_and_sections():
    cfg = ScenarioLoader().parse(CUSTOM)
    assert cfg.name == "custom"
    assert cfg.field == "101"
    assert cfg.seed == 7
    assert cfg.certify_smooth is True
    assert cfg.curve_spec == {"variant": "parametric", "forms": ["s**3", "s**2*u", "s*u**2", "u**3"]}
    assert cfg.plan == ["sections-dimension", "vertex-witness-U"]
    assert cfg.curve_source()["variant"] == "parametric"


def test_unknown_key_and_bad_integer():
    loader = ScenarioLoader()
    with pytest.raises(ScenarioError):
        loader.parse("# Name: x\n# Colour: blue\n")
    with pytest.raises(ScenarioError):
        loader.parse("# Name: x\n# Seed: many\n")


def test_curve_section_needs_variant():
    with pytest.raises(ScenarioError):
        ScenarioLoader().parse("# Name: x\n\n## Curve\nforms: s**3\n")


def test_every_builtin_scenario_has_a_file():
    loader = ScenarioLoader()
    assert set(SCENARIOS) <= set(loader.available())
    for name in SCENARIOS:
        cfg = loader.load(name)
        assert cfg.name == name
        assert cfg.description


def test_missing_scenario_file_returns_none(tmp_path):
    assert ScenarioLoader(str(tmp_path)).load("classify") is None


def test_alias_and_unknown_name():
    assert canonical_name("full-paper-suite") == "full-suite"
    with pytest.raises(ScenarioError) as info:
        canonical_name("no-such-scenario")
    assert info.value.exit_code == 2


def test_merge_rejects_unknown_override():
    with pytest.raises(ScenarioError):
        ScenarioConfig(name="x").merged({"colour": "blue"})


def test_precedence_file_over_flags(tmp_path):
    path = tmp_path / "override.md"
    path.write_text("# Seed: 5\n# Samples: 3\n", encoding="utf-8")
    assert resolve_config("gamma", {"seed": 9}).seed == 9
    cfg = resolve_config("gamma", {"seed": 9, "truncation": 40}, str(path))
    assert cfg.seed == 5
    assert cfg.samples == 3
    assert cfg.truncation == 40
    assert cfg.name == "gamma"


def test_missing_config_file(tmp_path):
    with pytest.raises(ScenarioError):
        resolve_config("gamma", {}, str(tmp_path / "absent.md"))


def test_inputs_are_sorted_and_skip_none():
    inputs = ScenarioConfig(name="x", seed=3).inputs()
    assert list(inputs) == sorted(inputs)
    assert "truncation" not in inputs
    assert inputs["seed"] == 3
